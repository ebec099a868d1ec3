"""Compiled inner loops for long matrix-product chains."""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def _mgs(X, logs):
    """In-place modified Gram-Schmidt with one re-orthogonalisation pass.

    Columns of ``X`` become orthonormal; ``log R_ii`` is added to ``logs``.
    Returns False if a column collapsed or overflowed.
    """
    d = X.shape[1]
    for i in range(d):
        for _ in range(2):
            for j in range(i):
                r = 0.0
                for t in range(X.shape[0]):
                    r += X[t, j] * X[t, i]
                for t in range(X.shape[0]):
                    X[t, i] -= r * X[t, j]
        nrm = 0.0
        for t in range(X.shape[0]):
            nrm += X[t, i] * X[t, i]
        nrm = np.sqrt(nrm)
        if not (nrm > 0.0 and nrm < np.inf):
            return False
        logs[i] += np.log(nrm)
        for t in range(X.shape[0]):
            X[t, i] /= nrm
    return True


@njit(cache=True)
def qr_chain(table, codes, Q, logs, renorm_every):
    """Propagate the frame ``Q`` through ``table[codes[0]], table[codes[1]], ...``.

    ``Q`` and ``logs`` are updated in place so long orbits can be processed
    in chunks.  Returns the number of steps completed (short on overflow).
    """
    d = Q.shape[0]
    tmp = np.empty((d, d))
    n = codes.shape[0]
    for step in range(n):
        M = table[codes[step]]
        for a in range(d):
            for b in range(d):
                acc = 0.0
                for c in range(d):
                    acc += M[a, c] * Q[c, b]
                tmp[a, b] = acc
        Q[:, :] = tmp
        if (step + 1) % renorm_every == 0 or step == n - 1:
            if not _mgs(Q, logs):
                return step
    return n


@njit(cache=True)
def chain_product(table, codes):
    d = table.shape[1]
    P = np.eye(d)
    tmp = np.empty((d, d))
    for step in range(codes.shape[0]):
        M = table[codes[step]]
        for a in range(d):
            for b in range(d):
                acc = 0.0
                for c in range(d):
                    acc += M[a, c] * P[c, b]
                tmp[a, b] = acc
        P[:, :] = tmp
    return P
