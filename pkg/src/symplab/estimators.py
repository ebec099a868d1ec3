"""scikit-learn style wrappers around the spectrum and classification routines."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .linalg import EPS_DRIFT, symplectic_defect
from .errors import NotSymplecticError
from .lyapunov import qr_spectrum_matrices
from .spectral import SpectralType, classify


def check_symplectic_array(X, tol: float = EPS_DRIFT) -> np.ndarray:
    """Validate a stack of shape ``(n, 2l, 2l)`` of symplectic matrices."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1] != X.shape[2] or X.shape[1] % 2:
        raise ValueError(f"expected shape (n, 2l, 2l), got {X.shape}")
    bad = [i for i, M in enumerate(X) if symplectic_defect(M) > tol]
    if bad:
        raise NotSymplecticError(f"{len(bad)} matrices exceed defect {tol:.0e}, first index {bad[0]}")
    return X


class LyapunovSpectrumEstimator(BaseEstimator):
    """QR estimate of the Lyapunov spectrum of a matrix sequence.

    ``fit(X)`` treats ``X[0], X[1], ...`` as the factors of one orbit product.

    Attributes
    ----------
    exponents_ : ndarray
        Descending exponents.
    pairing_defect_, sum_defect_ : float
    """

    def __init__(self, renorm_every: int = 1):
        self.renorm_every = renorm_every

    def fit(self, X, y=None):
        X = check_symplectic_array(X)
        spec = qr_spectrum_matrices(X, self.renorm_every)
        self.spectrum_ = spec
        self.exponents_ = np.asarray(spec.exponents)
        self.pairing_defect_ = spec.pairing_defect
        self.sum_defect_ = spec.sum_defect
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X=None):
        check_is_fitted(self, "exponents_")
        return self.exponents_.copy()

    def score(self, X=None, y=None) -> float:
        """Negative pairing defect, so larger is better."""
        check_is_fitted(self, "exponents_")
        return -self.pairing_defect_


class SpectralTypeClassifier(ClassifierMixin, BaseEstimator):
    """Stateless classifier mapping symplectic matrices to their spectral type."""

    def fit(self, X=None, y=None):
        self.classes_ = np.array([t.value for t in SpectralType])
        return self

    def predict(self, X) -> np.ndarray:
        X = check_symplectic_array(X, tol=1e-8)
        return np.array([classify(M).value for M in X])
