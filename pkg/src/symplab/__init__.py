"""Numerical toolkit for symplectic cocycles over the full shift."""
from .cocycle import (
    CocycleGenerator,
    constant,
    diagonal_walk,
    domination_check,
    evaluate,
    fiber_bunching_margin,
    from_matrices,
    holder_distance,
    holder_norm,
    holder_window,
    identity,
    iterate,
    orthosymplectic,
    random_generator,
)
from .errors import *  # noqa: F401,F403
from .estimators import LyapunovSpectrumEstimator, SpectralTypeClassifier, check_symplectic_array
from .experiments import (
    AtomicMeasure,
    ExperimentReport,
    break_zero_experiment,
    dominated_periodic_scan,
    obstruction_experiment,
    openness_probe,
)
from .holonomy import holonomy, holonomy_properties_check, stable_holonomy, unstable_holonomy
from .linalg import (
    SubspaceClass,
    SympMatrix,
    classify_subspace,
    complete_symplectic_basis,
    omega,
    random_symplectic,
    standard_form,
    symplectic_defect,
    symplectic_inverse,
)
from .lyapunov import LyapunovSpectrum, oseledets_pairing, periodic_spectrum, qr_spectrum
from .perturbation import (
    breaking_check,
    bump,
    canonical_perturbation,
    compose,
    localized_rotation_cocycle,
    rotation_Rt,
)
from .shift import (
    PeriodicPoint,
    ShiftSpace,
    SymbolicPoint,
    bracket,
    dist,
    heteroclinic_point,
    periodic_point,
    sample_point,
    shift,
)
from .spectral import SpectralType, canonical_matrix, classify, classify_sp4

__version__ = "0.1.0"
