"""Shape-invariant supersymmetric potentials with PT-symmetric complex parameters."""
from ._kernels import BACKEND
from .complex_special import Grid, GridFunction, gudermannian, jacobi_poly, jacobi_series
from .errors import (
    BoundStateError,
    ConvergenceError,
    DegenerateRecurrenceError,
    DomainError,
    GridError,
    ParameterError,
    SusyptError,
)
from .pt_analysis import BranchLabel, PTReport, bifurcation_residual, classify_branch, pt_check
from .shape_invariance import (
    FamilyDescriptor,
    SpectrumResult,
    analytic_eigenfunction,
    closed_form_spectrum,
    descriptor,
    hierarchy,
    ladder_state,
    param_step,
    remainder,
    shape_invariance_residual,
    spectrum_by_summation,
)
from .spectral_solver import (
    EigenReport,
    bound_spectrum,
    cc_pair_check,
    discretize_hamiltonian,
    eigen_residual,
    eigenvalues,
    filter_bound_states,
    match_spectra,
)
from .superpotential import (
    DomainSpec,
    Family,
    ParamSet,
    eval_W,
    eval_W_prime,
    ground_state,
    make_params,
    potential,
    validate_params,
)

__version__ = "0.1.0"
