"""PT-symmetry test for sampled potentials and branch classification of Scarf II parameters."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .complex_special import GridFunction
from .errors import GridError
from .superpotential import ParamSet

__all__ = ["BranchLabel", "PTReport", "pt_check", "bifurcation_residual", "classify_branch"]

DEFAULT_TOL = 1e-10


class BranchLabel(str, enum.Enum):
    REAL_SPECTRUM = "RealSpectrum"
    COMPLEX_CONJUGATE = "ComplexConjugate"
    NON_PT = "NonPT"


@dataclass(frozen=True)
class PTReport:
    is_pt: bool
    max_deviation: float
    even_part_im_max: float
    odd_part_re_max: float


def pt_check(V: GridFunction, tol: float = DEFAULT_TOL) -> PTReport:
    """Sup-norm test of ``V(x) == conj(V(-x))`` over the grid nodes.

    A PT-symmetric potential has a real even part and an imaginary odd part;
    the report carries the size of the violating components separately.
    """
    if not V.grid.is_symmetric:
        raise GridError("parity check requires symmetric grid (x_min = -x_max, odd n_points)")
    v = V.values
    mirrored = v[::-1]
    deviation = float(np.max(np.abs(v - np.conj(mirrored))))
    even = 0.5 * (v + mirrored)
    odd = 0.5 * (v - mirrored)
    return PTReport(
        is_pt=deviation <= tol,
        max_deviation=deviation,
        even_part_im_max=float(np.max(np.abs(even.imag))),
        odd_part_re_max=float(np.max(np.abs(odd.real))),
    )


def bifurcation_residual(p: ParamSet) -> float:
    """``C_pt * (2 (A - B) + alpha)``; zero exactly on the two PT branches."""
    return float((p.C_pt * (2 * (p.A - p.B) + p.alpha)).real)


def classify_branch(p: ParamSet, tol: float = DEFAULT_TOL) -> BranchLabel:
    if abs(p.C_pt) <= tol:
        return BranchLabel.REAL_SPECTRUM
    if abs(2 * (p.A - p.B) + p.alpha) <= tol:
        return BranchLabel.COMPLEX_CONJUGATE
    return BranchLabel.NON_PT
