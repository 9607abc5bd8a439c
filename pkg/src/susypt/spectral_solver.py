"""Finite-difference Hamiltonians and an in-house dense complex eigensolver.

The eigensolver reduces to upper Hessenberg form with Householder reflectors
and then runs single-shift complex QR with Wilkinson shifts and deflation.
Only eigenvalues are computed; eigenvectors for the bound-state filter come
from inverse iteration on the tridiagonal Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .complex_special import GridFunction
from .errors import BoundStateError, ConvergenceError, GridError

__all__ = [
    "EigenReport",
    "hamiltonian_diagonals",
    "discretize_hamiltonian",
    "eigenvalues",
    "boundary_amplitude",
    "filter_bound_states",
    "match_spectra",
    "cc_pair_check",
    "eigen_residual",
    "bound_spectrum",
    "MAX_ORDER",
]

MAX_ORDER = 2000


@dataclass
class EigenReport:
    eigenvalues: np.ndarray
    residuals: np.ndarray | None = None
    matched: list = field(default_factory=list)
    unmatched_analytic: list = field(default_factory=list)
    artifacts_discarded: int = 0

    @property
    def all_matched(self) -> bool:
        return not self.unmatched_analytic

    @property
    def max_error(self) -> float:
        errs = [m[3] for m in self.matched] + [u[3] for u in self.unmatched_analytic]
        return max(errs) if errs else 0.0


def hamiltonian_diagonals(V: GridFunction):
    """Sub-, main and super-diagonal of ``-d²/dx² + V`` on the interior nodes."""
    n = V.grid.n_points
    if n < 5:
        raise GridError("need at least 5 grid points")
    inv_h2 = 1.0 / V.grid.h**2
    m = n - 2
    off = np.full(m - 1, -inv_h2, dtype=complex)
    diag = 2.0 * inv_h2 + V.values[1:-1]
    return off.copy(), np.asarray(diag, dtype=complex), off


def discretize_hamiltonian(V: GridFunction) -> np.ndarray:
    """Dense ``(n-2) x (n-2)`` matrix of ``-d²/dx² + V`` with Dirichlet walls.

    Second-order stencil: diagonal ``2/h² + V_j``, off-diagonals ``-1/h²``.
    """
    lower, diag, upper = hamiltonian_diagonals(V)
    return np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)


def eigenvalues(M, tol: float | None = None, max_iters: int = 100,
                max_order: int = MAX_ORDER) -> np.ndarray:
    """All eigenvalues of a square complex matrix.

    Parameters
    ----------
    tol : float, optional
        Relative threshold below which a subdiagonal entry is deflated;
        defaults to (and is clipped below at) machine epsilon.
    max_iters : int
        QR sweeps allowed per eigenvalue before giving up.

    Raises
    ------
    ConvergenceError
        When a deflation window stalls; ``err.window`` holds its bounds.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n > max_order:
        raise ValueError(f"matrix order {n} exceeds the configured cap {max_order}")
    if n == 0:
        return np.empty(0, dtype=complex)
    H = np.array(M, dtype=np.complex128, order="C", copy=True)
    if not np.all(np.isfinite(H)):
        raise ValueError("matrix has non-finite entries")
    if n == 1:
        return H[0].copy()
    _kernels.hessenberg(H)
    tol = _kernels.EPS if tol is None else max(float(tol), _kernels.EPS)
    eig, status, lo, hi = _kernels.hqr(H, max_iters, tol)
    if status:
        raise ConvergenceError(
            f"QR iteration did not converge in {max_iters} sweeps for deflation window "
            f"[{lo}, {hi}]",
            window=(int(lo), int(hi)),
        )
    return eig


def _inverse_iteration(lower, diag, upper, lam, iters=3):
    n = diag.shape[0]
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    shifted = diag - lam
    for _ in range(iters):
        v = _kernels.tridiag_solve(lower, shifted, upper, v)
        v = v / np.max(np.abs(v))
    return v


def boundary_amplitude(V: GridFunction, lam) -> float:
    """``max(|v_first|, |v_last|) / max|v|`` for the inverse-iteration eigenvector at ``lam``."""
    lower, diag, upper = hamiltonian_diagonals(V)
    v = _inverse_iteration(lower, diag, upper, complex(lam))
    return float(max(abs(v[0]), abs(v[-1])) / np.max(np.abs(v)))


def _plateau(V: GridFunction):
    v = V.values
    if np.ptp(v.real) + np.ptp(v.imag) <= 1e-12 * (1.0 + np.max(np.abs(v))):
        return None
    if V.grid.x_min > 0:
        return float(v[-1].real)
    return float(min(v[0].real, v[-1].real))


def _sort_levels(values, rel_tol: float = 1e-7):
    """Sort by real part; values whose real parts agree to ``rel_tol`` are ordered by imaginary part.

    Conjugate partners come out of QR with real parts that differ in the last
    few bits, so a plain lexicographic sort would order them at random.
    """
    values = values[np.argsort(values.real, kind="stable")]
    out = []
    i = 0
    while i < values.size:
        j = i + 1
        while j < values.size and values[j].real - values[i].real <= rel_tol * (1.0 + abs(values[i].real)):
            j += 1
        group = values[i:j]
        out.extend(group[np.argsort(group.imag, kind="stable")])
        i = j
    return np.asarray(out, dtype=complex)


def filter_bound_states(eigs, V: GridFunction, count: int | None = None,
                        amplitude_tol: float = 1e-4, return_discarded: bool = False):
    """Keep eigenvalues that look like bound states of ``V``.

    A value survives when its real part lies below the asymptotic plateau of
    Re V and its inverse-iteration eigenvector is negligible next to the box
    walls.  A flat potential has no plateau and every value survives.
    Survivors are sorted by real part (then imaginary part); the lowest
    ``count`` are returned.

    Raises
    ------
    BoundStateError
        If fewer than ``count`` values survive ("grid/domain too small").
    """
    eigs = np.asarray(eigs, dtype=complex)
    plateau = _plateau(V)
    if plateau is None:
        kept = eigs
    else:
        lower, diag, upper = hamiltonian_diagonals(V)
        kept = []
        for lam in eigs[eigs.real < plateau]:
            v = _inverse_iteration(lower, diag, upper, lam)
            if max(abs(v[0]), abs(v[-1])) <= amplitude_tol * np.max(np.abs(v)):
                kept.append(lam)
        kept = np.asarray(kept, dtype=complex)
    kept = _sort_levels(kept)
    discarded = eigs.size - kept.size
    if count is not None:
        if kept.size < count:
            raise BoundStateError(
                f"grid/domain too small: {kept.size} bound-state candidates survived, {count} requested"
            )
        discarded += kept.size - count
        kept = kept[:count]
    if return_discarded:
        return kept, discarded
    return kept


def bound_spectrum(V: GridFunction, count: int | None = None, amplitude_tol: float = 1e-4,
                   max_iters: int = 100) -> EigenReport:
    """Discretize, solve and filter in one call."""
    eigs = eigenvalues(discretize_hamiltonian(V), max_iters=max_iters)
    kept, discarded = filter_bound_states(eigs, V, count, amplitude_tol, return_discarded=True)
    return EigenReport(kept, artifacts_discarded=int(discarded))


def match_spectra(numeric, analytic, tol: float) -> EigenReport:
    """Greedy nearest-neighbour matching of analytic levels to numeric values.

    Each analytic level (in order of n) takes the closest numeric value not
    already used.  Levels whose distance exceeds ``tol`` go to
    ``unmatched_analytic``.
    """
    numeric = np.asarray(numeric, dtype=complex)
    levels = getattr(analytic, "energies", analytic)
    levels = np.asarray(levels, dtype=complex)
    used = np.zeros(numeric.size, dtype=bool)
    report = EigenReport(numeric.copy())
    for n, target in enumerate(levels):
        if used.all():
            report.unmatched_analytic.append((n, complex(target), None, float("inf")))
            continue
        dist = np.where(used, np.inf, np.abs(numeric - target))
        j = int(np.argmin(dist))
        err = float(dist[j])
        entry = (n, complex(target), complex(numeric[j]), err)
        if err <= tol:
            used[j] = True
            report.matched.append(entry)
        else:
            report.unmatched_analytic.append(entry)
    return report


def cc_pair_check(values, tol: float):
    """Is the multiset invariant under complex conjugation?

    Returns ``(ok, pairs)`` where ``pairs`` lists index pairs ``(i, j)`` with
    ``values[j] ≈ conj(values[i])``; real values pair with themselves.
    """
    values = np.asarray(values, dtype=complex)
    used = np.zeros(values.size, dtype=bool)
    pairs = []
    for i in np.argsort(-values.imag, kind="stable"):
        if used[i]:
            continue
        if abs(values[i].imag) <= tol:
            used[i] = True
            pairs.append((int(i), int(i)))
            continue
        dist = np.abs(values - np.conj(values[i]))
        dist[used] = np.inf
        dist[i] = np.inf
        j = int(np.argmin(dist)) if dist.size else -1
        if j < 0 or dist[j] > tol:
            return False, pairs
        used[i] = used[j] = True
        pairs.append((int(i), j))
    return True, pairs


def eigen_residual(M, psi, E) -> float:
    """``||M psi - E psi|| / ||psi||``.

    ``M`` is a dense matrix or a ``(lower, diag, upper)`` tuple from
    :func:`hamiltonian_diagonals`.  ``psi`` may be sampled on the full grid,
    in which case the two wall nodes are dropped.
    """
    values = psi.values if isinstance(psi, GridFunction) else np.asarray(psi, dtype=complex)
    if isinstance(M, tuple):
        lower, diag, upper = M
        order = diag.shape[0]
    else:
        order = M.shape[0]
    if values.shape[0] == order + 2:
        values = values[1:-1]
    elif values.shape[0] != order:
        raise GridError(f"psi has {values.shape[0]} samples; matrix order is {order}")
    if isinstance(M, tuple):
        applied = diag * values
        applied[1:] += lower * values[:-1]
        applied[:-1] += upper * values[1:]
    else:
        applied = M @ values
    return float(np.linalg.norm(applied - E * values) / np.linalg.norm(values))
