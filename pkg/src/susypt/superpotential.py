"""Superpotential families, partner potentials V± = W² ± W', and SUSY ground states.

Every family is written as a two-term superpotential with (possibly complex)
coefficients:

* Scarf II families:  W = a tanh(αx) + b sech(αx)      on the full line
* Pöschl–Teller:      W = a tanh(αx) + b coth(αx)      on the half line
* Coulomb:            W = γ / r + β,   γ = i α_c        on the half line

The public parameters (A, B, C_pt, α, α_c, β) map onto (a, b) or (γ, β) through
:func:`coefficients`.  Parameters are real for user input but are allowed to be
complex internally, because the shape-invariance ladder leaves the real axis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .complex_special import Grid, GridFunction, gudermannian, log_cosh
from .errors import DomainError, GridError, ParameterError

__all__ = [
    "Family",
    "DomainKind",
    "DomainSpec",
    "ParamSet",
    "make_params",
    "validate_params",
    "coefficients",
    "eval_W",
    "eval_W_prime",
    "asymptotic_constant",
    "potential",
    "ground_state",
]


class Family(str, enum.Enum):
    SCARF2_GENERAL = "Scarf2General"
    SCARF2_REAL = "Scarf2Real"
    SCARF2_BROKEN = "Scarf2Broken"
    POSCHL_TELLER_C1 = "PoschlTellerC1"
    POSCHL_TELLER_C2 = "PoschlTellerC2"
    COULOMB_COMPLEX = "CoulombComplex"

    @property
    def is_scarf(self) -> bool:
        return self in (Family.SCARF2_GENERAL, Family.SCARF2_REAL, Family.SCARF2_BROKEN)

    @property
    def has_branch(self) -> bool:
        """Whether the ± sign branch of the superpotential matters."""
        return self in (Family.SCARF2_GENERAL, Family.SCARF2_BROKEN)

    @property
    def half_line(self) -> bool:
        return self in (
            Family.POSCHL_TELLER_C1,
            Family.POSCHL_TELLER_C2,
            Family.COULOMB_COMPLEX,
        )

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, Family):
            return name
        for fam in cls:
            if fam.value.lower() == str(name).lower():
                return fam
        raise ParameterError(f"unknown family {name!r}; choose from {[f.value for f in cls]}")


class DomainKind(str, enum.Enum):
    FULL_LINE = "FullLine"
    HALF_LINE = "HalfLine"


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind = DomainKind.FULL_LINE
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.kind is DomainKind.HALF_LINE and not self.epsilon > 0:
            raise ParameterError("half-line domain needs a positive inner cutoff epsilon")

    @classmethod
    def for_family(cls, family: Family, epsilon: float = 1e-3) -> "DomainSpec":
        if family.half_line:
            return cls(DomainKind.HALF_LINE, epsilon)
        return cls(DomainKind.FULL_LINE, epsilon)


@dataclass(frozen=True)
class ParamSet:
    """Family parameters.  Fields may be complex for stepped (hierarchy) members."""

    A: complex = 0.0
    B: complex = 0.0
    C_pt: complex = 0.0
    alpha: float = 1.0
    alpha_c: complex = 0.0
    beta: complex = 0.0

    def replace(self, **changes) -> "ParamSet":
        from dataclasses import replace

        return replace(self, **changes)


def _real(name, value):
    if isinstance(value, complex):
        if value.imag != 0:
            raise ParameterError(f"parameter {name} must be real, got {value}")
        value = value.real
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"parameter {name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterError(f"parameter {name} must be finite, got {value}")
    return value


def validate_params(family, p: ParamSet, bound_states: bool = True) -> ParamSet:
    """Check user-facing invariants of ``p`` for ``family``; returns ``p``."""
    family = Family.parse(family)
    for name in ("A", "B", "C_pt", "alpha", "alpha_c", "beta"):
        _real(name, getattr(p, name))
    if family is not Family.COULOMB_COMPLEX and not p.alpha > 0:
        raise ParameterError(f"alpha must be > 0 for {family.value}, got {p.alpha}")
    if family is Family.SCARF2_REAL and bound_states and not p.A.real > 0:
        raise ParameterError(f"Scarf2Real needs A > 0 for a normalizable ground state, got A={p.A}")
    if family is Family.SCARF2_BROKEN:
        target = p.A.real + p.alpha / 2
        if abs(p.B.real - target) > 1e-12 * max(1.0, abs(target)):
            raise ParameterError(
                f"Scarf2Broken lives on the bifurcation surface A = B - alpha/2; "
                f"got A={p.A.real:g}, B={p.B.real:g}, alpha={p.alpha:g} (B should be {target:g})"
            )
    if family is Family.COULOMB_COMPLEX and bound_states and not p.beta.real > 0:
        raise ParameterError(f"CoulombComplex needs beta > 0, got beta={p.beta}")
    return p


def make_params(family, bound_states: bool = True, **values) -> ParamSet:
    """Build a validated :class:`ParamSet` from real keyword values.

    For ``Scarf2Broken`` the value of B is derived as ``A + alpha/2`` when it
    is omitted; an inconsistent explicit B raises :class:`ParameterError`.
    """
    family = Family.parse(family)
    unknown = set(values) - {"A", "B", "C_pt", "alpha", "alpha_c", "beta"}
    if unknown:
        raise ParameterError(f"unknown parameter(s) {sorted(unknown)}")
    clean = {k: _real(k, v) for k, v in values.items()}
    if family is Family.SCARF2_BROKEN and "B" not in clean:
        clean["B"] = clean.get("A", 0.0) + clean.get("alpha", 1.0) / 2
    if family is Family.SCARF2_REAL:
        clean.pop("C_pt", None)
    p = ParamSet(**{k: (complex(v) if k != "alpha" else v) for k, v in clean.items()})
    # keep alpha a plain float; every other field is complex-capable
    return validate_params(family, p, bound_states=bound_states)


def coefficients(family, p: ParamSet, branch: int = 1):
    """Return the complex coefficient pair of W.

    Scarf II and Pöschl–Teller: ``(a, b)``; Coulomb: ``(gamma, beta)``.
    ``branch`` is +1 or -1 and only matters for the ± families.
    """
    family = Family.parse(family)
    s = 1 if branch >= 0 else -1
    A, B, C = complex(p.A), complex(p.B), complex(p.C_pt)
    if family is Family.SCARF2_REAL:
        return A, 1j * B
    if family in (Family.SCARF2_GENERAL, Family.SCARF2_BROKEN):
        return A + 1j * s * C, s * C + 1j * B
    if family is Family.POSCHL_TELLER_C1:
        return A, 1j * B
    if family is Family.POSCHL_TELLER_C2:
        return 1j * A, B
    return 1j * complex(p.alpha_c), complex(p.beta)


def params_from_coefficients(family, template: ParamSet, c1, c2) -> ParamSet:
    """Inverse of :func:`coefficients` (branch +1), keeping ``alpha`` from ``template``."""
    family = Family.parse(family)
    if family is Family.POSCHL_TELLER_C1:
        return template.replace(A=complex(c1), B=complex(-1j * c2))
    if family is Family.POSCHL_TELLER_C2:
        return template.replace(A=complex(-1j * c1), B=complex(c2))
    if family is Family.COULOMB_COMPLEX:
        return template.replace(alpha_c=complex(-1j * c1), beta=complex(c2))
    raise ParameterError(f"no coefficient inverse registered for {family.value}")


def _check_domain(family: Family, x, domain: DomainSpec | None):
    if not family.half_line:
        return
    domain = domain or DomainSpec.for_family(family)
    if np.any(np.asarray(x) < domain.epsilon):
        raise DomainError(
            f"{family.value} is defined on the half line x >= {domain.epsilon}; "
            f"got x min {np.min(x)}"
        )


def eval_W(family, p: ParamSet, x, branch: int = 1, domain: DomainSpec | None = None):
    """Superpotential W(x).  ``x`` may be a scalar or an array."""
    family = Family.parse(family)
    _check_domain(family, x, domain)
    xa = np.asarray(x, dtype=float)
    c1, c2 = coefficients(family, p, branch)
    if family is Family.COULOMB_COMPLEX:
        out = c1 / xa + c2
    else:
        y = p.alpha * xa
        second = 1.0 / np.cosh(y) if family.is_scarf else 1.0 / np.tanh(y)
        out = c1 * np.tanh(y) + c2 * second
    return out if np.ndim(out) else complex(out)


def eval_W_prime(family, p: ParamSet, x, branch: int = 1, domain: DomainSpec | None = None):
    """Closed-form derivative dW/dx."""
    family = Family.parse(family)
    _check_domain(family, x, domain)
    xa = np.asarray(x, dtype=float)
    c1, c2 = coefficients(family, p, branch)
    if family is Family.COULOMB_COMPLEX:
        out = -c1 / xa**2
    else:
        al = p.alpha
        y = al * xa
        sech = 1.0 / np.cosh(y)
        if family.is_scarf:
            out = c1 * al * sech**2 - c2 * al * sech * np.tanh(y)
        else:
            csch = 1.0 / np.sinh(y)
            out = c1 * al * sech**2 - c2 * al * csch**2
    return out if np.ndim(out) else complex(out)


def asymptotic_constant(family, p: ParamSet, branch: int = 1) -> complex:
    """``W(+inf)**2``, the constant both partner potentials approach at large x."""
    family = Family.parse(family)
    c1, c2 = coefficients(family, p, branch)
    if family.is_scarf:
        w_inf = c1
    elif family is Family.COULOMB_COMPLEX:
        w_inf = c2
    else:
        w_inf = c1 + c2
    return complex(w_inf * w_inf)


def potential(family, p: ParamSet, sign: int, grid: Grid, branch: int = 1,
              shift: str = "asymptotic", domain: DomainSpec | None = None) -> GridFunction:
    """Sample the partner potential ``V_sign = W**2 + sign * W'`` on ``grid``.

    Parameters
    ----------
    sign : int
        -1 for V₋ (the potential of H₋ = A†A), +1 for V₊.
    shift : {"asymptotic", "none"}
        ``"asymptotic"`` subtracts ``W(+inf)**2`` so that V -> 0 at large x,
        which is the form in which the Scarf II potentials are usually quoted
        and makes the two ± superpotentials of the broken branch give one and
        the same potential.  ``"none"`` returns the bare ``W**2 ± W'`` whose
        ground level sits at exactly zero.
    """
    family = Family.parse(family)
    if shift not in ("asymptotic", "none"):
        raise ValueError(f"shift must be 'asymptotic' or 'none', got {shift!r}")
    x = grid.nodes
    w = eval_W(family, p, x, branch, domain)
    wp = eval_W_prime(family, p, x, branch, domain)
    v = w * w + (1 if sign >= 0 else -1) * wp
    if shift == "asymptotic":
        v = v - asymptotic_constant(family, p, branch)
    return GridFunction(grid, v)


def _log_sinh(y):
    return y + np.log1p(-np.exp(-2.0 * y)) - math.log(2.0)


def _log_ground_state(family: Family, p: ParamSet, x, branch: int):
    c1, c2 = coefficients(family, p, branch)
    if family is Family.COULOMB_COMPLEX:
        return -c1 * np.log(x) - c2 * x
    al = p.alpha
    y = al * x
    if family.is_scarf:
        return -(c1 / al) * log_cosh(y) - (c2 / al) * gudermannian(y)
    return -(c1 / al) * log_cosh(y) - (c2 / al) * _log_sinh(y)


def _cumulative_trapezoid(f, h):
    out = np.zeros_like(f)
    out[1:] = np.cumsum(0.5 * h * (f[1:] + f[:-1]))
    return out


def ground_state(family, p: ParamSet, grid: Grid, branch: int = 1,
                 boundary_tol: float = 1e-8, method: str = "closed",
                 domain: DomainSpec | None = None) -> GridFunction:
    """Unnormalized zero mode ``exp(-∫W)`` of the lowering operator, scaled to peak 1.

    ``method="closed"`` uses the exact antiderivative; ``"quadrature"``
    integrates -W with the cumulative trapezoid rule instead.

    Raises
    ------
    GridError
        If ``|psi0|`` at an open boundary exceeds ``boundary_tol`` times its
        peak (the inner wall of half-line families is not checked).
    """
    family = Family.parse(family)
    x = grid.nodes
    _check_domain(family, x, domain)
    if method == "closed":
        logpsi = _log_ground_state(family, p, x, branch)
    elif method == "quadrature":
        w = eval_W(family, p, x, branch, domain)
        ref = 0 if family.half_line else int(np.argmin(np.abs(x)))
        logpsi = -_cumulative_trapezoid(w, grid.h)
        logpsi = logpsi - logpsi[ref]
    else:
        raise ValueError(f"unknown method {method!r}")
    logpsi = np.asarray(logpsi, dtype=complex)
    psi = np.exp(logpsi - np.max(logpsi.real))
    mag = np.abs(psi)
    peak = mag.max()
    edges = [mag[-1]] if family.half_line else [mag[0], mag[-1]]
    if max(edges) >= boundary_tol * peak:
        raise GridError(
            f"grid too small for bound state: |psi0| at boundary is "
            f"{max(edges) / peak:.3g} of its peak (need < {boundary_tol:g})"
        )
    return GridFunction(grid, psi / peak)
