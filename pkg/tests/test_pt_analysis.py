import itertools

import numpy as np
import pytest

from conftest import random_params
from susypt.complex_special import Grid, GridFunction
from susypt.errors import GridError
from susypt.pt_analysis import BranchLabel, bifurcation_residual, classify_branch, pt_check
from susypt.superpotential import Family, ParamSet, make_params, potential

GRID = Grid.symmetric(10, 401)


def test_real_scarf_potential_is_pt():
    x = GRID.nodes
    v = GridFunction(GRID, -3 / np.cosh(x) ** 2 + 3j * np.tanh(x) / np.cosh(x))
    rep = pt_check(v)
    assert rep.is_pt and rep.max_deviation < 1e-15


def test_complex_even_part_breaks_pt():
    v = GridFunction(GRID, (1 + 1j) / np.cosh(GRID.nodes) ** 2)
    rep = pt_check(v)
    assert not rep.is_pt and rep.even_part_im_max > 0.5


def test_general_off_branch_point():
    p = make_params(Family.SCARF2_GENERAL, A=1, B=2, C_pt=1, alpha=1)
    rep = pt_check(potential(Family.SCARF2_GENERAL, p, -1, GRID))
    assert not rep.is_pt and rep.max_deviation > 0.1


def test_asymmetric_grid_rejected():
    with pytest.raises(GridError, match="parity check requires symmetric grid"):
        pt_check(GridFunction(Grid(-1, 2, 11), np.zeros(11)))


@pytest.mark.parametrize("p, expected", [
    (ParamSet(A=2, B=1, C_pt=0, alpha=1), 0.0),
    (ParamSet(A=0.5, B=1, C_pt=0.7, alpha=1), 0.0),
    (ParamSet(A=1, B=1, C_pt=1, alpha=1), 1.0),
])
def test_bifurcation_residual_examples(p, expected):
    assert bifurcation_residual(p) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("p, label", [
    (ParamSet(A=2.5, B=0.5, C_pt=0, alpha=1), BranchLabel.REAL_SPECTRUM),
    (ParamSet(A=1, B=1.5, C_pt=0.75, alpha=1), BranchLabel.COMPLEX_CONJUGATE),
    (ParamSet(A=1, B=1, C_pt=1, alpha=1), BranchLabel.NON_PT),
])
def test_classify_examples(p, label):
    assert classify_branch(p) is label


def test_on_branch_potentials_are_pt(rng):
    for _ in range(30):
        for fam in (Family.SCARF2_REAL, Family.SCARF2_BROKEN):
            p = random_params(fam, rng)
            for br in (1, -1):
                rep = pt_check(potential(fam, p, -1, GRID, br))
                assert rep.is_pt and rep.max_deviation < 1e-10


def test_off_branch_potentials_are_not_pt(rng):
    for _ in range(30):
        A, B, C = rng.uniform(0.5, 2.5), rng.uniform(-2, 2), rng.uniform(0.2, 1.5) * rng.choice([-1, 1])
        if abs(2 * (A - B) + 1) < 0.2:
            continue
        p = make_params(Family.SCARF2_GENERAL, A=A, B=B, C_pt=C, alpha=1)
        assert classify_branch(p) is BranchLabel.NON_PT
        assert not pt_check(potential(Family.SCARF2_GENERAL, p, -1, GRID)).is_pt


def pt_by_direct_parity(p):
    """PT test of the general potential written out by hand (independent of the library)."""
    x = GRID.nodes
    A, B, C, al = p.A.real, p.B.real, p.C_pt.real, p.alpha
    a, b = A + 1j * C, C + 1j * B
    sech, tanh = 1 / np.cosh(al * x), np.tanh(al * x)
    v = (b * b - a * a - a * al) * sech**2 + (2 * a + al) * b * sech * tanh
    return np.max(np.abs(v - np.conj(v[::-1]))) < 1e-10


def test_classification_lattice_agrees_with_parity():
    values = np.linspace(-1.5, 1.5, 10)
    alpha = 1.0
    mismatches = 0
    for A, B, C in itertools.product(values, values, values):
        p = ParamSet(A=A, B=B, C_pt=C, alpha=alpha)
        label = classify_branch(p)
        on_branch = abs(C) < 1e-12 or abs(2 * (A - B) + alpha) < 1e-12
        assert (label is not BranchLabel.NON_PT) == on_branch
        mismatches += (label is not BranchLabel.NON_PT) != pt_by_direct_parity(p)
    assert mismatches == 0


def test_classification_lattice_with_branch_points():
    # lattice chosen so that A = B - alpha/2 and C = 0 both occur
    As = np.linspace(0, 2.25, 10)
    Bs = As + 0.5
    Cs = np.linspace(0, 1.8, 10)
    counts = {label: 0 for label in BranchLabel}
    for A, B, C in itertools.product(As, Bs, Cs):
        p = ParamSet(A=A, B=B, C_pt=C, alpha=1.0)
        label = classify_branch(p)
        counts[label] += 1
        assert (label is not BranchLabel.NON_PT) == pt_by_direct_parity(p)
        if C == 0:
            assert label is BranchLabel.REAL_SPECTRUM
        elif np.isclose(B, A + 0.5, atol=1e-12):
            assert label is BranchLabel.COMPLEX_CONJUGATE
    assert all(counts.values())


def test_residual_changes_sign_across_branches(rng):
    for _ in range(20):
        A, B = rng.uniform(0.5, 2, 2)
        vals = [bifurcation_residual(ParamSet(A=A, B=B, C_pt=c, alpha=1)) for c in np.linspace(-1, 1, 41)]
        assert np.any(np.diff(np.sign(vals)) != 0)
        B0 = rng.uniform(0.5, 2)
        vals = [bifurcation_residual(ParamSet(A=a, B=B0, C_pt=0.6, alpha=1)) for a in B0 - 0.5 + np.linspace(-1, 1, 40)]
        assert np.any(np.diff(np.sign(vals)) != 0)
