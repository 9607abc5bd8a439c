import numpy as np
import pytest

from oracles import char_poly, char_poly_roots, multiset_distance
from susypt.complex_special import Grid, GridFunction
from susypt.errors import BoundStateError, ConvergenceError, GridError
from susypt.shape_invariance import closed_form_spectrum
from susypt.spectral_solver import (
    bound_spectrum,
    boundary_amplitude,
    cc_pair_check,
    discretize_hamiltonian,
    eigen_residual,
    eigenvalues,
    filter_bound_states,
    hamiltonian_diagonals,
    match_spectra,
)
from susypt.superpotential import Family, make_params, potential
from susypt.verify import intertwining_defect

REAL = Family.SCARF2_REAL
BROKEN = Family.SCARF2_BROKEN
P_REAL = make_params(REAL, A=2.5, B=0.5, alpha=1.0)
DESK = Grid.symmetric(14, 701)


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@pytest.fixture(scope="module")
def real_run():
    v = potential(REAL, P_REAL, -1, DESK)
    eigs = eigenvalues(discretize_hamiltonian(v))
    return v, eigs


# -- discretization ----------------------------------------------------------


def test_stencil():
    grid = Grid(0, 1, 6)
    v = GridFunction(grid, np.arange(6) * 1j)
    M = discretize_hamiltonian(v)
    h2 = grid.h**2
    assert M.shape == (4, 4)
    assert np.allclose(np.diag(M), 2 / h2 + v.values[1:-1])
    assert np.allclose(np.diag(M, 1), -1 / h2) and np.allclose(np.diag(M, -1), -1 / h2)
    assert np.count_nonzero(np.triu(M, 2)) == 0


def test_real_potential_gives_symmetric_matrix():
    grid = Grid.symmetric(5, 51)
    M = discretize_hamiltonian(GridFunction(grid, -1 / np.cosh(grid.nodes) ** 2))
    assert np.array_equal(M, M.T) and np.all(M.imag == 0)


def well_levels(n_points, k=3):
    grid = Grid(0.0, np.pi, n_points)
    return np.sort(eigenvalues(discretize_hamiltonian(GridFunction(grid, np.zeros(n_points)))).real)[:k]


def test_infinite_well_levels():
    levels = well_levels(401)
    h = np.pi / 400
    assert np.allclose(levels, [1, 4, 9], atol=10 * h**2 * 81)


def test_second_order_convergence():
    errs = [abs(well_levels(n, 1)[0] - 1.0) for n in (51, 101, 201)]
    for coarse, fine in zip(errs, errs[1:]):
        assert abs(coarse / fine - 4.0) < 0.5


# -- eigensolver -------------------------------------------------------------


def test_small_examples():
    assert np.allclose(np.sort_complex(eigenvalues([[1, 0], [0, 2]])), [1, 2])
    assert np.allclose(np.sort_complex(eigenvalues([[0, 1], [-1, 0]])), [-1j, 1j])
    assert eigenvalues([[3 + 1j]])[0] == 3 + 1j
    assert eigenvalues(np.zeros((0, 0))).size == 0


def test_random_6x6_against_char_poly(rng):
    M = random_complex(rng, 6)
    assert multiset_distance(eigenvalues(M), char_poly_roots(M)) < 1e-8


def test_orders_up_to_8_against_char_poly(rng):
    for n in range(2, 9):
        for _ in range(10):
            M = random_complex(rng, n)
            assert multiset_distance(eigenvalues(M), char_poly_roots(M)) < 1e-8


def test_char_poly_vanishes_at_eigenvalues(rng):
    for n in range(2, 9):
        M = random_complex(rng, n)
        coeffs = char_poly(M)
        scale = np.linalg.norm(M, 2) ** n
        for lam in eigenvalues(M):
            assert abs(np.polyval(coeffs, lam)) < 1e-8 * scale


def test_backward_stability(rng):
    eps = np.finfo(float).eps
    for _ in range(50):
        n = int(rng.integers(2, 51))
        M = random_complex(rng, n)
        norm = np.linalg.norm(M, 2)
        eye = np.eye(n)
        for lam in eigenvalues(M):
            smallest = np.linalg.svd(M - lam * eye, compute_uv=False)[-1]
            assert smallest <= 10 * n * eps * norm


def test_structured_inputs(rng):
    # already triangular, with repeated values, and a Jordan block
    T = np.triu(random_complex(rng, 7))
    assert multiset_distance(eigenvalues(T), np.diag(T)) < 1e-12
    J = np.eye(5) * 2 + np.eye(5, k=1)
    assert np.max(np.abs(eigenvalues(J) - 2)) < 1e-2
    Z = np.zeros((4, 4))
    assert np.all(eigenvalues(Z) == 0)


def test_input_validation():
    with pytest.raises(ValueError):
        eigenvalues(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues(np.full((2, 2), np.nan))
    with pytest.raises(ValueError, match="cap"):
        eigenvalues(np.eye(5), max_order=4)


def test_convergence_error_reports_window(rng):
    with pytest.raises(ConvergenceError) as info:
        eigenvalues(random_complex(rng, 30), max_iters=1)
    lo, hi = info.value.window
    assert 0 <= lo < hi < 30


def test_loose_tolerance_still_accurate(rng):
    M = random_complex(rng, 20)
    assert multiset_distance(eigenvalues(M, tol=1e-10), eigenvalues(M)) < 1e-8


# -- filtering and matching --------------------------------------------------


def test_real_branch_filter(real_run):
    v, eigs = real_run
    kept = filter_bound_states(eigs, v)
    assert kept.size == 3
    assert np.allclose(kept.real, [-6.25, -2.25, -0.25], atol=1e-2)
    scale = np.max(np.abs(eigs))
    assert np.max(np.abs(kept.imag)) < 1e-6 * scale


def test_filter_count_and_error(real_run):
    v, eigs = real_run
    kept, discarded = filter_bound_states(eigs, v, count=2, return_discarded=True)
    assert kept.size == 2 and discarded == eigs.size - 2
    with pytest.raises(BoundStateError, match="grid/domain too small"):
        filter_bound_states(eigs, v, count=4)


def test_flat_potential_keeps_everything():
    grid = Grid(0, 1, 41)
    v = GridFunction(grid, np.zeros(41))
    eigs = eigenvalues(discretize_hamiltonian(v))
    assert filter_bound_states(eigs, v).size == eigs.size


def test_boundary_amplitude_separates_bound_from_box_states(real_run):
    v, eigs = real_run
    kept = filter_bound_states(eigs, v)
    assert boundary_amplitude(v, kept[0]) < 1e-10
    continuum = eigs[eigs.real > 0.5][:5]
    assert all(boundary_amplitude(v, lam) > 1e-3 for lam in continuum)


def test_broken_survivors_pair_up():
    p = make_params(BROKEN, A=3.0, C_pt=0.75)
    vals = bound_spectrum(potential(BROKEN, p, -1, DESK)).eigenvalues
    ok, pairs = cc_pair_check(vals, 1e-2)
    assert ok and len(pairs) == 3 and vals.size == 6


def test_match_examples():
    ref = closed_form_spectrum(REAL, P_REAL, 1, 3)
    rep = match_spectra(ref.energies, ref, 1e-12)
    assert rep.all_matched and rep.max_error == 0
    rep = match_spectra(ref.energies + 1e-4 * (1 + 1j), ref, 1e-3)
    assert rep.all_matched
    rep = match_spectra(ref.energies[:2], ref, 1e-3)
    assert [u[0] for u in rep.unmatched_analytic] == [2]


def test_match_desk_run(real_run):
    v, eigs = real_run
    ref = closed_form_spectrum(REAL, P_REAL, 1, 3)
    rep = match_spectra(filter_bound_states(eigs, v) - ref.offset, ref, 1e-2)
    assert rep.all_matched


def test_cc_pair_examples():
    assert cc_pair_check([1 + 2j, 1 - 2j, 3], 1e-9)[0]
    assert not cc_pair_check([1 + 2j, 3], 1e-9)[0]
    ok, pairs = cc_pair_check([1 + 2j, 3, 1 - 2j], 1e-9)
    assert ok and sorted(pairs) == [(0, 2), (1, 1)]


# -- residuals ---------------------------------------------------------------


def test_eigen_residual_examples(rng):
    grid = Grid.symmetric(5, 41)
    v = potential(REAL, P_REAL, -1, grid)
    M = discretize_hamiltonian(v)
    w, vecs = np.linalg.eig(M)
    assert eigen_residual(M, vecs[:, 0], w[0]) < 1e-12
    tri = hamiltonian_diagonals(v)
    psi = rng.normal(size=M.shape[0]) + 0j
    assert eigen_residual(tri, psi, 0.0) == pytest.approx(eigen_residual(M, psi, 0.0), rel=1e-12)
    assert 0.1 * np.linalg.norm(M, 2) < eigen_residual(M, psi, 0.0) < 2 * np.linalg.norm(M, 2)
    full = GridFunction(grid, np.concatenate([[0], vecs[:, 0], [0]]))
    assert eigen_residual(M, full, w[0]) < 1e-12
    with pytest.raises(GridError):
        eigen_residual(M, np.ones(5), 0.0)


# -- SUSY structure at the discrete level -------------------------------------


def test_numeric_isospectrality(real_run):
    v, eigs = real_run
    minus = filter_bound_states(eigs, v, count=3)
    plus = bound_spectrum(potential(REAL, P_REAL, +1, DESK), 2).eigenvalues
    assert np.max(np.abs(plus - minus[1:])) < 1e-2


def test_intertwining_interior():
    for h in (1 / 7.5, 1 / 15):
        step, full, interior = intertwining_defect(h)
        assert interior < 5 * step


def test_intertwining_wall_defect_grows_like_inverse_h():
    # Dirichlet truncation makes the corner entries of [D, D2] of size 1/(2h^3)
    coarse = intertwining_defect(1 / 7.5)
    fine = intertwining_defect(1 / 15)
    assert fine[1] / coarse[1] == pytest.approx(2.0, rel=0.05)
    assert fine[1] == pytest.approx(1 / (4 * fine[0]), rel=0.05)
