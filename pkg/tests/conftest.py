import numpy as np
import pytest

from susypt.superpotential import Family, make_params


def random_params(family, rng):
    """A random valid parameter set with at least one bound level."""
    family = Family.parse(family)
    if family is Family.COULOMB_COMPLEX:
        return make_params(family, alpha_c=rng.uniform(0.2, 2.0), beta=rng.uniform(0.3, 2.0))
    alpha = rng.uniform(0.5, 1.5)
    A = rng.uniform(0.6, 3.0) * alpha
    if family is Family.SCARF2_BROKEN:
        return make_params(family, A=A, C_pt=rng.uniform(0.1, 1.5), alpha=alpha)
    if family is Family.SCARF2_REAL:
        return make_params(family, A=A, B=rng.uniform(-2, 2), alpha=alpha)
    if family is Family.SCARF2_GENERAL:
        return make_params(family, A=A, B=rng.uniform(-2, 2), C_pt=rng.uniform(-1, 1), alpha=alpha)
    if family is Family.POSCHL_TELLER_C2:
        return make_params(family, A=rng.uniform(-2, 2), B=rng.uniform(1.2, 4.0) * alpha, alpha=alpha)
    return make_params(family, A=rng.uniform(1.2, 4.0) * alpha, B=rng.uniform(-2, 2), alpha=alpha)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ALL_FAMILIES = list(Family)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
