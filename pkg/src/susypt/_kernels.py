"""Inner loops of the eigensolver, with a numba path and a pure-numpy path.

The backend is picked once at import from ``SUSYPT_BACKEND`` (``numba`` or
``numpy``); numba is the default when it imports.  Both implementations stay
importable so they can be compared against each other.

QR status codes returned by the kernels: 0 converged, 1 iteration cap hit
(``lo``/``hi`` then hold the stuck deflation window).
"""
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("SUSYPT_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"SUSYPT_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"

EPS = np.finfo(float).eps


def _cabs1(z):
    return abs(z.real) + abs(z.imag)


# ---------------------------------------------------------------------------
# loop implementations (compiled by numba, also runnable as plain python)
# ---------------------------------------------------------------------------


def _hessenberg_loops(H):
    n = H.shape[0]
    v = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        sigma = 0.0
        for i in range(k + 2, n):
            sigma += H[i, k].real ** 2 + H[i, k].imag ** 2
        if sigma == 0.0:
            continue
        x0 = H[k + 1, k]
        xnorm = np.sqrt(sigma + x0.real ** 2 + x0.imag ** 2)
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        m = n - k - 1
        v[0] = x0 - alpha
        for i in range(1, m):
            v[i] = H[k + 1 + i, k]
        vn = 0.0
        for i in range(m):
            vn += v[i].real ** 2 + v[i].imag ** 2
        vn = np.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        # left: rows k+1.., columns k..
        for j in range(k, n):
            s = 0.0j
            for i in range(m):
                s += np.conj(v[i]) * H[k + 1 + i, j]
            s *= 2.0
            for i in range(m):
                H[k + 1 + i, j] -= v[i] * s
        # right: all rows, columns k+1..
        for i in range(n):
            s = 0.0j
            for j in range(m):
                s += H[i, k + 1 + j] * v[j]
            s *= 2.0
            for j in range(m):
                H[i, k + 1 + j] -= s * np.conj(v[j])
        H[k + 1, k] = alpha
        for i in range(k + 2, n):
            H[i, k] = 0.0j


def _wilkinson(a, b, c, d):
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mid = 0.5 * (a + d)
    mu1 = mid + disc
    mu2 = mid - disc
    if abs(mu1 - d) <= abs(mu2 - d):
        return mu1
    return mu2


def _hqr_loops(H, max_iters, tol):
    """Eigenvalues of upper Hessenberg ``H`` (destroyed) by single-shift QR."""
    n = H.shape[0]
    eig = np.empty(n, dtype=np.complex128)
    cs = np.empty(n, dtype=np.complex128)
    ss = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    while hi >= 0:
        # look for a negligible subdiagonal entry
        lo = hi
        while lo > 0:
            sub = _cabs1(H[lo, lo - 1])
            ref = _cabs1(H[lo - 1, lo - 1]) + _cabs1(H[lo, lo])
            if ref == 0.0:
                ref = 1.0
            if sub <= tol * ref:
                H[lo, lo - 1] = 0.0j
                break
            lo -= 1
        if lo == hi:
            eig[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_iters:
            return eig, 1, lo, hi
        if its % 10 == 0:
            mu = H[hi, hi] + 0.75 * _cabs1(H[hi, hi - 1])
        else:
            mu = _wilkinson(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        for k in range(lo, hi + 1):
            H[k, k] -= mu
        for k in range(lo, hi):
            x = H[k, k]
            y = H[k + 1, k]
            r = np.sqrt(x.real ** 2 + x.imag ** 2 + y.real ** 2 + y.imag ** 2)
            if r == 0.0:
                c = 1.0 + 0.0j
                s = 0.0j
            else:
                c = x / r
                s = y / r
            cs[k] = c
            ss[k] = s
            cc = np.conj(c)
            sc = np.conj(s)
            for j in range(k, hi + 1):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = cc * t1 + sc * t2
                H[k + 1, j] = -s * t1 + c * t2
        for k in range(lo, hi):
            c = cs[k]
            s = ss[k]
            cc = np.conj(c)
            sc = np.conj(s)
            top = k + 1 if k + 1 < hi else hi
            for i in range(lo, top + 1):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = c * t1 + s * t2
                H[i, k + 1] = -sc * t1 + cc * t2
        for k in range(lo, hi + 1):
            H[k, k] += mu
    return eig, 0, 0, 0


def _tridiag_solve_loops(dl, d, du, b):
    """Solve a tridiagonal system by LU with partial pivoting (inputs are copied)."""
    n = d.shape[0]
    dl = dl.copy()
    d = d.copy()
    du = du.copy()
    x = b.copy()
    du2 = np.zeros(max(n - 2, 0), dtype=np.complex128)
    piv = np.zeros(max(n - 1, 0), dtype=np.bool_)
    scale = 0.0
    for i in range(n):
        scale = max(scale, _cabs1(d[i]))
    tiny = EPS * (scale if scale > 0.0 else 1.0)
    for i in range(n - 1):
        if _cabs1(d[i]) >= _cabs1(dl[i]):
            if d[i] == 0.0:
                d[i] = tiny
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            piv[i] = True
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    for i in range(n - 1):
        if not piv[i]:
            x[i + 1] -= dl[i] * x[i]
        else:
            temp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = temp - dl[i] * x[i]
    x[n - 1] /= d[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks
# ---------------------------------------------------------------------------


def _hessenberg_numpy(H):
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k]
        sigma = np.vdot(x[1:], x[1:]).real
        if sigma == 0.0:
            continue
        x0 = x[0]
        xnorm = np.sqrt(sigma + abs(x0) ** 2)
        phase = x0 / abs(x0) if abs(x0) > 0 else 1.0
        alpha = -phase * xnorm
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 1, k] = alpha
        H[k + 2:, k] = 0.0


def _hqr_numpy(H, max_iters, tol):
    n = H.shape[0]
    eig = np.empty(n, dtype=complex)
    rots = [None] * n
    hi = n - 1
    its = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            ref = _cabs1(H[lo - 1, lo - 1]) + _cabs1(H[lo, lo]) or 1.0
            if _cabs1(H[lo, lo - 1]) <= tol * ref:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_iters:
            return eig, 1, lo, hi
        if its % 10 == 0:
            mu = H[hi, hi] + 0.75 * _cabs1(H[hi, hi - 1])
        else:
            mu = _wilkinson(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        idx = np.arange(lo, hi + 1)
        H[idx, idx] -= mu
        for k in range(lo, hi):
            x, y = H[k, k], H[k + 1, k]
            r = np.hypot(abs(x), abs(y))
            c, s = (x / r, y / r) if r > 0 else (1.0 + 0j, 0j)
            G = np.array([[np.conj(c), np.conj(s)], [-s, c]])
            rots[k] = G
            H[k:k + 2, k:hi + 1] = G @ H[k:k + 2, k:hi + 1]
        for k in range(lo, hi):
            top = min(k + 1, hi)
            H[lo:top + 1, k:k + 2] = H[lo:top + 1, k:k + 2] @ rots[k].conj().T
        H[idx, idx] += mu
    return eig, 0, 0, 0


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    _cabs1_nb = numba.njit(cache=True, nogil=True)(_cabs1)
    _wilkinson_nb = numba.njit(cache=True, nogil=True)(_wilkinson)
    # the loop bodies call the helpers by global name; rebind them for numba
    _nb_globals = {"_cabs1": _cabs1_nb, "_wilkinson": _wilkinson_nb, "np": np, "EPS": EPS}

    def _compile(fn):
        import types

        clone = types.FunctionType(fn.__code__, {**fn.__globals__, **_nb_globals}, fn.__name__)
        return numba.njit(cache=True, nogil=True)(clone)

    hessenberg_numba = _compile(_hessenberg_loops)
    hqr_numba = _compile(_hqr_loops)
    tridiag_solve_numba = _compile(_tridiag_solve_loops)
else:  # pragma: no cover
    hessenberg_numba = hqr_numba = tridiag_solve_numba = None

hessenberg_numpy = _hessenberg_numpy
hqr_numpy = _hqr_numpy
tridiag_solve_numpy = _tridiag_solve_loops

if BACKEND == "numba":
    hessenberg = hessenberg_numba
    hqr = hqr_numba
    tridiag_solve = tridiag_solve_numba
else:
    hessenberg = hessenberg_numpy
    hqr = hqr_numpy
    tridiag_solve = tridiag_solve_numpy
