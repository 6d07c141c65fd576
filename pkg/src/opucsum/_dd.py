"""Double-double kernels for monomial coefficient arrays.

A value is the unevaluated sum ``hi + lo`` of two doubles with ``|lo| <=
ulp(hi) / 2``; the error-free transformations are Knuth's two-sum and
Dekker's two-product, so results carry about 106 significant bits.
"""

import numba
import numpy as np

_SPLIT = 134217729.0  # 2^27 + 1


@numba.njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@numba.njit(cache=True, inline="always")
def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@numba.njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@numba.njit(cache=True, inline="always")
def _add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    e += t
    s, e = _quick_two_sum(s, e)
    e += f
    return _quick_two_sum(s, e)


@numba.njit(cache=True, inline="always")
def _mul_d(ah, al, b):
    p, e = _two_prod(ah, b)
    e += al * b
    return _quick_two_sum(p, e)


@numba.njit(cache=True, inline="always")
def _div_d(ah, al, b):
    q1 = ah / b
    p, e = _two_prod(q1, b)
    s, f = _two_sum(ah, -p)
    f = f - e + al
    q2 = (s + f) / b
    return _quick_two_sum(q1, q2)


@numba.njit(cache=True)
def szego_step(hr, hi, lr, li, ar, ai, rho):
    """Coefficients of ``(z phi - conj(a) phi^*) / rho``; inputs are ``phi = (hr + lr) + i (hi + li)``."""
    n = hr.shape[0] - 1
    out = np.zeros((4, n + 2))
    for k in range(n + 2):
        xr_h = 0.0
        xr_l = 0.0
        xi_h = 0.0
        xi_l = 0.0
        if k >= 1:
            xr_h, xr_l, xi_h, xi_l = hr[k - 1], lr[k - 1], hi[k - 1], li[k - 1]
        if k <= n:
            # conj(a) * conj(phi[n-k]) = (ar yr - ai yi) - i (ar yi + ai yr)
            j = n - k
            p1h, p1l = _mul_d(hr[j], lr[j], ar)
            p2h, p2l = _mul_d(hi[j], li[j], -ai)
            tr_h, tr_l = _add(p1h, p1l, p2h, p2l)
            p1h, p1l = _mul_d(hi[j], li[j], ar)
            p2h, p2l = _mul_d(hr[j], lr[j], ai)
            ti_h, ti_l = _add(p1h, p1l, p2h, p2l)
            xr_h, xr_l = _add(xr_h, xr_l, -tr_h, -tr_l)
            xi_h, xi_l = _add(xi_h, xi_l, ti_h, ti_l)
        out[0, k], out[2, k] = _div_d(xr_h, xr_l, rho)
        out[1, k], out[3, k] = _div_d(xi_h, xi_l, rho)
    return out


@numba.njit(cache=True)
def horner(hr, hi, lr, li, zr, zi):
    """``sum_k c_k z^k`` for double-double ``c`` at double points ``z``, rounded to complex128."""
    m = zr.shape[0]
    n = hr.shape[0]
    rh = np.zeros(m)
    rl = np.zeros(m)
    ih = np.zeros(m)
    il = np.zeros(m)
    for k in range(n - 1, -1, -1):
        for j in range(m):
            ah, al = _mul_d(rh[j], rl[j], zr[j])
            bh, bl = _mul_d(ih[j], il[j], -zi[j])
            nr_h, nr_l = _add(ah, al, bh, bl)
            ah, al = _mul_d(rh[j], rl[j], zi[j])
            bh, bl = _mul_d(ih[j], il[j], zr[j])
            ni_h, ni_l = _add(ah, al, bh, bl)
            rh[j], rl[j] = _add(nr_h, nr_l, hr[k], lr[k])
            ih[j], il[j] = _add(ni_h, ni_l, hi[k], li[k])
    out = np.empty(m, dtype=np.complex128)
    for j in range(m):
        out[j] = complex(rh[j] + rl[j], ih[j] + il[j])
    return out
