"""Stencil kernels for the Lax-Friedrichs / WENO3 / SSP-RK3 solver.

Every kernel exists twice: a numba loop version and a vectorised numpy
version with identical arithmetic.  ``get_kernels(backend)`` returns the
matching set; the solver never calls the module functions directly.

Hamiltonians reach the kernels as a flat parameter tuple
``(kind, knots, vals, tail, a)``:

* ``kind == 0``: radial, ``H(q) = f(|q|)`` with ``f`` piecewise linear
  through ``(knots, vals)`` and slope ``tail`` past the last knot;
* ``kind == 1``: double well, ``H(q) = min(|q - a|, |q + a|)``.

Grids are periodic with unit period; array index ``[i, j]`` is the node
``(i*h, j*h)``.

``order`` selects the spatial scheme: 0 is the Godunov flux on
first-order differences, 1 the Lax-Friedrichs flux on first-order
differences and 3 the Lax-Friedrichs flux on WENO3 differences.  Orders 0
and 1 are monotone under the CFL restriction.
"""

import math

import numpy as np

from .accel import default_backend, njit

RADIAL = 0
DOUBLE_WELL = 1


def weno_eps(h):
    # Undivided second differences are O(h^2 u''); eps ~ h^2 keeps the
    # weights linear at smooth critical points without hiding kinks.
    return h * h


# --------------------------------------------------------------------------
# numba


@njit(inline="always")
def _radial_nb(r, knots, vals, tail):
    last = knots.shape[0] - 1
    if r >= knots[last]:
        return vals[last] + tail * (r - knots[last])
    k = 0
    while knots[k + 1] <= r:
        k += 1
    t = (r - knots[k]) / (knots[k + 1] - knots[k])
    return vals[k] + t * (vals[k + 1] - vals[k])


@njit(inline="always")
def ham_nb(kind, q1, q2, knots, vals, tail, a1, a2):
    if kind == 0:
        return _radial_nb(math.sqrt(q1 * q1 + q2 * q2), knots, vals, tail)
    b1 = q1 - a1
    b2 = q2 - a2
    c1 = q1 + a1
    c2 = q2 + a2
    d1 = math.sqrt(b1 * b1 + b2 * b2)
    d2 = math.sqrt(c1 * c1 + c2 * c2)
    return min(d1, d2)


# Godunov numerical Hamiltonian: ext_{x in I(a,b)} ext_{y in I(c,d)} H,
# with ext = min over [a, b] when a <= b and max over [b, a] otherwise.
# When the two axes ask for different ext's the max-over-min order is used;
# both orders give monotone consistent fluxes and they agree whenever an
# interval degenerates, so switching between them keeps the flux monotone.


@njit(inline="always")
def _seg_slope(i, knots, vals, tail):
    if i == knots.shape[0] - 1:
        return tail
    return (vals[i + 1] - vals[i]) / (knots[i + 1] - knots[i])


@njit(inline="always")
def _pl_ext(r0, r1, knots, vals, tail, want_max):
    """min or max of the profile over [r0, r1]."""
    a = _radial_nb(r0, knots, vals, tail)
    b = _radial_nb(r1, knots, vals, tail)
    best = max(a, b) if want_max else min(a, b)
    for k in range(knots.shape[0]):
        kk = knots[k]
        if kk > r0 and kk < r1:
            if want_max:
                best = max(best, vals[k])
            else:
                best = min(best, vals[k])
    return best


@njit(inline="always")
def _abs_range(x, y):
    lo = min(x, y)
    hi = max(x, y)
    if lo <= 0.0 <= hi:
        return 0.0, max(-lo, hi)
    return min(abs(lo), abs(hi)), max(abs(lo), abs(hi))


@njit(inline="always")
def _window_min(x, A, B, knots, vals, tail):
    return _pl_ext(math.sqrt(x * x + A), math.sqrt(x * x + B), knots, vals, tail, False)


@njit(inline="always")
def _try_window(best, x, x_lo, x_hi, A, B, knots, vals, tail):
    if x > x_lo and x < x_hi:
        return max(best, _window_min(x, A, B, knots, vals, tail))
    return best


@njit
def _maxmin_radial(x_lo, x_hi, A, B, knots, vals, tail):
    """max over x in [x_lo, x_hi] of min of f over [sqrt(x^2+A), sqrt(x^2+B)].

    Between consecutive events (a window end crossing a knot) each window
    end sits on one linear segment, so the inner min can only peak where a
    rising left end meets a falling right end; those points, the events and
    the interval ends are the candidates.
    """
    best = max(_window_min(x_lo, A, B, knots, vals, tail), _window_min(x_hi, A, B, knots, vals, tail))
    r0 = math.sqrt(x_lo * x_lo + A)
    r1 = math.sqrt(x_hi * x_hi + B)
    n = knots.shape[0]
    inside = False
    for k in range(n):
        if knots[k] > r0 and knots[k] < r1:
            inside = True
    if not inside:
        return best
    for k in range(n):
        kk = knots[k] * knots[k]
        if kk >= A:
            best = _try_window(best, math.sqrt(kk - A), x_lo, x_hi, A, B, knots, vals, tail)
        if kk >= B:
            best = _try_window(best, math.sqrt(kk - B), x_lo, x_hi, A, B, knots, vals, tail)
    D = B - A
    for i in range(n):
        mi = _seg_slope(i, knots, vals, tail)
        if mi <= 0.0:
            continue
        ci = vals[i] - mi * knots[i]
        for j in range(i + 1, n):
            mj = _seg_slope(j, knots, vals, tail)
            if mj >= 0.0:
                continue
            # mi L - mj U = c with U^2 = L^2 + D
            c = (vals[j] - mj * knots[j]) - ci
            qa = mi * mi - mj * mj
            qb = -2.0 * mi * c
            qc = c * c - mj * mj * D
            if qa == 0.0:
                if qb == 0.0:
                    continue
                roots = (-qc / qb, -1.0)
            else:
                disc = qb * qb - 4.0 * qa * qc
                if disc < 0.0:
                    continue
                sq = math.sqrt(disc)
                roots = ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa))
            for L in roots:
                if L >= 0.0 and L * L >= A:
                    best = _try_window(best, math.sqrt(L * L - A), x_lo, x_hi, A, B, knots, vals, tail)
    return best


@njit(inline="always")
def _interval_dist(c, lo, hi):
    if c < lo:
        return lo - c
    if c > hi:
        return c - hi
    return 0.0


@njit(inline="always")
def _dw_value(q1, q2, a1, a2):
    b1 = q1 - a1
    b2 = q2 - a2
    c1 = q1 + a1
    c2 = q2 + a2
    return min(math.sqrt(b1 * b1 + b2 * b2), math.sqrt(c1 * c1 + c2 * c2))


@njit(inline="always")
def _dw_near(x, ax, d1, d2):
    m1 = math.sqrt((x - ax) * (x - ax) + d1 * d1)
    m2 = math.sqrt((x + ax) * (x + ax) + d2 * d2)
    return min(m1, m2)


@njit(inline="always")
def _dw_maxmin(x_lo, x_hi, y_lo, y_hi, ax, ay):
    """max over x of min over y of the double well with centres +-(ax, ay)."""
    d1 = _interval_dist(ay, y_lo, y_hi)
    d2 = _interval_dist(-ay, y_lo, y_hi)
    best = max(_dw_near(x_lo, ax, d1, d2), _dw_near(x_hi, ax, d1, d2))
    if ax != 0.0:
        xs = (d1 * d1 - d2 * d2) / (4.0 * ax)
        if xs > x_lo and xs < x_hi:
            best = max(best, _dw_near(xs, ax, d1, d2))
    return best


@njit
def _dw_box_max(lo1, hi1, lo2, hi2, a1, a2):
    best = max(max(_dw_value(lo1, lo2, a1, a2), _dw_value(lo1, hi2, a1, a2)),
               max(_dw_value(hi1, lo2, a1, a2), _dw_value(hi1, hi2, a1, a2)))
    # the two wells tie on the line q . a = 0
    if a2 != 0.0:
        for x in (lo1, hi1):
            y = -x * a1 / a2
            if y > lo2 and y < hi2:
                best = max(best, _dw_value(x, y, a1, a2))
    if a1 != 0.0:
        for y in (lo2, hi2):
            x = -y * a2 / a1
            if x > lo1 and x < hi1:
                best = max(best, _dw_value(x, y, a1, a2))
    return best


@njit(inline="always")
def godunov_nb(kind, q1m, q1p, q2m, q2p, dim2, knots, vals, tail, a1, a2):
    """Godunov flux from one-sided values ``p + D^-w`` and ``p + D^+w``."""
    min1 = q1m <= q1p
    lo1 = min(q1m, q1p)
    hi1 = max(q1m, q1p)
    if not dim2:
        if kind == 0:
            s_lo, s_hi = _abs_range(lo1, hi1)
            return _pl_ext(s_lo, s_hi, knots, vals, tail, not min1)
        if min1:
            return min(_interval_dist(a1, lo1, hi1), _interval_dist(-a1, lo1, hi1))
        best = max(_dw_value(lo1, 0.0, a1, 0.0), _dw_value(hi1, 0.0, a1, 0.0))
        if lo1 < 0.0 < hi1:
            best = max(best, _dw_value(0.0, 0.0, a1, 0.0))
        return best
    min2 = q2m <= q2p
    lo2 = min(q2m, q2p)
    hi2 = max(q2m, q2p)
    if kind == 0:
        s_lo, s_hi = _abs_range(lo1, hi1)
        t_lo, t_hi = _abs_range(lo2, hi2)
        if min1 == min2:
            return _pl_ext(math.sqrt(s_lo * s_lo + t_lo * t_lo), math.sqrt(s_hi * s_hi + t_hi * t_hi),
                           knots, vals, tail, not min1)
        if min2:
            return _maxmin_radial(s_lo, s_hi, t_lo * t_lo, t_hi * t_hi, knots, vals, tail)
        return _maxmin_radial(t_lo, t_hi, s_lo * s_lo, s_hi * s_hi, knots, vals, tail)
    if min1 and min2:
        e1 = _interval_dist(a1, lo1, hi1)
        e2 = _interval_dist(a2, lo2, hi2)
        f1 = _interval_dist(-a1, lo1, hi1)
        f2 = _interval_dist(-a2, lo2, hi2)
        return min(math.sqrt(e1 * e1 + e2 * e2), math.sqrt(f1 * f1 + f2 * f2))
    if not min1 and not min2:
        return _dw_box_max(lo1, hi1, lo2, hi2, a1, a2)
    if min2:
        return _dw_maxmin(lo1, hi1, lo2, hi2, a1, a2)
    return _dw_maxmin(lo2, hi2, lo1, hi1, a2, a1)


@njit(inline="always")
def _weno_pair(um2, um1, u0, up1, up2, inv2h, eps):
    c = up1 - um1
    d0 = up1 - 2.0 * u0 + um1
    dm = u0 - 2.0 * um1 + um2
    dp = up2 - 2.0 * up1 + u0
    s0 = eps + d0 * d0
    sm = eps + dm * dm
    sp = eps + dp * dp
    # w = 1 / (1 + 2 r^2) with r = s_side / s0, cleared of nested divisions
    wm = s0 * s0 / (s0 * s0 + 2.0 * sm * sm)
    wp = s0 * s0 / (s0 * s0 + 2.0 * sp * sp)
    gm = (c - wm * (d0 - dm)) * inv2h
    gp = (c - wp * (dp - d0)) * inv2h
    return gm, gp


@njit(inline="always")
def _grad_pair(order, um2, um1, u0, up1, up2, inv2h, eps):
    if order <= 1:
        return (u0 - um1) * 2.0 * inv2h, (up1 - u0) * 2.0 * inv2h
    return _weno_pair(um2, um1, u0, up1, up2, inv2h, eps)


@njit
def weno3_1d_nb(u, h):
    n = u.shape[0]
    gm = np.empty(n)
    gp = np.empty(n)
    inv2h = 0.5 / h
    eps = h * h
    for i in range(n):
        gm[i], gp[i] = _weno_pair(
            u[(i - 2) % n], u[(i - 1) % n], u[i], u[(i + 1) % n], u[(i + 2) % n], inv2h, eps
        )
    return gm, gp


@njit
def weno3_2d_nb(u, h, axis):
    n0, n1 = u.shape
    gm = np.empty((n0, n1))
    gp = np.empty((n0, n1))
    inv2h = 0.5 / h
    eps = h * h
    for i in range(n0):
        for j in range(n1):
            if axis == 0:
                a, b, c, d, e = (u[(i - 2) % n0, j], u[(i - 1) % n0, j], u[i, j],
                                 u[(i + 1) % n0, j], u[(i + 2) % n0, j])
            else:
                a, b, c, d, e = (u[i, (j - 2) % n1], u[i, (j - 1) % n1], u[i, j],
                                 u[i, (j + 1) % n1], u[i, (j + 2) % n1])
            gm[i, j], gp[i, j] = _weno_pair(a, b, c, d, e, inv2h, eps)
    return gm, gp


@njit
def rhs_1d_nb(w, V, p1, kind, knots, vals, tail, a, al1, h, lam, order, out):
    n = w.shape[0]
    inv2h = 0.5 / h
    eps = h * h
    a1 = a[0]
    a2 = a[1]
    for i in range(n):
        gm, gp = _grad_pair(order, w[(i - 2) % n], w[(i - 1) % n], w[i], w[(i + 1) % n],
                            w[(i + 2) % n], inv2h, eps)
        if order == 0:
            flux = godunov_nb(kind, p1 + gm, p1 + gp, 0.0, 0.0, False, knots, vals, tail, a1, a2)
        else:
            hv = ham_nb(kind, p1 + 0.5 * (gm + gp), 0.0, knots, vals, tail, a1, a2)
            flux = hv - 0.5 * al1 * (gp - gm)
        out[i] = V[i] - flux - lam * w[i]


@njit
def rhs_2d_nb(w, V, p1, p2, kind, knots, vals, tail, a, al1, al2, h, lam, order, out):
    n0, n1 = w.shape
    inv2h = 0.5 / h
    eps = h * h
    a1 = a[0]
    a2 = a[1]
    for i in range(n0):
        rm2 = w[(i - 2) % n0]
        rm1 = w[(i - 1) % n0]
        r0 = w[i]
        rp1 = w[(i + 1) % n0]
        rp2 = w[(i + 2) % n0]
        vrow = V[i]
        orow = out[i]
        for j in range(n1):
            if j >= 2 and j < n1 - 2:
                jm2, jm1, jp1, jp2 = j - 2, j - 1, j + 1, j + 2
            else:
                jm2, jm1, jp1, jp2 = (j - 2) % n1, (j - 1) % n1, (j + 1) % n1, (j + 2) % n1
            w0 = r0[j]
            gm1, gp1 = _grad_pair(order, rm2[j], rm1[j], w0, rp1[j], rp2[j], inv2h, eps)
            gm2, gp2 = _grad_pair(order, r0[jm2], r0[jm1], w0, r0[jp1], r0[jp2], inv2h, eps)
            if order == 0:
                flux = godunov_nb(kind, p1 + gm1, p1 + gp1, p2 + gm2, p2 + gp2, True,
                                  knots, vals, tail, a1, a2)
            else:
                hv = ham_nb(kind, p1 + 0.5 * (gm1 + gp1), p2 + 0.5 * (gm2 + gp2),
                            knots, vals, tail, a1, a2)
                flux = hv - 0.5 * al1 * (gp1 - gm1) - 0.5 * al2 * (gp2 - gm2)
            orow[j] = vrow[j] - flux - lam * w0


@njit
def _rhs_nb(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, order, out):
    if w.ndim == 1:
        rhs_1d_nb(w.reshape(-1), V.reshape(-1), p[0], kind, knots, vals, tail, a,
                  alpha[0], h, lam, order, out.reshape(-1))
    else:
        rhs_2d_nb(w.reshape(w.shape[0], -1), V.reshape(V.shape[0], -1), p[0], p[1], kind,
                  knots, vals, tail, a, alpha[0], alpha[1], h, lam, order,
                  out.reshape(out.shape[0], -1))


@njit
def rk3_advance_nb(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, dt, nsteps, order):
    """Advance ``w`` in place by ``nsteps`` SSP-RK3 steps.

    Returns the number of completed steps; fewer than ``nsteps`` means a
    non-finite value appeared.
    """
    k1 = np.empty_like(w)
    w1 = np.empty_like(w)
    w2 = np.empty_like(w)
    flat = w.reshape(-1)
    f1 = w1.reshape(-1)
    f2 = w2.reshape(-1)
    fk = k1.reshape(-1)
    m = flat.shape[0]
    for step in range(nsteps):
        _rhs_nb(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, order, k1)
        for q in range(m):
            f1[q] = flat[q] + dt * fk[q]
        _rhs_nb(w1, V, p, kind, knots, vals, tail, a, alpha, h, lam, order, k1)
        for q in range(m):
            f2[q] = 0.75 * flat[q] + 0.25 * (f1[q] + dt * fk[q])
        _rhs_nb(w2, V, p, kind, knots, vals, tail, a, alpha, h, lam, order, k1)
        bad = False
        for q in range(m):
            v = flat[q] / 3.0 + 2.0 / 3.0 * (f2[q] + dt * fk[q])
            if not math.isfinite(v):
                bad = True
            flat[q] = v
        if bad:
            return step
    return nsteps


# --------------------------------------------------------------------------
# numpy


def ham_np(kind, q1, q2, knots, vals, tail, a):
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    if kind == RADIAL:
        r = np.sqrt(q1 * q1 + q2 * q2)
        last = knots[-1]
        inner = np.interp(np.minimum(r, last), knots, vals)
        return np.where(r >= last, vals[-1] + tail * (r - last), inner)
    b1 = q1 - a[0]
    b2 = q2 - a[1]
    c1 = q1 + a[0]
    c2 = q2 + a[1]
    return np.minimum(np.sqrt(b1 * b1 + b2 * b2), np.sqrt(c1 * c1 + c2 * c2))


def _pl_np(r, knots, vals, tail):
    last = knots[-1]
    inner = np.interp(np.minimum(r, last), knots, vals)
    return np.where(r >= last, vals[-1] + tail * (r - last), inner)


def _pl_ext_np(r0, r1, knots, vals, tail, want_max):
    a = _pl_np(r0, knots, vals, tail)
    b = _pl_np(r1, knots, vals, tail)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    for kk, vk in zip(knots, vals):
        inside = (kk > r0) & (kk < r1)
        hi = np.where(inside, np.maximum(hi, vk), hi)
        lo = np.where(inside, np.minimum(lo, vk), lo)
    return np.where(want_max, hi, lo)


def _abs_range_np(x, y):
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    straddle = (lo <= 0.0) & (hi >= 0.0)
    s_lo = np.where(straddle, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    return s_lo, np.maximum(np.abs(lo), np.abs(hi))


def _maxmin_radial_np(x_lo, x_hi, A, B, knots, vals, tail):
    def window_min(x):
        return _pl_ext_np(np.sqrt(x * x + A), np.sqrt(x * x + B), knots, vals, tail, False)

    best = np.maximum(window_min(x_lo), window_min(x_hi))

    def consider(best, x, ok):
        ok = ok & (x > x_lo) & (x < x_hi)
        if not ok.any():
            return best
        xs = np.where(ok, x, x_lo)
        return np.where(ok, np.maximum(best, window_min(xs)), best)

    n = len(knots)
    for kk in knots:
        for S in (A, B):
            d = kk * kk - S
            best = consider(best, np.sqrt(np.maximum(d, 0.0)), d >= 0.0)
    D = B - A
    slopes = [(vals[i + 1] - vals[i]) / (knots[i + 1] - knots[i]) for i in range(n - 1)] + [tail]
    for i in range(n):
        mi = slopes[i]
        if mi <= 0.0:
            continue
        ci = vals[i] - mi * knots[i]
        for j in range(i + 1, n):
            mj = slopes[j]
            if mj >= 0.0:
                continue
            c = (vals[j] - mj * knots[j]) - ci
            qa = mi * mi - mj * mj
            qb = -2.0 * mi * c
            qc = c * c - mj * mj * D
            if qa == 0.0:
                if qb == 0.0:
                    continue
                roots = [np.broadcast_to(-qc / qb, np.shape(D))]
            else:
                disc = qb * qb - 4.0 * qa * qc
                sq = np.sqrt(np.maximum(disc, 0.0))
                roots = [np.where(disc >= 0.0, (-qb - sq) / (2.0 * qa), -1.0),
                         np.where(disc >= 0.0, (-qb + sq) / (2.0 * qa), -1.0)]
            for L in roots:
                d = L * L - A
                best = consider(best, np.sqrt(np.maximum(d, 0.0)), (L >= 0.0) & (d >= 0.0))
    return best


def _idist_np(c, lo, hi):
    return np.maximum(np.maximum(lo - c, c - hi), 0.0)


def _dw_np(q1, q2, a1, a2):
    return np.minimum(np.hypot(q1 - a1, q2 - a2), np.hypot(q1 + a1, q2 + a2))


def _dw_maxmin_np(x_lo, x_hi, y_lo, y_hi, ax, ay):
    d1 = _idist_np(ay, y_lo, y_hi)
    d2 = _idist_np(-ay, y_lo, y_hi)

    def g(x):
        return np.minimum(np.sqrt((x - ax) ** 2 + d1 * d1), np.sqrt((x + ax) ** 2 + d2 * d2))

    best = np.maximum(g(x_lo), g(x_hi))
    if ax != 0.0:
        xs = (d1 * d1 - d2 * d2) / (4.0 * ax)
        ok = (xs > x_lo) & (xs < x_hi)
        best = np.where(ok, np.maximum(best, g(np.where(ok, xs, x_lo))), best)
    return best


def _dw_box_max_np(lo1, hi1, lo2, hi2, a1, a2):
    best = np.maximum(np.maximum(_dw_np(lo1, lo2, a1, a2), _dw_np(lo1, hi2, a1, a2)),
                      np.maximum(_dw_np(hi1, lo2, a1, a2), _dw_np(hi1, hi2, a1, a2)))
    if a2 != 0.0:
        for x in (lo1, hi1):
            y = -x * a1 / a2
            ok = (y > lo2) & (y < hi2)
            best = np.where(ok, np.maximum(best, _dw_np(x, y, a1, a2)), best)
    if a1 != 0.0:
        for y in (lo2, hi2):
            x = -y * a2 / a1
            ok = (x > lo1) & (x < hi1)
            best = np.where(ok, np.maximum(best, _dw_np(x, y, a1, a2)), best)
    return best


def godunov_np(kind, q1m, q1p, q2m, q2p, dim2, knots, vals, tail, a):
    """Vectorised counterpart of ``godunov_nb``."""
    a1, a2 = float(a[0]), float(a[1])
    min1 = q1m <= q1p
    lo1 = np.minimum(q1m, q1p)
    hi1 = np.maximum(q1m, q1p)
    if not dim2:
        if kind == RADIAL:
            s_lo, s_hi = _abs_range_np(lo1, hi1)
            return _pl_ext_np(s_lo, s_hi, knots, vals, tail, ~min1)
        low = np.minimum(_idist_np(a1, lo1, hi1), _idist_np(-a1, lo1, hi1))
        high = np.maximum(_dw_np(lo1, 0.0, a1, 0.0), _dw_np(hi1, 0.0, a1, 0.0))
        high = np.where((lo1 < 0.0) & (hi1 > 0.0), np.maximum(high, _dw_np(0.0, 0.0, a1, 0.0)), high)
        return np.where(min1, low, high)
    min2 = q2m <= q2p
    lo2 = np.minimum(q2m, q2p)
    hi2 = np.maximum(q2m, q2p)
    if kind == RADIAL:
        s_lo, s_hi = _abs_range_np(lo1, hi1)
        t_lo, t_hi = _abs_range_np(lo2, hi2)
        same = _pl_ext_np(np.sqrt(s_lo * s_lo + t_lo * t_lo), np.sqrt(s_hi * s_hi + t_hi * t_hi),
                          knots, vals, tail, ~min1)
        mm1 = _maxmin_radial_np(s_lo, s_hi, t_lo * t_lo, t_hi * t_hi, knots, vals, tail)
        mm2 = _maxmin_radial_np(t_lo, t_hi, s_lo * s_lo, s_hi * s_hi, knots, vals, tail)
        return np.where(min1 == min2, same, np.where(min2, mm1, mm2))
    e = np.hypot(_idist_np(a1, lo1, hi1), _idist_np(a2, lo2, hi2))
    f = np.hypot(_idist_np(-a1, lo1, hi1), _idist_np(-a2, lo2, hi2))
    both_min = np.minimum(e, f)
    both_max = _dw_box_max_np(lo1, hi1, lo2, hi2, a1, a2)
    mm1 = _dw_maxmin_np(lo1, hi1, lo2, hi2, a1, a2)
    mm2 = _dw_maxmin_np(lo2, hi2, lo1, hi1, a2, a1)
    return np.where(min1 & min2, both_min,
                    np.where(~min1 & ~min2, both_max, np.where(min2, mm1, mm2)))


def weno3_np(u, h, axis=0):
    inv2h = 0.5 / h
    eps = h * h
    um2 = np.roll(u, 2, axis)
    um1 = np.roll(u, 1, axis)
    up1 = np.roll(u, -1, axis)
    up2 = np.roll(u, -2, axis)
    c = up1 - um1
    d0 = up1 - 2.0 * u + um1
    dm = u - 2.0 * um1 + um2
    dp = up2 - 2.0 * up1 + u
    s0 = eps + d0 * d0
    sm = eps + dm * dm
    sp = eps + dp * dp
    wm = s0 * s0 / (s0 * s0 + 2.0 * sm * sm)
    wp = s0 * s0 / (s0 * s0 + 2.0 * sp * sp)
    return (c - wm * (d0 - dm)) * inv2h, (c - wp * (dp - d0)) * inv2h


def diff1_np(u, h, axis=0):
    inv2h = 0.5 / h
    return (u - np.roll(u, 1, axis)) * 2.0 * inv2h, (np.roll(u, -1, axis) - u) * 2.0 * inv2h


def _rhs_np(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, order=3):
    grad = diff1_np if order <= 1 else weno3_np
    gm1, gp1 = grad(w, h, 0)
    if order == 0:
        knots = np.asarray(knots)
        vals = np.asarray(vals)
        if w.ndim == 1:
            flux = godunov_np(kind, p[0] + gm1, p[0] + gp1, None, None, False, knots, vals, tail, a)
        else:
            gm2, gp2 = grad(w, h, 1)
            flux = godunov_np(kind, p[0] + gm1, p[0] + gp1, p[1] + gm2, p[1] + gp2, True,
                              knots, vals, tail, a)
        return V - flux - lam * w
    if w.ndim == 1:
        hv = ham_np(kind, p[0] + 0.5 * (gm1 + gp1), 0.0, knots, vals, tail, a)
        flux = hv - 0.5 * alpha[0] * (gp1 - gm1)
    else:
        gm2, gp2 = grad(w, h, 1)
        hv = ham_np(kind, p[0] + 0.5 * (gm1 + gp1), p[1] + 0.5 * (gm2 + gp2),
                    knots, vals, tail, a)
        flux = hv - 0.5 * alpha[0] * (gp1 - gm1) - 0.5 * alpha[1] * (gp2 - gm2)
    return V - flux - lam * w


def rk3_advance_np(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, dt, nsteps, order=3):
    args = (V, p, kind, knots, vals, tail, a, alpha, h, lam, order)
    for step in range(nsteps):
        w1 = w + dt * _rhs_np(w, *args)
        w2 = 0.75 * w + 0.25 * (w1 + dt * _rhs_np(w1, *args))
        w3 = w / 3.0 + 2.0 / 3.0 * (w2 + dt * _rhs_np(w2, *args))
        w[...] = w3
        if not np.all(np.isfinite(w3)):
            return step
    return nsteps


def _rhs_nb_wrapper(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, order=3):
    out = np.empty_like(w)
    _rhs_nb(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, order, out)
    return out


def _rk3_nb_wrapper(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, dt, nsteps, order=3):
    return rk3_advance_nb(w, V, p, kind, knots, vals, tail, a, alpha, h, lam, dt, nsteps, order)


def _weno_nb_wrapper(u, h, axis=0):
    if u.ndim == 1:
        return weno3_1d_nb(u, h)
    return weno3_2d_nb(u, h, axis)


def _ham_nb_vec(kind, q1, q2, knots, vals, tail, a):
    q1, q2 = np.broadcast_arrays(np.asarray(q1, dtype=float), np.asarray(q2, dtype=float))
    out = np.empty(q1.shape)
    flat1, flat2, fo = q1.reshape(-1), q2.reshape(-1), out.reshape(-1)
    for k in range(fo.shape[0]):
        fo[k] = ham_nb(kind, flat1[k], flat2[k], knots, vals, tail, a[0], a[1])
    return out


class Kernels:
    """Uniform facade over one backend's kernels."""

    def __init__(self, name, ham, weno3, rhs, rk3_advance):
        self.name = name
        self.ham = ham
        self.weno3 = weno3
        self.rhs = rhs
        self.rk3_advance = rk3_advance

    def __repr__(self):
        return f"Kernels({self.name!r})"


NUMBA = Kernels("numba", _ham_nb_vec, _weno_nb_wrapper, _rhs_nb_wrapper, _rk3_nb_wrapper)
NUMPY = Kernels("numpy", ham_np, weno3_np, _rhs_np, rk3_advance_np)


def get_kernels(backend=None):
    name = backend or default_backend()
    if name == "numba":
        return NUMBA
    if name == "numpy":
        return NUMPY
    raise ValueError(f"unknown backend {name!r}")
