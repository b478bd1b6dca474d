"""Stage formulas for every iteration scheme.

Each scheme is a chain of *stages*. Stage ``k`` maps everything known so far
to the next point of the chain; the first stage is always the Newton point
and the last stage yields ``x_{n+1}``.  All stages share one signature::

    stage(x, fx, dfx, y, fy, z, fz, w, fw, prm) -> point

``y, z, w`` are the second, third and fourth points of the chain (unused
slots are passed as zeros) and ``prm`` is the method's free real parameter
(Neta's ``A``, Khattri-Steihaug's ``alpha``; ignored elsewhere).

The functions are branch-free arithmetic so the same source runs on mpmath
reals, Python complex numbers, numpy arrays, and (compiled by
:mod:`multipoint.basins._accel`) inside numba kernels.  Zero tests and
early exits belong to the drivers, not here.  Powers are written as
products so complex results stay exactly conjugation-symmetric.
"""

# The accelerator re-executes this module with ``_JIT`` preset to numba.njit.
jit = globals().get("_JIT") or (lambda fn: fn)


@jit
def newton_point(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    return x - fx / dfx


# ---------------------------------------------------------------------------
# Weight functions of the proposed schemes
# ---------------------------------------------------------------------------

# W1: polynomial weights (also the G, H pair of the three-point method).

@jit
def w1_g(t):
    return -6 * t * t * t + 5 * t * t + 2 * t + 1


@jit
def w1_h(t, s, u):
    return 1 + 2 * t + 4 * u + 6 * t * t + s


@jit
def w1_i(t):
    return 6 * t * t + 2 * t


@jit
def w1_j(s):
    return -s * s * s + s + 1


@jit
def w1_k(u):
    return 4 * u - 4 * u * u


@jit
def w1_l(t, u):
    return t * u + 6 * t * t * u + 2 * t * t * t * u - 10 * t * u * u


@jit
def w1_m(p, q, r):
    return r + 2 * q + 8 * p


@jit
def w1_n(t, s, u, r):
    t2 = t * t
    return 2 * t * r + 2 * s * u + 6 * t2 * r - 4 * s * s * u + 24 * t2 * t2 * u


# W2: rational weights.

@jit
def w2_g(t):
    t2 = t * t
    return t2 * (5 - 7 * t) + (2 * t + 1) * (t2 * t + 1) - 2 * t2 * t2


@jit
def w2_h(t, s, u):
    return (1 + s) + (6 + u * u) * (u + t * t) + 2 * (t - u)


@jit
def w2_i(t):
    return (1 + t) * (2 * t + t * t) + t * t * (3 - t)


@jit
def w2_j(s):
    return (s + s * s - s * s * s) / (1 + s)


@jit
def w2_k(u):
    return (1 + 5 * u) / (1 + u)


@jit
def w2_l(t, u):
    return t * u + 6 * t * t * u + (2 * t * t * t * u - 10 * t * u * u) / (1 + t * u)


@jit
def w2_m(p, q, r):
    return 2 * (p + q) + (6 * p + r) / (1 + p)


@jit
def w2_n(t, s, u, r):
    t2 = t * t
    return (8 * t2 * r - 4 * s * s * u - 2 * t2 * t * r
            + (2 * s * u + 2 * t * r + 24 * t2 * t2 * u + 2 * t * s * u) / (1 + t))


# W3: rational weights.

@jit
def w3_g(t):
    t2 = t * t
    return (1 + t2) * (1 + 2 * t + 2 * t2) + t2 * (2 - 8 * t - 2 * t2)


@jit
def w3_h(t, s, u):
    return 4 * u - 5 * s + (6 + s * s * s) * (t * t + s) + (1 + u * u * u) * (1 + 2 * t)


@jit
def w3_i(t):
    t2 = t * t
    return (1 + t) * (2 * t + t2 * t) + t2 * (4 - t - t2)


@jit
def w3_j(s):
    return -2 * s * s + (s + 2 * s * s) / (1 + s * s)


@jit
def w3_k(u):
    return 1 + 6 * u - (2 * u + 6 * u * u) / (1 + u)


@jit
def w3_l(t, u):
    return t * u + (2 * t * t * t * u - 10 * t * u * u + 6 * t * t * u) / (1 + 2 * t * u)


@jit
def w3_m(p, q, r):
    return (1 + 2 * p + 2 * q) / (1 - r) + 6 * p / (1 + q) - 1


@jit
def w3_n(t, s, u, r):
    t2 = t * t
    return (2 * t * r + 2 * s * u + 24 * t2 * t2 * u
            + (6 * t2 * r + 6 * t2 * t * r - 4 * s * s * u) / (1 + t))


def weighted_stages(g, h=None, i=None, j=None, k=None, l=None, m=None, n=None):
    """Stage chain of the two-, three- or four-point weighted family.

    With only ``g`` this is the two-point scheme, adding ``h`` gives the
    three-point scheme, and supplying ``i`` ... ``n`` as well gives the
    four-point scheme whose last correction factor is ``I+J+K+L+M+N``.
    """

    @jit
    def second(x, fx, dfx, y, fy, z, fz, w, fw, prm):
        return y - g(fy / fx) * fy / dfx

    stages = [newton_point, second]
    if h is None:
        return tuple(stages)

    @jit
    def third(x, fx, dfx, y, fy, z, fz, w, fw, prm):
        return z - h(fy / fx, fz / fy, fz / fx) * fz / dfx

    stages.append(third)
    if i is None:
        return tuple(stages)

    @jit
    def fourth(x, fx, dfx, y, fy, z, fz, w, fw, prm):
        t = fy / fx
        s = fz / fy
        u = fz / fx
        p = fw / fx
        q = fw / fy
        r = fw / fz
        total = i(t) + j(s) + k(u) + l(t, u) + m(p, q, r) + n(t, s, u, r)
        return w - total * fw / dfx

    stages.append(fourth)
    return tuple(stages)


# ---------------------------------------------------------------------------
# Kung-Traub (order 8 and 16), transcribed as printed
# ---------------------------------------------------------------------------

@jit
def kt_g(fx, fy, dfx):
    dxy = fx - fy
    return fx * fx * fy / (dfx * dxy * dxy)


@jit
def kt_h(fx, fy, fz, dfx):
    dxz = fx - fz
    return kt_g(fx, fy, dfx) * (
        -1 / (fx * fx * dxz)
        + (fy - fx) / (fx * fy * dxz * dxz)
        + 1 / ((fy - fz) * dxz * dxz)
    )


@jit
def kt_k(fx, fy, fz, dfx):
    dxy = fx - fy
    return (fx * (fy - fz) * dxy - fx * fx * fy) / (dfx * (fx - fz) * dxy * dxy * (fy - fz))


@jit
def kt_l(fx, fy, fz, fs, dfx):
    num = kt_g(fx, fy, dfx) * (fz - fs) - fy * fx * fx * kt_h(fx, fy, fz, dfx) * (fy - fz)
    return num / ((fy - fs) * (fy - fz) * (fz - fs))


@jit
def kt_z(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    return y - kt_g(fx, fy, dfx)


@jit
def kt_third(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    return z - fx * fx * fy * kt_h(fx, fy, fz, dfx)


@jit
def kt_fourth(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    hf = kt_h(fx, fy, fz, dfx)
    dxs = fx - fw
    corr = hf - (kt_k(fx, fy, fz, dfx) - kt_l(fx, fy, fz, fw, dfx)) / dxs
    return w + fx * fx * fy * fz / dxs * corr


# ---------------------------------------------------------------------------
# Neta (order 8 and 16): inverse interpolation in F = f - f(x)
# ---------------------------------------------------------------------------

@jit
def neta_zeta(point, x, big_f, dfx):
    return ((point - x) / big_f - 1 / dfx) / big_f


@jit
def neta_z(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    return y - (fx + prm * fy) / (fx + (prm - 2) * fy) * fy / dfx


@jit
def neta8_next(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    big_fy = fy - fx
    big_fz = fz - fx
    zeta_y = neta_zeta(y, x, big_fy, dfx)
    zeta_z = neta_zeta(z, x, big_fz, dfx)
    delta2 = -(zeta_y - zeta_z) / (big_fy - big_fz)
    delta1 = zeta_y + delta2 * big_fy
    return y + delta1 * fx * fx + delta2 * fx * fx * fx


@jit
def neta16_theta2(gamma1, theta3, big_fs, big_fz):
    # Printed as "gamma1 + theta3 (Fs -+ Fz)"; the interpolation conditions
    # fix it to -gamma1 + theta3 (Fs + Fz).
    return -gamma1 + theta3 * (big_fs + big_fz)


@jit
def neta16_next(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    big_fy = fy - fx
    big_fz = fz - fx
    big_fs = fw - fx
    zeta_y = neta_zeta(y, x, big_fy, dfx)
    zeta_z = neta_zeta(z, x, big_fz, dfx)
    zeta_s = neta_zeta(w, x, big_fs, dfx)
    gamma1 = (zeta_s - zeta_z) / (big_fs - big_fz)
    gamma2 = (zeta_y - zeta_z) / (big_fy - big_fz)
    theta3 = (gamma1 - gamma2) / (big_fs - big_fy)
    theta2 = neta16_theta2(gamma1, theta3, big_fs, big_fz)
    theta1 = zeta_s + theta2 * big_fs - theta3 * big_fs * big_fs
    fx2 = fx * fx
    return y + theta1 * fx2 + theta2 * fx2 * fx + theta3 * fx2 * fx2


# ---------------------------------------------------------------------------
# Khattri-Steihaug (order 8). Chain: x -> y -> a = x + alpha f(x) -> z -> x+.
# The auxiliary point a occupies the ``z`` slot, the third step the ``w`` slot.
# ---------------------------------------------------------------------------

@jit
def kh_aux(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    return x + prm * fx


@jit
def kh_z(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    # z/fz here are the auxiliary point a and f(a).
    afx = prm * fx
    dxy = x - y
    den = (
        (dxy + afx) / (dxy * prm)
        - dxy * fz / ((dxy + afx) * afx)
        - (2 * x - 2 * y + afx) * fy / (dxy * (dxy + afx))
    )
    return y - fy / den


@jit
def kh_h1(x, y, z, afx):
    # Lagrange-derivative weight of the node x; the denominator is the
    # product afx (y - x)(z - x) (a sum there leaves the method at order 5).
    return (y - z) * (z - x - afx) / (afx * (y - x) * (z - x))


@jit
def kh_next(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    # z/fz: auxiliary point a and f(a); w/fw: the third point z_n and f(z_n).
    afx = prm * fx
    a = x + afx
    zn = w
    h1 = kh_h1(x, y, zn, afx)
    h2 = (-x * y + x * zn + y * zn - zn * zn) / (afx * (-afx + y - x) * (afx + x - zn))
    h3 = -(a * x - a * zn - x * zn + zn * zn) / ((afx + x - y) * (y - x) * (y - zn))
    h4 = -(
        a * x + a * y + x * y - 2 * a * zn - 2 * x * zn - 2 * y * zn + 3 * zn * zn
    ) / ((afx + x - zn) * (zn - x) * (zn - y))
    return zn - fw / (h1 * fx + h2 * fz + h3 * fy + h4 * fw)


# ---------------------------------------------------------------------------
# Geum-Kim (order 16), two members
# ---------------------------------------------------------------------------

@jit
def gk1_z(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    # beta = 2: lambda = -9 + 5 beta / 2 = -4, mu = -4 + beta / 2 = -3
    u = fy / fx
    return y - (1 + 2 * u - 4 * u * u) / (1 - 3 * u * u) * fy / dfx


@jit
def gk_third(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    # a=2, b=0, c=0, d=-1, sigma=-2, gamma = 2 + sigma = 0 (both members)
    u = fy / fx
    v = fz / fy
    ww = fz / fx
    return z - (1 + 2 * u) / (1 - v - 2 * ww) * fz / dfx


@jit
def gk1_weight(u, v, ww, t):
    # B1=2, B2=2+sigma=0, B3=-1, B4=-2, B5=-1, B6=2(1+sigma)=-2
    frac = (1 + 2 * u) / (1 - v - 2 * ww - t - 2 * v * ww)
    # beta=2, sigma=-2: 24-11 beta = 2, phi1 = 48, phi2 = 2u(sigma^2-2sigma-9) - 4sigma - 6
    phi2 = -2 * u + 2
    u2 = u * u
    g = -0.5 * (u * ww * (6 + 12 * u + 2 * u2 + 48 * u2 * u - 8)) + phi2 * ww * ww
    return frac + g


@jit
def gk1_next(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    u = fy / fx
    v = fz / fy
    ww = fz / fx
    t = fw / fz
    return w - gk1_weight(u, v, ww, t) * fw / dfx


@jit
def gk2_z(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    # beta = 0: lambda = -9, mu = -4.  The printed numerator carries gamma
    # (= 0 here); lambda is what the published errors correspond to.
    u = fy / fx
    return y - (1 - 9 * u * u) / (1 - 2 * u - 4 * u * u) * fy / dfx


@jit
def gk2_weight(u, v, ww, t):
    # A1=2, A2=-1, A3=-2, A4=-1
    frac = (1 + 2 * u) / (1 - v - 2 * ww - t)
    u3 = u * u * u
    g = (-6 * u3 * v + 6 * ww * ww - 4 * u3 * u * (3 * v + 17 * ww)
         + u * (2 * v * v + 4 * v * v * v + ww - 2 * ww * ww))
    return frac + g


@jit
def gk2_next(x, fx, dfx, y, fy, z, fz, w, fw, prm):
    u = fy / fx
    v = fz / fy
    ww = fz / fx
    t = fw / fz
    return w - gk2_weight(u, v, ww, t) * fw / dfx


def method_stages():
    """Stage chains keyed by method label."""
    w1 = (w1_g, w1_h, w1_i, w1_j, w1_k, w1_l, w1_m, w1_n)
    w2 = (w2_g, w2_h, w2_i, w2_j, w2_k, w2_l, w2_m, w2_n)
    w3 = (w3_g, w3_h, w3_i, w3_j, w3_k, w3_l, w3_m, w3_n)
    return {
        "newton": (newton_point,),
        "two_point": weighted_stages(w1_g),
        "dd2": weighted_stages(w1_g, w1_h),
        "KT0": (newton_point, kt_z, kt_third),
        "NNN": (newton_point, neta_z, neta8_next),
        "kh1": (newton_point, kh_aux, kh_z, kh_next),
        "d2": weighted_stages(*w1),
        "d4": weighted_stages(*w2),
        "d6": weighted_stages(*w3),
        "KT": (newton_point, kt_z, kt_third, kt_fourth),
        "NNNN": (newton_point, neta_z, neta8_next, neta16_next),
        "d7": (newton_point, gk1_z, gk_third, gk1_next),
        "d9": (newton_point, gk2_z, gk_third, gk2_next),
    }
