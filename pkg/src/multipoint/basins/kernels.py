"""Orbit classification kernels.

Three interchangeable backends share one protocol:

* ``numba``  compiled scalar loop per pixel (stage formulas compiled too),
* ``numpy``  vectorised over all still-active pixels of the grid,
* ``python`` the generic :func:`multipoint.schemes.methods.step` driver on
  Python ``complex`` (or mpmath ``mpc`` for high-precision checks).

Intermediate stages that stall (move by at most ``STALL_ULPS`` units of
roundoff) end the step early, exactly as in the arbitrary-precision driver.
A pixel is assigned root ``k`` as soon as a full-step iterate lies within
``tol`` of ``roots[k]`` (lowest index on ties); zero derivatives, vanishing
denominators, non-finite values and running out of iterations give ``NONE``
with the iteration count set to ``max_iter``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..schemes.methods import STALL_ULPS, SchemeError, get_method, step
from . import _accel

NONE = -1
# relative movement below which a stage has stalled (same rule as the mp driver)
STALL = STALL_ULPS * np.finfo(np.float64).eps


def nearest_root(z, roots, tol) -> int:
    best, best_d = NONE, tol
    for k, r in enumerate(roots):
        d = abs(z - r)
        if d < best_d:
            best, best_d = k, d
    return best


# ---------------------------------------------------------------------------
# python (generic scalar field)
# ---------------------------------------------------------------------------

def python_orbit(method, f, df, z0, roots, max_iter, tol, param=None):
    """Return ``(root_index, iterations, final_point)`` for one start point."""
    spec = get_method(method) if isinstance(method, str) else method
    k = nearest_root(z0, roots, tol)
    if k != NONE:
        return k, 0, z0
    x = z0
    for it in range(1, max_iter + 1):
        try:
            x = step(spec, f, df, x, param).next_iterate
        except (SchemeError, ZeroDivisionError, OverflowError, ValueError):
            return NONE, max_iter, x
        if not (math.isfinite(float(x.real)) and math.isfinite(float(x.imag))):
            return NONE, max_iter, x
        k = nearest_root(x, roots, tol)
        if k != NONE:
            return k, it, x
    return NONE, max_iter, x


# ---------------------------------------------------------------------------
# numpy (vectorised)
# ---------------------------------------------------------------------------

def _polyval(coeffs, z):
    value = np.zeros_like(z)
    for c in reversed(coeffs):
        value = value * z + c
    return value


def _polyder(coeffs, z):
    value = np.zeros_like(z)
    deriv = np.zeros_like(z)
    for c in reversed(coeffs):
        deriv = deriv * z + value
        value = value * z + c
    return deriv


def _numpy_advance(stages, coeffs, x, fx, dfx, prm):
    zero = np.zeros_like(x)
    slots = [zero] * 6
    result = np.empty_like(x)
    settled = np.zeros(x.shape, dtype=bool)
    last = len(stages) - 1
    prev = x
    for k, stage in enumerate(stages):
        new = stage(x, fx, dfx, *slots, prm)
        if k == last:
            result = np.where(settled, result, new)
            break
        stall = (np.abs(new - prev) <= STALL * np.abs(new)) & ~settled
        result[stall] = new[stall]
        settled |= stall
        fnew = _polyval(coeffs, new)
        hit = (fnew == 0) & ~settled
        result[hit] = new[hit]
        settled |= hit
        slots[2 * k], slots[2 * k + 1] = new, fnew
        prev = new
    return result


def _nearest_many(z, roots, tol):
    idx = np.full(z.shape, NONE, dtype=np.int32)
    best = np.full(z.shape, tol, dtype=float)
    for k, r in enumerate(roots):
        d = np.abs(z - r)
        closer = d < best
        idx[closer] = k
        best[closer] = d[closer]
    return idx


def numpy_render(method, coeffs, roots, z0, max_iter, tol, param=0.0):
    """Classify every point of the complex array ``z0``."""
    spec = get_method(method) if isinstance(method, str) else method
    coeffs = [float(c) for c in coeffs]
    roots = list(roots)
    shape = z0.shape
    flat = np.asarray(z0, dtype=complex).ravel()
    assign = np.full(flat.shape, NONE, dtype=np.int32)
    iters = np.full(flat.shape, max_iter, dtype=np.int32)
    finals = flat.copy()

    idx = _nearest_many(flat, roots, tol)
    hit = idx != NONE
    assign[hit], iters[hit] = idx[hit], 0
    active = np.flatnonzero(~hit)
    x = flat[active]
    with np.errstate(all="ignore"):
        for it in range(1, max_iter + 1):
            if active.size == 0:
                break
            fx = _polyval(coeffs, x)
            dfx = _polyder(coeffs, x)
            moving = fx != 0
            dead = (dfx == 0) & moving
            nxt = x.copy()
            ok = moving & ~dead
            if ok.any():
                nxt[ok] = _numpy_advance(spec.stages, coeffs, x[ok], fx[ok], dfx[ok], param)
            dead |= ~(np.isfinite(nxt.real) & np.isfinite(nxt.imag))
            finals[active] = nxt
            idx = _nearest_many(nxt, roots, tol)
            idx[dead] = NONE
            done = (idx != NONE) | dead
            won = idx != NONE
            assign[active[won]] = idx[won]
            iters[active[won]] = it
            keep = ~done
            active, x = active[keep], nxt[keep]
    return assign.reshape(shape), iters.reshape(shape), finals.reshape(shape)


# ---------------------------------------------------------------------------
# numba
# ---------------------------------------------------------------------------

def _make_advance(stages, hv):
    njit = _accel.njit
    n = len(stages)
    stall = STALL
    s0 = stages[0]
    if n == 1:
        @njit
        def advance(x, fx, dfx, coeffs, prm):
            o = 0j
            return s0(x, fx, dfx, o, o, o, o, o, o, prm)
        return advance
    s1 = stages[1]
    if n == 2:
        @njit
        def advance(x, fx, dfx, coeffs, prm):
            o = 0j
            y = s0(x, fx, dfx, o, o, o, o, o, o, prm)
            if abs(y - x) <= stall * abs(y):
                return y
            fy = hv(coeffs, y)
            if fy == 0:
                return y
            return s1(x, fx, dfx, y, fy, o, o, o, o, prm)
        return advance
    s2 = stages[2]
    if n == 3:
        @njit
        def advance(x, fx, dfx, coeffs, prm):
            o = 0j
            y = s0(x, fx, dfx, o, o, o, o, o, o, prm)
            if abs(y - x) <= stall * abs(y):
                return y
            fy = hv(coeffs, y)
            if fy == 0:
                return y
            z = s1(x, fx, dfx, y, fy, o, o, o, o, prm)
            if abs(z - y) <= stall * abs(z):
                return z
            fz = hv(coeffs, z)
            if fz == 0:
                return z
            return s2(x, fx, dfx, y, fy, z, fz, o, o, prm)
        return advance
    s3 = stages[3]

    @njit
    def advance(x, fx, dfx, coeffs, prm):
        o = 0j
        y = s0(x, fx, dfx, o, o, o, o, o, o, prm)
        if abs(y - x) <= stall * abs(y):
            return y
        fy = hv(coeffs, y)
        if fy == 0:
            return y
        z = s1(x, fx, dfx, y, fy, o, o, o, o, prm)
        if abs(z - y) <= stall * abs(z):
            return z
        fz = hv(coeffs, z)
        if fz == 0:
            return z
        w = s2(x, fx, dfx, y, fy, z, fz, o, o, prm)
        if abs(w - z) <= stall * abs(w):
            return w
        fw = hv(coeffs, w)
        if fw == 0:
            return w
        return s3(x, fx, dfx, y, fy, z, fz, w, fw, prm)
    return advance


@lru_cache(maxsize=None)
def _helpers():
    njit = _accel.njit

    @njit
    def hv(coeffs, z):
        value = 0j
        for i in range(coeffs.shape[0] - 1, -1, -1):
            value = value * z + coeffs[i]
        return value

    @njit
    def hd(coeffs, z):
        value = 0j
        deriv = 0j
        for i in range(coeffs.shape[0] - 1, -1, -1):
            deriv = deriv * z + value
            value = value * z + coeffs[i]
        return deriv

    @njit
    def nearest(z, roots, tol):
        best = -1
        best_d = tol
        for k in range(roots.shape[0]):
            d = abs(z - roots[k])
            if d < best_d:
                best = k
                best_d = d
        return best

    return hv, hd, nearest


@lru_cache(maxsize=None)
def numba_kernels(label: str):
    """Compiled ``(orbit, render)`` pair for a registered method label."""
    njit = _accel.njit
    hv, hd, nearest = _helpers()
    stages = _accel.jitted_formulas().method_stages()[label]
    advance = _make_advance(stages, hv)

    @njit
    def orbit(z0, coeffs, roots, max_iter, tol, prm):
        k = nearest(z0, roots, tol)
        if k >= 0:
            return k, 0, z0
        x = z0
        for it in range(1, max_iter + 1):
            fx = hv(coeffs, x)
            if fx != 0:
                dfx = hd(coeffs, x)
                if dfx == 0:
                    return -1, max_iter, x
                try:
                    x = advance(x, fx, dfx, coeffs, prm)
                except Exception:  # numba matches only Exception; raised for 0 divisors
                    return -1, max_iter, x
            if not (math.isfinite(x.real) and math.isfinite(x.imag)):
                return -1, max_iter, x
            k = nearest(x, roots, tol)
            if k >= 0:
                return k, it, x
        return -1, max_iter, x

    @njit
    def render(z0, coeffs, roots, max_iter, tol, prm, assign, iters, finals):
        h, w = z0.shape
        for i in range(h):
            for j in range(w):
                k, n, x = orbit(z0[i, j], coeffs, roots, max_iter, tol, prm)
                assign[i, j] = k
                iters[i, j] = n
                finals[i, j] = x

    return orbit, render


def numba_render(method, coeffs, roots, z0, max_iter, tol, param=0.0):
    spec = get_method(method) if isinstance(method, str) else method
    _, render = numba_kernels(spec.label)
    z0 = np.ascontiguousarray(np.atleast_2d(z0), dtype=np.complex128)
    assign = np.empty(z0.shape, dtype=np.int32)
    iters = np.empty(z0.shape, dtype=np.int32)
    finals = np.empty(z0.shape, dtype=np.complex128)
    render(z0, np.asarray(coeffs, dtype=np.float64), np.asarray(roots, dtype=np.complex128),
           int(max_iter), float(tol), float(param), assign, iters, finals)
    return assign, iters, finals


def numba_orbit(method, coeffs, roots, z0, max_iter, tol, param=0.0):
    spec = get_method(method) if isinstance(method, str) else method
    orbit, _ = numba_kernels(spec.label)
    k, n, x = orbit(complex(z0), np.asarray(coeffs, dtype=np.float64),
                    np.asarray(roots, dtype=np.complex128), int(max_iter), float(tol), float(param))
    return int(k), int(n), complex(x)
