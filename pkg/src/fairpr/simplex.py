r"""Euclidean projections onto the probability simplex and slices of it.

``project_simplex`` is the classic sort-based O(n log n) thresholding
(Held, Wolfe & Crowder 1974; see also Wang & Carreira-Perpinan 2013).

``project_fair_simplex`` projects onto the simplex intersected with one
extra linear equality ``a' x = c``.  By KKT the solution has the form
``x = max(z + mu + nu a, 0)`` for scalars (mu, nu); for fixed nu the inner
problem is a plain simplex projection, and the map

    h(nu) = a' P_simplex(z + nu a) - c

is monotone nondecreasing in nu (a one-dimensional variational
inequality), so nu is found by bisection.  A final 2x2 solve on the
support of the bisection iterate recovers (mu, nu) exactly, which makes
both equalities hold to machine precision whenever that support is the
optimal one.
"""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleError


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ar = np.arange(1, v.shape[0] + 1)
    rho = np.nonzero(u * ar > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _face_projection(z, support):
    """Projection of z onto the simplex restricted to ``support`` coords."""
    x = np.zeros_like(z)
    x[support] = project_simplex(z[support])
    return x


def _polish(z, a, c, support):
    """Exact (mu, nu) on a fixed support; None if the support is invalid."""
    k = int(support.sum())
    if k == 0:
        return None
    zs = z[support]
    as_ = a[support]
    s1 = as_.sum()
    s2 = as_ @ as_
    det = k * s2 - s1 * s1
    scale = max(s2, 1.0)
    if det <= 1e-14 * k * scale:
        return None
    r1 = 1.0 - zs.sum()
    r2 = c - as_ @ zs
    mu = (s2 * r1 - s1 * r2) / det
    nu = (k * r2 - s1 * r1) / det
    xs = zs + mu + nu * as_
    if xs.min() < -1e-12:
        return None
    excluded = ~support
    if excluded.any() and (z[excluded] + mu + nu * a[excluded]).max() > 1e-10:
        return None  # support from bisection was not the optimal one
    x = np.zeros_like(z)
    x[support] = np.maximum(xs, 0.0)
    return x


def project_fair_simplex(
    z: np.ndarray, a: np.ndarray, c: float, bisect_steps: int = 100
) -> np.ndarray:
    """Project ``z`` onto ``{x >= 0, sum x = 1, a' x = c}``.

    Raises :class:`InfeasibleError` when ``c`` lies outside
    ``[min a, max a]``, in which case the set is empty.
    """
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    amin, amax = float(a.min()), float(a.max())
    spread = amax - amin
    slack = 1e-12 * max(1.0, abs(amin), abs(amax))
    if c < amin - slack or c > amax + slack:
        raise InfeasibleError(
            f"target {c:.6g} outside attainable range [{amin:.6g}, {amax:.6g}]"
        )
    if spread <= slack:
        # Constraint is constant over the simplex: vacuous when it holds.
        return project_simplex(z)
    if c >= amax - slack:
        return _face_projection(z, a >= amax - 0.5 * spread * 1e-9)
    if c <= amin + slack:
        return _face_projection(z, a <= amin + 0.5 * spread * 1e-9)

    def h(nu):
        x = project_simplex(z + nu * a)
        return a @ x - c

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if h(lo) <= 0.0:
            break
        lo *= 2.0
    for _ in range(200):
        if h(hi) >= 0.0:
            break
        hi *= 2.0
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x = project_simplex(z + 0.5 * (lo + hi) * a)

    polished = _polish(z, a, c, x > 0.0)
    if polished is not None:
        return polished
    return x
