"""Flows of the Reeb field xi and of the Legendrian field v.

Both families have fields depending on z alone, which gives exact flows:

    psi_s(x, y, z) = (x + s cos theta(z), y + s sin theta(z), z)
    phi_s(x, y, z) = (x, y, z_s)   with theta(z_s) = theta(z) + s

For theta = n z the second one is z + s/n.  For a non-linear h the
first-order formula z + s/h'(z) is not a flow (it breaks phi_s o phi_t =
phi_{s+t}), so phi is computed through h^-1 instead.  ``integrate_flow`` is
a plain RK4 integrator used as an independent check of both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .contact import ContactFamily
from .manifold import TWO_PI, TorusPoint, normalize

CONJUGACY_TOL = 1e-9
FREDHOLM_TOL = 1e-9
SLOPE_STEP = 1e-6
# maxima closer than this are one maximum seen from two grid cells
ARGMAX_MERGE = 1e-6


def _lift(q) -> np.ndarray:
    if isinstance(q, TorusPoint):
        return q.as_array()
    return np.asarray(q, dtype=float)


def psi_lift(f: ContactFamily, q, s) -> np.ndarray:
    """Time-s Reeb flow on lifted coordinates (vectorised over q and s)."""
    p = _lift(q)
    t = f.angle(p[..., 2])
    return np.stack(
        [p[..., 0] + s * np.cos(t), p[..., 1] + s * np.sin(t), p[..., 2] + 0.0 * s],
        axis=-1,
    )


def phi_lift(f: ContactFamily, q, s) -> np.ndarray:
    """Time-s flow of v on lifted coordinates (vectorised over q and s)."""
    p = _lift(q)
    z = f.advance(p[..., 2], s)
    zero = 0.0 * np.asarray(s, dtype=float)
    return np.stack([p[..., 0] + zero, p[..., 1] + zero, z + zero], axis=-1)


def psi(f: ContactFamily, q: TorusPoint, s: float) -> TorusPoint:
    return normalize(psi_lift(f, q, s), f.gluing)


def phi(f: ContactFamily, q: TorusPoint, s: float) -> TorusPoint:
    return normalize(phi_lift(f, q, s), f.gluing)


def integrate_flow(field, q, s, steps: int) -> np.ndarray:
    """Classical RK4 for dq/ds = field(q) from 0 to s, on lifted coordinates.

    ``q`` may be a batch of shape (N, 3) with ``s`` of shape (N,).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    y = np.array(_lift(q), dtype=float)
    h = np.asarray(s, dtype=float) / steps
    if y.ndim == 2:
        h = np.broadcast_to(h, (y.shape[0],))[:, None]
    for _ in range(steps):
        k1 = field(y)
        k2 = field(y + 0.5 * h * k1)
        k3 = field(y + 0.5 * h * k2)
        k4 = field(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def transported_alpha_on_reeb(f: ContactFamily, q, s):
    """(phi_s^* alpha)_q (xi_q), vectorised over s.

    phi_s only moves z, so its differential fixes d/dx and d/dy; xi has no
    d/dz part and is therefore pushed forward to itself.
    """
    p = _lift(q)
    s = np.asarray(s, dtype=float)
    image = phi_lift(f, p, s)
    pushed = f.reeb_field(np.broadcast_to(p, image.shape))
    return np.sum(f.alpha_field(image) * pushed, axis=-1)


def pulled_back_alpha(f: ContactFamily, q, s) -> np.ndarray:
    """(phi_s^* alpha)_q as a covector at q."""
    image = phi_lift(f, q, s)
    a = f.alpha_field(image)
    # d phi_s = diag(1, 1, dz_s/dz); alpha has no dz part so the third slot is 0
    return np.array([a[0], a[1], 0.0 * a[2]])


def conjugacy_residual(f: ContactFamily, q, s: float) -> float:
    """max |(phi_s^* alpha)_q - alpha_q| over components."""
    p = _lift(q)
    return float(np.max(np.abs(pulled_back_alpha(f, p, s) - f.alpha_field(p))))


@dataclass(frozen=True)
class FredholmReport:
    family: str
    base: TorusPoint
    s_max: float
    samples: int
    supremum: float
    argmax: tuple[float, ...]
    violated: bool
    cosine_identity_residual: float
    tol: float = FREDHOLM_TOL

    @property
    def first_argmax(self) -> float:
        return self.argmax[0]


def fredholm_scan(
    f: ContactFamily,
    q: TorusPoint,
    s_max: float,
    samples: int = 4096,
    tol: float = FREDHOLM_TOL,
) -> FredholmReport:
    """Scan g(s) = (phi_s^* alpha)(xi) on (0, s_max] and locate its supremum.

    Interior local maxima of the sampled curve are refined with a bounded
    Brent search; the left end of the window is left unrefined because the
    supremum there is approached only as s -> 0, which is excluded.
    """
    if s_max <= 0 or samples < 2:
        raise ValueError("need s_max > 0 and samples >= 2")
    p = q.as_array()
    grid = s_max * np.arange(1, samples + 1) / samples
    g = transported_alpha_on_reeb(f, p, grid)
    identity_residual = float(np.max(np.abs(g - np.cos(grid))))

    def value(s):
        return float(transported_alpha_on_reeb(f, p, s))

    def slope(s):
        return (value(s + SLOPE_STEP) - value(s - SLOPE_STEP)) / (2 * SLOPE_STEP)

    # (s, value, refined); a maximum is flat, so its position is pinned down
    # as a zero of the slope rather than by comparing values near 1
    cands = [(float(grid[0]), float(g[0]), False), (float(grid[-1]), float(g[-1]), False)]
    for i in range(1, samples - 1):
        if g[i] >= g[i - 1] and g[i] >= g[i + 1]:
            lo, hi = float(grid[i - 1]), float(grid[i + 1])
            if slope(lo) > 0 > slope(hi):
                s = brentq(slope, lo, hi, xtol=1e-14, rtol=1e-15)
            else:
                s = float(
                    minimize_scalar(lambda u: -value(u), bounds=(lo, hi), method="bounded",
                                    options={"xatol": 1e-12}).x
                )
            cands.append((float(grid[i]), float(g[i]), False))
            cands.append((s, value(s), True))
    sup = max(v for _, v, _ in cands)
    top = sorted((c for c in cands if c[1] >= sup - tol), key=lambda c: c[0])
    argmax = []
    for s, _, refined in top:
        if argmax and s - argmax[-1][0] < ARGMAX_MERGE:
            if refined and not argmax[-1][1]:
                argmax[-1] = (s, refined)
            continue
        argmax.append((s, refined))
    argmax = [s for s, _ in argmax]
    return FredholmReport(
        family=f.descriptor(),
        base=q,
        s_max=float(s_max),
        samples=samples,
        supremum=sup,
        argmax=tuple(argmax),
        violated=bool(sup >= 1.0 - tol),
        cosine_identity_residual=identity_residual,
        tol=tol,
    )


@dataclass(frozen=True)
class ConjugatePoint:
    s: float
    point: TorusPoint
    z_shift: float
    winding: int
    same_fiber: bool
    residual: float


@dataclass(frozen=True)
class ConjugatePointList:
    family: str
    base: TorusPoint
    window: float
    points: tuple[ConjugatePoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def conjugate_points(
    f: ContactFamily,
    q: TorusPoint,
    window: float | None = None,
    resolution: int = 1024,
) -> ConjugatePointList:
    """All s in (0, window] whose v-image of q is conjugate to q.

    The angle gain G(s) = theta(z_s) - theta(z) is increasing in s, so the
    targets G = 2 pi k are bracketed on a grid of ``resolution`` cells and
    then polished with Brent's method.  ``window`` defaults to one fiber turn.
    """
    if window is None:
        window = f.fiber_period
    if window <= 0:
        raise ValueError("window must be positive")
    z0 = q.z
    t0 = f.angle(z0)

    def gain(s):
        return f.angle(f.advance(z0, s)) - t0

    grid = window * np.arange(resolution + 1) / resolution
    gains = np.asarray(gain(grid), dtype=float)
    top = gains[-1]
    points = []
    k = 1
    while TWO_PI * k <= top + CONJUGACY_TOL:
        target = TWO_PI * k
        i = int(np.searchsorted(gains, target))
        if i > resolution:
            # the target sits on the window edge up to round-off
            s = float(window)
        elif gains[i] == target:
            s = float(grid[i])
        else:
            s = brentq(lambda u: gain(u) - target, grid[i - 1], grid[i], xtol=1e-13, rtol=1e-15)
        z_s = f.advance(z0, s)
        shift = float(z_s - z0)
        points.append(
            ConjugatePoint(
                s=float(s),
                point=normalize((q.x, q.y, z_s), f.gluing),
                z_shift=shift,
                winding=k,
                same_fiber=abs(shift - TWO_PI * round(shift / TWO_PI)) < CONJUGACY_TOL,
                residual=conjugacy_residual(f, q, s),
            )
        )
        k += 1
    return ConjugatePointList(f.descriptor(), q, float(window), tuple(points))


def fiber_turn_time(f: ContactFamily) -> float:
    """v-flow time for z to advance by exactly 2 pi."""
    return f.fiber_period


def is_characteristic(f: ContactFamily, q, length: float, samples: int = 256, tol: float = 1e-9) -> bool:
    """Does v turn a nonzero whole number of half revolutions along a xi-piece?

    v is transported by d psi_s and its angle is measured in the frame
    (v, [xi, v]) of ker alpha at the end point.  For these families
    d psi_s v = v - s [xi, v], a shear whose angle stays in (-pi/2, pi/2),
    so the answer is always no; the check is kept so new families are
    caught.
    """
    p = _lift(q)
    angles = []
    for s in np.linspace(0.0, length, samples + 1):
        moved = _transport_v_along_reeb(f, p, float(s))
        end = psi_lift(f, p, float(s))
        v_end = f.v_field(end)
        t = f.angle(end[2])
        bracket = np.array([math.sin(t), -math.cos(t), 0.0])
        # coordinates of the transported vector in the (v, [xi, v]) frame
        c_v = moved[2] / v_end[2]
        c_b = float((moved - c_v * v_end) @ bracket)
        angles.append(math.atan2(c_b, c_v))
    total = float(np.unwrap(angles)[-1] - angles[0])
    half_turns = round(total / math.pi)
    return half_turns != 0 and abs(total - half_turns * math.pi) < tol


def _transport_v_along_reeb(f: ContactFamily, p: np.ndarray, s: float, eps: float = 1e-6) -> np.ndarray:
    """d psi_s applied to v, by central differences along v."""
    v = f.v_field(p)
    return (psi_lift(f, p + eps * v, s) - psi_lift(f, p - eps * v, s)) / (2.0 * eps)
