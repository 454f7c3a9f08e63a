"""Periodic Reeb orbits per homotopy class, their actions and symmetry breaking.

The Reeb field is horizontal and constant on each torus z = const, so the
orbits in the class m*xbar + l*ybar are the tori on which the Reeb direction
theta(z) equals the direction of (m, l).  Each such torus carries a whole
circle of orbits (translates along [xi, v]); the circle is degenerate for the
action and is replaced by a minimum and a maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .contact import ContactFamily
from .errors import InsufficientResolutionError, UndefinedDirectionError
from .flows import psi_lift
from .manifold import TWO_PI, HomotopyClass2, wrap_angle

ROOT_TOL = 1e-10


def class_direction(g: HomotopyClass2) -> float:
    """Angle of (m, l) in [0, 2 pi)."""
    if g.is_zero:
        raise UndefinedDirectionError("the trivial class has no direction")
    return wrap_angle(math.atan2(g.l, g.m))


@dataclass(frozen=True)
class OrbitCircle:
    family: ContactFamily
    g: HomotopyClass2
    theta: float
    z_root: float
    action: float
    index: int

    @property
    def period(self) -> float:
        # alpha(xi) = 1, so the Reeb period equals the action
        return self.action

    def start(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.z_root])

    def polyline(self, samples: int = 8) -> np.ndarray:
        """Lifted vertices of the orbit through (0, 0, z_root)."""
        ts = np.linspace(0.0, self.action, samples + 1)
        return psi_lift(self.family, np.tile(self.start(), (len(ts), 1)), ts)


def enumerate_orbits(f: ContactFamily, g: HomotopyClass2) -> list[OrbitCircle]:
    """All heights z in [0, 2 pi) with theta(z) = direction of g mod 2 pi."""
    theta = class_direction(g)
    action = TWO_PI * math.hypot(g.m, g.l)
    t0 = f.angle(0.0)
    period = f.fiber_period
    j = math.ceil((t0 - theta) / TWO_PI)
    roots = []
    while True:
        w = theta + TWO_PI * j
        if w >= t0 + period - 1e-12 * period:
            break
        if w >= t0:
            roots.append(f.advance(0.0, w - t0))
        j += 1
    roots = sorted(wrap_angle(float(z)) for z in roots)
    return [OrbitCircle(f, g, theta, z, action, i) for i, z in enumerate(roots)]


def root_residual(c: OrbitCircle) -> float:
    """Distance of theta(z_root) from the class direction, mod 2 pi."""
    d = wrap_angle(float(c.family.angle(c.z_root)) - c.theta)
    return min(d, TWO_PI - d)


def action_of(c: OrbitCircle, samples: int = 64) -> float:
    """Trapezoidal line integral of alpha along the closed geodesic at z_root."""
    t = np.linspace(0.0, 1.0, samples + 1)
    velocity = np.array([TWO_PI * c.g.m, TWO_PI * c.g.l, 0.0])
    pts = np.column_stack([velocity[0] * t, velocity[1] * t, np.full_like(t, c.z_root)])
    integrand = c.family.alpha_field(pts) @ velocity
    return float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t)))


@dataclass(frozen=True)
class EtaVariation:
    """Samples of a 1-periodic eta at t = i/N, i = 0..N (both endpoints kept)."""

    values: tuple[float, ...]

    @classmethod
    def from_function(cls, fn, grid: int) -> "EtaVariation":
        t = np.linspace(0.0, 1.0, grid + 1)
        return cls(tuple(float(fn(x)) for x in t))

    @property
    def grid(self) -> int:
        return len(self.values) - 1

    @property
    def mean_zero(self) -> bool:
        v = np.asarray(self.values[:-1])
        return abs(float(v.mean())) < 1e-12 * max(1.0, float(np.max(np.abs(v))))

    def mean_adjusted(self) -> "EtaVariation":
        v = np.asarray(self.values)
        return EtaVariation(tuple(v - v[:-1].mean()))


def second_variation(c: OrbitCircle, eta: EtaVariation) -> float:
    """int_0^1 eta'^2 for the piecewise-linear interpolant of eta.

    The general second variation carries a - a^2 tau eta^2 term; tau vanishes
    identically for both families, so only the kinetic part is left.
    """
    if eta.grid < 4:
        raise InsufficientResolutionError("eta needs at least 4 grid cells")
    v = np.asarray(eta.values, dtype=float)
    if abs(v[0] - v[-1]) > 1e-9 * max(1.0, float(np.max(np.abs(v)))):
        raise ValueError("eta is not periodic: eta(0) != eta(1)")
    n = eta.grid
    slopes = np.diff(v) * n
    return float(np.sum(slopes**2) / n)


@dataclass(frozen=True)
class Generator:
    circle: OrbitCircle
    role: str
    morse_index: int

    @property
    def g(self) -> HomotopyClass2:
        return self.circle.g

    @property
    def key(self) -> tuple[int, int, int, str]:
        return (self.g.m, self.g.l, self.circle.index, self.role)

    @property
    def ident(self) -> str:
        return f"g{self.g}/c{self.circle.index}/{self.role}"

    def __repr__(self) -> str:
        return f"Generator({self.ident}, index={self.morse_index})"


def break_symmetry(c: OrbitCircle) -> tuple[Generator, Generator]:
    """Minimum (index 0) and maximum (index 1) replacing a critical circle."""
    return Generator(c, "min", 0), Generator(c, "max", 1)


def generators_of(circles: Sequence[OrbitCircle]) -> list[Generator]:
    out = []
    for c in circles:
        out.extend(break_symmetry(c))
    return out
