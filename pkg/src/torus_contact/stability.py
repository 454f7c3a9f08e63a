"""Second variation along a deformation made of small v-jumps.

Near a periodic orbit a competing curve is a xi-orbit with a few
back-and-forth v-jumps.  Pushing the orbit there is a deformation whose
eta coordinate has eta'' = sum +-A_i (delta_{t_i^-} - delta_{t_i^+}),
closed up inside disjoint windows [T_i^-, T_i^+] partitioning [0, 1].  The
second variation int eta'^2 is evaluated three ways: the closed form
sum A_i^2 dt_i (1 - dt_i/dT_i), exact quadrature of the piecewise-linear
eta, and the integrated-by-parts sum +-A_i (eta(t_i^+) - eta(t_i^-)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidWindowError

WINDOW_TOL = 1e-12


@dataclass(frozen=True)
class Jump:
    amplitude: float
    sign: int
    t_minus: float
    t_plus: float

    @property
    def width(self) -> float:
        return self.t_plus - self.t_minus


@dataclass(frozen=True)
class Window:
    T_minus: float
    T_plus: float

    @property
    def width(self) -> float:
        return self.T_plus - self.T_minus


@dataclass(frozen=True)
class DiracDeformation:
    jumps: tuple[Jump, ...]
    windows: tuple[Window, ...]

    def __post_init__(self):
        if len(self.jumps) != len(self.windows) or not self.windows:
            raise InvalidWindowError("need exactly one window per jump and at least one jump")
        if abs(self.windows[0].T_minus) > WINDOW_TOL or abs(self.windows[-1].T_plus - 1.0) > WINDOW_TOL:
            raise InvalidWindowError("windows must cover [0, 1]")
        for prev, nxt in zip(self.windows, self.windows[1:]):
            if abs(prev.T_plus - nxt.T_minus) > WINDOW_TOL:
                raise InvalidWindowError("consecutive windows must share their end points")
        for j, w in zip(self.jumps, self.windows):
            if not w.T_minus < w.T_plus:
                raise InvalidWindowError(f"empty window {w}")
            if j.sign not in (1, -1):
                raise InvalidWindowError(f"jump sign must be +1 or -1, got {j.sign}")
            if not (math.isfinite(j.amplitude) and j.amplitude >= 0):
                raise InvalidWindowError(f"amplitude must be finite and >= 0, got {j.amplitude}")
            if not j.t_minus < j.t_plus:
                raise InvalidWindowError(f"need t- < t+, got {j.t_minus}, {j.t_plus}")
            if j.t_minus < w.T_minus - WINDOW_TOL or j.t_plus > w.T_plus + WINDOW_TOL:
                raise InvalidWindowError(f"jump [{j.t_minus}, {j.t_plus}] leaves window {w}")

    @classmethod
    def single(cls, amplitude, t_minus, t_plus, T_minus=0.0, T_plus=1.0, sign=1):
        return cls((Jump(amplitude, sign, t_minus, t_plus),), (Window(T_minus, T_plus),))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "DiracDeformation":
        """Rows of (A, sign, t-, t+, T-, T+)."""
        jumps, windows = [], []
        for a, sign, tm, tp, Tm, Tp in rows:
            jumps.append(Jump(float(a), int(sign), float(tm), float(tp)))
            windows.append(Window(float(Tm), float(Tp)))
        return cls(tuple(jumps), tuple(windows))

    @classmethod
    def parse(cls, text: str) -> "DiracDeformation":
        rows = []
        for raw in text.splitlines():
            line = raw.strip()
            if line and not line.startswith("#"):
                rows.append([float(x) for x in line.split(",")])
        if any(len(r) != 6 for r in rows):
            raise InvalidWindowError("each jump line needs A,sign,tminus,tplus,Tminus,Tplus")
        return cls.from_rows(rows)

    @classmethod
    def load(cls, path) -> "DiracDeformation":
        return cls.parse(Path(path).read_text())

    @property
    def has_proper_jump(self) -> bool:
        return any(
            j.amplitude > 0 and 0 < j.width < w.width - WINDOW_TOL
            for j, w in zip(self.jumps, self.windows)
        )

    @property
    def balanced(self) -> bool:
        """Global closure: the signed, width-weighted jump amplitudes cancel."""
        total = sum(j.sign * j.amplitude * j.width for j in self.jumps)
        scale = sum(j.amplitude * j.width for j in self.jumps)
        return abs(total) <= 1e-12 * max(scale, 1.0)


@dataclass(frozen=True)
class EtaProfile:
    """Piecewise-linear eta with eta(0) = 0."""

    breakpoints: tuple[float, ...]
    slopes: tuple[float, ...]
    values: tuple[float, ...]

    def __call__(self, t):
        return np.interp(t, self.breakpoints, self.values)

    def closes_per_window(self, d: DiracDeformation, tol: float = 1e-12) -> bool:
        ends = [0.0] + [w.T_plus for w in d.windows]
        vals = self(np.array(ends))
        return bool(np.all(np.abs(vals) <= tol * max(1.0, max(j.amplitude for j in d.jumps))))


def eta_from_jumps(d: DiracDeformation) -> EtaProfile:
    """eta' = +-A_i (1_[t-, t+] - rho_i) on window i, rho_i = dt_i / dT_i."""
    points = [0.0]
    slopes = []
    for j, w in zip(d.jumps, d.windows):
        rho = j.width / w.width
        lo = -j.sign * j.amplitude * rho
        hi = j.sign * j.amplitude * (1.0 - rho)
        for end, slope in ((j.t_minus, lo), (j.t_plus, hi), (w.T_plus, lo)):
            if end > points[-1]:
                points.append(end)
                slopes.append(slope)
    values = [0.0]
    for a, b, s in zip(points, points[1:], slopes):
        values.append(values[-1] + s * (b - a))
    return EtaProfile(tuple(points), tuple(slopes), tuple(values))


def second_variation_closed(d: DiracDeformation) -> float:
    return float(
        sum(
            j.amplitude**2 * j.width * (1.0 - j.width / w.width)
            for j, w in zip(d.jumps, d.windows)
        )
    )


def second_variation_quadrature(d: DiracDeformation, samples: int = 64) -> float:
    """int eta'^2 from values of eta on a uniform grid merged with all breakpoints.

    eta is linear between consecutive nodes, so the difference quotients are
    its exact derivative and the sum is exact up to round-off.
    """
    if samples < 8:
        raise ValueError("samples must be >= 8")
    prof = eta_from_jumps(d)
    nodes = np.union1d(np.linspace(0.0, 1.0, samples + 1), prof.breakpoints)
    eta = prof(nodes)
    dt = np.diff(nodes)
    keep = dt > 0
    slope = np.diff(eta)[keep] / dt[keep]
    return float(np.sum(slope**2 * dt[keep]))


def second_variation_telescoping(d: DiracDeformation) -> float:
    """sum +-A_i (eta(t_i^+) - eta(t_i^-)), i.e. -int eta eta''."""
    prof = eta_from_jumps(d)
    return float(
        sum(j.sign * j.amplitude * (prof(j.t_plus) - prof(j.t_minus)) for j in d.jumps)
    )


def random_deformation(rng: np.random.Generator, max_jumps: int = 5) -> DiracDeformation:
    k = int(rng.integers(1, max_jumps + 1))
    cuts = np.sort(rng.uniform(0.0, 1.0, k - 1))
    edges = np.concatenate([[0.0], cuts, [1.0]])
    rows = []
    for Tm, Tp in zip(edges[:-1], edges[1:]):
        tm, tp = np.sort(rng.uniform(Tm, Tp, 2))
        rows.append((rng.uniform(0.1, 3.0), rng.choice([-1, 1]), tm, tp, Tm, Tp))
    return DiracDeformation.from_rows(rows)


@dataclass(frozen=True)
class StabilityRow:
    closed: float
    quadrature: float
    telescoping: float
    proper: bool
    balanced: bool

    @property
    def max_relative_gap(self) -> float:
        vals = (self.closed, self.quadrature, self.telescoping)
        scale = max(abs(v) for v in vals)
        if scale == 0.0:
            return 0.0
        return (max(vals) - min(vals)) / scale


def evaluate(d: DiracDeformation, samples: int = 64) -> StabilityRow:
    return StabilityRow(
        closed=second_variation_closed(d),
        quadrature=second_variation_quadrature(d, samples),
        telescoping=second_variation_telescoping(d),
        proper=d.has_proper_jump,
        balanced=d.balanced,
    )
