"""Critical points at infinity: alternating xi/v configurations.

A configuration is a periodic orbit cut open at a few points, with pieces of
v-orbit inserted.  Only the xi-pieces carry action (alpha(v) = 0).  A
configuration is a "true" critical point at infinity when every v-jump joins
conjugate points; a full v-cycle adds a pure fiber winding, so the P3
projection decides whether it can meet a periodic orbit at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidConfigError
from .flows import (
    CONJUGACY_TOL,
    conjugacy_residual,
    is_characteristic,
    phi_lift,
    psi_lift,
    pulled_back_alpha,
)
from .manifold import TWO_PI, HomotopyClass3, class_of_polyline
from .orbits import Generator, OrbitCircle

TRUE_CPI = "true_cpi"
CHARACTERISTIC = "characteristic"
NOT_CRITICAL = "not_critical"


@dataclass(frozen=True)
class Piece:
    kind: str  # "xi" or "v"
    length: float  # xi: action a_i >= 0; v: signed flow time


@dataclass(frozen=True)
class VCycle:
    t: float  # attachment parameter on the base orbit, in [0, 1)
    k: int  # signed number of turns around the fiber


@dataclass(frozen=True)
class InfinityConfig:
    base: OrbitCircle
    pieces: tuple[Piece, ...]
    v_cycles: tuple[VCycle, ...] = ()
    start: float = 0.0  # base-orbit parameter where the first piece begins

    def __post_init__(self):
        if not self.pieces:
            raise InvalidConfigError("a configuration needs at least one piece")
        kinds = [p.kind for p in self.pieces]
        if any(k not in ("xi", "v") for k in kinds):
            raise InvalidConfigError(f"unknown piece kind in {kinds}")
        if len(kinds) == 1:
            if kinds[0] != "xi":
                raise InvalidConfigError("a single-piece configuration must be a xi-piece")
        elif len(kinds) % 2 or any(kinds[i] == kinds[i - 1] for i in range(len(kinds))):
            raise InvalidConfigError(f"pieces must alternate xi/v around the loop: {kinds}")
        for p in self.pieces:
            if p.kind == "xi" and not p.length >= 0.0:
                raise InvalidConfigError(f"xi-piece with negative action {p.length}")
        for c in self.v_cycles:
            if not 0.0 <= c.t < 1.0:
                raise InvalidConfigError(f"attachment parameter {c.t} outside [0, 1)")
            if int(c.k) != c.k or c.k == 0:
                raise InvalidConfigError(f"iteration count must be a nonzero integer, got {c.k}")

    @classmethod
    def plain(cls, base: OrbitCircle) -> "InfinityConfig":
        return cls(base, (Piece("xi", base.action),))

    @classmethod
    def from_cycles(cls, base: OrbitCircle, cycles: Sequence[tuple[float, int]]) -> "InfinityConfig":
        """Attach full v-cycles of k_i fiber turns at parameters t_i."""
        if not cycles:
            return cls.plain(base)
        cyc = tuple(sorted((VCycle(float(t), int(k)) for t, k in cycles), key=lambda c: c.t))
        turn = base.family.fiber_period
        pieces = []
        for i, c in enumerate(cyc):
            nxt = cyc[i + 1].t if i + 1 < len(cyc) else cyc[0].t + 1.0
            pieces.append(Piece("v", c.k * turn))
            pieces.append(Piece("xi", base.action * (nxt - c.t)))
        return cls(base, tuple(pieces), cyc, start=cyc[0].t)

    @property
    def family(self):
        return self.base.family

    def realize(self) -> np.ndarray:
        """Lifted polyline: one vertex per piece boundary."""
        f = self.family
        p = psi_lift(f, self.base.start(), self.base.action * self.start)
        verts = [p]
        for piece in self.pieces:
            if piece.kind == "xi":
                p = psi_lift(f, p, piece.length)
            else:
                p = phi_lift(f, p, piece.length)
            verts.append(p)
        return np.array(verts)

    def v_jumps(self) -> list[tuple[np.ndarray, float]]:
        """(start point, flow time) of every v-piece along the realization."""
        verts = self.realize()
        return [
            (verts[i], piece.length)
            for i, piece in enumerate(self.pieces)
            if piece.kind == "v"
        ]

    def xi_pieces(self) -> list[tuple[np.ndarray, float]]:
        verts = self.realize()
        return [
            (verts[i], piece.length)
            for i, piece in enumerate(self.pieces)
            if piece.kind == "xi"
        ]


def j_infinity(c: InfinityConfig) -> float:
    return float(sum(p.length for p in c.pieces if p.kind == "xi"))


def p3_of_config(c: InfinityConfig) -> int:
    return int(sum(cyc.k for cyc in c.v_cycles))


def realized_class(c: InfinityConfig) -> HomotopyClass3:
    return class_of_polyline(c.realize(), c.family.gluing)


@dataclass(frozen=True)
class CpiClassification:
    verdict: str
    same_fiber: tuple[bool, ...]
    residuals: tuple[float, ...]
    index_lower_bound: int
    diagnostic: str = ""


def _preserves_kernel(f, q, s, tol) -> bool:
    """Is (phi_s^* alpha)_q a positive or negative multiple of alpha_q?"""
    a = f.alpha_field(q)
    b = pulled_back_alpha(f, q, s)
    return float(np.max(np.abs(np.cross(a, b)))) < tol


def classify(c: InfinityConfig, tol: float = CONJUGACY_TOL) -> CpiClassification:
    f = c.family
    jumps = c.v_jumps()
    residuals, same_fiber, conj = [], [], []
    for q, s in jumps:
        r = conjugacy_residual(f, q, s)
        z_shift = float(f.advance(q[2], s) - q[2])
        residuals.append(r)
        same_fiber.append(abs(z_shift - TWO_PI * round(z_shift / TWO_PI)) < tol)
        conj.append(s != 0.0 and r < tol)
    if not jumps:
        return CpiClassification(
            NOT_CRITICAL, (), (), 0, diagnostic="no v-pieces: an ordinary periodic orbit"
        )
    bound = 1
    if all(conj):
        return CpiClassification(TRUE_CPI, tuple(same_fiber), tuple(residuals), bound)
    characteristic = all(is_characteristic(f, q, a) for q, a in c.xi_pieces()) and all(
        _preserves_kernel(f, q, s, tol) for q, s in jumps
    )
    if characteristic:
        return CpiClassification(CHARACTERISTIC, tuple(same_fiber), tuple(residuals), bound)
    bad = [i for i, ok in enumerate(conj) if not ok]
    return CpiClassification(
        NOT_CRITICAL,
        tuple(same_fiber),
        tuple(residuals),
        bound,
        diagnostic=f"v-jumps {bad} do not join conjugate points; no xi-piece is characteristic",
    )


def can_interact(c: InfinityConfig, x: OrbitCircle) -> bool:
    return p3_of_config(c) == 0 and c.base.g == x.g


def tower_configs(circle: OrbitCircle) -> list[InfinityConfig]:
    """A few critical points at infinity sitting above a periodic orbit."""
    return [
        InfinityConfig.from_cycles(circle, [(0.0, 1)]),
        InfinityConfig.from_cycles(circle, [(0.5, -1)]),
        InfinityConfig.from_cycles(circle, [(0.25, 1), (0.75, -1)]),
        InfinityConfig.from_cycles(circle, [(0.1, 2), (0.6, -1)]),
    ]


@dataclass(frozen=True)
class BoundarySplitReport:
    index1: tuple[str, ...]
    index0: tuple[str, ...]
    d_per: tuple[tuple[int, ...], ...]  # rows: index-0 generators, cols: index-1
    d_per_squared_zero: bool
    pairs_on_same_circle: int
    pairs_on_distinct_circles: int
    excluded: tuple[tuple[str, str], ...] = field(default=())
    certified: bool = True

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for row in self.d_per for v in row)


def boundary_split_check(
    generators: Sequence[Generator], configs: Sequence[InfinityConfig] = ()
) -> BoundarySplitReport:
    """Certify that the periodic part of the boundary vanishes.

    Between the min and max of one circle there are two flow lines of
    opposite orientation, which cancel.  Distinct circles of one class lie on
    the same action level, so no decreasing flow line joins them.  Critical
    points at infinity either sit in another class of pi_1(T^3) (P3 != 0) or
    have index >= 1 above the strict index 0 of the periodic orbits.
    """
    classes = {g.g for g in generators}
    if len(classes) > 1:
        raise ValueError(f"generators come from several classes: {sorted(map(str, classes))}")
    idx0 = [g for g in generators if g.morse_index == 0]
    idx1 = [g for g in generators if g.morse_index == 1]
    certified = len(idx0) + len(idx1) == len(generators)
    per_circle: dict[int, list[str]] = {}
    for g in generators:
        per_circle.setdefault(g.circle.index, []).append(g.role)
    certified &= all(sorted(r) == ["max", "min"] for r in per_circle.values())

    same = sum(1 for a in idx1 for b in idx0 if a.circle.index == b.circle.index)
    d_per = tuple(tuple(0 for _ in idx1) for _ in idx0)

    excluded = []
    for cfg in configs:
        label = ",".join(f"{v.k:+d}@{v.t:g}" for v in cfg.v_cycles) or "plain"
        name = f"cpi[g{cfg.base.g}/c{cfg.base.index}/{label}]"
        if classes and cfg.base.g not in classes:
            excluded.append((name, "different class in pi_1(T^2)"))
            continue
        p3 = p3_of_config(cfg)
        if p3 != 0:
            excluded.append((name, f"P3 = {p3} != 0: different class in pi_1(T^3)"))
            continue
        verdict = classify(cfg)
        if verdict.index_lower_bound >= 1:
            excluded.append((name, "index >= 1 exceeds the strict index 0 of periodic orbits"))
        else:
            excluded.append((name, "no v-piece: the periodic orbit itself, counted as generators"))
    # the degree -1 group is empty, so d_0 o d_per is an empty product
    d0 = np.zeros((0, len(idx0)), dtype=np.int64)
    squared = d0 @ np.zeros((len(idx0), len(idx1)), dtype=np.int64)
    return BoundarySplitReport(
        index1=tuple(g.ident for g in idx1),
        index0=tuple(g.ident for g in idx0),
        d_per=d_per,
        d_per_squared_zero=bool(not squared.any()),
        pairs_on_same_circle=same,
        pairs_on_distinct_circles=len(idx0) * len(idx1) - same,
        excluded=tuple(excluded),
        certified=certified,
    )
