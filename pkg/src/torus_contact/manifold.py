"""Points, gluing and winding bookkeeping on T^3 and on torus bundles Y_A.

A torus bundle Y_A is T^2 x R modulo (x, y, z) ~ (A(x, y), z + 2 pi).  With
A the identity this is plain T^3.  Points are stored as angles reduced into
[0, 2 pi); curves are handled through their lifts to R^3 so that windings
are read off from displacements instead of being reconstructed afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidCoordinateError, NotALoopError, UnsupportedGluingError

TWO_PI = 2.0 * math.pi
POINT_TOL = 1e-9


def wrap_angle(t: float) -> float:
    """Reduce an angle into [0, 2 pi)."""
    r = math.fmod(t, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2 pi
    if r >= TWO_PI:
        r = 0.0
    return r


def circular_distance(a: float, b: float) -> float:
    d = abs(wrap_angle(a) - wrap_angle(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class TorusPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise InvalidCoordinateError(f"non-finite coordinate in {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def close_to(self, other: "TorusPoint", tol: float = POINT_TOL) -> bool:
        return all(
            circular_distance(a, b) < tol
            for a, b in zip((self.x, self.y, self.z), (other.x, other.y, other.z))
        )


@dataclass(frozen=True)
class GluingMatrix:
    """Integer matrix [[a, b], [c, d]] of determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise UnsupportedGluingError(
                f"gluing matrix {self.rows()} is not in SL2(Z)"
            )

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    @property
    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def inverse(self) -> "GluingMatrix":
        return GluingMatrix(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "GluingMatrix") -> "GluingMatrix":
        return GluingMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def power(self, k: int) -> "GluingMatrix":
        base = self if k >= 0 else self.inverse()
        result = IDENTITY
        for _ in range(abs(k)):
            result = result @ base
        return result

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return self.a * x + self.b * y, self.c * x + self.d * y

    @classmethod
    def parse(cls, text: str) -> "GluingMatrix":
        parts = [int(p) for p in text.replace(";", ",").split(",")]
        if len(parts) != 4:
            raise UnsupportedGluingError(f"expected four integers a,b,c,d, got {text!r}")
        return cls(*parts)


IDENTITY = GluingMatrix(1, 0, 0, 1)


@dataclass(frozen=True)
class HomotopyClass2:
    """The class m*xbar + l*ybar in pi_1(T^2)."""

    m: int
    l: int

    @property
    def is_zero(self) -> bool:
        return self.m == 0 and self.l == 0

    def __str__(self) -> str:
        return f"({self.m},{self.l})"

    @classmethod
    def parse(cls, text: str) -> "HomotopyClass2":
        m, l = (int(p) for p in text.split(","))
        return cls(m, l)


@dataclass(frozen=True)
class HomotopyClass3:
    """A class in pi_1(T^3) = Z^3; ``p`` is the winding along the z circle."""

    m: int
    l: int
    p: int

    def __add__(self, other: "HomotopyClass3") -> "HomotopyClass3":
        return HomotopyClass3(self.m + other.m, self.l + other.l, self.p + other.p)


def p3_projection(c: HomotopyClass3) -> int:
    return c.p


def normalize(point, A: GluingMatrix = IDENTITY) -> TorusPoint:
    """Reduce a raw coordinate triple into the fundamental domain of Y_A.

    Every full 2 pi that z is lowered by applies ``A`` to (x, y) once; raising
    z applies the inverse.  Then x and y are reduced mod 2 pi.
    """
    if isinstance(point, TorusPoint):
        x, y, z = point.x, point.y, point.z
    else:
        x, y, z = (float(c) for c in point)
    if not all(math.isfinite(c) for c in (x, y, z)):
        raise InvalidCoordinateError(f"non-finite coordinates {(x, y, z)!r}")

    crossings = math.floor(z / TWO_PI)
    z_red = z - crossings * TWO_PI
    if z_red < 0.0:
        z_red += TWO_PI
        crossings -= 1
    if z_red >= TWO_PI:
        z_red -= TWO_PI
        crossings += 1
    if crossings and not A.is_identity:
        x, y = A.power(crossings).apply(wrap_angle(x), wrap_angle(y))
    return TorusPoint(wrap_angle(x), wrap_angle(y), z_red)


def _as_vertices(vertices: Iterable[Sequence[float]]) -> np.ndarray:
    arr = np.asarray([tuple(float(c) for c in v) for v in vertices], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 or len(arr) < 2:
        raise NotALoopError("a loop needs at least two vertices with three coordinates")
    if not np.all(np.isfinite(arr)):
        raise InvalidCoordinateError("non-finite vertex in polyline")
    return arr


def _check_closed(arr: np.ndarray, A: GluingMatrix, tol: float) -> None:
    start = normalize(arr[0], A)
    end = normalize(arr[-1], A)
    if not start.close_to(end, tol):
        raise NotALoopError(f"polyline does not close: starts at {start}, ends at {end}")


def fiber_winding(vertices, A: GluingMatrix = IDENTITY, tol: float = POINT_TOL) -> int:
    """Net number of signed 2 pi lifts in z of a closed lifted polyline.

    Well defined for every gluing, since the z coordinate is never twisted.
    """
    arr = _as_vertices(vertices)
    _check_closed(arr, A, tol)
    dz = arr[-1, 2] - arr[0, 2]
    p = round(dz / TWO_PI)
    if abs(dz - p * TWO_PI) > max(tol, 1e-12 * abs(dz)):
        raise NotALoopError(f"net z displacement {dz} is not a multiple of 2 pi")
    return int(p)


def class_of_polyline(vertices, A: GluingMatrix = IDENTITY, tol: float = POINT_TOL) -> HomotopyClass3:
    """Winding (m, l, p) of a closed polyline given by its lift to R^3.

    Consecutive vertices are joined by straight segments of the cover, so the
    class is the total displacement divided by 2 pi.  Only defined for A = I;
    for twisted bundles use :func:`fiber_winding`.
    """
    if not A.is_identity:
        raise UnsupportedGluingError(
            "Z^3 decomposition requires the identity gluing; pi_1(Y_A) is a semidirect product"
        )
    arr = _as_vertices(vertices)
    _check_closed(arr, A, tol)
    disp = arr[-1] - arr[0]
    counts = []
    for d in disp:
        k = round(d / TWO_PI)
        if abs(d - k * TWO_PI) > max(tol, 1e-12 * abs(d)):
            raise NotALoopError(f"displacement {disp} is not a lattice vector")
        counts.append(int(k))
    return HomotopyClass3(*counts)
