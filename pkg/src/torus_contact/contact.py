"""Contact frames of the linear family on T^3 and of Giroux forms on Y_A.

Both families have the shape

    alpha = cos(theta(z)) dx + sin(theta(z)) dy

with theta(z) = n z (linear) or theta = h(z) for a strictly increasing h
(Giroux).  All frame quantities only depend on z, which is what makes the
closed forms below short.  Vector fields are evaluated on lifted coordinates
in R^3 and are vectorised over a trailing axis of length 3.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateDerivativeError, InvalidFamilyError, RangeError
from .manifold import IDENTITY, TWO_PI, GluingMatrix, TorusPoint

CLOSED_FORM_TOL = 1e-9
FD_TOL = 1e-6
BRACKET_STEP = 1e-5
# nested brackets difference an already differenced field: the inner round-off
# (~1e-10 once h(z) is of order 10) is divided by the outer step again, so the
# outer step is taken near the point where truncation and round-off balance
NESTED_BRACKET_STEP = 1e-3
MIN_DERIVATIVE = 1e-12


class MonotoneFunction(ABC):
    """A strictly increasing h: R -> R with h(z + 2 pi) - h(z) constant."""

    @property
    @abstractmethod
    def offset(self) -> float:
        """h(z + 2 pi) - h(z)."""

    @abstractmethod
    def value(self, z):
        ...

    @abstractmethod
    def derivative(self, z):
        ...

    @abstractmethod
    def inverse(self, w):
        ...

    def advance(self, z, s):
        """The z' with h(z') = h(z) + s."""
        return self.inverse(self.value(z) + s)

    @abstractmethod
    def describe(self) -> str:
        ...


@dataclass(frozen=True)
class ParametricH(MonotoneFunction):
    """h(z) = n z + amplitude * sin(frequency * z)."""

    n: int
    amplitude: float = 0.0
    frequency: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidFamilyError(f"slope n must be a positive integer, got {self.n}")
        if int(self.frequency) != self.frequency or self.frequency < 1:
            raise InvalidFamilyError(f"frequency must be a positive integer, got {self.frequency}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise InvalidFamilyError(f"amplitude must be finite and >= 0, got {self.amplitude}")
        if self.amplitude * self.frequency >= self.n:
            raise InvalidFamilyError(
                f"h is not strictly increasing: amplitude*frequency = "
                f"{self.amplitude * self.frequency} >= n = {self.n}"
            )

    @property
    def offset(self) -> float:
        return TWO_PI * self.n

    def value(self, z):
        if self.amplitude == 0.0:
            return self.n * z
        return self.n * z + self.amplitude * np.sin(self.frequency * z)

    def derivative(self, z):
        if self.amplitude == 0.0:
            return self.n + 0.0 * z
        return self.n + self.amplitude * self.frequency * np.cos(self.frequency * z)

    def inverse(self, w):
        if self.amplitude == 0.0:
            return w / self.n
        w = np.asarray(w, dtype=float)
        # |h(z) - n z| <= amplitude brackets the root
        lo = (w - self.amplitude) / self.n
        hi = (w + self.amplitude) / self.n
        z = w / self.n
        for _ in range(100):
            r = self.value(z) - w
            done = np.abs(r) <= 4e-16 * np.maximum(1.0, np.abs(w))
            if np.all(done):
                break
            lo = np.where(r < 0, z, lo)
            hi = np.where(r > 0, z, hi)
            step = z - r / self.derivative(z)
            outside = (step <= lo) | (step >= hi)
            z = np.where(done, z, np.where(outside, 0.5 * (lo + hi), step))
        return z if z.ndim else float(z)

    def advance(self, z, s):
        if self.amplitude == 0.0:
            return z + s / self.n
        return self.inverse(self.value(z) + s)

    def describe(self) -> str:
        return f"{self.n}*z+{self.amplitude!r}*sin({self.frequency}*z)"


@dataclass(frozen=True, eq=False)
class SampledH(MonotoneFunction):
    """Tabulated h on [0, 2 pi] extended by h(z + 2 pi) = h(z) + offset.

    Interpolation is monotone cubic (PCHIP), so a strictly increasing table
    gives a non-decreasing h.  The offset is taken as given, which allows
    tables whose endpoints disagree with it; :func:`check_invariance` is the
    place where such tables show up.
    """

    zs: tuple[float, ...]
    hs: tuple[float, ...]
    offset_value: float
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        zs = np.asarray(self.zs, dtype=float)
        hs = np.asarray(self.hs, dtype=float)
        if zs.shape != hs.shape or zs.ndim != 1 or len(zs) < 2:
            raise InvalidFamilyError("table needs at least two (z, h) pairs")
        if not (np.all(np.isfinite(zs)) and np.all(np.isfinite(hs))):
            raise InvalidFamilyError("table contains non-finite values")
        if abs(zs[0]) > 1e-9 or abs(zs[-1] - TWO_PI) > 1e-9:
            raise InvalidFamilyError("table must run from z = 0 to z = 2 pi")
        if np.any(np.diff(zs) <= 0) or np.any(np.diff(hs) <= 0):
            raise InvalidFamilyError("table must be strictly increasing in both columns")
        if not (math.isfinite(self.offset_value) and self.offset_value > 0):
            raise InvalidFamilyError("offset must be positive")
        zs = zs.copy()
        zs[0], zs[-1] = 0.0, TWO_PI
        object.__setattr__(self, "_interp", PchipInterpolator(zs, hs, extrapolate=True))

    @classmethod
    def from_function(cls, h, offset: float, samples: int = 257) -> "SampledH":
        zs = np.linspace(0.0, TWO_PI, samples)
        return cls(tuple(float(z) for z in zs), tuple(float(h(z)) for z in zs), float(offset))

    @classmethod
    def parse(cls, text: str) -> "SampledH":
        offset = None
        zs, hs = [], []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("offset="):
                offset = float(line.split("=", 1)[1])
                continue
            z, h = line.split(",")
            zs.append(float(z))
            hs.append(float(h))
        if offset is None:
            raise InvalidFamilyError("missing 'offset=<real>' header line")
        return cls(tuple(zs), tuple(hs), offset)

    @classmethod
    def load(cls, path) -> "SampledH":
        return cls.parse(Path(path).read_text())

    def dumps(self) -> str:
        lines = [f"offset={float(self.offset_value)!r}"]
        lines += [f"{float(z)!r},{float(h)!r}" for z, h in zip(self.zs, self.hs)]
        return "\n".join(lines) + "\n"

    @property
    def offset(self) -> float:
        return self.offset_value

    def _split(self, z):
        z = np.asarray(z, dtype=float)
        k = np.floor(z / TWO_PI)
        return k, z - k * TWO_PI

    def value(self, z):
        k, r = self._split(z)
        out = self._interp(r) + k * self.offset_value
        return out if out.ndim else float(out)

    def derivative(self, z):
        _, r = self._split(z)
        out = self._interp(r, 1)
        return out if out.ndim else float(out)

    def inverse(self, w):
        w = np.asarray(w, dtype=float)
        h0, h1 = self.hs[0], self.hs[-1]
        k = np.floor((w - h0) / self.offset_value)
        r = w - k * self.offset_value
        if np.any(r > h1 + 1e-12 * max(1.0, abs(h1))):
            raise RangeError(
                "h inverse requested outside the tabulated range; "
                "table span and offset disagree"
            )
        r = np.minimum(r, h1)
        lo = np.zeros_like(r)
        hi = np.full_like(r, TWO_PI)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self._interp(mid) < r
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) <= 1e-13:
                break
        out = 0.5 * (lo + hi) + k * TWO_PI
        return out if out.ndim else float(out)

    def describe(self) -> str:
        return f"sampled[{len(self.zs)} pts, offset={self.offset_value!r}]"


class ContactFamily(ABC):
    """alpha = cos(theta(z)) dx + sin(theta(z)) dy on T^3 or Y_A."""

    n: int
    gluing: GluingMatrix

    @abstractmethod
    def angle(self, z):
        ...

    @abstractmethod
    def angle_rate(self, z):
        ...

    @abstractmethod
    def advance(self, z, s):
        """Height reached by the flow of v after time s (theta increases by s)."""

    @property
    @abstractmethod
    def fiber_period(self) -> float:
        """theta(z + 2 pi) - theta(z): the v-flow time of one full fiber turn."""

    @abstractmethod
    def descriptor(self) -> str:
        ...

    @property
    def pinching_equality(self) -> bool:
        return abs(self.fiber_period - TWO_PI * (self.n + 1)) <= 1e-12 * self.fiber_period

    def validate(self) -> None:
        period = self.fiber_period
        lo, hi = TWO_PI * self.n, TWO_PI * (self.n + 1)
        slack = 1e-12 * hi
        if not (lo - slack <= period <= hi + slack):
            raise InvalidFamilyError(
                f"pinching 2 pi n <= h(z+2pi) - h(z) <= 2 pi (n+1) fails: "
                f"n = {self.n}, h(z+2pi) - h(z) = {period}"
            )

    # vectorised fields on lifted coordinates, shape (..., 3) -> (..., 3)

    def alpha_field(self, q):
        q = np.asarray(q, dtype=float)
        t = self.angle(q[..., 2])
        return np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=-1)

    def reeb_field(self, q):
        return self.alpha_field(q)

    def beta_field(self, q):
        q = np.asarray(q, dtype=float)
        t = self.angle(q[..., 2])
        return np.stack([-np.sin(t), np.cos(t), np.zeros_like(t)], axis=-1)

    def v_field(self, q):
        q = np.asarray(q, dtype=float)
        rate = np.asarray(self.angle_rate(q[..., 2]), dtype=float)
        if np.any(rate < MIN_DERIVATIVE):
            raise DegenerateDerivativeError(f"h'(z) below {MIN_DERIVATIVE}")
        zero = np.zeros_like(rate)
        return np.stack([zero, zero, 1.0 / rate], axis=-1)

    def dalpha_matrix(self, z: float) -> np.ndarray:
        """W with dalpha(X, Y) = X . W . Y, W_ij = d_i alpha_j - d_j alpha_i."""
        t, r = self.angle(z), self.angle_rate(z)
        s, c = math.sin(t), math.cos(t)
        return r * np.array([[0.0, 0.0, s], [0.0, 0.0, -c], [-s, c, 0.0]])


@dataclass(frozen=True)
class Linear(ContactFamily):
    """alpha_n = cos(n z) dx + sin(n z) dy on T^3."""

    n: int
    gluing: GluingMatrix = field(default=IDENTITY, init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidFamilyError(f"n must be a positive integer, got {self.n}")

    def angle(self, z):
        return self.n * z

    def angle_rate(self, z):
        return self.n + 0.0 * np.asarray(z, dtype=float) if np.ndim(z) else float(self.n)

    def advance(self, z, s):
        return z + s / self.n

    @property
    def fiber_period(self) -> float:
        return TWO_PI * self.n

    def descriptor(self) -> str:
        return f"linear:{self.n}"


@dataclass(frozen=True)
class Giroux(ContactFamily):
    """alpha_h = cos(h(z)) dx + sin(h(z)) dy on Y_A."""

    h: MonotoneFunction
    n: int
    gluing: GluingMatrix = IDENTITY

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidFamilyError(f"n must be a positive integer, got {self.n}")
        self.validate()

    def angle(self, z):
        return self.h.value(z)

    def angle_rate(self, z):
        return self.h.derivative(z)

    def advance(self, z, s):
        return self.h.advance(z, s)

    @property
    def fiber_period(self) -> float:
        return self.h.offset

    def descriptor(self) -> str:
        g = self.gluing
        return f"giroux:n={self.n},h={self.h.describe()},A=[{g.a},{g.b};{g.c},{g.d}]"


def alpha_at(f: ContactFamily, q: TorusPoint) -> np.ndarray:
    return f.alpha_field(q.as_array())


def reeb_at(f: ContactFamily, q: TorusPoint) -> np.ndarray:
    return f.reeb_field(q.as_array())


def v_at(f: ContactFamily, q: TorusPoint) -> np.ndarray:
    return f.v_field(q.as_array())


def beta_at(f: ContactFamily, q: TorusPoint) -> np.ndarray:
    return f.beta_field(q.as_array())


def lie_bracket_fd(field_a, field_b, q, step: float = BRACKET_STEP) -> np.ndarray:
    """Central-difference Lie bracket [a, b] = Db.a - Da.b at q.

    Directional derivatives are differenced along the other field, so a field
    that does not move the coordinates its partner depends on contributes an
    exact zero.
    """
    if not 0.0 < step <= 1e-2:
        raise ValueError(f"step must lie in (0, 1e-2], got {step}")
    q = np.asarray(q.as_array() if isinstance(q, TorusPoint) else q, dtype=float)
    a, b = field_a(q), field_b(q)
    db_a = (field_b(q + step * a) - field_b(q - step * a)) / (2.0 * step)
    da_b = (field_a(q + step * b) - field_a(q - step * b)) / (2.0 * step)
    return db_a - da_b


@dataclass(frozen=True)
class FrameSample:
    point: TorusPoint
    alpha: np.ndarray
    beta: np.ndarray
    xi: np.ndarray
    v: np.ndarray
    bracket_xi_v: np.ndarray
    w: np.ndarray
    tau: float
    mu_bar: float
    # [xi, [xi, v]] + tau v: the part of the double bracket not along v
    tau_defect: float


def frame_at(
    f: ContactFamily,
    q: TorusPoint,
    step: float = BRACKET_STEP,
    nested_step: float = NESTED_BRACKET_STEP,
) -> FrameSample:
    p = q.as_array()
    xi, v = f.reeb_field(p), f.v_field(p)
    beta = f.beta_field(p)

    def bracket(r):
        return lie_bracket_fd(f.reeb_field, f.v_field, r, step)

    b = bracket(p)
    xxv = lie_bracket_fd(f.reeb_field, bracket, p, nested_step)
    vxv = lie_bracket_fd(f.v_field, bracket, p, nested_step)
    tau = -float(xxv @ v) / float(v @ v)
    mu_bar = float(beta @ vxv)
    return FrameSample(
        point=q,
        alpha=f.alpha_field(p),
        beta=beta,
        xi=xi,
        v=v,
        bracket_xi_v=b,
        w=mu_bar * xi - b,
        tau=tau,
        mu_bar=mu_bar,
        tau_defect=float(np.max(np.abs(xxv + tau * v))),
    )


def _volume_coefficients(f: ContactFamily, z: float) -> tuple[float, float]:
    """Coefficients of alpha^dalpha and beta^dbeta against dx^dy^dz.

    For a z-dependent covector g with g_z = 0 the coefficient is
    g . curl g = g_y * g_x' - g_x * g_y'.
    """
    t, r = f.angle(z), f.angle_rate(z)
    s, c = math.sin(t), math.cos(t)
    ax, ay, dax, day = c, s, -r * s, r * c
    bx, by, dbx, dby = -s, c, -r * c, -r * s
    return ay * dax - ax * day, by * dbx - bx * dby


@dataclass(frozen=True)
class StructureReport:
    family: str
    grid_per_axis: int
    reeb_normalization: float
    reeb_in_kernel_of_dalpha: float
    beta_of_reeb: float
    v_in_kernel: float
    volume_equality: float
    volume_coefficient: float
    pairing: float
    beta_of_w: float
    tau_max: float
    tau_defect_max: float
    mu_bar_max: float
    pinching_equality: bool
    closed_form_tol: float = CLOSED_FORM_TOL
    fd_tol: float = FD_TOL

    CLOSED_FORM = (
        "reeb_normalization",
        "reeb_in_kernel_of_dalpha",
        "beta_of_reeb",
        "v_in_kernel",
        "volume_equality",
    )
    FINITE_DIFFERENCE = ("pairing", "beta_of_w", "tau_max", "tau_defect_max", "mu_bar_max")

    def checks(self) -> dict[str, bool]:
        out = {k: getattr(self, k) < self.closed_form_tol for k in self.CLOSED_FORM}
        out.update({k: getattr(self, k) < self.fd_tol for k in self.FINITE_DIFFERENCE})
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks().values())


def verify_structure(
    f: ContactFamily,
    grid_per_axis: int = 8,
    closed_form_tol: float = CLOSED_FORM_TOL,
    fd_tol: float = FD_TOL,
) -> StructureReport:
    """Check alpha(xi) = 1, dalpha(xi, .) = 0, the dual form beta, equal volumes and tau = mu_bar = 0 on a grid."""
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be at least 2")
    f.validate()
    ticks = [TWO_PI * i / grid_per_axis for i in range(grid_per_axis)]
    res = dict.fromkeys(
        [*StructureReport.CLOSED_FORM, *StructureReport.FINITE_DIFFERENCE], 0.0
    )
    vol_coef = 0.0
    for z in ticks:
        W = f.dalpha_matrix(z)
        ca, cb = _volume_coefficients(f, z)
        vol_coef = max(vol_coef, abs(ca))
        for x in ticks:
            for y in ticks:
                fr = frame_at(f, TorusPoint(x, y, z))
                upd = {
                    "reeb_normalization": abs(fr.alpha @ fr.xi - 1.0),
                    "reeb_in_kernel_of_dalpha": float(np.max(np.abs(fr.xi @ W))),
                    "beta_of_reeb": abs(fr.beta @ fr.xi),
                    "v_in_kernel": abs(fr.alpha @ fr.v),
                    "volume_equality": abs(ca - cb),
                    "pairing": abs(fr.v @ W @ fr.bracket_xi_v + 1.0),
                    "beta_of_w": abs(fr.beta @ fr.w - 1.0),
                    "tau_max": abs(fr.tau),
                    "tau_defect_max": fr.tau_defect,
                    "mu_bar_max": abs(fr.mu_bar),
                }
                for k, val in upd.items():
                    res[k] = max(res[k], float(val))
    return StructureReport(
        family=f.descriptor(),
        grid_per_axis=grid_per_axis,
        volume_coefficient=vol_coef,
        pinching_equality=f.pinching_equality,
        closed_form_tol=closed_form_tol,
        fd_tol=fd_tol,
        **res,
    )


@dataclass(frozen=True)
class InvarianceReport:
    invariant: bool
    max_residual: float
    samples: int


def check_invariance(f: ContactFamily, samples: int = 64, tol: float = CLOSED_FORM_TOL) -> InvarianceReport:
    """Pull alpha back along the deck map (x, y, z) -> (A(x, y), z + 2 pi)."""
    A = f.gluing
    zs = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    t0 = np.asarray(f.angle(zs), dtype=float)
    t1 = np.asarray(f.angle(zs + TWO_PI), dtype=float)
    c1, s1 = np.cos(t1), np.sin(t1)
    # f^*(cos T dx + sin T dy) with dx -> a dx + b dy, dy -> c dx + d dy
    pulled_x = A.a * c1 + A.c * s1
    pulled_y = A.b * c1 + A.d * s1
    residual = float(
        max(np.max(np.abs(pulled_x - np.cos(t0))), np.max(np.abs(pulled_y - np.sin(t0))))
    )
    return InvarianceReport(residual < tol, residual, samples)
