"""Integer chain complexes, Smith normal form, and the Z_k reduction.

The complex of a class g has the symmetry-broken generators of the orbit
circles in degrees 0 (minima) and 1 (maxima).  The boundary between them is
certified zero by :func:`torus_contact.infinity.boundary_split_check`, and
homology is still computed over Z through Smith normal form so that the
absence of torsion is checked rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .contact import ContactFamily, Linear
from .errors import ContactHomologyError, NotAComplexError, NotEquivariantError
from .infinity import BoundarySplitReport, boundary_split_check, tower_configs
from .manifold import TWO_PI, HomotopyClass2, circular_distance, wrap_angle
from .orbits import Generator, OrbitCircle, enumerate_orbits, generators_of

Matrix = list[list[int]]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U M V = S, U and V unimodular.

    S is diagonal with non-negative entries d_1 | d_2 | ... .  Entries are
    Python ints throughout, so intermediate growth cannot overflow.
    """
    arr = np.array(M, dtype=object)
    if arr.ndim != 2:
        arr = arr.reshape(len(arr), -1) if arr.size else arr.reshape(0, 0)
    m, n = arr.shape
    A = [[int(x) for x in row] for row in arr]
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in (A, V):
            for row in R:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):  # col_dst += c * col_src
        for R in (A, V):
            for row in R:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        nonzero = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
            rest = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if rest:
                # a remainder smaller than the pivot survived: make it the pivot
                _, k, kind = min(rest)
                swap_rows(t, k) if kind == "r" else swap_cols(t, k)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-u for u in U[t]]
    return U, A, V


def invariant_factors(M) -> list[int]:
    """Nonzero diagonal of the Smith normal form."""
    _, S, _ = smith_normal_form(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    rank: int
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def _ident(g) -> str:
    return g.ident if isinstance(g, Generator) else str(g)


@dataclass(eq=False)
class ChainComplexZ:
    """Generators per degree and boundaries D_k: C_k -> C_{k-1}.

    ``boundaries[k]`` has one row per generator of degree k-1 and one column
    per generator of degree k.  Missing degrees are zero maps.
    """

    generators: dict[int, list] = field(default_factory=dict)
    boundaries: dict[int, np.ndarray] = field(default_factory=dict)
    family: ContactFamily | None = None
    g: HomotopyClass2 | None = None
    certificate: BoundarySplitReport | None = None

    def __post_init__(self):
        for k, D in list(self.boundaries.items()):
            D = np.asarray(D, dtype=np.int64).reshape(len(self.gens(k - 1)), len(self.gens(k)))
            self.boundaries[k] = D

    def gens(self, k: int) -> list:
        return self.generators.get(k, [])

    def ids(self, k: int) -> list[str]:
        return [_ident(g) for g in self.gens(k)]

    def boundary(self, k: int) -> np.ndarray:
        if k in self.boundaries:
            return self.boundaries[k]
        return np.zeros((len(self.gens(k - 1)), len(self.gens(k))), dtype=np.int64)

    @property
    def degrees(self) -> range:
        ks = [k for k, v in self.generators.items() if v]
        if not ks:
            return range(0)
        return range(min(ks), max(ks) + 1)

    def counts(self) -> dict[int, int]:
        return {k: len(self.gens(k)) for k in self.degrees}

    def squares_vanish(self) -> bool:
        for k in self.degrees:
            if np.any(self.boundary(k - 1) @ self.boundary(k)):
                return False
        return True

    def same_as(self, other: "ChainComplexZ") -> bool:
        ks = set(self.degrees) | set(other.degrees)
        return all(
            self.ids(k) == other.ids(k) and np.array_equal(self.boundary(k), other.boundary(k))
            for k in ks
        )


def _rank(D: np.ndarray) -> int:
    if D.size == 0:
        return 0
    return len(invariant_factors(D.tolist()))


def homology_of(c: ChainComplexZ, top: int | None = None) -> list[HomologyGroup]:
    """H_k = ker D_k / im D_{k+1} for k = 0 .. top (default: top degree + 1)."""
    if not c.squares_vanish():
        raise NotAComplexError("D_{k-1} D_k != 0")
    deg = c.degrees
    if top is None:
        top = (deg.stop if len(deg) else 0)
    out = []
    for k in range(0, top + 1):
        n_k = len(c.gens(k))
        out_rank = _rank(c.boundary(k))
        d_next = c.boundary(k + 1)
        factors = invariant_factors(d_next.tolist()) if d_next.size else []
        free = n_k - out_rank - len(factors)
        out.append(HomologyGroup(k, free, tuple(d for d in factors if d > 1)))
    return out


def euler_characteristic(c: ChainComplexZ) -> int:
    return sum((-1) ** k * len(c.gens(k)) for k in c.degrees)


def build_complex(f: ContactFamily, g: HomotopyClass2) -> ChainComplexZ:
    """The complex of class g: one min and one max per orbit circle."""
    circles = enumerate_orbits(f, g)
    gens = generators_of(circles)
    configs = [cfg for c in circles for cfg in tower_configs(c)]
    cert = boundary_split_check(gens, configs)
    if not (cert.certified and cert.is_zero and cert.d_per_squared_zero):
        raise ContactHomologyError(f"boundary certificate failed for {f.descriptor()} class {g}")
    mins = [x for x in gens if x.morse_index == 0]
    maxs = [x for x in gens if x.morse_index == 1]
    return ChainComplexZ(
        generators={0: mins, 1: maxs},
        boundaries={1: np.array(cert.d_per, dtype=np.int64).reshape(len(mins), len(maxs))},
        family=f,
        g=g,
        certificate=cert,
    )


@dataclass(eq=False)
class ChainMap:
    source: ChainComplexZ
    target: ChainComplexZ
    matrices: dict[int, np.ndarray]

    def matrix(self, k: int) -> np.ndarray:
        if k in self.matrices:
            return self.matrices[k]
        return np.zeros((len(self.target.gens(k)), len(self.source.gens(k))), dtype=np.int64)

    def commutes(self) -> bool:
        """target D_k o f_k == f_{k-1} o source D_k in every degree."""
        ks = set(self.source.degrees) | set(self.target.degrees)
        ks |= {k + 1 for k in ks}
        return all(
            np.array_equal(
                self.target.boundary(k) @ self.matrix(k),
                self.matrix(k - 1) @ self.source.boundary(k),
            )
            for k in ks
        )

    def then(self, other: "ChainMap") -> "ChainMap":
        """Composite other o self."""
        ks = set(self.matrices) | set(other.matrices)
        return ChainMap(self.source, other.target, {k: other.matrix(k) @ self.matrix(k) for k in ks})

    def equals(self, other: "ChainMap") -> bool:
        ks = set(self.matrices) | set(other.matrices)
        return all(np.array_equal(self.matrix(k), other.matrix(k)) for k in ks)

    def is_orbit_projection(self) -> bool:
        return all(
            M.size == 0 or (np.all(M.sum(axis=0) == 1) and set(np.unique(M)) <= {0, 1})
            for M in self.matrices.values()
        )


def _circle_action(circles: Sequence[OrbitCircle], k: int, tol: float) -> list[int]:
    """Index of the circle hit by z -> z + 2 pi / k, for every circle."""
    image = []
    for c in circles:
        z = wrap_angle(c.z_root + TWO_PI / k)
        hits = [d.index for d in circles if circular_distance(d.z_root, z) < tol]
        if len(hits) != 1:
            raise NotEquivariantError(
                f"circle {c.index} at z = {c.z_root} has no image under z -> z + 2 pi/{k}"
            )
        image.append(hits[0])
    return image


def zk_quotient(source: ChainComplexZ, k: int, tol: float = 1e-9) -> tuple[ChainComplexZ, ChainMap]:
    """Quotient of the complex of Linear(k p) by the rotation z -> z + 2 pi/k.

    Orbits of circles are labelled by their smallest circle index and are
    identified with the circles of Linear(p) through z -> k z.  The quotient
    boundary sums the boundary of a lift over all lifts of the target:
    D_q = f_{d-1} D_d restricted to the representative columns.
    """
    f, g = source.family, source.g
    if k < 1:
        raise NotEquivariantError("k must be a positive integer")
    if not isinstance(f, Linear) or g is None:
        raise NotEquivariantError("the Z_k reduction is defined for complexes built over Linear(k p)")
    if f.n % k:
        raise NotEquivariantError(f"alpha_{f.n} is not a lift of a form on the {k}-fold quotient")
    p = f.n // k
    circles = sorted({x.circle.index: x.circle for d in source.degrees for x in source.gens(d)}.items())
    circles = [c for _, c in circles]
    image = _circle_action(circles, k, tol)
    orbit_of = {}
    for c in circles:
        j, orbit = c.index, set()
        while j not in orbit:
            orbit.add(j)
            j = image[j]
        orbit_of[c.index] = min(orbit)
    reps = sorted(set(orbit_of.values()))

    target = build_complex(Linear(p), g)
    target_circles = enumerate_orbits(Linear(p), g)
    rep_to_target = {}
    for r in reps:
        z = wrap_angle(k * circles[r].z_root)
        hits = [t.index for t in target_circles if circular_distance(t.z_root, z) < tol * k]
        if len(hits) != 1:
            raise NotEquivariantError(f"orbit of circle {r} does not match a circle of Linear({p})")
        rep_to_target[r] = hits[0]
    if sorted(rep_to_target.values()) != list(range(len(target_circles))):
        raise NotEquivariantError("orbits of circles do not biject onto the circles of the quotient")

    matrices = {}
    rep_cols = {}
    for d in source.degrees:
        tgt = target.gens(d)
        pos = {(x.circle.index, x.role): i for i, x in enumerate(tgt)}
        M = np.zeros((len(tgt), len(source.gens(d))), dtype=np.int64)
        cols = [None] * len(tgt)
        for col, x in enumerate(source.gens(d)):
            row = pos[(rep_to_target[orbit_of[x.circle.index]], x.role)]
            M[row, col] = 1
            if x.circle.index in rep_to_target:
                cols[row] = col
        matrices[d] = M
        rep_cols[d] = cols

    chain_map = ChainMap(source, None, matrices)
    boundaries = {}
    for d in source.degrees:
        if d - 1 not in matrices:
            continue
        D = source.boundary(d)
        boundaries[d] = matrices[d - 1] @ D[:, rep_cols[d]]
    quotient = ChainComplexZ(
        generators={d: list(target.gens(d)) for d in source.degrees},
        boundaries=boundaries,
        family=target.family,
        g=g,
        certificate=target.certificate,
    )
    chain_map.target = quotient
    return quotient, chain_map


@dataclass(frozen=True)
class EquivariantReport:
    p: int
    k: int
    g: HomotopyClass2
    source_counts: dict
    quotient_counts: dict
    k_to_one: bool
    chain_map_commutes: bool
    orbit_projection: bool
    quotient_squares_vanish: bool
    quotient_matches_target: bool
    quotient_homology: tuple[HomologyGroup, ...]
    target_homology: tuple[HomologyGroup, ...]

    @property
    def homology_matches(self) -> bool:
        return self.quotient_homology == self.target_homology

    def checks(self) -> dict[str, bool]:
        return {
            "k_to_one": self.k_to_one,
            "chain_map_commutes": self.chain_map_commutes,
            "orbit_projection": self.orbit_projection,
            "quotient_squares_vanish": self.quotient_squares_vanish,
            "quotient_matches_target": self.quotient_matches_target,
            "homology_matches": self.homology_matches,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks().values())


def equivariant_reduction(p: int, k: int, g: HomotopyClass2) -> EquivariantReport:
    source = build_complex(Linear(k * p), g)
    quotient, fmap = zk_quotient(source, k)
    target = build_complex(Linear(p), g)
    sc, qc = source.counts(), quotient.counts()
    return EquivariantReport(
        p=p,
        k=k,
        g=g,
        source_counts=sc,
        quotient_counts=qc,
        k_to_one=all(sc.get(d, 0) == k * qc.get(d, 0) for d in set(sc) | set(qc)),
        chain_map_commutes=fmap.commutes(),
        orbit_projection=fmap.is_orbit_projection(),
        quotient_squares_vanish=quotient.squares_vanish(),
        quotient_matches_target=quotient.same_as(target),
        quotient_homology=tuple(homology_of(quotient)),
        target_homology=tuple(homology_of(target)),
    )


@dataclass(frozen=True)
class DiagramReport:
    p: int
    q: int
    g: HomotopyClass2
    squares: dict[str, bool]
    homology_ranks: dict[str, tuple[int, ...]]

    @property
    def all_commute(self) -> bool:
        return all(self.squares.values())


def verify_diagram(p: int, q: int, g: HomotopyClass2) -> DiagramReport:
    """Check the cube of reductions Linear(pq) -> Linear(p), Linear(q) -> Linear(1).

    Composites are compared as integer matrices.  Equal chain maps induce
    equal maps on homology, so the homology faces follow from the chain
    faces together with the boundary squares of each map.
    """
    c_pq = build_complex(Linear(p * q), g)
    c_p = build_complex(Linear(p), g)
    c_q = build_complex(Linear(q), g)
    c_1 = build_complex(Linear(1), g)
    q_p, f_q = zk_quotient(c_pq, q)  # Linear(pq)/Z_q = Linear(p)
    q_q, f_p = zk_quotient(c_pq, p)  # Linear(pq)/Z_p = Linear(q)
    q_1a, g_p = zk_quotient(c_p, p)
    q_1b, g_q = zk_quotient(c_q, q)
    q_1c, f_pq = zk_quotient(c_pq, p * q)
    via_p = f_q.then(g_p)
    via_q = f_p.then(g_q)
    squares = {
        "quotient pq/Z_q = complex(p)": q_p.same_as(c_p),
        "quotient pq/Z_p = complex(q)": q_q.same_as(c_q),
        "quotient p/Z_p = complex(1)": q_1a.same_as(c_1),
        "quotient q/Z_q = complex(1)": q_1b.same_as(c_1),
        "quotient pq/Z_pq = complex(1)": q_1c.same_as(c_1),
        "f^q boundary square": f_q.commutes(),
        "f^p boundary square": f_p.commutes(),
        "f^p on complex(p) boundary square": g_p.commutes(),
        "f^q on complex(q) boundary square": g_q.commutes(),
        "f^pq boundary square": f_pq.commutes(),
        "f^p f^q = f^q f^p": via_p.equals(via_q),
        "f^p f^q = f^pq": via_p.equals(f_pq),
    }
    ranks = {
        name: tuple(h.rank for h in homology_of(c))
        for name, c in (("pq", c_pq), ("p", c_p), ("q", c_q), ("1", c_1))
    }
    return DiagramReport(p, q, g, squares, ranks)
