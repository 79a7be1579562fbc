"""Finite patches of stepped functions, stepped planes, flips and quasi-planes.

A stepped function maps ``(x, i)`` (``x`` in Z^d, ``i`` in 1..d) to an
integer.  Only finite patches are materialized: a :class:`Patch` stores the
nonzero weights it knows about plus a *certified radius* ``R``; on every
``(x, i)`` with ``||x|| <= R`` the stored weight (0 when absent) is the value
of the underlying, possibly infinite, stepped function.  Planes and flips
are infinite or globally known and exist as specs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

import numpy as np

INF = math.inf

Vector = tuple[int, ...]


class Face(NamedTuple):
    x: Vector
    t: int


def to_fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def norm2(x) -> int:
    return sum(c * c for c in x)


def ceil_norm(x) -> int:
    """Smallest integer >= the Euclidean norm of an integer vector."""
    n = norm2(x)
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def in_ball(x, radius) -> bool:
    """``||x|| <= radius`` decided exactly (radius may be ``INF``)."""
    if radius == INF:
        return True
    if radius < 0:
        return False
    r = Fraction(radius)
    return norm2(x) * r.denominator ** 2 <= r.numerator ** 2


def ball_predicate(radius):
    """Fast reusable form of :func:`in_ball` for a fixed radius."""
    if radius == INF:
        return lambda x: True
    r = Fraction(radius)
    if r < 0:
        return lambda x: False
    num, den2 = r.numerator ** 2, r.denominator ** 2
    return lambda x: sum(c * c for c in x) * den2 <= num


def unit(d: int, i: int) -> Vector:
    return tuple(int(k == i - 1) for k in range(d))


def vadd(x, y) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x, y) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def dot(x, y):
    return sum(a * b for a, b in zip(x, y))


@dataclass(frozen=True)
class Patch:
    d: int
    weights: Mapping[Face, int] = field(default_factory=dict)
    certified_radius: Fraction | float = INF

    def __post_init__(self):
        clean = {}
        for face, w in self.weights.items():
            face = Face(tuple(int(c) for c in face[0]), int(face[1]))
            if len(face.x) != self.d or not 1 <= face.t <= self.d:
                raise ValueError(f"face {face} does not fit dimension {self.d}")
            if w:
                clean[face] = int(w)
        object.__setattr__(self, "weights", clean)
        r = self.certified_radius
        if r != INF:
            r = Fraction(r)
            if r < 0:
                raise ValueError("certified radius must be nonnegative")
        object.__setattr__(self, "certified_radius", r)

    def __getitem__(self, face) -> int:
        return self.weights.get(Face(*face), 0)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.sorted_faces())

    def sorted_faces(self) -> list[Face]:
        return sorted(self.weights)

    def items(self):
        return ((f, self.weights[f]) for f in self.sorted_faces())

    def __add__(self, other: Patch) -> Patch:
        return add(self, other)

    def __neg__(self) -> Patch:
        return Patch(self.d, {f: -w for f, w in self.weights.items()}, self.certified_radius)

    def __sub__(self, other: Patch) -> Patch:
        return add(self, -other)

    def with_radius(self, radius) -> Patch:
        return Patch(self.d, self.weights, radius)

    def restrict(self, radius=None) -> Patch:
        """Faces located in the closed ball (default: the certified one)."""
        radius = self.certified_radius if radius is None else radius
        inside = ball_predicate(radius)
        kept = {f: w for f, w in self.weights.items() if inside(f.x)}
        return Patch(self.d, kept, min(self.certified_radius, radius))

    def certified_items(self):
        inside = ball_predicate(self.certified_radius)
        return [(f, w) for f, w in self.items() if inside(f.x)]

    def is_binary(self, radius=None) -> bool:
        return is_binary(self, radius)

    def agrees_with(self, other: Patch, radius=None) -> bool:
        """Equality of weights on the ball of ``radius`` (default: jointly certified ball)."""
        if radius is None:
            radius = min(self.certified_radius, other.certified_radius)
        return self.restrict(radius).weights == other.restrict(radius).weights


def zero_patch(d: int) -> Patch:
    return Patch(d, {}, INF)


def face_patch(x, i: int, weight: int = 1) -> Patch:
    return Patch(len(x), {Face(tuple(x), i): weight}, INF)


def add(a: Patch, b: Patch) -> Patch:
    if a.d != b.d:
        raise ValueError("dimension mismatch")
    acc = dict(a.weights)
    for f, w in b.weights.items():
        acc[f] = acc.get(f, 0) + w
    return Patch(a.d, acc, min(a.certified_radius, b.certified_radius))


def is_binary(a: Patch, radius=None) -> bool:
    """All stored weights equal 1 (restricted to ``radius`` when given)."""
    inside = ball_predicate(INF if radius is None else radius)
    return all(w == 1 for f, w in a.weights.items() if inside(f.x))


# --- planes ---------------------------------------------------------------

@dataclass(frozen=True)
class PlaneSpec:
    """Stepped plane: ``(x, i)`` has weight 1 iff ``<x|alpha> < rho <= <x + e_i|alpha>``."""

    alpha: tuple[Fraction, ...]
    rho: Fraction = Fraction(0)

    def __post_init__(self):
        alpha = tuple(to_fraction(a) for a in self.alpha)
        if any(a < 0 for a in alpha) or not any(alpha):
            raise ValueError("normal vector must be nonnegative and nonzero")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "rho", to_fraction(self.rho))

    @property
    def d(self) -> int:
        return len(self.alpha)

    def height(self, x) -> Fraction:
        return dot(x, self.alpha)

    def membership(self, x, i: int) -> int:
        return plane_membership(self, x, i)

    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """Scale ``(alpha, rho)`` by a common denominator (same stepped plane)."""
        den = math.lcm(*(a.denominator for a in self.alpha), self.rho.denominator)
        return tuple(int(a * den) for a in self.alpha), int(self.rho * den)


def plane_membership(p: PlaneSpec, x, i: int) -> int:
    h = p.height(x)
    return int(h < p.rho <= h + p.alpha[i - 1])


def ball_points(d: int, radius) -> np.ndarray:
    """All integer points of the closed ball, as an ``(n, d)`` int64 array."""
    r = Fraction(radius)
    if r < 0:
        return np.zeros((0, d), dtype=np.int64)
    k = math.floor(r)
    axis = np.arange(-k, k + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    n2 = (grid * grid).sum(axis=1)
    keep = n2 * r.denominator ** 2 <= r.numerator ** 2
    return grid[keep]


def generate_plane_patch(p: PlaneSpec, radius) -> Patch:
    """All faces of the stepped plane located in the closed ball of ``radius``."""
    radius = to_fraction(radius)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    ints, rho = p.integer_form()
    pts = ball_points(p.d, radius)
    bound = (max(ints) * p.d * (math.floor(radius) + 1) + abs(rho))
    if bound < 2 ** 62:
        a = np.array(ints, dtype=np.int64)
        s = pts @ a
    else:
        a = np.array(ints, dtype=object)
        s = pts.astype(object) @ a
    weights = {}
    for i in range(p.d):
        mask = (s < rho) & (rho <= s + ints[i])
        for row in pts[np.asarray(mask, dtype=bool)]:
            weights[Face(tuple(int(c) for c in row), i + 1)] = 1
    return Patch(p.d, weights, radius)


# --- flips ------------------------------------------------------------------

@dataclass(frozen=True)
class FlipSpec:
    x: Vector
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(c) for c in self.x))
        if self.sign not in (1, -1):
            raise ValueError("flip sign must be +1 or -1")

    def patch(self) -> Patch:
        return make_flip(self.x, self.sign)


def make_flip(x, sign: int = 1, d: int | None = None) -> Patch:
    """``sign * F_x``: +sign on the upper faces ``(x, i)``, -sign on ``(x - e_i, i)``."""
    x = tuple(int(c) for c in x)
    d = len(x) if d is None else d
    weights = {}
    for i in range(1, d + 1):
        weights[Face(x, i)] = sign
        weights[Face(vsub(x, unit(d, i)), i)] = -sign
    return Patch(d, weights, INF)


def add_flips(a: Patch, flips: Iterable[FlipSpec]) -> Patch:
    acc = dict(a.weights)
    for fl in flips:
        for f, w in make_flip(fl.x, fl.sign, a.d).weights.items():
            acc[f] = acc.get(f, 0) + w
    return Patch(a.d, acc, a.certified_radius)


# --- distance -----------------------------------------------------------------

class AgreeUpTo(NamedTuple):
    """Sentinel distance: the patches agree on every ``||x|| < n_max``."""

    n_max: int


def distance(a: Patch, b: Patch, n_max: int) -> Fraction | AgreeUpTo:
    """``2^-r`` with ``r`` the largest ``n <= n_max`` such that both agree on ``||x|| < n``."""
    if a.d != b.d:
        raise ValueError("dimension mismatch")
    for p in (a, b):
        if p.certified_radius < n_max:
            raise ValueError(f"n_max={n_max} exceeds certified radius {p.certified_radius}")
    best = None
    for f in set(a.weights) | set(b.weights):
        if a[f] != b[f]:
            n2 = norm2(f.x)
            if n2 < n_max * n_max and (best is None or n2 < best):
                best = n2
    if best is None:
        return AgreeUpTo(n_max)
    return Fraction(1, 2 ** math.isqrt(best))


# --- quasi-planes ---------------------------------------------------------------

@dataclass(frozen=True)
class QuasiPlaneSpec:
    plane: PlaneSpec
    defect: frozenset = frozenset()

    def __post_init__(self):
        defect = frozenset(tuple(int(c) for c in y) for y in self.defect)
        for y in defect:
            if len(y) != self.plane.d or self.plane.height(y) != self.plane.rho:
                raise ValueError(f"defect point {y} is not on the layer <y|alpha> = rho")
        object.__setattr__(self, "defect", defect)


class DefectRow(NamedTuple):
    """One row of the weight table ``Q = P + [x in D] - [x + e_i in D]``."""

    plane_weight: int
    in_defect: bool
    shifted_in_defect: bool
    value: int


def defect_row(q: QuasiPlaneSpec, x, i: int) -> DefectRow:
    x = tuple(x)
    p = plane_membership(q.plane, x, i)
    a = x in q.defect
    b = vadd(x, unit(q.plane.d, i)) in q.defect
    return DefectRow(p, a, b, p + int(a) - int(b))


class InvalidDefectError(ValueError):
    def __init__(self, face: Face, row: DefectRow):
        super().__init__(f"defect yields weight {row.value} at {face} (table row {row})")
        self.face = face
        self.row = row


def is_valid_defect(q: QuasiPlaneSpec) -> bool:
    """For every ``i`` with ``alpha_i = 0``: every ``y`` in D has ``y - e_i`` in D."""
    d = q.plane.d
    for i, a in enumerate(q.plane.alpha, start=1):
        if a == 0 and any(vsub(y, unit(d, i)) not in q.defect for y in q.defect):
            return False
    return True


def defect_witness(q: QuasiPlaneSpec) -> tuple[Face, DefectRow] | None:
    """A face where the quasi-plane weight leaves {0, 1}, or ``None``."""
    d = q.plane.d
    for y in sorted(q.defect):
        for i in range(1, d + 1):
            for x in (y, vsub(y, unit(d, i))):
                row = defect_row(q, x, i)
                if row.value not in (0, 1):
                    return Face(x, i), row
    return None


def quasi_plane_patch(q: QuasiPlaneSpec, radius) -> Patch:
    if not is_valid_defect(q):
        witness = defect_witness(q)
        if witness is None:
            raise ValueError("defect violates the zero-entry closure condition")
        raise InvalidDefectError(*witness)
    base = generate_plane_patch(q.plane, radius)
    out = add_flips(base, (FlipSpec(y, 1) for y in q.defect))
    return out.restrict(base.certified_radius)
