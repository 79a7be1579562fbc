"""Stepped surfaces in dimension 3: validity, vertices, flips and the
epsilon decomposition between two surfaces.

Projection along ``u = (1, 1, 1)`` onto the antidiagonal plane is encoded by
the integer chart ``(x1 - x3, x2 - x3)``.  In that chart lattice points land
on a triangular lattice whose edges point along ``(1, 0)``, ``(0, 1)`` and
``(1, 1)``, and the projected face of each type is the union of two unit
triangles.  Everything below is integer arithmetic in that chart.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .patch import (
    INF,
    Face,
    FlipSpec,
    Patch,
    PlaneSpec,
    add_flips,
    ball_predicate,
    generate_plane_patch,
    norm2,
    to_fraction,
    unit,
    vadd,
    vsub,
)

Point2 = tuple[int, int]
Triangle = tuple[Point2, Point2, Point2]


class NonBinaryError(ValueError):
    def __init__(self, face: Face, weight: int):
        super().__init__(f"patch is not binary: weight {weight} at {face}")
        self.face = face
        self.weight = weight


def require_binary(a: Patch, radius=None) -> None:
    """Raise :class:`NonBinaryError` on the first weight other than 1 in the ball."""
    inside = ball_predicate(a.certified_radius if radius is None else radius)
    bad = [f for f, w in a.weights.items() if w != 1 and inside(f.x)]
    if bad:
        f = min(bad)
        raise NonBinaryError(f, a[f])


def chart(v) -> Point2:
    return (v[0] - v[2], v[1] - v[2])


def face_vertices(face: Face) -> list[tuple[int, ...]]:
    """Integer corners ``x + e_i + sum_{j in J} e_j`` (``J`` a subset of the other types)."""
    x, i = face
    base = list(x)
    base[i - 1] += 1
    out = [tuple(base)]
    for k in range(len(x)):
        if k != i - 1:
            out += [v[:k] + (v[k] + 1,) + v[k + 1:] for v in out]
    return out


def face_triangles(face: Face) -> tuple[Triangle, Triangle]:
    """The two unit triangles covered by the projection of a d=3 face."""
    x, i = face
    j, k = [m for m in (1, 2, 3) if m != i]
    p = chart(vadd(x, unit(3, i)))
    u = chart(unit(3, j))
    v = chart(unit(3, k))
    pu = (p[0] + u[0], p[1] + u[1])
    pv = (p[0] + v[0], p[1] + v[1])
    puv = (pu[0] + v[0], pu[1] + v[1])
    return tuple(sorted(p_ for p_ in (p, pu, puv))), tuple(sorted(p_ for p_ in (p, pv, puv)))


def triangles_around(q: Point2) -> list[Triangle]:
    """The six unit triangles of the lattice sharing the vertex ``q``."""
    a, b = q
    ring = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]
    out = []
    for s in range(6):
        p1 = (a + ring[s][0], b + ring[s][1])
        p2 = (a + ring[(s + 1) % 6][0], b + ring[(s + 1) % 6][1])
        out.append(tuple(sorted((q, p1, p2))))
    return out


def _within_shrunk(x, radius, margin2: int) -> bool:
    """``||x|| <= radius - sqrt(margin2)``, decided exactly."""
    if radius == INF:
        return True
    r = Fraction(radius)
    if r * r < margin2:
        return False
    # ||x|| + m <= r  <=>  2 m r <= r^2 + m^2 - ||x||^2  (both sides squared once)
    rhs = r * r + margin2 - norm2(x)
    return rhs >= 0 and 4 * margin2 * r * r <= rhs * rhs


class Violation(NamedTuple):
    kind: str  # "overlap" or "gap"
    faces: tuple[Face, ...]
    location: Triangle | Point2


class SurfaceStatus(str, enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class SurfaceReport:
    status: SurfaceStatus
    valid_on_radius: Fraction | float | None
    first_violation: Violation | None = None
    checked_faces: int = 0

    @property
    def valid(self) -> bool:
        return self.status is SurfaceStatus.VALID


COVERAGE_MARGIN2 = 12  # (2 sqrt 3)^2: a face's vertex star lies within 2 sqrt 3 of it


def surface_check_d3(a: Patch) -> SurfaceReport:
    """Check that the certified part of a binary d=3 patch projects injectively
    and without holes onto the antidiagonal plane.

    Overlaps are looked for among all certified faces.  Holes are looked for
    around every vertex of a certified face lying at least ``2 sqrt 3`` inside
    the certified ball: all six lattice triangles around such a vertex must be
    covered, since every face meeting it is itself certified.
    """
    if a.d != 3:
        return SurfaceReport(SurfaceStatus.UNSUPPORTED, None)
    radius = a.certified_radius
    require_binary(a, radius)
    faces = [f for f, _ in a.certified_items()]
    faces.sort(key=lambda f: (norm2(f.x), f))
    owner: dict[Triangle, Face] = {}
    for f in faces:
        for tri in face_triangles(f):
            prev = owner.get(tri)
            if prev is not None:
                return SurfaceReport(SurfaceStatus.INVALID, radius,
                                     Violation("overlap", (prev, f), tri), len(faces))
            owner[tri] = f
    for f in faces:
        if not _within_shrunk(f.x, radius, COVERAGE_MARGIN2):
            continue
        for v in face_vertices(f):
            q = chart(v)
            for tri in triangles_around(q):
                if tri not in owner:
                    return SurfaceReport(SurfaceStatus.INVALID, radius,
                                         Violation("gap", (f,), q), len(faces))
    return SurfaceReport(SurfaceStatus.VALID, radius, None, len(faces))


# --- vertices and heights ----------------------------------------------------

def surface_vertices(a: Patch, radius=None) -> dict[Point2, tuple[int, ...]]:
    """Chart point -> integer vertex, over the faces certified within ``radius``.

    Raises if two vertices share a fiber (the patch is then not a surface).
    """
    inside = ball_predicate(a.certified_radius if radius is None else radius)
    out: dict[Point2, tuple[int, ...]] = {}
    for f, w in a.items():
        if w != 1 or not inside(f.x):
            continue
        for v in face_vertices(f):
            q = chart(v)
            prev = out.setdefault(q, v)
            if prev != v:
                raise ValueError(f"two vertices {prev} and {v} over the same fiber")
    return out


def vertex_points(a: Patch, radius=None) -> list[tuple[int, ...]]:
    return sorted(surface_vertices(a, radius).values())


class Side(enum.IntEnum):
    BELOW = -1
    ON = 0
    ABOVE = 1


def plane_side(p: PlaneSpec, x) -> Side:
    """Position of the lattice point ``x`` against the stepped plane's vertex layer."""
    h = p.height(x)
    if h < p.rho:
        return Side.BELOW
    if h < p.rho + sum(p.alpha):
        return Side.ON
    return Side.ABOVE


def surface_side(heights: dict[Point2, tuple[int, ...]], x) -> Side:
    v = heights.get(chart(x))
    if v is None:
        raise LookupError(f"no certified surface vertex over the fiber of {x}")
    k = x[2] - v[2]
    return Side.ABOVE if k > 0 else Side.ON if k == 0 else Side.BELOW


def _ball_lattice(radius: int):
    r2 = radius * radius
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            for c in range(-radius, radius + 1):
                if a * a + b * b + c * c <= r2:
                    yield (a, b, c)


def pseudo_flip_decomposition(s: Patch, p: PlaneSpec, n_max: int) -> list[FlipSpec]:
    """Signed flips leading from the plane of ``p`` to the surface ``s``.

    ``eps(x) = +1`` when ``x`` is on or above the plane and strictly below
    ``s``; ``-1`` when strictly below the plane and on or above ``s``.
    Flips are listed by nondecreasing ``||x||`` (ties by coordinates).
    """
    if s.d != 3 or p.d != 3:
        raise ValueError("pseudo-flip decomposition is implemented for d = 3")
    if n_max > s.certified_radius:
        raise ValueError(f"n_max={n_max} exceeds certified radius {s.certified_radius}")
    heights = surface_vertices(s)
    out = []
    for x in sorted(_ball_lattice(n_max), key=lambda x: (norm2(x), x)):
        sp = plane_side(p, x)
        try:
            ss = surface_side(heights, x)
        except LookupError as exc:
            raise ValueError(f"radius exceeded: {exc}; use a smaller n_max") from exc
        if sp >= Side.ON and ss is Side.BELOW:
            out.append(FlipSpec(x, 1))
        elif sp is Side.BELOW and ss >= Side.ON:
            out.append(FlipSpec(x, -1))
    return out


def apply_decomposition(p: PlaneSpec, flips: Iterable[FlipSpec], n_max: int) -> Patch:
    """Plane patch plus the flips, certified where every contributing flip is known."""
    base = generate_plane_patch(p, n_max)
    out = add_flips(base, flips)
    return out.restrict(max(Fraction(0), Fraction(n_max) - 1))


# --- flips that keep a surface a surface ----------------------------------------

def flip_kind(a: Patch, x) -> int:
    """+1 if ``+F_x`` keeps ``a`` a surface (x is a lower cube corner), -1 for the
    opposite configuration, 0 otherwise."""
    d = a.d
    lower = [a[(vsub(x, unit(d, i)), i)] for i in range(1, d + 1)]
    upper = [a[(tuple(x), i)] for i in range(1, d + 1)]
    if all(w == 1 for w in lower) and not any(upper):
        return 1
    if all(w == 1 for w in upper) and not any(lower):
        return -1
    return 0


def flip_candidates(a: Patch, radius, exclude=None) -> list[FlipSpec]:
    """Valid flips whose faces all lie inside the ball of ``radius``."""
    seen = set()
    for f, w in a.weights.items():
        if w == 1:
            seen.add(f.x)
            seen.add(vadd(f.x, unit(a.d, f.t)))
    inside = ball_predicate(radius)
    out = []
    for x in sorted(seen):
        if not inside(x) or any(not inside(vsub(x, unit(a.d, i))) for i in range(1, a.d + 1)):
            continue
        if exclude is not None and exclude(x):
            continue
        k = flip_kind(a, x)
        if k:
            out.append(FlipSpec(x, k))
    return out


def random_valid_flips(a: Patch, n: int, seed: int, radius=None,
                       exclude=None) -> tuple[Patch, list[FlipSpec]]:
    """Apply ``n`` successive random surface-preserving flips.

    ``radius`` bounds where flips may be placed (default: certified radius
    minus one, so every touched face is certified).  ``exclude(x)`` can veto
    positions, e.g. points of the plane's defect layer.
    """
    rng = random.Random(seed)
    if radius is None:
        radius = max(Fraction(0), to_fraction(a.certified_radius) - 1)
    applied = []
    for _ in range(n):
        cands = flip_candidates(a, radius, exclude)
        if not cands:
            break
        fl = rng.choice(cands)
        a = add_flips(a, [fl])
        applied.append(fl)
    return a, applied


def on_layer(p: PlaneSpec):
    return lambda x: p.height(x) == p.rho
