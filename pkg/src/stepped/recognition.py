"""Runs, the desubstitution map T~, Brun expansions of patches and planarity reports."""

from __future__ import annotations

import enum
import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from . import linalg
from .brun import BrunStep, Expansion, Termination, product_of
from .dual import DualMap, certified_radius_after, pullback_image
from .patch import (
    INF,
    Face,
    Patch,
    PlaneSpec,
    QuasiPlaneSpec,
    generate_plane_patch,
    ball_predicate,
    quasi_plane_patch,
    unit,
    vadd,
    vsub,
)
from .surface import NonBinaryError, require_binary, vertex_points
from .words import brun_substitution_inverse, compose, identity_morphism


class Completeness(str, enum.Enum):
    COMPLETE = "Complete"
    LEFT_OPEN = "LeftOpen"
    RIGHT_OPEN = "RightOpen"
    BOTH_OPEN = "BothOpen"


@dataclass(frozen=True)
class Run:
    """Maximal segment of type-``face_type`` faces ``base + k e_direction``, ``k`` in ``interval``."""

    base: tuple[int, ...]
    direction: int
    face_type: int
    interval: tuple[int, int]
    completeness: Completeness

    @property
    def length(self) -> int:
        return self.interval[1] - self.interval[0] + 1

    @property
    def complete(self) -> bool:
        return self.completeness is Completeness.COMPLETE

    def faces(self) -> list[Face]:
        d = len(self.base)
        e = unit(d, self.direction)
        return [Face(tuple(b + k * c for b, c in zip(self.base, e)), self.face_type)
                for k in range(self.interval[0], self.interval[1] + 1)]


def find_runs(a: Patch, j: int, i: int) -> list[Run]:
    """All ``(e_j, i)``-runs visible in the certified ball of a binary patch.

    A run is Complete when both flanking positions are certified and empty;
    otherwise the open side(s) are flagged.
    """
    require_binary(a)
    return _runs(a.certified_items(), ball_predicate(a.certified_radius), j, i)


def _runs(items, inside, j: int, i: int) -> list[Run]:
    axis = j - 1
    lines: dict[tuple, list[int]] = defaultdict(list)
    for f, _ in items:
        if f.t != i:
            continue
        key = f.x[:axis] + (0,) + f.x[axis + 1:]
        lines[key].append(f.x[axis])
    runs = []
    for key in sorted(lines):
        ks = sorted(lines[key])
        start = prev = ks[0]
        segments = []
        for k in ks[1:]:
            if k != prev + 1:
                segments.append((start, prev))
                start = k
            prev = k
        segments.append((start, prev))
        for b, c in segments:
            left = key[:axis] + (b - 1,) + key[axis + 1:]
            right = key[:axis] + (c + 1,) + key[axis + 1:]
            lo = inside(left)
            ro = inside(right)
            if lo and ro:
                comp = Completeness.COMPLETE
            elif ro:
                comp = Completeness.LEFT_OPEN
            elif lo:
                comp = Completeness.RIGHT_OPEN
            else:
                comp = Completeness.BOTH_OPEN
            runs.append(Run(key, j, i, (b, c), comp))
    return runs


class RunObservation(NamedTuple):
    length: int
    complete: bool


RunTable = Mapping[tuple[int, int], Sequence[RunObservation]]
"""``(direction j, face type i)`` -> observed runs."""


def run_table(a: Patch) -> dict[tuple[int, int], list[RunObservation]]:
    require_binary(a)
    items = a.certified_items()
    inside = ball_predicate(a.certified_radius)
    table = {}
    for j in range(1, a.d + 1):
        for i in range(1, a.d + 1):
            if i != j:
                table[(j, i)] = [RunObservation(r.length, r.complete) for r in _runs(items, inside, j, i)]
    return table


class Outcome(str, enum.Enum):
    MOVE = "Move"
    TERMINAL = "Terminal"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class MoveDecision:
    outcome: Outcome
    a: int | None = None
    i: int | None = None
    j: int | None = None
    reason: str = ""
    # shorter admissible value when a shorter run may hide behind the boundary
    fallback_a: int | None = None

    @property
    def move(self):
        return (self.a, self.i, self.j)

    @classmethod
    def terminal(cls, reason: str = "") -> MoveDecision:
        return cls(Outcome.TERMINAL, reason=reason)

    @classmethod
    def inconclusive(cls, reason: str) -> MoveDecision:
        return cls(Outcome.INCONCLUSIVE, reason=reason)


class Tri(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


def _condition1(table: RunTable, i: int, j: int, d: int) -> Tri:
    keys = [(direction, k) for direction in (i, j) for k in range(1, d + 1) if k != i]
    seen = [table.get(key, ()) for key in keys]
    if any(obs.length >= 2 for runs in seen for obs in runs):
        return Tri.FALSE
    if all(not runs or any(o.complete for o in runs) for runs in seen):
        return Tri.TRUE
    return Tri.UNKNOWN


def _condition2(table: RunTable, i: int, j: int) -> Tri:
    runs = table.get((j, i), ())
    if any(o.complete for o in runs):
        return Tri.TRUE
    return Tri.UNKNOWN if runs else Tri.FALSE


def decide_move(table: RunTable, d: int) -> MoveDecision:
    """Pick the Brun move of T~ from a table of observed runs.

    Pairs ``(i, j)`` are scanned lexicographically.  A run of length >= 2
    refutes condition 1 whether or not it is complete; affirmation needs
    complete runs.  An undecidable pair met before the first admissible one
    makes the decision Inconclusive.

    ``a`` is the shortest complete run.  When every complete run has the
    same length ``L >= 2`` a run of length ``L - 1`` may still exist outside
    the window; ``fallback_a`` then records that alternative.
    """
    for i, j in itertools.permutations(range(1, d + 1), 2):
        c1 = _condition1(table, i, j, d)
        if c1 is Tri.FALSE:
            continue
        c2 = _condition2(table, i, j)
        if c2 is Tri.FALSE:
            continue
        if c1 is Tri.TRUE and c2 is Tri.TRUE:
            lengths = {o.length for o in table[(j, i)] if o.complete}
            a = min(lengths)
            fallback = a - 1 if len(lengths) == 1 and a > 1 else None
            return MoveDecision(Outcome.MOVE, a, i, j, fallback_a=fallback)
        return MoveDecision.inconclusive(
            f"pair ({i},{j}): condition 1 {c1.value}, condition 2 {c2.value}")
    return MoveDecision.terminal("no pair satisfies both conditions")


def select_brun_move(a: Patch) -> MoveDecision:
    require_binary(a)
    faces = [f for f, _ in a.certified_items()]
    if not faces:
        return MoveDecision.inconclusive("certified region holds no face")
    types = {f.t for f in faces}
    if len(types) == 1:
        return MoveDecision.terminal(f"certified region holds only type-{types.pop()} faces")
    return decide_move(run_table(a), a.d)


def _first_non_binary(a: Patch) -> tuple[Face, int] | None:
    for f, w in a.certified_items():
        if w != 1:
            return f, w
    return None


@dataclass(frozen=True)
class TildeResult:
    patch: Patch
    decision: MoveDecision
    non_binary: tuple[Face, int] | None = None


def tilde_T(a: Patch) -> tuple[Patch, MoveDecision]:
    r = tilde_T_detailed(a)
    return r.patch, r.decision


def tilde_T_detailed(a: Patch, decision: MoveDecision | None = None,
                     apply: Callable | None = None) -> TildeResult:
    """One application of T~.

    If the image under the chosen move has a weight other than 1 inside its
    certified ball and the decision carries a fallback, the fallback move is
    tried and kept when its image is binary there.  ``apply(k, i, j)`` may
    replace the default evaluation of ``E1*(beta_{k,i,j}^-1)`` on ``a``.
    """
    if decision is None:
        decision = select_brun_move(a)
    if decision.outcome is not Outcome.MOVE:
        return TildeResult(a, decision)
    if apply is None:
        def apply(k, i, j):
            return _apply_move(a, k, i, j)
    out, bad = apply(decision.a, decision.i, decision.j)
    if bad is not None and decision.fallback_a is not None:
        out2, bad2 = apply(decision.fallback_a, decision.i, decision.j)
        if bad2 is None:
            decision = replace(decision, a=decision.fallback_a, fallback_a=None,
                               reason="shorter run assumed outside the window")
            return TildeResult(out2, decision)
    return TildeResult(out, decision, bad)


def _apply_move(a: Patch, k: int, i: int, j: int):
    D = DualMap(brun_substitution_inverse(k, i, j, a.d))
    out = D(a).restrict()
    return out, _first_non_binary(out)


# --- linear programs over the vertex set --------------------------------------

class SlabFit(NamedTuple):
    margin: float
    alpha: np.ndarray
    rho: float


def _slab_fit(vertices: np.ndarray, cone: np.ndarray,
              extra: np.ndarray | None = None) -> SlabFit | None:
    """Maximize ``t`` with ``rho <= <v|alpha>`` and ``<v|alpha> + t <= rho + |alpha|_1``
    over ``alpha = cone @ beta``, ``beta >= 0``, ``|alpha|_1 = 1`` and
    ``extra @ beta <= 0``.  Float LP; callers verify anything they keep."""
    d = cone.shape[0]
    vc = vertices @ cone
    ones = np.ones(d) @ cone
    n = len(vertices)
    rows = [np.hstack([-vc, np.ones((n, 1)), np.zeros((n, 1))]),
            np.hstack([vc - ones, -np.ones((n, 1)), np.ones((n, 1))])]
    if extra is not None:
        rows.append(np.hstack([extra, np.zeros((len(extra), 2))]))
    a_ub = np.vstack(rows)
    b_ub = np.zeros(len(a_ub))
    a_eq = np.hstack([ones, [0.0, 0.0]])[None, :]
    bounds = [(0, None)] * d + [(None, None), (None, 1.0)]
    c = np.zeros(d + 2)
    c[d + 1] = -1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return SlabFit(float(res.x[d + 1]), cone @ res.x[:d], float(res.x[d]))


FEASIBILITY_TOL = 1e-9


class _InputGeometry:
    """Vertices of the input patch, computed on first use."""

    def __init__(self, a: Patch):
        self.patch = a
        self._vertices = None
        self._extreme = None
        self.not_surface = None

    @property
    def vertices(self) -> list[tuple[int, ...]] | None:
        if self._vertices is None and self.not_surface is None:
            try:
                self._vertices = vertex_points(self.patch)
            except ValueError as exc:
                self.not_surface = str(exc)
        return self._vertices

    @property
    def extreme(self) -> np.ndarray | None:
        """Vertices on the convex hull: the only ones a slab constraint can bind."""
        if self._extreme is None:
            verts = self.vertices
            if not verts:
                return None
            pts = np.array(verts, dtype=float)
            try:
                pts = pts[ConvexHull(pts).vertices]
            except QhullError:  # flat or tiny point sets: keep them all
                pass
            self._extreme = pts
        return self._extreme

    def _fit_level(self, prod, extra: np.ndarray | None) -> int | None:
        """2 if a plane fits the input vertices with positive margin, 1 if only
        the closed slab fits (as for quasi-planes), 0 if nothing fits; None
        when there are no vertices."""
        pts = self.extreme
        if pts is None:
            return None
        fit = _slab_fit(pts, np.array(prod, dtype=float), extra)
        if fit is None or fit.margin < -LP_TOL:
            return 0
        return 2 if fit.margin > LP_TOL else 1

    def resolve(self, prod, decision: MoveDecision) -> MoveDecision:
        """Choose between ``a`` and ``fallback_a`` using planes that fit the input.

        ``beta`` (the current normal, with ``alpha = prod beta``) must satisfy
        ``beta_i >= a beta_j`` for ``a`` to be right and ``beta_i <= a beta_j``
        for the fallback.  The side reaching the better fit level wins; on a
        tie the data cannot tell and the literal rule (shortest complete run)
        stands.
        """
        d = len(prod)
        row = _row(d, {decision.i - 1: 1, decision.j - 1: -decision.a})
        upper = self._fit_level(prod, -row[None, :])  # beta_i - a beta_j >= 0
        lower = self._fit_level(prod, row[None, :])
        if upper is None or upper == lower:
            return decision
        if upper > lower:
            return replace(decision, fallback_a=None)
        return replace(decision, a=decision.fallback_a, fallback_a=None,
                       reason="shorter run implied by the input's vertex slab")

    def check(self, prod, decision: MoveDecision) -> MoveDecision:
        """Turn a run-based decision into Inconclusive when the planes (or
        closed-slab quasi-planes) through the input vertices all contradict it.

        A move ``(a, i, j)`` is compatible with ``beta`` when ``beta_i`` is the
        largest entry, ``beta_j`` the second largest and
        ``a beta_j <= beta_i <= (a + 1) beta_j`` (closed version of the Brun
        map's choice region).  Terminal is compatible with ``beta`` supported
        on a single coordinate.  The check never replaces the decision by a
        different move.
        """
        d = len(prod)
        if decision.outcome is Outcome.MOVE:
            i, j, a = decision.i - 1, decision.j - 1, decision.a
            rows = []
            for k in range(d):
                if k != i:
                    rows.append(_row(d, {k: 1, i: -1}))
                if k not in (i, j):
                    rows.append(_row(d, {k: 1, j: -1}))
            rows.append(_row(d, {j: a, i: -1}))
            rows.append(_row(d, {i: 1, j: -(a + 1)}))
            levels = [self._fit_level(prod, np.array(rows))]
        elif decision.outcome is Outcome.TERMINAL:
            levels = [self._fit_level(prod, np.array([_row(d, {m: 1}) for m in range(d) if m != k]))
                      for k in range(d)]
        else:
            return decision
        if None in levels:
            return decision
        best = self._fit_level(prod, None)
        if best == 0 or max(levels) >= best:
            return decision  # nothing fits the input at all, or the decision is supported
        what = f"move {decision.move}" if decision.outcome is Outcome.MOVE else "Terminal"
        return MoveDecision.inconclusive(f"{what} contradicts every plane through the input vertices")


LP_TOL = 1e-7


def _row(d: int, coeffs: dict[int, float]) -> np.ndarray:
    r = np.zeros(d)
    for k, c in coeffs.items():
        r[k] = c
    return r


# --- expansions -----------------------------------------------------------------

class StepTrace(NamedTuple):
    decision: MoveDecision
    radius_after: Fraction | float
    non_binary: tuple[Face, int] | None


@dataclass(frozen=True)
class SurfaceExpansion:
    expansion: Expansion
    residual: Patch
    trace: tuple[StepTrace, ...]

    @property
    def non_binary(self) -> tuple[int, Face, int] | None:
        for n, t in enumerate(self.trace, start=1):
            if t.non_binary is not None:
                return (n, *t.non_binary)
        return None

    @property
    def last_decision(self) -> MoveDecision | None:
        return self.trace[-1].decision if self.trace else None


def trace_surface_expansion(a: Patch, max_steps: int, _geometry=None) -> SurfaceExpansion:
    """Iterate T~ from ``a`` and keep every decision.

    Ambiguous run lengths are settled against the input patch (see
    ``_InputGeometry.resolve``) before the move is applied, and decisions no
    plane through the input supports are downgraded to Inconclusive (see
    ``_InputGeometry.check``).
    """
    require_binary(a)
    d = a.d
    geometry = _geometry or _InputGeometry(a)
    source = a.restrict()
    current = source
    composite = identity_morphism(d)
    steps = []
    trace = []
    prod = linalg.identity(d)
    termination = Termination.MAX_STEPS

    def advance(k, i, j):
        # E1*(s_1) ... E1*(s_n) = E1*(s_1 o ... o s_n): the composite map applied to
        # the input often certifies a larger ball than the chained per-step bounds
        inv = brun_substitution_inverse(k, i, j, d)
        step_map = DualMap(inv)
        chained = certified_radius_after(step_map, current.certified_radius)
        direct = DualMap(compose(composite, inv))
        radius = certified_radius_after(direct, source.certified_radius)
        if chained == INF or radius <= chained:
            out = pullback_image(step_map, current) if chained != INF else step_map(current)
        else:
            out = pullback_image(direct, source, min(radius, current.certified_radius))
        return out, _first_non_binary(out)

    for _ in range(max_steps):
        decision = select_brun_move(current)
        if decision.outcome is Outcome.MOVE and decision.fallback_a is not None:
            decision = geometry.resolve(prod, decision)
        decision = geometry.check(prod, decision)
        r = tilde_T_detailed(current, decision, advance)
        trace.append(StepTrace(r.decision, r.patch.certified_radius, r.non_binary))
        if r.decision.outcome is Outcome.TERMINAL:
            termination = Termination.TERMINAL
            break
        if r.decision.outcome is Outcome.INCONCLUSIVE:
            termination = Termination.INCONCLUSIVE
            break
        step = BrunStep.make(r.decision.a, r.decision.i, r.decision.j, d)
        steps.append(step)
        prod = linalg.matmul(prod, step.matrix)
        composite = compose(composite, brun_substitution_inverse(*step.move, d))
        current = r.patch
        if r.non_binary is not None:
            termination = Termination.INCONCLUSIVE
            break
    return SurfaceExpansion(Expansion(tuple(steps), termination), current, tuple(trace))


def surface_brun_expansion(a: Patch, max_steps: int) -> tuple[Expansion, Patch]:
    r = trace_surface_expansion(a, max_steps)
    return r.expansion, r.residual


# --- planarity report --------------------------------------------------------

class Verdict(str, enum.Enum):
    PLANE = "PlaneConsistent"
    QUASI_PLANE = "QuasiPlaneConsistent"
    NON_PLANAR = "NonPlanarEvidence"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PlanarityReport:
    expansion: Expansion
    steps_certified: int
    residual: Patch
    candidate_direction: tuple[int, ...]
    verdict: Verdict
    evidence_step: int | None = None
    detail: str = ""
    fitted_plane: PlaneSpec | None = None
    defect: frozenset = field(default_factory=frozenset)


def _rational_candidates(alpha: np.ndarray):
    seen = set()
    for den in (1, 2, 3, 5, 10, 30, 100, 1000, 10 ** 4, 10 ** 5, 10 ** 6, 10 ** 8):
        cand = tuple(max(Fraction(0), Fraction(float(c)).limit_denominator(den)) for c in alpha)
        if any(cand) and cand not in seen:
            seen.add(cand)
            yield cand


def _exact_fit(a: Patch, vertices, alpha) -> tuple[Verdict, PlaneSpec, frozenset] | None:
    """Try the plane (or plane plus defect flips) with normal ``alpha`` and the
    smallest intercept admitting every vertex, checked face by face on the
    certified ball."""
    ints, _ = PlaneSpec(alpha, 0).integer_form()
    heights = [sum(c * x for c, x in zip(ints, v)) for v in vertices]
    lo, hi, width = min(heights), max(heights), sum(ints)
    if hi > lo + width:
        return None
    plane = PlaneSpec(ints, lo)
    radius = a.certified_radius
    target = a.restrict().weights
    base = generate_plane_patch(plane, radius).weights
    if base == target:
        return Verdict.PLANE, plane, frozenset()
    if hi < lo + width:
        return None
    # a defect flip at y adds (y, i) and removes (y - e_i, i): read y off the difference
    defect = set()
    for f in set(base) | set(target):
        diff = target.get(f, 0) - base.get(f, 0)
        if diff == 1:
            defect.add(f.x)
        elif diff == -1:
            defect.add(vadd(f.x, unit(a.d, f.t)))
        elif diff:
            return None
    try:
        q = QuasiPlaneSpec(plane, defect)
        if quasi_plane_patch(q, radius).weights == target:
            return Verdict.QUASI_PLANE, plane, frozenset(defect)
    except ValueError:
        pass
    return None


def _primitive(v) -> tuple[int, ...]:
    den = math.lcm(*(Fraction(c).denominator for c in v))
    ints = [int(Fraction(c) * den) for c in v]
    g = math.gcd(*ints) or 1
    return tuple(c // g for c in ints)


def recognize_planarity(a: Patch, max_steps: int) -> PlanarityReport:
    """Expand the patch with T~ and compare it with planes compatible with the expansion.

    The verdict is PlaneConsistent (resp. QuasiPlaneConsistent) only when an
    exact plane (resp. plane plus defect flips) reproduces the certified part
    of the input face by face.  The search for that plane is restricted to
    the cone ``B_1 ... B_N R_+^d`` spanned by the certified expansion.
    """
    geometry = _InputGeometry(a)
    run = trace_surface_expansion(a, max_steps, geometry)
    exp = run.expansion
    d = a.d
    prod = product_of(exp.steps, d)
    seed = (1,) * d
    if exp.termination is Termination.TERMINAL:
        types = {f.t for f, _ in run.residual.certified_items()}
        if len(types) == 1:
            seed = unit(d, types.pop())
    common = dict(expansion=exp, steps_certified=len(exp.steps), residual=run.residual,
                  candidate_direction=linalg.matvec(prod, seed))
    bad = run.non_binary
    if bad is not None:
        step, face, w = bad
        return PlanarityReport(verdict=Verdict.NON_PLANAR, evidence_step=step,
                               detail=f"weight {w} at {tuple(face.x)},{face.t} after step {step}",
                               **common)
    vertices = geometry.vertices
    if geometry.not_surface is not None:
        return PlanarityReport(verdict=Verdict.NON_PLANAR, evidence_step=0,
                               detail=geometry.not_surface, **common)
    if not vertices:
        return PlanarityReport(verdict=Verdict.INCONCLUSIVE, detail="no certified faces", **common)
    candidates = [tuple(Fraction(c) for c in common["candidate_direction"])]
    fit = _slab_fit(geometry.extreme, np.array(prod, dtype=float))
    if fit is not None:
        candidates.extend(_rational_candidates(fit.alpha))
    inv = linalg.inverse(prod)
    best = None
    for alpha in candidates:
        if any(c < 0 for c in alpha) or not any(alpha):
            continue
        if any(c < 0 for c in linalg.matvec(inv, alpha)):
            continue  # outside the expansion cone
        found = _exact_fit(a, vertices, alpha)
        if found is not None and (best is None or found[0] is Verdict.PLANE):
            best = found
            if found[0] is Verdict.PLANE:
                break  # an exact plane beats any plane-plus-defect reading
    if best is not None:
        verdict, plane, defect = best
        common["candidate_direction"] = _primitive(plane.alpha)
        return PlanarityReport(verdict=verdict, fitted_plane=plane, defect=defect,
                               detail=f"verified against normal {_fmt(plane.alpha)}", **common)
    if fit is not None and fit.margin < -FEASIBILITY_TOL:
        return PlanarityReport(
            verdict=Verdict.NON_PLANAR, evidence_step=len(exp.steps),
            detail=f"no normal in the expansion cone puts all vertices in one slab "
                   f"(best margin {fit.margin:.3g})", **common)
    reason = run.last_decision.reason if run.last_decision else ""
    return PlanarityReport(verdict=Verdict.INCONCLUSIVE, detail=reason or "no exact fit verified",
                           **common)


def _fmt(v) -> str:
    return ",".join(str(c) for c in v)
