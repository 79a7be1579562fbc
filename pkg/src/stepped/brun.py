"""The Brun multidimensional continued fraction map on exact rational vectors."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import linalg
from .linalg import IntMatrix
from .patch import to_fraction
from .words import brun_matrix


class Termination(str, enum.Enum):
    TERMINAL = "Terminal"
    MAX_STEPS = "MaxSteps"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class BrunStep:
    a: int | None
    i: int | None
    j: int | None
    matrix: IntMatrix

    @property
    def terminal(self) -> bool:
        return self.a is None

    @property
    def move(self) -> tuple[int, int, int]:
        return (self.a, self.i, self.j)

    @classmethod
    def make(cls, a: int, i: int, j: int, d: int) -> BrunStep:
        return cls(a, i, j, brun_matrix(a, i, j, d))

    @classmethod
    def identity(cls, d: int) -> BrunStep:
        return cls(None, None, None, linalg.identity(d))


@dataclass(frozen=True)
class Expansion:
    """Nonterminal Brun steps, in order, and why the expansion stopped.

    With ``termination == TERMINAL`` the expansion is finite and ``len(steps)``
    is its length.
    """

    steps: tuple[BrunStep, ...]
    termination: Termination

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def moves(self) -> list[tuple[int, int, int]]:
        return [s.move for s in self.steps]

    def product(self, n: int | None = None) -> IntMatrix:
        steps = self.steps if n is None else self.steps[:n]
        d = len(steps[0].matrix) if steps else None
        return product_of(steps, d)


def product_of(steps: Sequence[BrunStep], d: int | None) -> IntMatrix:
    if not steps:
        if d is None:
            raise ValueError("dimension unknown for an empty product")
        return linalg.identity(d)
    out = steps[0].matrix
    for s in steps[1:]:
        out = linalg.matmul(out, s.matrix)
    return out


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """``"1,1/19,25/76"`` -> exact rationals."""
    parts = [p for p in text.split(",")]
    if not parts or any(not p.strip() for p in parts):
        raise ValueError(f"bad vector {text!r}")
    return tuple(to_fraction(p) for p in parts)


def format_vector(v) -> str:
    return ",".join(str(Fraction(c)) for c in v)


def _check(alpha) -> tuple[Fraction, ...]:
    alpha = tuple(to_fraction(c) for c in alpha)
    if any(c < 0 for c in alpha):
        raise ValueError("Brun map needs nonnegative entries")
    if not any(alpha):
        raise ValueError("Brun map is undefined on the zero vector")
    return alpha


def is_terminal(alpha) -> bool:
    return sum(1 for c in alpha if c != 0) == 1


def brun_step(alpha) -> tuple[BrunStep, tuple[Fraction, ...]]:
    """One step of the Brun map: ``alpha = B(alpha) T(alpha)``."""
    alpha = _check(alpha)
    d = len(alpha)
    if is_terminal(alpha):
        return BrunStep.identity(d), alpha
    # max() returns the first maximal index, which gives the lexicographic tie-break
    i = max(range(d), key=lambda k: (alpha[k], -k))
    j = max((k for k in range(d) if k != i), key=lambda k: (alpha[k], -k))
    a = math.floor(alpha[i] / alpha[j])
    t = list(alpha)
    t[i], t[j] = alpha[j], alpha[i] - a * alpha[j]
    return BrunStep.make(a, i + 1, j + 1, d), tuple(t)


def brun_expansion(alpha, max_steps: int) -> Expansion:
    alpha = _check(alpha)
    d = len(alpha)
    steps = []
    current = alpha
    prod = linalg.identity(d)
    termination = Termination.MAX_STEPS
    for _ in range(max_steps):
        step, nxt = brun_step(current)
        if step.terminal:
            termination = Termination.TERMINAL
            break
        steps.append(step)
        prod = linalg.matmul(prod, step.matrix)
        current = nxt
        if linalg.matvec(prod, current) != alpha:
            raise ArithmeticError("reconstruction identity violated")
    else:
        if is_terminal(current):
            termination = Termination.TERMINAL
    return Expansion(tuple(steps), termination)


def brun_orbit(alpha, n: int) -> list[tuple[Fraction, ...]]:
    """``[alpha, T(alpha), ..., T^n(alpha)]`` (stationary once terminal)."""
    out = [_check(alpha)]
    for _ in range(n):
        out.append(brun_step(out[-1])[1])
    return out


class Convergent(NamedTuple):
    q: int
    p: tuple[int, ...]

    def approximant(self) -> tuple[Fraction, ...] | None:
        if self.q == 0:
            return None
        return tuple(Fraction(c, self.q) for c in self.p)


def convergents(alpha, n: int) -> list[Convergent]:
    """``(q_k, p_k) = B_1 ... B_k (1, 0, ..., 0)`` for ``k = 0..n`` from the expansion of ``(1, alpha)``."""
    vec = (Fraction(1),) + _check_nonneg(alpha)
    d = len(vec)
    exp = brun_expansion(vec, n)
    seed = (1,) + (0,) * (d - 1)
    out = [Convergent(1, (0,) * (d - 1))]
    prod = linalg.identity(d)
    for k in range(1, n + 1):
        if k <= len(exp.steps):
            prod = linalg.matmul(prod, exp.steps[k - 1].matrix)
        col = linalg.matvec(prod, seed)
        out.append(Convergent(col[0], tuple(col[1:])))
    return out


def _check_nonneg(alpha) -> tuple[Fraction, ...]:
    alpha = tuple(to_fraction(c) for c in alpha)
    if any(c < 0 for c in alpha):
        raise ValueError("entries must be nonnegative")
    return alpha


def direction_distance(y, z) -> float:
    """Distance from ``y / ||y||`` to the line ``R z``.

    The squared residual ``1 - <y|z>^2 / (||y||^2 ||z||^2)`` is computed
    exactly; only the final square root is rounded (relative error ~1e-16).
    """
    y = tuple(Fraction(c) for c in y)
    z = tuple(Fraction(c) for c in z)
    ny = sum(c * c for c in y)
    nz = sum(c * c for c in z)
    if ny == 0 or nz == 0:
        raise ValueError("direction of the zero vector is undefined")
    yz = sum(a * b for a, b in zip(y, z))
    residual2 = 1 - yz * yz / (ny * nz)
    return math.sqrt(max(float(residual2), 0.0))


def seed_uniform_distances(alpha, n: int) -> list[float]:
    """Worst direction error over all seeds ``x >= 0`` after ``k = 0..n`` steps.

    Same normalization as :func:`convergents`: the expanded vector is
    ``(1, alpha)``.  After ``k`` steps that vector lies in the cone spanned by
    the columns ``m`` of ``B_1 ... B_k`` with ``T^k(1, alpha)_m != 0``.  The
    angle to a fixed vector is quasi-convex, so the worst seed is one of
    these columns.  The cones are nested, so the sequence never increases.
    """
    vec = (Fraction(1),) + _check_nonneg(alpha)
    d = len(vec)
    prod = linalg.identity(d)
    current = vec
    out = []
    for k in range(n + 1):
        if k:
            step, current = brun_step(current)
            prod = linalg.matmul(prod, step.matrix)
        out.append(max(direction_distance([row[m] for row in prod], vec)
                       for m in range(d) if current[m] != 0))
    return out
