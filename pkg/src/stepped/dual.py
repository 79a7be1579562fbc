"""Dual maps E1*(sigma) of unimodular free-group morphisms."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import linalg
from .linalg import IntMatrix
from .patch import INF, Face, FlipSpec, Patch, PlaneSpec, ball_points, ceil_norm, unit, vadd, vsub
from .words import Morphism


class NotBinary(NamedTuple):
    """Image of a plane that is not binary; ``transposed_normal`` has a negative entry."""

    transposed_normal: tuple[Fraction, ...]
    rho: Fraction


@dataclass(frozen=True)
class DualMap:
    sigma: Morphism
    M: IntMatrix = field(init=False)
    M_inv: IntMatrix = field(init=False)
    C_sigma: int = field(init=False)
    M_norm_bound: Fraction = field(init=False)
    # type i -> [(image type j, sign, offset)]: the image of (x, i*) is
    # sum of sign * (M^-1 x + offset, j*)
    _rules: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.sigma.matrix
        if abs(linalg.det(m)) != 1:
            raise ValueError(f"morphism {self.sigma} is not unimodular")
        m_inv = linalg.integer_inverse(m)
        d = self.sigma.d
        rules = defaultdict(list)
        reach = 0
        for j, word in enumerate(self.sigma.images, start=1):
            prefix = (0,) * d
            for letter in word:
                k = abs(letter)
                if letter > 0:
                    touched = prefix
                    rules[k].append((j, 1, tuple(-c for c in linalg.matvec(m_inv, prefix))))
                    prefix = vadd(prefix, unit(d, k))
                else:
                    prefix = vsub(prefix, unit(d, k))
                    touched = prefix
                    rules[k].append((j, -1, tuple(-c for c in linalg.matvec(m_inv, prefix))))
                reach = max(reach, ceil_norm(touched))
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "M_inv", m_inv)
        object.__setattr__(self, "C_sigma", 1 + reach)
        object.__setattr__(self, "M_norm_bound", linalg.operator_norm_bound(m))
        object.__setattr__(self, "_rules", dict(rules))

    @property
    def d(self) -> int:
        return self.sigma.d

    def __call__(self, a: Patch) -> Patch:
        return apply_dual(self, a)


def dual_image_face(D: DualMap, x, i: int) -> Patch:
    return apply_dual(D, Patch(D.d, {Face(tuple(x), i): 1}, INF))


def certified_radius_after(D: DualMap, radius):
    """Radius on which images of functions agreeing on ``B(0, radius)`` agree."""
    if radius == INF:
        return INF
    out = (Fraction(radius) - D.C_sigma) / D.M_norm_bound
    return max(Fraction(0), out)


def apply_dual(D: DualMap, a: Patch) -> Patch:
    if a.d != D.d:
        raise ValueError("dimension mismatch")
    acc: dict[Face, int] = defaultdict(int)
    m_inv = D.M_inv
    rules = D._rules
    for face, w in a.weights.items():
        y = linalg.matvec(m_inv, face.x)
        for j, sign, offset in rules.get(face.t, ()):
            acc[Face(vadd(y, offset), j)] += sign * w
    return Patch(a.d, acc, certified_radius_after(D, a.certified_radius))


def pullback_image(D: DualMap, a: Patch, radius=None) -> Patch:
    """``apply_dual(D, a)`` restricted to the closed ball of ``radius``.

    Each output face ``(y, j)`` collects ``sign * a(M (y - offset), i)`` over
    the rules of ``D``, so the cost scales with the output ball rather than
    with the input patch.  ``radius`` defaults to the certified radius of the
    image and may not exceed it.
    """
    if a.d != D.d:
        raise ValueError("dimension mismatch")
    bound = certified_radius_after(D, a.certified_radius)
    radius = bound if radius is None else Fraction(radius)
    if radius == INF or radius > bound:
        raise ValueError(f"radius {radius} exceeds the certified radius {bound} of the image")
    d = a.d
    ys = ball_points(d, radius)
    if not a.weights or not len(ys):
        return Patch(d, {}, radius)
    m = np.array(D.M, dtype=np.int64)
    by_type: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    xs = np.array([f.x for f in a.weights], dtype=np.int64)
    span = int(np.abs(xs).max()) + 1
    base = 2 * span + 1
    weights_of = defaultdict(list)
    for f, w in a.weights.items():
        weights_of[f.t].append((_encode(f.x, span, base), w))
    for t, pairs in weights_of.items():
        pairs.sort()
        by_type[t] = (np.array([k for k, _ in pairs], dtype=np.int64),
                      np.array([w for _, w in pairs], dtype=np.int64))
    acc = np.zeros((len(ys), d + 1), dtype=np.int64)
    for i, rules in D._rules.items():
        if i not in by_type:
            continue
        keys, wts = by_type[i]
        for j, sign, offset in rules:
            x = (ys - np.array(offset, dtype=np.int64)) @ m.T
            inside = np.all(np.abs(x) < span, axis=1)
            code = np.zeros(len(ys), dtype=np.int64)
            for c in range(d):
                code = code * base + (x[:, c] + span)
            pos = np.searchsorted(keys, code)
            pos = np.minimum(pos, len(keys) - 1)
            hit = inside & (keys[pos] == code)
            acc[hit, j] += sign * wts[pos[hit]]
    out = {}
    for row, j in zip(*np.nonzero(acc)):
        out[Face(tuple(int(c) for c in ys[row]), int(j))] = int(acc[row, j])
    return Patch(d, out, radius)


def _encode(x, span: int, base: int) -> int:
    code = 0
    for c in x:
        code = code * base + (c + span)
    return code


def dual_image_plane(D: DualMap, p: PlaneSpec) -> PlaneSpec | NotBinary:
    normal = linalg.matvec(linalg.transpose(D.M), p.alpha)
    if any(c < 0 for c in normal):
        return NotBinary(tuple(Fraction(c) for c in normal), p.rho)
    return PlaneSpec(normal, p.rho)


def dual_image_flip(D: DualMap, flip) -> FlipSpec:
    if not isinstance(flip, FlipSpec):
        flip = FlipSpec(tuple(flip))
    return FlipSpec(linalg.matvec(D.M_inv, flip.x), flip.sign)
