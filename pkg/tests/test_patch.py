import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stepped.patch import (
    INF,
    AgreeUpTo,
    Face,
    InvalidDefectError,
    Patch,
    PlaneSpec,
    QuasiPlaneSpec,
    add,
    distance,
    face_patch,
    generate_plane_patch,
    is_binary,
    is_valid_defect,
    make_flip,
    plane_membership,
    quasi_plane_patch,
    zero_patch,
)


def scan_oracle(alpha, rho, radius):
    """Independent brute force: every lattice point of the cube, every type."""
    r = int(radius)
    out = {}
    for x in itertools.product(range(-r, r + 1), repeat=3):
        if sum(c * c for c in x) > radius * radius:
            continue
        h = sum(a * c for a, c in zip(alpha, x))
        for i in range(3):
            if h < rho <= h + alpha[i]:
                out[Face(x, i + 1)] = 1
    return out


def test_membership_examples():
    p = PlaneSpec((1, 1, 1), 1)
    assert plane_membership(p, (0, 0, 0), 1) == 1
    assert plane_membership(p, (1, 0, 0), 1) == 0
    q = PlaneSpec((1, 0, 0), 0)
    assert all(plane_membership(q, (0, k, m), 2) == 0 for k in range(-3, 4) for m in range(-3, 4))


def test_plane_spec_validation():
    with pytest.raises(ValueError):
        PlaneSpec((0, 0, 0), 0)
    with pytest.raises(ValueError):
        PlaneSpec((1, -1, 0), 0)


def test_generate_e1_plane():
    a = generate_plane_patch(PlaneSpec((1, 0, 0), 0), 2)
    assert a.certified_radius == 2
    assert a.weights
    for f, w in a.items():
        assert w == 1 and f.t == 1 and f.x[0] == -1
        assert sum(c * c for c in f.x) <= 4
    assert len(a) == sum(1 for y in range(-2, 3) for z in range(-2, 3) if 1 + y * y + z * z <= 4)


def test_generate_radius_zero():
    a = generate_plane_patch(PlaneSpec((3, 2, 1), Fraction(1, 2)), 0)
    assert all(f.x == (0, 0, 0) for f in a.weights)
    assert len(a) == 3


@pytest.mark.parametrize("alpha,rho,radius", [((3, 2, 1), 0, 5), ((1, Fraction(1, 19), Fraction(25, 76)), Fraction(1, 3), 6),
                                              ((2, 0, 5), Fraction(7, 2), 4)])
def test_generate_matches_scan(alpha, rho, radius):
    a = generate_plane_patch(PlaneSpec(alpha, rho), radius)
    assert a.weights == scan_oracle([Fraction(c) for c in alpha], Fraction(rho), radius)


def test_flip_examples():
    f = make_flip((0, 0, 0), 1)
    for i in (1, 2, 3):
        e = tuple(int(k == i) for k in (1, 2, 3))
        assert f[((0, 0, 0), i)] == 1
        assert f[(tuple(-c for c in e), i)] == -1
    assert len(f) == 6 and f.certified_radius == INF
    assert len(add(make_flip((2, 1, 0), 1), make_flip((2, 1, 0), -1))) == 0


faces = st.builds(lambda x, t, w: Patch(3, {Face(tuple(x), t): w}),
                  st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.integers(1, 3),
                  st.integers(-2, 2))


@given(faces, faces, faces)
def test_module_laws(a, b, c):
    assert add(add(a, b), c) == add(a, add(b, c))
    assert add(a, b) == add(b, a)
    assert add(a, zero_patch(3)) == a
    assert all(w != 0 for w in add(a, b).weights.values())


def test_binary_and_flips():
    plane = PlaneSpec((3, 1, 2), 0)
    p = generate_plane_patch(plane, 6)
    # the origin is a plane vertex (height = rho) and keeps the patch binary
    assert is_binary(add(p, make_flip((0, 0, 0), 1)))
    sink = generate_plane_patch(PlaneSpec((1, 0, 0), 0), 6)
    for x in [(0, 0, 0), (1, 2, -1), (-1, 0, 0)]:
        for s in (1, -1):
            assert not is_binary(add(sink, make_flip(x, s)))


def test_distance_examples():
    p = generate_plane_patch(PlaneSpec((3, 2, 1), 0), 12)
    assert distance(p, p, 10) == AgreeUpTo(10)
    x = (2, 2, 1)  # ||x|| = 3
    q = add(p, face_patch(x, 1))
    assert distance(p, q, 10) == Fraction(1, 8)
    o = add(p, face_patch((0, 0, 0), 2, 5))
    assert distance(p, o, 10) == 1
    with pytest.raises(ValueError):
        distance(p, q, 13)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.lists(st.integers(-4, 4), min_size=3, max_size=3), st.integers(1, 3)),
                max_size=3))
def test_ultrametric(perturb):
    base = generate_plane_patch(PlaneSpec((2, 1, 1), 0), 8)
    pats = [base]
    for x, t in perturb:
        pats.append(add(pats[-1], face_patch(tuple(x), t)))
    for a, b, c in itertools.permutations(pats[:3] if len(pats) >= 3 else pats * 3, 3):
        num = lambda v: 0 if isinstance(v, AgreeUpTo) else v
        assert num(distance(a, c, 8)) <= max(num(distance(a, b, 8)), num(distance(b, c, 8)))


def test_defect_validity_examples():
    rng = random.Random(3)
    plane = PlaneSpec((3, 1, 2), 0)
    layer = [x for x in itertools.product(range(-3, 4), repeat=3) if plane.height(x) == 0]
    for _ in range(5):
        assert is_valid_defect(QuasiPlaneSpec(plane, rng.sample(layer, 4)))
    assert not is_valid_defect(QuasiPlaneSpec(PlaneSpec((1, 0, 0), 0), [(0, 0, 0)]))
    assert is_valid_defect(QuasiPlaneSpec(PlaneSpec((1, 0, 0), 0), []))
    with pytest.raises(ValueError):
        QuasiPlaneSpec(plane, [(1, 0, 0)])  # not on the layer


def test_quasi_plane_examples():
    plane = PlaneSpec((3, 1, 2), 0)
    assert quasi_plane_patch(QuasiPlaneSpec(plane), 5) == generate_plane_patch(plane, 5)
    q = quasi_plane_patch(QuasiPlaneSpec(plane, [(0, 0, 0)]), 4)
    p = generate_plane_patch(plane, 4)
    assert q.is_binary()
    diff = {f for f in set(p.weights) | set(q.weights) if p[f] != q[f]}
    assert diff == set(make_flip((0, 0, 0)).weights)
    with pytest.raises(InvalidDefectError) as exc:
        quasi_plane_patch(QuasiPlaneSpec(PlaneSpec((1, 0, 0), 0), [(0, 0, 0)]), 4)
    assert exc.value.row.value not in (0, 1)
