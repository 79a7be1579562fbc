"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are printed at the end of the pytest run (see ``conftest.py``) and
when this file is executed directly.
"""

import itertools
import random
import subprocess
import sys
from fractions import Fraction as F

import numpy as np
import pytest

from stepped import linalg
from stepped.brun import brun_expansion, brun_step, convergents, direction_distance, seed_uniform_distances
from stepped.dual import DualMap, NotBinary, apply_dual, dual_image_flip, dual_image_plane
from stepped.patch import (
    Face,
    FlipSpec,
    InvalidDefectError,
    Patch,
    PlaneSpec,
    QuasiPlaneSpec,
    add_flips,
    defect_row,
    generate_plane_patch,
    make_flip,
    quasi_plane_patch,
    unit,
    vadd,
)
from stepped.recognition import Outcome, Verdict, find_runs, recognize_planarity, tilde_T_detailed, trace_surface_expansion
from stepped.surface import on_layer, random_valid_flips, surface_check_d3, vertex_points
from stepped.words import brun_substitution, brun_substitution_inverse, compose

SEED = 20241016
RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def int_alpha(rng):
    return tuple(F(rng.randint(1, 50)) for _ in range(3))


def rho_of(rng):
    return F(rng.randint(0, 99), 100)


def random_morphism(rng, length=1):
    sigma = None
    for _ in range(length):
        make = rng.choice([brun_substitution, brun_substitution_inverse])
        b = make(rng.randint(1, 4), *rng.sample([1, 2, 3], 2))
        sigma = b if sigma is None else compose(sigma, b)
    return sigma


def random_faces(rng, n=20, radius=10):
    w = {}
    while len(w) < n:
        x = tuple(rng.randint(-radius, radius) for _ in range(3))
        if sum(c * c for c in x) <= radius * radius:
            w[Face(x, rng.randint(1, 3))] = rng.choice([-2, -1, 1, 1, 2])
    return Patch(3, w)


# 1 ---------------------------------------------------------------------------

def test_criterion_1_plane_image():
    rng = random.Random(SEED + 1)
    mismatches = 0
    for _ in range(100):
        alpha, rho = int_alpha(rng), rho_of(rng)
        step, t = brun_step(alpha)
        D = DualMap(brun_substitution_inverse(*step.move))
        img = apply_dual(D, generate_plane_patch(PlaneSpec(alpha, rho), 12))
        ref = generate_plane_patch(PlaneSpec(t, rho), img.certified_radius)
        if img.restrict().weights != ref.weights or dual_image_plane(D, PlaneSpec(alpha, rho)) != PlaneSpec(t, rho):
            mismatches += 1
    witnessed = tried = 0
    while tried < 20:
        alpha, rho = int_alpha(rng), rho_of(rng)
        D = DualMap(brun_substitution_inverse(rng.randint(1, 3), *rng.sample([1, 2, 3], 2)))
        if not isinstance(dual_image_plane(D, PlaneSpec(alpha, rho)), NotBinary):
            continue
        tried += 1
        img = apply_dual(D, generate_plane_patch(PlaneSpec(alpha, rho), 12))
        witnessed += any(w == -1 for _, w in img.certified_items())
    record(1, mismatches == 0 and witnessed == 20,
           f"{100 - mismatches}/100 images exact, {witnessed}/20 NotBinary cases show a -1 face")


# 2 ---------------------------------------------------------------------------

def test_criterion_2_composition_law():
    rng = random.Random(SEED + 2)
    bad = 0
    for _ in range(50):
        s, s2 = random_morphism(rng), random_morphism(rng)
        f = random_faces(rng)
        lhs = apply_dual(DualMap(compose(s, s2)), f)
        rhs = apply_dual(DualMap(s2), apply_dual(DualMap(s), f))
        bad += lhs.weights != rhs.weights
    record(2, bad == 0, f"{50 - bad}/50 pairs agree exactly")


# 3 ---------------------------------------------------------------------------

def test_criterion_3_flip_transport():
    rng = random.Random(SEED + 3)
    bad = 0
    for _ in range(50):
        D = DualMap(random_morphism(rng, rng.randint(1, 3)))
        x = tuple(rng.randint(-10, 10) for _ in range(3))
        sign = rng.choice([1, -1])
        y = dual_image_flip(D, FlipSpec(x, sign))
        bad += apply_dual(D, make_flip(x, sign)).weights != make_flip(y.x, y.sign).weights
    record(3, bad == 0, f"{50 - bad}/50 flips transported exactly")


# 4 ---------------------------------------------------------------------------

def test_criterion_4_run_lengths():
    rng = random.Random(SEED + 4)
    radius = 20
    wrong = both_checked = both_missing = 0
    for _ in range(50):
        while True:
            alpha = tuple(F(rng.randint(1, 50), rng.randint(1, 7)) for _ in range(3))
            if len(set(alpha)) == 3:
                break
        p = generate_plane_patch(PlaneSpec(alpha, rho_of(rng)), radius)
        for j, i in itertools.permutations((1, 2, 3), 2):
            r = alpha[i - 1] / alpha[j - 1]
            allowed = {max(r.__floor__(), 1), max(r.__ceil__(), 1)}
            seen = {run.length for run in find_runs(p, j, i) if run.complete}
            wrong += not seen <= allowed
            # both lengths are guaranteed to fit once R >= 4 (alpha_i + alpha_j) / min alpha
            if r.denominator != 1 and radius >= 4 * (alpha[i - 1] + alpha[j - 1]) / min(alpha):
                both_checked += 1
                both_missing += seen != allowed
    record(4, wrong == 0 and both_missing == 0 and both_checked > 0,
           f"{wrong} out-of-law lengths in 300 run families; both lengths seen in "
           f"{both_checked - both_missing}/{both_checked} non-integer pairs large enough to show them")


# 5 ---------------------------------------------------------------------------

def test_criterion_5_expansion_agreement():
    rng = random.Random(SEED + 5)
    mismatches = short = 0
    for _ in range(30):
        alpha = int_alpha(rng)
        run = trace_surface_expansion(generate_plane_patch(PlaneSpec(alpha, rho_of(rng)), 40), 30)
        ref = brun_expansion(alpha, 30).moves
        got = run.expansion.moves
        mismatches += got != ref[:len(got)]
        short += len(got) < min(3, len(ref))
    record(5, mismatches == 0 and short == 0,
           f"{mismatches} mismatched expansions, {short}/30 certified fewer than min(3, Brun length) steps")


# 6 ---------------------------------------------------------------------------

def random_quasi_plane(rng, radius):
    alpha = tuple(F(rng.randint(1, 12), rng.randint(1, 3)) for _ in range(3))
    x0 = tuple(rng.randint(-1, 1) for _ in range(3))
    plane = PlaneSpec(alpha, sum(a * c for a, c in zip(alpha, x0)))
    layer = [x for x in itertools.product(range(-6, 7), repeat=3)
             if plane.height(x) == plane.rho and sum(c * c for c in x) <= 36]
    defect = rng.sample(layer, min(len(layer), rng.randint(1, 6)))
    return quasi_plane_patch(QuasiPlaneSpec(plane, defect), radius)


def test_criterion_6_surface_preservation():
    rng = random.Random(SEED + 6)
    iterates = failures = 0
    for _ in range(20):
        q = random_quasi_plane(rng, 20)
        while True:
            r = tilde_T_detailed(q)
            if r.decision.outcome is not Outcome.MOVE:
                break
            q = r.patch
            iterates += 1
            if r.non_binary is not None or not q.is_binary():
                failures += 1
                break
            if q.certified_radius > 0 and not surface_check_d3(q).valid:
                failures += 1
                break
            if q.certified_radius == 0:
                break
    record(6, failures == 0 and iterates > 0, f"{iterates} iterates of 20 quasi-planes, {failures} failures")


# 7 ---------------------------------------------------------------------------

def test_criterion_7_defect_table():
    rng = random.Random(SEED + 7)
    box = list(itertools.product(range(-3, 4), repeat=3))
    # the table itself, on raw flip sums with an arbitrary finite D
    raw_rows, raw_bad = set(), 0
    for _ in range(10):
        plane = PlaneSpec(tuple(F(rng.randint(0, 6)) for _ in range(2)) + (F(rng.randint(1, 6)),), 0)
        D = set(rng.sample(box, 40))
        raw = add_flips(generate_plane_patch(plane, 8), [FlipSpec(y) for y in D])
        for x in itertools.product(range(-2, 3), repeat=3):
            for i in (1, 2, 3):
                p = plane.membership(x, i)
                a, b = x in D, vadd(x, unit(3, i)) in D
                raw_rows.add((p, a, b))
                raw_bad += raw[(x, i)] != p + a - b
    # defects on the layer: rows with P = 1 and x in D never occur
    layer_rows, valid_bad, off_layer_rejected = set(), 0, 0
    for _ in range(10):
        alpha = tuple(F(rng.randint(1, 9)) for _ in range(3))
        plane = PlaneSpec(alpha, 0)
        layer = [x for x in box if plane.height(x) == 0]
        q = QuasiPlaneSpec(plane, rng.sample(layer, min(len(layer), 5)))
        valid_bad += not quasi_plane_patch(q, 6).is_binary()
        for x in itertools.product(range(-4, 5), repeat=3):
            for i in (1, 2, 3):
                row = defect_row(q, x, i)
                layer_rows.add(row[:3])
                valid_bad += row.value not in (0, 1)
        off = next(x for x in box if plane.height(x) != 0)
        try:
            QuasiPlaneSpec(plane, [off])
        except ValueError:
            off_layer_rejected += 1
    invalid_ok = invalid_total = 0
    for alpha in [(1, 0, 2), (0, 1, 1), (3, 2, 0), (1, 0, 0), (0, 0, 5)]:
        plane = PlaneSpec(alpha, 0)
        layer = [x for x in itertools.product(range(-2, 3), repeat=3) if plane.height(x) == 0]
        for _ in range(4):
            q = QuasiPlaneSpec(plane, rng.sample(layer, rng.randint(1, 4)))
            invalid_total += 1
            layer_rows.update(defect_row(q, x, i)[:3] for x in layer for i in (1, 2, 3))
            try:
                quasi_plane_patch(q, 6)
            except InvalidDefectError as exc:
                raw = add_flips(generate_plane_patch(plane, 8), [FlipSpec(y) for y in q.defect])
                f, row = exc.face, exc.row
                layer_rows.add(row[:3])
                invalid_ok += (row == defect_row(q, f.x, f.t) and raw[f] == row.value
                               and row.value not in (0, 1))
    all_rows = set(itertools.product((0, 1), (False, True), (False, True)))
    impossible = {(1, True, False), (1, True, True)}
    ok = (raw_rows == all_rows and raw_bad == 0 and layer_rows == all_rows - impossible
          and valid_bad == 0 and invalid_ok == invalid_total and off_layer_rejected == 10)
    record(7, ok,
           f"{len(raw_rows)}/8 table rows checked on raw flip sums ({raw_bad} mismatches), "
           f"{len(layer_rows)}/6 rows reachable from the layer, {valid_bad} non-binary valid cases, "
           f"{invalid_ok}/{invalid_total} invalid defects rejected with a correct witness")


# 8 ---------------------------------------------------------------------------

def test_criterion_8_weak_convergence():
    rng = random.Random(SEED + 8)
    cases = [(F(1, 19), F(25, 76))]
    while len(cases) < 11:
        den = rng.randint(100, 10 ** 5)
        cases.append((F(rng.randint(1, den - 1), den), F(rng.randint(1, den - 1), den)))
    slow = nonmono = literal_nonmono = 0
    for beta in cases:
        alpha = (1,) + beta
        literal = [direction_distance((c.q,) + c.p, alpha) for c in convergents(beta, 20)]
        uniform = seed_uniform_distances(beta, 20)
        slow += min(literal) >= 1e-3 or min(uniform) >= 1e-3
        nonmono += any(b > a + 1e-9 for a, b in zip(uniform[3:], uniform[4:]))
        literal_nonmono += any(b > a + 1e-9 for a, b in zip(literal[3:], literal[4:]))
    record(8, slow == 0 and nonmono == 0,
           f"{11 - slow}/11 below 1e-3 within 20 steps; worst-seed distance nonincreasing in "
           f"{11 - nonmono}/11 (single-seed convergents: {11 - literal_nonmono}/11)")


# 9 ---------------------------------------------------------------------------

def test_criterion_9_vertex_signs():
    rng = random.Random(SEED + 9)
    violations = pairs = 0
    for _ in range(20):
        alpha = tuple(F(rng.randint(1, 20), rng.randint(1, 4)) for _ in range(3))
        base = generate_plane_patch(PlaneSpec(alpha, rho_of(rng)), 12)
        s, _ = random_valid_flips(base, rng.randint(0, 10), rng.randrange(10 ** 6))
        assert surface_check_d3(s).valid
        pts = np.array([v for v in vertex_points(s) if sum(c * c for c in v) <= 100])
        diff = pts[:, None, :] - pts[None, :, :]
        pos = np.all(diff > 0, axis=2)
        violations += int(pos.sum())  # a negative difference is the transpose of a positive one
        pairs += len(pts) * (len(pts) - 1) // 2
    record(9, violations == 0, f"{violations} sign violations over {pairs} vertex pairs")


# 10 --------------------------------------------------------------------------

def test_criterion_10_recognition():
    rng = random.Random(SEED + 10)
    planes_ok = flips_ok = 0
    for trial in range(50):
        alpha = tuple(F(rng.randint(1, 30), rng.randint(1, 5)) for _ in range(3))
        plane = PlaneSpec(alpha, rho_of(rng))
        p = generate_plane_patch(plane, 20)
        base = recognize_planarity(p, 30)
        planes_ok += base.verdict is Verdict.PLANE
        s, _ = random_valid_flips(p, 5, trial, exclude=on_layer(plane))
        r = recognize_planarity(s, 30)
        flips_ok += r.verdict is Verdict.NON_PLANAR or r.steps_certified < base.steps_certified
    record(10, planes_ok == 50 and flips_ok >= 45,
           f"{planes_ok}/50 planes PlaneConsistent, {flips_ok}/50 flipped patches flagged or shorter")


# 11 --------------------------------------------------------------------------

def test_criterion_11_determinism(tmp_path):
    def cli(*args):
        r = subprocess.run([sys.executable, "-m", "stepped", *map(str, args)], capture_output=True)
        return r.returncode, r.stdout

    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        d.mkdir()
        runs = [
            cli("generate", "plane", "--alpha", "3,2,1", "--rho", "1/3", "--radius", "10", "--out", d / "p.json"),
            cli("generate", "surface", "--alpha", "3,2,5", "--radius", "10", "--flips", "8", "--seed", "4",
                "--out", d / "s.json"),
            cli("apply", "--in", d / "p.json", "--brun", "1,1,2", "--inverse", "--out", d / "a.json"),
            cli("expand", "vector", "--alpha", "1,1/19,25/76", "--max-steps", "10"),
            cli("expand", "patch", "--in", d / "p.json", "--max-steps", "10"),
            cli("recognize", "--in", d / "s.json", "--max-steps", "30"),
            cli("render", "--in", d / "s.json", "--svg-out", d / "s.svg"),
            cli("decompose", "--in", d / "s.json", "--alpha", "3,2,5", "--n-max", "5"),
        ]
        files = [(d / n).read_bytes() for n in ("p.json", "s.json", "a.json", "s.svg")]
        outputs.append((runs, files))
    same = outputs[0] == outputs[1]
    codes = [c for c, _ in outputs[0][0]]
    record(11, same and all(c == 0 for c in codes),
           f"{len(codes)} commands and 4 files byte-identical across runs: {same}, exit codes {codes}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
