"""Recognize a stepped plane, a flipped surface and a quasi-plane.

Run with ``python3 demos/recognize_planes.py``.
"""

from fractions import Fraction

from stepped import (
    PlaneSpec,
    QuasiPlaneSpec,
    generate_plane_patch,
    quasi_plane_patch,
    random_valid_flips,
    recognize_planarity,
)
from stepped.surface import on_layer


def show(label, patch):
    report = recognize_planarity(patch, 30)
    moves = " ".join(f"({s.a},{s.i},{s.j})" for s in report.expansion.steps)
    print(f"{label:>12}: {report.verdict.value:<22} steps={report.steps_certified:<2} {moves}")
    if report.detail:
        print(f"{'':>14}{report.detail}")


plane = PlaneSpec((Fraction(3), Fraction(5), Fraction(7)), Fraction(1, 2))
flat = generate_plane_patch(plane, 20)
show("plane", flat)

bumpy, flips = random_valid_flips(flat, 6, seed=1, exclude=on_layer(plane))
show("6 flips", bumpy)

layer = PlaneSpec((3, 5, 7), 0)
defect = [(0, 0, 0), (5, -3, 0), (-7, 0, 3)]
show("quasi-plane", quasi_plane_patch(QuasiPlaneSpec(layer, defect), 20))
