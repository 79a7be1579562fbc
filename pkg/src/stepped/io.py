"""JSON encodings of patches, expansions and planarity reports."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .brun import Expansion
from .patch import INF, Face, Patch, to_fraction


def format_rational(r) -> str:
    if r == INF:
        return "inf"
    return str(Fraction(r))


def parse_rational(text: str):
    text = str(text).strip()
    if text in ("inf", "Infinity"):
        return INF
    return to_fraction(text)


def patch_to_dict(a: Patch) -> dict:
    return {
        "d": a.d,
        "certified_radius": format_rational(a.certified_radius),
        "faces": [{"x": list(f.x), "t": f.t, "w": w} for f, w in a.items()],
    }


def patch_from_dict(data: dict) -> Patch:
    try:
        d = int(data["d"])
        radius = parse_rational(data["certified_radius"])
        weights = {}
        for entry in data["faces"]:
            face = Face(tuple(int(c) for c in entry["x"]), int(entry["t"]))
            if face in weights:
                raise ValueError(f"face {face} listed twice")
            weights[face] = int(entry["w"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed patch JSON: {exc}") from exc
    return Patch(d, weights, radius)


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=False) + "\n"


def write_patch(a: Patch, path) -> None:
    Path(path).write_text(dumps(patch_to_dict(a)))


def read_patch(path) -> Patch:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return patch_from_dict(data)


def expansion_to_list(exp: Expansion) -> list[dict]:
    return [{"a": s.a, "i": s.i, "j": s.j} for s in exp.steps]


def report_to_dict(report, residual_ref: str | None = None) -> dict:
    out = {
        "verdict": report.verdict.value,
        "expansion": expansion_to_list(report.expansion),
        "termination": report.expansion.termination.value,
        "steps_certified": report.steps_certified,
        "candidate_direction": [format_rational(c) for c in report.candidate_direction],
        "detail": report.detail,
    }
    if report.evidence_step is not None:
        out["evidence_step"] = report.evidence_step
    if report.fitted_plane is not None:
        out["fitted_plane"] = {
            "alpha": [format_rational(c) for c in report.fitted_plane.alpha],
            "rho": format_rational(report.fitted_plane.rho),
        }
        out["defect"] = [list(y) for y in sorted(report.defect)]
    if residual_ref is not None:
        out["residual"] = residual_ref
    else:
        out["residual"] = patch_to_dict(report.residual)
    return out
