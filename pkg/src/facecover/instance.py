"""JSON instance files.

An instance names the simplex and a list of set descriptors::

    {
      "dim": 2,
      "simplex": [[0, 0], [1, 0], [0, 1]],
      "sets": [
        {"type": "face", "index": 1},
        {"type": "face-hull", "index": 2, "extras": [[0.3, 0.3]]},
        {"type": "vpolytope", "points": [[0, 0], [1, 0], [0.2, 0.2]]},
        {"type": "ball", "center": [0.2, 0.2], "radius": 0.1},
        {"type": "halfspaces", "normals": [[-1, 0]], "offsets": [-0.2]}
      ],
      "assignment": {"1": 1, "2": 2, "3": 3}
    }

Indices are 1-based.  ``face-hull`` is the convex hull of face ``index`` and
the extra points.  Halfspace sets are cut down to the simplex.  In one
dimension points may be written as bare numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from facecover.bodies import Ball, ConvexBody, FaceBody, HalfspaceSet, VPolytope, face_containment_gap
from facecover.errors import ParseError, ValidationError
from facecover.simplex import MEMBERSHIP_TOL, Simplex

SET_TYPES = ("vpolytope", "ball", "halfspaces", "face", "face-hull")


@dataclass
class Instance:
    dim: int
    simplex: Simplex
    sets: list[dict]
    bodies: list[ConvexBody] = field(compare=False, repr=False)
    assignment: dict[int, int] | None = None

    def to_dict(self) -> dict:
        doc = {
            "dim": self.dim,
            "simplex": self.simplex.vertices.tolist(),
            "sets": self.sets,
        }
        if self.assignment is not None:
            doc["assignment"] = {str(i): a for i, a in self.assignment.items()}
        return doc

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _fail(path, message):
    raise ValidationError(f"{path}: {message}")


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        _fail(path, "number must be finite")
    return float(value)


def _integer(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    return value


def _point(value, dim, path) -> list[float]:
    if dim == 1 and not isinstance(value, list):
        return [_number(value, path)]
    if not isinstance(value, list):
        _fail(path, f"expected a list of {dim} numbers")
    if len(value) != dim:
        _fail(path, f"expected {dim} coordinates, got {len(value)}")
    return [_number(x, f"{path}[{k}]") for k, x in enumerate(value)]


def _points(value, dim, path, simplex=None) -> list[list[float]]:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a nonempty list of points")
    pts = [_point(p, dim, f"{path}[{k}]") for k, p in enumerate(value)]
    if simplex is not None:
        for k, p in enumerate(pts):
            _inside(simplex, p, f"{path}[{k}]")
    return pts


def _inside(simplex, p, path):
    if not simplex.contains(p, MEMBERSHIP_TOL):
        _fail(path, f"point {p} lies outside the simplex")


def _field(desc, key, path):
    if key not in desc:
        _fail(path, f"missing field {key!r}")
    return desc[key]


def _face_index(value, dim, path) -> int:
    i = _integer(value, path)
    if not 1 <= i <= dim + 1:
        _fail(path, f"face index {i} outside 1..{dim + 1}")
    return i


def _build_set(desc, simplex: Simplex, path):
    """Normalised descriptor and body for one entry of ``sets``."""
    if not isinstance(desc, dict):
        _fail(path, "set descriptor must be an object")
    kind = _field(desc, "type", path)
    n = simplex.dim
    if kind == "vpolytope":
        pts = _points(_field(desc, "points", path), n, f"{path}.points", simplex)
        return {"type": kind, "points": pts}, VPolytope(pts, dim=n)
    if kind == "ball":
        center = _point(_field(desc, "center", path), n, f"{path}.center")
        _inside(simplex, center, f"{path}.center")
        radius = _number(_field(desc, "radius", path), f"{path}.radius")
        if radius < 0:
            _fail(f"{path}.radius", "radius must be >= 0")
        return {"type": kind, "center": center, "radius": radius}, Ball(center, radius)
    if kind == "halfspaces":
        normals = _field(desc, "normals", path)
        offsets = _field(desc, "offsets", path)
        if not isinstance(normals, list) or not normals:
            _fail(f"{path}.normals", "expected a nonempty list of vectors")
        normals = [_point(v, n, f"{path}.normals[{k}]") for k, v in enumerate(normals)]
        if not isinstance(offsets, list) or len(offsets) != len(normals):
            _fail(f"{path}.offsets", "expected one offset per normal")
        offsets = [_number(b, f"{path}.offsets[{k}]") for k, b in enumerate(offsets)]
        for k, v in enumerate(normals):
            if not any(v):
                _fail(f"{path}.normals[{k}]", "normal must be nonzero")
        body = HalfspaceSet(normals, offsets, ambient=simplex)
        if body.vertices().shape[0] == 0:
            _fail(path, "halfspaces do not meet the simplex")
        return {"type": kind, "normals": normals, "offsets": offsets}, body
    if kind == "face":
        i = _face_index(_field(desc, "index", path), n, f"{path}.index")
        return {"type": kind, "index": i}, FaceBody(simplex.face(i))
    if kind == "face-hull":
        i = _face_index(_field(desc, "index", path), n, f"{path}.index")
        extras = desc.get("extras") or []
        if extras:
            extras = _points(extras, n, f"{path}.extras", simplex)
        gens = np.vstack([simplex.face(i).vertices] + ([np.array(extras)] if extras else []))
        return {"type": kind, "index": i, "extras": extras}, VPolytope(gens)
    _fail(f"{path}.type", f"unknown set type {kind!r}; expected one of {', '.join(SET_TYPES)}")


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        _fail("$", "instance must be a JSON object")
    dim = _integer(_field(doc, "dim", "$"), "dim")
    if dim < 1:
        _fail("dim", "dimension must be >= 1")
    rows = _field(doc, "simplex", "$")
    if not isinstance(rows, list) or len(rows) != dim + 1:
        _fail("simplex", f"expected {dim + 1} vertices")
    verts = [_point(r, dim, f"simplex[{k}]") for k, r in enumerate(rows)]
    try:
        simplex = Simplex(verts)
    except ValidationError as exc:
        _fail("simplex", str(exc))
    raw_sets = _field(doc, "sets", "$")
    if not isinstance(raw_sets, list) or not raw_sets:
        _fail("sets", "expected a nonempty list of set descriptors")
    sets, bodies = [], []
    for k, desc in enumerate(raw_sets):
        norm, body = _build_set(desc, simplex, f"sets[{k}]")
        sets.append(norm)
        bodies.append(body)
    assignment = None
    if doc.get("assignment") is not None:
        raw = doc["assignment"]
        if not isinstance(raw, dict):
            _fail("assignment", "expected an object mapping face index to set index")
        assignment = {}
        for key, value in raw.items():
            path = f"assignment[{key!r}]"
            try:
                i = int(key)
            except ValueError:
                _fail(path, "face index must be an integer")
            i = _face_index(i, dim, path)
            a = _integer(value, path)
            if not 1 <= a <= len(bodies):
                _fail(path, f"set index {a} outside 1..{len(bodies)}")
            gap = face_containment_gap(simplex.face(i), bodies[a - 1])
            if gap > 1e-8:
                _fail(path, f"face {i} is not contained in set {a} (gap {gap:.3g})")
            assignment[i] = a
        assignment = dict(sorted(assignment.items()))
    return Instance(dim, simplex, sets, bodies, assignment)


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def serialize_instance(inst: Instance) -> str:
    return json.dumps(inst.to_dict(), indent=2) + "\n"
