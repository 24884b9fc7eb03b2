"""OBJ and JSON mesh files.

OBJ output writes one ``f`` record per (merged) face with 1-based indices and
coordinates at full double precision. The base face index travels in a
``# base_face: k`` comment; readers that ignore it fall back to ``base_face``
given by the caller, or to 0.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import MeshFormatError
from .mesh import Mesh, triangulate_units

__all__ = ["to_obj", "from_obj", "to_json_text", "from_json_text", "write_mesh", "read_mesh"]

_BASE_RE = re.compile(r"#\s*base_face\s*:\s*(-?\d+)")


def to_obj(mesh: Mesh, triangulate: bool = False) -> str:
    if triangulate:
        mesh = triangulate_units(mesh)
    lines = [f"# base_face: {mesh.base_face}"]
    for x, y, z in mesh.vertices:
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    for f in mesh.faces:
        lines.append("f " + " ".join(str(i + 1) for i in f))
    return "\n".join(lines) + "\n"


def from_obj(text: str, base_face: int | None = None) -> Mesh:
    verts, faces = [], []
    found_base = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _BASE_RE.match(line)
            if m:
                found_base = int(m.group(1))
            continue
        parts = line.split()
        try:
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ValueError("vertex needs three coordinates")
                verts.append([float(t) for t in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    k = int(tok.split("/")[0])
                    idx.append(k - 1 if k > 0 else len(verts) + k)
                faces.append(tuple(idx))
        except (ValueError, IndexError) as exc:
            raise MeshFormatError(f"line {lineno}: {exc}") from exc
    base = base_face if base_face is not None else (found_base if found_base is not None else 0)
    return _checked(verts, faces, base)


def to_json_text(mesh: Mesh) -> str:
    return json.dumps(mesh.to_json(), indent=1)


def from_json_text(text: str, base_face: int | None = None) -> Mesh:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "vertices" not in data or "faces" not in data:
        raise MeshFormatError('mesh JSON needs "vertices" and "faces"')
    try:
        faces = [tuple(int(i) for i in f) for f in data["faces"]]
        base = base_face if base_face is not None else int(data.get("base_face", 0))
    except (TypeError, ValueError) as exc:
        raise MeshFormatError(str(exc)) from exc
    return _checked(data["vertices"], faces, base)


def _checked(verts, faces, base: int) -> Mesh:
    try:
        v = np.asarray(verts, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MeshFormatError(f"bad vertex data: {exc}") from exc
    if v.ndim != 2 or v.shape[1] != 3 or len(v) == 0:
        raise MeshFormatError("vertices must be a non-empty list of [x, y, z]")
    if not np.all(np.isfinite(v)):
        raise MeshFormatError("non-finite coordinates")
    if not faces:
        raise MeshFormatError("no faces")
    for f in faces:
        if len(f) < 3 or min(f) < 0 or max(f) >= len(v):
            raise MeshFormatError(f"bad face {list(f)}")
    if not 0 <= base < len(faces):
        raise MeshFormatError(f"base_face {base} out of range")
    return Mesh(v, faces, base)


def write_mesh(mesh: Mesh, path: str | Path, fmt: str | None = None, triangulate: bool = False):
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "obj")
    if fmt == "json":
        if triangulate:
            mesh = triangulate_units(mesh)
        path.write_text(to_json_text(mesh))
    else:
        path.write_text(to_obj(mesh, triangulate))


def read_mesh(path: str | Path, base_face: int | None = None) -> Mesh:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return from_json_text(text, base_face)
    return from_obj(text, base_face)
