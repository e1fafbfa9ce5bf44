"""Triangle-soup STL files, ASCII and binary.

A file starting with ``solid`` that parses as the ASCII grammar is read
as text; everything else is read as the 80-byte-header binary layout.
Per-facet vertices are merged into shared connectivity by quantized
coordinate hashing; stored facet normals are ignored (the winding
defines them).
"""

from __future__ import annotations

import struct
import warnings
from pathlib import Path

import numpy as np

from .elements import ElementType
from .errors import FileFormatError
from .mesh import Mesh, Region

_MERGE_REL_TOL = 1e-9
_BINARY_RECORD = np.dtype(
    [("normal", "<f4", 3), ("verts", "<f4", (3, 3)), ("attr", "<u2")]
)


def read_stl(path) -> Mesh:
    """Read an STL file into a single-region triangle mesh.

    The region is named after the solid (ASCII) or ``stl`` (binary).
    Vertices closer than 1e-9 of the bounding-box diagonal collapse to
    one node.
    """
    data = Path(path).read_bytes()
    if data.startswith(b"solid"):
        text = _try_decode(data)
        if text is not None:
            return _build_mesh(*_parse_ascii(text))
    return _build_mesh(*_parse_binary(data))


def _try_decode(data: bytes) -> str | None:
    """Decode candidate ASCII content; None means treat as binary."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return None
    # binary files may start with "solid" too; require the grammar's
    # keywords before committing to the text parser
    if "endsolid" in text or "facet" in text:
        return text
    return None


def _parse_ascii(text: str):
    lines = [
        (ln, raw.strip()) for ln, raw in enumerate(text.splitlines(), 1) if raw.strip()
    ]
    pos = 0

    def take(expect: str | None = None):
        nonlocal pos
        if pos >= len(lines):
            raise FileFormatError(
                f"unexpected end of ASCII STL (expected '{expect}')"
            )
        ln, line = lines[pos]
        pos += 1
        return ln, line, line.split()

    ln, line, tokens = take("solid")
    if tokens[0] != "solid":
        raise FileFormatError(f"line {ln}: expected 'solid', got '{tokens[0]}'")
    name = " ".join(tokens[1:]) or "stl"

    verts = []
    while True:
        ln, line, tokens = take("facet normal or endsolid")
        if tokens[0] == "endsolid":
            break
        if tokens[:2] != ["facet", "normal"] or len(tokens) != 5:
            raise FileFormatError(
                f"line {ln}: expected 'facet normal nx ny nz', got '{line}'"
            )
        _floats(tokens[2:], ln)  # stored normal: validated, then ignored
        ln, line, tokens = take("outer loop")
        if tokens != ["outer", "loop"]:
            raise FileFormatError(f"line {ln}: expected 'outer loop', got '{line}'")
        for _ in range(3):
            ln, line, tokens = take("vertex")
            if tokens[0] != "vertex" or len(tokens) != 4:
                raise FileFormatError(
                    f"line {ln}: expected 'vertex x y z', got '{line}'"
                )
            verts.append(_floats(tokens[1:], ln))
        ln, line, tokens = take("endloop")
        if tokens[0] != "endloop":
            raise FileFormatError(f"line {ln}: expected 'endloop', got '{line}'")
        ln, line, tokens = take("endfacet")
        if tokens[0] != "endfacet":
            raise FileFormatError(f"line {ln}: expected 'endfacet', got '{line}'")
    if pos != len(lines):
        ln, line = lines[pos]
        raise FileFormatError(f"line {ln}: content after 'endsolid': '{line}'")
    return np.asarray(verts, dtype=float).reshape(-1, 3), name


def _floats(tokens, ln) -> list[float]:
    try:
        out = [float(t) for t in tokens]
    except ValueError:
        raise FileFormatError(
            f"line {ln}: expected numbers, got {tokens}"
        ) from None
    if not all(np.isfinite(out)):
        raise FileFormatError(f"line {ln}: non-finite coordinate in {tokens}")
    return out


def _parse_binary(data: bytes):
    if len(data) < 84:
        raise FileFormatError(
            f"binary STL needs an 84-byte header, file has {len(data)} bytes"
        )
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) < expected:
        raise FileFormatError(
            f"truncated binary STL: header promises {count} triangles "
            f"({expected} bytes), file has {len(data)}"
        )
    records = np.frombuffer(data, dtype=_BINARY_RECORD, count=count, offset=84)
    verts = records["verts"].reshape(-1, 3).astype(np.float64)
    if verts.size and not np.all(np.isfinite(verts)):
        raise FileFormatError("binary STL contains non-finite vertex coordinates")
    return verts, "stl"


def _build_mesh(verts: np.ndarray, name: str) -> Mesh:
    n_tri = len(verts) // 3
    if n_tri == 0:
        warnings.warn(f"STL solid '{name}' contains no facets")
        mesh = Mesh(
            np.zeros((0, 3)),
            np.zeros(0, dtype=np.int64),
            np.zeros((0, 3), dtype=np.int64),
            [Region(name, 2, np.zeros(0, np.int64), np.zeros(0, np.int64))],
        )
        mesh.validate()
        return mesh

    span = verts.max(axis=0) - verts.min(axis=0)
    diag = float(np.linalg.norm(span))
    tol = _MERGE_REL_TOL * diag if diag > 0 else _MERGE_REL_TOL
    keys = np.round(verts / tol)

    node_of: dict[tuple, int] = {}
    coords = []
    conn = np.zeros(len(verts), dtype=np.int64)
    for i, key in enumerate(map(tuple, keys)):
        node = node_of.get(key)
        if node is None:
            node = len(coords) + 1
            node_of[key] = node
            coords.append(verts[i])
        conn[i] = node
    coords = np.asarray(coords)
    conn = conn.reshape(n_tri, 3)

    mesh = Mesh(
        coords,
        np.full(n_tri, int(ElementType.TRIA3), dtype=np.int64),
        conn,
        [
            Region(
                name,
                2,
                np.arange(1, len(coords) + 1, dtype=np.int64),
                np.arange(1, n_tri + 1, dtype=np.int64),
            )
        ],
    )
    mesh.validate()
    return mesh
