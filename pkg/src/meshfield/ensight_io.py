"""EnSight Case Gold ingestion (ASCII geometry and variables).

The ``.case`` index file names a Gold geometry file and optional
per-node/per-element variable files with a time set. Parts become mesh
regions; variables become transient result arrays. Binary Gold files
and changing geometry are rejected.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .elements import ElementType
from .errors import FileFormatError
from .mesh import Mesh, Region
from .results import AnalysisType, ResType, ResultArray, ResultContainer

_ELEMENT_KEYWORDS = {
    "bar2": ElementType.LINE2,
    "tria3": ElementType.TRIA3,
    "quad4": ElementType.QUAD4,
    "tetra4": ElementType.TET4,
    "pyramid5": ElementType.PYRA5,
    "penta6": ElementType.WEDGE6,
    "hexa8": ElementType.HEXA8,
}

_VARIABLE_KEYS = {
    "scalar per node": (ResType.NODE, 1),
    "vector per node": (ResType.NODE, 3),
    "scalar per element": (ResType.ELEMENT, 1),
    "vector per element": (ResType.ELEMENT, 3),
}


def read_ensight_case(path) -> tuple[Mesh, ResultContainer]:
    """Read a `.case` file plus the ASCII Gold files it references.

    Returns the mesh (one region per part) and a container of TRANSIENT
    arrays, one per variable and part, with step values taken from the
    time set. A case without variables yields an empty container.
    """
    case_path = Path(path)
    case = _parse_case(_read_text(case_path))
    folder = case_path.parent

    parts = _parse_geometry(_read_text(folder / case["geometry"]))
    mesh = _parts_to_mesh(parts)

    steps = case["time_values"]
    if steps is None:
        steps = np.array([0.0])
    container = ResultContainer(
        analysis_type=AnalysisType.TRANSIENT if case["variables"] else None,
        step_values=steps if case["variables"] else None,
    )
    for var in case["variables"]:
        arrays = _read_variable(folder, var, parts, steps, case)
        for arr in arrays:
            container.add(arr)
    container.validate()
    return mesh, container


def _read_text(path: Path) -> str:
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise FileFormatError(f"referenced file not found: {path}") from None
    head = data[:80]
    if b"Binary" in head or b"binary" in head:
        raise FileFormatError(
            f"'{path.name}' is a binary EnSight Gold file; ASCII only"
        )
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise FileFormatError(
            f"'{path.name}' is not ASCII text; ASCII only"
        ) from None


# ---------------------------------------------------------------------------
# .case index file

def _parse_case(text: str) -> dict:
    section = None
    geometry = None
    variables = []
    time_values = None
    num_steps = None
    start_number = 0
    increment = 1
    in_time_values = False

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        upper = line.upper()
        if upper in ("FORMAT", "GEOMETRY", "VARIABLE", "TIME"):
            section = upper
            in_time_values = False
            continue
        if section == "TIME" and in_time_values and ":" not in line:
            time_values.extend(_floats(line.split(), "time values"))
            continue
        if ":" not in line:
            raise FileFormatError(f"unparseable case line: '{line}'")
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        in_time_values = False
        if section == "FORMAT":
            if key == "type" and "gold" not in value.lower():
                raise FileFormatError(
                    f"unsupported format '{value}'; only EnSight Gold is read"
                )
        elif section == "GEOMETRY":
            if key == "model":
                tokens = value.split()
                if any("change_coords" in t for t in tokens):
                    raise FileFormatError(
                        "changing geometry (change_coords) is unsupported; "
                        "static geometry only"
                    )
                while tokens and _is_int(tokens[0]):
                    tokens.pop(0)  # time/file set references
                if not tokens:
                    raise FileFormatError(f"model line names no file: '{line}'")
                geometry = tokens[0]
        elif section == "VARIABLE":
            if key not in _VARIABLE_KEYS:
                raise FileFormatError(f"unsupported variable type '{key}'")
            tokens = value.split()
            while tokens and _is_int(tokens[0]):
                tokens.pop(0)
            if len(tokens) < 2:
                raise FileFormatError(
                    f"variable line needs a description and a filename: '{line}'"
                )
            res_type, dims = _VARIABLE_KEYS[key]
            variables.append(
                {
                    "name": " ".join(tokens[:-1]),
                    "filename": tokens[-1],
                    "res_type": res_type,
                    "dims": dims,
                }
            )
        elif section == "TIME":
            if key == "time set":
                if time_values is not None or num_steps is not None:
                    raise FileFormatError("only one time set is supported")
            elif key == "number of steps":
                num_steps = _int(value, "number of steps")
            elif key == "filename start number":
                start_number = _int(value, "filename start number")
            elif key == "filename increment":
                increment = _int(value, "filename increment")
            elif key == "time values":
                time_values = _floats(value.split(), "time values")
                in_time_values = True
        elif section is None:
            raise FileFormatError(f"content before any case section: '{line}'")

    if geometry is None:
        raise FileFormatError("case file names no geometry model")
    if time_values is not None:
        if num_steps is not None and len(time_values) != num_steps:
            raise FileFormatError(
                f"time set declares {num_steps} steps but lists "
                f"{len(time_values)} time values"
            )
        time_values = np.asarray(time_values, dtype=float)
    return {
        "geometry": geometry,
        "variables": variables,
        "time_values": time_values,
        "start_number": start_number,
        "increment": increment,
    }


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def _int(value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise FileFormatError(f"bad {what}: '{value}'") from None


def _floats(tokens, what) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise FileFormatError(f"bad {what}: {tokens}") from None


# ---------------------------------------------------------------------------
# Gold geometry

class _TokenStream:
    """Line-oriented reader that can pull numeric blocks across lines."""

    def __init__(self, text: str, name: str):
        self.lines = text.splitlines()
        self.pos = 0
        self.name = name

    def peek_line(self) -> str | None:
        pos = self.pos
        while pos < len(self.lines):
            if self.lines[pos].strip():
                return self.lines[pos].strip()
            pos += 1
        return None

    def next_line(self, expect: str) -> str:
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        raise FileFormatError(
            f"{self.name}: unexpected end of file (expected {expect})"
        )

    def numbers(self, count: int, what: str, kind=float) -> np.ndarray:
        out = []
        while len(out) < count:
            tokens = self.next_line(f"{count} {what} values").split()
            for t in tokens:
                try:
                    out.append(kind(t))
                except ValueError:
                    raise FileFormatError(
                        f"{self.name}: expected {what} value, got '{t}'"
                    ) from None
        if len(out) > count:
            raise FileFormatError(
                f"{self.name}: {what} block has {len(out)} values, "
                f"expected {count}"
            )
        return np.asarray(out, dtype=float if kind is float else np.int64)


def _parse_geometry(text: str) -> list[dict]:
    """Parts as dicts with coordinates and per-block connectivity."""
    s = _TokenStream(text, "geometry")
    s.next_line("description")  # two free-text description lines
    s.next_line("description")
    node_ids_present = False
    elem_ids_present = False
    while True:
        line = s.peek_line()
        if line is None:
            raise FileFormatError("geometry: no 'part' section found")
        low = line.lower()
        if low == "part":
            break
        s.next_line("header")
        if low.startswith("node id"):
            node_ids_present = low.split()[-1] in ("given", "ignore")
        elif low.startswith("element id"):
            elem_ids_present = low.split()[-1] in ("given", "ignore")
        elif low.startswith("extents"):
            s.numbers(6, "extents")
        else:
            raise FileFormatError(f"geometry: unknown header line '{line}'")

    parts = []
    while s.peek_line() is not None:
        if s.next_line("part").lower() != "part":
            raise FileFormatError("geometry: expected 'part'")
        number = int(s.numbers(1, "part number", kind=int)[0])
        description = s.next_line("part description")
        if s.next_line("coordinates").lower() != "coordinates":
            raise FileFormatError(
                f"geometry part {number}: expected 'coordinates' "
                "(structured parts are unsupported)"
            )
        nn = int(s.numbers(1, "node count", kind=int)[0])
        if node_ids_present:
            s.numbers(nn, "node id", kind=int)
        xyz = np.column_stack(
            [s.numbers(nn, f"{axis} coordinate") for axis in "xyz"]
        )
        blocks = []
        while True:
            line = s.peek_line()
            if line is None or line.lower() == "part":
                break
            keyword = s.next_line("element keyword").lower()
            if keyword not in _ELEMENT_KEYWORDS:
                raise FileFormatError(
                    f"geometry part {number}: unknown element keyword "
                    f"'{keyword}'"
                )
            etype = _ELEMENT_KEYWORDS[keyword]
            ne = int(s.numbers(1, "element count", kind=int)[0])
            if elem_ids_present:
                s.numbers(ne, "element id", kind=int)
            conn = s.numbers(ne * etype.node_count, "connectivity", kind=int)
            blocks.append(
                {
                    "keyword": keyword,
                    "type": etype,
                    "connectivity": conn.reshape(ne, etype.node_count),
                }
            )
        parts.append(
            {
                "number": number,
                "name": description.strip() or f"part_{number}",
                "coordinates": xyz,
                "blocks": blocks,
            }
        )
    return parts


def _parts_to_mesh(parts: list[dict]) -> Mesh:
    if not parts:
        raise FileFormatError("geometry: no parts")
    coords = np.vstack([p["coordinates"] for p in parts])
    types, rows = [], []
    regions = []
    node_offset = 0
    elem_offset = 0
    for p in parts:
        nn = len(p["coordinates"])
        part_elems = 0
        dim = 0
        for block in p["blocks"]:
            conn = block["connectivity"]
            if conn.size and (conn.min() < 1 or conn.max() > nn):
                raise FileFormatError(
                    f"geometry part {p['number']}: connectivity references "
                    f"node {conn.min() if conn.min() < 1 else conn.max()} "
                    f"outside 1..{nn}"
                )
            for row in conn + node_offset:
                types.append(int(block["type"]))
                rows.append(row)
            part_elems += len(conn)
            dim = max(dim, block["type"].dimension)
        regions.append(
            Region(
                p["name"],
                dim,
                np.arange(node_offset + 1, node_offset + nn + 1, dtype=np.int64),
                np.arange(elem_offset + 1, elem_offset + part_elems + 1,
                          dtype=np.int64),
            )
        )
        node_offset += nn
        elem_offset += part_elems
    width = max((len(r) for r in rows), default=1)
    conn = np.zeros((len(rows), width), dtype=np.int64)
    for i, row in enumerate(rows):
        conn[i, : len(row)] = row
    mesh = Mesh(coords, np.asarray(types, dtype=np.int64), conn, regions)
    mesh.validate()
    return mesh


# ---------------------------------------------------------------------------
# Gold variable files

def _step_filenames(pattern: str, n_steps: int, start: int, increment: int):
    if "*" not in pattern:
        return None
    first = pattern.index("*")
    stars = 0
    for ch in pattern[first:]:
        if ch != "*":
            break
        stars += 1
    if "*" in pattern[first + stars:]:
        raise FileFormatError(f"non-contiguous wildcard in '{pattern}'")
    names = []
    for k in range(n_steps):
        number = str(start + k * increment).zfill(stars)
        names.append(pattern[:first] + number + pattern[first + stars:])
    return names


def _read_variable(folder: Path, var: dict, parts, steps, case) -> list[ResultArray]:
    names = _step_filenames(
        var["filename"], len(steps), case["start_number"], case["increment"]
    )
    if names is None:
        if len(steps) != 1:
            raise FileFormatError(
                f"variable '{var['name']}' names one file "
                f"'{var['filename']}' but the time set has {len(steps)} steps"
            )
        names = [var["filename"]]

    per_step = [
        _parse_variable_file(_read_text(folder / n), n, var, parts) for n in names
    ]
    arrays = []
    for part in parts:
        num = part["number"]
        if any(num not in step for step in per_step):
            if all(num not in step for step in per_step):
                continue
            raise FileFormatError(
                f"variable '{var['name']}': part {num} present only in "
                "some steps"
            )
        data = np.stack([step[num] for step in per_step])
        arrays.append(
            ResultArray(
                data=data,
                quantity=var["name"],
                region=part["name"],
                res_type=var["res_type"],
                step_values=np.asarray(steps, dtype=float),
                analysis_type=AnalysisType.TRANSIENT,
            )
        )
    return arrays


def _parse_variable_file(text: str, filename: str, var: dict, parts):
    """Values per part number: (M, D) arrays in geometry element order."""
    s = _TokenStream(text, filename)
    s.next_line("description")
    part_sizes = {p["number"]: p for p in parts}
    out = {}
    while s.peek_line() is not None:
        if s.next_line("part").lower() != "part":
            raise FileFormatError(f"{filename}: expected 'part'")
        number = int(s.numbers(1, "part number", kind=int)[0])
        part = part_sizes.get(number)
        if part is None:
            raise FileFormatError(
                f"{filename}: part {number} is not in the geometry"
            )
        dims = var["dims"]
        if var["res_type"] is ResType.NODE:
            if s.next_line("coordinates").lower() != "coordinates":
                raise FileFormatError(f"{filename}: expected 'coordinates'")
            nn = len(part["coordinates"])
            vals = s.numbers(nn * dims, "variable").reshape(dims, nn).T
        else:
            chunks = []
            for block in part["blocks"]:
                keyword = s.next_line("element keyword").lower()
                if keyword != block["keyword"]:
                    raise FileFormatError(
                        f"{filename}: expected element keyword "
                        f"'{block['keyword']}', got '{keyword}'"
                    )
                ne = len(block["connectivity"])
                chunks.append(s.numbers(ne * dims, "variable").reshape(dims, ne).T)
            vals = (
                np.vstack(chunks) if chunks else np.zeros((0, dims))
            )
        out[number] = vals
    return out
