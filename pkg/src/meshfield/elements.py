"""Finite-element type catalogue.

Every supported element type carries its canonical node count, its
topological dimension and a stable integer code. The enum *value* is the
code stored in container files, so in-memory arrays of codes can be
written out unchanged.

Node ordering convention: corner nodes come first, followed by edge,
face and volume nodes. All geometric routines that linearize an element
(centroid search, normals, projection) rely on the leading corner block.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class ElementType(IntEnum):
    """Element types with their container-file integer codes."""

    UNDEF = 0
    POINT = 1
    LINE2 = 2
    LINE3 = 3
    TRIA3 = 4
    TRIA6 = 5
    QUAD4 = 6
    QUAD8 = 7
    QUAD9 = 8
    TET4 = 9
    TET10 = 10
    HEXA8 = 11
    HEXA20 = 12
    HEXA27 = 13
    PYRA5 = 14
    PYRA13 = 15
    PYRA14 = 16
    WEDGE6 = 17
    WEDGE15 = 18
    WEDGE18 = 19

    @property
    def node_count(self) -> int:
        return _NODE_COUNT[self.value]

    @property
    def dimension(self) -> int:
        return _DIMENSION[self.value]

    @property
    def corner_count(self) -> int:
        """Number of leading corner nodes (linearized element)."""
        return _CORNER_COUNT[self.value]


_INFO = {
    ElementType.UNDEF: (0, 0, 0),
    ElementType.POINT: (1, 0, 1),
    ElementType.LINE2: (2, 1, 2),
    ElementType.LINE3: (3, 1, 2),
    ElementType.TRIA3: (3, 2, 3),
    ElementType.TRIA6: (6, 2, 3),
    ElementType.QUAD4: (4, 2, 4),
    ElementType.QUAD8: (8, 2, 4),
    ElementType.QUAD9: (9, 2, 4),
    ElementType.TET4: (4, 3, 4),
    ElementType.TET10: (10, 3, 4),
    ElementType.HEXA8: (8, 3, 8),
    ElementType.HEXA20: (20, 3, 8),
    ElementType.HEXA27: (27, 3, 8),
    ElementType.PYRA5: (5, 3, 5),
    ElementType.PYRA13: (13, 3, 5),
    ElementType.PYRA14: (14, 3, 5),
    ElementType.WEDGE6: (6, 3, 6),
    ElementType.WEDGE15: (15, 3, 6),
    ElementType.WEDGE18: (18, 3, 6),
}

# Code-indexed lookup tables for vectorized use on arrays of codes.
_MAX_CODE = max(t.value for t in ElementType)
_NODE_COUNT = np.zeros(_MAX_CODE + 1, dtype=np.int64)
_DIMENSION = np.zeros(_MAX_CODE + 1, dtype=np.int64)
_CORNER_COUNT = np.zeros(_MAX_CODE + 1, dtype=np.int64)
for _t, (_n, _d, _c) in _INFO.items():
    _NODE_COUNT[_t.value] = _n
    _DIMENSION[_t.value] = _d
    _CORNER_COUNT[_t.value] = _c

VALID_CODES = frozenset(t.value for t in ElementType)


def node_counts(codes: np.ndarray) -> np.ndarray:
    """Vectorized node count per element code."""
    return _NODE_COUNT[np.asarray(codes, dtype=np.int64)]


def dimensions(codes: np.ndarray) -> np.ndarray:
    """Vectorized topological dimension per element code."""
    return _DIMENSION[np.asarray(codes, dtype=np.int64)]


def corner_counts(codes: np.ndarray) -> np.ndarray:
    """Vectorized corner-node count per element code."""
    return _CORNER_COUNT[np.asarray(codes, dtype=np.int64)]


def check_codes(codes: np.ndarray) -> None:
    """Raise ``ValueError`` listing any unknown element type code."""
    codes = np.asarray(codes)
    bad = np.setdiff1d(np.unique(codes), np.fromiter(VALID_CODES, dtype=np.int64))
    if bad.size:
        raise ValueError(f"unknown element type code(s): {bad.tolist()}")
