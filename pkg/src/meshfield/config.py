"""Runtime configuration knobs."""

from __future__ import annotations

import os


def worker_count() -> int:
    """Worker threads for parallelizable queries.

    Capped by the ``MESHFIELD_THREADS`` environment variable; defaults
    to the hardware parallelism.
    """
    env = os.environ.get("MESHFIELD_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"MESHFIELD_THREADS must be an integer, got '{env}'") from None
        if n >= 1:
            return n
    return os.cpu_count() or 1
