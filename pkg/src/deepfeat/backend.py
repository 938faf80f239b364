"""Hot-kernel backend selection.

The random-kernel extractor has two interchangeable implementations: a
numba @njit kernel and a pure-numpy path. ``DEEPFEAT_BACKEND`` picks one:

    auto   use numba when importable (default)
    numba  require numba, fail loudly if missing
    numpy  force the pure-numpy path

Both paths accumulate taps in the same order, so their outputs are
bit-identical; the benchmark in benchmarks/bench_rocket.py compares speed.
"""

from __future__ import annotations

import os

_VALID = ("auto", "numba", "numpy")


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401

        return True
    except ImportError:
        return False


def use_numba() -> bool:
    """Resolve the DEEPFEAT_BACKEND env flag at call time."""
    choice = os.environ.get("DEEPFEAT_BACKEND", "auto").lower()
    if choice not in _VALID:
        raise ValueError(f"DEEPFEAT_BACKEND must be one of {_VALID}, got {choice!r}")
    if choice == "numpy":
        return False
    if choice == "numba":
        if not _numba_available():
            raise RuntimeError("DEEPFEAT_BACKEND=numba but numba is not importable")
        return True
    return _numba_available()
