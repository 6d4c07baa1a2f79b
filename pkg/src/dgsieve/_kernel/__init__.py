"""Hot-kernel backend selection.

Tries the compiled extension first and falls back to the pure
Python/numpy implementations. Set DGSIEVE_PURE=1 to force the fallback
(useful for benchmarking the two against each other).
"""

import os

if os.environ.get("DGSIEVE_PURE", "") == "1":
    from . import pure as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

BACKEND = _impl.BACKEND
enumerate_gram = _impl.enumerate_gram
sample_gaussian_1d_batch = _impl.sample_gaussian_1d_batch
pair_scan = _impl.pair_scan

from . import pure  # noqa: E402  (always importable, for benchmarks)

__all__ = [
    "BACKEND",
    "enumerate_gram",
    "sample_gaussian_1d_batch",
    "pair_scan",
    "pure",
]
