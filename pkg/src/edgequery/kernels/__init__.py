"""Kernel backend selection.

The hot loops (outcome evaluation, possible-edge elimination, unique-cover
scanning) exist twice: a compiled Cython extension and a NumPy fallback with
identical semantics.  The compiled backend is used when importable; set
``EDGEQUERY_KERNELS=pure`` or ``EDGEQUERY_KERNELS=compiled`` to force one.
Both produce bit-identical outputs, so the choice never affects results.
"""

from __future__ import annotations

import os

_requested = os.environ.get("EDGEQUERY_KERNELS", "").strip().lower()

if _requested in ("", "compiled"):
    try:
        from . import _ckern as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "EDGEQUERY_KERNELS=compiled but the extension is not built; "
                "reinstall with the Cython extension or unset the variable"
            )
        from . import pure as _impl

        BACKEND = "pure"
elif _requested == "pure":
    from . import pure as _impl

    BACKEND = "pure"
else:
    raise ValueError(f"EDGEQUERY_KERNELS must be 'pure' or 'compiled', got {_requested!r}")

eval_tests = _impl.eval_tests
cooccur_free_pairs = _impl.cooccur_free_pairs
unique_cover = _impl.unique_cover
pair_covers = _impl.pair_covers

__all__ = ["BACKEND", "eval_tests", "cooccur_free_pairs", "unique_cover", "pair_covers"]
