"""Backend selection: compiled kernel extension vs pure NumPy fallback.

The compiled module is preferred when the extension built; set
ANITREE_BACKEND=pure (or =compiled) to force a choice. Both backends expose
the same call surface and produce bit-identical outputs.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built; fall back silently
    _compiled = None


def available_backends() -> tuple[str, ...]:
    return ("compiled", "pure") if _compiled is not None else ("pure",)


def get_backend(name: str | None = None):
    """Resolve a backend module by name, env override, or availability."""
    name = name or os.environ.get("ANITREE_BACKEND")
    if name is None:
        return _compiled if _compiled is not None else _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError(
                "compiled backend requested but the extension is not built "
                "(reinstall without ANITREE_SKIP_EXT)"
            )
        return _compiled
    if name == "pure":
        return _kernels_py
    raise ValueError(f"unknown backend {name!r} (expected 'compiled' or 'pure')")
