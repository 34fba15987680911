"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels when it
is missing. Set ``SENSORTOPICS_PURE=1`` to force the fallback (used by the
parity test and the benchmark). Both backends produce bit-identical output.
"""

from __future__ import annotations

import os

from . import _gibbs_py

if os.environ.get("SENSORTOPICS_PURE"):
    _backend = _gibbs_py
    BACKEND = "pure"
else:
    try:
        from . import _gibbs as _backend  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _backend = _gibbs_py
        BACKEND = "pure"

init_assignments = _backend.init_assignments
sweep_train = _backend.sweep_train
sweep_doc = _backend.sweep_doc


def get_backend(name: str | None = None):
    """Explicit backend lookup ('compiled' or 'pure'); None gives the default."""
    if name is None:
        return _backend
    if name == "pure":
        return _gibbs_py
    if name == "compiled":
        from . import _gibbs

        return _gibbs
    raise ValueError(f"unknown kernel backend {name!r}")
