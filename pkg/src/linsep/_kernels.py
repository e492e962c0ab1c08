"""Backend selection for the hot kernels.

Prefers the compiled extension; falls back to the pure numpy implementation
when the extension is missing or ``LINSEP_PURE_PYTHON=1`` is set.  Both expose
``mat_mul`` and ``rref_augmented`` with identical contracts.
"""

from __future__ import annotations

import os

if os.environ.get("LINSEP_PURE_PYTHON"):
    from . import _core_py as _impl
else:
    try:
        from . import _corex as _impl  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        from . import _core_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND_NAME
mat_mul = _impl.mat_mul
rref_augmented = _impl.rref_augmented
