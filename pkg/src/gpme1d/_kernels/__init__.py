"""Hot-loop kernels: compiled extension when available, NumPy fallback otherwise.

Set GPME1D_FORCE_FALLBACK=1 to skip the extension (used by the benchmark and the
backend-parity tests).
"""

import os

if os.environ.get("GPME1D_FORCE_FALLBACK"):
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "python"

explicit_interior = _impl.explicit_interior
implicit_interior = _impl.implicit_interior
state_stats = _impl.state_stats
