"""Hot propagation kernels with backend selection at import time.

The compiled Cython extension is preferred; the pure-numpy twin is used when
the extension is unavailable or when ``ROBUSTPULSE_PURE=1`` is set.  Both
expose the same functions with identical numerics.
"""

import os

if os.environ.get("ROBUSTPULSE_PURE", "") not in ("", "0"):
    from . import pure as _impl
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

BACKEND = _impl.BACKEND
propagate_pwc2 = _impl.propagate_pwc2
overlap_grad_pwc2 = _impl.overlap_grad_pwc2

__all__ = ["BACKEND", "propagate_pwc2", "overlap_grad_pwc2"]
