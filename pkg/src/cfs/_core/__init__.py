"""Hot kernels for forbidden-offset computation.

The compiled extension is used when it has been built; otherwise the
pure-Python twin is loaded. Set ``CFS_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("CFS_BACKEND", "").lower() == "python":
    _impl = _fallback
else:
    try:
        from . import _kernel as _impl
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
forbidden_raw = _impl.forbidden_raw
conflicting_rows = _impl.conflicting_rows


def available_backends():
    """Importable kernel modules keyed by backend name."""
    out = {"python": _fallback}
    try:
        from . import _kernel
    except ImportError:
        pass
    else:
        out["compiled"] = _kernel
    return out
