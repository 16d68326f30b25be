"""Backend selection for the hot backprojection kernels.

The compiled extension is used when it imported successfully; otherwise the
pure-numpy fallback takes over.  ``CYLSRT_BACKEND=python`` or
``CYLSRT_BACKEND=cython`` forces a choice (the latter fails loudly when the
extension is missing).
"""

import os

from . import _kernels_py
from .errors import ValidationError

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_ENV_VAR = "CYLSRT_BACKEND"


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name=None):
    """Return the kernel module for ``name`` (or the active default)."""
    if name is None:
        name = os.environ.get(_ENV_VAR, "").strip().lower() or None
    if name in (None, "auto"):
        return _compiled if _compiled is not None else _kernels_py
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ValidationError("compiled kernel extension is not available")
        return _compiled
    raise ValidationError(f"unknown kernel backend {name!r}")


def active_backend() -> str:
    return get_backend().BACKEND_NAME
