"""Backend selection for the search kernels.

The compiled module is used when importable; set ``HALLPLANES_BACKEND=python``
to force the pure-Python implementation.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available() -> list[str]:
    return sorted(_BACKENDS)


def get(name: str | None = None):
    """Kernel module by name; ``None`` selects the default backend."""
    if name is None:
        name = BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {available()})") from None


_requested = os.environ.get("HALLPLANES_BACKEND", "").strip().lower()
if _requested:
    BACKEND = _requested if _requested in _BACKENDS else "python"
else:
    BACKEND = "cython" if _ckernels is not None else "python"
