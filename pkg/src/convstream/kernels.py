"""Backend dispatch for the fire kernels.

The compiled extension is preferred when present; the numpy fallback is
always available. ``CONVSTREAM_BACKEND=python|cython`` forces a choice at
import time, ``use_backend`` switches at runtime (stages look the functions
up through this module on every fire).
"""

import os

from . import _pykernels
from .errors import ConfigError

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available_backends():
    return tuple(sorted(_BACKENDS))


def use_backend(name: str) -> None:
    """Point ``conv_fire``/``pool_fire`` at the named implementation."""
    global conv_fire, pool_fire, BACKEND
    try:
        impl = _BACKENDS[name]
    except KeyError:
        raise ConfigError(
            f"unknown or unavailable kernel backend {name!r}; "
            f"available: {', '.join(available_backends())}"
        ) from None
    conv_fire = impl.conv_fire
    pool_fire = impl.pool_fire
    BACKEND = impl.BACKEND


_forced = os.environ.get("CONVSTREAM_BACKEND")
if _forced:
    use_backend(_forced)
else:
    use_backend("cython" if _ckernels is not None else "python")
