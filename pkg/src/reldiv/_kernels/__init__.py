"""Selection-kernel backend dispatch.

The compiled extension is preferred when importable; the NumPy fallback is
semantically and bit-for-bit equivalent. Set RELDIV_BACKEND=python (or
cython) to force one at import time.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built; fallback only
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_forced = os.environ.get("RELDIV_BACKEND")
if _forced:
    if _forced not in _BACKENDS:
        raise RuntimeError(
            f"RELDIV_BACKEND={_forced!r} unavailable; choices: {sorted(_BACKENDS)}"
        )
    _active = _BACKENDS[_forced]
else:
    _active = _ckernels if _ckernels is not None else _pykernels


def active():
    """The kernel module currently in use."""
    return _active


def active_name() -> str:
    return _active.NAME


def available() -> dict:
    """Importable backends by name."""
    return dict(_BACKENDS)


def use(name: str):
    """Switch the active backend (mainly for tests and benchmarks)."""
    global _active
    if name not in _BACKENDS:
        raise KeyError(f"unknown backend {name!r}; choices: {sorted(_BACKENDS)}")
    _active = _BACKENDS[name]
