"""Optional numba acceleration.

Set ``MULTIPOINT_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is installed.  The compiled stage formulas are the very same source as
:mod:`multipoint.schemes.formulas`, re-executed with ``numba.njit`` as the
decorator.
"""

from __future__ import annotations

import importlib.util
import os
from functools import lru_cache

ENV_FLAG = "MULTIPOINT_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def numba_available() -> bool:
    return numba is not None


def numba_enabled() -> bool:
    """True unless numba is missing or disabled through the environment."""
    return numba is not None and os.environ.get(ENV_FLAG, "").strip() not in ("1", "true", "yes")


def default_backend() -> str:
    return "numba" if numba_enabled() else "numpy"


def njit(fn):
    if numba is None:
        raise RuntimeError("numba is not installed")
    return numba.njit(cache=False)(fn)


@lru_cache(maxsize=1)
def jitted_formulas():
    """A private copy of the formulas module whose stages are numba-compiled."""
    from ..schemes import formulas

    spec = importlib.util.spec_from_file_location(
        "multipoint.schemes._formulas_njit", formulas.__file__)
    mod = importlib.util.module_from_spec(spec)
    mod._JIT = njit
    spec.loader.exec_module(mod)
    return mod
