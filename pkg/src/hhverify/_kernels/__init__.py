"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``HHVERIFY_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python fallback is loaded.
"""

import importlib
import os

import numpy as np

from . import _pykernels

_force_py = os.environ.get("HHVERIFY_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def _as_c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def permanent_ryser(a, backend=None):
    impl = _pick(backend)
    return float(impl.permanent_ryser(_as_c(a)))


def weighted_permutation_sum(a, perms, weights, backend=None):
    impl = _pick(backend)
    perms = np.ascontiguousarray(perms, dtype=np.int_)
    return float(impl.weighted_permutation_sum(_as_c(a), perms, _as_c(weights)))


def newton_divdiff_batch(xs, fs, backend=None):
    impl = _pick(backend)
    return np.asarray(impl.newton_divdiff_batch(_as_c(xs), _as_c(fs)))


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")


def available_backends():
    names = ["python"]
    try:
        importlib.import_module("._ckernels", __name__)
        names.append("cython")
    except ImportError:
        pass
    return names
