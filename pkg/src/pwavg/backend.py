"""Kernel selection: compiled extension if available, pure Python otherwise.

Set PWAVG_BACKEND=python to force the fallback, PWAVG_BACKEND=c to require
the compiled kernel (import fails if it is missing).  Both kernels expose
the same functions; benchmarks/bench_backends.py compares them.
"""

import os

from . import _kernel_py

_choice = os.environ.get("PWAVG_BACKEND", "auto").lower()

_core = None
if _choice in ("auto", "c"):
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None
        if _choice == "c":
            raise ImportError(
                "PWAVG_BACKEND=c requested but the compiled kernel is not "
                "built; reinstall with a working C compiler") from None
elif _choice != "python":
    raise ImportError(f"unknown PWAVG_BACKEND value {_choice!r}")

_DEFAULT = _core if _core is not None else _kernel_py

BACKEND_NAME = _DEFAULT.NAME


def default_kernel():
    return _DEFAULT


def kernels():
    """All importable kernels, compiled one first."""
    out = []
    if _core is not None:
        out.append(_core)
    out.append(_kernel_py)
    return out
