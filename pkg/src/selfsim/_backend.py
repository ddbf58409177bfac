"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_kernels_py`` takes its place. The environment variable
``SELFSIM_BACKEND`` forces a choice at import and :func:`use` switches later.
"""
import os
from importlib import import_module

_MODULES = {"cython": "selfsim._kernels", "python": "selfsim._kernels_py"}


def load(name):
    """Return the kernel module for backend ``name`` ("cython" or "python")."""
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(_MODULES)}")
    return import_module(_MODULES[name])


def available():
    names = []
    for name in _MODULES:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


def use(name):
    """Make ``name`` the active backend for every subsequent solve."""
    global kernels, BACKEND
    kernels = load(name)
    BACKEND = name


_requested = os.environ.get("SELFSIM_BACKEND", "").strip().lower()
if _requested:
    use(_requested)
else:
    try:
        use("cython")
    except ImportError:
        use("python")
