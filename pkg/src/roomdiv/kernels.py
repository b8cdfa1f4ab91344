"""Hot loops, compiled when the extension is built.

The Cython module is preferred; set ``ROOMDIV_PURE_PYTHON=1`` to force the
pure-Python fallback.  ``BACKEND`` names the one in use.
"""

import os

from . import _kernels_py

if os.environ.get("ROOMDIV_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

first_blocking = _impl.first_blocking
first_exchange = _impl.first_exchange
first_envy = _impl.first_envy
propagate = _impl.propagate


def backends():
    """Every importable kernel implementation, keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found
