"""Hot numerical kernels with a compiled core and a NumPy fallback.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
NumPy implementations in ``_pykernels`` are used.  Setting the environment
variable ``RSPCAT_PURE_PYTHON=1`` forces the fallback.

Kernels
-------
hermite_functions
    Normalized Hermite functions by scaled recurrence.
mixed_block
    Contraction of the mixed two-mode Fock coefficients with an Alice kernel.
alice_weights
    Alice's reduced photon-number distribution from the same coefficients.
wigner_grid
    Wigner function on a grid via normalized Laguerre recurrences.
"""

import os

from . import _pykernels

_NAMES = ("hermite_functions", "mixed_block", "alice_weights", "wigner_grid")


def _load_compiled():
    if os.environ.get("RSPCAT_PURE_PYTHON", "").strip() not in ("", "0"):
        return None
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()
BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels

hermite_functions = _impl.hermite_functions
mixed_block = _impl.mixed_block
alice_weights = _impl.alice_weights
wigner_grid = _impl.wigner_grid


def available_backends():
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.append("cython")
    return names


def get_backend(name):
    """Return the module implementing backend ``name`` ('python' or 'cython')."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
