"""Hot kernels for gate/operator application on qubit tensors.

Two interchangeable implementations: a compiled Cython core (``_core``) and a
pure-numpy fallback (``_fallback``).  The compiled core is picked at import
when available; set ``DLAB_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

if os.environ.get("DLAB_PURE_PYTHON", "").strip() not in ("", "0"):
    _core = None
else:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None

IMPLEMENTATION = "cython" if _core is not None else "python"


def apply_matrix(flat: np.ndarray, mat: np.ndarray, axes: tuple[int, ...], n_axes: int) -> None:
    """Apply a 2^k x 2^k matrix to the given axes of a flattened [2]*n_axes tensor, in place.

    ``axes[0]`` is the most-significant bit of the matrix index.  ``flat`` must
    be C-contiguous complex128 of length 2**n_axes.
    """
    k = len(axes)
    if _core is not None and k <= 2:
        mat = np.ascontiguousarray(mat, dtype=np.complex128)
        if not mat.flags.writeable:
            # memoryview arguments must be writable even when never written
            mat = mat.copy()
        if k == 1:
            _core.apply_1q(flat, mat, axes[0], n_axes)
        else:
            _core.apply_2q(flat, mat, axes[0], axes[1], n_axes)
    else:
        _fallback.apply_matrix(flat, mat, axes, n_axes)
