"""Pure-numpy kernel implementation; same contract as the compiled core."""
from __future__ import annotations

import numpy as np


def apply_matrix(flat: np.ndarray, mat: np.ndarray, axes: tuple[int, ...], n_axes: int) -> None:
    k = len(axes)
    tensor = flat.reshape([2] * n_axes)
    # moveaxis gives a writable view; the reshape below copies, so scatter back.
    view = np.moveaxis(tensor, axes, range(n_axes - k, n_axes))
    res = view.reshape(-1, 2**k) @ mat.T
    view[...] = res.reshape(view.shape)
