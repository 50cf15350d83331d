"""Read-only numpy arrays for pydantic models."""

from typing import Any, Optional

import numpy as np
from numpy.typing import DTypeLike


def frozen_array(
    value: Any,
    dtype: DTypeLike = float,
    ndim: Optional[int] = None,
    name: str = "array",
) -> np.ndarray:
    """Copy ``value`` into a finite, non-writeable array.

    Args:
        value: Array-like input
        dtype: Target dtype
        ndim: Required number of dimensions, if any
        name: Field name used in error messages

    Returns:
        Read-only array

    Raises:
        ValueError: If the shape is wrong or values are not finite
    """
    arr = np.array(value, dtype=dtype, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr
