from typing import Any, Dict

import numpy as np


def encode_matrix(M) -> Dict[str, Any]:
    """Row-major {rows, cols, data: [[re, im], ...]}; floats keep their shortest exact repr."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    rows, cols = arr.shape
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(z.real), float(z.imag)] for z in arr.ravel(order="C")],
    }


def decode_matrix(payload: Dict[str, Any]) -> np.ndarray:
    rows, cols = int(payload["rows"]), int(payload["cols"])
    data = np.asarray(payload["data"], dtype=float).reshape(rows * cols, 2)
    return (data[:, 0] + 1j * data[:, 1]).reshape(rows, cols)
