import numpy as np

from fueltax.errors import ModelError


def r2(y_true, y_pred) -> float:
    """Coefficient of determination, ``1 - SSE / SST`` with SST about the mean of ``y_true``."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ModelError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size < 2:
        raise ModelError("r2 needs at least two observations")
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        raise ModelError("r2 is undefined for a constant target")
    sse = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - sse / sst
