"""Input-validation helpers shared by the functional core and the estimators."""
import math
import numbers

import numpy as np

from .exceptions import CapacityError, InputError


def check_spins(s, n):
    """Return ``s`` as an int8 vector of +-1 values of length ``n``."""
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise InputError(f"spin vector must have length {n}, got shape {arr.shape}")
    if not np.all((arr == 1) | (arr == -1)):
        raise InputError("spin entries must be -1 or +1")
    return arr.astype(np.int8)


def check_spin_batch(s, n):
    """Accept one assignment or a (k, n) stack of them."""
    arr = np.asarray(s)
    if arr.ndim == 1:
        return check_spins(arr, n)
    if arr.ndim != 2 or arr.shape[1] != n:
        raise InputError(f"spin batch must have shape (k, {n}), got {arr.shape}")
    if not np.all((arr == 1) | (arr == -1)):
        raise InputError("spin entries must be -1 or +1")
    return arr.astype(np.int8)


def check_finite(x, name):
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"{name} must be finite, got {x}")
    return x


def check_positive(x, name):
    x = check_finite(x, name)
    if x <= 0:
        raise InputError(f"{name} must be positive, got {x}")
    return x


def check_probability(p):
    p = check_finite(p, "p")
    if not 0.0 <= p <= 1.0:
        raise InputError(f"edge probability must lie in [0, 1], got {p}")
    return p


def check_count(k, name, minimum=0):
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < minimum:
        raise InputError(f"{name} must be an integer >= {minimum}, got {k!r}")
    return int(k)


def check_capacity(n, limit, what):
    if n > limit:
        raise CapacityError(f"{what} supports n <= {limit}, got n = {n}")


def check_model(model):
    from .ising import IsingModel

    if not isinstance(model, IsingModel):
        raise InputError(f"expected an IsingModel, got {type(model).__name__}")
    return model


def check_integer_weights(model, what):
    """Periodic methods need an integer weight class."""
    if model.scale is None:
        raise InputError(f"{what} needs commensurable weights (integer weight class)")
    return model.scale
