"""Small shared helpers."""
import numpy as np


def as_rng(rng):
    """Coerce ``rng`` (Generator, seed int, or None) to a numpy Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def complex_normal(rng, shape, power=1.0):
    """Circular complex Gaussian samples with E|x|^2 = power."""
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
