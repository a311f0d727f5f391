"""
Synthetic degree samples from TPA and PLED.

Draws come from numpy's PCG64 bit generator seeded with the 64-bit sample
seed, so a (SampleSpec, seed) pair gives the same histogram on every platform.
"""

import logging
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .distributions import ModelParams, PledModel, PledParams, TpaModel, TpaParams, model_for
from .empirical import DegreeHistogram
from .exceptions import InvalidParameterError

logger = logging.getLogger('degrees')

GENERATOR = 'numpy.random.PCG64'
MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class SampleSpec:
    params: ModelParams
    n: int
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.params, (TpaParams, PledParams)):
            raise InvalidParameterError(f"unknown model parameters: {self.params!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, Integral) or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, Integral) or not 0 <= self.seed <= MAX_SEED:
            raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def label(self) -> str:
        return f"sample:{self.params.digest()};n={self.n};seed={self.seed}"


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _draw_tpa(model: TpaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Head by inverse cdf over a table, tail exactly as anchor + Geometric(1 - q) - 1"""
    u = rng.random(n)
    draws = np.empty(n, dtype=np.int64)
    head_mass = 1.0 - model.ccdf_anchor
    in_head = u < head_mass
    if model.anchor > model.d_min:
        head_degrees = np.arange(model.d_min, model.anchor, dtype=np.int64)
        cdf = np.cumsum(model.pmf_array(head_degrees))
        index = np.searchsorted(cdf, u[in_head], side='right')
        draws[in_head] = head_degrees[np.minimum(index, head_degrees.size - 1)]
    n_tail = int((~in_head).sum())
    success = 1.0 / model.inv_one_minus_q
    draws[~in_head] = model.anchor + rng.geometric(success, size=n_tail) - 1
    return draws


def _draw_pled(model: PledModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Inverse cdf over the model table, which runs until the remaining ccdf is
    below the model tolerance; uniforms past the last entry land on it.
    """
    degrees, cdf = model.cumulative_table()
    u = rng.random(n)
    index = np.searchsorted(cdf, u, side='right')
    return degrees[np.minimum(index, degrees.size - 1)]


def sample(spec: SampleSpec) -> DegreeHistogram:
    rng = _generator(spec.seed)
    model = model_for(spec.params)
    if isinstance(model, TpaModel):
        draws = _draw_tpa(model, spec.n, rng)
    else:
        draws = _draw_pled(model, spec.n, rng)
    degrees, counts = np.unique(draws, return_counts=True)
    logger.info(f"Drew {spec.n} degrees from {spec.params.digest()} (seed={spec.seed}): "
                f"{degrees.size} distinct, max {int(degrees[-1])}")
    return DegreeHistogram(tuple(zip(degrees.tolist(), counts.tolist())), spec.label)
