"""
Power law with exponential decay (PLED): p(x) = A x^-b exp(-x/c), x >= d_min.

Infinite sums are truncated once an upper bound on the remainder falls
below tol times the accumulated sum. Terms are kept scaled by the first
term, so large d_min or steep b never underflow the table. Sums that
would need more than CLOSED_TAIL_START explicit terms (large c with a
shallow b) are closed with an Euler-Maclaurin tail built on the upper
incomplete gamma function.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import special

from .base import DegreeModel, ModelId, format_number, require_int, require_real
from ..exceptions import ConvergenceError, DegenerateSupportError, InvalidToleranceError

logger = logging.getLogger('degrees')

DEFAULT_TOL = 1e-12
MAX_TOL = 1e-6
TERM_CAP = 50_000_000
FIRST_CHUNK = 1024
MAX_CHUNK = 1 << 20
CLOSED_TAIL_START = 1 << 16
# |d/dx log term| at the closing point; the first dropped correction is of order slope^6
CLOSED_TAIL_MAX_SLOPE = 1e-3
# Below this every remaining scaled term is zero in double precision
UNDERFLOW_LOG = math.log(np.finfo(float).tiny)


@dataclass(frozen=True)
class PledParams:
    b: float
    c: float
    d_min: int = 2

    def __post_init__(self):
        if isinstance(self.d_min, int) and not isinstance(self.d_min, bool) and self.d_min < 1:
            raise DegenerateSupportError(f"d_min must be >= 1, got {self.d_min}")
        object.__setattr__(self, 'b', require_real('b', self.b))
        object.__setattr__(self, 'c', require_real('c', self.c, positive=True))
        object.__setattr__(self, 'd_min', require_int('d_min', self.d_min, 1))

    def digest(self) -> str:
        return f"b={format_number(self.b)};c={format_number(self.c)};d_min={self.d_min}"


def validate_tol(tol) -> float:
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not (0 < tol <= MAX_TOL):
        raise InvalidToleranceError(f"tol must lie in (0, {MAX_TOL}], got {tol!r}")
    return float(tol)


def log_term(b: float, c: float, x: float) -> float:
    return -b * math.log(x) - x / c


def log_remainder_bound(b: float, c: float, start: int) -> float:
    """
    Log of an upper bound on sum_{x >= start} x^-b exp(-x/c).

    Term ratios are at most exp(-1/c) for b >= 0 and at most
    ((start+1)/start)^|b| exp(-1/c) past start for b < 0, giving a geometric
    bound; for b > 1 the integral of the power law gives a second one.
    """
    first = log_term(b, c, start)
    if b >= 0:
        log_ratio = -1.0 / c
    else:
        log_ratio = -b * math.log1p(1.0 / start) - 1.0 / c
    if log_ratio < 0:
        bound = first - math.log(-math.expm1(log_ratio))
    else:
        bound = math.inf
    if b > 1 and start >= 2:
        integral = -start / c + (1.0 - b) * math.log(start - 1) - math.log(b - 1.0)
        bound = min(bound, integral)
    return bound


def log_upper_gamma(a: float, z: float) -> Optional[float]:
    """log Gamma(a, z) for z > 0 and real a, or None when it is not representable"""
    if a > 0:
        upper = float(special.gammaincc(a, z))
        if not upper > 0:
            return None
        return float(special.gammaln(a)) + math.log(upper)
    steps = math.ceil(-a)
    top = a + steps
    if top == 0:
        value = float(special.exp1(z))
    else:
        value = float(special.gamma(top) * special.gammaincc(top, z))
    # Gamma(s, z) = (Gamma(s + 1, z) - z^s e^-z) / s
    for k in range(1, steps + 1):
        s = top - k
        value = (value - math.exp(s * math.log(z) - z)) / s
    if not (math.isfinite(value) and value > 0):
        return None
    return math.log(value)


def closed_tail(b: float, c: float, start: int, log_scale: float) -> Optional[float]:
    """
    Euler-Maclaurin value of sum_{x >= start} exp(log_term(x) - log_scale):
    integral + f/2 - f'/12 + f'''/720, with the integral equal to
    c^(1-b) Gamma(1-b, start/c). None while the terms still vary too fast.
    """
    slope = -b / start - 1.0 / c
    if abs(slope) > CLOSED_TAIL_MAX_SLOPE:
        return None
    log_gamma = log_upper_gamma(1.0 - b, start / c)
    if log_gamma is None:
        return None
    integral = math.exp((1.0 - b) * math.log(c) + log_gamma - log_scale)
    f = math.exp(log_term(b, c, start) - log_scale)
    curvature = b / start ** 2
    third = -2.0 * b / start ** 3
    d1 = f * slope
    d3 = f * (slope ** 3 + 3.0 * slope * curvature + third)
    tail = integral + f / 2.0 - d1 / 12.0 + d3 / 720.0
    return tail if math.isfinite(tail) and tail > 0 else None


def truncated_terms(b: float, c: float, start: int, tol: float, log_scale: float,
                    close: bool = True) -> Tuple[np.ndarray, Optional[float]]:
    """
    Scaled terms exp(log_term(x) - log_scale) for x = start, start+1, ... up to
    the truncation point, plus the closed-form sum past it when the series was
    closed analytically (None when it was summed out explicitly).
    """
    chunks = []
    partial_sums = []
    low = start
    size = FIRST_CHUNK
    while True:
        x = np.arange(low, low + size, dtype=float)
        chunk = np.exp(-b * np.log(x) - x / c - log_scale)
        chunks.append(chunk)
        partial_sums.append(float(chunk.sum()))
        low += size

        total = math.fsum(partial_sums)
        bound = log_remainder_bound(b, c, low) - log_scale
        if bound < UNDERFLOW_LOG or (total > 0 and bound <= math.log(tol) + math.log(total)):
            return np.concatenate(chunks), None
        if close and low - start >= CLOSED_TAIL_START:
            tail = closed_tail(b, c, low, log_scale)
            if tail is not None:
                return np.concatenate(chunks), tail
        if low - start >= TERM_CAP:
            raise ConvergenceError(
                f"PLED sum from {start} with b={b}, c={c} did not reach tol={tol} "
                f"within {TERM_CAP} terms"
            )
        size = min(size * 2, MAX_CHUNK)


def tail_sum(b: float, c: float, start: int, tol: float, log_scale: float) -> float:
    terms, closed = truncated_terms(b, c, start, tol, log_scale)
    return math.fsum(terms) + (closed or 0.0)


class PledModel(DegreeModel):
    """PLED normalized on {d_min, ...} with the infinite sums truncated at tolerance tol"""
    model_id = ModelId.PLED

    def __init__(self, params: PledParams, tol: float = DEFAULT_TOL):
        super().__init__(params)
        self.tol = validate_tol(tol)
        b, c, d_min = params.b, params.c, params.d_min

        self._log_scale = log_term(b, c, d_min)
        self._terms, closed = truncated_terms(b, c, d_min, self.tol, self._log_scale)
        self.table_end = d_min + self._terms.size  # first degree not in the table
        self.closed = closed is not None
        if closed is None:
            self._remainder = tail_sum(b, c, self.table_end, self.tol, self._log_scale)
        else:
            self._remainder = closed
        # suffix[i] = remainder + sum of terms[i:]
        self._suffix = np.cumsum(np.concatenate(([self._remainder], self._terms[::-1])))[:0:-1]
        self._total = float(self._suffix[0])
        self.normalizer = math.exp(-self._log_scale) / self._total
        logger.debug(
            f"PLED {params.digest()}: {self._terms.size} terms at tol={self.tol}"
            f"{' (closed tail)' if self.closed else ''}"
        )

    def pmf_array(self, degrees) -> np.ndarray:
        x = self.validate_degrees(degrees).astype(float)
        b, c = self.params.b, self.params.c
        return np.exp(-b * np.log(x) - x / c - self._log_scale) / self._total

    def ccdf_array(self, degrees) -> np.ndarray:
        x = self.validate_degrees(degrees)
        out = np.empty(x.shape, dtype=float)
        inside = x < self.table_end
        out[inside] = self._suffix[x[inside] - self.d_min] / self._total
        for i in np.flatnonzero(~inside):
            out[i] = self._tail_sum(int(x[i])) / self._total
        return out

    def _tail_sum(self, start: int) -> float:
        if start == self.table_end:
            return self._remainder
        return tail_sum(self.params.b, self.params.c, start, self.tol, self._log_scale)

    def cumulative_table(self):
        """Degrees and cumulative probabilities, summed out until the remaining mass is below tol"""
        terms = self._terms
        if self.closed:
            terms, _ = truncated_terms(
                self.params.b, self.params.c, self.d_min, self.tol, self._log_scale, close=False,
            )
        degrees = np.arange(self.d_min, self.d_min + terms.size, dtype=np.int64)
        return degrees, np.cumsum(terms) / self._total


@lru_cache(maxsize=16)
def pled_model(params: PledParams, tol: float = DEFAULT_TOL) -> PledModel:
    return PledModel(params, tol)


def pled_normalizer(params: PledParams, tol: float = DEFAULT_TOL) -> float:
    """A = [sum_{x >= d_min} x^-b exp(-x/c)]^-1"""
    return pled_model(params, validate_tol(tol)).normalizer


def pled_pmf(params: PledParams, x: int, tol: float = DEFAULT_TOL) -> float:
    return pled_model(params, validate_tol(tol)).pmf(x)


def pled_ccdf(params: PledParams, x: int, tol: float = DEFAULT_TOL) -> float:
    return pled_model(params, validate_tol(tol)).ccdf(x)
