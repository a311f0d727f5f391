"""
Tempered preferential attachment (TPA) degree distribution.

Below the tempering threshold A2 the pmf follows the product recursion
p(i+1)/p(i) = i/(i+w+1); from A2 on it is geometric with ratio
q = A2/(A2+w). Head weights are accumulated in log space so thresholds up
to 10^6 neither overflow nor underflow.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .base import (
    DegreeModel, ModelId, format_number, optional_int, require_int, require_real,
)
from ..exceptions import DegenerateSupportError, DomainError


@dataclass(frozen=True)
class TpaParams:
    a2: int
    w: float
    d_min: int = 1
    a1_meta: Optional[int] = None  # carried for reports only

    def __post_init__(self):
        if isinstance(self.d_min, int) and not isinstance(self.d_min, bool) and self.d_min < 1:
            raise DegenerateSupportError(f"d_min must be >= 1, got {self.d_min}")
        object.__setattr__(self, 'a2', require_int('a2', self.a2, 1))
        object.__setattr__(self, 'w', require_real('w', self.w, positive=True))
        object.__setattr__(self, 'd_min', require_int('d_min', self.d_min, 1))
        object.__setattr__(self, 'a1_meta', optional_int('a1', self.a1_meta, 1))

    @property
    def gamma(self) -> float:
        """Asymptotic head exponent label, 1 + w"""
        return 1.0 + self.w

    def digest(self) -> str:
        text = f"a2={self.a2};w={format_number(self.w)};d_min={self.d_min}"
        if self.a1_meta is not None:
            text += f";a1={self.a1_meta}"
        return text


class TpaModel(DegreeModel):
    """
    Exact TPA pmf/ccdf normalized on {d_min, d_min+1, ...}.

    Head quantities are stored scaled by exp(-M), M being the largest head
    log-weight, so p_A2 = exp(-M) / denom and every probability is a ratio
    of scaled terms over denom.
    """
    model_id = ModelId.TPA

    def __init__(self, params: TpaParams):
        super().__init__(params)
        a2, w, d_min = params.a2, params.w, params.d_min

        self.q = a2 / (a2 + w)
        self.log_q = math.log(a2) - math.log(a2 + w)
        # 1/(1-q), written so it stays exact as q -> 1
        self.inv_one_minus_q = (a2 + w) / w
        # With d_min beyond the threshold the support is purely geometric
        self.anchor = max(a2, d_min)

        if d_min < a2:
            k = np.arange(d_min, a2, dtype=float)
            steps = np.log1p((w + 1.0) / k)
            # log h(j) = sum_{k=j}^{a2-1} log((k+w+1)/k)
            log_head = np.cumsum(steps[::-1])[::-1]
            shift = float(log_head[0])
            head = np.exp(log_head - shift)
            suffix = np.cumsum(head[::-1])[::-1]
            head_sum = float(suffix[0])
        else:
            log_head = np.empty(0)
            shift = 0.0
            head = np.empty(0)
            suffix = np.empty(0)
            head_sum = 0.0

        self._log_head = log_head
        self._head = head
        self._suffix = suffix
        self._shift = shift
        self._tail_scaled = math.exp(math.log(self.inv_one_minus_q) - shift)
        self._denom = self._tail_scaled + head_sum
        self._log_denom = shift + math.log(self._denom)

        self.p_anchor = math.exp(-self._log_denom)
        self.log_p_anchor = -self._log_denom
        self.ccdf_anchor = self._tail_scaled / self._denom
        self.log_ccdf_anchor = math.log(self.inv_one_minus_q) - self._log_denom

    @property
    def p_a2(self) -> float:
        return self.p_anchor

    def pmf_array(self, degrees) -> np.ndarray:
        x = self.validate_degrees(degrees)
        out = np.empty(x.shape, dtype=float)
        head = x < self.anchor
        out[head] = self._head[x[head] - self.d_min] / self._denom
        out[~head] = self.p_anchor * np.power(self.q, x[~head] - self.anchor)
        return out

    def ccdf_array(self, degrees) -> np.ndarray:
        x = self.validate_degrees(degrees)
        out = np.empty(x.shape, dtype=float)
        head = x < self.anchor
        out[head] = (self._tail_scaled + self._suffix[x[head] - self.d_min]) / self._denom
        out[~head] = self.ccdf_anchor * np.power(self.q, x[~head] - self.anchor)
        return out

    def log_pmf_array(self, degrees) -> np.ndarray:
        x = self.validate_degrees(degrees)
        out = np.empty(x.shape, dtype=float)
        head = x < self.anchor
        out[head] = self._log_head[x[head] - self.d_min] - self._log_denom
        out[~head] = self.log_p_anchor + (x[~head] - self.anchor) * self.log_q
        return out

    def log_ccdf_array(self, degrees) -> np.ndarray:
        x = self.validate_degrees(degrees)
        out = np.empty(x.shape, dtype=float)
        head = x < self.anchor
        scaled = self._tail_scaled + self._suffix[x[head] - self.d_min]
        out[head] = np.log(scaled) - math.log(self._denom)
        out[~head] = self.log_ccdf_anchor + (x[~head] - self.anchor) * self.log_q
        return out

    def log_pmf(self, x: int) -> float:
        return float(self.log_pmf_array(np.array([self._check_degree(x)]))[0])

    def log_ccdf(self, x: int) -> float:
        return float(self.log_ccdf_array(np.array([self._check_degree(x)]))[0])

    def ccdf_head_branch(self, x: int) -> float:
        """p_A2 (1/(1-q) + sum_{j=x}^{A2-1} prod_{k=j}^{A2-1} (k+w+1)/k), for d_min <= x <= A2"""
        x = self._check_degree(x)
        if x > self.params.a2:
            raise DomainError(f"head form holds up to a2={self.params.a2}, got {x}")
        partial = self._suffix[x - self.d_min] if x < self.params.a2 else 0.0
        return float((self._tail_scaled + partial) / self._denom)

    def ccdf_tail_branch(self, x: int) -> float:
        """(p_A2/(1-q)) q^(x-A2), for x >= max(A2, d_min)"""
        x = self._check_degree(x)
        if x < self.anchor:
            raise DomainError(f"geometric form holds from {self.anchor}, got {x}")
        return float(self.ccdf_anchor * self.q ** (x - self.anchor))


@lru_cache(maxsize=64)
def tpa_model(params: TpaParams) -> TpaModel:
    return TpaModel(params)


def tpa_tail_ratio(params: TpaParams) -> float:
    return tpa_model(params).q


def tpa_p_a2(params: TpaParams) -> float:
    """
    Normalizing constant p_A2 for support starting at d_min.

    When d_min > a2 this is the first-term mass (1 - q) of the purely
    geometric distribution on {d_min, ...}.
    """
    return tpa_model(params).p_anchor


def tpa_pmf(params: TpaParams, x: int) -> float:
    return tpa_model(params).pmf(x)


def tpa_ccdf(params: TpaParams, x: int) -> float:
    return tpa_model(params).ccdf(x)
