import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from numbers import Integral, Real
from typing import Iterable, Optional

import numpy as np

from ..exceptions import DomainError, InvalidParameterError

logger = logging.getLogger('degrees')


class ModelId(str, Enum):
    TPA = 'TPA'
    PLED = 'PLED'


def format_number(value: float) -> str:
    """Render a number with 12 significant digits (the only rendering used in outputs)"""
    if isinstance(value, Integral):
        return str(int(value))
    return f"{float(value):.12g}"


def require_int(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def require_real(name: str, value, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value}")
    if positive and value <= 0:
        raise InvalidParameterError(f"{name} must be > 0, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class ModelEvaluation:
    """Tabulated pmf and ccdf of one model over an ascending degree list"""
    degrees: np.ndarray
    pmf: np.ndarray
    ccdf: np.ndarray
    model_id: ModelId
    params_digest: str

    def rows(self) -> Iterable[tuple]:
        for x, p, c in zip(self.degrees, self.pmf, self.ccdf):
            yield int(x), float(p), float(c)


class DegreeModel(ABC):
    """
    Base class for discrete degree distributions supported on {d_min, d_min+1, ...}.

    Subclasses provide vectorized pmf/ccdf; the scalar accessors and the
    tabulation are shared.
    """
    model_id: ModelId

    def __init__(self, params):
        self.params = params

    @property
    def d_min(self) -> int:
        return self.params.d_min

    @abstractmethod
    def pmf_array(self, degrees) -> np.ndarray:
        pass

    @abstractmethod
    def ccdf_array(self, degrees) -> np.ndarray:
        pass

    def log_ccdf_array(self, degrees) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(self.ccdf_array(degrees))

    def pmf(self, x: int) -> float:
        return float(self.pmf_array(np.array([self._check_degree(x)]))[0])

    def ccdf(self, x: int) -> float:
        return float(self.ccdf_array(np.array([self._check_degree(x)]))[0])

    def tabulate(self, degrees) -> ModelEvaluation:
        x = self.validate_degrees(degrees)
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise InvalidParameterError("degrees must be strictly ascending")
        pmf = self.pmf_array(x)
        ccdf = self.ccdf_array(x)
        for array in (x, pmf, ccdf):
            array.setflags(write=False)
        return ModelEvaluation(
            degrees=x,
            pmf=pmf,
            ccdf=ccdf,
            model_id=self.model_id,
            params_digest=self.params.digest(),
        )

    def validate_degrees(self, degrees) -> np.ndarray:
        x = np.asarray(degrees)
        if x.ndim == 0:
            x = x.reshape(1)
        if x.size and not np.issubdtype(x.dtype, np.integer):
            if not np.all(np.equal(np.mod(x, 1), 0)):
                raise DomainError("degrees must be integers")
        x = x.astype(np.int64)
        if x.size and x.min() < self.d_min:
            raise DomainError(
                f"degree {int(x.min())} is below the minimum supported degree {self.d_min}"
            )
        return x

    def _check_degree(self, x) -> int:
        if isinstance(x, bool) or not isinstance(x, Integral):
            raise DomainError(f"degree must be an integer, got {x!r}")
        if x < self.d_min:
            raise DomainError(f"degree {x} is below the minimum supported degree {self.d_min}")
        return int(x)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.params.digest()})"


def optional_int(name: str, value, minimum: int) -> Optional[int]:
    if value is None:
        return None
    return require_int(name, value, minimum)
