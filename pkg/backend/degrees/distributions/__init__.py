"""
Exact TPA and PLED degree distributions
"""

from typing import Union

from .base import DegreeModel, ModelEvaluation, ModelId, format_number
from .pled import (
    DEFAULT_TOL, PledModel, PledParams, pled_ccdf, pled_model, pled_normalizer, pled_pmf,
)
from .tpa import TpaModel, TpaParams, tpa_ccdf, tpa_model, tpa_p_a2, tpa_pmf, tpa_tail_ratio
from ..exceptions import InvalidParameterError

ModelParams = Union[TpaParams, PledParams]


def model_for(params: ModelParams, tol: float = DEFAULT_TOL) -> DegreeModel:
    """Cached model instance for a parameter set"""
    if isinstance(params, TpaParams):
        return tpa_model(params)
    if isinstance(params, PledParams):
        return pled_model(params, tol)
    raise InvalidParameterError(f"unknown model parameters: {params!r}")


def build_model(params: ModelParams, tol: float = DEFAULT_TOL) -> DegreeModel:
    """Fresh, uncached model instance (used by the fit search)"""
    if isinstance(params, TpaParams):
        return TpaModel(params)
    if isinstance(params, PledParams):
        return PledModel(params, tol)
    raise InvalidParameterError(f"unknown model parameters: {params!r}")


def tabulate(params: ModelParams, degrees, tol: float = DEFAULT_TOL) -> ModelEvaluation:
    return model_for(params, tol).tabulate(degrees)


__all__ = [
    'DEFAULT_TOL', 'DegreeModel', 'ModelEvaluation', 'ModelId', 'ModelParams',
    'PledModel', 'PledParams', 'TpaModel', 'TpaParams',
    'build_model', 'format_number', 'model_for', 'tabulate',
    'pled_ccdf', 'pled_normalizer', 'pled_pmf',
    'tpa_ccdf', 'tpa_p_a2', 'tpa_pmf', 'tpa_tail_ratio',
]
