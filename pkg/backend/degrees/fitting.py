"""
CCDF curve fitting for TPA and PLED.

Both fits minimize the sum of squared differences between log10 empirical
and log10 model ccdf over the observed degrees: a coarse grid first, then a
shrinking-neighborhood refinement. R and R^2 are the Pearson correlation of
the same two vectors and its square.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .distributions import (
    DEFAULT_TOL, ModelId, ModelParams, PledParams, TpaParams, build_model, format_number,
    model_for,
)
from .empirical import EmpiricalDistribution
from .exceptions import (
    ConvergenceError, InsufficientDataError, InvalidParameterError, MismatchedSupportError,
    SearchFailureError, ZeroVarianceError,
)

logger = logging.getLogger('degrees')

LN10 = math.log(10.0)
MIN_FIT_DEGREES = 5
R_SPACES = ('log', 'linear')
WEIGHTINGS = ('uniform', 'counts')
# Relative step below which refinement stops; reports carry 12 significant digits
STEP_RESOLUTION = 1e-12


class Residual(NamedTuple):
    degree: int
    log10_empirical: float
    log10_model: float


@dataclass(frozen=True)
class FitConfig:
    a2_range: Tuple[int, int] = (2, 2000)
    w_range: Tuple[float, float] = (0.01, 10.0)
    b_range: Tuple[float, float] = (0.5, 4.0)
    c_range: Tuple[float, float] = (10.0, 1e5)
    grid_density: int = 64
    refine_iterations: int = 60
    refine_shrink: float = 0.5
    sum_tol: float = 1e-10
    r_space: str = 'log'
    weighting: str = 'uniform'
    threads: int = 0  # 0 = implementation default; never affects results

    def __post_init__(self):
        a2_lo, a2_hi = self.a2_range
        if int(a2_lo) != a2_lo or int(a2_hi) != a2_hi or not (1 <= a2_lo <= a2_hi):
            raise InvalidParameterError(f"a2_range must be integers 1 <= lo <= hi, got {self.a2_range}")
        object.__setattr__(self, 'a2_range', (int(a2_lo), int(a2_hi)))
        for name in ('w_range', 'c_range'):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo <= hi):
                raise InvalidParameterError(f"{name} must satisfy 0 < lo <= hi, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        b_lo, b_hi = self.b_range
        if not (np.isfinite(b_lo) and np.isfinite(b_hi) and b_lo <= b_hi):
            raise InvalidParameterError(f"b_range must satisfy lo <= hi, got {self.b_range}")
        object.__setattr__(self, 'b_range', (float(b_lo), float(b_hi)))
        if self.grid_density < 2:
            raise InvalidParameterError(f"grid_density must be >= 2, got {self.grid_density}")
        if self.refine_iterations < 1:
            raise InvalidParameterError(f"refine_iterations must be >= 1, got {self.refine_iterations}")
        if not 0 < self.refine_shrink < 1:
            raise InvalidParameterError(f"refine_shrink must lie in (0, 1), got {self.refine_shrink}")
        if not 0 < self.sum_tol <= 1e-6:
            raise InvalidParameterError(f"sum_tol must lie in (0, 1e-6], got {self.sum_tol}")
        if self.r_space not in R_SPACES:
            raise InvalidParameterError(f"r_space must be one of {R_SPACES}, got {self.r_space!r}")
        if self.weighting not in WEIGHTINGS:
            raise InvalidParameterError(f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if self.threads < 0:
            raise InvalidParameterError(f"threads must be >= 0, got {self.threads}")

    @classmethod
    def from_settings(cls, **overrides) -> 'FitConfig':
        """Defaults from the Django settings, with explicit overrides on top"""
        from django.conf import settings

        values = {
            'grid_density': settings.TAILFIT_GRID_DENSITY,
            'refine_iterations': settings.TAILFIT_REFINE_ITERATIONS,
            'refine_shrink': settings.TAILFIT_REFINE_SHRINK,
            'sum_tol': settings.TAILFIT_SUM_TOL,
            'threads': settings.TAILFIT_THREADS,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def digest(self) -> str:
        def span(pair):
            return f"{format_number(pair[0])}..{format_number(pair[1])}"

        return ';'.join([
            f"a2_range={span(self.a2_range)}",
            f"w_range={span(self.w_range)}",
            f"b_range={span(self.b_range)}",
            f"c_range={span(self.c_range)}",
            f"grid_density={self.grid_density}",
            f"refine_iterations={self.refine_iterations}",
            f"refine_shrink={format_number(self.refine_shrink)}",
            f"sum_tol={format_number(self.sum_tol)}",
            f"r_space={self.r_space}",
            f"weighting={self.weighting}",
        ])

    def worker_count(self) -> int:
        if self.threads:
            return self.threads
        return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class FitReport:
    model_id: ModelId
    params: ModelParams
    r: float
    r_squared: float
    sse_log_ccdf: float
    residuals: Tuple[Residual, ...]
    d_min: int
    config_digest: str
    grid_min_sse: float = math.inf
    evaluations: int = 0

    def params_dict(self) -> Dict[str, object]:
        if isinstance(self.params, TpaParams):
            values = {'a2': self.params.a2, 'w': self.params.w, 'gamma': self.params.gamma}
            if self.params.a1_meta is not None:
                values['a1'] = self.params.a1_meta
            return values
        return {'b': self.params.b, 'c': self.params.c}


def pearson_r(u: Sequence[float], v: Sequence[float]) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.size < 3:
        raise InsufficientDataError(f"need at least 3 points for a correlation, got {u.size}")
    du = u - u.mean()
    dv = v - v.mean()
    su = float(np.dot(du, du))
    sv = float(np.dot(dv, dv))
    if su == 0.0:
        raise ZeroVarianceError("empirical log-ccdf vector has zero variance")
    if sv == 0.0:
        raise ZeroVarianceError("model log-ccdf vector has zero variance")
    r = float(np.dot(du, dv)) / math.sqrt(su * sv)
    return min(1.0, max(-1.0, r))


def _check_support(params: ModelParams, dist: EmpiricalDistribution):
    if params.d_min != dist.d_min:
        raise MismatchedSupportError(
            f"model d_min={params.d_min} differs from empirical d_min={dist.d_min}"
        )


def log_ccdf_residuals(params: ModelParams, dist: EmpiricalDistribution,
                       tol: float = DEFAULT_TOL) -> List[Residual]:
    """(degree, log10 empirical ccdf, log10 model ccdf) at observed degrees where both logs are finite"""
    _check_support(params, dist)
    model = model_for(params, tol)
    with np.errstate(divide='ignore'):
        log_emp = np.log10(dist.ccdf)
    log_model = model.log_ccdf_array(dist.degrees) / LN10
    keep = np.isfinite(log_emp) & np.isfinite(log_model)
    return [
        Residual(int(x), float(e), float(m))
        for x, e, m in zip(dist.degrees[keep], log_emp[keep], log_model[keep])
    ]


def r_squared(params: ModelParams, dist: EmpiricalDistribution, space: str = 'log',
              tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    residuals = log_ccdf_residuals(params, dist, tol)
    return _correlation(residuals, space)


def _correlation(residuals: Sequence[Residual], space: str) -> Tuple[float, float]:
    if space not in R_SPACES:
        raise InvalidParameterError(f"space must be one of {R_SPACES}, got {space!r}")
    if len(residuals) < 3:
        raise InsufficientDataError(f"need at least 3 residual pairs, got {len(residuals)}")
    emp = np.array([res.log10_empirical for res in residuals])
    mod = np.array([res.log10_model for res in residuals])
    if space == 'linear':
        emp, mod = np.power(10.0, emp), np.power(10.0, mod)
    r = pearson_r(emp, mod)
    return r, r * r


class LogCcdfObjective:
    """Weighted SSE of log10 ccdf; non-finite model values make the point infeasible"""

    def __init__(self, dist: EmpiricalDistribution, config: FitConfig):
        self.dist = dist
        self.tol = config.sum_tol
        with np.errstate(divide='ignore'):
            log_emp = np.log10(dist.ccdf)
        keep = np.isfinite(log_emp)
        self.degrees = dist.degrees[keep]
        self.log_emp = log_emp[keep]
        if config.weighting == 'counts':
            if dist.counts is None:
                raise InvalidParameterError("count weighting needs a histogram input")
            self.weights = dist.counts[keep].astype(float)
        else:
            self.weights = np.ones(self.degrees.size)

    def __call__(self, params: ModelParams) -> float:
        try:
            model = build_model(params, self.tol)
        except ConvergenceError as e:
            logger.warning(f"Skipping {params.digest()}: {e}")
            return math.inf
        log_model = model.log_ccdf_array(self.degrees) / LN10
        if not np.all(np.isfinite(log_model)):
            return math.inf
        diff = self.log_emp - log_model
        return float(np.dot(self.weights, diff * diff))


class _Search:
    """Objective evaluations with a memo, ordered results and optional threads"""

    def __init__(self, objective: LogCcdfObjective, key: Callable, threads: int):
        self.objective = objective
        self.key = key
        self.threads = threads
        self.memo: Dict[tuple, float] = {}

    def evaluate(self, candidates: List[ModelParams]) -> List[float]:
        fresh = []
        seen = set(self.memo)
        for params in candidates:
            k = self.key(params)
            if k not in seen:
                seen.add(k)
                fresh.append(params)
        if self.threads > 1 and len(fresh) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                values = list(pool.map(self.objective, fresh))
        else:
            values = [self.objective(params) for params in fresh]
        for params, value in zip(fresh, values):
            self.memo[self.key(params)] = value
        return [self.memo[self.key(params)] for params in candidates]

    def best(self, candidates: List[ModelParams]) -> Tuple[ModelParams, float]:
        """Smallest SSE, ties broken by the parameter key"""
        values = self.evaluate(candidates)
        ranked = sorted(zip(values, candidates), key=lambda item: (item[0], self.key(item[1])))
        return ranked[0][1], ranked[0][0]


def _require_data(dist: EmpiricalDistribution):
    if dist.size < MIN_FIT_DEGREES:
        raise InsufficientDataError(
            f"need at least {MIN_FIT_DEGREES} distinct degrees >= {dist.d_min}, got {dist.size}"
        )


def _grid_start(search: _Search, grid: List[ModelParams], model_name: str) -> Tuple[ModelParams, float]:
    best, best_sse = search.best(grid)
    if not math.isfinite(best_sse):
        raise SearchFailureError(f"{model_name} objective is non-finite at every grid point")
    logger.info(f"{model_name} grid: {len(grid)} points, best {best.digest()} sse={best_sse:.6g}")
    return best, best_sse


def _refine_w(search: _Search, make: Callable[[float], ModelParams], center: float,
              half_width: float, bounds: Tuple[float, float], config: FitConfig):
    """1-D multiplicative compass search: move to a better neighbor or halve the step"""
    lo, hi = bounds
    best = make(center)
    best_sse = search.evaluate([best])[0]
    for _ in range(config.refine_iterations):
        neighbors = [make(min(hi, max(lo, center * math.exp(s * half_width)))) for s in (-1, 1)]
        candidate, sse = search.best([best] + neighbors)
        if (sse, search.key(candidate)) < (best_sse, search.key(best)):
            best, best_sse = candidate, sse
            center = candidate.w
        else:
            half_width *= config.refine_shrink
            if half_width < STEP_RESOLUTION:
                break
    return best, best_sse


def fit_tpa(dist: EmpiricalDistribution, config: Optional[FitConfig] = None) -> FitReport:
    """
    Fit (a2, w). a2 is searched over integers: each visited a2 gets its own
    shrinking-interval search on w, and a2 moves to a better neighbor with
    a step that halves down to 1.
    """
    config = config or FitConfig.from_settings()
    _require_data(dist)
    objective = LogCcdfObjective(dist, config)
    search = _Search(objective, key=lambda p: (p.a2, p.w), threads=config.worker_count())

    a2_lo, a2_hi = config.a2_range
    w_lo, w_hi = config.w_range
    a2_grid = np.unique(np.rint(np.geomspace(a2_lo, a2_hi, config.grid_density)).astype(int))
    w_grid = np.geomspace(w_lo, w_hi, config.grid_density)
    grid = [TpaParams(int(a2), float(w), dist.d_min) for a2 in a2_grid for w in w_grid]
    start, grid_sse = _grid_start(search, grid, 'TPA')

    w_step = math.log(w_hi / w_lo) / (config.grid_density - 1) if w_hi > w_lo else 0.0
    profiles: Dict[int, Tuple[TpaParams, float]] = {}

    def profile(a2: int, w_start: float) -> Tuple[TpaParams, float]:
        if a2 not in profiles:
            profiles[a2] = _refine_w(
                search, lambda w: TpaParams(a2, w, dist.d_min), w_start, w_step, (w_lo, w_hi), config,
            )
        return profiles[a2]

    best, best_sse = profile(start.a2, start.w)
    if (grid_sse, search.key(start)) < (best_sse, search.key(best)):
        best, best_sse = start, grid_sse
    a2_step = max(1, int(round(best.a2 * (math.exp(math.log(a2_hi / a2_lo) / (config.grid_density - 1)) - 1))))
    for round_number in range(config.refine_iterations):
        moved = False
        for a2 in (best.a2 - a2_step, best.a2 + a2_step):
            if a2_lo <= a2 <= a2_hi:
                params, sse = profile(a2, best.w)
                if (sse, search.key(params)) < (best_sse, search.key(best)):
                    best, best_sse, moved = params, sse, True
        logger.debug(f"TPA round {round_number}: {best.digest()} sse={best_sse:.6g} step={a2_step}")
        if not moved:
            if a2_step == 1:
                break
            a2_step = max(1, a2_step // 2)

    return _report(ModelId.TPA, best, best_sse, grid_sse, dist, config, len(search.memo))


def fit_pled(dist: EmpiricalDistribution, config: Optional[FitConfig] = None) -> FitReport:
    """Fit (b, c): grid over b (linear) x c (log), then compass refinement with shrinking steps"""
    config = config or FitConfig.from_settings()
    _require_data(dist)
    objective = LogCcdfObjective(dist, config)
    search = _Search(objective, key=lambda p: (p.b, p.c), threads=config.worker_count())

    b_lo, b_hi = config.b_range
    c_lo, c_hi = config.c_range
    b_grid = np.linspace(b_lo, b_hi, config.grid_density)
    c_grid = np.geomspace(c_lo, c_hi, config.grid_density)
    grid = [PledParams(float(b), float(c), dist.d_min) for b in b_grid for c in c_grid]
    best, best_sse = _grid_start(search, grid, 'PLED')
    grid_sse = best_sse

    b_step = (b_hi - b_lo) / (config.grid_density - 1)
    c_step = math.log(c_hi / c_lo) / (config.grid_density - 1)
    for round_number in range(config.refine_iterations):
        neighbors = []
        for db in (-1, 0, 1):
            for dc in (-1, 0, 1):
                b = min(b_hi, max(b_lo, best.b + db * b_step))
                c = min(c_hi, max(c_lo, best.c * math.exp(dc * c_step)))
                neighbors.append(PledParams(b, c, dist.d_min))
        candidate, sse = search.best(neighbors)
        if (sse, search.key(candidate)) < (best_sse, search.key(best)):
            best, best_sse = candidate, sse
        else:
            b_step *= config.refine_shrink
            c_step *= config.refine_shrink
            if b_step < STEP_RESOLUTION * max(1.0, abs(best.b)) and c_step < STEP_RESOLUTION:
                break
        logger.debug(f"PLED round {round_number}: {best.digest()} sse={best_sse:.6g}")

    return _report(ModelId.PLED, best, best_sse, grid_sse, dist, config, len(search.memo))


def _report(model_id: ModelId, params: ModelParams, sse: float, grid_sse: float,
            dist: EmpiricalDistribution, config: FitConfig, evaluations: int) -> FitReport:
    residuals = tuple(log_ccdf_residuals(params, dist, config.sum_tol))
    r, r2 = _correlation(residuals, config.r_space)
    logger.info(
        f"{model_id.value} fit: {params.digest()} sse={sse:.6g} r={r:.6f} "
        f"({evaluations} evaluations)"
    )
    return FitReport(
        model_id=model_id,
        params=params,
        r=r,
        r_squared=r2,
        sse_log_ccdf=sse,
        residuals=residuals,
        d_min=dist.d_min,
        config_digest=config.digest(),
        grid_min_sse=grid_sse,
        evaluations=evaluations,
    )


def fit_model(model: Union[str, ModelId], dist: EmpiricalDistribution,
              config: Optional[FitConfig] = None) -> FitReport:
    model = ModelId(model.upper()) if isinstance(model, str) else model
    if model is ModelId.TPA:
        return fit_tpa(dist, config)
    return fit_pled(dist, config)
