"""
Empirical degree distributions: histogram ingestion, truncation below a
minimum degree and eta renormalization (p'_j = eta p_j, ccdf' = eta ccdf).
"""

import dataclasses
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .exceptions import (
    DomainError, EmptySupportError, HistogramParseError, InvalidParameterError,
)

logger = logging.getLogger('degrees')

TABLE_HEADER = ('degree', 'pmf', 'ccdf')
_SEPARATOR = re.compile(r'[,\s]+')
_INTEGER = re.compile(r'^[+]?\d+$')


@dataclass(frozen=True)
class DegreeHistogram:
    """Raw (degree, count) pairs, degrees strictly increasing"""
    entries: Tuple[Tuple[int, int], ...]
    source_label: str = ''

    def __post_init__(self):
        entries = tuple((int(d), int(n)) for d, n in self.entries)
        previous = 0
        for degree, count in entries:
            if degree <= previous:
                raise InvalidParameterError("histogram degrees must be positive and strictly increasing")
            if count < 0:
                raise InvalidParameterError(f"negative count {count} at degree {degree}")
            previous = degree
        if not any(count > 0 for _, count in entries):
            raise EmptySupportError("histogram has no entry with a positive count")
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def from_counts(cls, counts: dict, source_label: str = '') -> 'DegreeHistogram':
        return cls(tuple(sorted(counts.items())), source_label)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([d for d, _ in self.entries], dtype=np.int64)

    @property
    def counts(self) -> np.ndarray:
        return np.array([n for _, n in self.entries], dtype=np.int64)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.entries)

    def mean_degree(self) -> float:
        return float(np.dot(self.degrees, self.counts) / self.total)


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """
    Truncated, renormalized pmf/ccdf over the observed degrees >= d_min.

    Histogram-derived distributions keep their node counts (n_total before
    truncation, n_kept after, eta = n_total / n_kept). Distributions read
    from a "degree,pmf,ccdf" table have no counts; their tail_mass is the
    probability beyond the last listed degree.
    """
    d_min: int
    degrees: np.ndarray
    pmf: np.ndarray
    ccdf: np.ndarray
    eta: float
    n_total: Optional[int] = None
    n_kept: Optional[int] = None
    counts: Optional[np.ndarray] = None
    tail_mass: float = 0.0
    source_label: str = ''

    @property
    def size(self) -> int:
        return int(self.degrees.size)

    @property
    def mass_below(self) -> float:
        """Probability mass dropped below d_min, 1 - 1/eta"""
        return 1.0 - 1.0 / self.eta

    @property
    def original_ccdf(self) -> np.ndarray:
        return self.ccdf / self.eta

    def ccdf_at(self, x: int) -> float:
        return empirical_ccdf(self, x)

    def truncate(self, d_min: int) -> 'EmpiricalDistribution':
        """Drop degrees below d_min and renormalize again; eta compounds"""
        d_min = _check_d_min(d_min)
        if d_min <= self.d_min:
            return dataclasses.replace(self, d_min=d_min)
        keep = self.degrees >= d_min
        if not keep.any():
            raise EmptySupportError(f"no observed degree >= {d_min}")
        if self.counts is not None:
            return _from_counts(
                d_min, self.degrees[keep], self.counts[keep], self.n_total, self.source_label,
            )
        scale = float(self.ccdf[keep][0])
        return EmpiricalDistribution(
            d_min=d_min,
            degrees=self.degrees[keep],
            pmf=self.pmf[keep] / scale,
            ccdf=self.ccdf[keep] / scale,
            eta=self.eta / scale,
            tail_mass=self.tail_mass / scale,
            source_label=self.source_label,
        )

    def rows(self) -> Iterable[tuple]:
        for x, p, c in zip(self.degrees, self.pmf, self.ccdf):
            yield int(x), float(p), float(c)


def _check_d_min(d_min) -> int:
    if isinstance(d_min, bool) or not isinstance(d_min, (int, np.integer)) or d_min < 1:
        raise InvalidParameterError(f"d_min must be a positive integer, got {d_min!r}")
    return int(d_min)


def _from_counts(d_min, degrees, counts, n_total, source_label) -> EmpiricalDistribution:
    n_kept = int(counts.sum())
    # Integer suffix sums keep ccdf(d_min) exactly 1
    suffix = np.cumsum(counts[::-1])[::-1]
    return EmpiricalDistribution(
        d_min=d_min,
        degrees=degrees,
        pmf=counts / n_kept,
        ccdf=suffix / n_kept,
        eta=n_total / n_kept,
        n_total=n_total,
        n_kept=n_kept,
        counts=counts,
        source_label=source_label,
    )


def parse_histogram(stream: Iterable[str], source_label: str = '') -> DegreeHistogram:
    """
    Read "degree count" lines (comma or whitespace separated).

    Blank lines and lines starting with '#' are skipped, duplicate degrees
    are merged by summing their counts.
    """
    counts = {}
    data_lines = 0
    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        fields = _SEPARATOR.split(line)
        if len(fields) != 2:
            raise HistogramParseError(
                f"expected 'degree count', got {len(fields)} fields: {line!r}", line_number
            )
        degree_text, count_text = fields
        if not _INTEGER.match(degree_text) or int(degree_text) < 1:
            raise HistogramParseError(f"degree must be a positive integer: {degree_text!r}", line_number)
        if not _INTEGER.match(count_text):
            raise HistogramParseError(f"count must be a non-negative integer: {count_text!r}", line_number)
        degree = int(degree_text)
        counts[degree] = counts.get(degree, 0) + int(count_text)
        data_lines += 1

    if data_lines == 0:
        raise HistogramParseError("no data lines found")
    return DegreeHistogram.from_counts(counts, source_label)


def parse_table(stream: Iterable[str], source_label: str = '') -> EmpiricalDistribution:
    """
    Read a "degree,pmf,ccdf" table (the output of eval or renorm).

    The ccdf column is taken as given and rescaled so the first listed
    degree has ccdf 1. Extra columns are ignored.
    """
    header = None
    degrees, pmf, ccdf = [], [], []
    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        fields = [field.strip() for field in line.split(',')]
        if header is None:
            if tuple(fields[:3]) != TABLE_HEADER:
                raise HistogramParseError(f"expected header 'degree,pmf,ccdf', got {line!r}", line_number)
            header = fields
            continue
        if len(fields) != len(header):
            raise HistogramParseError(f"expected {len(header)} columns, got {len(fields)}", line_number)
        try:
            degree = int(fields[0])
            p, c = float(fields[1]), float(fields[2])
        except ValueError as e:
            raise HistogramParseError(f"malformed row {line!r}", line_number) from e
        if degree < 1 or (degrees and degree <= degrees[-1]):
            raise HistogramParseError("degrees must be positive and strictly increasing", line_number)
        if not (np.isfinite(p) and np.isfinite(c)) or p < 0 or c <= 0:
            raise HistogramParseError(f"invalid probabilities in row {line!r}", line_number)
        degrees.append(degree)
        pmf.append(p)
        ccdf.append(c)

    if not degrees:
        raise HistogramParseError("no data lines found")

    pmf = np.array(pmf)
    ccdf = np.array(ccdf)
    if np.any(np.diff(ccdf) > 0):
        raise HistogramParseError("ccdf column must be non-increasing")
    scale = float(ccdf[0])
    pmf, ccdf = pmf / scale, ccdf / scale
    tail_mass = max(float(ccdf[-1] - pmf[-1]), 0.0)
    if abs(float(pmf.sum()) + tail_mass - 1.0) > 1e-9:
        logger.warning(f"{source_label or 'table'}: listed degrees are not contiguous; pmf kept as listed")
    return EmpiricalDistribution(
        d_min=degrees[0],
        degrees=np.array(degrees, dtype=np.int64),
        pmf=pmf,
        ccdf=ccdf,
        eta=1.0 / scale,
        tail_mass=tail_mass,
        source_label=source_label,
    )


def is_table(lines) -> bool:
    """True when the first non-comment line is a 'degree,pmf,ccdf' header"""
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        return tuple(field.strip() for field in line.split(',')[:3]) == TABLE_HEADER
    return False


def truncate_renormalize(hist: DegreeHistogram, d_min: int) -> EmpiricalDistribution:
    """Keep degrees >= d_min with eta = 1 / (1 - sum_{j < d_min} p_j)"""
    d_min = _check_d_min(d_min)
    degrees, counts = hist.degrees, hist.counts
    keep = (degrees >= d_min) & (counts > 0)
    if not keep.any():
        raise EmptySupportError(f"no observed degree >= {d_min} with a positive count")
    dropped_zero = int(((degrees >= d_min) & (counts == 0)).sum())
    if dropped_zero:
        logger.warning(f"{hist.source_label or 'histogram'}: ignoring {dropped_zero} zero-count degrees")
    dist = _from_counts(d_min, degrees[keep], counts[keep], hist.total, hist.source_label)
    logger.info(
        f"Truncated {hist.source_label or 'histogram'} at d_min={d_min}: "
        f"kept {dist.n_kept} of {dist.n_total} nodes, eta={dist.eta:.6f}"
    )
    return dist


def read_distribution(lines, d_min: int, source_label: str = '') -> EmpiricalDistribution:
    """Histogram or table input, truncated at d_min"""
    lines = list(lines)
    if is_table(lines):
        return parse_table(lines, source_label).truncate(d_min)
    return truncate_renormalize(parse_histogram(lines, source_label), d_min)


def empirical_ccdf(dist: EmpiricalDistribution, x: int) -> float:
    """Right-continuous step ccdf: sum of pmf over observed degrees >= x"""
    if x < dist.d_min:
        raise DomainError(f"degree {x} is below d_min={dist.d_min}")
    index = int(np.searchsorted(dist.degrees, x, side='left'))
    if index == dist.size:
        return float(dist.tail_mass)
    return float(dist.ccdf[index])
