"""
Run manifests and the text formats every command writes.

Tables are CSV with a '#'-prefixed manifest preamble; fit and compare
reports are "key = value" sections followed by a CSV residual block.
All numbers go through format_number (12 significant digits).
"""

import hashlib
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .distributions import ModelEvaluation, format_number
from .empirical import DegreeHistogram, EmpiricalDistribution
from .fitting import FitReport

TOOL = 'tailfit'


def content_digest(data: bytes) -> str:
    """64-bit BLAKE2b content hash, hexadecimal"""
    return hashlib.blake2b(data, digest_size=8).hexdigest()


def render_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (int, float)):
        return format_number(value)
    return str(value)


@dataclass
class RunManifest:
    """Everything needed to regenerate an output: command, resolved parameters, input digest, version"""
    command: str
    argv: str
    parameters: List[Tuple[str, object]] = field(default_factory=list)
    input_digest: Optional[str] = None
    seed: Optional[int] = None
    version: str = __version__

    def add(self, key: str, value) -> 'RunManifest':
        self.parameters.append((key, value))
        return self

    def render(self) -> str:
        lines = [f"# {TOOL} {self.command}", f"# version = {self.version}"]
        lines += [f"# {key} = {render_value(value)}" for key, value in self.parameters]
        if self.input_digest is not None:
            lines.append(f"# input_digest = {self.input_digest}")
        if self.seed is not None:
            lines.append(f"# seed = {self.seed}")
        lines.append(f"# argv = {self.argv}")
        return '\n'.join(lines) + '\n'


def read_manifest(lines: Iterable[str]) -> Dict[str, str]:
    """Preamble keys of an output file"""
    values = {}
    for line in lines:
        if not line.startswith('#'):
            break
        body = line[1:].strip()
        if ' = ' in body:
            key, value = body.split(' = ', 1)
            values[key.strip()] = value.strip()
        elif body.startswith(f"{TOOL} "):
            values['command'] = body[len(TOOL) + 1:]
    return values


def _csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [','.join(columns)]
    lines += [','.join(render_value(value) for value in row) for row in rows]
    return '\n'.join(lines) + '\n'


def render_evaluation(manifest: RunManifest, evaluation: ModelEvaluation) -> str:
    return manifest.render() + _csv(('degree', 'pmf', 'ccdf'), evaluation.rows())


def render_distribution(manifest: RunManifest, dist: EmpiricalDistribution,
                        with_original: bool = False) -> str:
    if not with_original:
        return manifest.render() + _csv(('degree', 'pmf', 'ccdf'), dist.rows())
    rows = (
        (x, p, c, o) for (x, p, c), o in zip(dist.rows(), dist.original_ccdf.tolist())
    )
    return manifest.render() + _csv(('degree', 'pmf', 'ccdf', 'ccdf_original'), rows)


def render_histogram(manifest: RunManifest, hist: DegreeHistogram) -> str:
    body = ''.join(f"{degree} {count}\n" for degree, count in hist.entries)
    return manifest.render() + body


def _fit_section(name: str, report: FitReport) -> List[str]:
    lines = [f"[{name}]", f"model = {report.model_id.value.lower()}", f"d_min = {report.d_min}"]
    lines += [f"{key} = {render_value(value)}" for key, value in report.params_dict().items()]
    lines += [
        f"r = {render_value(report.r)}",
        f"r_squared = {render_value(report.r_squared)}",
        f"sse_log_ccdf = {render_value(report.sse_log_ccdf)}",
        f"grid_min_sse = {render_value(report.grid_min_sse)}",
        f"evaluations = {report.evaluations}",
        f"residual_count = {len(report.residuals)}",
        f"config = {report.config_digest}",
    ]
    return lines


def render_fit(manifest: RunManifest, report: FitReport) -> str:
    lines = _fit_section('fit', report)
    lines.append('[residuals]')
    body = '\n'.join(lines) + '\n'
    rows = ((res.degree, res.log10_empirical, res.log10_model) for res in report.residuals)
    return manifest.render() + body + _csv(
        ('degree', 'log10_empirical_ccdf', 'log10_model_ccdf'), rows
    )


def preferred_model(tpa: FitReport, pled: FitReport) -> str:
    return 'tpa' if tpa.r_squared >= pled.r_squared else 'pled'


def render_comparison(manifest: RunManifest, tpa: FitReport, pled: FitReport) -> str:
    lines = _fit_section('tpa', tpa) + _fit_section('pled', pled)
    lines += [
        '[comparison]',
        f"r_squared_tpa = {render_value(tpa.r_squared)}",
        f"r_squared_pled = {render_value(pled.r_squared)}",
        f"r_squared_difference = {render_value(tpa.r_squared - pled.r_squared)}",
        f"sse_difference = {render_value(tpa.sse_log_ccdf - pled.sse_log_ccdf)}",
        f"preferred = {preferred_model(tpa, pled)}",
        '[residuals]',
    ]
    pled_by_degree = {res.degree: res.log10_model for res in pled.residuals}
    rows = (
        (res.degree, res.log10_empirical, res.log10_model, pled_by_degree[res.degree])
        for res in tpa.residuals if res.degree in pled_by_degree
    )
    return manifest.render() + '\n'.join(lines) + '\n' + _csv(
        ('degree', 'log10_empirical_ccdf', 'log10_tpa_ccdf', 'log10_pled_ccdf'), rows
    )


def parse_report(lines: Iterable[str]) -> Dict[str, object]:
    """
    Sections of a fit or compare report: {'section': {key: value}} plus the
    residual block under 'residuals' as a list of row dicts.
    """
    sections: Dict[str, object] = {}
    current = None
    columns = None
    for raw in lines:
        line = raw.rstrip('\n')
        if not line or line.startswith('#'):
            continue
        if line.startswith('[') and line.endswith(']'):
            current = line[1:-1]
            sections[current] = [] if current == 'residuals' else {}
            continue
        if current == 'residuals':
            fields = line.split(',')
            if columns is None:
                columns = fields
            else:
                sections[current].append(dict(zip(columns, fields)))
        elif current is not None:
            key, value = line.split(' = ', 1)
            sections[current][key] = value
    return sections


def write_atomic(path: str, text: str):
    """Write through a temporary file in the target directory, then rename over the target"""
    directory = os.path.dirname(os.path.abspath(path))
    handle = tempfile.NamedTemporaryFile(
        'w', dir=directory, prefix='.tailfit-', delete=False, encoding='utf-8', newline='\n',
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        if os.path.exists(handle.name):
            os.unlink(handle.name)
        raise
