"""
Shared plumbing for the tailfit management commands: parameter flags,
degree-range grammar, fit configuration flags, input reading and output
writing with the exit-code contract.
"""

import logging
import re
from typing import List, Optional, Tuple

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from ..distributions import PledParams, TpaParams, format_number
from ..exceptions import HistogramParseError, InvalidParameterError, TailfitError
from ..fitting import R_SPACES, WEIGHTINGS, FitConfig
from ..reports import content_digest, write_atomic

logger = logging.getLogger('degrees')

IO_EXIT_CODE = 3
MODELS = ('tpa', 'pled')
MAX_DEGREES = 10_000_000

_RANGE = re.compile(r'^(\d+)\.\.(\d+)$')
_SINGLE = re.compile(r'^\d+$')


def parse_degrees(text: str) -> np.ndarray:
    """
    Parse "a..b" (inclusive) ranges and single degrees separated by commas,
    e.g. "1..10,20,50..60". Returns sorted, de-duplicated degrees.
    """
    degrees = set()
    for part in text.replace(' ', '').split(','):
        match = _RANGE.match(part)
        if match:
            low, high = int(match.group(1)), int(match.group(2))
            if low > high:
                raise InvalidParameterError(f"empty degree range {part!r}")
            if high - low + 1 + len(degrees) > MAX_DEGREES:
                raise InvalidParameterError(f"degree list longer than {MAX_DEGREES} entries")
            degrees.update(range(low, high + 1))
        elif _SINGLE.match(part):
            degrees.add(int(part))
        else:
            raise InvalidParameterError(f"bad degree list element {part!r} (use 'a..b' or 'n')")
    if not degrees:
        raise InvalidParameterError("empty degree list")
    return np.array(sorted(degrees), dtype=np.int64)


def read_input(path: str) -> Tuple[List[str], str]:
    """Lines of an input file and the content digest of its bytes"""
    with open(path, 'rb') as handle:
        data = handle.read()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        raise HistogramParseError(f"{path} is not UTF-8 text") from e
    lines = text.splitlines()
    digest = content_digest(data)
    logger.debug(f"Read {len(lines)} lines from {path} (digest {digest})")
    return lines, digest


def config_argv(config: FitConfig) -> List[str]:
    """Flags that reproduce a resolved FitConfig (threads never affect results)"""
    return [
        '--a2-min', str(config.a2_range[0]), '--a2-max', str(config.a2_range[1]),
        '--w-min', format_number(config.w_range[0]), '--w-max', format_number(config.w_range[1]),
        '--b-min', format_number(config.b_range[0]), '--b-max', format_number(config.b_range[1]),
        '--c-min', format_number(config.c_range[0]), '--c-max', format_number(config.c_range[1]),
        '--grid-density', str(config.grid_density),
        '--refine-iterations', str(config.refine_iterations),
        '--refine-shrink', format_number(config.refine_shrink),
        '--sum-tol', format_number(config.sum_tol),
        '--r-space', config.r_space,
        '--weighting', config.weighting,
    ]


class TailfitCommand(BaseCommand):
    """
    Base class for the tailfit commands.

    Subclasses implement run(**options) returning the output text; the base
    class writes it (atomically to --output, or to stdout) and maps library
    errors onto CommandError return codes.
    """
    requires_system_checks = []

    def add_output_argument(self, parser):
        parser.add_argument(
            '--output', '-o',
            help='Write here (atomically) instead of stdout'
        )

    def add_model_arguments(self, parser):
        parser.add_argument('model', choices=MODELS, help='Distribution family')
        parser.add_argument('--a2', type=int, help='TPA tempering threshold A2')
        parser.add_argument('--w', type=float, help='TPA tempering parameter w')
        parser.add_argument('--a1', type=int, help='TPA A1 (reported only)')
        parser.add_argument('--b', type=float, help='PLED power-law exponent')
        parser.add_argument('--c', type=float, help='PLED exponential decay scale')
        parser.add_argument(
            '--dmin',
            type=int,
            help='Smallest degree in the support (default 1 for tpa, 2 for pled)'
        )

    def add_fit_arguments(self, parser):
        parser.add_argument('--input', '-i', required=True, help='Histogram or degree,pmf,ccdf table')
        parser.add_argument('--dmin', type=int, default=2, help='Truncate below this degree (default 2)')
        parser.add_argument('--a2-min', type=int)
        parser.add_argument('--a2-max', type=int)
        parser.add_argument('--w-min', type=float)
        parser.add_argument('--w-max', type=float)
        parser.add_argument('--b-min', type=float)
        parser.add_argument('--b-max', type=float)
        parser.add_argument('--c-min', type=float)
        parser.add_argument('--c-max', type=float)
        parser.add_argument('--grid-density', type=int, help='Grid points per axis')
        parser.add_argument('--refine-iterations', type=int)
        parser.add_argument('--refine-shrink', type=float)
        parser.add_argument('--sum-tol', type=float, help='PLED truncation tolerance during fitting')
        parser.add_argument('--r-space', choices=R_SPACES, help='Space R is computed in (default log)')
        parser.add_argument('--weighting', choices=WEIGHTINGS, help='Residual weighting (default uniform)')
        parser.add_argument('--threads', type=int, help='Grid evaluation threads (default TAILFIT_THREADS)')

    def model_params(self, options):
        model = options['model']
        if model == 'tpa':
            self._require(options, 'a2', 'w')
            d_min = options['dmin'] if options['dmin'] is not None else 1
            return TpaParams(options['a2'], options['w'], d_min, options['a1'])
        self._require(options, 'b', 'c')
        d_min = options['dmin'] if options['dmin'] is not None else 2
        return PledParams(options['b'], options['c'], d_min)

    def _require(self, options, *names):
        missing = [f"--{name}" for name in names if options.get(name) is None]
        if missing:
            raise InvalidParameterError(f"{options['model']} needs {', '.join(missing)}")

    def params_argv(self, params) -> List[str]:
        if isinstance(params, TpaParams):
            argv = ['--a2', str(params.a2), '--w', format_number(params.w), '--dmin', str(params.d_min)]
            if params.a1_meta is not None:
                argv += ['--a1', str(params.a1_meta)]
            return argv
        return ['--b', format_number(params.b), '--c', format_number(params.c), '--dmin', str(params.d_min)]

    def fit_config(self, options) -> FitConfig:
        defaults = FitConfig()

        def span(low, high, default):
            return (
                options[low] if options[low] is not None else default[0],
                options[high] if options[high] is not None else default[1],
            )

        return FitConfig.from_settings(
            a2_range=span('a2_min', 'a2_max', defaults.a2_range),
            w_range=span('w_min', 'w_max', defaults.w_range),
            b_range=span('b_min', 'b_max', defaults.b_range),
            c_range=span('c_min', 'c_max', defaults.c_range),
            grid_density=options['grid_density'],
            refine_iterations=options['refine_iterations'],
            refine_shrink=options['refine_shrink'],
            sum_tol=options['sum_tol'],
            r_space=options['r_space'],
            weighting=options['weighting'],
            threads=options['threads'],
        )

    def run(self, **options) -> str:
        raise NotImplementedError('subclasses of TailfitCommand must provide a run() method')

    def handle(self, *args, **options):
        output: Optional[str] = options.get('output')
        try:
            text = self.run(**options)
            if output and output != '-':
                write_atomic(output, text)
            else:
                self.stdout.write(text, ending='')
        except TailfitError as e:
            raise CommandError(str(e), returncode=e.exit_code) from e
        except OSError as e:
            raise CommandError(f"I/O failure: {e}", returncode=IO_EXIT_CODE) from e
        if output and output != '-':
            self.stdout.write(self.style.SUCCESS(f"Wrote {output}"))
