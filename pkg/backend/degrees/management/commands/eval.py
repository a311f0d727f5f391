import shlex

from degrees.distributions import DEFAULT_TOL, TpaParams, model_for
from degrees.management.base import TailfitCommand, parse_degrees
from degrees.reports import RunManifest, render_evaluation


class Command(TailfitCommand):
    help = 'Tabulate the pmf and ccdf of a TPA or PLED distribution over a degree range'

    def add_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument(
            '--degrees',
            required=True,
            help="Degrees to tabulate: 'a..b' ranges and single degrees, comma separated"
        )
        parser.add_argument(
            '--tol',
            type=float,
            default=DEFAULT_TOL,
            help='PLED truncation tolerance'
        )
        self.add_output_argument(parser)

    def run(self, **options):
        params = self.model_params(options)
        degrees_text = options['degrees'].replace(' ', '')
        degrees = parse_degrees(degrees_text)
        model = model_for(params, options['tol'])
        evaluation = model.tabulate(degrees)

        argv = ['eval', options['model'], *self.params_argv(params)]
        manifest = RunManifest(command='eval', argv='')
        manifest.add('model', options['model'])
        if isinstance(params, TpaParams):
            manifest.add('a2', params.a2).add('w', params.w).add('d_min', params.d_min)
            if params.a1_meta is not None:
                manifest.add('a1', params.a1_meta)
            manifest.add('q', model.q).add('p_a2', model.p_a2).add('gamma', params.gamma)
        else:
            manifest.add('b', params.b).add('c', params.c).add('d_min', params.d_min)
            manifest.add('tol', model.tol).add('normalizer', model.normalizer)
            argv += ['--tol', str(model.tol)]
        manifest.add('degrees', degrees_text)
        argv += ['--degrees', degrees_text]
        manifest.argv = shlex.join(argv)
        return render_evaluation(manifest, evaluation)
