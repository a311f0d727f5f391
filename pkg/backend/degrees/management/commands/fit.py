import shlex

from degrees.empirical import read_distribution
from degrees.fitting import fit_model
from degrees.management.base import MODELS, TailfitCommand, config_argv, read_input
from degrees.reports import RunManifest, render_fit


class Command(TailfitCommand):
    help = 'Fit TPA or PLED to an empirical degree distribution by log-ccdf least squares'

    def add_arguments(self, parser):
        parser.add_argument('model', choices=MODELS, help='Distribution family to fit')
        self.add_fit_arguments(parser)
        self.add_output_argument(parser)

    def run(self, **options):
        config = self.fit_config(options)
        path = options['input']
        lines, digest = read_input(path)
        dist = read_distribution(lines, options['dmin'], source_label=path)
        report = fit_model(options['model'], dist, config)

        argv = ['fit', options['model'], '--input', path, '--dmin', str(dist.d_min), *config_argv(config)]
        manifest = RunManifest(command='fit', argv=shlex.join(argv), input_digest=digest)
        manifest.add('model', options['model']).add('input', path).add('d_min', dist.d_min)
        manifest.add('eta', dist.eta).add('config', config.digest())
        return render_fit(manifest, report)
