import shlex

from degrees.empirical import read_distribution
from degrees.fitting import fit_pled, fit_tpa
from degrees.management.base import TailfitCommand, config_argv, read_input
from degrees.reports import RunManifest, render_comparison


class Command(TailfitCommand):
    help = 'Fit both TPA and PLED to the same data and report them side by side'

    def add_arguments(self, parser):
        self.add_fit_arguments(parser)
        self.add_output_argument(parser)

    def run(self, **options):
        config = self.fit_config(options)
        path = options['input']
        lines, digest = read_input(path)
        dist = read_distribution(lines, options['dmin'], source_label=path)

        tpa = fit_tpa(dist, config)
        pled = fit_pled(dist, config)

        argv = ['compare', '--input', path, '--dmin', str(dist.d_min), *config_argv(config)]
        manifest = RunManifest(command='compare', argv=shlex.join(argv), input_digest=digest)
        manifest.add('input', path).add('d_min', dist.d_min)
        manifest.add('eta', dist.eta).add('config', config.digest())
        return render_comparison(manifest, tpa, pled)
