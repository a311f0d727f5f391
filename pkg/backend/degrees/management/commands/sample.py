import shlex

from degrees.management.base import TailfitCommand
from degrees.reports import RunManifest, render_histogram
from degrees.sampler import GENERATOR, SampleSpec, sample


class Command(TailfitCommand):
    help = 'Draw a synthetic degree histogram from a TPA or PLED distribution'

    def add_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument('--n', type=int, required=True, help='Number of draws')
        parser.add_argument('--seed', type=int, default=0, help='Unsigned 64-bit seed (default 0)')
        self.add_output_argument(parser)

    def run(self, **options):
        params = self.model_params(options)
        spec = SampleSpec(params, options['n'], options['seed'])
        hist = sample(spec)

        argv = ['sample', options['model'], *self.params_argv(params), '--n', str(spec.n), '--seed', str(spec.seed)]
        manifest = RunManifest(command='sample', argv=shlex.join(argv), seed=spec.seed)
        manifest.add('model', options['model']).add('params', params.digest())
        manifest.add('n', spec.n).add('generator', GENERATOR)
        return render_histogram(manifest, hist)
