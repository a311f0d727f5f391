import shlex

from degrees.empirical import read_distribution
from degrees.management.base import TailfitCommand, read_input
from degrees.reports import RunManifest, render_distribution


class Command(TailfitCommand):
    help = 'Truncate a degree histogram below --dmin and renormalize it (ccdf\' = eta ccdf)'

    def add_arguments(self, parser):
        parser.add_argument('--input', '-i', required=True, help='Degree histogram ("degree count" lines)')
        parser.add_argument('--dmin', type=int, default=2, help='Drop degrees below this (default 2)')
        parser.add_argument(
            '--with-original',
            action='store_true',
            help='Add a ccdf_original column with the un-renormalized ccdf'
        )
        self.add_output_argument(parser)

    def run(self, **options):
        path = options['input']
        lines, digest = read_input(path)
        dist = read_distribution(lines, options['dmin'], source_label=path)

        argv = ['renorm', '--input', path, '--dmin', str(dist.d_min)]
        if options['with_original']:
            argv.append('--with-original')
        manifest = RunManifest(command='renorm', argv=shlex.join(argv), input_digest=digest)
        manifest.add('input', path).add('d_min', dist.d_min)
        manifest.add('eta', dist.eta).add('mass_below', dist.mass_below)
        if dist.n_total is not None:
            manifest.add('n_total', dist.n_total).add('n_kept', dist.n_kept)
        else:
            manifest.add('tail_mass', dist.tail_mass)
        manifest.add('with_original', bool(options['with_original']))
        return render_distribution(manifest, dist, with_original=options['with_original'])
