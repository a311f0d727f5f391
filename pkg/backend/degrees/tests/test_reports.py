import os
import shutil
import tempfile

from django.test import SimpleTestCase

from degrees import __version__
from degrees.distributions import format_number
from degrees.exceptions import InvalidParameterError
from degrees.management.base import parse_degrees
from degrees.reports import RunManifest, content_digest, parse_report, read_manifest, write_atomic


class NumberFormatTests(SimpleTestCase):

    def test_twelve_significant_digits(self):
        self.assertEqual(format_number(1.0), '1')
        self.assertEqual(format_number(0.1 + 0.2), '0.3')
        self.assertEqual(format_number(1 / 3), '0.333333333333')
        self.assertEqual(format_number(1e-20), '1e-20')
        self.assertEqual(format_number(17), '17')


class DegreeListTests(SimpleTestCase):

    def test_ranges_and_lists(self):
        self.assertEqual(parse_degrees('1..3').tolist(), [1, 2, 3])
        self.assertEqual(parse_degrees('10, 2,5..6,5').tolist(), [2, 5, 6, 10])
        self.assertEqual(parse_degrees('7').tolist(), [7])

    def test_bad_grammar(self):
        for text in ('', '3..1', '1..', 'a', '1-3', '2,,3', '-1'):
            with self.subTest(text=text):
                with self.assertRaises(InvalidParameterError):
                    parse_degrees(text)


class ManifestTests(SimpleTestCase):

    def test_render_and_read_back(self):
        manifest = RunManifest(command='fit', argv='fit tpa --input h.txt', input_digest='00ff00ff00ff00ff', seed=3)
        manifest.add('d_min', 2).add('eta', 1 / 0.9427).add('with_original', False)
        values = read_manifest(manifest.render().splitlines())
        self.assertEqual(values['command'], 'fit')
        self.assertEqual(values['version'], __version__)
        self.assertEqual(values['d_min'], '2')
        self.assertEqual(values['eta'], '1.06078285775')
        self.assertEqual(values['with_original'], 'false')
        self.assertEqual(values['input_digest'], '00ff00ff00ff00ff')
        self.assertEqual(values['seed'], '3')
        self.assertEqual(values['argv'], 'fit tpa --input h.txt')

    def test_every_line_is_a_comment(self):
        text = RunManifest(command='eval', argv='eval tpa').add('a2', 5).render()
        self.assertTrue(all(line.startswith('# ') for line in text.splitlines()))

    def test_content_digest(self):
        digest = content_digest(b'1 5\n2 7\n')
        self.assertEqual(len(digest), 16)
        self.assertEqual(digest, content_digest(b'1 5\n2 7\n'))
        self.assertNotEqual(digest, content_digest(b'1 5\n2 8\n'))


class ParseReportTests(SimpleTestCase):

    def test_sections_and_residuals(self):
        text = '\n'.join([
            '# tailfit fit',
            '[fit]',
            'model = tpa',
            'config = a2_range=2..2000;grid_density=64',
            '[residuals]',
            'degree,log10_empirical_ccdf,log10_model_ccdf',
            '2,0,0',
            '3,-0.3,-0.31',
        ])
        report = parse_report(text.splitlines())
        self.assertEqual(report['fit'], {'model': 'tpa', 'config': 'a2_range=2..2000;grid_density=64'})
        self.assertEqual(report['residuals'][1]['log10_model_ccdf'], '-0.31')


class WriteAtomicTests(SimpleTestCase):

    def setUp(self):
        self.workdir = tempfile.mkdtemp(prefix='tailfit-test-')

    def tearDown(self):
        shutil.rmtree(self.workdir, ignore_errors=True)

    def test_replaces_target_without_leftovers(self):
        target = os.path.join(self.workdir, 'out.csv')
        write_atomic(target, 'first\n')
        write_atomic(target, 'second\n')
        with open(target, encoding='utf-8') as handle:
            self.assertEqual(handle.read(), 'second\n')
        self.assertEqual(os.listdir(self.workdir), ['out.csv'])

    def test_missing_directory(self):
        with self.assertRaises(OSError):
            write_atomic(os.path.join(self.workdir, 'nope', 'out.csv'), 'x\n')
