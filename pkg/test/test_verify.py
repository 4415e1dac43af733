'''Unittests for the command line and the verification commands.'''

import json
import os
import shutil
import tempfile
import unittest

import test
import vertexspectra
from vertexspectra import report
from vertexspectra import verify

FIXED = ['--L', '3', '--gamma', '0.5,0.1', '--mu', '0.1,0', '--mu',
    '-0.4,0.2', '--mu', '0.7,-0.1', '--lambda', '0.3,0.1', '--lambda',
    '-0.2,-0.3', '--lambda', '0.6,0.25']


class TestMain(unittest.TestCase):
    '''Test case for running commands through main.'''

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def path(self, name):
        return os.path.join(self.directory, name)

    def run_main(self, *args):
        return vertexspectra.main(['-c', test.TEST_CONFIG_FILE] + list(args))

    def load(self, name):
        with open(self.path(name)) as report_file:
            return report_file.read()

    def test_verify(self):
        self.assertEqual(vertexspectra.EXIT_PASS,
            self.run_main('--out', self.path('run.json'), 'verify'))
        text = self.load('run.json')
        report.validate(text)
        data = json.loads(text)
        self.assertEqual(4, data['summary']['points'])
        self.assertEqual('PASS', data['summary']['verdict'])
        self.assertEqual([0, 1, 2, 3],
            [point['index'] for point in data['points']])
        self.assertEqual([2, 2, 3, 3],
            [point['L'] for point in data['points']])
        for point in data['points']:
            self.assertEqual(2 ** point['L'], len(point['branches']))
        self.assertTrue(os.path.isfile(self.path('run.csv')))

    def test_verify_chain_checks(self):
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main('--L', '3..4',
            '--trials', '1', 'vertexspectra.verify.chain_length=4', '--out',
            self.path('chain.json'), 'verify'))
        data = json.loads(self.load('chain.json'))
        self.assertEqual([3, 4], [point['L'] for point in data['points']])
        for point in data['points']:
            self.assertEqual('evaluated', point['status'])
            self.assertLess(point['residuals']['symmetry'], 1e-8)
            self.assertIn('ratio_normalization', point['residuals'])

    def test_pinned_prefactor(self):
        self.run_main('--out', self.path('run.json'), 'verify')
        data = json.loads(self.load('run.json'))
        self.assertEqual('pinned', data['prefactor']['form'])
        self.assertLess(data['prefactor']['residuals']['pinned'], 1e-9)
        self.assertGreater(data['prefactor']['residuals']['full_product'],
            1e-6)
        for point in data['points']:
            korepin = point['korepin']
            self.assertEqual('pinned', korepin['form'])
            self.assertEqual(korepin['residuals']['pinned'],
                point['residuals']['korepin'])
            self.assertEqual(korepin['residuals']['full_product'],
                korepin['full_product'])

    def test_colliding_lambda(self):
        args = ['--L', '2', '--gamma', '0.5,0.1', '--mu', '0.1,0', '--mu',
            '0.6,0.2', '--lambda', '0.3,0', '--lambda', '0.3,0', '--trials',
            '1', '--out', self.path('collide.json'),
            'vertexspectra.verify.strict=false', 'verify']
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main(*args))
        data = json.loads(self.load('collide.json'))
        point = data['points'][0]
        self.assertEqual('skipped', point['status'])
        self.assertEqual('SEPARATION', point['reason'])
        self.assertEqual('SKIP', point['verdict'])
        self.assertEqual(1, data['summary']['skipped'])
        self.assertEqual('PASS', data['summary']['verdict'])

    def test_deterministic(self):
        self.run_main('--out', self.path('first.json'), 'verify')
        self.run_main('--out', self.path('second.json'),
            'vertexspectra.verify.workers=1', 'verify')
        self.assertEqual(self.load('first.json'), self.load('second.json'))

    def test_seed(self):
        self.run_main('--out', self.path('first.json'), 'verify')
        self.run_main('--out', self.path('second.json'), '--seed', '8',
            'verify')
        self.assertNotEqual(self.load('first.json'),
            self.load('second.json'))

    def test_fixed_point(self):
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main('--out',
            self.path('fixed.json'), '--trials', '1', *(FIXED + ['verify'])))
        data = json.loads(self.load('fixed.json'))
        self.assertEqual([0.5, 0.1], data['points'][0]['gamma'])

    def test_fixed_separation(self):
        args = ['--L', '2', '--gamma', '0.5,0.1', '--mu', '0.1,0', '--mu',
            '0.1,0', '--lambda', '0.3,0', '--lambda', '0.5,0', '--trials',
            '1', '--out', self.path('bad.json'), 'verify']
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main(*args))

    def test_zvalue(self):
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main('--out',
            self.path('z.jsonl'), *(FIXED + ['zvalue'])))
        lines = self.load('z.jsonl').splitlines()
        self.assertEqual(8, len(lines))
        values = [json.loads(line) for line in lines]
        self.assertEqual(set(['branch', 'kappa0', 'detH', 'Z',
            'conditionEstimate']), set(values[0]))
        first = complex(*values[0]['Z'])
        for value in values:
            self.assertLess(test.relative(complex(*value['Z']), first), 1e-8)

    def test_zvalue_branch(self):
        self.run_main('--out', self.path('z.jsonl'), '--branch', '3',
            *(FIXED + ['zvalue']))
        lines = self.load('z.jsonl').splitlines()
        self.assertEqual(1, len(lines))
        self.assertEqual(3, json.loads(lines[0])['branch'])

    def test_spectrum(self):
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main('--out',
            self.path('spectrum.json'), *(FIXED + ['spectrum'])))
        data = json.loads(self.load('spectrum.json'))
        self.assertEqual(8, len(data['rows']))
        for row in data['rows']:
            self.assertLess(row['residual'], 1e-9)

    def test_degenerate_spectrum(self):
        self.assertEqual(vertexspectra.EXIT_DEGENERATE, self.run_main(
            '--L', '2', '--gamma', '0,0', '--out', self.path('s.json'),
            'spectrum'))

    def test_sweep(self):
        grid = '{"L": [2, 3], "gamma": [[0.5, 0.1], [0.8, 0.0]], "trials": 1}'
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main('--out',
            self.path('sweep.json'), 'vertexspectra.verify.grid=%s' % grid,
            'sweep'))
        data = json.loads(self.load('sweep.json'))
        self.assertEqual([(2, [0.5, 0.1]), (3, [0.5, 0.1]), (2, [0.8, 0.0]),
            (3, [0.8, 0.0])], [(row['L'], row['gamma'])
            for row in data['rows']])

    def test_sweep_missing_field(self):
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main(
            'vertexspectra.verify.grid={"L": [2]}', 'sweep'))
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main('sweep'))

    def test_usage_errors(self):
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main('unknown'))
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main(
            'vertexspectra.verify.nope=1', 'verify'))
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main(
            'verify', 'sweep'))
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main(
            '--tol', '0', 'verify'))
        self.assertEqual(vertexspectra.EXIT_USAGE, self.run_main())
        self.assertEqual(vertexspectra.EXIT_PASS, self.run_main('--help'))

    def test_bad_config_file(self):
        path = self.path('broken.json')
        with open(path, 'w') as config_file:
            config_file.write('{"vertexspectra": \n')
        self.assertEqual(vertexspectra.EXIT_USAGE,
            vertexspectra.main(['-c', path, 'verify']))


class TestParsing(unittest.TestCase):
    '''Test case for flag and option value parsing.'''

    def test_lengths(self):
        self.assertEqual([3, 4, 5], vertexspectra.parse_lengths('3..5'))
        self.assertEqual([3, 6], vertexspectra.parse_lengths('3,6'))
        self.assertEqual([4], vertexspectra.parse_lengths('4'))

    def test_pair(self):
        self.assertEqual([0.5, -0.1], vertexspectra.parse_pair('0.5,-0.1'))
        self.assertEqual([0.5, 0.0], vertexspectra.parse_pair('0.5'))
        self.assertRaises(ValueError, vertexspectra.parse_pair, '1,2,3')

    def test_tolerances(self):
        self.assertEqual({'endToEnd': 1e-6},
            vertexspectra.parse_tolerances('1e-6'))
        self.assertEqual({'korepin': 1e-7, 'trace': 1e-8},
            vertexspectra.parse_tolerances('korepin=1e-7, trace=1e-8'))

    def test_values(self):
        self.assertEqual(8, vertexspectra.parse_value('8'))
        self.assertEqual(True, vertexspectra.parse_value('true'))
        self.assertEqual(None, vertexspectra.parse_value('none'))
        self.assertEqual(1e-3, vertexspectra.parse_value('1e-3'))
        self.assertEqual([1, 2], vertexspectra.parse_value('[1, 2]'))
        self.assertEqual('abc', vertexspectra.parse_value('abc'))


class TestVerify(unittest.TestCase):
    '''Test case for grid expansion, verdicts and exit codes.'''

    def test_grid(self):
        rows = verify.parse_grid([{'L': 3, 'gamma': [0.5, 0.1]},
            {'L': [2, 4], 'gamma': [[0.5, 0.0], [0.9, 0.1]], 'trials': 2}])
        self.assertEqual(5, len(rows))
        self.assertEqual((3, [0.5, 0.1]), (rows[0]['L'], rows[0]['gamma']))
        self.assertEqual(2, rows[-1]['trials'])
        self.assertRaises(vertexspectra.ConfigError, verify.parse_grid,
            [{'gamma': [0.5, 0.1]}])
        self.assertRaises(vertexspectra.ConfigError, verify.parse_grid, None)

    def test_exit_codes(self):
        record = lambda status, verdict: {'status': status,
            'verdict': verdict, 'residuals': {'trace': 1e-12}}
        summary = verify.summarize([record('evaluated', verify.PASS)])
        self.assertEqual(vertexspectra.EXIT_PASS, verify.exit_code(summary))
        summary = verify.summarize([record('evaluated', verify.PASS),
            record('degenerate', verify.SKIP)])
        self.assertEqual(vertexspectra.EXIT_DEGENERATE,
            verify.exit_code(summary))
        summary = verify.summarize([record('evaluated', verify.FAIL),
            record('degenerate', verify.SKIP)])
        self.assertEqual(vertexspectra.EXIT_FAILURE,
            verify.exit_code(summary))
        self.assertEqual(1, summary['failed'])
        self.assertEqual(1e-12, summary['max_residuals']['trace'])

    def test_verdict(self):
        verifier = verify.Verifier(test.core())
        self.assertEqual(verify.PASS, verifier.verdict({'trace': 1e-12}))
        self.assertEqual(verify.FAIL, verifier.verdict({'trace': 1e-3}))
        self.assertEqual(verify.FAIL,
            verifier.verdict({'trace': float('nan')}))

    def test_sampler(self):
        config = verify.SweepConfig(test.core())
        first = verify.Sampler(config, 3, 1).candidate()
        second = verify.Sampler(config, 3, 1).candidate()
        self.assertEqual(first[0].mu, second[0].mu)
        self.assertEqual(list(first[1]), list(second[1]))
        other = verify.Sampler(config, 3, 2).candidate()
        self.assertNotEqual(first[0].mu, other[0].mu)


if __name__ == '__main__':
    unittest.main()
