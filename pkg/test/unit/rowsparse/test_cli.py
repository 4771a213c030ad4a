import argparse
import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

from rowsparse import cli
from rowsparse.core import RealMatrix
from rowsparse.noise import NoiseSpec


@mock.patch.dict(os.environ, {'ROWSPARSE_SEED': ''})
class CliTestCase(unittest.TestCase):

    def setUp(self):

        self.tmp = tempfile.mkdtemp()

    def tearDown(self):

        shutil.rmtree(self.tmp)

    def path(self, name):

        return os.path.join(self.tmp, name)

    def write_config(self, data, name='exp.json'):

        with open(self.path(name), 'w') as f:
            json.dump(data, f)
        return self.path(name)

    def test_usage_errors_exit_one(self):

        for argv in ([], ['rates'], ['check'], ['rates', '--n1', 'two', '--n2', '4', '--s', '1']):
            with mock.patch('sys.stderr', new_callable=io.StringIO):
                with self.assertRaises(SystemExit) as ctx:
                    cli.main(argv)
            self.assertEqual(ctx.exception.code, cli.EXIT_USAGE)

    def test_rates(self):

        with mock.patch('sys.stdout', new_callable=io.StringIO) as out:
            code = cli.main(['--quiet', 'rates', '--n1', '4', '--n2', '8', '--s', '2'])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertAlmostEqual(json.loads(out.getvalue())['rate_hard'], 19.0904, places=4)

    def test_rates_domain_error(self):

        code = cli.main(['--quiet', 'rates', '--n1', '4', '--n2', '8', '--s', '2', '--q', '3'])
        self.assertEqual(code, cli.EXIT_USAGE)

    def test_estimate(self):

        RealMatrix([[3.0, 1.2, 0.5, 0.0]]).write(self.path('Y.csv'))
        code = cli.main(['--quiet', 'estimate', '--input', self.path('Y.csv'), '--lambda', '1',
                         '--output', self.path('M.csv'), '--report', self.path('report.json')])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(RealMatrix.read(self.path('M.csv')), RealMatrix([[3.0, 1.2, 0.0, 0.0]]))
        with open(self.path('report.json')) as f:
            self.assertEqual(json.load(f)['k_star'], 2)

    def test_estimate_rowwise(self):

        RealMatrix([[3.0, 1.2, 0.5, 0.0], [2.0, 0.0, 0.0, 0.0]]).write(self.path('Y.json'))
        code = cli.main(['--quiet', 'estimate', '--input', self.path('Y.json'), '--lambda', '1',
                         '--rowwise', '--output', self.path('M.json'),
                         '--report', self.path('report.json')])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(RealMatrix.read(self.path('M.json')),
                         RealMatrix([[3.0, 1.2, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]]))
        with open(self.path('report.json')) as f:
            report = json.load(f)
        self.assertEqual(report['k_star'], 3)
        self.assertEqual(len(report['schedule_head']), 4)
        self.assertEqual((report['first_crossing'], report['last_crossing']), (3, 3))

    def test_missing_input(self):

        code = cli.main(['--quiet', 'estimate', '--input', self.path('nope.csv'), '--lambda', '1',
                         '--output', self.path('M.csv')])
        self.assertEqual(code, cli.EXIT_USAGE)

    def test_pack(self):

        code = cli.main(['--quiet', 'pack', '--n1', '2', '--n2', '4', '--s', '1', '--dmin', '2',
                         '--budget', '500', '--seed', '3', '--out', self.path('pack.json')])
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.path('pack.json')) as f:
            data = json.load(f)
        self.assertGreaterEqual(len(data['patterns']), 4)
        self.assertTrue(data['certificate']['passed'])

    def test_pack_constructions(self):

        for construction in ('replicate', 'pad'):
            out = self.path('%s.json' % construction)
            code = cli.main(['--quiet', 'pack', '--n1', '4', '--n2', '16', '--s', '2', '--budget', '300',
                             '--seed', '5', '--construction', construction, '--out', out])
            self.assertEqual(code, cli.EXIT_OK)
            with open(out) as f:
                self.assertEqual(json.load(f)['s'], 2)

    def test_check_pack(self):

        argv = ['--quiet', 'check', 'pack', '--n1', '4', '--n2', '16', '--s', '2', '--budget', '2000',
                '--seed', '5', '--max-size', '60']
        self.assertEqual(cli.main(argv), cli.EXIT_OK)
        with mock.patch('rowsparse.cli.disagreement_violations', return_value=[(0, 1)]):
            self.assertEqual(cli.main(argv), cli.EXIT_FAILED)

    def test_check_tail(self):

        code = cli.main(['--quiet', 'check', 'tail', '--n1', '3', '--n2', '4', '--trials', '100',
                         '--seed', '1', '--out', self.path('tail.json')])
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.path('tail.json')) as f:
            self.assertEqual(len(json.load(f)['curve']), 20)

    def test_check_oracle(self):

        config = self.write_config({'grid': [[3, 8, 2]], 'trials': 20, 'base_seed': 4})
        code = cli.main(['--quiet', 'check', 'oracle', '--config', config, '--truncation', '1',
                         '--delta', '5'])
        self.assertEqual(code, cli.EXIT_OK)

    def test_simulate(self):

        config = self.write_config({'grid': [[2, 8, 1], [4, 8, 1]], 'trials': 5})
        code = cli.main(['--quiet', 'simulate', '--config', config, '--seed', '9',
                         '--noise', 'rademacher', '--out', self.path('risks.csv')])
        self.assertEqual(code, cli.EXIT_OK)
        with open(self.path('risks.csv')) as f:
            self.assertEqual(len(f.read().splitlines()), 3)

    def test_sweep_window(self):

        config = self.write_config({'grid': [[1, 16, 1], [2, 16, 1], [4, 16, 1], [8, 16, 1]],
                                    'trials': 5, 'base_seed': 2})
        wide = ['--quiet', 'sweep', '--config', config, '--min-slope', '-100', '--max-slope', '100',
                '--min-r2', '0']
        self.assertEqual(cli.main(wide), cli.EXIT_OK)
        narrow = ['--quiet', 'sweep', '--config', config, '--min-slope', '50', '--max-slope', '60']
        self.assertEqual(cli.main(narrow), cli.EXIT_FAILED)

    def test_invalid_config(self):

        config = self.write_config({'grid': [[2, 8, 1]], 'colour': 'blue'})
        self.assertEqual(cli.main(['--quiet', 'simulate', '--config', config]), cli.EXIT_USAGE)

    def test_malformed_config_values(self):

        for data in ({'grid': [[2, 8, 1]], 'trials': 'many'},
                     {'grid': [['two', 8, 1]]},
                     {'grid': 5},
                     {'grid': [[2, 8, 1]], 'noise': {'family': 'gaussian', 'param': 'abc'}},
                     {'grid': [[2, 8, 1]], 'penalty': {'lambda': 'big'}},
                     [[2, 8, 1]]):
            config = self.write_config(data)
            code = cli.main(['--quiet', 'simulate', '--config', config])
            self.assertEqual(code, cli.EXIT_USAGE, data)

    def test_scale_flag_keeps_K_override(self):

        base = NoiseSpec('gaussian', 1.0, K=3.0)
        same = cli._noise_from_args(argparse.Namespace(noise=None, scale=2.0), base)
        self.assertEqual((same.family, same.param, same.K), ('gaussian', 2.0, 3.0))
        other = cli._noise_from_args(argparse.Namespace(noise='rademacher', scale=None), base)
        self.assertEqual((other.family, other.param, other.K), ('rademacher', 1.0, None))
        self.assertIs(cli._noise_from_args(argparse.Namespace(noise=None, scale=None), base), base)

    def test_quiet_is_scoped_to_one_call(self):

        level = cli.echo.logger.level
        argv = ['rates', '--n1', '4', '--n2', '8', '--s', '2']
        with mock.patch('sys.stdout', new_callable=io.StringIO):
            self.assertEqual(cli.main(['--quiet'] + argv), cli.EXIT_OK)
        self.assertEqual(cli.echo.logger.level, level)
