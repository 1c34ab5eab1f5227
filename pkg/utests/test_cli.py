import json
import os
from collections import OrderedDict

import pandas as pd
import pytest

from blowuplab import cli, verify
from blowuplab.categories import VerifyLevel


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.delenv('BLOWUPLAB_OUT', raising=False)
    return str(tmp_path)


def read_echo(directory):
    with open(os.path.join(directory, cli.ECHO_NAME)) as handle:
        return handle.read()


def test_profile(out):
    assert cli.parse_and_dispatch(['profile', '--alpha', '3', '--beta', 'inf', '--samples', '201', '--out', out]) == 0
    frame = pd.read_csv(os.path.join(out, 'profile.csv'))
    assert len(frame) == 201
    echo = json.loads(read_echo(out))
    assert echo['command'] == 'profile'
    assert echo['params']['beta'] == 'inf'
    assert echo['params']['alpha'] == 3.


def test_echo_is_byte_stable(out):
    argv = ['profile', '--alpha', '2', '--beta', '0.5', '--samples', '11', '--out', out, '--jobs', '1']
    assert cli.parse_and_dispatch(argv) == 0
    first = read_echo(out)
    assert cli.parse_and_dispatch(argv) == 0
    assert read_echo(out) == first


@pytest.mark.parametrize('argv', [['profile', '--alpha', '-1'],
                                  ['profile'],
                                  ['profile', '--alpha', '3', '--beta', '-2'],
                                  ['scan-modes', '--alpha', '3', '--re', '3:1'],
                                  ['scan-modes', '--alpha', '3', '--grid', '20by20'],
                                  ['scan-modes', '--alpha', '3', '--re', '-1.5:1'],
                                  ['evolve-linear', '--mode', 'random'],
                                  ['no-such-command'],
                                  []],
                         ids=['negative-alpha', 'missing-alpha', 'negative-beta', 'empty-range', 'bad-grid',
                              'half-plane', 'non-mode-perturbation', 'unknown-command', 'no-command'])
def test_validation_errors(out, argv, capsys):
    assert cli.parse_and_dispatch(argv + ['--out', out] if argv else argv) == 1
    last = capsys.readouterr().err.strip().splitlines()[-1]
    assert last.split(': ')[0].isidentifier()


def test_negative_alpha_message(out, capsys):
    assert cli.parse_and_dispatch(['profile', '--alpha', '-1', '--out', out]) == 1
    last = capsys.readouterr().err.strip().splitlines()[-1]
    assert last.startswith('ParameterError: alpha must be > 0')


def test_scan_modes(out):
    argv = ['scan-modes', '--alpha', '3', '--re', '-0.9:3', '--im', '-3:3', '--grid', '20x20', '--out', out,
            '--jobs', '2']
    assert cli.parse_and_dispatch(argv) == 0
    frame = pd.read_csv(os.path.join(out, 'scan.csv'))
    assert len(frame) == 400
    assert not frame['smooth'].any()


def test_spectrum(out):
    assert cli.parse_and_dispatch(['spectrum', '--alpha', '3', '--N', '32', '--k-norm', '2', '--out', out]) == 0
    with open(os.path.join(out, 'spectrum.json')) as handle:
        payload = json.load(handle)
    assert payload['N'] == 32
    assert len(pd.read_csv(os.path.join(out, 'spectrum.csv'))) == 66


def test_config_file_precedence(out, tmp_path):
    path = os.path.join(str(tmp_path), 'params.json')
    with open(path, 'w') as handle:
        json.dump({'alpha': 8., 'samples': 11, 'seed': 5}, handle)
    assert cli.parse_and_dispatch(['profile', '--config', path, '--samples', '21', '--out', out]) == 0
    echo = json.loads(read_echo(out))
    assert echo['params']['alpha'] == 8.
    assert echo['params']['samples'] == 21
    assert echo['seed'] == 5
    assert len(pd.read_csv(os.path.join(out, 'profile.csv'))) == 21


def test_config_file_unknown_key(out, tmp_path):
    path = os.path.join(str(tmp_path), 'params.json')
    with open(path, 'w') as handle:
        json.dump({'alpha': 3., 'colour': 'blue'}, handle)
    assert cli.parse_and_dispatch(['profile', '--config', path, '--out', out]) == 1


def test_environment_overrides_out(tmp_path, monkeypatch):
    target = os.path.join(str(tmp_path), 'from-env')
    monkeypatch.setenv('BLOWUPLAB_OUT', target)
    ignored = os.path.join(str(tmp_path), 'from-flag')
    assert cli.parse_and_dispatch(['profile', '--alpha', '3', '--samples', '5', '--out', ignored]) == 0
    assert os.path.exists(os.path.join(target, 'profile.csv'))
    assert not os.path.exists(ignored)


def test_evolve_linear(out):
    argv = ['evolve-linear', '--alpha', '3', '--N', '24', '--k-norm', '2', '--s-max', '0.5', '--mode', 'f1',
            '--out', out]
    assert cli.parse_and_dispatch(argv) == 0
    trace = pd.read_csv(os.path.join(out, 'trace.csv'))
    assert trace['s'].iloc[-1] == pytest.approx(0.5)
    echo = json.loads(read_echo(out))
    assert echo['params']['dt'] > 0
    assert echo['params']['mode'] == 'f1'


def test_numerical_failure_exit_code(out, capsys):
    argv = ['evolve-nonlinear', '--N', '24', '--k-norm', '2', '--s-max', '1', '--dt', '0.05', '--passes', '1',
            '--out', out]
    assert cli.parse_and_dispatch(argv) == 2
    last = capsys.readouterr().err.strip().splitlines()[-1]
    assert last.startswith('Instability: ') or last.startswith('BlowupInFrame: ')


def test_output_directory_is_a_file(tmp_path, monkeypatch):
    monkeypatch.delenv('BLOWUPLAB_OUT', raising=False)
    blocker = os.path.join(str(tmp_path), 'blocker')
    with open(blocker, 'w') as handle:
        handle.write('x')
    assert cli.parse_and_dispatch(['profile', '--alpha', '3', '--out', blocker]) == 1


def test_parsers():
    assert cli.parse_range('-0.9:4') == (-0.9, 4.)
    assert cli.parse_grid('40x20') == (40, 20)


@pytest.mark.parametrize('passed, code', [(True, 0), (False, 2)], ids=['pass', 'fail'])
def test_verify_exit_codes(out, monkeypatch, passed, code, capsys):
    checks = OrderedDict()
    checks['stub'] = verify.Check('stub', VerifyLevel.fast, lambda: verify.CheckOutcome(passed, 1., 'stub'))
    monkeypatch.setattr(verify, 'registry', checks)
    assert cli.parse_and_dispatch(['verify', '--level', 'fast', '--out', out]) == code
    assert 'stub' in capsys.readouterr().out
    table = pd.read_csv(os.path.join(out, 'verify.csv'))
    assert table['passed'].tolist() == [passed]
