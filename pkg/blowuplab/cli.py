# -*- coding: utf-8 -*-
"""
Batch frontend: ``python -m blowuplab <command> [flags]``.

Parameters are resolved as CLI flags over a ``--config`` JSON file over defaults;
every run writes its artifacts and a canonical echo of the resolved configuration.
Exit codes: ``0`` success, ``1`` validation error, ``2`` numerical failure.
"""
import argparse
import json
import math
import os
import re
import sys

from . import config, verbose
from . import evolve, lightcone, linop, modes, profiles, verify
from .categories import Command, VerifyLevel
from .grid import CollocationGrid
from .logger import logger
from .run_config import EvolutionConfig, Perturbation, RunConfig
from .utils import BlowupLabException, ParameterError, atomic_write, dumps, frame_to_csv

ECHO_NAME = 'config_echo.json'

DEFAULTS = {
    Command.profile: {'alpha': None, 'beta': 'inf', 'kappa': 0., 'T': 1., 'x0': 0., 'samples': 201,
                      'permissive': False},
    Command.scan_modes: {'alpha': None, 're': '-0.9:4', 'im': '-4:4', 'grid': '40x40', 'n_max': 2000},
    Command.spectrum: {'alpha': None, 'N': 64, 'k_norm': 4},
    Command.evolve_linear: {'alpha0': 3., 'grid_N': 32, 'k_norm': 4, 's_max': 2., 'mode': Perturbation.ModeF1},
    Command.evolve_nonlinear: {'alpha0': 3., 'kappa0': 0., 'T0': 1., 'x0': 0., 'k_norm': 4, 'delta': 0.1,
                               'dt': None, 's_max': 5., 'grid_N': 32, 'eps': 1e-4, 'modulation_passes': 2,
                               'perturbation': Perturbation.Random},
    Command.lightcone: {'alpha': 3., 'beta': 'inf', 'kappa': 0., 'T': 1., 'x0': 0., 'N': 2048, 's_max': None,
                        'eps': 0.},
    Command.verify: {'level': VerifyLevel.fast.value},
}


class ArgumentParser(argparse.ArgumentParser):
    """ Usage errors are validation errors, reported through the exit code ``1``.
    Negative numbers and ranges such as ``-0.9:3`` are values, never flags. """

    def __init__(self, *args, **kwargs):
        super(ArgumentParser, self).__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r'^-\d+$|^-\d*\.\d+$|^-[\d.]+(e-?\d+)?:-?[\d.]+(e-?\d+)?$')

    def error(self, message):
        raise ParameterError(message)


def parse_range(token):
    """ ``"lo:hi"`` into a pair of floats. """
    parts = str(token).split(':')
    if len(parts) != 2:
        raise ParameterError('range must read lo:hi, got {!r}'.format(token))
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise ParameterError('range must satisfy lo < hi, got {!r}'.format(token))
    return lo, hi


def parse_grid(token):
    """ ``"NxM"`` into a pair of positive integers. """
    parts = str(token).lower().split('x')
    if len(parts) != 2:
        raise ParameterError('grid must read NxM, got {!r}'.format(token))
    n, m = int(parts[0]), int(parts[1])
    if n < 1 or m < 1:
        raise ParameterError('grid dimensions must be >= 1, got {!r}'.format(token))
    return n, m


def _add_common(parser):
    parser.add_argument('--out', default=None, help='output directory (overridden by BLOWUPLAB_OUT)')
    parser.add_argument('--config', default=None, help='JSON file of parameters, overridden by flags')
    parser.add_argument('--seed', type=int, default=None, help='seed of every random draw')
    parser.add_argument('--jobs', type=int, default=None, help='cap on parallel workers')
    parser.add_argument('-v', '--verbose', action='store_true', help='info logging')


def build_parser():
    parser = ArgumentParser(prog='blowuplab', description='Generalized self-similar blow-up laboratory')
    sub = parser.add_subparsers(dest='command')

    p = sub.add_parser(Command.profile.value, help='tabulate a profile of the family')
    p.add_argument('--alpha', type=float)
    p.add_argument('--beta')
    p.add_argument('--kappa', type=float)
    p.add_argument('--T', type=float)
    p.add_argument('--x0', type=float)
    p.add_argument('--samples', type=int)
    p.add_argument('--permissive', action='store_true', default=None)

    p = sub.add_parser(Command.scan_modes.value, help='mode-stability verdicts on a lattice')
    p.add_argument('--alpha', type=float)
    p.add_argument('--re')
    p.add_argument('--im')
    p.add_argument('--grid')
    p.add_argument('--n-max', dest='n_max', type=int)

    p = sub.add_parser(Command.spectrum.value, help='discrete spectrum of the linearized operator')
    p.add_argument('--alpha', type=float)
    p.add_argument('--N', type=int)
    p.add_argument('--k-norm', dest='k_norm', type=int)

    p = sub.add_parser(Command.evolve_linear.value, help='linearized evolution of a symmetry mode')
    p.add_argument('--alpha', dest='alpha0', type=float)
    p.add_argument('--N', dest='grid_N', type=int)
    p.add_argument('--k-norm', dest='k_norm', type=int)
    p.add_argument('--s-max', dest='s_max', type=float)
    p.add_argument('--mode', choices=Perturbation.Modes)

    p = sub.add_parser(Command.evolve_nonlinear.value, help='nonlinear evolution with modulation fit')
    p.add_argument('--alpha', dest='alpha0', type=float)
    p.add_argument('--kappa', dest='kappa0', type=float)
    p.add_argument('--T', dest='T0', type=float)
    p.add_argument('--x0', type=float)
    p.add_argument('--k-norm', dest='k_norm', type=int)
    p.add_argument('--delta', type=float)
    p.add_argument('--dt', type=float)
    p.add_argument('--s-max', dest='s_max', type=float)
    p.add_argument('--N', dest='grid_N', type=int)
    p.add_argument('--eps', type=float)
    p.add_argument('--passes', dest='modulation_passes', type=int)
    p.add_argument('--perturbation', choices=list(Perturbation.Full))

    p = sub.add_parser(Command.lightcone.value, help='physical-frame solver in the light cone')
    p.add_argument('--alpha', type=float)
    p.add_argument('--beta')
    p.add_argument('--kappa', type=float)
    p.add_argument('--T', type=float)
    p.add_argument('--x0', type=float)
    p.add_argument('--N', type=int)
    p.add_argument('--s-max', dest='s_max', type=float)
    p.add_argument('--eps', type=float)

    p = sub.add_parser(Command.verify.value, help='acceptance suite')
    p.add_argument('--level', choices=[level.value for level in VerifyLevel])

    for name in sub.choices.values():
        _add_common(name)
    return parser


def resolve_params(command, args):
    """ Defaults, then the ``--config`` file, then explicit flags. """
    params = dict(DEFAULTS[command])
    if args.config:
        with open(args.config) as handle:
            from_file = json.load(handle)
        if not isinstance(from_file, dict):
            raise ParameterError('config file must hold a JSON object')
        unknown = set(from_file) - set(params) - {'seed', 'jobs', 'out'}
        if unknown:
            raise ParameterError('unknown keys in {}: {}'.format(args.config, ', '.join(sorted(unknown))))
        params.update((k, v) for k, v in from_file.items() if k in params)
    else:
        from_file = {}
    for key in params:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    seed = args.seed if args.seed is not None else from_file.get('seed', 0)
    jobs = args.jobs if args.jobs is not None else from_file.get('jobs', config.jobs)
    out = os.environ.get('BLOWUPLAB_OUT') or args.out or from_file.get('out') or '.'
    return params, int(seed), int(jobs), out


def _require_alpha(params):
    if params.get('alpha') is None:
        raise ParameterError('--alpha is required and must be > 0')


def _profile_params(params):
    _require_alpha(params)
    return profiles.ProfileParams(params['alpha'], profiles.parse_beta(params['beta']), params['kappa'],
                                  params['T'], params['x0'], permissive=bool(params.get('permissive')))


def _materialize(command, params, seed):
    """ Validate and return the fully resolved parameters for the echo. """
    if command in (Command.profile, Command.lightcone):
        materialized = dict(params)
        materialized.update(_profile_params(params).to_dict())
        if command == Command.lightcone and materialized['s_max'] is None:
            materialized['s_max'] = math.log(100.)
        return materialized
    if command == Command.scan_modes:
        _require_alpha(params)
        parse_range(params['re'])
        parse_range(params['im'])
        parse_grid(params['grid'])
        return dict(params)
    if command == Command.spectrum:
        _require_alpha(params)
        return dict(params)
    if command == Command.evolve_linear:
        cfg = EvolutionConfig(alpha0=params['alpha0'], grid_N=params['grid_N'], k_norm=params['k_norm'],
                              s_max=params['s_max'], seed=seed)
        materialized = cfg.to_dict()
        materialized['mode'] = params['mode']
        return materialized
    if command == Command.evolve_nonlinear:
        keys = [k for k in params if k != 'perturbation']
        cfg = EvolutionConfig(seed=seed, **dict((k, params[k]) for k in keys))
        materialized = cfg.to_dict()
        materialized['perturbation'] = params['perturbation']
        return materialized
    VerifyLevel(params['level'])
    return dict(params)


def emit_config_echo(cfg):
    """ Write the canonical JSON echo of ``cfg`` into its output directory.

    Returns:
        str: Path of the echo file
    """
    return atomic_write(os.path.join(cfg.output_dir, ECHO_NAME), dumps(cfg.to_dict()))


def _write_json(out, name, payload):
    return atomic_write(os.path.join(out, name), dumps(payload))


def _run_profile(cfg):
    params = _profile_params(cfg.params)
    frame_to_csv(profiles.profile_table(params, cfg.params['samples']), os.path.join(cfg.output_dir, 'profile.csv'))
    return 0


def _run_scan(cfg):
    p = cfg.params
    verdicts = modes.scan_halfplane(p['alpha'], parse_range(p['re']), parse_range(p['im']), parse_grid(p['grid']),
                                    n_max=p['n_max'], jobs=cfg.jobs)
    frame_to_csv(modes.scan_to_frame(verdicts), os.path.join(cfg.output_dir, 'scan.csv'))
    return 0


def _run_spectrum(cfg):
    p = cfg.params
    report = linop.assemble_and_eig(p['alpha'], CollocationGrid(p['N']), p['k_norm'])
    frame_to_csv(report.to_frame(), os.path.join(cfg.output_dir, 'spectrum.csv'))
    _write_json(cfg.output_dir, 'spectrum.json', linop.spectral_report_json(report))
    return 0


def _run_evolve_linear(cfg):
    p = dict(cfg.params)
    mode = p.pop('mode')
    evo = EvolutionConfig.from_dict(p)
    grid = CollocationGrid(evo.grid_N)
    q0 = getattr(linop.symmetry_modes(evo.alpha0, grid), mode)
    trace = evolve.evolve_linear(evo.alpha0, grid, q0, evo)
    frame_to_csv(evolve.trace_to_frame(trace), os.path.join(cfg.output_dir, 'trace.csv'))
    _write_json(cfg.output_dir, 'summary.json', dict(trace.summary(), mode=mode, config=evo.to_dict()))
    return 0


def _run_evolve_nonlinear(cfg):
    p = dict(cfg.params)
    kind = p.pop('perturbation')
    evo = EvolutionConfig.from_dict(p)
    trace = evolve.evolve_nonlinear(evo, evolve.build_perturbation(evo, kind))
    summary = dict(trace.summary(), perturbation=kind, config=evo.to_dict())
    if trace.stable_norm and any(trace.stable_norm):
        summary['slope'] = evolve.decay_rate(trace, (min(1., evo.s_max / 2), evo.s_max))
    frame_to_csv(evolve.trace_to_frame(trace), os.path.join(cfg.output_dir, 'trace.csv'))
    _write_json(cfg.output_dir, 'summary.json', summary)
    return 0


def _run_lightcone(cfg):
    p = cfg.params
    params = _profile_params(p)
    f = g = None
    if p['eps']:
        f, g = evolve.random_perturbation(p['eps'], cfg.seed, even=True)
    run = lightcone.lightcone_solver(params, f, g, N=p['N'], s_max=p['s_max'])
    frame_to_csv(run.history, os.path.join(cfg.output_dir, 'lightcone.csv'))
    _write_json(cfg.output_dir, 'summary.json', {'blowup_time': run.blowup_time,
                                                 'alpha_estimate': run.alpha_estimate,
                                                 'seed': cfg.seed})
    return 0


def _run_verify(cfg):
    table = verify.run_suite(VerifyLevel(cfg.params['level']))
    print(table.to_string(index=False))
    frame_to_csv(table, os.path.join(cfg.output_dir, 'verify.csv'))
    failure = verify.first_failure(table)
    if failure is not None:
        print('first failure: {}'.format(failure), file=sys.stderr)
    return verify.suite_exit_code(table)


RUNNERS = {
    Command.profile: _run_profile,
    Command.scan_modes: _run_scan,
    Command.spectrum: _run_spectrum,
    Command.evolve_linear: _run_evolve_linear,
    Command.evolve_nonlinear: _run_evolve_nonlinear,
    Command.lightcone: _run_lightcone,
    Command.verify: _run_verify,
}


def parse_and_dispatch(argv=None):
    """ Parse ``argv``, run the subcommand and map failures to exit codes.

    Returns:
        int: ``0`` on success, ``1`` on a validation error, ``2`` on a numerical failure
    """
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ParameterError('a subcommand is required: {}'.format(', '.join(c.value for c in Command)))
        verbose(args.verbose)
        command = Command(args.command)
        params, seed, jobs, out = resolve_params(command, args)
        cfg = RunConfig(command.value, _materialize(command, params, seed), out, seed, jobs)
        logger.info('[CLI] {} into {} (seed={}, jobs={})'.format(command.value, out, seed, jobs))
        emit_config_echo(cfg)
        return RUNNERS[command](cfg)
    except BlowupLabException as e:
        print('{}: {}'.format(type(e).__name__, e), file=sys.stderr)
        return e.exit_code
    except (OSError, ValueError) as e:
        print('{}: {}'.format(type(e).__name__, e), file=sys.stderr)
        return 1


def main():
    sys.exit(parse_and_dispatch())
