from __future__ import print_function
import logging
import os
from .logger import logger, scan_logger


__version__ = '1.0.0'


def verbose(v, debug=False, scan_log=False):
    """ Set the package level of verbosity.

    Args:
        v (bool): Whether to activate info logging
        debug (bool, optional): Whether to activate detailed
            debug logging (default: ``False``)
        scan_log (bool, optional): Whether to log the progress of every
            task of a parallel sweep (default: ``False``)
    """
    if scan_log:
        scan_logger.setLevel(logging.DEBUG)

    if v:
        if debug:
            logger.setLevel(logging.DEBUG)
        else:
            logger.setLevel(logging.INFO)
    else:
        logger.setLevel(logging.WARNING)


verbose(False)


class Config:
    def __init__(self):
        # series and special functions
        self.tol = 1e-12
        self.max_terms = 100000
        self.n_max = 2000
        self.ratio_tail_threshold = 1e-2
        self.snap_tol = 1e-9
        # quadrature and finite differences
        self.quad_tol = 1e-10
        self.quad_limit = 200
        self.fd_h = 1e-4
        # collocation
        self.grid_N = 64
        self.k_norm = 4
        self.mode_tol = 1e-6
        self.resolved_tail = 1e-6
        self.jobs = int(os.environ.get('BLOWUPLAB_JOBS', os.cpu_count() or 1))


config = Config()

from blowuplab.utils import BlowupLabException, ValidationError, NumericalFailure
from blowuplab.categories import Evidence, ModeClass, SingularPoint, ExponentChoice, Command, VerifyLevel
from blowuplab.run_config import EvolutionConfig, RunConfig, base_evolution_config, quick_evolution_config, \
    verify_evolution_config
from blowuplab.profiles import ProfileParams, SelfSimilarPoint, StationaryWitness
from blowuplab.modes import EigenProblem
from blowuplab.grid import CollocationGrid, GridFunctionPair
from blowuplab.linop import SpectralReport, SpectralProjector
from blowuplab.evolve import EvolutionTrace
from blowuplab.lightcone import LightconeState

import blowuplab.specfun as specfun
import blowuplab.profiles as profiles
import blowuplab.modes as modes
import blowuplab.linop as linop
import blowuplab.evolve as evolve
import blowuplab.lightcone as lightcone

__all__ = ['config',
           'verbose',
           'BlowupLabException',
           'ValidationError',
           'NumericalFailure',
           'Evidence',
           'ModeClass',
           'SingularPoint',
           'ExponentChoice',
           'Command',
           'VerifyLevel',
           'EvolutionConfig',
           'RunConfig',
           'base_evolution_config',
           'quick_evolution_config',
           'verify_evolution_config',
           'ProfileParams',
           'SelfSimilarPoint',
           'StationaryWitness',
           'EigenProblem',
           'CollocationGrid',
           'GridFunctionPair',
           'SpectralReport',
           'SpectralProjector',
           'EvolutionTrace',
           'LightconeState',
           'specfun',
           'profiles',
           'modes',
           'linop',
           'evolve',
           'lightcone',
           ]
