import math

from .utils import ParameterError


class Perturbation(object):
    """ Kinds of initial perturbation of the blow-up profile. ``Modes`` holds the
    symmetry-mode kinds, ``Full`` every kind. """
    Zero = 'zero'
    """No perturbation"""
    Random = 'random'
    """Smooth random trigonometric polynomial"""
    ModeF0 = 'f0'
    """Multiple of the kappa-translation mode"""
    ModeF1 = 'f1'
    """Multiple of the time-translation mode"""
    ModeG0 = 'g0'
    """Multiple of the alpha-generalized mode"""
    Modes = (ModeF0, ModeF1, ModeG0)
    """Multiples of a symmetry mode"""
    Full = (Zero, Random) + Modes
    """Every perturbation kind"""


def cfl_dt(N):
    """ ``0.5 * (1 - cos(pi / N)) / (1 + max|y|)``: half the smallest node spacing over the
    largest characteristic speed of the transport part. """
    return 0.5 * (1. - math.cos(math.pi / N)) / 2.


class BaseConfig(object):

    config = {}

    def to_dict(self):
        """ Fully materialized mapping, keyed like the configuration files. """
        return dict((self.config[key], value) for key, value in self.__dict__.items() if key in self.config)

    @classmethod
    def from_dict(cls, kwargs_dict):
        reverse_dict = dict([(v, k) for k, v in cls.config.items()])

        class_args = {}

        for k, v in kwargs_dict.items():
            if k not in reverse_dict:
                continue

            if v is None or v == '':
                continue

            class_args[reverse_dict[k]] = v

        return cls(**class_args)

    def with_values(self, **kwargs):
        values = dict((key, value) for key, value in self.__dict__.items() if key in self.config)
        values.update(kwargs)
        return type(self)(**values)

    def __eq__(self, other):
        return type(other) is type(self) and other.to_dict() == self.to_dict()

    def __repr__(self):
        return '{}({})'.format(type(self).__name__,
                               ', '.join('{}={!r}'.format(k, v) for k, v in sorted(self.to_dict().items())))


class EvolutionConfig(BaseConfig):
    """ Parameters of a self-similar evolution around the profile ``(alpha0, kappa0, T0, x0)``.

    Args:
        alpha0 (float): Growth rate of the reference profile, > 0
        kappa0 (float, optional): Additive constant of the reference profile
        T0 (float, optional): Reference blow-up time, > 0
        x0 (float, optional): Blow-up point
        k_norm (int, optional): Sobolev index of the working norm
        delta (float, optional): Loss in the decay rate, the stable part decays like
            ``exp(-(1 - delta) s)``; ``w0 = 1 - delta``
        dt (float, optional): Time step in ``s``; materialized from :func:`cfl_dt` when omitted
        s_max (float, optional): Final self-similar time
        grid_N (int, optional): Collocation degree
        seed (int, optional): Seed of the random perturbations
        eps (float, optional): Size of the perturbation
        modulation_passes (int, optional): Fit/evolve rounds of the modulation fit
        sample_ds (float, optional): Spacing of the trace samples in ``s``
    """

    config = {
        'alpha0': 'alpha0',
        'kappa0': 'kappa0',
        'T0': 'T0',
        'x0': 'x0',
        'k_norm': 'k_norm',
        'delta': 'delta',
        'dt': 'dt',
        's_max': 's_max',
        'grid_N': 'grid_N',
        'seed': 'seed',
        'eps': 'eps',
        'modulation_passes': 'modulation_passes',
        'sample_ds': 'sample_ds',
    }

    def __init__(self,
                 alpha0=3.,
                 kappa0=0.,
                 T0=1.,
                 x0=0.,
                 k_norm=4,
                 delta=0.1,
                 dt=None,
                 s_max=5.,
                 grid_N=32,
                 seed=0,
                 eps=1e-4,
                 modulation_passes=2,
                 sample_ds=0.05):
        alpha0, T0, delta, s_max = float(alpha0), float(T0), float(delta), float(s_max)
        grid_N, k_norm = int(grid_N), int(k_norm)
        if not alpha0 > 0:
            raise ParameterError('alpha0 must be > 0, got {}'.format(alpha0))
        if not T0 > 0:
            raise ParameterError('T0 must be > 0, got {}'.format(T0))
        if not 0 < delta < 1:
            raise ParameterError('delta must lie in (0, 1), got {}'.format(delta))
        if grid_N < 8:
            raise ParameterError('grid_N must be >= 8, got {}'.format(grid_N))
        if k_norm < 0 or k_norm + 2 > grid_N // 2:
            raise ParameterError('k_norm = {} is not resolved at grid_N = {}'.format(k_norm, grid_N))
        if not s_max > 0:
            raise ParameterError('s_max must be > 0, got {}'.format(s_max))
        dt = cfl_dt(grid_N) if dt is None else float(dt)
        if not dt > 0:
            raise ParameterError('dt must be > 0, got {}'.format(dt))
        if int(modulation_passes) < 1:
            raise ParameterError('modulation_passes must be >= 1, got {}'.format(modulation_passes))
        if not sample_ds >= dt:
            raise ParameterError('sample_ds must be >= dt, got {} < {}'.format(sample_ds, dt))

        self.alpha0 = alpha0
        self.kappa0 = float(kappa0)
        self.T0 = T0
        self.x0 = float(x0)
        self.k_norm = k_norm
        self.delta = delta
        self.dt = dt
        self.s_max = s_max
        self.grid_N = grid_N
        self.seed = int(seed)
        self.eps = float(eps)
        self.modulation_passes = int(modulation_passes)
        self.sample_ds = float(sample_ds)

    @property
    def w0(self):
        return 1. - self.delta

    @property
    def sample_every(self):
        """ Number of steps between two trace samples. """
        return max(1, int(round(self.sample_ds / self.dt)))


class RunConfig(BaseConfig):
    """ Fully resolved invocation of a subcommand.

    Args:
        command (str): Subcommand name
        params (dict): Validated parameters of the target module
        output_dir (str): Directory receiving the artifacts
        seed (int, optional): Seed of every random draw of the run
        jobs (int, optional): Cap on the worker count of parallel sweeps
    """

    config = {
        'command': 'command',
        'params': 'params',
        'output_dir': 'output_dir',
        'seed': 'seed',
        'jobs': 'jobs',
    }

    def __init__(self, command, params=None, output_dir='.', seed=0, jobs=1):
        if int(jobs) < 1:
            raise ParameterError('jobs must be >= 1, got {}'.format(jobs))
        self.command = command
        self.params = dict(params or {})
        self.output_dir = output_dir
        self.seed = int(seed)
        self.jobs = int(jobs)


base_evolution_config = EvolutionConfig()
quick_evolution_config = EvolutionConfig(grid_N=24, k_norm=2, s_max=2., modulation_passes=1)
verify_evolution_config = EvolutionConfig(grid_N=32, k_norm=4, s_max=5., modulation_passes=2)
