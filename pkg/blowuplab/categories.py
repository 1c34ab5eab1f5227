from enum import Enum


class Evidence(Enum):
    """
    Kind of evidence behind a mode-stability verdict
    """
    series_terminates = 'series_terminates'
    """The coefficient sequence vanishes identically past some index"""
    radius_one = 'radius_one'
    """Root test places the radius of convergence at one"""
    ratio_limit = 'ratio_limit'
    """Coefficient ratio tends to one"""


class ModeClass(Enum):
    """
    Classification of a discrete eigenvalue of the collocated operator
    """
    mode_zero = 'mode_zero'
    """Eigenvalue 0 (translation in kappa, Jordan partner in alpha)"""
    mode_one = 'mode_one'
    """Eigenvalue 1 (translation in blow-up time and space)"""
    stable_halfplane = 'stable_halfplane'
    """Resolved eigenvalue in the stable half plane"""
    unresolved = 'unresolved'
    """Eigenvector not resolved by the grid"""


class SingularPoint(Enum):
    """
    Regular singular points of the hypergeometric form of the eigen-equation
    """
    zero = 'zero'
    one = 'one'


class ExponentChoice(Enum):
    """
    Which indicial root leads a Frobenius series
    """
    plus = 'plus'
    """Root with the larger real part"""
    minus = 'minus'
    """Root with the smaller real part"""


class Command(Enum):
    """
    Subcommands of the batch frontend
    """
    profile = 'profile'
    scan_modes = 'scan-modes'
    spectrum = 'spectrum'
    evolve_linear = 'evolve-linear'
    evolve_nonlinear = 'evolve-nonlinear'
    lightcone = 'lightcone'
    verify = 'verify'


class VerifyLevel(Enum):
    """
    Depth of the acceptance suite
    """
    fast = 'fast'
    """Skips the nonlinear evolution regressions"""
    full = 'full'
    """Every acceptance check"""
