import numpy as np

from blowuplab.evolve import random_perturbation
from blowuplab.grid import GridFunctionPair


def random_pair(grid, seed, eps=1.):
    return GridFunctionPair.from_callables(grid, *random_perturbation(eps, seed))


def max_abs(values):
    return float(np.max(np.abs(values)))
