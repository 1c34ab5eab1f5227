# [blowuplab]
# Sample: Getting started
# ===============================================================

import math

import blowuplab as bl

# PROFILES ------------------------------------------------------
params = bl.ProfileParams(alpha=3., beta=math.inf)
table = bl.profiles.profile_table(params, 201)

# MODE STABILITY ------------------------------------------------
verdict = bl.modes.mode_stability_verdict(3., 0.5 + 1j)
print(verdict.smooth, verdict.evidence)

# SPECTRUM ------------------------------------------------------
grid = bl.CollocationGrid(64)
report = bl.linop.assemble_and_eig(3., grid, k_norm=4)
print(report.unstable_multiset())

# NONLINEAR EVOLUTION -------------------------------------------
cfg = bl.quick_evolution_config.with_values(eps=1e-4, seed=1)
trace = bl.evolve.evolve_nonlinear(cfg, bl.evolve.random_perturbation(cfg.eps, cfg.seed, even=True))
print(trace.fitted)
