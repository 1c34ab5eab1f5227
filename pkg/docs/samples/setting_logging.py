# [blowuplab]
# Sample: Setting logging
# ===============================================================

import blowuplab as bl

# CHANGE LOGGING LEVEL ------------------------------------------
bl.verbose(True, debug=True)  # (add scan_log=True
                              # for per-task logging of the scans)

# TESTING LOGS --------------------------------------------------
grid = bl.CollocationGrid(32)
report = bl.linop.assemble_and_eig(3., grid, k_norm=2)
verdicts = bl.modes.scan_halfplane(3., (-0.9, 2.), (-2., 2.), (5, 5))
