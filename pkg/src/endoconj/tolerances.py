"""Numerical thresholds shared across the package."""

EPS_COEFF = 1e-9   # jet coefficient agreement
EPS_DET = 1e-12    # |det| floor for invertibility
EPS_EVAL = 1e-8    # pointwise evaluation agreement
EPS_FIT = 1e-7     # character hypothesis residual

DEFAULT_DEGREE = 8
MIN_DEGREE = 2
MAX_DEGREE = 16

DEFAULT_MARGIN = 0.05

# extend_theta_eval: iterate until the orbit enters this sup-norm ball
ACCURACY_RADIUS = 0.1
L_MAX = 200
