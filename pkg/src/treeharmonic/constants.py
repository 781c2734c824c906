"""Frozen verdict thresholds for the experiment harness.

Every threshold used by a verdict lives here and is echoed into report.json.
Calibrated values note the oracle run they came from.
"""

import math

# roundoff-level identities
EIGEN_TOL = 1e-9
ELLIPSE_TOL = 1e-10
ENDPOINT_TOL = 1e-12
RECON_TOL = 1e-10
EVEN_TOL = 1e-12
SUPPORT_TOL = 1e-10
LATTICE_TOL = 1e-12
PROJECTION_TOL = 1e-9

# |f_k| <= |phi_1| + |phi_2| <= 2 on S_1
ROE_BOUND = 2.0
ROE_BOUND_SLACK = 1e-9

# Least-squares non-eigen residual, counting measure on B_{R-1}.
# Oracle run (q=2, R=10, default search lines t=0 and |delta|/2):
#   unit-modulus pair in S_1                   0.0297
#   annulus pairs in S_1.5, |lambda|=0.5..1.5  0.0037 - 0.0047
#   sharpness item 3 (tau/8, tau/6)            0.0859
#   sharpness items 4 / 5                      0.0027 / 0.00092
#   theorem-a two-shell pair                   0.0085
# genuine eigenfunctions give ~1e-15; the threshold splits the gap.
NON_EIGEN_THRESHOLD = 1e-6

# L^k f / gamma^k amplifies roundoff by up to (2/|gamma|)^k (||L|| <= 2);
# checks of that quotient use ROUNDOFF_BASE * (2/|gamma|)^k.
ROUNDOFF_BASE = 1e-14

# r_k / r_0 envelope for forward Theorem A/B checks.
# Oracle run (q=2, R=12, D=3, seeds 1, 2, 7): min ratio 0.727 for k <= 5.
RATIO_ENVELOPE = (1.0 / 3.0, 3.0)

# growth diagnostics over the last doubling [R_max/2, R_max]
PLATEAU_RATIO = 1.1
LINEAR_SLOPE_BAND = (0.8, 1.2)

DEFAULT_ALPHA = math.pi / 3
DEFAULT_PLANE_WAVE = (math.pi / 2, math.pi / 2)


def as_dict() -> dict:
    return {
        k: v
        for k, v in globals().items()
        if k.isupper() and not k.startswith("DEFAULT")
    }
