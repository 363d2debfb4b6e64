"""lossforge: polyhedral convex surrogates for discrete losses.

Exact rational tooling to construct surrogates that embed a given discrete
loss, extract the discrete loss embedded by a polyhedral surrogate, build
calibrated link functions by epsilon-thickening, and audit calibration of
surrogates from the literature (abstain, Lovasz hinge, top-k).
"""

__version__ = "0.1.0"
