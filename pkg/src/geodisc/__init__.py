"""Geometric discrepancy toolkit.

Point-set generators, exact and estimated discrepancies over anchored boxes,
convex sets, spherical caps and weighted boxes, an acceptance-rejection
sampler, and completely-uniformly-distributed drivers for Markov chains.
"""

from .arsampler import (AcceptedSample, DensitySpec, accept_reject, poly_sine_density,
                        quadratic_density, weighted_star_disc_1d)
from .boxdisc import (DiscrepancyResult, koksma_check, l2_star_closed_form, lq_disc_1d_exact,
                      lq_disc_mc, star_disc_estimate, star_disc_grid_exact)
from .cudmcmc import DriverSequence, pushback_disc_mc, pushback_disc_shift, run_chain
from .geomdisc import convex_hull_lowerbound, halfplane_disc_exact, torus_disc_disc
from .pointset import UnitCubePoints, generate, halton, sobol_net
from .rates import RateFit, rate_fit
from .sphere import SpherePoints, cap_l2_disc_closed_form, cap_l2_disc_quadrature, lambert_map

__version__ = "0.1.0"

__all__ = [
    "AcceptedSample", "DensitySpec", "accept_reject", "poly_sine_density", "quadratic_density",
    "weighted_star_disc_1d", "DiscrepancyResult", "koksma_check", "l2_star_closed_form",
    "lq_disc_1d_exact", "lq_disc_mc", "star_disc_estimate", "star_disc_grid_exact",
    "DriverSequence", "pushback_disc_mc", "pushback_disc_shift", "run_chain",
    "convex_hull_lowerbound", "halfplane_disc_exact", "torus_disc_disc", "UnitCubePoints",
    "generate", "halton", "sobol_net", "RateFit", "rate_fit", "SpherePoints",
    "cap_l2_disc_closed_form", "cap_l2_disc_quadrature", "lambert_map",
]
