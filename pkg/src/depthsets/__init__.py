"""Tukey depth level sets through directional quantiles.

The level set ``{x : depth(x) >= alpha}`` of a point cloud is the
intersection of the halfspaces ``<u, x> <= q_u`` over unit directions,
where ``q_u`` is the upper empirical (1 - alpha)-quantile of the projected
sample. Keeping finitely many directions gives a polytope computable by
linear programming.
"""

from .bounds import (AssumptionParams, BoundEval, ExponentVariant, corollary4_directions,
                     gaussian_assumption_params, net_failure_bound, theorem2_bound)
from .depth import (DepthValue, Emptiness, LevelSetResult, atom_levelset_check, depth_exact_2d,
                    depth_upper_bound, levelset_exact_2d, levelset_sampled,
                    representations_agree, truncate)
from .distr import (PopulationLevelSet, ReferenceDistribution, logconcave_centroid_depth_check,
                    population_levelset, sample)
from .errors import (CapacityError, DegeneratePolytopeError, DomainError, EmptyPolytopeError,
                     InvalidArgument, SolverFailure, UnboundedPolytopeError,
                     UnsupportedDistribution)
from .experiments import (DirectionsRule, RateExperimentConfig, RateFit, fit_rate,
                          run_net_experiment, run_rate_experiment, run_tail_experiment)
from .geom import (Direction, Halfspace, HPolytope, PointCloud, SphereNet, deterministic_net,
                   is_delta_net, polytope_contains, uniform_directions)
from .linprog import (LpProblem, LpSolution, LpStatus, active_cone_certificate, solve,
                      support_function)
from .metric import (HausdorffEstimate, discretized_deviation_bound, hausdorff_support,
                     quantile_deviation_to_hausdorff)
from .quantile import (LevelSpec, QuantileProfile, empirical_lower_quantile,
                       empirical_upper_quantile, gaussian_quantile, subadditivity_probe,
                       uniform_ball_quantile)

__version__ = "0.1.0"
