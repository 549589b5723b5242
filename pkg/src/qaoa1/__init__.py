"""Level-1 QAOA on Ising models: closed-form expectations, bandwidth-aware
angle search and recursive rounding solvers."""
from .analytic import (CoefficientTriple, NeighborhoodIndex, QaoaAngles, build_index,
                       coefficients_field_free, coefficients_with_fields, correlators,
                       expectation, expectation_field_free, expectation_with_fields)
from .estimators import IterQAOASolver, Qaoa1Tuner, RQAOASolver
from .exceptions import (CapacityError, ConfigurationError, DegenerateInstanceError, InputError,
                         NumericError, ParseError, UnsupportedCaseError)
from .ising import (IsingModel, QuboModel, WeightDist, eliminate_fields, energy, from_qubo,
                    generate_bipartite_regular, generate_d_regular, generate_erdos_renyi,
                    load_model, model_from_text, model_to_text, save_model, to_qubo)
from .optimize import (MomentSummary, OptimizationResult, gradient_descent_near_zero,
                       line_search, optimize_angles, predicted_gamma_star,
                       scaled_expected_cost, subdivision_optimize)
from .oracle import GroundTruth, approximation_ratio, brute_force, statevector_expectation
from .recursive import ReductionTrace, SolverReport, Tuner, backtrack, iter_qaoa, rqaoa
from .spectral import (SamplingPlan, empirical_bandwidth, max_angular_frequency, reconstruct,
                       sample_landscape, sampling_plan)
from .univariate import optimal_beta_field_free, optimal_beta_with_fields, univariate_cost

__version__ = "0.1.0"
