"""Portfolio optimization when the stock drift is hidden.

The pipeline: filter the drift from observed excess returns (Kalman-Bucy),
calibrate the Lagrange multiplier of the optimal terminal claim on the
conditional density, solve a linear parabolic equation for the value
function, and trade its gradient.
"""

from .errors import (CalibrationError, CFLError, ConfigError, DomainError,
                     DriftfolioError, ModelValidationError, RiccatiStepError,
                     SolverError, UnsupportedDimensionError)
from .model import (MarketModel, ModelDiagnostics, check_cov1,
                    check_moment_condition, compute_diagnostics,
                    covariance_Km, default_eps, fundamental_matrix)
from .filter import (FilterState, RiccatiSolution, conditional_density,
                     filter_step, solve_riccati)
from .simulate import (EstimateResult, PathBatch, PathBundle, density_Z,
                       expectation_under_pstar, iterate_path_batches,
                       simulate_paths)
from .claim import (ClaimMap, UtilitySpec, CalibrationResult, check_quadr,
                    claim_map, solve_multiplier)
from .pde import (GridSpec, PDECoefficients, PDESolution, VProbe,
                  coefficients, estimate_V_mc, solve_pde_fd)
from .strategy import (WealthPath, baseline_certainty_equivalence,
                       evaluate_expected_utility, optimal_strategy,
                       run_replication)

__version__ = "0.1.0"
