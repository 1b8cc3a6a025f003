"""Directional Lelong-Demailly numbers of model positive currents, computed by quadrature."""

from .currents import CATALOG_NAMES, ScaledSum, WeightedCurrent, Zero, catalog, ddc, density_at, list_catalog
from .errors import (BudgetExceededError, ConditionCError, ConfigError, ContractError, IntegrabilityError,
                     LelongError, RangeError)
from .forms import CPoint, HermitianForm, ScalarField, mixed_wedge, mixed_wedge_by_permutations, mixed_wedge_coeff
from .identities import (additivity_check, comparison_check, condition_c, g_function, g_profile, k0_identity,
                         lelong_jensen_residual, nu_at, scaling_check)
from .limits import NuVerdict, nu_limit
from .quadrature import Estimate, RadialProfile, Region, current_mass, geometric_grid, integrate, radial_profile
from .weights import DirectionalBall, Weight, anisotropic, euclid, power_weight, scaled

__version__ = "0.1.0"
