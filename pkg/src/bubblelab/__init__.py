"""Numerical laboratory for energy concentration in regularized harmonic map
problems: alpha-energies and biharmonic relaxations on the flat torus, with
bubble detection, neck diagnostics, stress-energy checks, and a min-max toy.
"""

from .bubbles import (AnalysisConfig, AnnulusProfile, BubbleRecord, EnergyLedger,
                      TensorField, UnderResolvedBubbleError, annulus_profile,
                      concentration_exponent, concentration_function, detect_bubble,
                      detect_bubbles, energy_ledger, eps_ratio, hopf_balance_alpha,
                      hopf_balance_biharmonic, mapping_degree, rescale,
                      stress_energy_1, stress_energy_2, superlevel_ratio)
from .descent import (ContinuationSchedule, MinimizeResult, OptimizerConfig,
                      RunTrace, StageResult, StepBlowupError, continuation_run,
                      el_residual, minimize)
from .energies import (AlphaFunctional, BiharmonicFunctional, EnergyBreakdown,
                       alpha_descent, alpha_el_residual, alpha_energy,
                       alpha_energy_derivative, biharmonic_descent,
                       biharmonic_el_residual, biharmonic_energy, dirichlet_energy,
                       entropy_alpha, entropy_eps, make_functional)
from .fields import (constant_map, great_circle_wrap, planted_bubble,
                     random_smooth_field, random_tangent_field)
from .grid import (DomainGrid, MapField, PolarSample, ball_energy, face_density,
                   gradient_squared, integrate, jacobian, laplacian, bilaplacian,
                   polar_ring, polar_sample)
from .sphere import DegenerateProjectionError, Sphere
from .sweepout import (DeformConfig, MinMaxResult, PathFamily, beta_estimate,
                       entropy_derivative_check, latitude_family,
                       pseudo_gradient_deform, sup_energy)

__version__ = "0.1.0"
