"""Born-series forward solver for time-domain photon diffusion with a Robin boundary."""

from robin_born.born import (BornTermContext, born_partial_sum, convergence_report, w0,
                             wn_at_surface, wn_closed, wn_oracle)
from robin_born.exact import (FieldCurve, beta_from_reflection, ebc_solution, exact_solution,
                              relative_error_curve)
from robin_born.kernels import (boundary_convolution, free_space_kernel, halfspace_neumann_kernel,
                                slab_neumann_kernel)
from robin_born.model import (BornEvaluation, BoundaryImpulse, Geometry, MediumParams,
                              RobinCoefficient, SpaceTimePoint, TimeGrid, validate)

__version__ = "0.1.0"

__all__ = [
    "BornEvaluation", "BornTermContext", "BoundaryImpulse", "FieldCurve", "Geometry",
    "MediumParams", "RobinCoefficient", "SpaceTimePoint", "TimeGrid", "beta_from_reflection",
    "born_partial_sum", "boundary_convolution", "convergence_report", "ebc_solution",
    "exact_solution", "free_space_kernel", "halfspace_neumann_kernel", "relative_error_curve",
    "slab_neumann_kernel", "validate", "w0", "wn_at_surface", "wn_closed", "wn_oracle",
]
