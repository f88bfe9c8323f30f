"""Built-in model systems."""

from .henon import HenonConfig, henon_fixed_point, henon_homoclinic, henon_multihump
from .lorenz import LorenzConfig, angle_on_average, lorenz_orbit, lorenz_variational
from .simple import make_jordan_and_scalar_counterexamples, make_rotation_example, make_switching
