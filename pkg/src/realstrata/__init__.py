"""Numerical stratification of real group actions on projective space by the
norm square of a gradient map."""
from .lie_core import GroupSpec, preset, validate_group_spec
from .proj_geom import ProjPoint, eval_gradient_map

__version__ = "0.1.0"

__all__ = ["GroupSpec", "ProjPoint", "preset", "validate_group_spec", "eval_gradient_map", "__version__"]
