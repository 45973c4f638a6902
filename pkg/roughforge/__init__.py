"""
roughforge - constructive rough paths on dyadic grids

Provides:
- Connes–Kreimer forests and shuffle words as truncated Hopf algebras
- The descent-number BCH formula and the dyadic construction of branched,
  geometric and anisotropic rough paths
- The Hairer–Kelly map, the action of Hölder families on branched paths
  and BCFP renormalisation by constant characters
"""

from .core.action import act, bcfp_to_action, encode, m_v, solve_translation
from .core.construct import DyadicGroupPath, SampledPath, build_anisotropic, build_isotropic
from .core.dual import DualElement, TruncatedAlgebra
from .core.errors import RoughForgeError

__version__ = "0.1.0"
__description__ = "Constructive branched, geometric and anisotropic rough paths"

__all__ = [
    "DualElement",
    "DyadicGroupPath",
    "RoughForgeError",
    "SampledPath",
    "TruncatedAlgebra",
    "act",
    "bcfp_to_action",
    "build_anisotropic",
    "build_isotropic",
    "encode",
    "m_v",
    "solve_translation",
    "__version__",
    "__description__",
]
