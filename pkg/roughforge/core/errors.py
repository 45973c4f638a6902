"""
Error types for roughforge

Every error names the precondition it guards so that the CLI can report it
in machine-readable form.
"""

from typing import Any, Dict


class RoughForgeError(Exception):
    """Base error; `precondition` is a short stable identifier"""

    precondition = "unspecified"

    def __init__(self, message: str, precondition: str = "") -> None:
        super().__init__(message)
        if precondition:
            self.precondition = precondition

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for JSON output"""
        return {
            "success": False,
            "error": str(self),
            "error_type": type(self).__name__,
            "precondition": self.precondition,
        }


class DecorationError(RoughForgeError):
    precondition = "decoration_range"


class ParseError(RoughForgeError):
    precondition = "grammar"


class ResourceLimitError(RoughForgeError):
    precondition = "resource_limit"


class BasisMismatchError(RoughForgeError):
    precondition = "same_basis"


class ScalarModeError(RoughForgeError):
    precondition = "scalar_mode"


class PreconditionError(RoughForgeError):
    precondition = "precondition"


class ExponentLatticeError(RoughForgeError):
    precondition = "exponent_lattice"


class LevelOverflowError(RoughForgeError):
    precondition = "level_overflow"


class DeltaCheckError(RoughForgeError):
    precondition = "delta_vanishes"


class ConfigurationMismatchError(RoughForgeError):
    precondition = "construction_config"


class DepthMismatchError(RoughForgeError):
    precondition = "same_depth"


class TimeDependentCharacterError(RoughForgeError):
    precondition = "constant_character"


class BoundCheckError(RoughForgeError):
    precondition = "bcfp_bound"


class ValidationError(RoughForgeError):
    precondition = "schema"
