"""
roughforge Configuration Settings

Centralized configuration management for roughforge.
Includes resource limits, construction defaults, numerical tolerances and logging.
"""

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional


@dataclass
class LimitsConfig:
    """Resource guards for combinatorial enumeration"""
    max_basis: int = 20000
    max_depth: int = 14
    max_bch_order: int = 6
    max_bcfp_nodes: int = 5


@dataclass
class ConstructionConfig:
    """Defaults for the dyadic construction"""
    depth: int = 10
    split_weight: str = "1/2"


@dataclass
class ToleranceConfig:
    """Numerical tolerances for float-mode checks"""
    algebra_tol: float = 1e-10
    delta_tol: float = 1e-9
    holder_cap: float = 1e8
    chen_check_depth: int = 6


@dataclass
class LoggingConfig:
    """Logging configuration"""
    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    enable_file_logging: bool = False
    log_file: str = "logs/roughforge.log"


class RoughForgeConfig:
    """
    Main configuration class for roughforge.

    Loads configuration from environment variables and provides
    default values for all settings.
    """

    def __init__(self) -> None:
        self.limits = self._load_limits_config()
        self.construction = self._load_construction_config()
        self.tolerances = self._load_tolerance_config()
        self.logging = self._load_logging_config()

    def _load_limits_config(self) -> LimitsConfig:
        """Load resource limits from environment"""
        return LimitsConfig(
            max_basis=int(os.getenv("ROUGHFORGE_MAX_BASIS", "20000")),
            max_depth=int(os.getenv("ROUGHFORGE_MAX_DEPTH", "14")),
            max_bch_order=int(os.getenv("ROUGHFORGE_MAX_BCH_ORDER", "6")),
            max_bcfp_nodes=int(os.getenv("ROUGHFORGE_MAX_BCFP_NODES", "5")),
        )

    def _load_construction_config(self) -> ConstructionConfig:
        """Load construction defaults from environment"""
        return ConstructionConfig(
            depth=int(os.getenv("ROUGHFORGE_DEPTH", "10")),
            split_weight=os.getenv("ROUGHFORGE_SPLIT_WEIGHT", "1/2"),
        )

    def _load_tolerance_config(self) -> ToleranceConfig:
        """Load numerical tolerances from environment"""
        return ToleranceConfig(
            algebra_tol=float(os.getenv("ROUGHFORGE_ALGEBRA_TOL", "1e-10")),
            delta_tol=float(os.getenv("ROUGHFORGE_DELTA_TOL", "1e-9")),
            holder_cap=float(os.getenv("ROUGHFORGE_HOLDER_CAP", "1e8")),
            chen_check_depth=int(os.getenv("ROUGHFORGE_CHEN_CHECK_DEPTH", "6")),
        )

    def _load_logging_config(self) -> LoggingConfig:
        """Load logging configuration from environment"""
        return LoggingConfig(
            level=os.getenv("ROUGHFORGE_LOG_LEVEL", "WARNING"),
            format=os.getenv(
                "ROUGHFORGE_LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
            ),
            enable_file_logging=os.getenv("ROUGHFORGE_ENABLE_FILE_LOGGING", "false").lower()
            == "true",
            log_file=os.getenv("ROUGHFORGE_LOG_FILE", "logs/roughforge.log"),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return {
            "limits": {
                "max_basis": self.limits.max_basis,
                "max_depth": self.limits.max_depth,
                "max_bch_order": self.limits.max_bch_order,
                "max_bcfp_nodes": self.limits.max_bcfp_nodes,
            },
            "construction": {
                "depth": self.construction.depth,
                "split_weight": self.construction.split_weight,
            },
            "tolerances": {
                "algebra_tol": self.tolerances.algebra_tol,
                "delta_tol": self.tolerances.delta_tol,
                "holder_cap": self.tolerances.holder_cap,
                "chen_check_depth": self.tolerances.chen_check_depth,
            },
            "logging": {
                "level": self.logging.level,
                "format": self.logging.format,
                "enable_file_logging": self.logging.enable_file_logging,
                "log_file": self.logging.log_file,
            },
        }


@dataclass
class RunConfig:
    """
    Settings of a single CLI invocation.

    Built from command-line flags; `validate()` raises with the name of the
    violated precondition before any computation starts.
    """
    gamma: str = "2/5"
    depth: int = 10
    d: int = 1
    truncation: Optional[int] = None
    algebra: str = "bck"
    gammas: Optional[str] = None
    z_init: Dict[str, str] = field(default_factory=dict)
    split_weight: str = "1/2"
    algebra_tol: float = 1e-10
    delta_tol: float = 1e-9
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    scalar_mode: str = "float"
    deterministic: bool = True

    @property
    def gamma_value(self) -> Fraction:
        return Fraction(self.gamma)

    @property
    def resolved_truncation(self) -> int:
        """N = floor(1/gamma) unless overridden"""
        if self.truncation is not None:
            return self.truncation
        return int(1 / self.gamma_value)

    def validate(self) -> None:
        from ..core.errors import PreconditionError

        try:
            gamma = self.gamma_value
        except (ValueError, ZeroDivisionError) as e:
            raise PreconditionError(f"gamma is not a rational: {self.gamma}", "gamma_rational") from e
        if not 0 < gamma < 1:
            raise PreconditionError(f"gamma must lie in (0,1), got {gamma}", "gamma_range")
        if (1 / gamma).denominator == 1:
            raise PreconditionError(f"1/gamma must not be an integer, got {gamma}", "gamma_inverse")
        if not 0 <= self.depth <= config.limits.max_depth:
            raise PreconditionError(
                f"depth {self.depth} outside [0, {config.limits.max_depth}]", "depth_range"
            )
        if self.d < 1:
            raise PreconditionError(f"alphabet size must be positive, got {self.d}", "alphabet")
        weight = Fraction(self.split_weight)
        if not 0 <= weight <= 1:
            raise PreconditionError(f"split weight must lie in [0,1], got {weight}", "split_weight")
        if self.scalar_mode not in ("float", "exact"):
            raise PreconditionError(f"unknown scalar mode {self.scalar_mode!r}", "scalar_mode")
        if not self.deterministic:
            raise PreconditionError("runs are always deterministic", "deterministic")


# Global configuration instance
config = RoughForgeConfig()
