"""
Dyadic construction of truncated-group-valued paths

Starting from the abelian first level, every extension step adds one
degree: interval logarithms of the current states, a correction Z per
dyadic interval obtained top-down from the BCH defect of its two halves,
exponentials on the finest intervals and Chen prefix products. Levels that
were already built are never rewritten.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import config
from . import kernels
from .bch import bch_degree_arrays
from .bck import ForestBasis
from .dual import EXACT, FLOAT, DualElement, TruncatedAlgebra, is_infinitesimal, parse_scalar
from .errors import (
    BasisMismatchError,
    DepthMismatchError,
    ExponentLatticeError,
    LevelOverflowError,
    PreconditionError,
)
from .shuffle import Alphabet, WordBasis, check_exponent_lattice

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def forest_algebra(n: int, decorations: Tuple[int, ...]) -> TruncatedAlgebra:
    return TruncatedAlgebra(ForestBasis(n, decorations))


@lru_cache(maxsize=None)
def word_algebra(alphabet: Alphabet, max_length: Optional[int] = None) -> TruncatedAlgebra:
    """Words of length ≤ max_length, or the weight-bounded set when it is None"""
    return TruncatedAlgebra(WordBasis(alphabet, max_length))


def check_gamma(gamma: Any) -> Fraction:
    value = Fraction(str(gamma)) if not isinstance(gamma, Fraction) else gamma
    if not 0 < value < 1:
        raise PreconditionError(f"gamma must lie in (0,1), got {value}", "gamma_range")
    if (1 / value).denominator == 1:
        raise ExponentLatticeError(f"1/gamma = {1 / value} is an integer", "gamma_inverse")
    return value


@dataclass(frozen=True)
class ConstructionSettings:
    """
    The free choices of the dyadic construction.

    `split_weight` is λ in Z_left = λ(Z − B), Z_right = (1 − λ)(Z − B);
    `z_init` maps basis text to the value of Z_{0,1} on that element and is
    applied at the level matching the element's degree.
    """

    split_weight: Fraction = Fraction(1, 2)
    z_init: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        weight = Fraction(self.split_weight)
        if not 0 <= weight <= 1:
            raise PreconditionError(f"split weight must lie in [0,1], got {weight}", "split_weight")
        object.__setattr__(self, "split_weight", weight)
        object.__setattr__(self, "z_init", tuple(sorted((str(k), str(v)) for k, v in self.z_init)))

    @classmethod
    def create(
        cls, split_weight: Any = None, z_init: Optional[Mapping[str, Any]] = None
    ) -> "ConstructionSettings":
        weight = config.construction.split_weight if split_weight is None else split_weight
        return cls(Fraction(str(weight)), tuple((z_init or {}).items()))

    def to_dict(self) -> Dict[str, Any]:
        return {"split_weight": str(self.split_weight), "z_init": dict(self.z_init)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ConstructionSettings":
        return cls.create(data.get("split_weight", "1/2"), data.get("z_init") or {})


@dataclass
class SampledPath:
    """Channel values on the dyadic grid of depth M, shape (channels, 2^M + 1)"""

    depth: int
    values: np.ndarray
    exponents: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.depth <= config.limits.max_depth:
            raise PreconditionError(
                f"depth {self.depth} outside [0, {config.limits.max_depth}]", "depth_range"
            )
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values[None, :]
        if values.shape[1] != 2**self.depth + 1:
            raise PreconditionError(
                f"expected {2 ** self.depth + 1} samples per channel, got {values.shape[1]}",
                "grid_size",
            )
        self.values = values if values.dtype == object else values.astype(np.float64)
        self.exponents = tuple(Fraction(str(e)) for e in self.exponents)
        if self.exponents and len(self.exponents) != self.channels:
            raise PreconditionError("one exponent per channel is required", "exponents")

    @property
    def channels(self) -> int:
        return int(self.values.shape[0])

    @property
    def points(self) -> int:
        return int(self.values.shape[1])

    @property
    def mode(self) -> str:
        return EXACT if self.values.dtype == object else FLOAT

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.points)

    @classmethod
    def from_function(
        cls,
        func: Callable[[float], Sequence[float]],
        depth: int,
        exponents: Sequence[Any] = (),
    ) -> "SampledPath":
        grid = np.linspace(0.0, 1.0, 2**depth + 1)
        values = np.array([list(func(t)) for t in grid], dtype=np.float64).T
        return cls(depth, values, tuple(exponents))

    def as_mode(self, mode: str) -> np.ndarray:
        if mode == self.mode:
            return self.values
        if mode == EXACT:
            return np.array([[Fraction(v) for v in row] for row in self.values], dtype=object)
        return self.values.astype(np.float64)

    def restrict_channels(self, channels: Sequence[int]) -> "SampledPath":
        exponents = tuple(self.exponents[c] for c in channels) if self.exponents else ()
        return SampledPath(self.depth, self.values[list(channels)], exponents)


@dataclass
class ExtensionTrace:
    """Monitored scales of one extension step

    a_m = 2^{me}·max⦀Z^m⦀ and b_m = 2^{(m−1)e}·max⦀B^m⦀ where e is the smallest
    exponent among the new basis elements; each step must obey
    a_m ≤ rho·(a_{m−1} + b_m) with rho = max(λ, 1−λ)·2^e.
    """

    level: int
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    rho: float
    bound: float
    stable: bool
    recursion_ok: bool
    corrections: Optional[List[np.ndarray]] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "a": list(self.a),
            "b": list(self.b),
            "rho": self.rho,
            "bound": self.bound if math.isfinite(self.bound) else None,
            "stable": self.stable,
            "recursion_ok": self.recursion_ok,
        }


@dataclass
class HolderReport:
    """Per basis element sup over dyadic pairs of |⟨X_st, v⟩| / |t − s|^{exponent(v)}"""

    depth: int
    keys: List[str]
    exponents: List[float]
    constants: List[float]

    @property
    def finite(self) -> bool:
        return all(math.isfinite(c) for c in self.constants)

    def constant(self, key: str) -> float:
        return self.constants[self.keys.index(key)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "depth": self.depth,
            "finite": self.finite,
            "constants": {
                key: {"exponent": e, "constant": c if math.isfinite(c) else None}
                for key, e, c in zip(self.keys, self.exponents, self.constants)
            },
        }


@dataclass
class DyadicGroupPath:
    """
    States 𝕏_t at the 2^M + 1 dyadic points, stored as an array of shape
    (basis size, points); increments are X_st = 𝕏_s⁻¹ ⋆ 𝕏_t.

    `gamma` scales basis grades into Hölder exponents: γ|τ| on forests,
    ĥγ·ω(v) on words. `level` is the highest degree built so far.
    """

    algebra: TruncatedAlgebra
    depth: int
    states: np.ndarray
    level: int
    gamma: Fraction
    settings: ConstructionSettings = field(default_factory=ConstructionSettings)
    traces: List[ExtensionTrace] = field(default_factory=list)

    @property
    def mode(self) -> str:
        return EXACT if self.states.dtype == object else FLOAT

    @property
    def points(self) -> int:
        return int(self.states.shape[1])

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.points)

    @property
    def exponents(self) -> np.ndarray:
        return float(self.gamma) * self.algebra.grades_float

    def state(self, k: int) -> DualElement:
        return DualElement(self.algebra, self.states[:, k].copy(), "character")

    def increment(self, s: int, t: int) -> DualElement:
        """X_st for grid indices s, t"""
        algebra = self.algebra
        inverse = algebra.antipode_arrays(self.states[:, s])
        return DualElement(algebra, algebra.convolve_arrays(inverse, self.states[:, t]), "character")

    def values(self, text: str) -> np.ndarray:
        """t ↦ ⟨𝕏_t, v⟩ for the basis element with text `text`"""
        return self.states[self.algebra.basis.lookup(text)]

    def float_states(self) -> np.ndarray:
        return np.ascontiguousarray(self.states.astype(np.float64).T)

    def float_inverses(self) -> np.ndarray:
        return np.ascontiguousarray(self.algebra.antipode_arrays(self.states.astype(np.float64)).T)

    def restrict(self, level: int) -> "DyadicGroupPath":
        return DyadicGroupPath(
            self.algebra,
            self.depth,
            self.algebra.restrict_arrays(self.states, level),
            min(level, self.level),
            self.gamma,
            self.settings,
        )

    def coarsen(self, depth: int) -> "DyadicGroupPath":
        if not 0 <= depth <= self.depth:
            raise DepthMismatchError(f"cannot coarsen depth {self.depth} to {depth}")
        stride = 2 ** (self.depth - depth)
        return DyadicGroupPath(
            self.algebra, depth, self.states[:, ::stride].copy(), self.level, self.gamma, self.settings
        )

    def describe(self) -> Dict[str, Any]:
        return {
            **self.algebra.basis.describe(),
            "depth": self.depth,
            "level": self.level,
            "gamma": str(self.gamma),
            "scalar_mode": self.mode,
            "construction": self.settings.to_dict(),
        }


# ---------------------------------------------------------------- construction


def _check_exponents(algebra: TruncatedAlgebra, gamma: Fraction) -> None:
    basis = algebra.basis
    if basis.kind == "shuffle":
        check_exponent_lattice(basis.alphabet.weights)  # type: ignore[attr-defined]
    else:
        check_gamma(gamma)


def _interval_logs(
    algebra: TruncatedAlgebra, states: np.ndarray, depth: int, m: int, level: int
) -> np.ndarray:
    """log_n of X over the 2^m intervals of generation m, columns left to right"""
    stride = 2 ** (depth - m)
    starts = np.arange(0, 2**m) * stride
    inverse = algebra.antipode_arrays(states[:, starts])
    increments = algebra.restrict_arrays(
        algebra.convolve_arrays(inverse, states[:, starts + stride]), level
    )
    return algebra.restrict_arrays(algebra.log_arrays(increments, level), level)


def _initial_correction(
    algebra: TruncatedAlgebra, settings: ConstructionSettings, level: int, mode: str
) -> np.ndarray:
    z = algebra.zeros(mode)
    for text, value in settings.z_init:
        try:
            index = algebra.basis.lookup(text)
        except KeyError as e:
            raise PreconditionError(f"z_init key {text!r} is not a basis element", "z_init") from e
        if algebra.levels[index] < 2:
            raise PreconditionError(f"z_init key {text!r} has degree below 2", "z_init")
        if algebra.levels[index] == level:
            z[index] = parse_scalar(value, mode)
    if not is_infinitesimal(DualElement(algebra, z)):
        raise PreconditionError(
            f"z_init values at degree {level} must vanish on products", "z_init"
        )
    return z


def _top_norm(algebra: TruncatedAlgebra, values: np.ndarray, top: np.ndarray) -> float:
    block = np.abs(values[top].astype(np.float64))
    return algebra.norm_constant * float(block.max(initial=0.0))


def _prefix_products(algebra: TruncatedAlgebra, increments: np.ndarray) -> np.ndarray:
    if increments.dtype != object:
        states = kernels.prefix_products(
            np.ascontiguousarray(increments.T),
            algebra.left,
            algebra.right,
            algebra.out,
            algebra.coef_float,
        )
        return np.ascontiguousarray(states.T)
    steps = increments.shape[1]
    states = algebra.zeros(EXACT, (steps + 1,))
    current = algebra.unit_array(EXACT)
    states[:, 0] = current
    for j in range(steps):
        current = algebra.convolve_arrays(current, increments[:, j])
        states[:, j + 1] = current
    return states


def extend_level(path: DyadicGroupPath, keep_corrections: bool = False) -> DyadicGroupPath:
    """
    Add degree n + 1 to a path built through degree n.

    Args:
        path: states valid through `path.level`, zero above it
        keep_corrections: keep the Z arrays of every generation on the trace

    Returns:
        A new path whose restriction to degree n equals the input exactly
    """
    algebra = path.algebra
    n = path.level
    target = n + 1
    if target > algebra.max_level:
        raise LevelOverflowError(f"cannot extend past the truncation level {algebra.max_level}")
    _check_exponents(algebra, path.gamma)

    exact = path.mode == EXACT
    weight = path.settings.split_weight
    left_weight: Any = weight if exact else float(weight)
    right_weight: Any = (1 - weight) if exact else float(1 - weight)
    top = algebra.levels == target
    exponent = min(float(path.gamma) * algebra.grades_float[top])

    z = _initial_correction(algebra, path.settings, target, path.mode)[:, None]
    z_norms = [_top_norm(algebra, z, top)]
    b_norms: List[float] = []
    corrections = [z] if keep_corrections else None
    logs = _interval_logs(algebra, path.states, path.depth, 0, n)
    for m in range(1, path.depth + 1):
        logs = _interval_logs(algebra, path.states, path.depth, m, n)
        defect = bch_degree_arrays(algebra, logs[:, 0::2], logs[:, 1::2], target)
        parent = z - defect
        z = algebra.zeros(path.mode, (2**m,))
        z[:, 0::2] = parent * left_weight
        z[:, 1::2] = parent * right_weight
        b_norms.append(_top_norm(algebra, defect, top))
        z_norms.append(_top_norm(algebra, z, top))
        if corrections is not None:
            corrections.append(z)

    steps = algebra.restrict_arrays(algebra.exp_arrays(logs + z, target), target)
    rebuilt = _prefix_products(algebra, steps)
    states = path.states.copy()
    states[top] = rebuilt[top]

    trace = _trace(target, exponent, weight, z_norms, b_norms, corrections)
    logger.info(
        f"Extended to degree {target} on {path.points} points "
        f"({int(top.sum())} new basis elements, rho={trace.rho:.4g})"
    )
    return DyadicGroupPath(
        algebra, path.depth, states, target, path.gamma, path.settings, path.traces + [trace]
    )


def _trace(
    level: int,
    exponent: float,
    weight: Fraction,
    z_norms: List[float],
    b_norms: List[float],
    corrections: Optional[List[np.ndarray]],
) -> ExtensionTrace:
    a = tuple(2.0 ** (m * exponent) * value for m, value in enumerate(z_norms))
    b = tuple(2.0 ** (m * exponent) * value for m, value in enumerate(b_norms))
    rho = max(float(weight), float(1 - weight)) * 2.0**exponent
    recursion_ok = all(
        a[m + 1] <= rho * (a[m] + b[m]) * (1 + 1e-9) + 1e-300 for m in range(len(b))
    )
    stable = bool(rho < 1)
    bound = a[0] + rho * max(b, default=0.0) / (1 - rho) if stable else math.inf
    if not stable:
        logger.warning(
            f"Degree {level} correction recursion is outside its contraction regime (rho={rho:.4g})"
        )
    if not recursion_ok:
        logger.warning(f"Degree {level} correction scales violate a_m <= rho(a_(m-1) + b_m)")
    logger.debug(f"Degree {level} correction scales a={a} b={b}")
    return ExtensionTrace(level, a, b, rho, bound, stable, recursion_ok, corrections)


def level_one(
    algebra: TruncatedAlgebra,
    path: SampledPath,
    gamma: Fraction,
    settings: Optional[ConstructionSettings] = None,
    mode: str = FLOAT,
) -> DyadicGroupPath:
    """⟨𝕏_t, e_i⟩ = x^i_t − x^i_0 on the letters, zero above degree 1"""
    letters = algebra.basis.letters
    if path.channels != len(letters):
        raise BasisMismatchError(
            f"path has {path.channels} channels but the basis has {len(letters)} letters"
        )
    values = path.as_mode(mode)
    states = algebra.zeros(mode, (path.points,))
    states[0] = Fraction(1) if mode == EXACT else 1.0
    for channel, index in enumerate(letters):
        states[index] = values[channel] - values[channel, 0]
    return DyadicGroupPath(
        algebra, path.depth, states, 1, gamma, settings or ConstructionSettings.create()
    )


def build(
    algebra: TruncatedAlgebra,
    path: SampledPath,
    gamma: Fraction,
    settings: Optional[ConstructionSettings] = None,
    mode: str = FLOAT,
    keep_corrections: bool = False,
) -> DyadicGroupPath:
    """Level one followed by extension steps up to the truncation level"""
    _check_exponents(algebra, gamma)
    result = level_one(algebra, path, gamma, settings, mode)
    while result.level < algebra.max_level:
        result = extend_level(result, keep_corrections)
    return result


def build_isotropic(
    path: SampledPath,
    gamma: Any,
    n: Optional[int] = None,
    algebra: str = "bck",
    settings: Optional[ConstructionSettings] = None,
    mode: str = FLOAT,
    with_zero: bool = False,
) -> DyadicGroupPath:
    """
    Lift a sampled path over the forest ("bck") or word ("shuffle") basis.

    With `with_zero` the first channel drives the reserved decoration 0.
    """
    gamma = check_gamma(gamma)
    top = int(1 / gamma) if n is None else n
    if algebra == "bck":
        first = 0 if with_zero else 1
        decorations = tuple(range(first, first + path.channels))
        target = forest_algebra(top, decorations)
    elif algebra == "shuffle":
        target = word_algebra(Alphabet.integers(path.channels, gamma), top)
    else:
        raise PreconditionError(f"unknown isotropic algebra {algebra!r}", "algebra")
    logger.info(f"Isotropic {algebra} lift with gamma={gamma}, N={top}, depth {path.depth}")
    return build(target, path, gamma, settings, mode)


def build_anisotropic(
    path: SampledPath,
    settings: Optional[ConstructionSettings] = None,
    mode: str = FLOAT,
    alphabet: Optional[Alphabet] = None,
) -> DyadicGroupPath:
    """Lift over the weight-bounded word set, one exponent per channel"""
    if alphabet is None:
        if not path.exponents:
            raise PreconditionError("anisotropic lifts need one exponent per channel", "exponents")
        alphabet = Alphabet.integers(path.channels, list(path.exponents))
    check_exponent_lattice(alphabet.weights)
    target = word_algebra(alphabet)
    logger.info(f"Anisotropic lift over {len(target.basis)} words, depth {path.depth}")
    return build(target, path, alphabet.min_weight, settings, mode)


# ---------------------------------------------------------------- checks


def holder_report(
    path: DyadicGroupPath, depth: Optional[int] = None, exponents: Optional[np.ndarray] = None
) -> HolderReport:
    """Exact sup over all pairs of the subgrid of the given depth"""
    depth = path.depth if depth is None else depth
    if not 0 <= depth <= path.depth:
        raise DepthMismatchError(f"report depth {depth} outside [0, {path.depth}]")
    algebra = path.algebra
    exps = np.asarray(path.exponents if exponents is None else exponents, dtype=np.float64)
    best = kernels.pairwise_holder(
        path.float_states(),
        path.float_inverses(),
        algebra.left,
        algebra.right,
        algebra.out,
        algebra.coef_float,
        exps,
        path.times,
        2 ** (path.depth - depth),
    )
    keys = [algebra.basis.key(i) for i in range(1, algebra.size)]
    return HolderReport(depth, keys, [float(e) for e in exps[1:]], [float(c) for c in best[1:]])


def chen_residual(path: DyadicGroupPath, depth: Optional[int] = None) -> float:
    """Relative sup of X_su ⋆ X_ut − X_st over triples of the check subgrid"""
    depth = min(path.depth, config.tolerances.chen_check_depth) if depth is None else depth
    algebra = path.algebra
    increments = kernels.pairwise_increments(
        path.float_states(),
        path.float_inverses(),
        algebra.left,
        algebra.right,
        algebra.out,
        algebra.coef_float,
        2 ** (path.depth - depth),
    )
    return float(
        kernels.chen_residual(increments, algebra.left, algebra.right, algebra.out, algebra.coef_float)
    )


def character_residual(path: DyadicGroupPath) -> float:
    """Relative sup over states and basis products of |⟨𝕏, xy⟩ − ⟨𝕏, x⟩⟨𝕏, y⟩|"""
    states = path.states.astype(np.float64)
    worst = float(np.max(np.abs(states[0] - 1.0), initial=0.0))
    for i, j, terms in path.algebra.product_table:
        lhs = sum(float(c) * states[k] for k, c in terms)
        rhs = states[i] * states[j]
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs)))))
    return worst


@dataclass
class VerificationReport:
    """Pass/fail per invariant with the measured values"""

    checks: Dict[str, Dict[str, Any]]
    holder: HolderReport

    @property
    def passed(self) -> bool:
        return all(check["passed"] for check in self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "checks": self.checks, "holder": self.holder.to_dict()}


def verify_path(
    path: DyadicGroupPath, tol: Optional[float] = None, full: bool = False
) -> VerificationReport:
    """
    Check the invariants of a group path.

    Chen's relation is checked on triples of the subgrid of depth
    min(M, chen_check_depth), or on every dyadic triple with `full`; the
    depth used is reported with the residual.
    """
    tol = config.tolerances.algebra_tol if tol is None else tol
    chen_depth = path.depth if full else min(path.depth, config.tolerances.chen_check_depth)
    chen = chen_residual(path, chen_depth)
    character = character_residual(path)
    holder = holder_report(path)
    start = np.abs(path.states[:, 0].astype(np.float64) - path.algebra.unit_array(FLOAT))
    checks: Dict[str, Dict[str, Any]] = {
        "starts_at_unit": {"value": float(start.max()), "passed": bool(start.max() == 0.0)},
        "chen": {"value": chen, "tolerance": tol, "depth": chen_depth, "passed": chen <= tol},
        "character": {"value": character, "tolerance": tol, "passed": character <= tol},
        "holder_finite": {
            "value": max(holder.constants, default=0.0) if holder.finite else None,
            "passed": holder.finite,
        },
    }
    if path.traces:
        checks["correction_recursion"] = {
            "value": [t.rho for t in path.traces],
            "passed": all(t.recursion_ok for t in path.traces),
        }
    report = VerificationReport(checks, holder)
    logger.info(f"Verification {'passed' if report.passed else 'failed'}: {sorted(checks)}")
    return report
