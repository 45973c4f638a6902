"""
Signatures of piecewise-linear paths

On one linear segment ⟨S, a1⋯ak⟩ = Π Δx^{a_i} / k! for words and
⟨X, f⟩ = Π_nodes Δx^{c(node)} / f! for forests (decoration 0 reads the
time increment). Segments compose by convolution, so results are exact
when breakpoints and values are rationals.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from .construct import ConstructionSettings, DyadicGroupPath, SampledPath, word_algebra
from .dual import EXACT, FLOAT, DualElement, Scalar, TruncatedAlgebra
from .errors import BasisMismatchError, PreconditionError
from .shuffle import Alphabet

logger = logging.getLogger(__name__)


@dataclass
class PiecewiseLinearPath:
    """Values of d channels at increasing breakpoints, shape (d, breakpoints)"""

    times: Tuple[Scalar, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values[None, :]
        exact = values.dtype == object or all(isinstance(t, Fraction) for t in self.times)
        if exact:
            self.times = tuple(Fraction(t) for t in self.times)
            values = np.array([[Fraction(v) for v in row] for row in values], dtype=object)
        else:
            self.times = tuple(float(t) for t in self.times)
            values = values.astype(np.float64)
        if len(self.times) < 2:
            raise PreconditionError("a piecewise-linear path needs at least two breakpoints", "breakpoints")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise PreconditionError("breakpoint times must be strictly increasing", "breakpoints")
        if values.shape[1] != len(self.times):
            raise PreconditionError(
                f"{values.shape[1]} values per channel for {len(self.times)} breakpoints", "breakpoints"
            )
        self.values = values

    @property
    def mode(self) -> str:
        return EXACT if self.values.dtype == object else FLOAT

    @property
    def d(self) -> int:
        return int(self.values.shape[0])

    def value_at(self, t: Scalar) -> np.ndarray:
        times = self.times
        if not times[0] <= t <= times[-1]:
            raise PreconditionError(f"time {t} outside [{times[0]}, {times[-1]}]", "time_range")
        for k in range(len(times) - 1):
            if t <= times[k + 1]:
                weight = (t - times[k]) / (times[k + 1] - times[k])
                return self.values[:, k] + (self.values[:, k + 1] - self.values[:, k]) * weight
        return self.values[:, -1]

    def pieces(self, s: Scalar, t: Scalar) -> List[Tuple[Scalar, np.ndarray]]:
        """(Δt, Δx) for every linear piece of [s, t]"""
        if not s < t:
            raise PreconditionError(f"need s < t, got s={s}, t={t}", "interval")
        cuts = [s] + [u for u in self.times if s < u < t] + [t]
        points = [self.value_at(u) for u in cuts]
        return [(b - a, y - x) for a, b, x, y in zip(cuts, cuts[1:], points, points[1:])]

    def sample(self, depth: int) -> SampledPath:
        """Values on the dyadic grid of [0, 1]"""
        if self.times[0] != 0 or self.times[-1] != 1:
            raise PreconditionError("dyadic sampling needs breakpoints spanning [0, 1]", "time_range")
        grid = [Fraction(k, 2**depth) for k in range(2**depth + 1)]
        if self.mode == FLOAT:
            grid = [float(u) for u in grid]  # type: ignore[misc]
        return SampledPath(depth, np.array([self.value_at(u) for u in grid]).T)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], exact: bool = False) -> "PiecewiseLinearPath":
        """Rows (t, x1, …, xd) as read from a path CSV"""
        parse = (lambda v: Fraction(str(v))) if exact else float
        times = tuple(parse(r[0]) for r in rows)
        values = np.array([[parse(v) for v in r[1:]] for r in rows], dtype=object if exact else np.float64).T
        return cls(times, values)


def _segment_word(algebra: TruncatedAlgebra, dx: np.ndarray, exact: bool) -> np.ndarray:
    coeffs = algebra.zeros(EXACT if exact else FLOAT)
    for i, word in enumerate(algebra.basis.elements):
        value: Any = Fraction(1) if exact else 1.0
        for letter in word:
            if not isinstance(letter, int) or not 1 <= letter <= len(dx):
                raise BasisMismatchError(f"letter {letter} is not a path channel")
            value = value * dx[letter - 1]
        coeffs[i] = value / math.factorial(len(word))
    return coeffs


def _segment_forest(algebra: TruncatedAlgebra, dt: Scalar, dx: np.ndarray, exact: bool) -> np.ndarray:
    increments = [dt] + list(dx)
    coeffs = algebra.zeros(EXACT if exact else FLOAT)
    for i, forest in enumerate(algebra.basis.elements):
        value: Any = Fraction(1) if exact else 1.0
        factorial = 1
        for tree in forest.trees:
            factorial *= tree.factorial()
            for decoration in tree.decorations():
                if decoration >= len(increments):
                    raise BasisMismatchError(f"decoration {decoration} is not a path channel")
                value = value * increments[decoration]
        coeffs[i] = value / factorial
    return coeffs


def _segment(algebra: TruncatedAlgebra, dt: Scalar, dx: np.ndarray, exact: bool) -> np.ndarray:
    if algebra.basis.kind == "bck":
        return _segment_forest(algebra, dt, dx, exact)
    return _segment_word(algebra, dx, exact)


def default_word_algebra(d: int, truncation: int) -> TruncatedAlgebra:
    """Words of length ≤ truncation over {1..d}"""
    return word_algebra(Alphabet.integers(d, Fraction(1, truncation + 1)), truncation)


def path_character(
    path: PiecewiseLinearPath, s: Scalar, t: Scalar, algebra: TruncatedAlgebra
) -> DualElement:
    """Chen product of the segment characters of [s, t] on a word or forest basis"""
    exact = path.mode == EXACT
    result = algebra.unit_array(EXACT if exact else FLOAT)
    for dt, dx in path.pieces(s, t):
        result = algebra.convolve_arrays(result, _segment(algebra, dt, dx, exact))
    return DualElement(algebra, result, "character")


def signature_character(
    path: PiecewiseLinearPath,
    s: Scalar,
    t: Scalar,
    truncation: int,
    algebra: Optional[TruncatedAlgebra] = None,
) -> DualElement:
    target = default_word_algebra(path.d, truncation) if algebra is None else algebra
    if target.basis.kind != "shuffle":
        raise BasisMismatchError("signature characters live on word bases")
    return path_character(path, s, t, target)


def signature(path: PiecewiseLinearPath, s: Scalar, t: Scalar, word: Union[str, Sequence[int]]) -> Scalar:
    """⟨S(x)_st, word⟩"""
    letters = tuple(int(a) for a in word.split(".")) if isinstance(word, str) and word else tuple(word)
    algebra = default_word_algebra(path.d, max(len(letters), 1))
    return signature_character(path, s, t, max(len(letters), 1), algebra).coeffs[algebra.basis.index[letters]]


def branched_signature_character(
    path: PiecewiseLinearPath, s: Scalar, t: Scalar, algebra: TruncatedAlgebra
) -> DualElement:
    """Canonical branched lift over [s, t]; decoration 0 is the time channel"""
    if algebra.basis.kind != "bck":
        raise BasisMismatchError("branched signatures live on forest bases")
    return path_character(path, s, t, algebra)


def signature_lift(
    path: PiecewiseLinearPath,
    depth: int,
    algebra: TruncatedAlgebra,
    gamma: Any,
    settings: Optional[ConstructionSettings] = None,
) -> DyadicGroupPath:
    """Signature states 𝕏_t = S_{0t} at the dyadic points of [0, 1]"""
    exact = path.mode == EXACT
    grid: List[Scalar] = [Fraction(k, 2**depth) for k in range(2**depth + 1)]
    if not exact:
        grid = [float(u) for u in grid]
    states = algebra.zeros(EXACT if exact else FLOAT, (len(grid),))
    current = algebra.unit_array(EXACT if exact else FLOAT)
    states[:, 0] = current
    for j in range(len(grid) - 1):
        step = path_character(path, grid[j], grid[j + 1], algebra)
        current = algebra.convolve_arrays(current, step.coeffs)
        states[:, j + 1] = current
    logger.info(f"Signature lift on {len(grid)} dyadic points over {algebra.size} basis elements")
    return DyadicGroupPath(
        algebra,
        depth,
        states,
        algebra.max_level,
        Fraction(str(gamma)),
        settings or ConstructionSettings.create(),
    )
