"""
Truncated dual algebras

`TruncatedAlgebra` turns a truncated basis (forests or words) into dense
structure arrays: the coproduct as (left, right, out, coef) index arrays,
the antipode as a sparse matrix and the table of basis products that stay
inside the truncation. Functionals are numpy arrays indexed by basis
position (position 0 is the unit); float64 arrays may carry trailing batch
axes, object arrays hold `Fraction` values for exact computation.

`DualElement` wraps one such array together with its algebra and scalar
mode and offers the group/Lie operations, norms and serialization.
"""

import logging
import math
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from ..config.settings import config
from .errors import BasisMismatchError, PreconditionError, ScalarModeError

logger = logging.getLogger(__name__)

EXACT = "exact"
FLOAT = "float"
Scalar = Union[Fraction, float]


class HopfBasis(Protocol):
    """What a truncated basis provides to the dual algebra"""

    kind: str
    elements: List[Any]
    levels: List[int]
    grades: List[Fraction]
    letters: List[int]
    n: int

    def __len__(self) -> int: ...

    def describe(self) -> Dict[str, object]: ...

    def key(self, i: int) -> str: ...

    def lookup(self, text: str) -> int: ...

    def coproduct_terms(self, i: int) -> List[Tuple[int, int, Fraction]]: ...

    def antipode_terms(self, i: int) -> List[Tuple[int, Fraction]]: ...

    def product_terms(self, i: int, j: int) -> Optional[List[Tuple[int, Fraction]]]: ...


def _expand(coef: np.ndarray, ndim: int) -> np.ndarray:
    return coef.reshape(coef.shape + (1,) * (ndim - 1))


def parse_scalar(value: Any, mode: str) -> Scalar:
    """Parse "p/q", decimal strings or JSON numbers into the requested mode"""
    if mode == EXACT:
        if isinstance(value, float):
            return Fraction(value)
        return Fraction(str(value).strip())
    if isinstance(value, str) and "/" in value:
        return float(Fraction(value.strip()))
    return float(value)


def format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


class TruncatedAlgebra:
    """Structure arrays of a truncated Hopf algebra and array-level operations"""

    def __init__(self, basis: HopfBasis) -> None:
        self.basis = basis
        self.size = len(basis)
        self.levels = np.asarray(basis.levels, dtype=np.int64)
        self.max_level = int(self.levels.max())
        self.grades = list(basis.grades)
        self.grades_float = np.array([float(g) for g in self.grades])

        left, right, out, coef = [], [], [], []
        for i in range(self.size):
            for a, b, c in basis.coproduct_terms(i):
                left.append(a)
                right.append(b)
                out.append(i)
                coef.append(Fraction(c))
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.out = np.asarray(out, dtype=np.int64)
        self.coef_exact = np.array(coef, dtype=object)
        self.coef_float = np.array([float(c) for c in coef], dtype=np.float64)
        self.starts = np.searchsorted(self.out, np.arange(self.size))

        ant_out, ant_in, ant_coef = [], [], []
        for i in range(self.size):
            for j, c in basis.antipode_terms(i):
                ant_out.append(i)
                ant_in.append(j)
                ant_coef.append(Fraction(c))
        self.ant_out = np.asarray(ant_out, dtype=np.int64)
        self.ant_in = np.asarray(ant_in, dtype=np.int64)
        self.ant_coef_exact = np.array(ant_coef, dtype=object)
        self.ant_coef_float = np.array([float(c) for c in ant_coef], dtype=np.float64)
        self.ant_starts = np.searchsorted(self.ant_out, np.arange(self.size))
        logger.debug(
            f"Truncated algebra over {self.size} basis elements, "
            f"{len(self.out)} coproduct terms, {len(self.ant_out)} antipode terms"
        )

    @property
    def signature(self) -> Tuple:
        return (self.size, tuple(sorted((k, str(v)) for k, v in self.basis.describe().items())))

    def same_as(self, other: "TruncatedAlgebra") -> bool:
        return self is other or self.signature == other.signature

    # ------------------------------------------------------------ arrays

    def zeros(self, mode: str = FLOAT, batch: Tuple[int, ...] = ()) -> np.ndarray:
        if mode == EXACT:
            arr = np.empty((self.size,) + batch, dtype=object)
            arr.fill(Fraction(0))
            return arr
        return np.zeros((self.size,) + batch, dtype=np.float64)

    def unit_array(self, mode: str = FLOAT, batch: Tuple[int, ...] = ()) -> np.ndarray:
        arr = self.zeros(mode, batch)
        arr[0] = Fraction(1) if mode == EXACT else 1.0
        return arr

    def _segment_sum(self, terms: np.ndarray, starts: np.ndarray, exact: bool) -> np.ndarray:
        if not exact:
            return np.add.reduceat(terms, starts, axis=0)
        ends = list(starts[1:]) + [len(terms)]
        return np.array([terms[s:e].sum(axis=0) for s, e in zip(starts, ends)], dtype=object)

    def convolve_arrays(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """⟨f⋆g, x⟩ = Σ c ⟨f, x1⟩⟨g, x2⟩ over the coproduct terms of x"""
        exact = f.dtype == object
        if exact != (g.dtype == object):
            raise ScalarModeError("cannot convolve exact and float functionals")
        coef = self.coef_exact if exact else self.coef_float
        terms = _expand(coef, f.ndim) * f[self.left] * g[self.right]
        return self._segment_sum(terms, self.starts, exact)

    def antipode_arrays(self, f: np.ndarray) -> np.ndarray:
        """f∘S"""
        exact = f.dtype == object
        coef = self.ant_coef_exact if exact else self.ant_coef_float
        terms = _expand(coef, f.ndim) * f[self.ant_in]
        return self._segment_sum(terms, self.ant_starts, exact)

    def _reciprocal(self, k: int, exact: bool) -> Scalar:
        return Fraction(1, k) if exact else 1.0 / k

    def exp_arrays(self, alpha: np.ndarray, level: Optional[int] = None) -> np.ndarray:
        """Σ_{k≤N} α^{⋆k}/k!, requiring ⟨α,𝟏⟩ = 0"""
        exact = alpha.dtype == object
        top = self.max_level if level is None else level
        result = self.unit_array(EXACT if exact else FLOAT, alpha.shape[1:])
        power = alpha
        result = result + power
        for k in range(2, top + 1):
            power = self.convolve_arrays(power, alpha) * self._reciprocal(k, exact)
            result = result + power
        return result

    def log_arrays(self, x: np.ndarray, level: Optional[int] = None) -> np.ndarray:
        """Σ_{k≤N} (−1)^{k+1}(X−ε)^{⋆k}/k, requiring ⟨X,𝟏⟩ = 1"""
        exact = x.dtype == object
        top = self.max_level if level is None else level
        y = x - self.unit_array(EXACT if exact else FLOAT, x.shape[1:])
        result = y
        power = y
        for k in range(2, top + 1):
            power = self.convolve_arrays(power, y)
            result = result + power * ((-1) ** (k + 1) * self._reciprocal(k, exact))
        return result

    def restrict_arrays(self, f: np.ndarray, level: int) -> np.ndarray:
        """Zero every coefficient above `level`"""
        out = f.copy()
        out[self.levels > level] = Fraction(0) if f.dtype == object else 0.0
        return out

    # ------------------------------------------------------------ tables

    @cached_property
    def product_table(self) -> List[Tuple[int, int, List[Tuple[int, Fraction]]]]:
        """Pairs i ≤ j of non-unit elements whose product stays in the truncation"""
        table = []
        for i in range(1, self.size):
            for j in range(i, self.size):
                if self.levels[i] + self.levels[j] > self.max_level:
                    continue
                terms = self.basis.product_terms(i, j)
                if terms is not None:
                    table.append((i, j, terms))
        return table

    @cached_property
    def norm_constant(self) -> float:
        """D = max over basis elements of Σ |c(x1,x2;x)|"""
        return float(np.bincount(self.out, weights=np.abs(self.coef_float), minlength=self.size).max())

    @cached_property
    def reduced_splits(self) -> List[List[Tuple[int, int, Fraction]]]:
        """Δ′ of every basis element as (left, right, coef) index triples"""
        splits: List[List[Tuple[int, int, Fraction]]] = [[] for _ in range(self.size)]
        for a, b, i, c in zip(self.left, self.right, self.out, self.coef_exact):
            if a != 0 and b != 0:
                splits[int(i)].append((int(a), int(b), c))
        return splits

    def iterated_reduced_terms(self, k: int) -> Dict[int, List[Tuple[Tuple[int, ...], Fraction]]]:
        """Δ′_{k−1} of every non-unit element as k-tuples of basis indices"""
        if k < 1:
            raise PreconditionError(f"iterated coproduct order must be positive, got {k}")
        cache = self.__dict__.setdefault("_iterated", {})
        if k not in cache:
            if k == 1:
                cache[k] = {i: [((i,), Fraction(1))] for i in range(1, self.size)}
            else:
                previous = self.iterated_reduced_terms(k - 1)
                current: Dict[int, List[Tuple[Tuple[int, ...], Fraction]]] = {}
                for i, terms in previous.items():
                    merged: Dict[Tuple[int, ...], Fraction] = {}
                    for key, coef in terms:
                        for a, b, c in self.reduced_splits[key[0]]:
                            new_key = (a, b) + key[1:]
                            merged[new_key] = merged.get(new_key, Fraction(0)) + coef * c
                    current[i] = [(key, c) for key, c in merged.items() if c != 0]
                cache[k] = current
        return cache[k]


class DualElement:
    """A functional on a truncated basis with a fixed scalar mode"""

    def __init__(self, algebra: TruncatedAlgebra, coeffs: np.ndarray, kind: str = "functional") -> None:
        if coeffs.shape[0] != algebra.size:
            raise BasisMismatchError(
                f"coefficient vector of length {coeffs.shape[0]} for a basis of size {algebra.size}"
            )
        self.algebra = algebra
        self.coeffs = coeffs
        self.kind = kind

    @property
    def mode(self) -> str:
        return EXACT if self.coeffs.dtype == object else FLOAT

    @classmethod
    def unit(cls, algebra: TruncatedAlgebra, mode: str = EXACT) -> "DualElement":
        return cls(algebra, algebra.unit_array(mode), "character")

    @classmethod
    def zero(cls, algebra: TruncatedAlgebra, mode: str = EXACT) -> "DualElement":
        return cls(algebra, algebra.zeros(mode), "infinitesimal")

    @classmethod
    def from_mapping(
        cls, algebra: TruncatedAlgebra, values: Mapping[str, Any], mode: str = EXACT
    ) -> "DualElement":
        coeffs = algebra.zeros(mode)
        for text, value in values.items():
            coeffs[algebra.basis.lookup(text)] = parse_scalar(value, mode)
        return cls(algebra, coeffs)

    def to_dict(self) -> Dict[str, str]:
        """Nonzero coefficients keyed by basis text, in basis order"""
        return {
            self.algebra.basis.key(i): format_scalar(c)
            for i, c in enumerate(self.coeffs)
            if c != 0
        }

    def __getitem__(self, text: str) -> Scalar:
        return self.coeffs[self.algebra.basis.lookup(text)]

    def __add__(self, other: "DualElement") -> "DualElement":
        _check_compatible(self, other)
        return DualElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other: "DualElement") -> "DualElement":
        _check_compatible(self, other)
        return DualElement(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self) -> "DualElement":
        return DualElement(self.algebra, -self.coeffs, self.kind)

    def scale(self, factor: Scalar) -> "DualElement":
        return DualElement(self.algebra, self.coeffs * factor)

    def __mul__(self, other: "DualElement") -> "DualElement":
        return convolve(self, other)

    def equals(self, other: "DualElement", tol: float = 0.0) -> bool:
        _check_compatible(self, other)
        if self.mode == EXACT:
            return bool(np.all(self.coeffs == other.coeffs))
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)

    def restrict(self, level: int) -> "DualElement":
        return DualElement(self.algebra, self.algebra.restrict_arrays(self.coeffs, level), self.kind)

    def inverse(self) -> "DualElement":
        """X⁻¹ = X∘S"""
        return DualElement(self.algebra, self.algebra.antipode_arrays(self.coeffs), self.kind)

    def neumann_inverse(self) -> "DualElement":
        """X⁻¹ = Σ_k (ε − X)^{⋆k}, terminating by nilpotency"""
        algebra = self.algebra
        y = algebra.unit_array(self.mode) - self.coeffs
        result = algebra.unit_array(self.mode)
        power = algebra.unit_array(self.mode)
        for _ in range(algebra.max_level):
            power = algebra.convolve_arrays(power, y)
            result = result + power
        return DualElement(algebra, result, self.kind)


def _check_compatible(f: DualElement, g: DualElement) -> None:
    if not f.algebra.same_as(g.algebra):
        raise BasisMismatchError("functionals live on different truncated bases")
    if f.mode != g.mode:
        raise ScalarModeError(f"cannot combine {f.mode} and {g.mode} functionals")


def convolve(f: DualElement, g: DualElement) -> DualElement:
    _check_compatible(f, g)
    kind = "character" if f.kind == g.kind == "character" else "functional"
    return DualElement(f.algebra, f.algebra.convolve_arrays(f.coeffs, g.coeffs), kind)


def _close(a: Scalar, b: Scalar, tol: float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(b)))


def exp_N(alpha: DualElement) -> DualElement:
    if alpha.coeffs[0] != 0:
        raise PreconditionError("exp needs a functional vanishing on the unit", "exp_unit_zero")
    return DualElement(alpha.algebra, alpha.algebra.exp_arrays(alpha.coeffs), "character")


def log_N(x: DualElement) -> DualElement:
    if x.coeffs[0] != 1:
        raise PreconditionError("log needs a functional equal to 1 on the unit", "log_unit_one")
    return DualElement(x.algebra, x.algebra.log_arrays(x.coeffs), "infinitesimal")


def is_character(f: DualElement, tol: Optional[float] = None) -> bool:
    tol = config.tolerances.algebra_tol if tol is None else tol
    c = f.coeffs
    if not _close(c[0], Fraction(1) if f.mode == EXACT else 1.0, tol):
        return False
    for i, j, terms in f.algebra.product_table:
        if not _close(sum(coef * c[k] for k, coef in terms), c[i] * c[j], tol):
            return False
    return True


def is_infinitesimal(f: DualElement, tol: Optional[float] = None) -> bool:
    tol = config.tolerances.algebra_tol if tol is None else tol
    c = f.coeffs
    zero = Fraction(0) if f.mode == EXACT else 0.0
    if not _close(c[0], zero, tol):
        return False
    for _, _, terms in f.algebra.product_table:
        if not _close(sum(coef * c[k] for k, coef in terms), zero, tol):
            return False
    return True


def _component_norms(f: DualElement) -> Dict[int, float]:
    algebra = f.algebra
    values = np.abs(f.coeffs.astype(np.float64))
    return {
        k: algebra.norm_constant * float(values[algebra.levels == k].max(initial=0.0))
        for k in range(1, algebra.max_level + 1)
    }


def _one_sided_norm(f: DualElement) -> float:
    return max(
        ((math.factorial(k) * value) ** (1.0 / k) for k, value in _component_norms(f).items()),
        default=0.0,
    )


def homogeneous_norm(x: DualElement) -> float:
    """max_k (k!⦀X_k⦀)^{1/k} + max_k (k!⦀(X⁻¹)_k⦀)^{1/k}"""
    return _one_sided_norm(x) + _one_sided_norm(x.inverse())


def homogeneous_distance(x: DualElement, y: DualElement) -> float:
    return homogeneous_norm(convolve(x.inverse(), y))


def anisotropic_norm(x: DualElement) -> float:
    """max over non-unit v of (ℓ(v)! |⟨X,v⟩|)^{1/ω(v)}"""
    algebra = x.algebra
    values = np.abs(x.coeffs.astype(np.float64))
    return max(
        (
            (math.factorial(int(algebra.levels[i])) * values[i]) ** (1.0 / algebra.grades_float[i])
            for i in range(1, algebra.size)
        ),
        default=0.0,
    )


def anisotropic_log_norm(x: DualElement) -> float:
    """max over non-unit v of |⟨log X, v⟩|^{1/ω(v)}"""
    algebra = x.algebra
    values = np.abs(log_N(x).coeffs.astype(np.float64))
    return max(
        (values[i] ** (1.0 / algebra.grades_float[i]) for i in range(1, algebra.size)),
        default=0.0,
    )


def dilate(x: DualElement, r: Scalar) -> DualElement:
    """Ω_r: multiply the coefficient of v by r^{grade(v)}"""
    algebra = x.algebra
    if x.mode == EXACT:
        if any(g.denominator != 1 for g in algebra.grades):
            raise ScalarModeError("exact dilation needs integral grades")
        factors = np.array([Fraction(r) ** int(g) for g in algebra.grades], dtype=object)
    else:
        factors = float(r) ** algebra.grades_float
    return DualElement(algebra, x.coeffs * factors, x.kind)


def bracket(f: DualElement, g: DualElement) -> DualElement:
    """[f, g] = f⋆g − g⋆f"""
    _check_compatible(f, g)
    algebra = f.algebra
    coeffs = algebra.convolve_arrays(f.coeffs, g.coeffs) - algebra.convolve_arrays(g.coeffs, f.coeffs)
    return DualElement(algebra, coeffs, "infinitesimal")


def random_infinitesimal(
    algebra: TruncatedAlgebra,
    rng: Any,
    values: Sequence[int] = tuple(range(-3, 4)),
    denominator: int = 4,
) -> DualElement:
    """Rational infinitesimal character with nonzero data at every level

    Base samples are supported on the elements that never occur in a
    product expansion (trees for forests, letters for words); brackets of
    base samples fill in the higher levels.
    """
    decomposable = {k for _, _, terms in algebra.product_table for k, _ in terms}
    free = [i for i in range(1, algebra.size) if i not in decomposable]

    def base() -> DualElement:
        coeffs = algebra.zeros(EXACT)
        for i in free:
            coeffs[i] = Fraction(rng.choice(values), denominator)
        return DualElement(algebra, coeffs, "infinitesimal")

    a, b, c = base(), base(), base()
    ab = bracket(a, b)
    result = a + ab + bracket(c, ab)
    result.kind = "infinitesimal"
    return result


def random_character(algebra: TruncatedAlgebra, rng: Any, **kwargs: Any) -> DualElement:
    return exp_N(random_infinitesimal(algebra, rng, **kwargs))
