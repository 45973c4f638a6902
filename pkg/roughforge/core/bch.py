"""
Baker–Campbell–Hausdorff terms from descent-number coefficients

φ_k(α1⊗⋯⊗αk) = Σ_{σ∈S_k} a_σ α_{σ(1)}⋆⋯⋆α_{σ(k)} with
a_σ = (−1)^{d(σ)} / (k · binom(k−1, d(σ))), evaluated against the
iterated reduced coproduct Δ′_{k−1}. The homogeneous BCH terms collapse the
double sum over (i, j) and σ into one coefficient per α/β pattern.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import config
from .dual import EXACT, FLOAT, DualElement, TruncatedAlgebra, bracket, is_infinitesimal
from .errors import BasisMismatchError, PreconditionError, ResourceLimitError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PermutationRow:
    permutation: Tuple[int, ...]
    descents: int
    coefficient: Fraction

    @property
    def one_line(self) -> str:
        return "".join(str(i) for i in self.permutation)


def descent_number(permutation: Sequence[int]) -> int:
    return sum(1 for a, b in zip(permutation, permutation[1:]) if a > b)


def _check_order(k: int) -> None:
    cap = config.limits.max_bch_order
    if k < 1:
        raise PreconditionError(f"BCH order must be positive, got {k}", "bch_order")
    if k > cap:
        raise ResourceLimitError(f"BCH order {k} exceeds the cap of {cap}", "bch_order_cap")


@lru_cache(maxsize=None)
def _table(k: int) -> Tuple[PermutationRow, ...]:
    rows = []
    for perm in permutations(range(1, k + 1)):
        d = descent_number(perm)
        rows.append(PermutationRow(perm, d, Fraction((-1) ** d, k * math.comb(k - 1, d))))
    return tuple(rows)


def descent_coefficients(k: int) -> List[PermutationRow]:
    """All k! rows (σ, d(σ), a_σ) in lexicographic order of σ"""
    _check_order(k)
    return list(_table(k))


@lru_cache(maxsize=None)
def _pattern_coefficients(k: int) -> Tuple[Tuple[Tuple[bool, ...], Fraction], ...]:
    """C_k(m) = Σ_{i+j=k} Σ_{σ : [σ(p) ≤ i] = m_p} a_σ / (i! j!)"""
    totals: Dict[Tuple[bool, ...], Fraction] = {}
    for i in range(k + 1):
        scale = Fraction(1, math.factorial(i) * math.factorial(k - i))
        for row in _table(k):
            mask = tuple(s <= i for s in row.permutation)
            totals[mask] = totals.get(mask, Fraction(0)) + scale * row.coefficient
    return tuple((m, c) for m, c in sorted(totals.items()) if c != 0)


def pattern_coefficients(k: int) -> Dict[Tuple[bool, ...], Fraction]:
    _check_order(k)
    return dict(_pattern_coefficients(k))


def _require_infinitesimal(alphas: Sequence[DualElement]) -> TruncatedAlgebra:
    algebra = alphas[0].algebra
    for alpha in alphas:
        if not alpha.algebra.same_as(algebra):
            raise BasisMismatchError("BCH inputs live on different truncated bases")
        if not is_infinitesimal(alpha):
            raise PreconditionError("BCH inputs must be infinitesimal characters", "infinitesimal")
    return algebra


def _scatter(size: int, owners: np.ndarray, values: np.ndarray, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((size,) + values.shape[1:], dtype=object)
        out.fill(Fraction(0))
        for owner, value in zip(owners, values):
            out[owner] = out[owner] + value
        return out
    out = np.zeros((size,) + values.shape[1:], dtype=np.float64)
    np.add.at(out, owners, values)
    return out


class _TermLayout:
    """Rows (owner, factor indices, coefficient) of Δ′_{k−1} as arrays"""

    def __init__(self, algebra: TruncatedAlgebra, k: int, level: Optional[int]) -> None:
        owners, factors, coefs = [], [], []
        for i, terms in sorted(algebra.iterated_reduced_terms(k).items()):
            if level is not None and algebra.levels[i] != level:
                continue
            for key, c in terms:
                owners.append(i)
                factors.append(key)
                coefs.append(c)
        self.owners = np.asarray(owners, dtype=np.int64)
        self.factors = np.asarray(factors, dtype=np.int64).reshape(len(owners), k)
        self.coef_exact = np.array(coefs, dtype=object)
        self.coef_float = np.array([float(c) for c in coefs], dtype=np.float64)


def _layout(algebra: TruncatedAlgebra, k: int, level: Optional[int]) -> _TermLayout:
    cache = algebra.__dict__.setdefault("_bch_layouts", {})
    if (k, level) not in cache:
        cache[(k, level)] = _TermLayout(algebra, k, level)
    return cache[(k, level)]


def _pattern_sum(
    algebra: TruncatedAlgebra,
    sources: Sequence[np.ndarray],
    weighted_patterns: Sequence[Tuple[Tuple[int, ...], Fraction]],
    k: int,
    level: Optional[int],
) -> np.ndarray:
    """Σ_rows c_row Σ_patterns w Π_p sources[pattern_p][factor_p]"""
    exact = sources[0].dtype == object
    layout = _layout(algebra, k, level)
    batch = sources[0].shape[1:]
    if len(layout.owners) == 0:
        return algebra.zeros(EXACT if exact else FLOAT, batch)
    row_coef = layout.coef_exact if exact else layout.coef_float
    total: Optional[np.ndarray] = None
    for pattern, weight in weighted_patterns:
        term = sources[pattern[0]][layout.factors[:, 0]]
        for p in range(1, k):
            term = term * sources[pattern[p]][layout.factors[:, p]]
        w = weight if exact else float(weight)
        total = term * w if total is None else total + term * w
    assert total is not None
    values = total * row_coef.reshape(row_coef.shape + (1,) * len(batch))
    return _scatter(algebra.size, layout.owners, values, exact)


def phi_k_arrays(algebra: TruncatedAlgebra, alphas: Sequence[np.ndarray]) -> np.ndarray:
    k = len(alphas)
    _check_order(k)
    patterns = [
        (tuple(s - 1 for s in row.permutation), row.coefficient) for row in _table(k)
    ]
    return _pattern_sum(algebra, list(alphas), patterns, k, None)


def phi_k(alphas: Sequence[DualElement]) -> DualElement:
    """⟨φ_k(α1⊗⋯⊗αk), x⟩ = Σ_{(x)} Σ_σ a_σ Π_p ⟨α_{σ(p)}, x_(p)⟩"""
    if not alphas:
        raise PreconditionError("phi_k needs at least one input", "bch_order")
    algebra = _require_infinitesimal(alphas)
    return DualElement(algebra, phi_k_arrays(algebra, [a.coeffs for a in alphas]), "infinitesimal")


def bch_term_arrays(
    algebra: TruncatedAlgebra,
    alpha: np.ndarray,
    beta: np.ndarray,
    k: int,
    level: Optional[int] = None,
) -> np.ndarray:
    """BCH_(k)(α, β); with `level` set only coefficients of that degree are produced"""
    _check_order(k)
    patterns = [
        (tuple(0 if m else 1 for m in mask), c) for mask, c in _pattern_coefficients(k)
    ]
    return _pattern_sum(algebra, [alpha, beta], patterns, k, level)


def bch_degree_arrays(
    algebra: TruncatedAlgebra, alpha: np.ndarray, beta: np.ndarray, level: int
) -> np.ndarray:
    """Degree-`level` part of BCH_level(α, β), summing BCH_(k) over every k ≤ level"""
    total = bch_term_arrays(algebra, alpha, beta, 1, level)
    for k in range(2, level + 1):
        total = total + bch_term_arrays(algebra, alpha, beta, k, level)
    return total


def bch_term(alpha: DualElement, beta: DualElement, k: int) -> DualElement:
    """Σ_{i+j=k} φ_k(α^{⊗i}⊗β^{⊗j}) / (i! j!)"""
    algebra = _require_infinitesimal([alpha, beta])
    return DualElement(
        algebra, bch_term_arrays(algebra, alpha.coeffs, beta.coeffs, k), "infinitesimal"
    )


def bch(alpha: DualElement, beta: DualElement, n: Optional[int] = None) -> DualElement:
    """BCH_N(α, β) = Σ_{k≤N} BCH_(k)(α, β)"""
    algebra = _require_infinitesimal([alpha, beta])
    top = algebra.max_level if n is None else n
    total = algebra.zeros(alpha.mode)
    for k in range(1, top + 1):
        total = total + bch_term_arrays(algebra, alpha.coeffs, beta.coeffs, k)
    logger.debug(f"BCH evaluated through order {top} on {algebra.size} basis elements")
    return DualElement(algebra, total, "infinitesimal")


def dynkin_operator(alpha: DualElement) -> DualElement:
    """Σ_w ⟨α, w⟩ [⋯[e_{w1}, e_{w2}], ⋯, e_{wk}] on a word basis"""
    algebra = alpha.algebra
    if algebra.basis.kind != "shuffle":
        raise PreconditionError("the Dynkin operator is defined on word bases", "word_basis")
    letters = {}
    for i in algebra.basis.letters:
        coeffs = algebra.zeros(alpha.mode)
        coeffs[i] = Fraction(1) if alpha.mode == EXACT else 1.0
        letters[algebra.basis.elements[i][0]] = DualElement(algebra, coeffs, "infinitesimal")
    total = algebra.zeros(alpha.mode)
    for i in range(1, algebra.size):
        value = alpha.coeffs[i]
        if value == 0:
            continue
        word = algebra.basis.elements[i]
        nested = letters[word[0]]
        for letter in word[1:]:
            nested = bracket(nested, letters[letter])
        total = total + nested.coeffs * value
    return DualElement(algebra, total)


def table_rows(k: int) -> List[Dict[str, str]]:
    """Rows of the a_σ table for CSV export"""
    return [
        {
            "k": str(k),
            "permutation": row.one_line,
            "descents": str(row.descents),
            "coefficient": str(row.coefficient),
        }
        for row in descent_coefficients(k)
    ]


__all__ = [
    "PermutationRow",
    "bch",
    "bch_term",
    "bch_degree_arrays",
    "bch_term_arrays",
    "descent_coefficients",
    "descent_number",
    "dynkin_operator",
    "pattern_coefficients",
    "phi_k",
    "table_rows",
]
