"""
Butcher–Connes–Kreimer Hopf algebra

Product (disjoint union), coproduct via admissible cuts, reduced and
iterated reduced coproducts, counit, antipode and the truncated forest
basis consumed by the dual algebra.

Tensors are plain dictionaries from tuples of canonical forests to
`Fraction` coefficients with zero entries dropped.
"""

import logging
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .forests import (
    UNIT,
    DecoratedForest,
    DecoratedTree,
    admissible_cuts,
    as_forest,
    enumerate_forests,
    parse_forest,
)

logger = logging.getLogger(__name__)

ForestTensor = Dict[Tuple[DecoratedForest, ...], Fraction]
ForestCombination = Dict[DecoratedForest, Fraction]
ForestLike = Union[DecoratedForest, DecoratedTree, Mapping[DecoratedForest, Fraction]]


def _clean(terms: Mapping) -> Dict:
    return {k: v for k, v in terms.items() if v != 0}


def _as_combination(x: ForestLike) -> ForestCombination:
    if isinstance(x, (DecoratedForest, DecoratedTree)):
        return {as_forest(x): Fraction(1)}
    return dict(x)


def multiply(a: ForestLike, b: ForestLike) -> ForestCombination:
    """Bilinear forest product"""
    out: Dict[DecoratedForest, Fraction] = defaultdict(Fraction)
    for fa, ca in _as_combination(a).items():
        for fb, cb in _as_combination(b).items():
            out[fa * fb] += ca * cb
    return _clean(out)


def _tensor_product(x: ForestTensor, y: ForestTensor) -> ForestTensor:
    """Factorwise product of two tensors of equal arity"""
    out: Dict[Tuple[DecoratedForest, ...], Fraction] = defaultdict(Fraction)
    for kx, cx in x.items():
        for ky, cy in y.items():
            out[tuple(a * b for a, b in zip(kx, ky))] += cx * cy
    return out


@lru_cache(maxsize=None)
def _tree_coproduct(tree: DecoratedTree) -> Tuple[Tuple[DecoratedForest, DecoratedForest, Fraction], ...]:
    forest = as_forest(tree)
    terms: Dict[Tuple[DecoratedForest, DecoratedForest], Fraction] = defaultdict(Fraction)
    terms[(forest, UNIT)] += 1
    terms[(UNIT, forest)] += 1
    for cut in admissible_cuts(tree):
        terms[(cut.pruned, as_forest(cut.root_part))] += 1
    return tuple((a, b, c) for (a, b), c in terms.items())


@lru_cache(maxsize=None)
def _forest_coproduct(forest: DecoratedForest) -> Tuple[Tuple[DecoratedForest, DecoratedForest, Fraction], ...]:
    result: ForestTensor = {(UNIT, UNIT): Fraction(1)}
    for tree in forest.trees:
        tree_terms = {(a, b): c for a, b, c in _tree_coproduct(tree)}
        result = _tensor_product(result, tree_terms)
    ordered = sorted(_clean(result).items(), key=lambda kv: (kv[0][0].key, kv[0][1].key))
    return tuple((a, b, c) for (a, b), c in ordered)


def bck_coproduct(x: ForestLike) -> ForestTensor:
    """Δ via admissible cuts on trees, extended multiplicatively to forests"""
    out: Dict[Tuple[DecoratedForest, ...], Fraction] = defaultdict(Fraction)
    for forest, coef in _as_combination(x).items():
        for a, b, c in _forest_coproduct(forest):
            out[(a, b)] += coef * c
    return _clean(out)


def counit(x: ForestLike) -> Fraction:
    return _as_combination(x).get(UNIT, Fraction(0))


def reduced_coproduct(x: ForestLike) -> ForestTensor:
    """Δ′x = Δx − x⊗𝟏 − 𝟏⊗x, applied to the augmentation part of x"""
    out: Dict[Tuple[DecoratedForest, ...], Fraction] = defaultdict(Fraction)
    for forest, coef in _as_combination(x).items():
        if forest.is_unit:
            continue
        for a, b, c in _forest_coproduct(forest):
            if a.is_unit or b.is_unit:
                continue
            out[(a, b)] += coef * c
    return _clean(out)


def iterated_reduced(x: ForestLike, n: int) -> ForestTensor:
    """Δ′_n = (Δ′ ⊗ id^{⊗(n−1)}) Δ′_{n−1} with Δ′_0 = id restricted to positive degree"""
    current: ForestTensor = {
        (f,): c for f, c in _as_combination(x).items() if not f.is_unit and c != 0
    }
    for _ in range(n):
        nxt: Dict[Tuple[DecoratedForest, ...], Fraction] = defaultdict(Fraction)
        for key, coef in current.items():
            for (a, b), c in reduced_coproduct(key[0]).items():
                nxt[(a, b) + key[1:]] += coef * c
        current = _clean(nxt)
    return current


def multiply_out(tensor: ForestTensor) -> ForestCombination:
    """m applied to every factor of each term"""
    out: Dict[DecoratedForest, Fraction] = defaultdict(Fraction)
    for key, coef in tensor.items():
        product = UNIT
        for factor in key:
            product = product * factor
        out[product] += coef
    return _clean(out)


@lru_cache(maxsize=None)
def _tree_antipode(tree: DecoratedTree) -> Tuple[Tuple[DecoratedForest, Fraction], ...]:
    out: Dict[DecoratedForest, Fraction] = defaultdict(Fraction)
    out[as_forest(tree)] -= 1
    for cut in admissible_cuts(tree):
        for forest, coef in multiply(_antipode_forest(cut.pruned), cut.root_part).items():
            out[forest] -= coef
    return tuple(sorted(_clean(out).items(), key=lambda kv: kv[0].key))


def _antipode_forest(forest: DecoratedForest) -> ForestCombination:
    result: ForestCombination = {UNIT: Fraction(1)}
    for tree in forest.trees:
        result = multiply(result, dict(_tree_antipode(tree)))
    return result


def antipode(x: ForestLike) -> ForestCombination:
    """S by the cut recursion S(τ) = −τ − Σ_C S(P^C)·R^C, multiplicative on forests"""
    out: Dict[DecoratedForest, Fraction] = defaultdict(Fraction)
    for forest, coef in _as_combination(x).items():
        for f, c in _antipode_forest(forest).items():
            out[f] += coef * c
    return _clean(out)


def antipode_via_series(x: ForestLike) -> ForestCombination:
    """S = Σ_k (η∘ε − id)^{⋆k}, i.e. S(x) = Σ_{k≥1} (−1)^k m(Δ′_{k−1} x) off the unit"""
    combination = _as_combination(x)
    out: Dict[DecoratedForest, Fraction] = defaultdict(Fraction)
    if UNIT in combination:
        out[UNIT] += combination[UNIT]
    top = max((f.size for f in combination), default=0)
    for k in range(1, top + 1):
        for forest, coef in multiply_out(iterated_reduced(combination, k - 1)).items():
            out[forest] += (-1) ** k * coef
    return _clean(out)


def forest_degree(x: DecoratedForest) -> int:
    return x.size


class ForestBasis:
    """
    Truncated BCK basis: every forest with at most `n` nodes over `decorations`.

    Index 0 is the unit. Levels and grades are both node counts.
    """

    kind = "bck"

    def __init__(
        self, n: int, decorations: Sequence[int], max_basis: Optional[int] = None
    ) -> None:
        self.n = n
        self.decorations = tuple(decorations)
        self.elements: List[DecoratedForest] = enumerate_forests(n, self.decorations, max_basis)
        self.index = {f: i for i, f in enumerate(self.elements)}
        self.levels = [f.size for f in self.elements]
        self.grades = [Fraction(f.size) for f in self.elements]
        self.letters = [self.index[parse_forest(f"[{i}]")] for i in self.decorations]
        logger.info(
            f"Forest basis: {len(self.elements)} forests with <= {n} nodes "
            f"over decorations {self.decorations}"
        )

    @classmethod
    def standard(cls, n: int, d: int, with_zero: bool = False, max_basis: Optional[int] = None) -> "ForestBasis":
        decorations = range(0 if with_zero else 1, d + 1)
        return cls(n, decorations, max_basis)

    def __len__(self) -> int:
        return len(self.elements)

    def describe(self) -> Dict[str, object]:
        return {"algebra": "bck", "N": self.n, "decorations": list(self.decorations)}

    def key(self, i: int) -> str:
        return str(self.elements[i])

    def lookup(self, text: str) -> int:
        return self.index[parse_forest(text)]

    def coproduct_terms(self, i: int) -> List[Tuple[int, int, Fraction]]:
        return [(self.index[a], self.index[b], c) for a, b, c in _forest_coproduct(self.elements[i])]

    def antipode_terms(self, i: int) -> List[Tuple[int, Fraction]]:
        return [(self.index[f], c) for f, c in _antipode_forest(self.elements[i]).items()]

    def product_terms(self, i: int, j: int) -> Optional[List[Tuple[int, Fraction]]]:
        product = self.elements[i] * self.elements[j]
        if product.size > self.n:
            return None
        return [(self.index[product], Fraction(1))]

    def is_zero_free(self, i: int) -> bool:
        return all(dec != 0 for t in self.elements[i].trees for dec in t.decorations())
