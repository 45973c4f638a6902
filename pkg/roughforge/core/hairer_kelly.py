"""
The map ψ from forests to words of trees

ψ(τ) = τ + Σ_C ψ(P^C(τ))·R^C(τ) on trees (root part appended as the last
letter) and ψ(στ) = ψ(σ) ⧢ ψ(τ) on forests. The same expansion is also
produced from admissible extended decorations: weakly increasing node
labels onto {1..m} whose level sets are subtrees, read as τ_m⋯τ_1.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .bck import ForestTensor, bck_coproduct
from .errors import LevelOverflowError, PreconditionError
from .forests import DecoratedForest, DecoratedTree, FlatTree, admissible_cuts, as_forest
from .shuffle import deconcat_coproduct, shuffle_combinations

logger = logging.getLogger(__name__)

TreeWord = Tuple[DecoratedTree, ...]
WordCombination = Dict[TreeWord, Fraction]


def _clean(terms: Mapping) -> Dict:
    return {k: v for k, v in terms.items() if v != 0}


@lru_cache(maxsize=None)
def _psi_tree(tree: DecoratedTree) -> Tuple[Tuple[TreeWord, Fraction], ...]:
    out: Dict[TreeWord, Fraction] = defaultdict(Fraction)
    out[(tree,)] += 1
    for cut in admissible_cuts(tree):
        for word, coef in _psi_forest(cut.pruned).items():
            out[word + (cut.root_part,)] += coef
    return tuple(sorted(_clean(out).items(), key=lambda kv: _word_order(kv[0])))


def _psi_forest(forest: DecoratedForest) -> WordCombination:
    result: WordCombination = {(): Fraction(1)}
    for tree in forest.trees:
        result = shuffle_combinations(result, dict(_psi_tree(tree)))
    return result


def _word_order(word: TreeWord) -> Tuple:
    return (len(word), tuple(t.key for t in word))


def psi(forest: Union[DecoratedForest, DecoratedTree], n: Optional[int] = None) -> WordCombination:
    """ψ by the cut recursion, multiplicative for the shuffle product"""
    forest = as_forest(forest)
    if n is not None and forest.size > n:
        raise LevelOverflowError(f"forest {forest} has more than {n} nodes")
    return dict(sorted(_psi_forest(forest).items(), key=lambda kv: _word_order(kv[0])))


def psi_minus_top(tree: DecoratedTree) -> WordCombination:
    """ψ_{|τ|−1}(τ) = ψ(τ) − τ"""
    return {w: c for w, c in _psi_tree(tree) if w != (tree,)}


def psi_tensor(tensor: ForestTensor) -> Dict[Tuple[TreeWord, ...], Fraction]:
    """ψ applied to every factor of a forest tensor"""
    out: Dict[Tuple[TreeWord, ...], Fraction] = defaultdict(Fraction)
    for key, coef in tensor.items():
        expansions = [list(_psi_forest(f).items()) for f in key]
        for choice in product(*expansions):
            value = coef
            for _, c in choice:
                value *= c
            out[tuple(w for w, _ in choice)] += value
    return _clean(out)


def coproduct_of_psi(forest: DecoratedForest) -> Dict[Tuple[TreeWord, ...], Fraction]:
    """Δ̄ψ(forest), to compare with (ψ⊗ψ)Δ(forest)"""
    out: Dict[Tuple[TreeWord, ...], Fraction] = defaultdict(Fraction)
    for word, coef in _psi_forest(forest).items():
        for key, c in deconcat_coproduct(word).items():
            out[key] += coef * c
    return _clean(out)


def psi_of_coproduct(forest: DecoratedForest) -> Dict[Tuple[TreeWord, ...], Fraction]:
    return psi_tensor(bck_coproduct(forest))


# ---------------------------------------------------------------- extended decorations


class _FlatForest:
    """Preorder numbering across the trees of a forest; roots have parent −1"""

    def __init__(self, forest: DecoratedForest) -> None:
        self.forest = forest
        self.parents: List[int] = []
        self.decorations: List[int] = []
        self.owner: List[Tuple[int, int]] = []
        self.flats = [FlatTree(t) for t in forest.trees]
        for tree_index, flat in enumerate(self.flats):
            offset = len(self.parents)
            for local, parent in enumerate(flat.parents):
                self.parents.append(parent + offset if parent >= 0 else -1)
                self.decorations.append(flat.decorations[local])
                self.owner.append((tree_index, local))

    def __len__(self) -> int:
        return len(self.parents)

    def spans_subtree(self, nodes: Sequence[int]) -> bool:
        node_set = set(nodes)
        return len([x for x in node_set if self.parents[x] not in node_set]) == 1

    def subtree(self, nodes: Sequence[int]) -> DecoratedTree:
        tree_index = self.owner[nodes[0]][0]
        local = [self.owner[x][1] for x in nodes]
        return self.flats[tree_index].induced(local).trees[0]


@dataclass(frozen=True)
class ExtendedDecoration:
    """Labels 𝔬 on the preorder nodes of `host`"""

    host: DecoratedForest
    labels: Tuple[int, ...]

    @property
    def m(self) -> int:
        return max(self.labels, default=0)

    def parts(self) -> List[List[int]]:
        return [[x for x, lab in enumerate(self.labels) if lab == j] for j in range(1, self.m + 1)]

    def word(self) -> TreeWord:
        """τ_m ⋯ τ_1"""
        flat = _FlatForest(self.host)
        return tuple(flat.subtree(part) for part in reversed(self.parts()))

    @classmethod
    def from_decorations(
        cls, host: Union[DecoratedForest, DecoratedTree], labels: Mapping[int, int]
    ) -> "ExtendedDecoration":
        """Label nodes through their (pairwise distinct) decorations"""
        forest = as_forest(host)
        flat = _FlatForest(forest)
        if len(set(flat.decorations)) != len(flat):
            raise PreconditionError("decorations must be distinct to address nodes by them")
        return cls(forest, tuple(labels[d] for d in flat.decorations))


def is_admissible(decoration: ExtendedDecoration) -> bool:
    flat = _FlatForest(decoration.host)
    labels = decoration.labels
    if len(labels) != len(flat) or not labels:
        return False
    if set(labels) != set(range(1, decoration.m + 1)):
        return False
    if any(p >= 0 and labels[p] > labels[x] for x, p in enumerate(flat.parents)):
        return False
    return all(flat.spans_subtree(part) for part in decoration.parts())


def enumerate_extended_decorations(
    host: Union[DecoratedForest, DecoratedTree],
) -> List[ExtendedDecoration]:
    """Every admissible extended decoration, in lexicographic order of labels"""
    forest = as_forest(host)
    flat = _FlatForest(forest)
    size = len(flat)
    found: List[ExtendedDecoration] = []

    def assign(x: int, labels: List[int]) -> None:
        if x == size:
            candidate = ExtendedDecoration(forest, tuple(labels))
            if is_admissible(candidate):
                found.append(candidate)
            return
        parent = flat.parents[x]
        low = labels[parent] if parent >= 0 else 1
        for label in range(low, size + 1):
            labels.append(label)
            assign(x + 1, labels)
            labels.pop()

    if size:
        assign(0, [])
    logger.debug(f"{len(found)} admissible extended decorations on {forest}")
    return found


def psi_via_partitions(
    forest: Union[DecoratedForest, DecoratedTree], n: Optional[int] = None
) -> WordCombination:
    """Σ over admissible extended decorations of τ_m⋯τ_1"""
    forest = as_forest(forest)
    if n is not None and forest.size > n:
        raise LevelOverflowError(f"forest {forest} has more than {n} nodes")
    if forest.is_unit:
        return {(): Fraction(1)}
    out: Dict[TreeWord, Fraction] = defaultdict(Fraction)
    for decoration in enumerate_extended_decorations(forest):
        out[decoration.word()] += 1
    return dict(sorted(out.items(), key=lambda kv: _word_order(kv[0])))


def format_word(word: TreeWord) -> str:
    return ".".join(str(t) for t in word)


def format_expansion(expansion: Mapping[TreeWord, Fraction]) -> List[Dict[str, str]]:
    """Terms as {"word", "coefficient"} rows in length-lexicographic order"""
    return [
        {"word": format_word(w), "coefficient": str(c)}
        for w, c in sorted(expansion.items(), key=lambda kv: _word_order(kv[0]))
    ]


def pretty_expansion(expansion: Mapping[TreeWord, Fraction]) -> str:
    parts = []
    for row in format_expansion(expansion):
        coefficient = "" if row["coefficient"] == "1" else f"{row['coefficient']}*"
        parts.append(f"{coefficient}{row['word'] or '1'}")
    return " + ".join(parts) if parts else "0"
