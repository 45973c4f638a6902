"""
Decorated non-planar rooted forests

Canonical representation, text grammar, enumeration and the combinatorics
the Hopf algebras are built from: grafting, admissible cuts, subtree
containment and node-level surgery (induced subforests, contractions).

Canonical form: children are stored sorted by `DecoratedTree.key`, which
compares (node count, root decoration, sorted child keys). Structural
equality of canonical values is isomorphism of decorated rooted trees.
"""

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..config.settings import config
from .errors import DecorationError, ParseError, ResourceLimitError

logger = logging.getLogger(__name__)

TreeKey = Tuple


@dataclass(frozen=True)
class DecoratedTree:
    """A decorated rooted tree in canonical form"""

    decoration: int
    children: Tuple["DecoratedTree", ...] = ()
    size: int = field(init=False, compare=False, repr=False)
    key: TreeKey = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        children = tuple(sorted(self.children, key=lambda c: c.key))
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "size", 1 + sum(c.size for c in children))
        object.__setattr__(
            self, "key", (self.size, self.decoration, tuple(c.key for c in children))
        )

    def __lt__(self, other: "DecoratedTree") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return f"[{self.decoration}{''.join(str(c) for c in self.children)}]"

    def decorations(self) -> Iterator[int]:
        yield self.decoration
        for child in self.children:
            yield from child.decorations()

    def factorial(self) -> int:
        """Tree factorial: product over nodes of the size of the subtree they root"""
        result = self.size
        for child in self.children:
            result *= child.factorial()
        return result


@dataclass(frozen=True)
class DecoratedForest:
    """A multiset of decorated trees in canonical order; the empty forest is the unit"""

    trees: Tuple[DecoratedTree, ...] = ()
    size: int = field(init=False, compare=False, repr=False)
    key: TreeKey = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        trees = tuple(sorted(self.trees, key=lambda t: t.key))
        object.__setattr__(self, "trees", trees)
        object.__setattr__(self, "size", sum(t.size for t in trees))
        object.__setattr__(self, "key", (self.size, len(trees), tuple(t.key for t in trees)))

    @classmethod
    def of(cls, *trees: DecoratedTree) -> "DecoratedForest":
        return cls(tuple(trees))

    @property
    def is_unit(self) -> bool:
        return not self.trees

    def __mul__(self, other: "DecoratedForest") -> "DecoratedForest":
        return DecoratedForest(self.trees + other.trees)

    def __lt__(self, other: "DecoratedForest") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        if not self.trees:
            return "1"
        return "".join(str(t) for t in self.trees)


UNIT = DecoratedForest()


def as_forest(value: "DecoratedTree | DecoratedForest") -> DecoratedForest:
    if isinstance(value, DecoratedTree):
        return DecoratedForest((value,))
    return value


def node(decoration: int) -> DecoratedTree:
    """Single node tree •_i"""
    return DecoratedTree(decoration)


# ---------------------------------------------------------------- grammar

_TOKEN = re.compile(r"\s*(\[|\]|\d+)")


def _tokenize(text: str) -> List[str]:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        match = _TOKEN.match(stripped, pos)
        if not match:
            raise ParseError(f"unexpected character at offset {pos} in {text!r}")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


def _parse_tree(tokens: List[str], pos: int, text: str) -> Tuple[DecoratedTree, int]:
    if pos >= len(tokens) or tokens[pos] != "[":
        raise ParseError(f"expected '[' in {text!r}")
    if pos + 1 >= len(tokens) or not tokens[pos + 1].isdigit():
        raise ParseError(f"expected decoration after '[' in {text!r}")
    decoration = int(tokens[pos + 1])
    pos += 2
    children = []
    while pos < len(tokens) and tokens[pos] == "[":
        child, pos = _parse_tree(tokens, pos, text)
        children.append(child)
    if pos >= len(tokens) or tokens[pos] != "]":
        raise ParseError(f"unbalanced brackets in {text!r}")
    return DecoratedTree(decoration, tuple(children)), pos + 1


def parse_forest(text: str) -> DecoratedForest:
    """Parse `forest := tree {tree} | "1"`"""
    tokens = _tokenize(text)
    if tokens == ["1"]:
        return UNIT
    if not tokens:
        raise ParseError("empty forest text; use '1' for the unit")
    trees = []
    pos = 0
    while pos < len(tokens):
        tree, pos = _parse_tree(tokens, pos, text)
        trees.append(tree)
    return DecoratedForest(tuple(trees))


def parse_tree(text: str) -> DecoratedTree:
    forest = parse_forest(text)
    if len(forest.trees) != 1:
        raise ParseError(f"expected exactly one tree in {text!r}")
    return forest.trees[0]


# ---------------------------------------------------------------- flat node view


class FlatTree:
    """
    Preorder node numbering of a canonical tree.

    Node 0 is the root; the edge above node k > 0 is identified by k.
    """

    def __init__(self, tree: DecoratedTree) -> None:
        self.tree = tree
        self.decorations: List[int] = []
        self.parents: List[int] = []
        self.children: List[List[int]] = []
        self._visit(tree, -1)

    def _visit(self, tree: DecoratedTree, parent: int) -> None:
        index = len(self.decorations)
        self.decorations.append(tree.decoration)
        self.parents.append(parent)
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(index)
        for child in tree.children:
            self._visit(child, index)

    def __len__(self) -> int:
        return len(self.decorations)

    def descendants(self, index: int) -> List[int]:
        result = [index]
        for child in self.children[index]:
            result.extend(self.descendants(child))
        return result

    def ancestors(self, index: int) -> List[int]:
        result = []
        while self.parents[index] >= 0:
            index = self.parents[index]
            result.append(index)
        return result

    def is_connected(self, nodes: Iterable[int]) -> bool:
        """True iff `nodes` spans a subtree, i.e. exactly one member has its parent outside"""
        node_set = set(nodes)
        if not node_set:
            return False
        tops = [n for n in node_set if self.parents[n] not in node_set]
        return len(tops) == 1

    def _build(self, index: int, keep: FrozenSet[int], relabel: Dict[int, int]) -> DecoratedTree:
        return DecoratedTree(
            relabel.get(index, self.decorations[index]),
            tuple(self._build(c, keep, relabel) for c in self.children[index] if c in keep),
        )

    def induced(self, nodes: Iterable[int], relabel: Optional[Dict[int, int]] = None) -> DecoratedForest:
        """Subforest spanned by `nodes` (one tree per connected component)"""
        keep = frozenset(nodes)
        relabel = relabel or {}
        tops = sorted(n for n in keep if self.parents[n] not in keep)
        return DecoratedForest(tuple(self._build(n, keep, relabel) for n in tops))

    def contract(self, parts: Sequence[FrozenSet[int]], marker: int = 0) -> DecoratedTree:
        """Contract each connected part to one node decorated `marker`"""
        owner: Dict[int, int] = {}
        for part_index, part in enumerate(parts):
            for n in part:
                owner[n] = part_index

        def build(index: int) -> DecoratedTree:
            if index in owner:
                part = parts[owner[index]]
                outside = [c for n in sorted(part) for c in self.children[n] if c not in part]
                return DecoratedTree(marker, tuple(build(c) for c in outside))
            return DecoratedTree(
                self.decorations[index], tuple(build(c) for c in self.children[index])
            )

        return build(0)


# ---------------------------------------------------------------- operations


def graft(
    forest: "DecoratedForest | DecoratedTree", i: int, d: Optional[int] = None, allow_zero: bool = False
) -> DecoratedTree:
    """[τ1⋯τk]_i: attach every tree of `forest` to a new root decorated `i`"""
    lower = 0 if allow_zero else 1
    if i < lower or (d is not None and i > d):
        raise DecorationError(f"decoration {i} outside [{lower}, {d if d is not None else '∞'}]")
    return DecoratedTree(i, as_forest(forest).trees)


@dataclass(frozen=True)
class AdmissibleCut:
    """Non-empty antichain of edges; edges named by their child node in preorder"""

    cut_edges: FrozenSet[int]
    pruned: DecoratedForest
    root_part: DecoratedTree


def _antichains(flat: FlatTree, index: int) -> List[List[int]]:
    """All edge antichains strictly below `index`"""
    per_child: List[List[List[int]]] = []
    for child in flat.children[index]:
        options = [[child]] + _antichains(flat, child)
        per_child.append(options)
    result: List[List[int]] = [[]]
    for options in per_child:
        result = [chosen + option for chosen in result for option in options]
    return result


def cut_at(flat: FlatTree, edges: Iterable[int]) -> AdmissibleCut:
    edge_set = frozenset(edges)
    removed = set()
    for e in edge_set:
        removed.update(flat.descendants(e))
    pruned = DecoratedForest(tuple(flat.induced(flat.descendants(e)).trees[0] for e in edge_set))
    root_part = flat.induced(set(range(len(flat))) - removed).trees[0]
    return AdmissibleCut(edge_set, pruned, root_part)


def admissible_cuts(tree: DecoratedTree) -> List[AdmissibleCut]:
    """Every non-empty cut meeting each root path at most once, with (P^C, R^C)"""
    return list(_admissible_cuts_cached(tree))


@lru_cache(maxsize=None)
def _admissible_cuts_cached(tree: DecoratedTree) -> Tuple[AdmissibleCut, ...]:
    flat = FlatTree(tree)
    chains = [sorted(c) for c in _antichains(flat, 0) if c]
    return tuple(cut_at(flat, c) for c in sorted(chains))


def _check_count(count: int, max_basis: Optional[int], what: str) -> None:
    cap = config.limits.max_basis if max_basis is None else max_basis
    if count > cap:
        raise ResourceLimitError(f"{what} enumeration exceeds the cap of {cap} elements")


@lru_cache(maxsize=None)
def _trees_by_size(n: int, decorations: Tuple[int, ...]) -> Tuple[Tuple[DecoratedTree, ...], ...]:
    by_size: List[Tuple[DecoratedTree, ...]] = [()]
    for k in range(1, n + 1):
        smaller = [t for size in range(1, k) for t in by_size[size]]
        shapes = [
            DecoratedTree(dec, forest.trees)
            for forest in _multisets(smaller, k - 1)
            for dec in decorations
        ]
        by_size.append(tuple(sorted(shapes, key=lambda t: t.key)))
    return tuple(by_size)


def _multisets(trees: Sequence[DecoratedTree], total: int, start: int = 0) -> Iterator[DecoratedForest]:
    """Forests of exact size `total` built from trees[start:] with non-decreasing index"""
    if total == 0:
        yield UNIT
        return
    for idx in range(start, len(trees)):
        head = trees[idx]
        if head.size > total:
            continue
        for rest in _multisets(trees, total - head.size, idx):
            yield DecoratedForest((head,) + rest.trees)


def enumerate_trees(
    n: int, d: int, decorations: Optional[Sequence[int]] = None, max_basis: Optional[int] = None
) -> List[DecoratedTree]:
    """All decorated trees with at most n nodes, in canonical order"""
    if n < 1 or d < 1:
        raise ValueError(f"enumerate_trees needs n >= 1 and d >= 1, got n={n}, d={d}")
    decs = tuple(decorations) if decorations is not None else tuple(range(1, d + 1))
    by_size = _trees_by_size(n, decs)
    result = [t for size in range(1, n + 1) for t in by_size[size]]
    _check_count(len(result), max_basis, "tree")
    logger.debug(f"Enumerated {len(result)} trees with <= {n} nodes over {len(decs)} decorations")
    return result


def enumerate_forests(
    n: int, decorations: Sequence[int], max_basis: Optional[int] = None
) -> List[DecoratedForest]:
    """All forests with at most n nodes including the unit, in canonical order"""
    trees = sorted(
        (t for size in _trees_by_size(n, tuple(decorations))[1:] for t in size),
        key=lambda t: t.key,
    )
    forests = [f for total in range(0, n + 1) for f in _multisets(trees, total)]
    _check_count(len(forests), max_basis, "forest")
    return sorted(forests, key=lambda f: f.key)


def _embeds(flat: FlatTree, at: int, tau: DecoratedTree) -> bool:
    if flat.decorations[at] != tau.decoration:
        return False
    return _assign(flat, list(flat.children[at]), list(tau.children))


def _assign(flat: FlatTree, available: List[int], wanted: List[DecoratedTree]) -> bool:
    if not wanted:
        return True
    head, rest = wanted[0], wanted[1:]
    for pos, candidate in enumerate(available):
        if _embeds(flat, candidate, head) and _assign(
            flat, available[:pos] + available[pos + 1:], rest
        ):
            return True
    return False


def contains(sigma: DecoratedTree, tau: DecoratedTree) -> bool:
    """True iff some connected subtree of sigma is isomorphic to tau"""
    if tau.size > sigma.size:
        return False
    flat = FlatTree(sigma)
    return any(_embeds(flat, at, tau) for at in range(len(flat)))


def connected_subsets(flat: FlatTree, max_size: Optional[int] = None) -> List[FrozenSet[int]]:
    """All node sets of `flat` spanning a subtree"""
    nodes = range(len(flat))
    limit = len(flat) if max_size is None else max_size
    return [
        frozenset(subset)
        for size in range(1, limit + 1)
        for subset in combinations(nodes, size)
        if flat.is_connected(subset)
    ]
