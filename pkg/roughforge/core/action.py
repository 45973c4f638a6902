"""
Hölder families acting on branched rough paths

A branched path X over forests is encoded as an anisotropic geometric path
X̄ over the alphabet of trees (exponent γ|τ| per tree) with
⟨X, f⟩ = ⟨X̄, ψ(f)⟩. Translating the letter paths x^τ by a family g and
pulling the new lift back through ψ defines gX.

Encoding, solving and the BCFP comparison share one recursion over tree
size: for trees of size k, H_st = ⟨X_st, w_τ⟩ − ⟨Ȳ_st, ψ(τ) − τ⟩ with Ȳ
the lift over trees of size < k; δH must vanish and y^τ_t = H_{0t}.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..config.settings import config
from . import kernels
from .construct import (
    ConstructionSettings,
    DyadicGroupPath,
    HolderReport,
    SampledPath,
    build_anisotropic,
    holder_report,
)
from .dual import FLOAT, DualElement, TruncatedAlgebra, is_character
from .errors import (
    BasisMismatchError,
    BoundCheckError,
    ConfigurationMismatchError,
    DeltaCheckError,
    DepthMismatchError,
    PreconditionError,
    ResourceLimitError,
    ScalarModeError,
    TimeDependentCharacterError,
)
from .forests import FlatTree, DecoratedForest, DecoratedTree, UNIT, as_forest, connected_subsets, parse_tree
from .hairer_kelly import psi, psi_minus_top
from .shuffle import Alphabet

logger = logging.getLogger(__name__)

ExtractionTensor = Dict[Tuple[DecoratedForest, DecoratedForest], Fraction]


@dataclass
class HolderFamily:
    """Functions g^τ on the dyadic grid, one row per tree, with g^τ_0 = 0"""

    depth: int
    trees: List[DecoratedTree]
    values: np.ndarray

    def __post_init__(self) -> None:
        points = 2**self.depth + 1
        values = np.asarray(self.values, dtype=np.float64)
        if values.size == 0:
            values = np.zeros((len(self.trees), points))
        if values.ndim != 2 or values.shape[0] != len(self.trees) or values.shape[1] != points:
            raise DepthMismatchError(
                f"family values have shape {values.shape}, expected ({len(self.trees)}, {points})"
            )
        self.values = values
        if len(set(self.trees)) != len(self.trees):
            raise PreconditionError("family lists a tree twice", "family_trees")
        if self.values.size and np.any(self.values[:, 0] != 0.0):
            raise PreconditionError("every g^tau must vanish at time 0", "family_origin")

    @classmethod
    def zeros(cls, trees: Sequence[DecoratedTree], depth: int) -> "HolderFamily":
        return cls(depth, list(trees), np.zeros((len(trees), 2**depth + 1)))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Sequence[float]], depth: int) -> "HolderFamily":
        trees = [parse_tree(key) for key in data]
        return cls(depth, trees, np.array([list(v) for v in data.values()], dtype=np.float64))

    def to_dict(self) -> Dict[str, List[float]]:
        return {str(t): [float(x) for x in row] for t, row in zip(self.trees, self.values)}

    def get(self, tree: DecoratedTree) -> np.ndarray:
        if tree in self.trees:
            return self.values[self.trees.index(tree)]
        return np.zeros(2**self.depth + 1)

    def aligned(self, trees: Sequence[DecoratedTree]) -> np.ndarray:
        """Rows for `trees` in that order, zero for absent trees"""
        unknown = set(self.trees) - set(trees)
        if unknown:
            raise BasisMismatchError(f"family has trees outside the basis: {sorted(map(str, unknown))}")
        return np.array([self.get(t) for t in trees]).reshape(len(trees), 2**self.depth + 1)

    def _combine(self, other: "HolderFamily", sign: float) -> "HolderFamily":
        if other.depth != self.depth:
            raise DepthMismatchError(f"cannot combine families of depth {self.depth} and {other.depth}")
        trees = list(self.trees) + [t for t in other.trees if t not in self.trees]
        values = np.array([self.get(t) + sign * other.get(t) for t in trees])
        return HolderFamily(self.depth, trees, values.reshape(len(trees), 2**self.depth + 1))

    def __add__(self, other: "HolderFamily") -> "HolderFamily":
        return self._combine(other, 1.0)

    def __sub__(self, other: "HolderFamily") -> "HolderFamily":
        return self._combine(other, -1.0)

    def sup_distance(self, other: "HolderFamily") -> Dict[str, float]:
        """Per-tree sup norm of the difference"""
        diff = self - other
        return {str(t): float(np.max(np.abs(row), initial=0.0)) for t, row in zip(diff.trees, diff.values)}


@dataclass
class Encoding:
    """An anisotropic lift over trees together with its letter paths"""

    rp: DyadicGroupPath
    trees: List[DecoratedTree]
    paths: SampledPath
    residuals: Dict[str, float]

    def family(self) -> HolderFamily:
        return HolderFamily(self.paths.depth, list(self.trees), self.paths.values.copy())

    def path_of(self, tree: DecoratedTree) -> np.ndarray:
        return self.paths.values[self.trees.index(tree)]


def tree_alphabet(algebra: TruncatedAlgebra, gamma: Fraction, max_size: Optional[int] = None) -> Alphabet:
    """Trees of the forest basis with weights γ|τ|, in canonical order"""
    trees = [
        f.trees[0]
        for f in algebra.basis.elements
        if len(f.trees) == 1 and (max_size is None or f.size <= max_size)
    ]
    return Alphabet.of_trees(trees, gamma)


def _require_branched(path: DyadicGroupPath) -> None:
    if path.algebra.basis.kind != "bck":
        raise BasisMismatchError("the action is defined on paths over forests")
    if path.mode != FLOAT:
        raise ScalarModeError("the action runs in float mode")
    if path.gamma * path.algebra.max_level > 1:
        raise PreconditionError(
            f"truncation {path.algebra.max_level} exceeds floor(1/gamma) for gamma={path.gamma}",
            "truncation_level",
        )


def _require_zero_decoration(path: DyadicGroupPath) -> None:
    if 0 not in path.algebra.basis.decorations:  # type: ignore[attr-defined]
        raise PreconditionError("the path must carry the reserved decoration 0", "decoration_zero")


def _check_settings(path: DyadicGroupPath, settings: Optional[ConstructionSettings]) -> None:
    if settings is not None and settings != path.settings:
        raise ConfigurationMismatchError(
            f"path was built with {path.settings.to_dict()}, got {settings.to_dict()}"
        )


def _term_weights(algebra: TruncatedAlgebra, functionals: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Coproduct terms that touch the functionals, with coef·w[out] per functional"""
    weights = algebra.coef_float[:, None] * functionals[algebra.out]
    keep = np.any(weights != 0.0, axis=1)
    return (
        np.ascontiguousarray(algebra.left[keep]),
        np.ascontiguousarray(algebra.right[keep]),
        np.ascontiguousarray(weights[keep]),
    )


def _size_recursion(
    path: DyadicGroupPath,
    functionals: Mapping[DecoratedTree, np.ndarray],
    tol: Optional[float] = None,
) -> Encoding:
    """
    Letter paths y^τ with ⟨X_st, w_τ⟩ = ⟨Ȳ_st, ψ(τ)⟩, built by increasing tree size.

    Args:
        path: branched path in float mode
        functionals: per tree, a vector on the forest basis of `path`
        tol: sup-norm tolerance on δH; defaults to the configured delta tolerance

    Raises:
        DeltaCheckError: if some H is not the increment of a one-variable path
    """
    tol = config.tolerances.delta_tol if tol is None else tol
    algebra = path.algebra
    alphabet = tree_alphabet(algebra, path.gamma)
    states_a, inverses_a = path.float_states(), path.float_inverses()
    values: Dict[DecoratedTree, np.ndarray] = {}
    residuals: Dict[str, float] = {}
    lift: Optional[DyadicGroupPath] = None

    for k in range(1, algebra.max_level + 1):
        group = [t for t in alphabet.letters if t.size == k]
        if not group:
            continue
        left_a, right_a, weights_a = _term_weights(
            algebra, np.stack([functionals[t] for t in group], axis=1)
        )
        if lift is None:
            states_b = np.zeros((path.points, 1))
            inverses_b = states_b
            left_b = right_b = np.zeros(0, dtype=np.int64)
            weights_b = np.zeros((0, len(group)))
        else:
            lower = lift.algebra
            corrections = np.zeros((lower.size, len(group)))
            for column, tree in enumerate(group):
                for word, coef in psi_minus_top(tree).items():
                    corrections[lower.basis.index[word], column] += float(coef)
            states_b, inverses_b = lift.float_states(), lift.float_inverses()
            left_b, right_b, weights_b = _term_weights(lower, corrections)
        base, residual = kernels.delta_residuals(
            states_a, inverses_a, left_a, right_a, weights_a,
            states_b, inverses_b, left_b, right_b, weights_b,
            1,
        )
        for column, tree in enumerate(group):
            residuals[str(tree)] = float(residual[column])
            if residual[column] > tol:
                raise DeltaCheckError(
                    f"increment check failed for {tree}: residual {residual[column]:.3e} > {tol:.1e}"
                )
            values[tree] = base[:, column].copy()
        sub_alphabet = tree_alphabet(algebra, path.gamma, k)
        letters = SampledPath(path.depth, np.array([values[t] for t in sub_alphabet.letters]))
        lift = build_anisotropic(letters, path.settings, FLOAT, sub_alphabet)
        logger.debug(f"Letter paths for {len(group)} trees of size {k}, max residual {residual.max():.2e}")

    assert lift is not None
    trees = list(alphabet.letters)
    return Encoding(lift, trees, SampledPath(path.depth, np.array([values[t] for t in trees])), residuals)


def _unit_functionals(algebra: TruncatedAlgebra, trees: Iterable[DecoratedTree]) -> Dict[DecoratedTree, np.ndarray]:
    result = {}
    for tree in trees:
        w = np.zeros(algebra.size)
        w[algebra.basis.index[as_forest(tree)]] = 1.0
        result[tree] = w
    return result


def encode(path: DyadicGroupPath, settings: Optional[ConstructionSettings] = None) -> Encoding:
    """Anisotropic geometric path over trees with ⟨X_st, f⟩ = ⟨X̄_st, ψ(f)⟩"""
    _require_branched(path)
    _check_settings(path, settings)
    trees = tree_alphabet(path.algebra, path.gamma).letters
    encoding = _size_recursion(path, _unit_functionals(path.algebra, trees))
    logger.info(f"Encoded a branched path over {len(trees)} trees")
    return encoding


def pullback_matrix(forests: TruncatedAlgebra, words: TruncatedAlgebra) -> np.ndarray:
    """P[f, w] = coefficient of the word w in ψ(f)"""
    cache = forests.__dict__.setdefault("_pullbacks", {})
    key = words.signature
    if key not in cache:
        matrix = np.zeros((forests.size, words.size))
        for i, forest in enumerate(forests.basis.elements):
            for word, coef in psi(forest).items():
                if word not in words.basis.index:
                    raise BasisMismatchError(f"word of psi({forest}) is outside the lift basis")
                matrix[i, words.basis.index[word]] += float(coef)
        cache[key] = matrix
    return cache[key]


def act(
    g: HolderFamily, path: DyadicGroupPath, settings: Optional[ConstructionSettings] = None
) -> DyadicGroupPath:
    """gX: translate the letter paths of X̄ by g, lift again and pull back through ψ"""
    _require_branched(path)
    if g.depth != path.depth:
        raise DepthMismatchError(f"family depth {g.depth} differs from path depth {path.depth}")
    encoding = encode(path, settings)
    shifted = SampledPath(path.depth, encoding.paths.values + g.aligned(encoding.trees))
    alphabet = encoding.rp.algebra.basis.alphabet  # type: ignore[attr-defined]
    lifted = build_anisotropic(shifted, path.settings, FLOAT, alphabet)
    matrix = pullback_matrix(path.algebra, lifted.algebra)
    states = path.states + matrix @ (lifted.states - encoding.rp.states)
    logger.info(f"Applied a family of {len(g.trees)} functions at depth {path.depth}")
    return DyadicGroupPath(path.algebra, path.depth, states, path.level, path.gamma, path.settings)


def _check_pair(path: DyadicGroupPath, target: DyadicGroupPath) -> None:
    _require_branched(path)
    _require_branched(target)
    if not path.algebra.same_as(target.algebra):
        raise BasisMismatchError("paths live on different forest bases")
    if path.depth != target.depth:
        raise DepthMismatchError(f"depths {path.depth} and {target.depth} differ")
    if path.gamma != target.gamma:
        raise PreconditionError(f"gamma {path.gamma} differs from {target.gamma}", "same_gamma")
    if path.settings != target.settings:
        raise ConfigurationMismatchError("paths were built with different construction settings")


def solve_translation(
    path: DyadicGroupPath, target: DyadicGroupPath, settings: Optional[ConstructionSettings] = None
) -> HolderFamily:
    """The family g with g^τ_0 = 0 and act(g, path) = target

    Running the size recursion on the target with the lift of x^σ + g^σ for
    smaller trees is the same as encoding the target, so g = x′ − x.
    """
    _check_pair(path, target)
    _check_settings(path, settings)
    g = encode(target).family() - encode(path).family()
    logger.info(f"Solved for a translation over {len(g.trees)} trees")
    return g


# ---------------------------------------------------------------- BCFP translation


def _disjoint_families(subsets: Sequence[frozenset], start: int = 0, used: frozenset = frozenset()) -> List[List[frozenset]]:
    result: List[List[frozenset]] = [[]]
    for index in range(start, len(subsets)):
        part = subsets[index]
        if part & used:
            continue
        for rest in _disjoint_families(subsets, index + 1, used | part):
            result.append([part] + rest)
    return result


def _tree_extraction(tree: DecoratedTree) -> ExtractionTensor:
    flat = FlatTree(tree)
    out: Dict[Tuple[DecoratedForest, DecoratedForest], Fraction] = defaultdict(Fraction)
    parts = [p for p in connected_subsets(flat) if all(flat.decorations[x] != 0 for x in p)]
    for family in _disjoint_families(parts):
        extracted = DecoratedForest(tuple(flat.induced(part).trees[0] for part in family))
        contracted = as_forest(flat.contract(family, marker=0))
        out[(extracted, contracted)] += 1
    return dict(out)


def bcfp_extraction(tau: Union[DecoratedForest, DecoratedTree]) -> ExtractionTensor:
    """
    Ψ: every family of pairwise disjoint 0-free subtrees is extracted to the
    left and each member is contracted to a node decorated 0 on the right.
    Multiplicative on forests.
    """
    forest = as_forest(tau)
    cap = config.limits.max_bcfp_nodes
    if any(t.size > cap for t in forest.trees):
        raise ResourceLimitError(f"extraction is capped at trees with {cap} nodes", "bcfp_nodes")
    result: ExtractionTensor = {(UNIT, UNIT): Fraction(1)}
    for tree in forest.trees:
        nxt: Dict[Tuple[DecoratedForest, DecoratedForest], Fraction] = defaultdict(Fraction)
        for (a, b), c in result.items():
            for (x, y), d in _tree_extraction(tree).items():
                nxt[(a * x, b * y)] += c * d
        result = dict(nxt)
    return {k: v for k, v in result.items() if v != 0}


def constant_character(algebra: TruncatedAlgebra, tree_values: Mapping[str, float]) -> DualElement:
    """The character with the given tree values (zero on every other tree)"""
    values = {parse_tree(k): float(v) for k, v in tree_values.items()}
    coeffs = np.zeros(algebra.size)
    for i, forest in enumerate(algebra.basis.elements):
        product = 1.0
        for tree in forest.trees:
            product *= values.get(tree, 0.0)
        coeffs[i] = product
    return DualElement(algebra, coeffs, "character")


def _constant(v: DualElement) -> DualElement:
    coeffs = np.asarray(v.coeffs)
    if coeffs.ndim > 1:
        if coeffs.shape[1] > 1 and np.any(coeffs != coeffs[:, :1]):
            raise TimeDependentCharacterError("v must be a constant character, got a time-dependent one")
        v = DualElement(v.algebra, coeffs[:, 0].copy(), v.kind)
    if v.algebra.basis.kind != "bck":
        raise BasisMismatchError("v must be a functional on forests")
    if not is_character(v):
        raise PreconditionError("v must be a character", "v_character")
    basis = v.algebra.basis
    for i, c in enumerate(v.coeffs):
        if c != 0 and not basis.is_zero_free(i):  # type: ignore[attr-defined]
            raise PreconditionError(f"v is nonzero on {basis.key(i)}, which uses decoration 0", "v_zero_free")
    return v


def _evaluate(v: DualElement, forest: DecoratedForest) -> float:
    if any(d == 0 for t in forest.trees for d in t.decorations()):
        return 0.0
    index = v.algebra.basis.index.get(forest)  # type: ignore[attr-defined]
    if index is None:
        raise BasisMismatchError(f"v is not defined on {forest}")
    return float(v.coeffs[index])


def extraction_matrix(algebra: TruncatedAlgebra, v: DualElement) -> np.ndarray:
    """E[τ, σ] = Σ over Ψ(τ) terms (F, σ) of c·v(F)"""
    v = _constant(v)
    matrix = np.zeros((algebra.size, algebra.size))
    for i, forest in enumerate(algebra.basis.elements):
        for (left, right), c in bcfp_extraction(forest).items():
            value = _evaluate(v, left)
            if value:
                matrix[i, algebra.basis.index[right]] += float(c) * value
    return matrix


def zero_count(forest: DecoratedForest) -> int:
    return sum(1 for t in forest.trees for d in t.decorations() if d == 0)


def bcfp_bound_report(path: DyadicGroupPath) -> HolderReport:
    """Hölder report with exponents (1 − γ)|τ|_0 + γ|τ|"""
    gamma = float(path.gamma)
    exponents = np.array(
        [(1 - gamma) * zero_count(f) + gamma * f.size for f in path.algebra.basis.elements]
    )
    return holder_report(path, exponents=exponents)


def _check_bound(path: DyadicGroupPath) -> None:
    report = bcfp_bound_report(path)
    cap = config.tolerances.holder_cap
    worst = max(report.constants, default=0.0)
    if not report.finite or worst > cap:
        raise BoundCheckError(f"weighted Hölder constant {worst:.3e} exceeds {cap:.1e}")


def m_v(path: DyadicGroupPath, v: DualElement, check_bound: bool = True) -> DyadicGroupPath:
    """⟨(M_vX)_st, τ⟩ = ⟨X_st, (v⊗id)Ψ(τ)⟩, evaluated on the states"""
    _require_branched(path)
    _require_zero_decoration(path)
    if check_bound:
        _check_bound(path)
    matrix = extraction_matrix(path.algebra, v)
    states = matrix @ path.states
    logger.info(f"Applied a constant character translation on {path.points} states")
    return DyadicGroupPath(path.algebra, path.depth, states, path.level, path.gamma, path.settings)


def bcfp_to_action(path: DyadicGroupPath, v: DualElement, check_bound: bool = True) -> HolderFamily:
    """The family g with act(g, X) = M_vX, from the functionals (v⊗id)Ψ(τ) applied to X"""
    _require_branched(path)
    _require_zero_decoration(path)
    if check_bound:
        _check_bound(path)
    matrix = extraction_matrix(path.algebra, v)
    trees = tree_alphabet(path.algebra, path.gamma).letters
    functionals = {t: matrix[path.algebra.basis.index[as_forest(t)]].copy() for t in trees}
    translated = _size_recursion(path, functionals)
    return translated.family() - encode(path).family()
