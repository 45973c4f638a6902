"""
Unit Tests for the Action of Hölder Families

Tests the encoding of branched paths over trees, the action, the solver
for translations, the BCFP extraction and M_v, and the cross-check between
BCFP translations and the action.
"""

import math

import numpy as np
import pytest

from roughforge.core.action import (
    HolderFamily,
    act,
    bcfp_extraction,
    bcfp_to_action,
    constant_character,
    encode,
    extraction_matrix,
    m_v,
    pullback_matrix,
    solve_translation,
    tree_alphabet,
    zero_count,
)
from roughforge.core.construct import (
    ConstructionSettings,
    SampledPath,
    build_isotropic,
    chen_residual,
)
from roughforge.core.dual import EXACT, DualElement
from roughforge.core.errors import (
    BasisMismatchError,
    ConfigurationMismatchError,
    DepthMismatchError,
    PreconditionError,
    ResourceLimitError,
    ScalarModeError,
    TimeDependentCharacterError,
)
from roughforge.core.forests import UNIT, contains, parse_forest, parse_tree
from roughforge.core.signature import PiecewiseLinearPath, signature_lift

DEPTH = 3


def _path(func, gamma="3/10", with_zero=False, settings=None):
    sampled = SampledPath.from_function(func, DEPTH)
    return build_isotropic(sampled, gamma, with_zero=with_zero, settings=settings)


def _curve(t):
    return (math.sin(2 * t), t * t - 0.5 * t)


def _other(t):
    return (math.cos(3 * t) - 1.0, math.sin(t) + t**3)


def _family(**rows):
    times = np.linspace(0.0, 1.0, 2**DEPTH + 1)
    return HolderFamily.from_mapping({k: [f(t) for t in times] for k, f in rows.items()}, DEPTH)


class TestHolderFamily:
    """Test cases for Hölder families"""

    def test_origin(self):
        """Test g^τ_0 must vanish"""
        with pytest.raises(PreconditionError):
            HolderFamily(1, [parse_tree("[1]")], np.array([[1.0, 0.0, 0.0]]))

    def test_shape(self):
        """Test rows must match the grid"""
        with pytest.raises(DepthMismatchError):
            HolderFamily(2, [parse_tree("[1]")], np.zeros((1, 3)))

    def test_arithmetic(self):
        """Test sums over the union of trees"""
        a = HolderFamily.from_mapping({"[1]": [0.0, 1.0, 2.0]}, 1)
        b = HolderFamily.from_mapping({"[2]": [0.0, 3.0, 3.0]}, 1)
        total = a + b
        assert [str(t) for t in total.trees] == ["[1]", "[2]"]
        assert (total - b).sup_distance(a) == {"[1]": 0.0, "[2]": 0.0}

    def test_aligned_rejects_unknown_trees(self):
        """Test a family over trees outside the basis"""
        family = HolderFamily.from_mapping({"[3]": [0.0, 1.0, 1.0]}, 1)
        with pytest.raises(BasisMismatchError):
            family.aligned([parse_tree("[1]")])


class TestEncoding:
    """Test cases for the encoding over trees"""

    def setup_method(self):
        """Setup test fixtures"""
        self.path = _path(_curve)

    def test_tree_alphabet(self):
        """Test weights γ|τ| over the trees of the basis"""
        alphabet = tree_alphabet(self.path.algebra, self.path.gamma)
        assert len(alphabet.letters) == 20
        assert min(alphabet.weights) == self.path.gamma

    def test_letter_paths_of_single_nodes(self):
        """Test x^{•_i} is the channel path itself"""
        encoding = encode(self.path)
        assert np.allclose(encoding.path_of(parse_tree("[1]")), self.path.values("[1]"))
        assert np.allclose(encoding.path_of(parse_tree("[2]")), self.path.values("[2]"))

    def test_pullback_reproduces_path(self):
        """Test ⟨X, f⟩ = ⟨X̄, ψ(f)⟩ on every forest and grid point"""
        encoding = encode(self.path)
        matrix = pullback_matrix(self.path.algebra, encoding.rp.algebra)
        assert np.allclose(matrix @ encoding.rp.states, self.path.states, atol=1e-10)
        assert max(encoding.residuals.values()) <= 1e-9

    def test_requires_float_forests(self):
        """Test word paths and exact paths are rejected"""
        sampled = SampledPath.from_function(_curve, DEPTH)
        with pytest.raises(BasisMismatchError):
            encode(build_isotropic(sampled, "3/10", algebra="shuffle"))
        with pytest.raises(ScalarModeError):
            encode(build_isotropic(sampled, "3/10", mode=EXACT))

    def test_settings_must_match(self):
        """Test a different construction setting is refused"""
        other = ConstructionSettings.create(split_weight="1/3")
        with pytest.raises(ConfigurationMismatchError):
            encode(self.path, other)


class TestAction:
    """Test cases for gX"""

    def setup_method(self):
        """Setup test fixtures"""
        self.path = _path(_curve)
        self.g1 = _family(**{"[1]": lambda t: 0.3 * math.sin(t), "[1[2]]": lambda t: 0.2 * t})
        self.g2 = _family(**{"[2]": lambda t: t * t, "[1[2]]": lambda t: -0.1 * t, "[2[1[1]]]": lambda t: t})

    def test_zero_family(self):
        """Test 0X = X"""
        zero = HolderFamily.zeros([parse_tree("[1]")], DEPTH)
        assert np.allclose(act(zero, self.path).states, self.path.states, atol=1e-12)

    def test_level_one_translation(self):
        """Test ⟨gX, •_1⟩ = x^1 + g^{•_1}"""
        moved = act(self.g1, self.path)
        assert np.allclose(moved.values("[1]"), self.path.values("[1]") + self.g1.get(parse_tree("[1]")))
        assert np.allclose(moved.values("[2]"), self.path.values("[2]"))

    def test_tree_translation(self):
        """Test ⟨(gX)_0t, [1[2]]⟩ moves by g^{[1[2]]}_t when only that tree is translated"""
        g = _family(**{"[1[2]]": lambda t: 0.5 * t})
        moved = act(g, self.path)
        assert np.allclose(moved.values("[1[2]]") - self.path.values("[1[2]]"), 0.5 * moved.times)

    def test_result_is_a_rough_path(self):
        """Test Chen's relation for gX"""
        moved = act(self.g2, self.path)
        assert chen_residual(moved) <= 1e-10

    def test_composition(self):
        """Test g2(g1X) = (g1 + g2)X"""
        twice = act(self.g2, act(self.g1, self.path))
        once = act(self.g1 + self.g2, self.path)
        assert np.allclose(twice.states, once.states, atol=1e-9)

    @pytest.mark.parametrize("tree", ["[1]", "[1[2]]", "[2[1][1]]", "[1[2[1]]]"])
    def test_locality(self, tree):
        """Test translating τ leaves every forest without a copy of τ unchanged"""
        tau = parse_tree(tree)
        moved = act(_family(**{tree: lambda t: 0.7 * t - 0.2 * t * t}), self.path)
        basis = self.path.algebra.basis
        untouched = [
            i for i, forest in enumerate(basis.elements) if not any(contains(s, tau) for s in forest.trees)
        ]
        assert untouched
        assert np.allclose(moved.states[untouched], self.path.states[untouched], rtol=0.0, atol=1e-12)

    @pytest.mark.slow
    def test_composition_on_a_fine_grid(self):
        """Test g2(g1X) = (g1 + g2)X for random families at depth 8"""
        depth = 8
        path = build_isotropic(SampledPath.from_function(_curve, depth), "3/10")
        trees = [f.trees[0] for f in path.algebra.basis.elements if len(f.trees) == 1]
        times = np.linspace(0.0, 1.0, 2**depth + 1)
        rng = np.random.default_rng(5)

        def random_family():
            a, b, c = (rng.uniform(-1.0, 1.0, (len(trees), 1)) for _ in range(3))
            return HolderFamily(depth, trees, a * (np.sin(3 * b * times + c) - np.sin(c)))

        for _ in range(4):
            g1, g2 = random_family(), random_family()
            twice = act(g2, act(g1, path))
            once = act(g1 + g2, path)
            assert np.allclose(twice.states, once.states, rtol=0.0, atol=1e-9)

    def test_depth_mismatch(self):
        """Test the family must live on the path grid"""
        with pytest.raises(DepthMismatchError):
            act(HolderFamily.zeros([parse_tree("[1]")], DEPTH + 1), self.path)

    def test_truncation_above_inverse_gamma(self):
        """Test paths truncated past floor(1/γ) are refused"""
        sampled = SampledPath.from_function(_curve, DEPTH)
        deep = build_isotropic(sampled, "2/5", n=3)
        with pytest.raises(PreconditionError):
            act(HolderFamily.zeros([], DEPTH), deep)


class TestSolve:
    """Test cases for the translation solver"""

    def setup_method(self):
        """Setup test fixtures"""
        self.path = _path(_curve)
        self.target = _path(_other)

    def test_round_trip(self):
        """Test act(solve(X, Y), X) = Y"""
        g = solve_translation(self.path, self.target)
        assert np.allclose(act(g, self.path).states, self.target.states, atol=1e-8)

    def test_recovers_family(self):
        """Test solve(X, gX) = g on the trees of the basis"""
        g = _family(**{"[2]": lambda t: 0.4 * t, "[1[1]]": lambda t: math.sin(t), "[2[1][2]]": lambda t: t * t})
        found = solve_translation(self.path, act(g, self.path))
        assert max(found.sup_distance(g).values()) <= 1e-8

    def test_self(self):
        """Test solve(X, X) = 0"""
        found = solve_translation(self.path, self.path)
        assert np.allclose(found.values, 0.0, atol=1e-12)

    def test_independent_lifts_share_level_one(self):
        """Test two lifts of one path differ only above the single nodes"""
        depth = 5
        pl = PiecewiseLinearPath(
            (0.0, 0.3, 0.55, 1.0), np.array([[0.0, 1.0, -0.5, 0.25], [0.0, 0.4, 0.9, -1.0]])
        )
        constructed = build_isotropic(pl.sample(depth), "3/10")
        signature = signature_lift(pl, depth, constructed.algebra, "3/10")
        found = solve_translation(constructed, signature)
        assert np.allclose(found.get(parse_tree("[1]")), 0.0, atol=1e-12)
        assert np.allclose(found.get(parse_tree("[2]")), 0.0, atol=1e-12)
        assert np.allclose(act(found, constructed).states, signature.states, atol=1e-8)

    def test_mismatches(self):
        """Test depth, γ and construction settings must agree"""
        sampled = SampledPath.from_function(_other, DEPTH + 1)
        with pytest.raises(DepthMismatchError):
            solve_translation(self.path, build_isotropic(sampled, "3/10"))
        with pytest.raises(BasisMismatchError):
            solve_translation(self.path, _path(_other, gamma="2/5"))
        settings = ConstructionSettings.create(split_weight="1/4")
        with pytest.raises(ConfigurationMismatchError):
            solve_translation(self.path, _path(_other, settings=settings))


class TestExtraction:
    """Test cases for the BCFP extraction map"""

    def test_single_node(self):
        """Test Ψ(•_i) = 1⊗•_i + •_i⊗•_0"""
        assert bcfp_extraction(parse_tree("[1]")) == {
            (UNIT, parse_forest("[1]")): 1,
            (parse_forest("[1]"), parse_forest("[0]")): 1,
        }

    def test_cherry(self):
        """
        Test the thirteen terms of Ψ(V_123).

        Every family of disjoint connected subtrees is extracted, the family of
        all singletons included: •1•2•3 ⊗ V_000 is needed for M_vX to satisfy
        Chen's relation (see test_translation_is_a_rough_path).
        """
        result = bcfp_extraction(parse_tree("[1[2][3]]"))
        assert len(result) == 13
        assert result[(UNIT, parse_forest("[1[2][3]]"))] == 1
        assert result[(parse_forest("[1[2][3]]"), parse_forest("[0]"))] == 1
        assert result[(parse_forest("[1[2]][3]"), parse_forest("[0[0]]"))] == 1
        assert result[(parse_forest("[1][2][3]"), parse_forest("[0[0][0]]"))] == 1
        assert result[(parse_forest("[2][3]"), parse_forest("[1[0][0]]"))] == 1

    def test_zero_nodes_stay(self):
        """Test nodes decorated 0 are never extracted"""
        result = bcfp_extraction(parse_tree("[0[1]]"))
        assert result == {
            (UNIT, parse_forest("[0[1]]")): 1,
            (parse_forest("[1]"), parse_forest("[0[0]]")): 1,
        }

    def test_multiplicative(self):
        """Test Ψ on a forest multiplies the tree expansions"""
        assert len(bcfp_extraction(parse_forest("[1][2]"))) == 4

    def test_size_cap(self):
        """Test the node cap on extraction"""
        with pytest.raises(ResourceLimitError):
            bcfp_extraction(parse_tree("[1[1[1[1[1[1]]]]]]"))

    def test_zero_count(self):
        """Test |τ|_0"""
        assert zero_count(parse_forest("[0[1][0]][0]")) == 3


class TestBCFP:
    """Test cases for M_v and its Hölder family"""

    def setup_method(self):
        """Setup test fixtures"""
        self.path = _path(lambda t: (t, math.sin(3 * t)), with_zero=True)
        self.algebra = self.path.algebra

    def test_unit_character_is_identity(self):
        """Test M_ε X = X"""
        unit = constant_character(self.algebra, {})
        assert np.allclose(extraction_matrix(self.algebra, unit), np.eye(self.algebra.size))
        assert np.allclose(m_v(self.path, unit).states, self.path.states)

    def test_single_node(self):
        """Test ⟨M_vX, •_1⟩ = x^1 + c·x^0 for v(•_1) = c"""
        c = 0.75
        v = constant_character(self.algebra, {"[1]": c})
        moved = m_v(self.path, v)
        assert np.allclose(moved.values("[1]"), self.path.values("[1]") + c * self.path.values("[0]"))
        family = bcfp_to_action(self.path, v)
        expected = c * (self.path.values("[0]") - self.path.values("[0]")[0])
        assert np.allclose(family.get(parse_tree("[1]")), expected, atol=1e-12)

    def test_translation_is_a_rough_path(self):
        """Test Chen's relation for M_vX"""
        v = constant_character(self.algebra, {"[1]": 0.5, "[1[1]]": -0.25, "[1[1][1]]": 0.3})
        assert chen_residual(m_v(self.path, v)) <= 1e-10

    def test_action_cross_check(self):
        """Test act(bcfp_to_action(X, v), X) = M_vX"""
        v = constant_character(self.algebra, {"[1]": 0.5, "[1[1]]": -0.25, "[1[1][1]]": 0.1})
        family = bcfp_to_action(self.path, v)
        assert np.allclose(act(family, self.path).states, m_v(self.path, v).states, atol=1e-8)
        solved = solve_translation(self.path, m_v(self.path, v))
        assert max(solved.sup_distance(family).values()) <= 1e-8

    def test_time_dependent_character(self):
        """Test v must not change along the grid"""
        a = constant_character(self.algebra, {"[1]": 1.0})
        b = constant_character(self.algebra, {"[1]": 2.0})
        moving = DualElement(self.algebra, np.stack([a.coeffs, b.coeffs], axis=1), "character")
        with pytest.raises(TimeDependentCharacterError):
            m_v(self.path, moving)

    def test_v_on_zero_decoration(self):
        """Test v must vanish on forests containing decoration 0"""
        v = constant_character(self.algebra, {"[0]": 1.0})
        with pytest.raises(PreconditionError):
            m_v(self.path, v)

    def test_v_must_be_character(self):
        """Test a non-multiplicative v is refused"""
        v = constant_character(self.algebra, {"[1]": 1.0})
        v.coeffs[self.algebra.basis.lookup("[1][1]")] = 5.0
        with pytest.raises(PreconditionError):
            m_v(self.path, v)

    def test_needs_zero_decoration(self):
        """Test the path must carry decoration 0"""
        path = _path(_curve)
        v = constant_character(path.algebra, {"[1]": 1.0})
        with pytest.raises(PreconditionError):
            m_v(path, v)
