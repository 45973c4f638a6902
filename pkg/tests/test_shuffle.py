"""
Unit Tests for the Shuffle Hopf algebra

Tests shuffles, deconcatenation, the antipode, the weight-bounded word set
and the word basis.
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughforge.core.errors import ExponentLatticeError, ParseError
from roughforge.core.forests import parse_tree
from roughforge.core.shuffle import (
    Alphabet,
    WordBasis,
    anisotropic_basis,
    check_exponent_lattice,
    deconcat_coproduct,
    exponent_lattice_ok,
    shuffle,
    shuffle_combinations,
    word_antipode,
    words_up_to,
)

words = st.lists(st.integers(min_value=1, max_value=3), max_size=3).map(tuple)


class TestShuffle:
    """Test cases for the shuffle product"""

    def test_examples(self):
        """Test unit, letter and ab ⧢ c shuffles"""
        assert shuffle((), (1, 2)) == {(1, 2): 1}
        assert shuffle((1,), (2,)) == {(1, 2): 1, (2, 1): 1}
        assert shuffle((1, 2), (3,)) == {(1, 2, 3): 1, (1, 3, 2): 1, (3, 1, 2): 1}

    def test_multiplicities(self):
        """Test a ⧢ a = 2aa"""
        assert shuffle((1,), (1,)) == {(1, 1): 2}

    @given(words, words)
    @settings(max_examples=60, deadline=None)
    def test_commutative_and_counted(self, u, v):
        """Test commutativity and the binomial number of terms"""
        result = shuffle(u, v)
        assert result == shuffle(v, u)
        assert sum(result.values()) == math.comb(len(u) + len(v), len(u))
        assert all(len(w) == len(u) + len(v) for w in result)

    @given(words, words, words)
    @settings(max_examples=40, deadline=None)
    def test_associative(self, u, v, w):
        """Test (u ⧢ v) ⧢ w = u ⧢ (v ⧢ w)"""
        left = shuffle_combinations(shuffle(u, v), {w: Fraction(1)})
        right = shuffle_combinations({u: Fraction(1)}, shuffle(v, w))
        assert left == right


class TestCoproductAndAntipode:
    """Test cases for deconcatenation and the word antipode"""

    def test_deconcatenation(self):
        """Test Δ̄(a) and Δ̄(ab)"""
        assert deconcat_coproduct((1,)) == {((), (1,)): 1, ((1,), ()): 1}
        assert deconcat_coproduct((1, 2)) == {
            ((), (1, 2)): 1,
            ((1,), (2,)): 1,
            ((1, 2), ()): 1,
        }

    def test_antipode(self):
        """Test S(ab) = ba and S(abc) = −cba"""
        assert word_antipode((1, 2)) == (1, (2, 1))
        assert word_antipode((1, 2, 3)) == (-1, (3, 2, 1))


class TestAnisotropicWords:
    """Test cases for the weight-bounded word set"""

    def setup_method(self):
        """Setup test fixtures"""
        self.alphabet = Alphabet((1, 2), (Fraction(2, 5), Fraction(7, 20)))

    def test_example(self):
        """Test γ = (0.4, 0.35) gives the six words of length at most 2"""
        found = anisotropic_basis(self.alphabet)
        assert found == [(1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]

    def test_equal_weights_give_all_short_words(self):
        """Test equal exponents reduce to words of length ≤ floor(1/γ)"""
        alphabet = Alphabet.integers(2, Fraction(3, 10))
        assert anisotropic_basis(alphabet) == words_up_to(alphabet, 3)

    def test_size_bound(self):
        """Test #𝔏 ≤ (d^{N_a} − 1)/(d − 1)"""
        alphabet = Alphabet((1, 2, 3), (Fraction(2, 5), Fraction(3, 10), Fraction(9, 20)))
        n_a = int(1 / alphabet.min_weight)
        assert len(anisotropic_basis(alphabet)) <= (3 ** (n_a + 1) - 1) // 2

    def test_subcoalgebra(self):
        """Test both deconcatenation factors of a word in 𝔏 stay in 𝔏 ∪ {1}"""
        found = set(anisotropic_basis(self.alphabet)) | {()}
        for word in found:
            for left, right in deconcat_coproduct(word):
                assert left in found and right in found

    @given(words, words)
    @settings(max_examples=40, deadline=None)
    def test_omega_additive(self, u, v):
        """Test ω(uv) = ω(u) + ω(v)"""
        alphabet = Alphabet.integers(3, [Fraction(2, 5), Fraction(3, 10), Fraction(9, 20)])
        assert alphabet.omega(u + v) == alphabet.omega(u) + alphabet.omega(v)

    def test_exponent_lattice(self):
        """Test exact detection of 1 ∈ Σ γ_a ℕ"""
        assert exponent_lattice_ok([Fraction(2, 5), Fraction(7, 20)])
        assert not exponent_lattice_ok([Fraction(2, 5), Fraction(1, 5)])
        assert not exponent_lattice_ok([Fraction(1, 2)])
        with pytest.raises(ExponentLatticeError):
            check_exponent_lattice([Fraction(3, 10), Fraction(2, 5)])

    def test_invalid_weights(self):
        """Test weights outside (0,1) are rejected"""
        with pytest.raises(ValueError):
            Alphabet((1,), (Fraction(1),))


class TestWordBasis:
    """Test cases for the truncated word basis"""

    def test_isotropic_basis(self):
        """Test words of length at most 2 over two letters"""
        basis = WordBasis(Alphabet.integers(2, Fraction(2, 5)), 2)
        assert len(basis) == 7
        assert basis.key(0) == ""
        assert basis.lookup("1.2") == basis.index[(1, 2)]
        assert basis.describe()["algebra"] == "shuffle"

    def test_anisotropic_grades(self):
        """Test grades are ω(v) and levels are lengths"""
        basis = WordBasis(Alphabet((1, 2), (Fraction(2, 5), Fraction(7, 20))))
        i = basis.lookup("1.2")
        assert basis.levels[i] == 2
        assert basis.grades[i] == Fraction(3, 4) / Fraction(7, 20)
        assert basis.describe()["algebra"] == "aniso"

    def test_products_respect_truncation(self):
        """Test shuffles leaving the truncation are dropped"""
        basis = WordBasis(Alphabet.integers(1, Fraction(2, 5)), 2)
        a = basis.lookup("1")
        aa = basis.lookup("1.1")
        assert basis.product_terms(a, a) == [(aa, 2)]
        assert basis.product_terms(a, aa) is None

    def test_tree_letters(self):
        """Test words over the alphabet of trees"""
        trees = [parse_tree("[1]"), parse_tree("[1[1]]")]
        alphabet = Alphabet.of_trees(trees, Fraction(2, 5))
        assert alphabet.weights == (Fraction(2, 5), Fraction(4, 5))
        assert alphabet.parse_word("[1].[1[1]]") == (trees[0], trees[1])
        with pytest.raises(ParseError):
            alphabet.parse_word("[2]")
