"""
Shuffle Hopf algebra over an abstract alphabet

Letters are opaque ordered identifiers: integers for the path alphabet
{1..d}, canonical trees for the alphabet of trees. Weights are exact
rationals so that membership in the anisotropic word set never depends
on rounding.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from ..config.settings import config
from .errors import ExponentLatticeError, ParseError, ResourceLimitError
from .forests import DecoratedTree, parse_tree

logger = logging.getLogger(__name__)

Letter = Hashable
Word = Tuple[Letter, ...]
WordTensor = Dict[Tuple[Word, ...], Fraction]
EMPTY: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """Ordered letters with per-letter Hölder exponents in (0,1)"""

    letters: Tuple[Letter, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.letters) != len(self.weights):
            raise ValueError("one weight per letter is required")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("letters must be distinct")
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        for w in self.weights:
            if not 0 < w < 1:
                raise ValueError(f"letter weights must lie in (0,1), got {w}")
        object.__setattr__(self, "_positions", {a: i for i, a in enumerate(self.letters)})
        object.__setattr__(self, "_table", dict(zip(self.letters, self.weights)))

    @classmethod
    def integers(cls, d: int, gamma: "Fraction | Sequence[Fraction]") -> "Alphabet":
        weights = list(gamma) if isinstance(gamma, (list, tuple)) else [gamma] * d
        return cls(tuple(range(1, d + 1)), tuple(Fraction(w) for w in weights))

    @classmethod
    def of_trees(cls, trees: Iterable[DecoratedTree], gamma: Fraction) -> "Alphabet":
        """Alphabet of trees with γ_τ = γ|τ|, in canonical tree order"""
        ordered = sorted(trees, key=lambda t: t.key)
        return cls(tuple(ordered), tuple(Fraction(gamma) * t.size for t in ordered))

    @property
    def min_weight(self) -> Fraction:
        return min(self.weights)

    def position(self, letter: Letter) -> int:
        return self._positions[letter]

    def weight_of(self, word: Word) -> Fraction:
        return sum((self._table[a] for a in word), Fraction(0))

    def omega(self, word: Word) -> Fraction:
        """ω(v) = Σ γ_{v_i} / ĥγ"""
        return self.weight_of(word) / self.min_weight

    def word_key(self, word: Word) -> Tuple[int, Tuple[int, ...]]:
        """Length-lexicographic order under the alphabet order"""
        return (len(word), tuple(self._positions[a] for a in word))

    def restrict(self, letters: Iterable[Letter]) -> "Alphabet":
        keep = set(letters)
        pairs = [(a, w) for a, w in zip(self.letters, self.weights) if a in keep]
        return Alphabet(tuple(a for a, _ in pairs), tuple(w for _, w in pairs))

    def letter_text(self, letter: Letter) -> str:
        return str(letter)

    def format_word(self, word: Word) -> str:
        return ".".join(str(a) for a in word)

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if not text:
            return EMPTY
        parts = [p.strip() for p in text.split(".")]
        tree_letters = any(isinstance(a, DecoratedTree) for a in self.letters)
        try:
            word = tuple(parse_tree(p) if tree_letters else int(p) for p in parts)
        except ValueError as e:
            raise ParseError(f"cannot parse word {text!r}: {e}") from e
        unknown = [a for a in word if a not in self.letters]
        if unknown:
            raise ParseError(f"letters {unknown} of {text!r} are not in the alphabet")
        return word


@lru_cache(maxsize=None)
def _shuffle(u: Word, v: Word) -> Tuple[Tuple[Word, int], ...]:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    out: Dict[Word, int] = defaultdict(int)
    for w, c in _shuffle(u[1:], v):
        out[(u[0],) + w] += c
    for w, c in _shuffle(u, v[1:]):
        out[(v[0],) + w] += c
    return tuple(out.items())


def shuffle(u: Word, v: Word) -> Dict[Word, Fraction]:
    """(au ⧢ bv) = a(u ⧢ bv) + b(au ⧢ v)"""
    return {w: Fraction(c) for w, c in _shuffle(tuple(u), tuple(v))}


def shuffle_combinations(x: Dict[Word, Fraction], y: Dict[Word, Fraction]) -> Dict[Word, Fraction]:
    out: Dict[Word, Fraction] = defaultdict(Fraction)
    for u, cu in x.items():
        for v, cv in y.items():
            for w, c in _shuffle(u, v):
                out[w] += cu * cv * c
    return {w: c for w, c in out.items() if c != 0}


def deconcat_coproduct(v: Word) -> WordTensor:
    """Δ̄(a1…an) = Σ_k a1…ak ⊗ a_{k+1}…an"""
    v = tuple(v)
    return {(v[:k], v[k:]): Fraction(1) for k in range(len(v) + 1)}


def word_antipode(v: Word) -> Tuple[int, Word]:
    """S(a1…an) = (−1)^n an…a1, returned as (sign, word)"""
    v = tuple(v)
    return (-1) ** len(v), tuple(reversed(v))


def exponent_lattice_ok(weights: Iterable[Fraction]) -> bool:
    """True iff 1 is not a non-negative integer combination of the weights"""
    distinct = sorted({Fraction(w) for w in weights}, reverse=True)

    def reach(start: int, remaining: Fraction) -> bool:
        if remaining == 0:
            return True
        for idx in range(start, len(distinct)):
            if distinct[idx] <= remaining and reach(idx, remaining - distinct[idx]):
                return True
        return False

    return not reach(0, Fraction(1))


def check_exponent_lattice(weights: Iterable[Fraction]) -> None:
    weights = list(weights)
    if not exponent_lattice_ok(weights):
        raise ExponentLatticeError(
            f"1 lies in the additive lattice spanned by the exponents {[str(w) for w in weights]}"
        )


def anisotropic_basis(alphabet: Alphabet, max_basis: Optional[int] = None) -> List[Word]:
    """Non-empty words with Σ γ_{v_i} ≤ 1, length-lexicographic"""
    cap = config.limits.max_basis if max_basis is None else max_basis
    words: List[Word] = []

    def grow(prefix: Word, weight: Fraction) -> None:
        for letter, w in zip(alphabet.letters, alphabet.weights):
            if weight + w <= 1:
                word = prefix + (letter,)
                words.append(word)
                if len(words) > cap:
                    raise ResourceLimitError(f"word enumeration exceeds the cap of {cap} elements")
                grow(word, weight + w)

    grow(EMPTY, Fraction(0))
    return sorted(words, key=alphabet.word_key)


def words_up_to(alphabet: Alphabet, n: int, max_basis: Optional[int] = None) -> List[Word]:
    """All non-empty words of length at most n"""
    cap = config.limits.max_basis if max_basis is None else max_basis
    words: List[Word] = []
    layer: List[Word] = [EMPTY]
    for _ in range(n):
        layer = [w + (a,) for w in layer for a in alphabet.letters]
        words.extend(layer)
        if len(words) > cap:
            raise ResourceLimitError(f"word enumeration exceeds the cap of {cap} elements")
    return sorted(words, key=alphabet.word_key)


class WordBasis:
    """
    Truncated shuffle basis: the empty word followed by either all words of
    length ≤ `max_length` or, when it is omitted, the anisotropic set 𝔏.

    Levels are word lengths; grades are ω(v).
    """

    kind = "shuffle"

    def __init__(
        self,
        alphabet: Alphabet,
        max_length: Optional[int] = None,
        max_basis: Optional[int] = None,
    ) -> None:
        self.alphabet = alphabet
        self.max_length = max_length
        words = (
            anisotropic_basis(alphabet, max_basis)
            if max_length is None
            else words_up_to(alphabet, max_length, max_basis)
        )
        self.elements: List[Word] = [EMPTY] + words
        self.index = {w: i for i, w in enumerate(self.elements)}
        self.levels = [len(w) for w in self.elements]
        self.grades = [alphabet.omega(w) for w in self.elements]
        self.letters = [self.index[(a,)] for a in alphabet.letters]
        self.n = max(self.levels)
        logger.info(f"Word basis: {len(self.elements)} words over {len(alphabet.letters)} letters")

    def __len__(self) -> int:
        return len(self.elements)

    def describe(self) -> Dict[str, object]:
        return {
            "algebra": "shuffle" if self.max_length is not None else "aniso",
            "N": self.n,
            "letters": [str(a) for a in self.alphabet.letters],
            "weights": [str(w) for w in self.alphabet.weights],
        }

    def key(self, i: int) -> str:
        return self.alphabet.format_word(self.elements[i])

    def lookup(self, text: str) -> int:
        return self.index[self.alphabet.parse_word(text)]

    def _fits(self, word: Word) -> bool:
        if self.max_length is not None:
            return len(word) <= self.max_length
        return self.alphabet.weight_of(word) <= 1

    def coproduct_terms(self, i: int) -> List[Tuple[int, int, Fraction]]:
        word = self.elements[i]
        return [(self.index[word[:k]], self.index[word[k:]], Fraction(1)) for k in range(len(word) + 1)]

    def antipode_terms(self, i: int) -> List[Tuple[int, Fraction]]:
        sign, reversed_word = word_antipode(self.elements[i])
        return [(self.index[reversed_word], Fraction(sign))]

    def product_terms(self, i: int, j: int) -> Optional[List[Tuple[int, Fraction]]]:
        u, v = self.elements[i], self.elements[j]
        if not self._fits(u + v):
            return None
        return sorted((self.index[w], c) for w, c in shuffle(u, v).items())

    def word_indices_over(self, letters: Iterable[Letter]) -> List[int]:
        keep = set(letters)
        return [i for i, w in enumerate(self.elements) if all(a in keep for a in w)]
