"""Free-group combinatorics over a set of hyperbolic generators.

Words are tuples of nonzero signed integers: letter +i is the i-th
generator (1-based), -i its inverse.  Words are stored freely reduced.
A substitution rule on the generators, supplied together with a verified
inverse rule, encodes the surface map on the fundamental group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    BudgetExceededError,
    NotHyperbolicError,
    ValidationError,
)
from .hyperbolic import (
    HPoint,
    IdealPoint,
    Isometry,
    axis,
    classify_isometry,
    same_ideal_point,
    to_disk,
)

DEFAULT_MAX_LETTERS = 10 ** 6
DEFAULT_MAX_WORDS = 10 ** 6


def _reduce_letters(letters) -> tuple[int, ...]:
    stack: list[int] = []
    for letter in letters:
        letter = int(letter)
        if letter == 0:
            raise ValidationError("letter 0 is not a generator index")
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """Freely reduced word; reduction happens on construction."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce_letters(self.letters))

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    @classmethod
    def parse(cls, text: str, names) -> "Word":
        """Parse whitespace-separated tokens ``name`` or ``name^-1``."""
        index = {name: i + 1 for i, name in enumerate(names)}
        letters = []
        for token in text.split():
            if token.endswith("^-1"):
                name, sign = token[:-3], -1
            else:
                name, sign = token, 1
            if name not in index:
                raise ValidationError(f"unknown generator {name!r}")
            letters.append(sign * index[name])
        return cls(tuple(letters))

    def format(self, names) -> str:
        parts = []
        for letter in self.letters:
            name = names[abs(letter) - 1]
            parts.append(name if letter > 0 else name + "^-1")
        return " ".join(parts)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-letter for letter in reversed(self.letters)))

    def is_identity(self) -> bool:
        return not self.letters

    def max_index(self) -> int:
        return max((abs(letter) for letter in self.letters), default=0)

    def cyclic_decomposition(self) -> tuple["Word", "Word"]:
        """Split as (g, core) with self = g * core * g^-1, core cyclically
        reduced.  Evaluating the core keeps matrix entries small where the
        full word would suffer catastrophic trace cancellation."""
        letters = self.letters
        i, j = 0, len(letters)
        while j - i >= 2 and letters[i] == -letters[j - 1]:
            i += 1
            j -= 1
        return Word(letters[:i]), Word(letters[i:j])


def free_reduce(word) -> Word:
    """Freely reduce a Word or raw letter sequence; idempotent."""
    if isinstance(word, Word):
        return word
    return Word(tuple(word))


class FuchsianGroup:
    """Named hyperbolic generators; discreteness is the caller's obligation."""

    def __init__(self, names, generators):
        names = tuple(names)
        generators = tuple(generators)
        if len(names) != len(generators):
            raise ValidationError("generator names and matrices mismatch")
        if len(set(names)) != len(names):
            raise ValidationError("duplicate generator name")
        if not generators:
            raise ValidationError("a group needs at least one generator")
        for name, m in zip(names, generators):
            kind = classify_isometry(m)
            if kind != "hyperbolic":
                raise NotHyperbolicError(
                    f"generator {name} is not hyperbolic ({kind})"
                )
        self.names = names
        self.generators = generators
        self._inverses = tuple(m.inverse() for m in generators)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letter_isometry(self, letter: int) -> Isometry:
        index = abs(letter) - 1
        if not 0 <= index < self.rank:
            raise ValidationError(f"letter {letter} exceeds rank {self.rank}")
        return self.generators[index] if letter > 0 else self._inverses[index]

    def word(self, text: str) -> Word:
        return Word.parse(text, self.names)


def evaluate_word(group: FuchsianGroup, word) -> Isometry:
    """Ordered product of generator matrices; empty word is the identity."""
    word = free_reduce(word)
    result = Isometry.identity()
    for letter in word:
        result = result.compose(group.letter_isometry(letter))
    return result


@dataclass(frozen=True)
class FreeAutomorphism:
    """Forward and inverse substitution rules, one word per generator."""

    forward: tuple[Word, ...]
    inverse: tuple[Word, ...]

    def __post_init__(self):
        if len(self.forward) != len(self.inverse):
            raise ValidationError("forward/inverse rule counts differ")
        rank = len(self.forward)
        for rule in self.forward + self.inverse:
            if rule.max_index() > rank:
                raise ValidationError(
                    f"substitution uses generator index {rule.max_index()} "
                    f"beyond rank {rank}"
                )

    @property
    def rank(self) -> int:
        return len(self.forward)

    @classmethod
    def identity(cls, rank: int) -> "FreeAutomorphism":
        rules = tuple(Word((i + 1,)) for i in range(rank))
        return cls(rules, rules)

    def _substitute_once(self, word: Word, rules, max_letters: int) -> Word:
        out: list[int] = []
        for letter in word:
            rule = rules[abs(letter) - 1]
            image = rule.letters if letter > 0 else rule.inverse().letters
            for x in image:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)
            if len(out) > max_letters:
                raise BudgetExceededError(
                    f"substitution exceeded {max_letters} letters"
                )
        return Word(tuple(out))


def apply_automorphism(phi: FreeAutomorphism, word, n: int,
                       max_letters: int = DEFAULT_MAX_LETTERS) -> Word:
    """n-fold substitution; negative n applies the inverse rule."""
    word = free_reduce(word)
    rules = phi.forward if n >= 0 else phi.inverse
    for _ in range(abs(int(n))):
        word = phi._substitute_once(word, rules, max_letters)
    return word


@dataclass
class AutomorphismReport:
    ok: bool
    failures: list[tuple[str, int, Word]] = field(default_factory=list)
    # each failure is (direction, generator index 1-based, reduced round-trip)


def verify_automorphism(phi: FreeAutomorphism) -> AutomorphismReport:
    """Check that both round-trips reduce every generator to itself."""
    report = AutomorphismReport(ok=True)
    for i in range(phi.rank):
        gen = Word((i + 1,))
        fwd_back = apply_automorphism(phi, apply_automorphism(phi, gen, 1), -1)
        if fwd_back.letters != gen.letters:
            report.ok = False
            report.failures.append(("inverse(forward(x))", i + 1, fwd_back))
        back_fwd = apply_automorphism(phi, apply_automorphism(phi, gen, -1), 1)
        if back_fwd.letters != gen.letters:
            report.ok = False
            report.failures.append(("forward(inverse(x))", i + 1, back_fwd))
    return report


def ball_size(rank: int, k: int) -> int:
    """Closed form 1 + sum over lengths of 2r*(2r-1)^(len-1)."""
    total = 1
    for length in range(1, k + 1):
        total += 2 * rank * (2 * rank - 1) ** (length - 1)
    return total


def enumerate_ball(group: FuchsianGroup, k: int,
                   max_words: int = DEFAULT_MAX_WORDS):
    """All freely reduced words of length <= k with their isometries.

    Ordered by length, then lexicographically with the letter order
    a < a^-1 < b < b^-1 < ...; deterministic for a fixed group.
    """
    if k < 0:
        raise ValidationError("ball radius must be nonnegative")
    expected = ball_size(group.rank, k)
    if expected > max_words:
        raise BudgetExceededError(
            f"ball of radius {k} holds {expected} words, over the budget "
            f"of {max_words}"
        )
    letter_order = []
    for i in range(1, group.rank + 1):
        letter_order.extend((i, -i))
    out: list[tuple[Word, Isometry]] = [(Word.identity(), Isometry.identity())]
    frontier = [((), Isometry.identity())]
    for _ in range(k):
        nxt = []
        for letters, m in frontier:
            for letter in letter_order:
                if letters and letters[-1] == -letter:
                    continue
                entry = (letters + (letter,),
                         m.compose(group.letter_isometry(letter)))
                nxt.append(entry)
        frontier = nxt
        out.extend((Word(letters), m) for letters, m in frontier)
    return out


@dataclass
class LimitSetSample:
    """Orbit points (disk coordinates) plus boundary fixed points."""

    orbit: list[tuple[float, float]]
    fixed_points: list[IdealPoint]
    words: int

    def min_boundary_gap(self) -> float:
        """Smallest 1 - |p| over the sampled orbit."""
        return min(1.0 - math.hypot(x, y) for x, y in self.orbit)


def limit_set_sample(group: FuchsianGroup, base: HPoint, k: int,
                     max_words: int = DEFAULT_MAX_WORDS) -> LimitSetSample:
    """Orbit of ``base`` under the radius-k ball, with the axis endpoints
    of every hyperbolic ball element (a dense subset of the limit set)."""
    if k < 0:
        raise ValidationError("sample depth must be nonnegative")
    from .hyperbolic import apply_isometry

    ball = enumerate_ball(group, k, max_words)
    orbit = []
    fixed: list[IdealPoint] = []
    for _, m in ball:
        orbit.append(to_disk(apply_isometry(m, base)))
        if classify_isometry(m) == "hyperbolic":
            g = axis(m)
            for p in (g.a, g.b):
                if not any(same_ideal_point(p, q) for q in fixed):
                    fixed.append(p)
    return LimitSetSample(orbit=orbit, fixed_points=fixed, words=len(ball))
