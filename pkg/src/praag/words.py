"""Words in free groups.

A letter is a ``(generator, exponent)`` pair with exponent ``+1`` or ``-1``.
Text form separates letters by spaces and writes inverses as ``g^-1``.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

Letter = tuple[str, int]


class Word(tuple):
    """An immutable sequence of letters."""

    def __new__(cls, letters: Iterable[Letter] = ()):
        out = []
        for gen, exp in letters:
            if exp not in (1, -1):
                raise ValueError(f"exponent must be +1 or -1, got {exp!r}")
            out.append((str(gen), int(exp)))
        return super().__new__(cls, out)

    @classmethod
    def positive(cls, gens: Iterable[str]) -> "Word":
        return cls((g, 1) for g in gens)

    @classmethod
    def parse(cls, text: str) -> "Word":
        letters = []
        for tok in text.split():
            if tok in ("1", "e"):
                continue
            if tok.endswith("^-1"):
                letters.append((tok[:-3], -1))
            elif tok.endswith("^1"):
                letters.append((tok[:-2], 1))
            else:
                letters.append((tok, 1))
        return cls(letters)

    def __str__(self) -> str:
        if not self:
            return "1"
        return " ".join(g if e == 1 else f"{g}^-1" for g, e in self)

    def __add__(self, other: Sequence[Letter]) -> "Word":
        return Word(tuple(self) + tuple(other))

    def __mul__(self, times: int) -> "Word":
        return Word(tuple(self) * times)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self))

    def reduced(self) -> "Word":
        stack: list[Letter] = []
        for g, e in self:
            if stack and stack[-1] == (g, -e):
                stack.pop()
            else:
                stack.append((g, e))
        return Word(stack)

    def is_reduced(self) -> bool:
        return all(self[i] != (self[i + 1][0], -self[i + 1][1]) for i in range(len(self) - 1))

    def cyclically_reduced(self) -> "Word":
        w = list(self.reduced())
        while len(w) >= 2 and w[0] == (w[-1][0], -w[-1][1]):
            w = w[1:-1]
        return Word(w)

    def exponent_sum(self, gen: str | None = None) -> int:
        return sum(e for g, e in self if gen is None or g == gen)

    def generators(self) -> set[str]:
        return {g for g, _ in self}

    def substitute(self, mapping: dict[str, "Word"]) -> "Word":
        out: list[Letter] = []
        for g, e in self:
            if g in mapping:
                out.extend(mapping[g] if e == 1 else mapping[g].inverse())
            else:
                out.append((g, e))
        return Word(out)

    def rename(self, mapping: dict[str, str]) -> "Word":
        return Word((mapping.get(g, g), e) for g, e in self)


def commutator(a: str, b: str) -> Word:
    return Word([(a, 1), (b, 1), (a, -1), (b, -1)])


def prefixes(word: Word) -> Iterator[Word]:
    """Freely reduced prefixes, i.e. the vertices a path visits in the Cayley tree."""
    stack: list[Letter] = []
    yield Word()
    for g, e in word:
        if stack and stack[-1] == (g, -e):
            stack.pop()
        else:
            stack.append((g, e))
        yield Word(stack)
