"""Types (empirical symbol counts) and type classes for block inputs."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GuardrailError

TYPE_COUNT_LIMIT = 10**6
CLASS_SIZE_LIMIT = 10**4


@dataclass(frozen=True)
class TypeClass:
    """A type (symbol-count vector summing to n) and its exact class size."""

    n: int
    counts: tuple[int, ...]
    class_size: int

    @classmethod
    def from_counts(cls, counts) -> "TypeClass":
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise GuardrailError(f"counts must be non-negative, got {counts}")
        n = sum(counts)
        if n < 1:
            raise GuardrailError("block length must be positive")
        size = math.factorial(n)
        for c in counts:
            size //= math.factorial(c)
        return cls(n=n, counts=counts, class_size=size)


def enumerate_types(alphabet_size: int, n: int) -> list[TypeClass]:
    """All compositions of n into alphabet_size parts, first coordinate descending."""
    if alphabet_size < 1 or n < 1:
        raise GuardrailError("alphabet_size and n must be positive")
    count = math.comb(n + alphabet_size - 1, alphabet_size - 1)
    if count > TYPE_COUNT_LIMIT:
        raise GuardrailError(f"{count} types exceeds the limit {TYPE_COUNT_LIMIT}")

    out: list[TypeClass] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(TypeClass.from_counts(prefix + (remaining,)))
            return
        for c in range(remaining, -1, -1):
            rec(prefix + (c,), remaining - c, slots - 1)

    rec((), n, alphabet_size)
    return out


def type_of(seq, alphabet) -> TypeClass:
    """Empirical type of a symbol sequence over the given alphabet."""
    alphabet = tuple(alphabet)
    counts = [0] * len(alphabet)
    for sym in seq:
        try:
            counts[alphabet.index(sym)] += 1
        except ValueError:
            raise GuardrailError(f"symbol {sym!r} is not in the alphabet") from None
    return TypeClass.from_counts(counts)


def sequences_of_type(t: TypeClass, alphabet) -> list[tuple]:
    """All sequences with the given type, in lexicographic symbol-index order."""
    alphabet = tuple(alphabet)
    if len(alphabet) != len(t.counts):
        raise GuardrailError("alphabet size does not match the type's arity")
    if t.class_size > CLASS_SIZE_LIMIT:
        raise GuardrailError(
            f"type class of size {t.class_size} exceeds the limit {CLASS_SIZE_LIMIT}"
        )

    out: list[tuple] = []

    def rec(prefix, counts):
        if len(prefix) == t.n:
            out.append(tuple(prefix))
            return
        for i, sym in enumerate(alphabet):
            if counts[i] > 0:
                counts[i] -= 1
                prefix.append(sym)
                rec(prefix, counts)
                prefix.pop()
                counts[i] += 1

    rec([], list(t.counts))
    return out
