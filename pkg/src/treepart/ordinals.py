"""Ordinal arithmetic below w^w in Cantor normal form.

An ordinal is a tuple of (exponent, coefficient) pairs with strictly
decreasing exponents and positive coefficients; the empty tuple is zero.
Exponents are plain ints, so everything here lives below w^w, which is
all the finite tower models need.  Comparing the term tuples
lexicographically agrees with the ordinal order on normal forms, so the
comparison operators just delegate to tuple comparison.
"""

from __future__ import annotations

import functools
import re
from typing import Iterable, Iterator

__all__ = [
    "NotALimitError",
    "Ordinal",
    "ZERO",
    "fin",
    "format_ordinal",
    "omega",
    "parse_ordinal",
]


class NotALimitError(ValueError):
    """Fundamental sequence requested for zero or a successor."""


@functools.total_ordering
class Ordinal:
    """An ordinal below w^w, kept in Cantor normal form."""

    __slots__ = ("terms",)

    terms: tuple[tuple[int, int], ...]

    def __init__(self, terms: Iterable[tuple[int, int]] = ()) -> None:
        norm = tuple((int(e), int(c)) for e, c in terms)
        prev = None
        for e, c in norm:
            if e < 0 or c < 1:
                raise ValueError(f"bad normal form term ({e}, {c})")
            if prev is not None and e >= prev:
                raise ValueError("exponents must strictly decrease")
            prev = e
        object.__setattr__(self, "terms", norm)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Ordinal is immutable")

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Ordinal):
            return self.terms == other.terms
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, Ordinal):
            return self.terms < other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return format_ordinal(self)

    def __int__(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1] if self.terms else 0

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    @property
    def kind(self) -> str:
        """One of "zero", "successor", "limit"."""
        if not self.terms:
            return "zero"
        return "successor" if self.terms[-1][0] == 0 else "limit"

    @property
    def is_limit(self) -> bool:
        return self.kind == "limit"

    def succ(self) -> Ordinal:
        if self.terms and self.terms[-1][0] == 0:
            e, c = self.terms[-1]
            return Ordinal(self.terms[:-1] + ((0, c + 1),))
        return Ordinal(self.terms + ((0, 1),))

    def fund_seq(self, n: int) -> Ordinal:
        """The n-th member of the canonical ascending sequence below a limit.

        For a trailing term w^e.c the sequence fixes the rest of the normal
        form, drops the last copy of w^e, and climbs back up underneath it:
        w^(e-1).(n+1) when e > 1, and the plain stage n when e == 1.
        """
        if self.kind != "limit":
            raise NotALimitError(f"{self} has no fundamental sequence")
        if n < 0:
            raise ValueError("sequence index must be >= 0")
        e, c = self.terms[-1]
        prefix = self.terms[:-1]
        if c > 1:
            prefix = prefix + ((e, c - 1),)
        if e == 1:
            tail: tuple[tuple[int, int], ...] = ((0, n),) if n > 0 else ()
        else:
            tail = ((e - 1, n + 1),)
        return Ordinal(prefix + tail)

    def below(self) -> Iterator[Ordinal]:
        """Yield every ordinal strictly below a finite one, in order."""
        for k in range(int(self)):
            yield fin(k)


ZERO = Ordinal()


def fin(n: int) -> Ordinal:
    """The finite ordinal n."""
    if n < 0:
        raise ValueError("no negative ordinals")
    return Ordinal(((0, n),)) if n else ZERO


def omega(exp: int = 1, coeff: int = 1) -> Ordinal:
    """w^exp * coeff as a single-term normal form."""
    return Ordinal(((exp, coeff),))


def format_ordinal(o: Ordinal) -> str:
    """Render in the compact text form, e.g. "w^2.3+w.4+7"."""
    if not o.terms:
        return "0"
    parts = []
    for e, c in o.terms:
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append("w" if c == 1 else f"w.{c}")
        else:
            parts.append(f"w^{e}" if c == 1 else f"w^{e}.{c}")
    return "+".join(parts)


_TERM_RE = re.compile(r"^(?:(\d+)|w(?:\^(\d+))?(?:\.(\d+))?)$")


def parse_ordinal(text: str | int) -> Ordinal:
    """Inverse of format_ordinal; also accepts a bare int."""
    if isinstance(text, int):
        return fin(text)
    body = text.strip()
    if body == "0":
        return ZERO
    terms = []
    for piece in body.split("+"):
        m = _TERM_RE.match(piece.strip())
        if m is None:
            raise ValueError(f"cannot parse ordinal term {piece!r}")
        digits, exp, coeff = m.groups()
        if digits is not None:
            terms.append((0, int(digits)))
        else:
            terms.append((int(exp) if exp else 1, int(coeff) if coeff else 1))
    return Ordinal(terms)
