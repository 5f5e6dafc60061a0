"""Words in the braid generators and their text syntax.

Syntax: generator names (a letter followed by digits, e.g. ``s2``) with
optional integer exponents, juxtaposed or separated by ``*`` or spaces, plus
parenthesised groups with exponents: ``z^3*s2*s3^-1``, ``(s3 s1)^2 s3^-1``,
``s1s2s1``.  ``z`` expands to the presentation's central word when one is
supplied.
"""

from __future__ import annotations

import re

_TOKEN = re.compile(r"\s*(?:(\()|(\))(?:\^(-?\d+))?|([A-Za-z]\d*)(?:\^(-?\d+))?|(\*|1(?!\d)))")


class WordSyntaxError(ValueError):
    pass


class Word(tuple):
    """Tuple of (generator, nonzero exponent) with adjacent letters merged."""

    def __new__(cls, letters=()):
        out = []
        for g, e in letters:
            if not e:
                continue
            if out and out[-1][0] == g:
                e += out[-1][1]
                out.pop()
                if e:
                    out.append((g, e))
            else:
                out.append((g, e))
        return super().__new__(cls, out)

    def __mul__(self, other):
        return Word(tuple(self) + tuple(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return Word(tuple(self) * k)

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self))

    def reversed(self) -> "Word":
        return Word(reversed(self))

    def length(self) -> int:
        return sum(abs(e) for _, e in self)

    def is_positive(self) -> bool:
        return all(e > 0 for _, e in self)

    def letters(self):
        """Expanded sequence of (generator, +1 or -1)."""
        for g, e in self:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield g, s

    def generators(self) -> set:
        return {g for g, _ in self}

    def __str__(self):
        if not self:
            return "1"
        return "*".join(g if e == 1 else "%s^%d" % (g, e) for g, e in self)

    def __repr__(self):
        return "Word(%s)" % (str(self),)


def parse_word(s: str, center: Word | None = None, center_name: str = "z") -> Word:
    s = s.strip()
    if s in ("", "1"):
        return Word()
    stack = [[]]
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            if s[pos:].strip() == "":
                break
            raise WordSyntaxError("cannot parse %r at %r" % (s, s[pos:]))
        pos = m.end()
        opening, closing, gexp, name, exp, star = m.groups()
        if opening:
            stack.append([])
        elif closing:
            if len(stack) < 2:
                raise WordSyntaxError("unbalanced parenthesis in %r" % s)
            inner = Word(stack.pop())
            stack[-1].extend(inner ** (int(gexp) if gexp else 1))
        elif name:
            e = int(exp) if exp else 1
            if name == center_name and center is not None:
                stack[-1].extend(center ** e)
            else:
                stack[-1].append((name, e))
    if len(stack) != 1:
        raise WordSyntaxError("unbalanced parenthesis in %r" % s)
    return Word(stack[0])


def word_key(w: Word, gens: list):
    """Canonical order: length, then generator index, then exponent."""
    idx = {g: i for i, g in enumerate(gens)}
    return (w.length(), tuple((idx[g], e) for g, e in w))
