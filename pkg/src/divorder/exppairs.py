"""Exact van der Corput exponent-pair calculus.

Words such as ``AB(AS)^2H`` are compositions read outermost-first, so
``ABH`` means A(B(H)).  ``S`` (or the script letter) abbreviates ``BA``.
The base is the trivial pair I = (0, 1) or Huxley's pair H, which carries
an epsilon tag that every derived pair inherits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

MAX_DEPTH = 8
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ExponentPair:
    k: Fraction
    l: Fraction
    eps: bool = False

    def A(self) -> "ExponentPair":
        d = 2 * self.k + 2
        return ExponentPair(self.k / d, (self.k + self.l + 1) / d, self.eps)

    def B(self) -> "ExponentPair":
        return ExponentPair(self.l - HALF, self.k + HALF, self.eps)

    def __str__(self):
        tag = " (+eps)" if self.eps else ""
        return f"({self.k}, {self.l}){tag}"


I = ExponentPair(Fraction(0), Fraction(1))
H = ExponentPair(Fraction(32, 205), Fraction(269, 410), eps=True)
BASES = {"I": I, "H": H}


@dataclass(frozen=True)
class ProcessWord:
    """Operators outermost-first over a base pair."""

    ops: tuple[str, ...]
    base: str

    def __str__(self):
        return "".join(self.ops) + self.base


class WordSyntaxError(ValueError):
    pass


def _tokens(text: str):
    text = text.replace("\U0001d4d1", "S").replace("ℬ", "S")
    text = "".join(text.split())
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "^":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise WordSyntaxError(f"caret without exponent at position {i}")
            yield ("pow", int(text[i + 1 : j]))
            i = j
        elif ch in "ABS()HI":
            yield (ch, None)
            i += 1
        elif ch.isdigit():
            raise WordSyntaxError(f"bare digit at position {i}; powers need a caret")
        else:
            raise WordSyntaxError(f"unexpected character {ch!r} at position {i}")


def parse_word(text: str) -> ProcessWord:
    """Parse an ASCII (or script-B) process word into its expanded operator list."""
    toks = list(_tokens(text))
    if not toks or toks[-1][0] not in BASES:
        raise WordSyntaxError("word must end in exactly one base symbol H or I")
    base = toks.pop()[0]
    pos = 0

    def seq(depth: int) -> list[str]:
        nonlocal pos
        if depth > MAX_DEPTH:
            raise WordSyntaxError(f"groups nested deeper than {MAX_DEPTH}")
        out: list[str] = []
        while pos < len(toks):
            kind, _ = toks[pos]
            if kind == ")":
                if depth == 0:
                    raise WordSyntaxError("unbalanced ')'")
                return out
            pos += 1
            if kind == "(":
                atom = seq(depth + 1)
                if pos >= len(toks) or toks[pos][0] != ")":
                    raise WordSyntaxError("unbalanced '('")
                pos += 1
                if not atom:
                    raise WordSyntaxError("empty group")
            elif kind in "AB":
                atom = [kind]
            elif kind == "S":
                atom = ["B", "A"]
            elif kind == "pow":
                raise WordSyntaxError("power must follow an operator or a group")
            else:
                raise WordSyntaxError(f"base symbol {kind} may only end the word")
            if pos < len(toks) and toks[pos][0] == "pow":
                atom = atom * toks[pos][1]
                pos += 1
            out.extend(atom)
        if depth > 0:
            raise WordSyntaxError("unbalanced '('")
        return out

    ops = seq(0)
    return ProcessWord(tuple(ops), base)


def evaluate_word(word) -> ExponentPair:
    """Apply the operators innermost-first to the base pair."""
    if isinstance(word, str):
        word = parse_word(word)
    pair = BASES[word.base]
    for op in reversed(word.ops):
        pair = pair.A() if op == "A" else pair.B()
    return pair


def validate_pair(p: ExponentPair) -> bool:
    """Whether 0 <= k <= 1/2 <= l <= 1."""
    return 0 <= p.k <= HALF <= p.l <= 1
