"""Exact real-root counting (Sturm sequences) for rational polynomials."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


class RatPoly:
    """Polynomial with exact rational coefficients, stored low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    def __repr__(self):
        return f"RatPoly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        return isinstance(other, RatPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def integer_coeffs(self) -> list[int]:
        """Positive multiple of self with integer coefficients."""
        den = 1
        for c in self.coeffs:
            den = lcm(den, c.denominator)
        return [int(c * den) for c in self.coeffs]


def _as_int_coeffs(f) -> list[int]:
    if isinstance(f, RatPoly):
        return f.integer_coeffs()
    cs = list(f)
    if all(isinstance(c, int) for c in cs):
        cs = list(cs)
    else:
        cs = RatPoly(cs).integer_coeffs()
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _primitive(a: list[int]) -> list[int]:
    g = 0
    for c in a:
        g = gcd(g, c)
    if g > 1:
        return [c // g for c in a]
    return a


def _signed_prem(a: list[int], b: list[int]) -> list[int]:
    """Remainder of c*a by b for some positive integer c."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    mult = abs(lb)
    sgn = 1 if lb > 0 else -1
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        t = r[-1] * sgn
        # r <- |lb| * r - t * x^k * b
        r = [c * mult for c in r]
        for i, bc in enumerate(b):
            r[i + k] -= t * bc
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return r


def sturm_sequence(f) -> list[list[int]]:
    a = _primitive(_as_int_coeffs(f))
    if not a:
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [a]
    if len(a) == 1:
        return seq
    b = _primitive([i * c for i, c in enumerate(a)][1:])
    seq.append(b)
    while len(seq[-1]) > 1:
        r = _signed_prem(seq[-2], seq[-1])
        if not r:
            break
        seq.append(_primitive([-c for c in r]))
    return seq


def _variations(signs) -> int:
    n = 0
    last = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            n += 1
        last = s
    return n


def sturm_count(f) -> int:
    """Number of distinct real roots of a nonzero rational polynomial."""
    seq = sturm_sequence(f)
    at_pos = [1 if s[-1] > 0 else -1 for s in seq]
    at_neg = [(1 if s[-1] > 0 else -1) * (-1 if (len(s) - 1) % 2 else 1) for s in seq]
    return _variations(at_neg) - _variations(at_pos)


def negative_definite(f) -> bool:
    """True iff f(x) < 0 for every real x."""
    a = _as_int_coeffs(f)
    if not a or (len(a) - 1) % 2 or a[-1] >= 0:
        return False
    if a[0] >= 0:
        return False
    return sturm_count(a) == 0
