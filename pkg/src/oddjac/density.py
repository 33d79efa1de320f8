"""Densities of deficient curves: Monte Carlo estimators, exact local formulas
and the product formula 1 - 2 rho_g = prod_v (1 - 2 s_{g,v}).

Randomness is counter based.  The archimedean samplers draw block b of 2^16
samples from Philox keyed by (seed, b); the p-adic sampler expands
SHAKE-256 of (seed, p, sample, chunk) into digits, so the first k digits of a
coefficient never depend on how many more are requested later.  Results are
therefore identical for a fixed (seed, n) however the work is split.
"""
from __future__ import annotations

import hashlib
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, log2, sqrt

import numpy as np

from .fq import FqPoly, poly_gcd, prime_field
from .locsolve import DEFICIENT, UNDECIDED, Curve, deficient_at_finite
from .parity import ODD, parity
from .qp import unramified_field
from .realroots import sturm_count

BLOCK = 1 << 16
DYADIC_BITS = 53
PRECISION_CAP = 1 << 14
UNDECIDED_TOLERANCE = 1e-4

# the constant the Prop. 19 argument produces (see eta below for the measure itself)
PROP19_BOUND = Fraction(875, 1944)


@dataclass
class Estimate:
    value: float
    std_error: float
    n_samples: int
    n_undecided: int = 0
    seed: int | None = None
    config: dict = field(default_factory=dict)
    hits: int = 0
    flagged: bool = False
    exact: Fraction | None = None

    @classmethod
    def bernoulli(cls, hits, n, undecided=0, seed=None, config=None, tolerance=UNDECIDED_TOLERANCE):
        used = n - undecided
        v = hits / used if used else 0.0
        se = sqrt(v * (1 - v) / used) if used else 0.0
        flagged = used == 0 or undecided / n > tolerance
        return cls(v, se, n, undecided, seed, dict(config or {}), hits, flagged)

    @classmethod
    def exactly(cls, value, seed=None, config=None):
        value = Fraction(value)
        return cls(float(value), 0.0, 0, 0, seed, dict(config or {}), 0, False, value)

    def interval(self, k: float = 3.0) -> tuple[Fraction, Fraction]:
        if self.exact is not None:
            return self.exact, self.exact
        lo = Fraction(self.value) - Fraction(k) * Fraction(self.std_error)
        hi = Fraction(self.value) + Fraction(k) * Fraction(self.std_error)
        return max(lo, Fraction(0)), min(hi, Fraction(1))

    def to_dict(self):
        d = {"value": self.value if self.exact is None else f"{self.exact.numerator}/{self.exact.denominator}",
             "std_error": self.std_error, "n_samples": self.n_samples, "n_undecided": self.n_undecided,
             "hits": self.hits, "seed": self.seed, "flagged": self.flagged, "config": self.config}
        return d


# -- archimedean place -------------------------------------------------------------

def _dyadic_block(seed: int, block: int, rows: int, width: int) -> np.ndarray:
    """Integer numerators m/2^53 of uniform dyadic points of [-1, 1]^width."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    one = 1 << DYADIC_BITS
    return rng.integers(-one, one, size=(rows, width), endpoint=True, dtype=np.int64)


def _blocks(n: int):
    b = 0
    while n > 0:
        r = min(n, BLOCK)
        yield b, r
        n -= r
        b += 1


def _no_real_root_candidates(A: np.ndarray) -> np.ndarray:
    """Rows that survive cheap sign tests for 'no real root'.  Every test is
    a necessary condition (f keeps one sign), computed exactly."""
    if A.shape[1] % 2 == 0:  # odd degree
        return np.zeros(A.shape[0], dtype=bool)
    s0 = np.sign(A[:, 0])
    keep = (s0 != 0) & (np.sign(A[:, -1]) == s0)
    # f(1), f(-1): at most 2^53 * width in magnitude, so int64 is exact
    f1 = A.sum(axis=1)
    alt = np.where(np.arange(A.shape[1]) % 2, -1, 1)
    fm1 = A @ alt
    keep &= (np.sign(f1) == s0) & (np.sign(fm1) == s0)
    return keep


def _count_no_real_root(A: np.ndarray, negative: bool) -> int:
    keep = _no_real_root_candidates(A)
    if negative:
        keep &= A[:, -1] < 0
    hits = 0
    n = A.shape[1] - 1
    for row in A[keep]:
        a = [int(v) for v in row]
        # f(+-1/2) and f(+-2) scaled to integers, exactly
        vals = (sum(c << (n - i) for i, c in enumerate(a)),
                sum((c if i % 2 == 0 else -c) << (n - i) for i, c in enumerate(a)),
                sum(c << i for i, c in enumerate(a)),
                sum((c if i % 2 == 0 else -c) << i for i, c in enumerate(a)))
        s = 1 if a[0] > 0 else -1
        if any(v == 0 or (v > 0) != (s > 0) for v in vals):
            continue
        if sturm_count(a) == 0:
            hits += 1
    return hits


def estimate_s_inf(g: int, n: int, seed: int) -> Estimate:
    """Measure of negative definite f among uniform coefficients in [-1, 1]."""
    if n < 1:
        raise ValueError("n must be positive")
    cfg = {"genus": g, "place": "inf", "dyadic_bits": DYADIC_BITS}
    if g % 2:
        return Estimate.exactly(0, seed, cfg)
    hits = 0
    for b, rows in _blocks(n):
        hits += _count_no_real_root(_dyadic_block(seed, b, rows, 2 * g + 3), negative=True)
    return Estimate.bernoulli(hits, n, 0, seed, cfg)


def estimate_q_n(degree: int, n: int, seed: int) -> Estimate:
    """Probability that a polynomial with uniform coefficients in [-1, 1] has
    no real root."""
    if n < 1:
        raise ValueError("n must be positive")
    hits = 0
    for b, rows in _blocks(n):
        hits += _count_no_real_root(_dyadic_block(seed, b, rows, degree + 1), negative=False)
    return Estimate.bernoulli(hits, n, 0, seed, {"degree": degree})


# -- p-adic places ------------------------------------------------------------------

def _chunk_digits(p: int) -> int:
    return max(1, int(60 / log2(p)))


def _chunk(seed: int, p: int, sample: int, chunk: int, width: int) -> list[int]:
    D = _chunk_digits(p)
    M = p ** D
    raw = hashlib.shake_256(f"{seed}:{p}:{sample}:{chunk}".encode()).digest(16 * width)
    return [int.from_bytes(raw[16 * j:16 * j + 16], "little") % M for j in range(width)]


def padic_coefficients(seed: int, p: int, sample: int, width: int, digits: int) -> list[int]:
    """First ``digits`` p-adic digits of each coefficient of a sample."""
    D = _chunk_digits(p)
    out = [0] * width
    scale = 1
    for ch in range(-(-digits // D)):
        for j, v in enumerate(_chunk(seed, p, sample, ch, width)):
            out[j] += v * scale
        scale *= p ** D
    M = p ** digits
    return [v % M for v in out]


def _start_digits(g: int, p: int) -> int:
    return max(2 * g + 6, 12) if p == 2 else max(g + 3, 6)


def local_decision(g: int, p: int, seed: int, sample: int, cap: int = PRECISION_CAP):
    """Decision for one sample, raising precision until it is decided."""
    width = 2 * g + 3
    digits = _start_digits(g, p)
    while digits <= cap:
        a = padic_coefficients(seed, p, sample, width, digits)
        try:
            c = Curve.local(g, a, p, digits)
        except ValueError:
            digits *= 2  # discriminant not yet visibly nonzero
            continue
        v = deficient_at_finite(c, p, cap=digits)
        if v.decision != UNDECIDED:
            return v.decision, digits
        digits *= 2
    return UNDECIDED, cap


def estimate_s_p(g: int, p: int, n: int, seed: int, cap: int = PRECISION_CAP,
                 tolerance: float = UNDECIDED_TOLERANCE) -> Estimate:
    if n < 1:
        raise ValueError("n must be positive")
    cfg = {"genus": g, "place": p, "precision_cap": cap}
    if g % 2:
        return Estimate.exactly(0, seed, cfg)
    hits = und = 0
    deepest = 0
    for i in range(n):
        d, digits = local_decision(g, p, seed, i, cap)
        deepest = max(deepest, digits)
        hits += d == DEFICIENT
        und += d == UNDECIDED
    cfg["max_digits_used"] = deepest
    return Estimate.bernoulli(hits, n, und, seed, cfg, tolerance)


# -- exact formulas -----------------------------------------------------------------

def prop17_bounds(g: int, p: int) -> tuple[Fraction, Fraction]:
    """Two-sided bound on s_{g,p} for even g >= 2 and odd p."""
    if g % 2 or g < 2:
        raise ValueError("bounds need even genus >= 2")
    if p == 2:
        raise ValueError("bounds need an odd prime")
    P = Fraction(p)
    base = 1 / (2 * P ** (g + 1))
    return (1 - 1 / P) * (1 - 1 / P ** 2) * base, (1 + 1 / P ** (g + 2)) * base


def refined_genus2_bounds(p: int) -> tuple[Fraction, Fraction]:
    """Sharper bounds on s_{2,p} for odd p."""
    if p == 2:
        raise ValueError("bounds need an odd prime")
    q = Fraction(1, p)
    lo = q ** 3 / 2 * (1 - q + q ** 2 / 2 - 2 * q ** 3 + q ** 4 + q ** 5 - q ** 6 / 2)
    hi = q ** 3 / 2 * (1 - q + q ** 2 + 3 * q ** 4 - q ** 5)
    return lo, hi


def local_bounds(g: int, p: int) -> tuple[Fraction, Fraction]:
    if g == 2:
        return refined_genus2_bounds(p)
    return prop17_bounds(g, p)


def coprime_count(p: int, m: int, n: int) -> int:
    """Ordered pairs of nonzero binary forms of degrees m, n over F_p with no
    common factor, from the recurrence sum_j b(m-j, n-j) a_j = (p-1) a_m a_n."""
    if m < 0 or n < 0:
        return 0
    a = lambda k: p ** (k + 1) - 1 if k >= 0 else 0
    memo: dict = {}

    def b(mm, nn):
        if mm < 0 or nn < 0:
            return 0
        if (mm, nn) not in memo:
            s = (p - 1) * a(mm) * a(nn) - sum(b(mm - j, nn - j) * a(j) for j in range(1, min(mm, nn) + 1))
            q, r = divmod(s, a(0))
            assert r == 0
            memo[(mm, nn)] = q
        return memo[(mm, nn)]
    return b(m, n)


def coprime_probability(p: int, m: int, n: int) -> Fraction:
    """Probability that two uniform binary forms of degrees m, n are coprime."""
    if m < 1 or n < 1:
        raise ValueError("degrees must be positive")
    return Fraction(coprime_count(p, m, n), p ** (m + n + 2))


def coprime_brute_force(p: int, m: int, n: int) -> Fraction:
    """Same probability by listing every pair of forms."""
    F = prime_field(p)
    good = 0
    forms_m = list(itertools.product(range(p), repeat=m + 1))
    forms_n = list(itertools.product(range(p), repeat=n + 1))
    for u in forms_m:
        fu = FqPoly(F, u)
        if fu.is_zero():
            continue
        zu = fu.degree < m
        for v in forms_n:
            fv = FqPoly(F, v)
            if fv.is_zero():
                continue
            if zu and fv.degree < n:
                continue  # z divides both
            if poly_gcd(fu, fv).degree == 0:
                good += 1
    return Fraction(good, p ** (m + n + 2))


def eta(j: int) -> Fraction:
    """Haar measure of the nonsquares in the ring of integers of the degree-j
    unramified extension of Q_2: 1 - 1/(2 (2^j + 1))."""
    if j < 1:
        raise ValueError("j must be positive")
    return 1 - Fraction(1, 2 * (2 ** j + 1))


def unit_square_fraction(j: int) -> Fraction:
    """Fraction of units of the degree-j unramified ring that are squares,
    counted on residues mod 8 (a unit is a square iff it is one mod 8)."""
    L = unramified_field(2, j)
    S = L.structure
    units = [c for c in itertools.product(range(8), repeat=j) if S.residue_code(list(c)) != 0]
    squares = {tuple(S.mul_mod(list(u), list(u), 8)) for u in units}
    return Fraction(len(squares), len(units))


def eta_series(j: int) -> Fraction:
    """Nonsquare measure summed over valuation shells: the shell v has measure
    q^-v (1 - 1/q), q = 2^j, and contains squares only for even v, in the
    proportion unit_square_fraction(j).  The even-v geometric series is summed
    in closed form."""
    q = Fraction(2 ** j)
    even_shells = (1 - 1 / q) / (1 - 1 / q ** 2)
    return 1 - even_shells * unit_square_fraction(j)


# -- global density ---------------------------------------------------------------

@dataclass
class LocalDensityTable:
    genus: int
    s_inf: Estimate
    s_p: dict
    prime_bound: int
    tail: str = "prop17"  # or "none"

    def interval(self, place) -> tuple[Fraction, Fraction]:
        if place == "inf":
            return self.s_inf.interval()
        entry = self.s_p.get(place)
        if entry is None:
            if self.tail == "none":
                return Fraction(0), Fraction(0)
            return Fraction(0), local_bounds(self.genus, place)[1]
        if isinstance(entry, Estimate):
            lo, hi = entry.interval()
            if place != 2 and self.genus % 2 == 0 and self.genus >= 2:
                blo, bhi = local_bounds(self.genus, place)
                if max(lo, blo) <= min(hi, bhi):
                    lo, hi = max(lo, blo), min(hi, bhi)
            return lo, hi
        return Fraction(entry[0]), Fraction(entry[1])

    def places(self) -> list:
        return ["inf"] + sorted(self.s_p)

    def tail_mass(self) -> Fraction:
        """Upper bound for sum over primes p > P of s_p."""
        if self.tail == "none" or self.genus % 2:
            return Fraction(0)
        g, P = self.genus, self.prime_bound
        return (1 + Fraction(1, P ** (g + 2))) / (2 * g * Fraction(P) ** g)

    def to_dict(self):
        def ent(e):
            if isinstance(e, Estimate):
                return e.to_dict()
            return {"lower": _fs(e[0]), "upper": _fs(e[1])}
        return {"genus": self.genus, "prime_bound": self.prime_bound, "tail": self.tail,
                "s_inf": self.s_inf.to_dict(), "s_p": {str(k): ent(v) for k, v in sorted(self.s_p.items())}}


def _fs(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def primes_up_to(P: int) -> list[int]:
    return [p for p in range(2, P + 1) if all(p % d for d in range(2, isqrt(p) + 1))]


def build_table(g: int, prime_bound: int, seed: int, n_inf: int = 10**6, n_2: int = 10**5,
                n_odd: int = 10**5, measured=(3, 5, 7), s_inf: Estimate | None = None,
                s_p: dict | None = None) -> LocalDensityTable:
    """Measured entries for infinity, 2 and ``measured``; exact bounds elsewhere.
    Precomputed estimates may be passed in to skip sampling."""
    s_p = dict(s_p or {})
    if s_inf is None:
        s_inf = estimate_s_inf(g, n_inf, seed)
    for p in primes_up_to(prime_bound):
        if p in s_p:
            continue
        if g % 2:
            s_p[p] = (Fraction(0), Fraction(0))
        elif p == 2:
            s_p[p] = estimate_s_p(g, 2, n_2, seed)
        elif p in measured:
            s_p[p] = estimate_s_p(g, p, n_odd, seed)
        else:
            s_p[p] = local_bounds(g, p)
    return LocalDensityTable(g, s_inf, s_p, prime_bound)


def nu_of_set(S, table: LocalDensityTable) -> tuple[Fraction, Fraction]:
    """Interval for the measure of curves whose deficient set is exactly S."""
    S = set(S)
    lo = hi = Fraction(1)
    for v in table.places():
        a, b = table.interval(v)
        if v in S:
            lo, hi = lo * a, hi * b
        else:
            lo, hi = lo * (1 - b), hi * (1 - a)
    extra = [v for v in S if v not in table.places()]
    for v in extra:
        a, b = table.interval(v)
        lo, hi = lo * a, hi * b
    lo *= max(Fraction(0), 1 - table.tail_mass())
    return lo, hi


def rho_interval(g: int, table: LocalDensityTable) -> tuple[Fraction, Fraction]:
    """Enclosure of rho_g from 1 - 2 rho = prod (1 - 2 s_v)."""
    if g % 2:
        return Fraction(0), Fraction(0)
    lo = hi = Fraction(1)
    for v in table.places():
        a, b = table.interval(v)
        f_lo, f_hi = 1 - 2 * b, 1 - 2 * a
        if f_lo < 0:
            raise ValueError(f"local density at {v} too large for the product enclosure")
        lo, hi = lo * f_lo, hi * f_hi
    lo *= max(Fraction(0), 1 - 2 * table.tail_mass())
    return (1 - hi) / 2, (1 - lo) / 2


def estimate_rho_direct(g: int, height: int, n: int, seed: int, mode: str = "heuristic"):
    """Fraction of odd Jacobians among integer coefficient vectors in
    [-height, height]^(2g+3), plus a histogram of deficient sets."""
    cfg = {"genus": g, "height": height, "factor_mode": mode}
    hist: Counter = Counter()
    if g % 2:
        hist[()] = n
        return Estimate.exactly(0, seed, cfg), hist
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, height])))
    A = rng.integers(-height, height, size=(n, 2 * g + 3), endpoint=True)
    odd = singular = und = unfactored = 0
    for row in A:
        try:
            c = Curve(g, tuple(int(x) for x in row))
        except ValueError:
            singular += 1
            continue
        rep = parity(c, mode)
        if rep.verdict == UNDECIDED:
            und += 1
            continue
        unfactored += rep.unfactored_cofactor != 1
        hist[tuple(rep.deficient_places)] += 1
        odd += rep.verdict == ODD
    cfg.update(singular=singular, unfactored_cofactors=unfactored)
    est = Estimate.bernoulli(odd, n - singular, und, seed, cfg)
    return est, hist
