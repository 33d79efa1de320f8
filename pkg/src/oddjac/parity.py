"""Deficient places of a curve over Q and the resulting parity of its Jacobian.

The self-pairing <c, c> equals N/2 in Q/Z, where N counts the deficient
places.  Only infinity, 2 and odd primes with p^(g+1) | disc can be
deficient, so the scan is finite once disc is factored far enough.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import numpy as np
import sympy

from .locsolve import (DEFICIENT, UNDECIDED, Curve, DeficiencyVerdict, deficient_at_finite,
                       deficient_at_infinity)
from .qp import vp_int

TRIAL_BOUND = 10**6

EVEN = "Even"
ODD = "Odd"


@lru_cache(maxsize=4)
def _small_primes(bound: int) -> np.ndarray:
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return np.nonzero(sieve)[0]


@lru_cache(maxsize=4)
def _primorial(bound: int) -> int:
    level = [int(p) for p in _small_primes(bound)]
    while len(level) > 1:
        nxt = [level[i] * level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


@dataclass
class PrimeScan:
    primes: list
    cofactor: int  # part of |disc| left unfactored; 1 when nothing is hidden
    certified: bool  # no prime > bound can have p^(g+1) | disc


def _split_smooth(n: int, bound: int):
    """Factor out the primes <= bound; returns ({p: e}, cofactor)."""
    g = gcd(_primorial(bound), n)
    fac = {}
    if g > 1:
        for p in sympy.factorint(g):
            e = vp_int(n, p)
            fac[p] = e
            n //= p ** e
    return fac, n


def scan_primes(c: Curve, mode: str = "heuristic", bound: int = TRIAL_BOUND) -> PrimeScan:
    """Odd primes p with p^(g+1) | disc, plus 2."""
    if mode not in ("heuristic", "rigorous"):
        raise ValueError(f"unknown factorization mode {mode!r}")
    D = abs(c.discriminant)
    k = c.genus + 1
    if mode == "rigorous" or c.genus == 0:
        fac = sympy.factorint(D)
        cof = 1
    else:
        fac, cof = _split_smooth(D, bound)
        if cof > 1:
            if cof < bound ** k or sympy.isprime(cof):
                cof = 1
            else:
                # a perfect power hides a repeated large prime; pull it out
                for e in range(k, cof.bit_length() + 1):
                    r, exact = sympy.integer_nthroot(cof, e)
                    if r <= bound:
                        break
                    if exact:
                        for p, m in sympy.factorint(r).items():
                            fac[p] = fac.get(p, 0) + m * e
                        cof = 1
                        break
    primes = {2}
    primes.update(p for p, e in fac.items() if p != 2 and e >= k)
    return PrimeScan(sorted(primes), cof, cof == 1)


def candidate_primes(c: Curve, mode: str = "heuristic") -> set:
    return set(scan_primes(c, mode).primes)


@dataclass
class ParityReport:
    curve: Curve
    deficient_places: list
    verdicts: dict
    factorization_mode: str
    unfactored_cofactor: int = 1
    notes: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.deficient_places)

    @property
    def undecided(self) -> bool:
        return any(v.decision == UNDECIDED for v in self.verdicts.values())

    @property
    def verdict(self) -> str:
        if self.undecided:
            return UNDECIDED
        return ODD if self.N % 2 else EVEN

    @property
    def pairing_value(self) -> str:
        return "1/2" if self.N % 2 else "0"

    def to_dict(self):
        return {
            "curve": self.curve.to_dict(),
            "deficient_places": self.deficient_places,
            "n": self.N,
            "pairing_value": self.pairing_value,
            "verdict": self.verdict,
            "factorization_mode": self.factorization_mode,
            "unfactored_cofactor": str(self.unfactored_cofactor) if self.unfactored_cofactor != 1 else None,
            "places": {k: v.to_dict() for k, v in self.verdicts.items()},
            "notes": self.notes,
        }


def _place_key(place: str):
    return (-1, 0) if place == "inf" else (0, int(place))


def deficient_places(c: Curve, mode: str = "heuristic", fast_paths: bool = True):
    """(deficient places, per-place verdicts, prime scan)."""
    if c.is_local:
        raise ValueError("global analysis needs exact integer coefficients")
    verdicts: dict[str, DeficiencyVerdict] = {}
    if c.genus % 2:
        return [], verdicts, PrimeScan([], 1, True)
    verdicts["inf"] = deficient_at_infinity(c)
    scan = scan_primes(c, mode)
    for p in scan.primes:
        verdicts[str(p)] = deficient_at_finite(c, p, fast_paths=fast_paths)
    places = sorted((k for k, v in verdicts.items() if v.decision == DEFICIENT), key=_place_key)
    return places, verdicts, scan


def parity(c: Curve, mode: str = "heuristic") -> ParityReport:
    places, verdicts, scan = deficient_places(c, mode)
    rep = ParityReport(c, places, verdicts, mode, scan.cofactor)
    if c.genus % 2:
        rep.notes.append("odd genus: every place has a rational divisor class of degree g-1")
    if not scan.certified:
        rep.notes.append("cofactor of the discriminant left unfactored; a large prime "
                         "dividing it to power g+1 would be missed")
    if rep.verdict == ODD:
        rep.notes.append("if Sha is finite its order is twice a square")
    return rep


def genus0_parity_audit(curves, mode: str = "rigorous"):
    """Check that every conic has an even number of deficient places.

    Returns (True, None) or (False, offending report)."""
    for c in curves:
        if c.genus != 0:
            raise ValueError("audit takes genus-0 curves")
        rep = parity(c, mode)
        if rep.undecided or rep.N % 2:
            return False, rep
    return True, None
