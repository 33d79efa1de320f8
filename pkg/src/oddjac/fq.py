"""Finite fields F_{p^m} and univariate polynomials over them.

Field elements are plain ints: for F_p they are residues 0..p-1, and for
F_{p^m} an element sum c_j w^j is encoded as sum c_j p^j, where w is a root of
the modulus returned by :func:`find_irreducible`.

Also holds the residue-characteristic screens used before any p-adic search:
:func:`lemma15_screen`, :func:`odd_degree_common_factor` and
:func:`lemma16_certificate`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

ZERO_DEGREE = -1  # degree reported for the zero polynomial


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class FqField:
    """The field with p**m elements."""

    def __init__(self, p: int, m: int = 1, modulus=None):
        if not _is_prime(p) or m < 1:
            raise ValueError(f"bad field parameters p={p}, m={m}")
        self.p = p
        self.m = m
        self.q = p ** m
        if modulus is not None:
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if m > 1 and not is_irreducible(FqPoly(prime_field(p), modulus)):
                raise ValueError("modulus is reducible")
            self.modulus = modulus
        elif m == 1:
            self.modulus = (0, 1)
        else:
            self.modulus = find_irreducible(p, m).coeffs
        self._exp = None
        self._log = None

    def __repr__(self):
        return f"FqField({self.p}, {self.m})"

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    # digit conversion for m > 1
    def digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def from_digits(self, ds) -> int:
        a = 0
        for c in reversed(list(ds)):
            a = a * self.p + c % self.p
        return a

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        p = self.p
        return self.from_digits([(x + y) % p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _slow_mul(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        mod = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k] % p
            if c:
                for j in range(m):
                    prod[k - m + j] -= c * mod[j]
            prod[k] = 0
        return self.from_digits(prod[:m])

    def _tables(self):
        if self._exp is None:
            gen = self.generator()
            exp = [1] * (self.q - 1)
            for i in range(1, self.q - 1):
                exp[i] = self._slow_mul(exp[i - 1], gen)
            log = {v: i for i, v in enumerate(exp)}
            self._exp, self._log = exp, log
        return self._exp, self._log

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self.q > 1 << 16:
            return self._slow_mul(a, b)
        exp, log = self._tables()
        return exp[(log[a] + log[b]) % (self.q - 1)]

    def pow(self, a: int, k: int) -> int:
        if self.m == 1:
            return pow(a, k, self.p)
        result, base = 1, a
        if k < 0:
            base, k = self.inv(a), -k
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in finite field")
        if self.m == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.q - 2)

    def generator(self) -> int:
        """Smallest (by encoding) generator of the multiplicative group."""
        n = self.q - 1
        primes = [r for r in range(2, n + 1) if n % r == 0 and _is_prime(r)]
        for g in range(1, self.q):
            ok = True
            for r in primes:
                if self._pow_raw(g, n // r) == 1:
                    ok = False
                    break
            if ok:
                return g
        raise RuntimeError("no generator found")

    def _pow_raw(self, a, k):
        if self.m == 1:
            return pow(a, k, self.p)
        result = 1
        while k:
            if k & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            k >>= 1
        return result

    def is_square(self, a: int) -> bool:
        return is_square_fq(self, a)

    def sqrt(self, a: int) -> int:
        """A square root of a square a (Tonelli-Shanks; any root in char 2)."""
        if a == 0:
            return 0
        if self.p == 2:
            return self.pow(a, self.q // 2)
        if not is_square_fq(self, a):
            raise ValueError("not a square")
        q = self.q
        s, t = 0, q - 1
        while t % 2 == 0:
            s, t = s + 1, t // 2
        z = next(c for c in range(2, q) if not is_square_fq(self, c))
        m, c = s, self.pow(z, t)
        r, tt = self.pow(a, (t + 1) // 2), self.pow(a, t)
        while tt != 1:
            i, t2 = 0, tt
            while t2 != 1:
                t2 = self.mul(t2, t2)
                i += 1
            b = c
            for _ in range(m - i - 1):
                b = self.mul(b, b)
            m, c = i, self.mul(b, b)
            r, tt = self.mul(r, b), self.mul(tt, c)
        return r

    def frobenius_root(self, a: int) -> int:
        """The unique b with b**p == a."""
        if self.m == 1:
            return a
        return self.pow(a, self.q // self.p)


@lru_cache(maxsize=None)
def prime_field(p: int) -> FqField:
    return FqField(p, 1)


def is_square_fq(field: FqField, x: int) -> bool:
    """Euler's criterion; every element is a square in characteristic 2."""
    if x == 0 or field.p == 2:
        return True
    return field.pow(x, (field.q - 1) // 2) == 1


class FqPoly:
    """Immutable polynomial over an FqField, coefficients stored low to high."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FqField, coeffs):
        cs = list(coeffs)
        if field.m == 1:
            cs = [c % field.p for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def from_ints(cls, p: int, coeffs) -> "FqPoly":
        return cls(prime_field(p), coeffs)

    @classmethod
    def x(cls, field: FqField) -> "FqPoly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: FqField, c: int) -> "FqPoly":
        return cls(field, (c,))

    def __repr__(self):
        return f"FqPoly(F_{self.field.q}, {list(self.coeffs)})"

    def __eq__(self, other):
        return isinstance(other, FqPoly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other):
        F = self.field
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return FqPoly(F, [F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self):
        return FqPoly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.field
        if isinstance(other, int):
            return FqPoly(F, [F.mul(c, other) for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FqPoly(F, ())
        if F.m == 1:
            p = F.p
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return FqPoly(F, [c % p for c in out])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
        return FqPoly(F, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = FqPoly.const(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        db = other.degree
        inv = F.inv(other.lead())
        if len(r) - 1 < db:
            return FqPoly(F, ()), self
        q = [0] * (len(r) - db)
        bc = other.coeffs
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if c == 0:
                continue
            t = F.mul(c, inv)
            q[k - db] = t
            for j in range(db + 1):
                r[k - db + j] = F.sub(r[k - db + j], F.mul(t, bc[j]))
        return FqPoly(F, q), FqPoly(F, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "FqPoly":
        if self.is_zero():
            return self
        return self * self.field.inv(self.lead())

    def derivative(self) -> "FqPoly":
        F = self.field
        return FqPoly(F, [F.mul(c, i % F.p) for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def is_one(self) -> bool:
        return self.coeffs == (1,)


def poly_gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    """Monic gcd (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def pow_mod(base: FqPoly, k: int, mod: FqPoly) -> FqPoly:
    result = FqPoly.const(base.field, 1) % mod
    base = base % mod
    while k:
        if k & 1:
            result = (result * base) % mod
        base = (base * base) % mod
        k >>= 1
    return result


def _pth_root(f: FqPoly) -> FqPoly:
    F = f.field
    p = F.p
    cs = f.coeffs
    return FqPoly(F, [F.frobenius_root(cs[i]) for i in range(0, len(cs), p)])


def squarefree_split(f: FqPoly) -> list[tuple[FqPoly, int]]:
    """Factor a nonzero f as unit * prod g_i**e_i with monic, squarefree, coprime g_i.

    Returns [(g_i, e_i)] sorted by multiplicity; the unit is f.lead().
    """
    if f.is_zero():
        raise ValueError("squarefree_split of the zero polynomial")
    out = _sff(f.monic())
    out.sort(key=lambda t: (t[1], t[0].coeffs))
    return out


def _sff(f: FqPoly) -> list[tuple[FqPoly, int]]:
    if f.degree <= 0:
        return []
    p = f.field.p
    res = []
    d = f.derivative()
    if d.is_zero():
        return [(g, e * p) for g, e in _sff(_pth_root(f))]
    c = poly_gcd(f, d)
    w = f // c
    i = 1
    while w.degree > 0:
        y = poly_gcd(w, c)
        fac = w // y
        if fac.degree > 0:
            res.append((fac.monic(), i))
        w = y
        c = c // y
        i += 1
    if c.degree > 0:
        res.extend((g, e * p) for g, e in _sff(_pth_root(c.monic())))
    return res


def distinct_degree_factors(f: FqPoly) -> list[tuple[FqPoly, int]]:
    """For squarefree monic f, return [(g_d, d)] where g_d is the product of
    the irreducible factors of degree d."""
    F = f.field
    x = FqPoly.x(F)
    out = []
    h = x % f if f.degree > 0 else x
    i = 1
    rest = f.monic()
    while rest.degree >= 2 * i:
        h = pow_mod(h, F.q, rest)
        g = poly_gcd(rest, h - x)
        if g.degree > 0:
            out.append((g, i))
            rest = rest // g
            h = h % rest
        i += 1
    if rest.degree > 0:
        out.append((rest, rest.degree))
    return out


def is_irreducible(f: FqPoly) -> bool:
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    sf = squarefree_split(f)
    if len(sf) != 1 or sf[0][1] != 1:
        return False
    dd = distinct_degree_factors(f.monic())
    return len(dd) == 1 and dd[0][1] == f.degree


@lru_cache(maxsize=None)
def find_irreducible(p: int, m: int) -> FqPoly:
    """First monic irreducible of degree m over F_p, ordering the lower
    coefficients (c_0, ..., c_{m-1}) by the integer sum c_i p**i."""
    F = prime_field(p)
    for code in range(p ** m):
        cs = []
        r = code
        for _ in range(m):
            r, c = divmod(r, p)
            cs.append(c)
        f = FqPoly(F, cs + [1])
        if is_irreducible(f):
            return f
    raise RuntimeError("unreachable: irreducibles exist in every degree")


# -- screens ---------------------------------------------------------------

@dataclass(frozen=True)
class ScreenResult:
    """Outcome of :func:`lemma15_screen`.

    ``certain`` means the curve is certainly not deficient at p.  Otherwise
    ``reason`` is "zero_reduction" or "nonsquare_times_square"; in the latter
    case ``unit`` and ``root`` satisfy f = unit * root**2 with a nonsquare unit.
    """
    certain: bool
    reason: str | None = None
    unit: int | None = None
    root: FqPoly | None = None


NOT_DEFICIENT_CERTAIN = ScreenResult(True)


def square_root_poly(f: FqPoly) -> FqPoly | None:
    """Monic h with h**2 == f.monic(), or None if there is none."""
    if f.is_zero():
        return FqPoly(f.field, ())
    h = FqPoly.const(f.field, 1)
    for g, e in squarefree_split(f):
        if e % 2:
            return None
        h = h * g ** (e // 2)
    return h


def lemma15_screen(fbar: FqPoly, formal_degree: int) -> ScreenResult:
    """Decide whether a reduction mod odd p is forced to be not deficient.

    ``fbar`` is the dehomogenised reduction of a binary form of even degree
    ``formal_degree``.  Unless fbar is zero or a nonsquare constant times a
    square, the curve is certainly not deficient at p.
    """
    F = fbar.field
    if F.p == 2:
        raise ValueError("screen applies to odd residue characteristic only")
    if fbar.is_zero():
        return ScreenResult(False, "zero_reduction")
    if fbar.degree > formal_degree:
        raise ValueError("reduction has degree above the formal degree")
    # a missing top degree counts as a factor z**(formal - deg); its parity
    # equals the parity of deg since the formal degree is even
    if fbar.degree % 2:
        return NOT_DEFICIENT_CERTAIN
    u = fbar.lead()
    if is_square_fq(F, u):
        return NOT_DEFICIENT_CERTAIN
    h = square_root_poly(fbar)
    if h is None:
        return NOT_DEFICIENT_CERTAIN
    return ScreenResult(False, "nonsquare_times_square", u, h)


def odd_degree_common_factor(h: FqPoly, hdeg: int, j: FqPoly, jdeg: int) -> bool:
    """Do the binary forms (h, hdeg) and (j, jdeg) share a factor of odd degree?

    A form is given by its dehomogenisation and formal degree; a shortfall of
    the actual degree is a power of z.  The zero form is divisible by
    everything, but two zero forms are rejected.
    """
    hz, jz = h.is_zero(), j.is_zero()
    if hz and jz:
        raise ValueError("both forms are zero")
    if hz:
        h, hdeg, j, jdeg = j, jdeg, h, hdeg
        hz, jz = jz, hz
    if jz:
        return _has_odd_factor(h, hdeg)
    if min(hdeg - h.degree, jdeg - j.degree) >= 1:
        return True  # z itself is a common factor
    return _has_odd_factor(poly_gcd(h, j), None)


def _has_odd_factor(f: FqPoly, formal: int | None) -> bool:
    """Does the form (f, formal) have an odd-degree divisor?  formal=None
    means the form has no z factor."""
    if formal is not None and formal - f.degree >= 1:
        return True
    for g, _ in squarefree_split(f):
        for part, d in distinct_degree_factors(g):
            if d % 2 == 1 and part.degree > 0:
                return True
    return False


@dataclass(frozen=True)
class Lemma16Certificate:
    """Data showing a curve is deficient at odd p.

    f = u*h**2 + p*j over Z with u, h reduced mod p of the stated shape and
    the reductions of h and j sharing no odd-degree factor.
    """
    p: int
    unit: int
    h: tuple
    j: tuple

    def to_dict(self):
        return {"p": self.p, "unit": self.unit, "h": list(self.h), "j": list(self.j)}


def _sym(c: int, m: int) -> int:
    c %= m
    return c - m if c > m // 2 else c


def lemma16_certificate(coeffs, p: int, genus: int) -> Lemma16Certificate | None:
    """Try to certify deficiency at odd p from the coefficients mod p**2.

    ``coeffs`` are integers a_0..a_{2g+2} (only their classes mod p**2 matter).
    Returns None when the certificate does not apply.
    """
    n = 2 * genus + 2
    a = [int(c) for c in coeffs] + [0] * (n + 1 - len(coeffs))
    F = prime_field(p)
    fbar = FqPoly(F, a)
    if fbar.is_zero():
        u = 0
        h = FqPoly(F, ())
        hl = []
    else:
        scr = lemma15_screen(fbar, n)
        if scr.certain:
            return None
        u = scr.unit
        h = scr.root
        hl = [_sym(c, p) for c in h.coeffs]
    us = _sym(u, p)
    # f - u*h^2 over Z, divided by p
    sq = [0] * (n + 1)
    for i, x in enumerate(hl):
        for k, y in enumerate(hl):
            if i + k <= n:
                sq[i + k] += x * y
    p2 = p * p
    jl = []
    for i in range(n + 1):
        r = (a[i] - us * sq[i]) % p2
        assert r % p == 0
        jl.append(r // p)
    jbar = FqPoly(F, jl)
    hdeg = (n // 2) if not h.is_zero() else 0
    if h.is_zero():
        # f == p*j mod p^2: need jbar to have no odd-degree factor, i.e. the
        # zero form h shares everything with j
        if jbar.is_zero():
            return None
        if _has_odd_factor(jbar, n):
            return None
        return Lemma16Certificate(p, 0, (), tuple(jbar.coeffs))
    if jbar.is_zero():
        return None
    if odd_degree_common_factor(h, hdeg, jbar, n):
        return None
    return Lemma16Certificate(p, u, tuple(hl), tuple(jbar.coeffs))
