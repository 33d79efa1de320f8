"""Finite extensions of Q_p as towers: unramified O_K = Z_p[w], then an
Eisenstein extension O_L = O_K[pi].

Coordinates of an element of O_L are integers over the basis pi^i w^j
(slot i*f + j).  :class:`LocalElement` tracks how many pi-adic digits are
known; :class:`VectorRing` does the same arithmetic on numpy arrays modulo a
fixed p**N for the disc search.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, comb

import numpy as np

from .fq import FqField, find_irreducible, is_square_fq


class _BelowPrecision:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "BelowPrecision"

    def __bool__(self):
        return False


BELOW_PRECISION = _BelowPrecision()


class PrecisionError(ArithmeticError):
    """Raised when the known digits do not certify the requested answer."""


class HenselError(ArithmeticError):
    pass


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class LocalField:
    """O_L = Z_p[w][pi]: w a root of ``unram`` (monic, degree f, low to high),
    pi a root of x^e + sum E_i x^i with E_i = ``eisenstein[i]`` in O_K
    (each a tuple of f integers)."""

    p: int
    f: int = 1
    e: int = 1
    unram: tuple = (0, 1)
    eisenstein: tuple = ()

    def __post_init__(self):
        p, f, e = self.p, self.f, self.e
        if len(self.unram) != f + 1 or self.unram[-1] != 1:
            raise ValueError("unramified modulus must be monic of degree f")
        if e == 1:
            if self.eisenstein:
                raise ValueError("no Eisenstein polynomial expected when e = 1")
            return
        if len(self.eisenstein) != e or any(len(c) != f for c in self.eisenstein):
            raise ValueError("Eisenstein coefficients have the wrong shape")
        if any(x % p for c in self.eisenstein for x in c):
            raise ValueError("not Eisenstein: lower coefficients must be divisible by p")
        if all((x // p) % p == 0 for x in self.eisenstein[0]):
            raise ValueError("not Eisenstein: constant term must have valuation exactly 1")

    @property
    def d(self) -> int:
        return self.e * self.f

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def v2(self) -> int:
        """Normalised valuation of 2."""
        return self.e if self.p == 2 else 0

    def label(self) -> str:
        if self.d == 1:
            return f"Q_{self.p}"
        parts = [f"Q_{self.p}"]
        if self.f > 1:
            parts.append(f"unram{self.f}")
        if self.e > 1:
            if self.f == 1:
                terms = [f"{c[0]}" for c in self.eisenstein]
            else:
                terms = [str(list(c)) for c in self.eisenstein]
            parts.append(f"eis{self.e}[{','.join(terms)}]")
        return ":".join(parts)

    def to_dict(self):
        return {"p": self.p, "f": self.f, "e": self.e, "unram": list(self.unram),
                "eisenstein": [list(c) for c in self.eisenstein], "label": self.label()}

    @cached_property
    def structure(self) -> "_Structure":
        return _Structure(self)

    @cached_property
    def residue_field(self) -> FqField:
        return FqField(self.p, self.f, modulus=self.unram)

    def element(self, coords, prec=None) -> "LocalElement":
        return LocalElement(self, coords, prec)

    def embed(self, n: int, prec=None) -> "LocalElement":
        return LocalElement(self, (n,) + (0,) * (self.d - 1), prec)

    def uniformizer(self) -> "LocalElement":
        return LocalElement(self, self.structure.pi)


def qp_field(p: int) -> LocalField:
    return LocalField(p)


def unramified_field(p: int, f: int) -> LocalField:
    return LocalField(p, f, 1, find_irreducible(p, f).coeffs)


def ramified_field(p: int, lower_coeffs) -> LocalField:
    """Totally ramified L = Q_p[x]/(x^e + sum c_i x^i)."""
    return LocalField(p, 1, len(lower_coeffs), (0, 1), tuple((int(c),) for c in lower_coeffs))


# -- exact structure constants ---------------------------------------------

class _Structure:
    """Exact multiplication table and residue data for a LocalField."""

    def __init__(self, L: LocalField):
        self.L = L
        p, e, f = L.p, L.e, L.f
        self.p, self.e, self.f, self.d = p, e, f, e * f
        d = self.d
        self.slot_i = [s // f for s in range(d)]
        table = []
        for s1 in range(d):
            row = []
            for s2 in range(d):
                row.append(self._basis_product(s1, s2))
            table.append(row)
        self.table = table
        one = [0] * d
        one[0] = 1
        self.one = tuple(one)
        if e == 1:
            pi = [0] * d
            pi[0] = p
            self.pi = tuple(pi)
            self.w = self.one
        else:
            pi = [0] * d
            pi[f] = 1
            self.pi = tuple(pi)
            w = [0] * d
            for i, c in enumerate(L.eisenstein):
                for j, x in enumerate(c):
                    w[i * f + j] = -x // p
            self.w = tuple(w)
        self.F = L.residue_field
        self.q = self.F.q

    # O_K and O_L products with exact integers
    def _ok_mul(self, a, b):
        f = self.f
        m = self.L.unram
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                for j in range(f):
                    prod[k - f + j] -= c * m[j]
        return prod[:f]

    def _basis_product(self, s1, s2):
        e, f = self.e, self.f
        i1, j1 = divmod(s1, f)
        i2, j2 = divmod(s2, f)
        wa = [0] * f
        wb = [0] * f
        wa[j1] = 1
        wb[j2] = 1
        okc = self._ok_mul(wa, wb)
        # pi^(i1+i2) * okc, reduce pi powers >= e
        terms = [[0] * f for _ in range(max(2 * e - 1, 1))]
        terms[i1 + i2] = okc
        E = self.L.eisenstein
        for I in range(len(terms) - 1, e - 1, -1):
            c = terms[I]
            if any(c):
                for i in range(e):
                    t = self._ok_mul(c, E[i])
                    tgt = terms[I - e + i]
                    for j in range(f):
                        tgt[j] -= t[j]
                terms[I] = [0] * f
        out = []
        for i in range(e):
            out.extend(terms[i])
        return out

    def mul_exact(self, a, b):
        d = self.d
        out = [0] * d
        tab = self.table
        for s1 in range(d):
            x = a[s1]
            if not x:
                continue
            row = tab[s1]
            for s2 in range(d):
                y = b[s2]
                if not y:
                    continue
                xy = x * y
                for t, c in enumerate(row[s2]):
                    if c:
                        out[t] += xy * c
        return out

    def mul_mod(self, a, b, M):
        return [c % M for c in self.mul_exact(a, b)]

    def pi_power(self, k):
        r = list(self.one)
        for _ in range(k):
            r = self.mul_exact(r, self.pi)
        return r

    def residue_code(self, coords) -> int:
        """Residue of a unit given by coordinates (slot-0 block mod p)."""
        p = self.p
        code = 0
        for j in range(self.f - 1, -1, -1):
            code = code * p + coords[j] % p
        return code

    def lift_residue(self, code: int):
        p = self.p
        out = [0] * self.d
        for j in range(self.f):
            code, out[j] = divmod(code, p)
        return out

    def inverse_unit_mod(self, a, N):
        """Inverse of a unit mod p**N."""
        F = self.F
        M = self.p ** N
        r = self.residue_code(a)
        if r == 0:
            raise ZeroDivisionError("not a unit")
        y = self.lift_residue(F.inv(r))
        prec = 1
        while prec < self.e * N:
            ay = self.mul_mod(a, y, M)
            two_minus = [(-c) % M for c in ay]
            two_minus[0] = (two_minus[0] + 2) % M
            y = self.mul_mod(y, two_minus, M)
            prec *= 2
        return y

    @cached_property
    def residue_reps(self):
        out = []
        for code in range(self.q):
            out.append(tuple(self.lift_residue(code)))
        return out

    @cached_property
    def chi_table(self):
        """Quadratic character of residues by code (odd p)."""
        F = self.F
        return np.array([code != 0 and is_square_fq(F, code) for code in range(self.q)], dtype=bool)

    @cached_property
    def chi_w(self) -> bool:
        return bool(self.chi_table[self.residue_code(self.w)]) if self.p != 2 else True

    # residue characteristic 2: squares of units modulo pi^(2e+1)
    @cached_property
    def square_key_radix(self):
        e = self.e
        return [_ceil_div(2 * e + 1 - self.slot_i[s], e) for s in range(self.d)]

    def square_key(self, coords) -> int:
        code = 0
        for s in range(self.d - 1, -1, -1):
            m = 1 << self.square_key_radix[s]
            code = code * m + coords[s] % m
        return code

    @cached_property
    def unit_square_roots(self):
        """Map key(u mod pi^(2e+1)) -> a with a^2 = u mod pi^(2e+1), for p = 2."""
        e = self.e
        ranges = []
        for s in range(self.d):
            t = _ceil_div(e + 1 - self.slot_i[s], e)
            ranges.append(range(1 << max(t, 0)))
        out = {}
        for a in product(*ranges):
            if self.residue_code(a) == 0:
                continue
            k = self.square_key(self.mul_exact(a, a))
            out.setdefault(k, a)
        return out

    @cached_property
    def unit_square_table(self):
        size = 1 << sum(self.square_key_radix)
        tab = np.zeros(size, dtype=bool)
        for k in self.unit_square_roots:
            tab[k] = True
        return tab


# -- elements with tracked precision ----------------------------------------

class LocalElement:
    """Element of O_L (or L via negative-free scaling) known modulo pi^prec.

    ``prec=None`` means the coordinates are exact.
    """

    __slots__ = ("field", "coords", "prec")

    def __init__(self, field: LocalField, coords, prec=None):
        cs = [int(c) for c in coords]
        if len(cs) != field.d:
            raise ValueError("wrong number of coordinates")
        if prec is not None:
            if prec < 0:
                raise ValueError("negative precision")
            p, e, f = field.p, field.e, field.f
            for s in range(len(cs)):
                t = _ceil_div(prec - s // f, e)
                cs[s] = cs[s] % p ** t if t > 0 else 0
        self.field = field
        self.coords = tuple(cs)
        self.prec = prec

    def __repr__(self):
        return f"LocalElement({self.field.label()}, {list(self.coords)}, prec={self.prec})"

    def _coerce(self, other):
        if isinstance(other, LocalElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field.embed(int(other))

    def __add__(self, other):
        o = self._coerce(other)
        return LocalElement(self.field, [a + b for a, b in zip(self.coords, o.coords)], _pmin(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return LocalElement(self.field, [-a for a in self.coords], self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        prod = self.field.structure.mul_exact(self.coords, o.coords)
        va, vb = self._val_or_prec(), o._val_or_prec()
        if (va is None and self.prec is None) or (vb is None and o.prec is None):
            return LocalElement(self.field, [0] * self.field.d, None)  # exact zero factor
        prec = _pmin(None if self.prec is None else self.prec + vb,
                     None if o.prec is None else o.prec + va)
        return LocalElement(self.field, prod, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        r = self.field.embed(1)
        for _ in range(k):
            r = r * self
        return r

    def _val_or_prec(self):
        v = valuation(self)
        if v is BELOW_PRECISION:
            return self.prec
        return v

    def is_zero_known(self) -> bool:
        return not any(self.coords)

    def with_prec(self, prec):
        return LocalElement(self.field, self.coords, _pmin(self.prec, prec))


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _coords_valuation(L: LocalField, coords):
    best = None
    p, e, f = L.p, L.e, L.f
    for s, c in enumerate(coords):
        if c:
            v = e * vp_int(c, p) + s // f
            if best is None or v < best:
                best = v
    return best


def valuation(x: LocalElement):
    """Normalised valuation (v(pi) = 1), or BELOW_PRECISION."""
    v = _coords_valuation(x.field, x.coords)
    if v is None:
        return BELOW_PRECISION
    if x.prec is not None and v >= x.prec:
        return BELOW_PRECISION
    return v


def _divide_by_pi_power(S: _Structure, coords, k: int):
    """Exact quotient of coords by pi^k (requires v(coords) >= k).

    Uses pi^(e s - t) = p^s w^s pi^(-t): multiply by pi^t, divide by p^s, then
    multiply by w^(-s).  Returns (coords, digits_lost) where digits_lost = s.
    """
    e, p = S.e, S.p
    t = (-k) % e
    s = (k + t) // e
    z = list(coords)
    for _ in range(t):
        z = S.mul_exact(z, S.pi)
    ps = p ** s
    if any(c % ps for c in z):
        raise ArithmeticError("not divisible by the requested power of pi")
    z = [c // ps for c in z]
    return z, s


@dataclass(frozen=True)
class SquareTest:
    """Outcome of a squareness test: status is "yes", "no" or "needs_precision"."""
    status: str
    witness: LocalElement | None = None
    reason: str = ""


def _unit_part(x: LocalElement, v: int, digits: int):
    """u = x / pi^v modulo p^digits (coordinates)."""
    S = x.field.structure
    z, s = _divide_by_pi_power(S, x.coords, v)
    if s:
        M = S.p ** digits
        winv = S.inverse_unit_mod(S.w, digits + 1)
        ws = list(S.one)
        for _ in range(s):
            ws = S.mul_mod(ws, winv, M)
        z = S.mul_mod(z, ws, M)
    return z


def is_square_local(x: LocalElement) -> SquareTest:
    L = x.field
    S = L.structure
    p, e = L.p, L.e
    v = valuation(x)
    if v is BELOW_PRECISION:
        return SquareTest("needs_precision", reason="value below precision")
    if v % 2:
        return SquareTest("no", reason="odd valuation")
    prec = x.prec
    need = 1 if p != 2 else 2 * e + 1
    if prec is not None and prec - v < need:
        return SquareTest("needs_precision", reason="unit part not determined")
    avail = (prec - v) if prec is not None else 4 * e + 8 + v
    digits = _ceil_div(avail, e) + 1
    u = _unit_part(x, v, digits)
    if p != 2:
        code = S.residue_code(u)
        if not S.chi_table[code]:
            return SquareTest("no", reason="nonsquare residue")
        y0 = S.lift_residue(S.F.sqrt(code))
    else:
        key = S.square_key(u)
        if key not in S.unit_square_roots:
            return SquareTest("no", reason="unit not a square mod 4*pi")
        y0 = list(S.unit_square_roots[key])
    uel = LocalElement(L, u, avail)
    target = avail
    y = hensel_lift_root([-uel, 0, 1], LocalElement(L, y0, None), target)
    half = LocalElement(L, S.pi_power(v // 2), None)
    w = y * half
    return SquareTest("yes", w, reason="square")


def _poly_eval(coeffs, x: LocalElement) -> LocalElement:
    acc = x.field.embed(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _to_coords(L, c):
    if isinstance(c, LocalElement):
        return list(c.coords)
    out = [0] * L.d
    out[0] = int(c)
    return out


def hensel_lift_root(poly, a: LocalElement, prec: int | None = None) -> LocalElement:
    """Newton iteration from a, assuming v(f(a)) > 2 v(f'(a)).

    ``poly`` is a list of coefficients (ints or LocalElements, low to high).
    The result r satisfies f(r) = 0 to the returned precision and
    r = a mod pi^(v(f'(a)) + 1).
    """
    L = a.field
    S = L.structure
    p, e = L.p, L.e
    if prec is None:
        prec = a.prec
        if prec is None:
            raise ValueError("target precision required for exact starting value")
    coeffs = [_to_coords(L, c) for c in poly]
    cprec = None
    for c in poly:
        if isinstance(c, LocalElement):
            cprec = _pmin(cprec, c.prec)
    deriv = [[i * x for x in c] for i, c in enumerate(coeffs)][1:]

    def ev(cs, x, M):
        acc = [0] * L.d
        for c in reversed(cs):
            acc = S.mul_mod(acc, x, M)
            acc = [(u + w) % M for u, w in zip(acc, c)]
        return acc

    x = list(a.coords)
    for attempt in range(12):
        N = _ceil_div(prec, e) * (attempt + 1) + 8 + 4 * attempt
        M = p ** N
        fx = ev(coeffs, x, M)
        dfx = ev(deriv, x, M)
        vd = _coords_valuation(L, dfx)
        if vd is None or vd >= e * N:
            continue
        vf = _coords_valuation(L, fx)
        vf = e * N if vf is None else vf
        if vf <= 2 * vd:
            raise HenselError("Hensel condition v(f(a)) > 2 v(f'(a)) fails")
        if cprec is not None and cprec <= 2 * vd:
            raise HenselError("coefficient precision does not certify the Hensel condition")
        y = x
        done = False
        for _ in range(200):
            fy = ev(coeffs, y, M)
            vf = _coords_valuation(L, fy)
            if vf is None or vf >= e * N - e:
                done = e * N - e - vd >= prec
                break
            if vf - vd >= prec:
                done = True
                break
            dfy = ev(deriv, y, M)
            num, _ = _divide_by_pi_power(S, fy, vd)
            den, s = _divide_by_pi_power(S, dfy, vd)
            inv = S.inverse_unit_mod(den, N)
            step = S.mul_mod(num, inv, M)
            y = [(u - w) % M for u, w in zip(y, step)]
        if not done:
            continue
        out_prec = prec if cprec is None else min(prec, cprec - vd)
        return LocalElement(L, y, out_prec)
    raise HenselError("Newton iteration did not converge at available precision")


def residue_reps(L: LocalField):
    """One element of O_L per residue class (the zero class first)."""
    for c in L.structure.residue_reps:
        yield LocalElement(L, c, None)


# -- vectorised arithmetic mod p^N -------------------------------------------

class VectorRing:
    """Arithmetic in O_L / p^N on numpy arrays of shape (..., d)."""

    def __init__(self, L: LocalField, N: int):
        S = L.structure
        self.L, self.S, self.N = L, S, N
        p, d = L.p, L.d
        self.p, self.d, self.e, self.f = p, d, L.e, L.f
        self.M = M = p ** N
        safe = (M * M) * d * d < (1 << 62)
        self.dtype = np.int64 if safe else object
        T = np.empty((d * d, d), dtype=object)
        for s1 in range(d):
            for s2 in range(d):
                for t in range(d):
                    T[s1 * d + s2, t] = S.table[s1][s2][t] % M
        self.T = T.astype(self.dtype)
        self.slot_i = np.array(S.slot_i, dtype=np.int64)
        self._pi_pows = [np.array(S.one, dtype=object).astype(self.dtype)]
        self.eN = L.e * N
        winv = S.inverse_unit_mod(S.w, N)
        wp = [list(S.one)]
        for _ in range(N + 1):
            wp.append(S.mul_mod(wp[-1], winv, M))
        self.winv_pows = np.array(wp, dtype=object).astype(self.dtype)
        self.ppow = [p ** t for t in range(N + 1)]

    def array(self, rows):
        return np.array(rows, dtype=object).astype(self.dtype) % self.M

    def mul(self, A, B):
        M = self.M
        if self.d == 1:
            return (A * B) % M
        P = (A[..., :, None] * B[..., None, :]) % M
        shp = P.shape[:-2]
        P = P.reshape(shp + (self.d * self.d,))
        return (P @ self.T) % M

    def pi_power(self, k: int):
        while len(self._pi_pows) <= k:
            nxt = self.mul(self._pi_pows[-1], self.array(self.S.pi))
            self._pi_pows.append(nxt)
        return self._pi_pows[k]

    def vp(self, X):
        """p-adic valuation of each coordinate (N for zero)."""
        p, N = self.p, self.N
        if p == 2 and self.dtype == np.int64:
            low = X & (-X)
            with np.errstate(divide="ignore"):
                v = np.where(X == 0, N, np.log2(np.maximum(low, 1).astype(np.float64)).astype(np.int64))
            return v
        v = np.zeros(X.shape, dtype=np.int64)
        for t in range(1, N + 1):
            v += (X % self.ppow[t] == 0)
        return v

    def valuation(self, X):
        """Element valuations (eN where all digits vanish) and a known-mask."""
        v = self.vp(X) * self.e + self.slot_i
        val = v.min(axis=-1)
        known = val < self.eN
        return np.minimum(val, self.eN), known

    def square_status(self, Y, v, mask):
        """For rows where mask holds (Y has even known valuation v), decide
        whether Y is a square.  Returns (is_square, undetermined)."""
        n = Y.shape[0]
        sq = np.zeros(n, dtype=bool)
        und = np.zeros(n, dtype=bool)
        rows = np.nonzero(mask)[0]
        if rows.size == 0:
            return sq, und
        e, p, N = self.e, self.p, self.N
        vv = v[rows]
        t = (-vv) % e
        s = (vv + t) // e
        Z = Y[rows]
        if e > 1:
            for tt in np.unique(t):
                if tt:
                    sel = t == tt
                    Z[sel] = self.mul(Z[sel], self.pi_power(int(tt)))
        need = 1 if p != 2 else 3
        ok = (N - s) >= need
        und[rows[~ok]] = True
        if not ok.any():
            return sq, und
        rows, Z, s = rows[ok], Z[ok], s[ok]
        if self.dtype == np.int64:
            ps = np.power(p, s).astype(np.int64)
        else:
            ps = np.array([self.ppow[int(x)] for x in s], dtype=object)
        Z = Z // ps[:, None]
        Z = self.mul(Z, self.winv_pows[s])
        if p != 2:
            f = self.f
            code = np.zeros(len(rows), dtype=np.int64)
            for j in range(f - 1, -1, -1):
                code = code * p + (Z[:, j] % p).astype(np.int64)
            sq[rows] = self.S.chi_table[code]
        else:
            radix = self.S.square_key_radix
            code = np.zeros(len(rows), dtype=np.int64)
            for sl in range(self.d - 1, -1, -1):
                m = 1 << radix[sl]
                code = code * m + (Z[:, sl] % m).astype(np.int64)
            sq[rows] = self.S.unit_square_table[code]
        return sq, und


# -- enumeration of odd-degree extensions ------------------------------------

def _divisors(n):
    return [k for k in range(1, n + 1) if n % k == 0]


def _tame_fields(p, f, e, unram):
    F = FqField(p, f, modulus=unram)
    gen = F.generator()
    k = gcd(e, p ** f - 1)
    out = []
    for i in range(k):
        g = F.pow(gen, i)
        lift = F.digits(g)
        c0 = tuple(-p * x for x in lift)
        coeffs = (c0,) + tuple((0,) * f for _ in range(e - 1))
        out.append(LocalField(p, f, e, unram, coeffs))
    return out


def _vp_vec(c, p):
    vs = [vp_int(x, p) for x in c if x]
    return min(vs) if vs else None


def wild_eisenstein(p: int, f: int, e: int):
    """Canonical Eisenstein polynomials covering every totally ramified
    degree-e extension of the degree-f unramified field when p | e.

    With d = v(E'(pi)) (the different exponent), two Eisenstein polynomials
    whose coefficients agree mod p^t_k, where e*t_k + k > 2d - e + 2, define
    the same field (Krasner).  Coefficients are refined digit by digit until d
    is determined, then truncated to those digits.  Returns a sorted list of
    (d, coeffs) with coeffs[k] the O_K coordinates of the x^k coefficient.
    """
    vpe = vp_int(e, p)
    term_e = e * vpe + e - 1
    digits = list(product(range(p), repeat=f))
    found = set()

    def need_digits(dd, k):
        t = (2 * dd - e + 2 - k) // e + 1
        return max(t - 1, 0)

    def rec(cs, Ls):
        best = term_e
        pending = []
        for k in range(1, e):
            base = e * (vp_int(k, p) + 1) + k - 1
            v = _vp_vec(cs[k], p) if Ls[k] else None
            if v is not None:
                best = min(best, base + e * v)
            else:
                pending.append((base + e * Ls[k], k))
        pending.sort()
        if pending and pending[0][0] < best:
            extend(cs, Ls, pending[0][1])
            return
        dd = best
        need = [need_digits(dd, k) for k in range(e)]
        need[0] = max(need[0], 1)
        for k in range(e):
            if Ls[k] < need[k]:
                extend(cs, Ls, k)
                return
        trunc = tuple(tuple(p * (x % p ** need[k]) for x in cs[k]) for k in range(e))
        found.add((dd, trunc))

    def extend(cs, Ls, k):
        L = Ls[k]
        scale = p ** L
        for dg in digits:
            if k == 0 and L == 0 and not any(dg):
                continue
            new = list(cs)
            new[k] = tuple(c + scale * x for c, x in zip(cs[k], dg))
            nl = list(Ls)
            nl[k] = L + 1
            rec(new, nl)

    rec([(0,) * f for _ in range(e)], [0] * e)
    return sorted(found)


@lru_cache(maxsize=None)
def _wild_fields(p, f, e, dedupe):
    unram = find_irreducible(p, f).coeffs
    polys = wild_eisenstein(p, f, e)
    if not dedupe:
        return tuple(LocalField(p, f, e, unram, c) for _, c in polys)
    from .discsearch import has_root

    reps = []
    for dd, c in polys:
        cand = LocalField(p, f, e, unram, c)
        poly = [list(x) + [0] * (e * f - f) for x in c] + [[1] + [0] * (e * f - 1)]
        dup = False
        for rd, r in reps:
            if rd != dd:
                continue
            # embed O_K coordinates into O_L coordinates (slot i = 0)
            if has_root(r, poly):
                dup = True
                break
        if not dup:
            reps.append((dd, cand))
    return tuple(r for _, r in reps)


def enumerate_odd_extensions(p: int, dmax: int, dedupe: bool = False) -> list[LocalField]:
    """Representatives of every extension of Q_p of odd degree <= dmax.

    Ordered by degree, then unramified degree descending.  Without
    ``dedupe`` wild extensions may be listed more than once.
    """
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    out = []
    for d in range(1, dmax + 1, 2):
        for f in sorted(_divisors(d), reverse=True):
            e = d // f
            unram = find_irreducible(p, f).coeffs
            if e == 1:
                out.append(LocalField(p, f, 1, unram))
            elif e % p:
                out.extend(_tame_fields(p, f, e, unram))
            else:
                out.extend(_wild_fields(p, f, e, dedupe))
    return out
