"""Local deficiency of hyperelliptic curves y^2 = f(x), deg f <= 2g+2.

A place v is deficient when the curve has no k_v-rational divisor of degree
g - 1.  For odd g that never happens; for even g it is equivalent to having
no point over any extension of odd degree <= g + 1, which is decided here by
exhaustive disc search, with the residue screens as shortcuts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import comb

from .discsearch import disc_search, vector_ring
from .fq import FqPoly, Lemma16Certificate, lemma15_screen, prime_field
from .fq import lemma16_certificate as _coeff_certificate
from .qp import (BELOW_PRECISION, LocalElement, LocalField, enumerate_odd_extensions,
                 hensel_lift_root, is_square_local, valuation, vp_int)
from .realroots import negative_definite, sturm_count

DEFICIENT = "Deficient"
NOT_DEFICIENT = "NotDeficient"
UNDECIDED = "Undecided"

PRECISION_CAP = 1 << 14


# -- discriminant --------------------------------------------------------------

def _bareiss_det(m):
    m = [list(r) for r in m]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * piv - mik * row_k[j]) // prev
        prev = piv
    return sign * m[n - 1][n - 1]


def resultant(a, b) -> int:
    """Sylvester resultant of integer polynomials (coefficients low to high)."""
    a = list(a)
    b = list(b)
    da, db = len(a) - 1, len(b) - 1
    if da < 0 or db < 0:
        return 0
    size = da + db
    if size == 0:
        return 1
    rows = []
    ar, br = a[::-1], b[::-1]
    for i in range(db):
        rows.append([0] * i + ar + [0] * (size - da - 1 - i))
    for i in range(da):
        rows.append([0] * i + br + [0] * (size - db - 1 - i))
    return _bareiss_det(rows)


def binary_discriminant(coeffs) -> int:
    """Discriminant of the binary form sum a_i x^i z^(n-i), n = len - 1.

    Equals the discriminant of f when a_n != 0 (so b^2 - 4ac for n = 2); a
    vanishing top coefficient is handled by an SL_2(Z) substitution z -> z + kx,
    which leaves the form discriminant unchanged.
    """
    a = [int(c) for c in coeffs]
    n = len(a) - 1
    if n < 1 or not any(a):
        return 0
    if n == 1:
        return 1
    if a[n] == 0:
        for k in range(1, n + 2):
            if sum(a[i] * k ** (n - i) for i in range(n + 1)):
                break
        b = [0] * (n + 1)
        # F(x, kx + z): coefficient of x^j z^(n-j)
        for i in range(n + 1):
            if a[i]:
                for j in range(i, n + 1):
                    b[j] += a[i] * comb(n - i, j - i) * k ** (j - i)
        a = b
    der = [i * a[i] for i in range(1, n + 1)]
    r = resultant(a, der)
    sgn = -1 if (n * (n - 1) // 2) % 2 else 1
    q, rem = divmod(sgn * r, a[n])
    assert rem == 0
    return q




# -- curves ----------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    """y^2 = sum a_i x^i with a_0 first and formal degree 2g+2.

    Global mode: exact integer coefficients (``p`` is None).  Local mode: the
    coefficients are only known modulo p**precision.
    """
    genus: int
    coeffs: tuple
    p: int | None = None
    precision: int | None = None

    def __post_init__(self):
        n = 2 * self.genus + 2
        cs = tuple(int(c) for c in self.coeffs)
        if len(cs) > n + 1:
            raise ValueError(f"expected at most {n + 1} coefficients for genus {self.genus}")
        cs = cs + (0,) * (n + 1 - len(cs))
        if self.p is not None:
            if self.precision is None or self.precision < 1:
                raise ValueError("local-mode curves need a positive precision")
            M = self.p ** self.precision
            cs = tuple(c % M for c in cs)
        object.__setattr__(self, "coeffs", cs)
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")
        if self.p is None and self.discriminant == 0:
            raise ValueError("singular model: discriminant vanishes")
        if self.p is not None and self.discriminant % self.p ** self.precision == 0:
            raise ValueError("discriminant not certified nonzero at this precision")

    @classmethod
    def local(cls, genus, coeffs, p, precision):
        return cls(genus, tuple(coeffs), p, precision)

    @property
    def degree(self) -> int:
        return 2 * self.genus + 2

    @property
    def is_local(self) -> bool:
        return self.p is not None

    @cached_property
    def discriminant(self) -> int:
        return binary_discriminant(self.coeffs)

    def f_star(self) -> tuple:
        return tuple(reversed(self.coeffs))

    def to_dict(self):
        d = {"genus": self.genus, "coeffs": list(self.coeffs)}
        if self.p is not None:
            d.update(p=self.p, precision=self.precision)
        return d


def discriminant(c: Curve) -> int:
    return c.discriminant


# -- point search ------------------------------------------------------------------

@dataclass
class PointSearch:
    """Result of :func:`has_point_over`.  status is "yes", "no" or
    "needs_precision".  For "yes", (x, y) lies on chart 1 (y^2 = f(x)) or
    chart 2 (y^2 = f*(u), u = 1/x)."""
    status: str
    field: LocalField
    chart: int | None = None
    x: LocalElement | None = None
    y: LocalElement | None = None
    kind: str | None = None
    nodes: int = 0
    counts: dict = field(default_factory=dict)
    refuted: list | None = None
    precision: int = 0

    def to_dict(self):
        d = {"status": self.status, "field": self.field.label(), "nodes": self.nodes,
             "precision_digits": self.precision}
        if self.status == "yes":
            d.update(chart=self.chart, kind=self.kind, x=list(self.x.coords),
                     y=list(self.y.coords), witness_precision=self.y.prec)
        else:
            d["refutations"] = dict(self.counts)
            if self.refuted is not None:
                d["refuted_discs"] = [
                    {"chart": ch + 1, "center": list(ctr), "radius": k, "reason": why}
                    for ch, ctr, k, why in self.refuted]
        return d


def _start_digits(c: Curve, L: LocalField) -> int:
    if c.is_local:
        return c.precision
    vd = vp_int(c.discriminant, L.p)
    return max(8, 2 * vd + 2 * (1 if L.p == 2 else 0) + 4)


def _embed(L, coeffs):
    pad = (0,) * (L.d - 1)
    return [(a,) + pad for a in coeffs]


def _run_search(c: Curve, L: LocalField, N: int, record: bool):
    ring = vector_ring(L, N)
    charts = [(_embed(L, c.coeffs), 0), (_embed(L, c.f_star()), 1)]
    return disc_search(ring, charts, mode="square", record=record)


def has_point_over(c: Curve, L: LocalField, record: bool = False, witness: bool = True,
                   cap: int = PRECISION_CAP) -> PointSearch:
    """Does the smooth projective model of c have an L-point?"""
    if c.is_local and c.p != L.p:
        raise ValueError("field and curve have different residue characteristic")
    N = _start_digits(c, L)
    while True:
        res = _run_search(c, L, N, record)
        if res.status != "needs_precision" or c.is_local or 2 * N > cap:
            break
        N *= 2
    out = PointSearch(res.status, L, nodes=res.nodes, counts=res.counts,
                      refuted=res.refuted, precision=N)
    if res.status == "yes":
        out.chart = res.chart + 1
        out.kind = res.kind
        if witness:
            out.x, out.y = _witness(c, L, res, N)
    return out


def _witness(c: Curve, L: LocalField, res, N: int):
    coeffs = c.coeffs if res.chart == 0 else c.f_star()
    prec = L.e * N if c.is_local else None
    poly = [L.embed(a, prec) for a in coeffs]
    x0 = LocalElement(L, res.center, None)
    if res.kind == "root":
        target = L.e * N
        x = hensel_lift_root(poly, x0, target)
        return x, L.embed(0, x.prec)
    acc = L.embed(0, prec)
    for a in reversed(poly):
        acc = acc * x0 + a
    if acc.prec is None:
        acc = acc.with_prec(L.e * N)
    sq = is_square_local(acc)
    if sq.status != "yes":
        raise AssertionError("disc search reported a square the element test rejects")
    return x0, sq.witness


def verify_point(c: Curve, pt: PointSearch) -> bool:
    """Check y^2 = f(x) (or f*(u)) to the precision carried by the witness."""
    L = pt.field
    coeffs = c.coeffs if pt.chart == 1 else c.f_star()
    acc = L.embed(0)
    for a in reversed(coeffs):
        acc = acc * pt.x + a
    diff = pt.y * pt.y - acc
    v = valuation(diff)
    return v is BELOW_PRECISION or (diff.prec is not None and v >= diff.prec)


# -- deficiency --------------------------------------------------------------------

@dataclass
class DeficiencyVerdict:
    place: str
    decision: str
    certificate: dict = field(default_factory=dict)

    @property
    def deficient(self) -> bool:
        return self.decision == DEFICIENT

    def to_dict(self):
        return {"place": self.place, "decision": self.decision, "certificate": self.certificate}


def lemma16_certificate(c: Curve, p: int) -> Lemma16Certificate | None:
    """Certificate that c is deficient at odd p, read off f mod p^2, or None."""
    if p == 2:
        raise ValueError("odd p only")
    if c.genus % 2 or (c.is_local and c.precision < 2):
        return None
    return _coeff_certificate(c.coeffs, p, c.genus)


def deficient_at_finite(c: Curve, p: int, fast_paths: bool = True, record: bool = False,
                        dedupe: bool = True, cap: int = PRECISION_CAP) -> DeficiencyVerdict:
    """Decide whether c is deficient at the prime p."""
    place = str(p)
    if c.is_local and c.p != p:
        raise ValueError("local curve sampled at a different prime")
    g = c.genus
    if g % 2:
        return DeficiencyVerdict(place, NOT_DEFICIENT, {"reason": "odd genus"})
    if fast_paths and p != 2:
        fbar = FqPoly(prime_field(p), c.coeffs)
        if not fbar.is_zero():
            scr = lemma15_screen(fbar, c.degree)
            if scr.certain:
                return DeficiencyVerdict(place, NOT_DEFICIENT, {"reason": "residue screen"})
        need = g + 1
        if not c.is_local or c.precision >= need:
            D = c.discriminant
            if D % p ** need:
                return DeficiencyVerdict(place, NOT_DEFICIENT,
                                         {"reason": "discriminant valuation", "vp_disc": vp_int(D, p) if D else None})
        cert = lemma16_certificate(c, p)
        if cert is not None:
            return DeficiencyVerdict(place, DEFICIENT, {"reason": "unit-square certificate", **cert.to_dict()})
    fields = enumerate_odd_extensions(p, g + 1, dedupe=dedupe)
    log = []
    stuck = None
    for L in fields:
        res = has_point_over(c, L, record=record, witness=not c.is_local, cap=cap)
        if res.status == "yes":
            cert = {"reason": "point", "field": L.to_dict(), "chart": res.chart, "kind": res.kind}
            if res.x is not None:
                cert.update(x=list(res.x.coords), y=list(res.y.coords), precision=res.y.prec)
            return DeficiencyVerdict(place, NOT_DEFICIENT, cert)
        if res.status == "needs_precision":
            stuck = res
        log.append(res.to_dict())
    if stuck is not None:
        return DeficiencyVerdict(place, UNDECIDED, {"reason": "precision", "digits": stuck.precision,
                                                   "searched": log})
    return DeficiencyVerdict(place, DEFICIENT, {"reason": "exhaustive search",
                                                "max_degree": g + 1, "searched": log})


def deficient_at_infinity(c: Curve) -> DeficiencyVerdict:
    if c.genus % 2:
        return DeficiencyVerdict("inf", NOT_DEFICIENT, {"reason": "odd genus"})
    if c.coeffs[-1] < 0 and negative_definite(list(c.coeffs)):
        return DeficiencyVerdict("inf", DEFICIENT, {"reason": "negative definite", "real_roots": 0})
    return DeficiencyVerdict("inf", NOT_DEFICIENT, _real_point(c))


def _real_point(c: Curve) -> dict:
    a = list(c.coeffs)
    while a and a[-1] == 0:
        a.pop()

    def val(x):
        return sum(Fraction(ai) * x ** i for i, ai in enumerate(a))
    for x in [0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2)]:
        if val(x) >= 0:
            return {"reason": "real point", "x": str(x)}
    if c.coeffs[-1] > 0:
        return {"reason": "point at infinity"}
    return {"reason": "real root", "real_roots": sturm_count(a)}
