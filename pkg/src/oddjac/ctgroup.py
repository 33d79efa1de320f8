"""Finite abelian groups with an antisymmetric Q/Z-valued pairing and an element c
with <x, x> = <x, c>.

The group is Z/n_1 + ... + Z/n_k with n_i | n_(i+1).  Pairing values are kept
as integers modulo the exponent E = n_k, so <x, y> = x G y^T / E where G is the
scaled Gram matrix.  Structural questions about subgroups are answered by
listing elements, which is cheap at the orders this module is meant for.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, prod

import numpy as np
import sympy

EVEN = "Even"
ODD = "Odd"

BRUTE_FORCE_ORDER = 1 << 10
ELEMENT_LIMIT = 1 << 16


class ConstructionFailed(RuntimeError):
    """A decomposition step failed on a group that passed validation."""

    def __init__(self, step: str, trace: dict):
        super().__init__(f"{step}: {trace}")
        self.step = step
        self.trace = trace


def _frac(v) -> Fraction:
    f = Fraction(v)
    return f - (f.numerator // f.denominator)


@dataclass(frozen=True)
class PairedGroup:
    invariant_factors: tuple
    gram: tuple
    c: tuple

    def __post_init__(self):
        ns = tuple(int(n) for n in self.invariant_factors)
        k = len(ns)
        if any(n < 2 for n in ns):
            raise ValueError("invariant factors must be at least 2")
        if any(ns[i + 1] % ns[i] for i in range(k - 1)):
            raise ValueError("invariant factors must form a divisibility chain")
        gram = tuple(tuple(_frac(v) for v in row) for row in self.gram)
        if len(gram) != k or any(len(r) != k for r in gram):
            raise ValueError("gram must be k x k")
        for i in range(k):
            for j in range(k):
                g = gram[i][j]
                if (ns[i] * g).denominator != 1 or (ns[j] * g).denominator != 1:
                    raise ValueError(f"gram[{i}][{j}] = {g} is not bilinear on Z/{ns[i]} x Z/{ns[j]}")
                if _frac(g + gram[j][i]) != 0:
                    raise ValueError(f"gram is not antisymmetric at ({i}, {j})")
        if len(self.c) != k:
            raise ValueError("c has the wrong length")
        c = tuple(int(x) % n for x, n in zip(self.c, ns))
        object.__setattr__(self, "invariant_factors", ns)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "c", c)

    # -- basic data ----------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def scaled_gram(self) -> np.ndarray:
        E = self.exponent
        return np.array([[int(v * E) for v in row] for row in self.gram], dtype=np.int64).reshape(self.rank, self.rank)

    def pair(self, x, y) -> Fraction:
        s = sum(xi * yj * self.gram[i][j] for i, xi in enumerate(x) for j, yj in enumerate(y))
        return _frac(s)

    def elements(self) -> np.ndarray:
        if self.order > ELEMENT_LIMIT:
            raise ValueError(f"group of order {self.order} is too large to list")
        if not self.invariant_factors:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.invariant_factors, dtype=np.int64)
        return grids.reshape(self.rank, -1).T.copy()

    def to_dict(self):
        return {
            "invariant_factors": list(self.invariant_factors),
            "gram": [[f"{v.numerator}/{v.denominator}" for v in row] for row in self.gram],
            "c": list(self.c),
        }

    @classmethod
    def from_dict(cls, d):
        gram = [[Fraction(v) for v in row] for row in d["gram"]]
        return cls(tuple(d["invariant_factors"]), tuple(map(tuple, gram)), tuple(d["c"]))


# -- element-level helpers -------------------------------------------------------

class _Elements:
    """All elements of a group with vectorised pairing."""

    def __init__(self, pg: PairedGroup):
        self.pg = pg
        self.n = np.array(pg.invariant_factors, dtype=np.int64)
        self.E = pg.exponent
        self.G = pg.scaled_gram()
        self.X = pg.elements()

    def reduce(self, X):
        return np.mod(X, self.n)

    def pair_with(self, X, y) -> np.ndarray:
        """<x, y> * E mod E for every row x of X."""
        w = (self.G @ np.asarray(y, dtype=np.int64)) % self.E
        return (X @ w) % self.E

    def self_pair(self, X) -> np.ndarray:
        return (np.einsum("ri,ij,rj->r", X, self.G, X)) % self.E

    def span(self, gens) -> np.ndarray:
        """Rows of the subgroup generated by gens."""
        k = self.pg.rank
        cur = {tuple([0] * k)}
        for g in gens:
            g = np.asarray(g, dtype=np.int64)
            order = _element_order(g, self.n)
            new = set()
            for s in cur:
                s = np.array(s, dtype=np.int64)
                for m in range(order):
                    new.add(tuple(np.mod(s + m * g, self.n)))
            cur = new
        return np.array(sorted(cur), dtype=np.int64).reshape(len(cur), k)

    def generators(self, H) -> list:
        """A small generating set of the subgroup whose rows are H."""
        gens = []
        have = {tuple([0] * self.pg.rank)}
        # larger-order elements first keeps the list short
        orders = np.array([_element_order(h, self.n) for h in H])
        for idx in np.argsort(-orders, kind="stable"):
            h = tuple(int(v) for v in H[idx])
            if h in have:
                continue
            gens.append(h)
            have = set(map(tuple, self.span(gens).tolist()))
            if len(have) == len(H):
                break
        return gens

    def degenerate_on(self, H) -> np.ndarray | None:
        """A nonzero h in H pairing trivially with all of H, or None."""
        gens = self.generators(H)
        if not gens:
            return None
        W = np.stack([(self.G @ np.array(g)) % self.E for g in gens], axis=1)
        vals = (H @ W) % self.E
        bad = np.nonzero(~vals.any(axis=1) & H.any(axis=1))[0]
        return H[bad[0]] if len(bad) else None


def _element_order(x, n) -> int:
    o = 1
    for xi, ni in zip(np.asarray(x).tolist(), np.asarray(n).tolist()):
        o = o * (ni // gcd(xi, ni)) // gcd(o, ni // gcd(xi, ni))
    return o


def structure(H: np.ndarray, n) -> tuple:
    """Invariant factors of the finite abelian group whose elements are the rows
    of H inside Z/n_1 + ... + Z/n_k."""
    size = len(H)
    n = np.asarray(n, dtype=np.int64)
    elementary = []
    for p in sympy.primefactors(size):
        counts = [1]
        j = 1
        while counts[-1] < p ** sympy.multiplicity(p, size):
            killed = np.all((p ** j * H) % n == 0, axis=1).sum()
            counts.append(int(killed))
            j += 1
        # number of cyclic factors of order >= p^j
        ge = [sympy.multiplicity(p, counts[j] // counts[j - 1]) for j in range(1, len(counts))]
        ge.append(0)
        for j in range(1, len(ge)):
            elementary += [p ** j] * (ge[j - 1] - ge[j])
    return _invariant_from_elementary(elementary)


def _invariant_from_elementary(elementary) -> tuple:
    by_p: dict = {}
    for q in elementary:
        p = sympy.primefactors(q)[0]
        by_p.setdefault(p, []).append(q)
    width = max((len(v) for v in by_p.values()), default=0)
    out = [1] * width
    for qs in by_p.values():
        qs = sorted(qs)
        for i, q in enumerate(qs):
            out[width - len(qs) + i] *= q
    return tuple(out)


def _elementary(factors) -> list:
    out = []
    for n in factors:
        for p, e in sympy.factorint(n).items():
            out.append(p ** e)
    return sorted(out)


def square_root_group(factors) -> tuple | None:
    """T with T x T isomorphic to the given group, or None."""
    el = _elementary(factors)
    half = []
    for q, m in Counter(el).items():
        if m % 2:
            return None
        half += [q] * (m // 2)
    return _invariant_from_elementary(half)


# -- validation -----------------------------------------------------------------

@dataclass
class Validation:
    ok: bool
    axiom: str | None = None
    witness: tuple | None = None
    detail: str = ""

    def to_dict(self):
        return {"ok": self.ok, "axiom": self.axiom,
                "witness": list(self.witness) if self.witness is not None else None,
                "detail": self.detail}


def _lattice_det(rows) -> int:
    """|det| of the full-rank lattice spanned by integer rows (echelon by gcd steps)."""
    rows = [list(r) for r in rows if any(r)]
    k = len(rows[0]) if rows else 0
    det = 1
    for col in range(k):
        piv = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(piv) > 1:
            piv.sort(key=lambda r: abs(r[col]))
            a = piv[0]
            nxt = [a]
            for r in piv[1:]:
                q = r[col] // a[col]
                r = [x - q * y for x, y in zip(r, a)]
                (nxt if r[col] else rest).append(r)
            piv = nxt
        if not piv:
            return 0
        det *= abs(piv[0][col])
        rows = [r for r in rest if any(r)]
    return det


def kernel_order_lattice(pg: PairedGroup) -> int:
    """Order of the kernel of G -> Hom(G, Q/Z), via a lattice index."""
    k, E = pg.rank, pg.exponent
    if k == 0:
        return 1
    G = pg.scaled_gram().tolist()
    rows = [list(r) for r in G] + [[E if i == j else 0 for j in range(k)] for i in range(k)]
    image = E ** k // _lattice_det(rows)
    return pg.order // image


def kernel_witness_brute(pg: PairedGroup):
    """A nonzero element pairing trivially with everything, or None."""
    el = _Elements(pg)
    vals = (el.X @ el.G) % el.E
    bad = np.nonzero(~vals.any(axis=1) & el.X.any(axis=1))[0]
    return tuple(int(v) for v in el.X[bad[0]]) if len(bad) else None


def validate(pg: PairedGroup) -> Validation:
    if pg.order <= BRUTE_FORCE_ORDER:
        w = kernel_witness_brute(pg)
        if w is not None:
            return Validation(False, "nondegenerate", w, "element pairs trivially with the whole group")
    else:
        ko = kernel_order_lattice(pg)
        if ko != 1:
            return Validation(False, "nondegenerate", None, f"pairing kernel has order {ko}")
    k = pg.rank
    for i in range(k):
        e = tuple(1 if j == i else 0 for j in range(k))
        lhs, rhs = pg.gram[i][i], pg.pair(e, pg.c)
        if lhs != rhs:
            return Validation(False, "self_pairing", e, f"<e{i+1},e{i+1}> = {lhs} but <e{i+1},c> = {rhs}")
    twice = tuple((2 * x) % n for x, n in zip(pg.c, pg.invariant_factors))
    if any(twice):
        return Validation(False, "c_two_torsion", pg.c, "2c is not zero")
    return Validation(True)


def parity_of(pg: PairedGroup) -> tuple[str, Fraction]:
    v = pg.pair(pg.c, pg.c)
    return (EVEN if v == 0 else ODD), v


# -- decomposition --------------------------------------------------------------

@dataclass
class DecompositionWitness:
    case: str  # "odd", "alternating" or "hyperbolic_block"
    T: tuple
    n: int | None = None
    a: tuple | None = None
    b: tuple | None = None
    complement: tuple = ()  # invariant factors of c-perp or V-perp
    checks: dict = field(default_factory=dict)

    def to_dict(self):
        return {"case": self.case, "t": list(self.T), "n": self.n,
                "a": list(self.a) if self.a else None, "b": list(self.b) if self.b else None,
                "complement": list(self.complement), "checks": self.checks}


def _in_multiple(c, n_factors, m) -> bool:
    """Is c in m*G?"""
    return all(ci % gcd(m, ni) == 0 for ci, ni in zip(c, n_factors))


def _divide(c, n_factors, m):
    """Some a with m*a = c (requires c in m*G)."""
    out = []
    for ci, ni in zip(c, n_factors):
        g = gcd(m, ni)
        mod = ni // g
        out.append((ci // g) * pow(m // g, -1, mod) % mod if mod > 1 else 0)
    return tuple(out)


def _require(checks, name, ok, trace):
    checks[name] = bool(ok)
    if not ok:
        raise ConstructionFailed(name, trace)


def decompose(pg: PairedGroup) -> DecompositionWitness:
    val = validate(pg)
    if not val.ok:
        raise ValueError(f"invalid paired group: {val.detail}")
    el = _Elements(pg)
    X, E, ns = el.X, el.E, pg.invariant_factors
    c = np.array(pg.c, dtype=np.int64)
    checks: dict = {}
    kind, cc = parity_of(pg)

    # the modified pairing <x, y^c> with y^c = y or y + c
    half = E // 2 if E % 2 == 0 else None
    with_c = el.pair_with(X, c)
    Xc = el.reduce(X + np.where(with_c[:, None] != 0, c[None, :], 0))
    mod_self = np.einsum("ri,ij,rj->r", X, el.G, Xc) % E
    _require(checks, "modified_pairing_alternating", not mod_self.any(),
             {"element": X[np.argmax(mod_self != 0)].tolist() if mod_self.any() else None})

    if kind == ODD:
        perp = X[with_c == 0]
        _require(checks, "c_not_in_c_perp", half is not None and int(with_c[_index(X, c)]) == half, {"c": pg.c})
        _require(checks, "direct_sum_order", 2 * len(perp) == pg.order, {"c_perp_order": len(perp)})
        _require(checks, "alternating_on_c_perp", not el.self_pair(perp).any(), {})
        w = el.degenerate_on(perp)
        _require(checks, "nondegenerate_on_c_perp", w is None, {"kernel_element": None if w is None else w.tolist()})
        comp = structure(perp, ns)
        T = square_root_group(comp)
        _require(checks, "c_perp_is_square", T is not None, {"c_perp": comp})
        return DecompositionWitness("odd", T, complement=comp, checks=checks)

    # involution check for the even case
    back = el.reduce(Xc + np.where(el.pair_with(Xc, c)[:, None] != 0, c[None, :], 0))
    _require(checks, "twist_is_involution", np.array_equal(back, X), {})
    mod_gram_rows = (X @ el.G) % E  # <x, e_j>
    # nondegeneracy of <x, y^c>: the y^c run over all of G, so it matches <x, y>
    _require(checks, "modified_pairing_nondegenerate",
             not (~mod_gram_rows.any(axis=1) & X.any(axis=1)).any(), {})

    if not any(pg.c):
        _require(checks, "alternating", not el.self_pair(X).any(), {})
        T = square_root_group(ns)
        _require(checks, "order_is_square", T is not None, {"group": ns})
        return DecompositionWitness("alternating", T, complement=ns, checks=checks)

    n = 1
    while _in_multiple(pg.c, ns, 2 ** n):
        n += 1
    a = np.array(_divide(pg.c, ns, 2 ** (n - 1)), dtype=np.int64)
    tors = X[np.all((2 ** n * X) % el.n == 0, axis=1)]
    hits = np.nonzero(el.pair_with(tors, c) == half)[0]
    _require(checks, "b_exists", len(hits) > 0, {"n": n})
    b = tors[hits[0]]
    ab = Fraction(int(el.pair_with(a[None, :], b)[0]), E)
    u = (ab * 2 ** n).numerator % 2 ** n
    _require(checks, "a_b_pairing_unit", ab.denominator == 2 ** n, {"<a,b>": str(ab)})
    a = el.reduce(a * pow(u, -1, 2 ** n))
    P = lambda x, y: pg.pair(x.tolist(), y.tolist())
    _require(checks, "c_equals_scaled_a", np.array_equal(el.reduce(2 ** (n - 1) * a), c), {"a": a.tolist()})
    _require(checks, "table_aa", P(a, a) == 0, {"<a,a>": str(P(a, a))})
    _require(checks, "table_ab", P(a, b) == Fraction(1, 2 ** n), {"<a,b>": str(P(a, b))})
    _require(checks, "table_bb", P(b, b) == Fraction(1, 2), {"<b,b>": str(P(b, b))})
    V = el.span([a, b])
    _require(checks, "v_order", len(V) == 4 ** n, {"order": len(V)})
    vperp = X[(el.pair_with(X, a) == 0) & (el.pair_with(X, b) == 0)]
    _require(checks, "direct_sum_order", len(V) * len(vperp) == pg.order, {"v_perp": len(vperp)})
    inter = {tuple(r) for r in V.tolist()} & {tuple(r) for r in vperp.tolist()}
    _require(checks, "v_meets_v_perp_trivially", len(inter) == 1, {"intersection": sorted(inter)})
    _require(checks, "alternating_on_v_perp", not el.self_pair(vperp).any(), {})
    w = el.degenerate_on(vperp)
    _require(checks, "nondegenerate_on_v_perp", w is None, {"kernel_element": None if w is None else w.tolist()})
    comp = structure(vperp, ns)
    Tp = square_root_group(comp)
    _require(checks, "v_perp_is_square", Tp is not None, {"v_perp": comp})
    T = _invariant_from_elementary(_elementary(Tp) + _elementary((2 ** n,)))
    return DecompositionWitness("hyperbolic_block", T, n, tuple(int(v) for v in a),
                                tuple(int(v) for v in b), comp, checks)


def _index(X, row) -> int:
    return int(np.nonzero(np.all(X == row, axis=1))[0][0])


# -- enumeration ------------------------------------------------------------------

def two_group_structures(order_bound: int):
    """Invariant-factor tuples of abelian 2-groups of order <= order_bound."""
    m = 0
    while 2 ** m <= order_bound:
        for part in sympy.utilities.iterables.partitions(m) if m else [{}]:
            exps = sorted(e for e, cnt in part.items() for _ in range(cnt))
            yield tuple(2 ** e for e in exps)
        m += 1


def _gram_choices(ns):
    """Per free entry, the allowed numerators over the entry's denominator."""
    k = len(ns)
    slots = []
    for i in range(k):
        slots.append(((i, i), 2))
    for i in range(k):
        for j in range(i + 1, k):
            slots.append(((i, j), gcd(ns[i], ns[j])))
    return slots


def _gram_from(ns, slots, values):
    k = len(ns)
    g = [[Fraction(0)] * k for _ in range(k)]
    for ((i, j), d), v in zip(slots, values):
        f = Fraction(v, d)
        g[i][j] = f
        g[j][i] = _frac(-f)
    return tuple(tuple(r) for r in g)


def _solve_c(ns, gram):
    """The 2-torsion c with <e_i, c> = <e_i, e_i>, or None."""
    k = len(ns)
    halves = [n // 2 for n in ns]
    for bits in itertools.product((0, 1), repeat=k):
        c = [h * b for h, b in zip(halves, bits)]
        if all(_frac(sum(gram[i][j] * c[j] for j in range(k)) - gram[i][i]) == 0 for i in range(k)):
            return tuple(c)
    return None


def gram_count(ns) -> int:
    return prod(d for _, d in _gram_choices(ns))


def enumerate_paired_groups(order_bound: int, c_options: str = "any", exhaustive_limit: int = 4096,
                            samples: int = 256, seed: int = 0):
    """Valid paired 2-groups of order <= order_bound.

    Groups whose Gram matrices number at most ``exhaustive_limit`` are listed
    completely; for larger ones ``samples`` random fills are drawn (seeded) and
    the valid ones yielded.  Since the pairing is nondegenerate, c is pinned
    down by the Gram matrix; ``c_options`` ("any", "zero", "nonzero") filters.
    """
    if order_bound > BRUTE_FORCE_ORDER:
        raise ValueError("enumeration is limited to order 2^10")
    rng = random.Random(seed)
    for ns in two_group_structures(order_bound):
        slots = _gram_choices(ns)
        total = gram_count(ns)
        if total <= exhaustive_limit:
            fills = itertools.product(*[range(d) for _, d in slots])
        else:
            fills = ([rng.randrange(d) for _, d in slots] for _ in range(samples))
        for vals in fills:
            gram = _gram_from(ns, slots, vals)
            c = _solve_c(ns, gram)
            if c is None:
                continue
            if c_options == "zero" and any(c) or c_options == "nonzero" and not any(c):
                continue
            pg = PairedGroup(ns, gram, c)
            if validate(pg).ok:
                yield pg


def is_square(n: int) -> bool:
    return isqrt(n) ** 2 == n
