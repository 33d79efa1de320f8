"""Breadth-first residue-disc search over O_L, vectorised with numpy.

A disc is {x0 + pi^k t : t in O_L}.  On it a polynomial becomes
g(t) = sum b_j t^j with b_j = D_j(x0) pi^(k j), D_j = f^(j)/j!.  All digits
are taken mod p^N, so any decision made here holds for every lift of the
known coefficients:

* value at the centre a nonzero square                  -> point found
* v(f(x0)) > 2 v(f'(x0)), v(f(x0)) - v(f'(x0)) >= k    -> Hensel root (y = 0)
* v(b_0) < v(b_j) for all j >= 1 and v(b_0) odd         -> no point in the disc
* v(b_0) + 2 v(2) < v(b_j) for all j >= 1, not a square -> no point in the disc
  (then g(t)/b_0 is 1 mod 4*pi, so g(t) has the square class of b_0)
* otherwise split into the q sub-discs of radius k + 1.

Since f is squarefree the valuations v(b_j) for j >= 1 grow with k while
v(b_0) stays bounded away from roots, so every branch stops once k exceeds
about v(disc) + 2 v(2) + 1.  When the digits run out first the branch is
reported as stuck and the caller raises precision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .qp import LocalField, VectorRing


@dataclass
class SearchOutcome:
    status: str  # "yes", "no" or "needs_precision"
    chart: int | None = None
    center: tuple | None = None
    radius: int | None = None
    kind: str | None = None  # "square" or "root"
    nodes: int = 0
    counts: dict = field(default_factory=dict)
    refuted: list | None = None
    precision: int = 0


_rings: dict = {}


def vector_ring(L: LocalField, N: int) -> VectorRing:
    key = (L, N)
    r = _rings.get(key)
    if r is None:
        if len(_rings) > 256:
            _rings.clear()
        r = VectorRing(L, N)
        _rings[key] = r
    return r


def _taylor_table(ring: VectorRing, charts):
    n = max(len(c) for c, _ in charts) - 1
    d = ring.d
    tab = np.zeros((len(charts), n + 1, n + 1, d), dtype=object)
    for ci, (coeffs, _) in enumerate(charts):
        for i, c in enumerate(coeffs):
            for j in range(i + 1):
                b = comb(i, j)
                for s in range(d):
                    tab[ci, j, i - j, s] = (b * c[s]) % ring.M
    return tab.astype(ring.dtype), n


def disc_search(ring: VectorRing, charts, mode: str = "square", record: bool = False,
                max_rows: int = 2_000_000) -> SearchOutcome:
    """Search the given charts.

    ``charts`` is a list of (coefficients, start radius); coefficients are
    coordinate tuples (low degree first).  ``mode`` "square" looks for
    points on y^2 = g(x), mode "root" for zeros of g.
    """
    L = ring.L
    d, M, eN = ring.d, ring.M, ring.eN
    v2 = L.v2
    tab, n = _taylor_table(ring, charts)
    reps = ring.array(L.structure.residue_reps)  # (q, d)
    q = reps.shape[0]
    X = np.zeros((len(charts), d), dtype=ring.dtype)
    C = np.arange(len(charts))
    K = np.array([k for _, k in charts], dtype=np.int64)
    kmax = eN + 2 * v2 + 4
    jj = np.arange(n + 1)
    out = SearchOutcome("no", refuted=[] if record else None, precision=ring.N)
    counts = {"odd_valuation": 0, "nonsquare": 0, "no_zero": 0}
    stuck_any = False
    while X.shape[0]:
        R = X.shape[0]
        out.nodes += R
        coef = tab[C]  # (R, j, i, d)
        acc = np.zeros((R, n + 1, d), dtype=ring.dtype)
        Xb = X[:, None, :]
        for i in range(n, -1, -1):
            acc = (ring.mul(acc, Xb) + coef[:, :, i, :]) % M
        V, known = ring.valuation(acc)
        VB = V + K[:, None] * jj[None, :]
        v0 = V[:, 0]
        known0 = known[:, 0]
        if n >= 1:
            mrest = VB[:, 1:].min(axis=1)
            # unscaled Hensel at the centre: the root r has
            # v(r - x0) = v(f(x0)) - v(f'(x0)), which must reach the radius
            hensel = known[:, 1] & (v0 > 2 * V[:, 1]) & (v0 - V[:, 1] >= K)
        else:
            mrest = np.full(R, 1 << 40)
            hensel = np.zeros(R, dtype=bool)
        if mode == "square":
            even0 = known0 & (v0 % 2 == 0)
            sq, und = ring.square_status(acc[:, 0, :], v0, even0)
            found = hensel | sq
        else:
            sq = np.zeros(R, dtype=bool)
            found = hensel
        if found.any():
            idx = int(np.argmax(found))
            out.status = "yes"
            out.chart = int(C[idx])
            out.center = tuple(int(c) for c in X[idx])
            out.radius = int(K[idx])
            out.kind = "square" if sq[idx] else "root"
            out.counts = counts
            return out
        stable = known0 & (v0 < mrest)
        if mode == "square":
            no_odd = stable & (v0 % 2 == 1)
            no_sq = even0 & (v0 + 2 * v2 < mrest) & ~und
            no = no_odd | no_sq
            stuck = ~known0 | (even0 & und & (v0 + 2 * v2 < mrest))
            counts["odd_valuation"] += int(no_odd.sum())
            counts["nonsquare"] += int((no_sq & ~no_odd).sum())
        else:
            no = stable
            no_odd = no
            stuck = ~known0
            counts["no_zero"] += int(no.sum())
        stuck = (stuck | (K >= kmax)) & ~no
        if stuck.any():
            stuck_any = True
        if record and no.any():
            for idx in np.nonzero(no)[0]:
                reason = "odd_valuation" if no_odd[idx] else "nonsquare"
                if mode != "square":
                    reason = "no_zero"
                out.refuted.append((int(C[idx]), tuple(int(c) for c in X[idx]), int(K[idx]), reason))
        split = ~(no | stuck)
        if not split.any():
            break
        Xs, Cs, Ks = X[split], C[split], K[split]
        if Xs.shape[0] * q > max_rows:
            stuck_any = True
            break
        # children x0 + pi^k r
        pk = np.stack([ring.pi_power(int(k)) for k in Ks])  # (R', d)
        offs = ring.mul(pk[:, None, :], reps[None, :, :])  # (R', q, d)
        X = ((Xs[:, None, :] + offs) % M).reshape(-1, d)
        C = np.repeat(Cs, q)
        K = np.repeat(Ks + 1, q)
    out.counts = counts
    out.status = "needs_precision" if stuck_any else "no"
    return out


def has_root(L: LocalField, coeffs, N0: int = 8, cap: int = 1 << 12) -> bool:
    """Does the polynomial with coefficient coordinates ``coeffs`` (exact
    integers, low degree first) have a root in O_L?"""
    N = N0
    while N <= cap:
        ring = vector_ring(L, N)
        res = disc_search(ring, [(coeffs, 0)], mode="root")
        if res.status != "needs_precision":
            return res.status == "yes"
        N *= 2
    raise ArithmeticError("precision cap reached while root finding")
