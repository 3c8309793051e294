"""Exact prouniform measures on finite embedding sets.

Every measure is a ``fractions.Fraction``.  Embedding sets are stored as
integer arrays with one row per embedding and one column per domain vertex;
cylinders are fibres of restriction maps to sub-complexes.

Sector germs: an oriented germ of depth d at a vertex o is an isometric
embedding of the sector truncation {a, b ≥ 0, a + b ≤ d} sending the
origin to o and (1, 0) to a vertex of type type(o) + 1.  The uniform
measure on germs of depth d is the depth-d truncation of the harmonic
measure at o.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .complex import EmbeddingPlan, TypedComplex, iter_embeddings
from .errors import DepthInsufficientError, InputError, MeasureViolation, SymmetryViolation
from .model import (
    UNIT_VECTORS,
    Coord,
    CrazyDiamond,
    DecoratedTree,
    ElementaryExtension,
    coord_type,
    decompose_inclusion,
    expected_extension_count,
    lattice_complex,
    lattice_hull,
    length,
    sector_points,
)


# -- embedding sets -----------------------------------------------------------


class EmbeddingSet:
    """All isometric embeddings of a labelled domain extending ``pins``.

    ``pins`` maps domain labels to codomain vertices.  Rows of ``members``
    are sorted lexicographically.  Embeddings carry types by a global
    permutation unless ``typed`` is False.
    """

    def __init__(self, domain: TypedComplex, codomain: TypedComplex, pins: Optional[Dict[Hashable, int]] = None,
                 roots: Optional[Iterable[int]] = None, typed: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.pins = dict(pins or {})
        pinned = {domain.vertex(lab): v for lab, v in self.pins.items()}
        rows = list(iter_embeddings(domain, codomain, pinned=pinned, roots=roots, typed=typed))
        arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), domain.n)
        if len(arr):
            arr = arr[np.lexsort(arr.T[::-1])]
        self.members = arr

    @property
    def cardinality(self) -> int:
        return len(self.members)

    def columns(self, labels: Sequence[Hashable]) -> List[int]:
        return [self.domain.vertex(lab) for lab in labels]

    def restrict(self, labels: Sequence[Hashable]) -> List[Tuple[int, ...]]:
        cols = self.columns(labels)
        return [tuple(int(x) for x in row) for row in self.members[:, cols]]

    def uniform(self) -> Fraction:
        if not self.cardinality:
            raise MeasureViolation("empty embedding set has no uniform measure", {"pins": repr(self.pins)})
        return Fraction(1, self.cardinality)

    def pushforward(self, labels: Sequence[Hashable]) -> Dict[Tuple[int, ...], Fraction]:
        """Image of the uniform measure under restriction to ``labels``."""
        counts = Counter(self.restrict(labels))
        w = self.uniform()
        return {k: w * n for k, n in sorted(counts.items())}


def cylinder_measure(big: EmbeddingSet, partial: Dict[Hashable, int]) -> Fraction:
    """μ of {β : β extends ``partial``} under the uniform measure on ``big``."""
    if not big.cardinality:
        return Fraction(0)
    mask = np.ones(big.cardinality, dtype=bool)
    for lab, v in partial.items():
        mask &= big.members[:, big.domain.vertex(lab)] == v
    return Fraction(int(mask.sum()), big.cardinality)


@dataclass
class Report:
    suite: str
    instances: int = 0
    passed: int = 0
    failed: int = 0
    witnesses: List[dict] = field(default_factory=list)
    notes: Dict[str, object] = field(default_factory=dict)

    def check(self, ok: bool, witness: Optional[dict] = None) -> bool:
        self.instances += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if witness is not None and len(self.witnesses) < 20:
                self.witnesses.append(witness)
        return ok

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.instances > 0

    def merge(self, other: "Report") -> "Report":
        self.instances += other.instances
        self.passed += other.passed
        self.failed += other.failed
        self.witnesses.extend(other.witnesses[: max(0, 20 - len(self.witnesses))])
        for k, v in other.notes.items():
            self.notes[k] = v
        return self

    def to_dict(self) -> dict:
        return {"suite": self.suite, "instances": self.instances, "passed": self.passed,
                "failed": self.failed, "witnesses": self.witnesses, "notes": self.notes}


# -- chains of truncations ----------------------------------------------------


def check_chain(chain: Sequence[TypedComplex]) -> None:
    for a, b in zip(chain, chain[1:]):
        if a.labels is None or b.labels is None or not set(a.labels) <= set(b.labels):
            raise InputError("chain members must be labelled and nested")


def verify_restriction_pushforward(chain: Sequence[TypedComplex], codomain: TypedComplex,
                                   pins: Dict[Hashable, int]) -> Report:
    """(restriction)_* μ_{Y_j} = μ_{Y_i} memberwise for every i < j."""
    check_chain(chain)
    rep = Report("restriction")
    sets = [EmbeddingSet(y, codomain, pins) for y in chain]
    for i, j in itertools.combinations(range(len(chain)), 2):
        push = sets[j].pushforward(chain[i].labels)
        small = {tuple(int(x) for x in row): sets[i].uniform() for row in sets[i].members}
        rep.check(push == small, {"i": i, "j": j, "pushed": len(push), "direct": len(small)})
    return rep


def verify_disintegration(chain: Sequence[TypedComplex], codomain: TypedComplex, pins: Dict[Hashable, int],
                          levels: Optional[Sequence[int]] = None) -> Report:
    """μ^{α0}_{Y_k}(cyl) = Σ_{α_j} μ^{α0}_{Y_j}(α_j) μ^{α_j}_{Y_k}(cyl).

    Cylinders are fibres of restriction to each intermediate level i ≤ k;
    the inner measures μ^{α_j} are recomputed by separate enumerations.
    """
    check_chain(chain)
    rep = Report("disintegration")
    n = len(chain)
    top = EmbeddingSet(chain[-1], codomain, pins)
    for j in range(1, n - 1) if levels is None else levels:
        k = n - 1
        mid = EmbeddingSet(chain[j], codomain, pins)
        inner: Dict[Tuple[int, ...], EmbeddingSet] = {}
        for row in mid.members:
            alpha = {lab: int(row[mid.domain.vertex(lab)]) for lab in chain[j].labels}
            inner[tuple(int(x) for x in row)] = EmbeddingSet(chain[k], codomain, alpha)
        for i in range(1, k + 1):
            direct = top.pushforward(chain[i].labels)
            assembled: Dict[Tuple[int, ...], Fraction] = defaultdict(Fraction)
            w_mid = mid.uniform()
            for key, es in inner.items():
                for cyl, m in es.pushforward(chain[i].labels).items():
                    assembled[cyl] += w_mid * m
            rep.check(dict(assembled) == direct, {"inner_level": j, "cylinder_level": i})
    return rep


def verify_duality(chain: Sequence[TypedComplex], codomain: TypedComplex, pins: Dict[Hashable, int],
                   seed: int = 0) -> Report:
    """⟨φ, r^* f⟩ = ⟨r_* φ, f⟩ for random rational φ on Y_j and f on Y_i."""
    check_chain(chain)
    rep = Report("duality")
    rng = random.Random(seed)
    sets = [EmbeddingSet(y, codomain, pins) for y in chain]
    for i, j in itertools.combinations(range(len(chain)), 2):
        big, small = sets[j], sets[i]
        phi = [Fraction(rng.randint(0, 9), rng.randint(1, 9)) for _ in range(big.cardinality)]
        f_vals = {tuple(int(x) for x in row): Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for row in small.members}
        restricted = big.restrict(chain[i].labels)
        lhs = sum((p * f_vals[r] for p, r in zip(phi, restricted)), Fraction(0))
        push: Dict[Tuple[int, ...], Fraction] = defaultdict(Fraction)
        for p, r in zip(phi, restricted):
            push[r] += p
        rhs = sum((m * f_vals[r] for r, m in push.items()), Fraction(0))
        rep.check(lhs == rhs, {"i": i, "j": j, "lhs": str(lhs), "rhs": str(rhs)})
    return rep


# -- relative indices --------------------------------------------------------


@dataclass
class RelativeIndex:
    small: DecoratedTree
    big: DecoratedTree
    value: int
    verified: bool
    base_embeddings: int
    by_class: Dict[int, int] = field(default_factory=dict)
    expected: Optional[int] = None


def diamond_inclusion(small: DecoratedTree, big: DecoratedTree) -> Tuple[CrazyDiamond, CrazyDiamond, Dict[int, int]]:
    """Realise both diamonds and the label-matching inclusion small -> big."""
    if not small.contained_in(big):
        raise InputError("small diamond is not contained in big diamond")
    ys, yb = CrazyDiamond(small), CrazyDiamond(big)
    inc = {i: yb.complex.vertex(lab) for i, lab in enumerate(ys.complex.labels)}
    return ys, yb, inc


def extension_margin(yb: TypedComplex, image: Iterable[int]) -> int:
    """Largest distance from a vertex of ``yb`` to the image of the small diamond."""
    img = list(image)
    d = yb.distances
    return int(d[:, img].min(axis=1).max())


def admissible_bases(ball, domain: TypedComplex, margin: int) -> np.ndarray:
    """All isometric embeddings of ``domain`` into B(center, r - margin)."""
    keep = ball.interior(margin)
    if not keep:
        raise DepthInsufficientError("no interior left at this margin")
    sub = ball.complex.induced(keep)
    rows = [tuple(keep[x] for x in emb) for emb in iter_embeddings(domain, sub, typed=True)]
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), domain.n)


def count_extensions_per_base(big: TypedComplex, inc: Dict[int, int], codomain: TypedComplex,
                              bases: np.ndarray) -> np.ndarray:
    pinned_ids = sorted(inc.values())
    plan = EmbeddingPlan(big, pinned_ids)
    out = np.zeros(len(bases), dtype=np.int64)
    for k, row in enumerate(bases):
        pins = {inc[i]: int(row[i]) for i in inc}
        out[k] = sum(1 for _ in iter_embeddings(big, codomain, pins, plan=plan, typed=True))
    return out


def extension_count_verify(small: DecoratedTree, big: DecoratedTree, ball, margin: Optional[int] = None,
                           classify: Optional[Callable[[Sequence[int]], int]] = None) -> RelativeIndex:
    """Count extensions along small ⊂ big for every admissible base embedding.

    Admissible bases land in the ball of radius r - margin; the default
    margin is the largest distance of a new vertex from the small diamond,
    which keeps every extension inside the ball.  With ``classify`` the
    constancy is required per class of base embedding instead of globally
    (used for the point-to-edge step, split by the type of the new vertex).
    """
    ys, yb, inc = diamond_inclusion(small, big)
    k = extension_margin(yb.complex, inc.values()) if margin is None else margin
    bases = admissible_bases(ball, ys.complex, k)
    if not len(bases):
        raise DepthInsufficientError("small diamond does not fit in the interior")
    counts = count_extensions_per_base(yb.complex, inc, ball.complex, bases)
    if classify is None:
        values = set(int(x) for x in counts)
        if len(values) != 1:
            i0 = int(np.argmin(counts))
            i1 = int(np.argmax(counts))
            raise SymmetryViolation("extension counts depend on the base embedding", {
                "small": small.to_dict(), "big": big.to_dict(),
                "base_a": bases[i0].tolist(), "count_a": int(counts[i0]),
                "base_b": bases[i1].tolist(), "count_b": int(counts[i1])})
        value = values.pop()
        if value <= 0:
            raise SymmetryViolation("no extension exists", {"small": small.to_dict(), "big": big.to_dict()})
        return RelativeIndex(small, big, value, True, len(bases))
    by_class: Dict[int, set] = defaultdict(set)
    return_counts = {}
    for row, cnt in zip(bases, counts):
        by_class[classify(row)].add(int(cnt))
    for cls, vals in by_class.items():
        if len(vals) != 1:
            raise SymmetryViolation("extension counts vary within a class", {"class": cls, "values": sorted(vals)})
        return_counts[cls] = vals.pop()
    return RelativeIndex(small, big, sum(return_counts.values()), True, len(bases), return_counts)


def point_edge_classes(ball, small: DecoratedTree, big: DecoratedTree) -> RelativeIndex:
    """Point ⊂ edge counts split by the type offset of the new vertex."""
    ys, yb, inc = diamond_inclusion(small, big)
    c = ball.complex
    bases = admissible_bases(ball, ys.complex, 1)
    per: Dict[int, set] = defaultdict(set)
    for row in bases:
        x = int(row[0])
        split = Counter((c.types[w] - c.types[x]) % 3 for w in c.neighbors[x])
        for offset, cnt in split.items():
            per[offset].add(cnt)
    classes = {}
    for off, vals in per.items():
        if len(vals) != 1:
            raise SymmetryViolation("point-to-edge counts vary", {"offset": off, "values": sorted(vals)})
        classes[off] = vals.pop()
    total = extension_count_verify(small, big, ball)
    total.by_class = classes
    return total


def chain_expected_product(small: DecoratedTree, big: DecoratedTree, q: int) -> Tuple[int, List[ElementaryExtension]]:
    steps = decompose_inclusion(small, big)
    cur = small
    prod = 1
    for st in steps:
        prod *= expected_extension_count(st, cur, q)
        cur = st.apply(cur)
    return prod, steps


def relative_index_product(ball, chain: Sequence[DecoratedTree]) -> int:
    """Product of verified indices along consecutive inclusions (1 for length 0)."""
    prod = 1
    for a, b in zip(chain, chain[1:]):
        prod *= extension_count_verify(a, b, ball).value
    return prod


# -- sector germs ----------------------------------------------------------------


class GermSet:
    """Oriented sector germs of a fixed depth at a base vertex."""

    def __init__(self, c: TypedComplex, base: int, depth: int, ball=None):
        if ball is not None and ball.depth(base) + depth > ball.radius:
            raise DepthInsufficientError(f"germs of depth {depth} at {base} leave the ball")
        self.c = c
        self.base = base
        self.depth = depth
        self.points = sorted(sector_points(depth))
        self.domain = lattice_complex(self.points)
        self.col = {p: self.domain.vertex(p) for p in self.points}
        if depth == 0:
            self.members = np.asarray([[base]], dtype=np.int64)
        else:
            es = EmbeddingSet(self.domain, c, {(0, 0): base})
            plus = es.members[:, self.col[(1, 0)]]
            want = (c.types[base] + 1) % 3
            keep = np.asarray([c.types[int(v)] == want for v in plus], dtype=bool)
            self.members = es.members[keep]
        self.index = {tuple(int(x) for x in row): i for i, row in enumerate(self.members)}

    def __len__(self) -> int:
        return len(self.members)

    def at(self, p: Coord) -> np.ndarray:
        return self.members[:, self.col[p]]

    def containing(self, z: int) -> np.ndarray:
        """Boolean mask of the shadow Ω_base(z) at this depth."""
        return (self.members == z).any(axis=1)

    def through(self, p: Coord, z: int) -> np.ndarray:
        return self.at(p) == z

    def truncate(self, depth: int) -> List[Tuple[int, ...]]:
        pts = sorted(sector_points(depth))
        cols = [self.col[p] for p in pts]
        return [tuple(int(x) for x in row) for row in self.members[:, cols]]

    def plus_ray(self) -> List[Tuple[int, ...]]:
        cols = [self.col[(k, 0)] for k in range(self.depth + 1)]
        return [tuple(int(x) for x in row) for row in self.members[:, cols]]


def germ_count(q: int, depth: int) -> int:
    """Oriented germs of depth d: (q²+q+1)(q+1) q^{3(d-1)}."""
    if depth == 0:
        return 1
    return (q * q + q + 1) * (q + 1) * q ** (3 * (depth - 1))


def harmonic_measure(ball, o: int, z: int, depth: Optional[int] = None) -> Fraction:
    """μ_Δ^o(Ω_o(z)) from germs at the given depth (default σ(o, z) length)."""
    from .building import sigma

    lam = sigma(ball, o, z)
    d = length(lam) if depth is None else depth
    if d < length(lam):
        raise DepthInsufficientError("depth smaller than the length of σ(o, z)")
    gs = GermSet(ball.complex, o, d, ball)
    return Fraction(int(gs.containing(z).sum()), len(gs))


# -- martingale sets -------------------------------------------------------------


def shadow_of(gs: GermSet, row: int, lam: Coord) -> np.ndarray:
    """Ω_λ(C) for the germ ``row``: germs sharing its vertex at position λ."""
    return gs.at(lam) == gs.at(lam)[row]


def shadow_identities(gs: GermSet, row: int, m: int, n: int) -> Dict[str, object]:
    """Ω_{m,n}(ξ) ∩ E_n(v) versus E_{m,n}(ξ) and the mass ratios, for germ ``row``.

    λ_n = (n, 0) on the + wall and λ_{m,n} = (n, m) on the parallel wall
    at distance m.  Needs depth ≥ m + n + 1.
    """
    if gs.depth < m + n + 1:
        raise DepthInsufficientError("depth must be at least m + n + 1")
    om_mn = shadow_of(gs, row, (n, m))
    om_mn1 = shadow_of(gs, row, (n + 1, m))
    e_n = shadow_of(gs, row, (n, 0)) & ~shadow_of(gs, row, (n + 1, 0))
    e_mn = om_mn & ~om_mn1
    N = len(gs)
    return {
        "identity": bool(np.array_equal(om_mn & e_n, e_mn)),
        "inclusion": bool(not (om_mn & e_n & ~e_mn).any()),
        "mu_omega": Fraction(int(om_mn.sum()), N),
        "mu_omega_next": Fraction(int(om_mn1.sum()), N),
        "mu_e": Fraction(int(e_mn.sum()), N),
    }


def conditional_expectation(gs: GermSet, f: Sequence[Fraction], lam: Coord) -> List[Fraction]:
    """E(f | F_λ): average of f over the class of germs sharing the vertex at λ."""
    keys = gs.at(lam)
    sums: Dict[int, Fraction] = defaultdict(Fraction)
    sizes: Counter = Counter()
    for k, val in zip(keys, f):
        sums[int(k)] += val
        sizes[int(k)] += 1
    return [sums[int(k)] / sizes[int(k)] for k in keys]


def tower_property(gs: GermSet, f: Sequence[Fraction], j: int, k: int) -> bool:
    """E(E(f|F_k)|F_j) = E(f|F_j) and E(E(f|F_j)|F_k) = E(f|F_j) for j ≤ k."""
    ej = conditional_expectation(gs, f, (j, 0))
    ek = conditional_expectation(gs, f, (k, 0))
    return conditional_expectation(gs, ek, (j, 0)) == ej and conditional_expectation(gs, ej, (k, 0)) == ej


def random_rational_function(n: int, seed: int) -> List[Fraction]:
    rng = random.Random(seed)
    return [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(n)]


# -- change of base point ---------------------------------------------------------


class GermTransfer:
    """Germs at x of depth d mapped to germs at an adjacent y of depth d - 1.

    The x-germ β is extended over the lattice hull of its domain and a unit
    vector p with p -> y; the extension is unique and p + Λ_{d-1} lies in
    the hull, giving the germ of the same chamber at y.
    """

    def __init__(self, c: TypedComplex, gx: GermSet):
        self.c = c
        self.gx = gx
        self.d_out = gx.depth - 1
        self.out_points = sorted(sector_points(self.d_out))
        self._plans: Dict[Coord, tuple] = {}

    def _plan(self, p: Coord):
        if p not in self._plans:
            region = lattice_hull(self.gx.points + [p])
            dom = lattice_complex(region)
            pinned = sorted(dom.vertex(q) for q in self.gx.points + [p])
            self._plans[p] = (dom, EmbeddingPlan(dom, pinned))
        return self._plans[p]

    def candidates(self, y: int) -> List[Coord]:
        dt = (self.c.types[y] - self.c.types[self.gx.base]) % 3
        return [p for p in UNIT_VECTORS if coord_type(p) == dt]

    def transfer(self, row: int, y: int) -> Tuple[Coord, Tuple[int, ...]]:
        beta = self.gx.members[row]
        found = []
        for p in self.candidates(y):
            if p in self.gx.col:
                if int(beta[self.gx.col[p]]) == y:
                    found.append((p, tuple(int(beta[self.gx.col[(p[0] + a, p[1] + b)]]) for a, b in self.out_points)))
                continue
            dom, plan = self._plan(p)
            pins = {dom.vertex(q): int(beta[self.gx.col[q]]) for q in self.gx.points}
            pins[dom.vertex(p)] = y
            try:
                emb = next(iter_embeddings(dom, self.c, pins, plan=plan), None)
            except InputError:
                emb = None
            if emb is not None:
                found.append((p, tuple(int(emb[dom.vertex((p[0] + a, p[1] + b))]) for a, b in self.out_points)))
        if len(found) != 1:
            raise DepthInsufficientError(f"germ transfer found {len(found)} positions for y", )
        return found[0]


@dataclass
class RNRow:
    x: int
    y: int
    cylinder: Tuple[int, ...]
    h: Optional[Coord]
    mu_x: Fraction
    mu_y: Fraction

    @property
    def lhs(self) -> Fraction:
        return self.mu_x / self.mu_y

    def rhs(self, q: int, sign: int = 1, ell: Callable[[Coord], int] = length) -> Fraction:
        return Fraction(q) ** (2 * sign * ell(self.h))


def radon_nikodym_rows(ball, x: int, y: int, gx: Optional[GermSet] = None) -> List[RNRow]:
    """μ^x and μ^y of every depth-2 cylinder at y, with h = σ(x,z) - σ(y,z)."""
    c = ball.complex
    if not c.adjacent(x, y):
        raise InputError("x and y must be adjacent")
    gx = gx if gx is not None else GermSet(c, x, 3, ball)
    gy = GermSet(c, y, 2, ball)
    tr = GermTransfer(c, gx)
    hit: Counter = Counter()
    hs: Dict[Tuple[int, ...], set] = defaultdict(set)
    ypts = tr.out_points
    for row in range(len(gx)):
        _p, gamma = tr.transfer(row, y)
        hit[gamma] += 1
        beta = gx.members[row]
        pos_x = {int(beta[gx.col[w]]): w for w in gx.points}
        for w2, z in zip(ypts, gamma):
            if z in pos_x:
                w = pos_x[z]
                hs[gamma].add((w[0] - w2[0], w[1] - w2[1]))
    rows = []
    ny = len(gy)
    nx = len(gx)
    for trow in gy.truncate(2):
        h = hs.get(trow)
        hval = next(iter(h)) if h and len(h) == 1 else None
        rows.append(RNRow(x, y, trow, hval, Fraction(hit.get(trow, 0), nx), Fraction(1, ny)))
    stray = set(hit) - set(gy.truncate(2))
    if stray:
        raise MeasureViolation("transferred germ is not an oriented germ at y", {"x": x, "y": y})
    return rows
