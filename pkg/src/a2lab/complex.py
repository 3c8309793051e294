"""Typed 2-dimensional simplicial complexes and isometric embeddings.

A ``TypedComplex`` has dense integer vertex ids, a type colour in {0, 1, 2}
per vertex, edges and triangles.  An isometric embedding is an injective
vertex map that preserves 1-skeleton distance and is simplex-saturated: a
codomain simplex whose vertices all lie in the image is the image of a
domain simplex.

The backtracking engine ``iter_embeddings`` enumerates every isometric
embedding extending a partial assignment.  Domain vertices are placed in
order of distance from the pinned set (ties broken by smallest id), and
each candidate is filtered against the distances to every vertex placed
before it.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from typing import Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import InputError

Edge = Tuple[int, int]
Triangle = Tuple[int, int, int]

_CHUNK = 512


class TypedComplex:
    """Immutable finite simplicial complex with 3-coloured vertices.

    ``labels`` optionally attaches a hashable label to every vertex (model
    coordinates, group words...) and ``index`` maps labels back to ids.
    When ``triangles`` is None the flag completion is used: every 3-clique
    of the 1-skeleton becomes a triangle.
    """

    def __init__(
        self,
        types: Sequence[int],
        edges: Iterable[Sequence[int]],
        triangles: Optional[Iterable[Sequence[int]]] = None,
        labels: Optional[Sequence[Hashable]] = None,
        check_connected: bool = True,
    ):
        self.n = len(types)
        self.types = tuple(int(t) % 3 for t in types)
        norm_edges = set()
        for e in edges:
            a, b = int(e[0]), int(e[1])
            if a == b:
                raise InputError(f"loop at vertex {a}")
            norm_edges.add((a, b) if a < b else (b, a))
        self.edges = frozenset(norm_edges)
        nbrs: List[List[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise InputError(f"edge ({a}, {b}) uses a vertex outside 0..{self.n - 1}")
            nbrs[a].append(b)
            nbrs[b].append(a)
        self.neighbors: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(x)) for x in nbrs)
        self._nbr_sets = [frozenset(x) for x in self.neighbors]
        self._dist: Optional[np.ndarray] = None
        self._cliques: Optional[List[Triangle]] = None
        if triangles is None:
            self.triangles = frozenset(self.three_cliques())
        else:
            self.triangles = frozenset(tuple(sorted(int(v) for v in t)) for t in triangles)
        self.labels = tuple(labels) if labels is not None else None
        self.index: Optional[Dict[Hashable, int]] = None
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise InputError("labels must have one entry per vertex")
            self.index = {lab: i for i, lab in enumerate(self.labels)}
            if len(self.index) != self.n:
                raise InputError("vertex labels must be distinct")
        self._validate(check_connected)

    def _validate(self, check_connected: bool) -> None:
        for a, b in self.edges:
            if self.types[a] == self.types[b]:
                raise InputError(f"adjacent vertices {a}, {b} share type {self.types[a]}")
        for t in self.triangles:
            a, b, c = t
            if len(set(t)) != 3:
                raise InputError(f"degenerate triangle {t}")
            for e in ((a, b), (a, c), (b, c)):
                if e not in self.edges:
                    raise InputError(f"triangle {t} is missing edge {e}")
            if {self.types[a], self.types[b], self.types[c]} != {0, 1, 2}:
                raise InputError(f"triangle {t} does not carry all three types")
        if check_connected and self.n and not self.is_connected():
            raise InputError("complex is not connected")

    # -- basic queries -------------------------------------------------

    def __repr__(self) -> str:
        return f"TypedComplex(n={self.n}, edges={len(self.edges)}, triangles={len(self.triangles)})"

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._nbr_sets[a]

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def vertex(self, label: Hashable) -> int:
        if self.index is None or label not in self.index:
            raise InputError(f"no vertex labelled {label!r}")
        return self.index[label]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(self.bfs_layers(0)[1]) == self.n

    def bfs_layers(self, source: int) -> Tuple[List[List[int]], Dict[int, int]]:
        dist = {source: 0}
        layers = [[source]]
        frontier = [source]
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.neighbors[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            if nxt:
                layers.append(sorted(nxt))
            frontier = nxt
        return layers, dist

    def three_cliques(self) -> List[Triangle]:
        if self._cliques is None:
            out = []
            for a, b in sorted(self.edges):
                for c in self._nbr_sets[a] & self._nbr_sets[b]:
                    if c > b:
                        out.append((a, b, c))
            self._cliques = sorted(out)
        return self._cliques

    def is_flag(self) -> bool:
        return len(self.three_cliques()) == len(self.triangles)

    @property
    def distances(self) -> np.ndarray:
        """All-pairs 1-skeleton distances (int16, -1 when unreachable)."""
        if self._dist is None:
            n = self.n
            rows, cols = [], []
            for a, b in self.edges:
                rows += [a, b]
                cols += [b, a]
            graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
            out = np.empty((n, n), dtype=np.int16)
            for start in range(0, n, _CHUNK):
                idx = np.arange(start, min(n, start + _CHUNK))
                block = shortest_path(graph, unweighted=True, directed=False, indices=idx)
                block[np.isinf(block)] = -1
                out[start:start + len(idx)] = block.astype(np.int16)
            out.setflags(write=False)
            self._dist = out
        return self._dist

    def distance(self, u: int, v: int) -> int:
        return int(self.distances[u, v])

    def diameter(self) -> int:
        return int(self.distances.max()) if self.n else 0

    def induced(self, vertices: Iterable[int]) -> "TypedComplex":
        """Full subcomplex on ``vertices``; labels become the old ids (or old labels)."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[a], pos[b]) for a, b in self.edges if a in pos and b in pos]
        tris = [tuple(pos[x] for x in t) for t in self.triangles if all(x in pos for x in t)]
        labels = [self.labels[v] for v in keep] if self.labels is not None else keep
        return TypedComplex([self.types[v] for v in keep], edges, tris, labels=labels)

    # -- serialisation -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": i, "type": t} for i, t in enumerate(self.types)],
            "edges": [list(e) for e in sorted(self.edges)],
            "triangles": [list(t) for t in sorted(self.triangles)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TypedComplex":
        try:
            verts = sorted(data["vertices"], key=lambda v: int(v["id"]))
            ids = [int(v["id"]) for v in verts]
            if ids != list(range(len(ids))):
                raise InputError("vertex ids must be dense non-negative integers")
            types = [int(v["type"]) for v in verts]
            if any(t not in (0, 1, 2) for t in types):
                raise InputError("vertex types must be 0, 1 or 2")
            return cls(types, data["edges"], data["triangles"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed complex: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


class SimplicialMap:
    """Vertex assignment from ``domain`` into ``codomain``."""

    def __init__(self, domain: TypedComplex, codomain: TypedComplex, assignment: Sequence[int]):
        if len(assignment) != domain.n:
            raise InputError("assignment must cover every domain vertex")
        self.domain = domain
        self.codomain = codomain
        self.assignment = tuple(int(v) for v in assignment)

    def __call__(self, v: int) -> int:
        return self.assignment[v]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SimplicialMap)
            and self.domain is other.domain
            and self.codomain is other.codomain
            and self.assignment == other.assignment
        )

    def __hash__(self) -> int:
        return hash(self.assignment)

    def __repr__(self) -> str:
        return f"SimplicialMap({list(self.assignment)})"

    def compose(self, inner: "SimplicialMap") -> "SimplicialMap":
        """self ∘ inner."""
        return SimplicialMap(inner.domain, self.codomain, [self.assignment[v] for v in inner.assignment])

    def is_simplicial(self) -> bool:
        cod = self.codomain
        a = self.assignment
        if any(not cod.adjacent(a[x], a[y]) for x, y in self.domain.edges):
            return False
        return all(tuple(sorted(a[v] for v in t)) in cod.triangles for t in self.domain.triangles)

    def is_isometric(self) -> bool:
        return check_isometric_embedding(self)


def graph_distance(c: TypedComplex, u: int, v: int) -> int:
    for x in (u, v):
        if not (isinstance(x, (int, np.integer)) and 0 <= x < c.n):
            raise InputError(f"vertex {x!r} is not in the complex")
    d = c.distance(u, v)
    if d < 0:
        raise InputError("complex is not connected")
    return d


def check_isometric_embedding(m: SimplicialMap) -> bool:
    """Injective, distance preserving and simplex-saturated."""
    dom, cod = m.domain, m.codomain
    img = np.asarray(m.assignment, dtype=np.int64)
    if len(set(m.assignment)) != dom.n:
        return False
    if dom.n == 0:
        return True
    if not np.array_equal(cod.distances[np.ix_(img, img)], dom.distances):
        return False
    # edges: distance 1 in both, so edge saturation already holds
    for clique in dom.three_cliques():
        in_dom = clique in dom.triangles
        in_cod = tuple(sorted(int(img[v]) for v in clique)) in cod.triangles
        if in_dom != in_cod:
            return False
    return True


class EmbeddingPlan:
    """Placement order and distance constraints for one domain/pin layout."""

    def __init__(self, domain: TypedComplex, pinned: Sequence[int]):
        if domain.n == 0:
            raise InputError("empty domain")
        if not domain.is_connected():
            raise InputError("domain complex must be connected")
        self.domain = domain
        self.pinned = tuple(pinned)
        order = list(self.pinned)
        seen = set(order)
        if not order:
            order = [0]
            seen = {0}
        # breadth-first from the pinned set, ties by smallest id
        frontier = sorted(seen)
        while frontier:
            nxt = set()
            for v in frontier:
                for w in domain.neighbors[v]:
                    if w not in seen:
                        nxt.add(w)
            nxt_sorted = sorted(nxt)
            order.extend(nxt_sorted)
            seen.update(nxt_sorted)
            frontier = nxt_sorted
        self.order = order
        pos = {v: i for i, v in enumerate(order)}
        self.start = len(self.pinned) if self.pinned else 1
        d = domain.distances
        self.anchor = []
        self.earlier = []
        self.required = []
        for k, v in enumerate(order):
            if k < self.start:
                self.anchor.append(-1)
                self.earlier.append(np.zeros(0, dtype=np.int64))
                self.required.append(np.zeros(0, dtype=np.int16))
                continue
            placed = [w for w in domain.neighbors[v] if pos[w] < k]
            self.anchor.append(min(placed, key=lambda w: pos[w]))
            prev = np.asarray(order[:k], dtype=np.int64)
            self.earlier.append(prev)
            self.required.append(d[v, prev].astype(np.int16))
        self.non_triangle_cliques = [c for c in domain.three_cliques() if c not in domain.triangles]


def iter_embeddings(
    domain: TypedComplex,
    codomain: TypedComplex,
    pinned: Optional[Dict[int, int]] = None,
    roots: Optional[Iterable[int]] = None,
    plan: Optional[EmbeddingPlan] = None,
    typed: bool = False,
) -> Iterator[Tuple[int, ...]]:
    """Yield every isometric embedding extending ``pinned`` as a tuple.

    ``roots`` restricts the image of the first domain vertex when nothing
    is pinned.  The pinned assignment must itself be isometric.  With
    ``typed`` the map must also carry types by one global permutation,
    which rules out bent images of one-dimensional pieces.
    """
    pinned = dict(pinned or {})
    if plan is None:
        plan = EmbeddingPlan(domain, sorted(pinned))
    elif tuple(sorted(pinned)) != plan.pinned:
        raise InputError("plan does not match the pinned vertices")
    dc = codomain.distances
    dd = domain.distances
    keys = list(pinned)
    for a in keys:
        if not 0 <= pinned[a] < codomain.n:
            raise InputError(f"pinned image {pinned[a]} is not a codomain vertex")
    for a, b in itertools.combinations(keys, 2):
        if dc[pinned[a], pinned[b]] != dd[a, b]:
            raise InputError("pinned assignment is not isometric")
    need_tri_check = bool(plan.non_triangle_cliques) or not codomain.is_flag()
    order = plan.order
    n = domain.n
    img = np.full(n, -1, dtype=np.int64)
    placed_img = np.full(n, -1, dtype=np.int64)
    for k, v in enumerate(order[: len(plan.pinned)]):
        img[v] = pinned[v]
        placed_img[k] = pinned[v]
    cod_nbrs = [np.asarray(x, dtype=np.int64) for x in codomain.neighbors] if n > 1 else None
    dom_types = domain.types
    cod_types = np.asarray(codomain.types, dtype=np.int64)
    first_of_type: Dict[int, int] = {}
    for k, v in enumerate(order):
        first_of_type.setdefault(dom_types[v], k)
    if typed and plan.pinned:
        seen_types: Dict[int, int] = {}
        for v in plan.pinned:
            if seen_types.setdefault(dom_types[v], codomain.types[pinned[v]]) != codomain.types[pinned[v]]:
                return
        if len(set(seen_types.values())) != len(seen_types):
            return

    def type_filter(k: int, cands: np.ndarray) -> np.ndarray:
        t = dom_types[order[k]]
        pos = first_of_type[t]
        if pos < k:
            return cands[cod_types[cands] == cod_types[placed_img[pos]]]
        used = [cod_types[placed_img[p]] for tt, p in first_of_type.items() if tt != t and p < k]
        return cands[~np.isin(cod_types[cands], used)] if used else cands

    def candidates(k: int) -> np.ndarray:
        if k == 0 and not plan.pinned:
            pool = np.arange(codomain.n, dtype=np.int64) if roots is None else np.asarray(sorted(set(roots)), dtype=np.int64)
            return pool
        anchor_img = img[plan.anchor[k]]
        cands = cod_nbrs[anchor_img]
        prev_imgs = placed_img[:k]
        ok = (dc[np.ix_(cands, prev_imgs)] == plan.required[k]).all(axis=1)
        cands = cands[ok]
        return type_filter(k, cands) if typed else cands

    def finish() -> bool:
        if not need_tri_check:
            return True
        m = SimplicialMap(domain, codomain, img.tolist())
        return check_isometric_embedding(m)

    start = plan.start if plan.pinned else 0
    if start >= n:
        if finish():
            yield tuple(int(x) for x in img)
        return
    stack_cands: List[np.ndarray] = [candidates(start)]
    stack_pos = [0]
    k = start
    while stack_cands:
        cands = stack_cands[-1]
        i = stack_pos[-1]
        if i >= len(cands):
            stack_cands.pop()
            stack_pos.pop()
            k -= 1
            if k >= start:
                img[order[k]] = -1
            continue
        stack_pos[-1] = i + 1
        c = int(cands[i])
        v = order[k]
        img[v] = c
        placed_img[k] = c
        if k + 1 == n:
            if finish():
                yield tuple(int(x) for x in img)
            img[v] = -1
            continue
        k += 1
        stack_cands.append(candidates(k))
        stack_pos.append(0)


def count_embeddings(domain, codomain, pinned=None, roots=None, plan=None, typed=False) -> int:
    return sum(1 for _ in iter_embeddings(domain, codomain, pinned, roots, plan, typed))


def enumerate_extensions(
    small: TypedComplex,
    big: TypedComplex,
    inclusion: SimplicialMap,
    alpha: SimplicialMap,
) -> List[SimplicialMap]:
    """All isometric β: big → X with β ∘ inclusion = alpha, in lexicographic order."""
    if inclusion.domain is not small or inclusion.codomain is not big:
        raise InputError("inclusion must map small into big")
    if alpha.domain is not small:
        raise InputError("alpha must be defined on the small complex")
    if not big.is_connected():
        raise InputError("big complex must be connected")
    if not check_isometric_embedding(inclusion):
        raise InputError("inclusion is not an isometric embedding")
    if not check_isometric_embedding(alpha):
        raise InputError("alpha is not an isometric embedding")
    pinned = {inclusion(v): alpha(v) for v in range(small.n)}
    found = [SimplicialMap(big, alpha.codomain, emb) for emb in iter_embeddings(big, alpha.codomain, pinned)]
    found.sort(key=lambda m: m.assignment)
    return found


# -- convexity ------------------------------------------------------------


def geodesic_interval(c: TypedComplex, a: int, b: int) -> np.ndarray:
    d = c.distances
    return np.nonzero(d[a] + d[b] == d[a, b])[0]


def is_convex_subcomplex(c: TypedComplex, sub: Iterable[int]) -> bool:
    """Closed under 1-skeleton geodesics of ``c`` and connected.

    The subcomplex is taken to be the full (induced) subcomplex on ``sub``,
    so simplex saturation holds by construction.
    """
    s = sorted(set(sub))
    if not s:
        raise InputError("empty vertex subset")
    mask = np.zeros(c.n, dtype=bool)
    mask[s] = True
    d = c.distances
    arr = np.asarray(s)
    for i, a in enumerate(s):
        # every w with d(a,w) + d(w,b) = d(a,b) for some b in s must be in s
        da = d[a]
        tot = da[None, :] + d[arr[i:]]
        on = (tot == d[a, arr[i:]][:, None]).any(axis=0)
        if (on & ~mask).any():
            return False
    return _connected_subset(c, s)


def _connected_subset(c: TypedComplex, s: Sequence[int]) -> bool:
    inside = set(s)
    seen = {s[0]}
    queue = deque([s[0]])
    while queue:
        v = queue.popleft()
        for w in c.neighbors[v]:
            if w in inside and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(inside)


def convex_hull(c: TypedComplex, seed: Iterable[int]) -> frozenset:
    """Smallest geodesically closed vertex set containing ``seed``."""
    s = set(seed)
    if not s:
        raise InputError("empty seed")
    d = c.distances
    pending = list(itertools.combinations(sorted(s), 2))
    while pending:
        new = set()
        for a, b in pending:
            for w in np.nonzero(d[a] + d[b] == d[a, b])[0]:
                w = int(w)
                if w not in s:
                    new.add(w)
        if not new:
            break
        old = sorted(s)
        s |= new
        pending = [(a, b) for a in sorted(new) for b in old] + list(itertools.combinations(sorted(new), 2))
    return frozenset(s)


def connected_subsets(c: TypedComplex, max_size: int) -> Iterator[frozenset]:
    """Every connected vertex subset of size ≤ max_size, each exactly once."""
    # classic enumeration: grow from the minimum vertex, extension set kept
    # to vertices larger than the root that are not yet excluded
    for root in range(c.n):
        yield from _grow({root}, {w for w in c.neighbors[root] if w > root}, {root}, root, c, max_size)


def _grow(current, extension, excluded, root, c, max_size):
    yield frozenset(current)
    if len(current) >= max_size:
        return
    ext = sorted(extension)
    blocked = set(excluded)
    for i, w in enumerate(ext):
        rest = set(ext[i + 1:])
        new_ext = set(rest)
        blocked_now = blocked | set(ext[: i + 1])
        for x in c.neighbors[w]:
            if x > root and x not in blocked_now and x not in current:
                new_ext.add(x)
        yield from _grow(current | {w}, new_ext, blocked_now | {w}, root, c, max_size)
