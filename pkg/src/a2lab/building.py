"""Balls of Ã₂ buildings from triangle presentations.

A triangle presentation over a projective plane of order q gives a group
generated by ``a_x`` (one per point) subject to ``a_x a_y a_z = 1`` for each
triple.  The group acts simply transitively on the vertices of a thick Ã₂
building whose 1-skeleton is the Cayley graph on the ``a_x`` and whose
triangles are ``{g, g a_x, g a_x a_y}``.

The ball is computed by coset enumeration (Hasselgrove-Leech-Trotter style
with a union-find coincidence routine) restricted to bounded depth, then
certified by checking every interior link against the projective-plane
axioms.  Generator ``x`` is ``a_x`` and ``x + n`` is its inverse, where n is
the number of points.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .complex import TypedComplex, iter_embeddings
from .errors import ConstructionError, DepthInsufficientError, InputError, StructureError
from .model import Coord, lattice_complex, lattice_distance, lattice_hull, parallelogram_points


# -- projective planes ------------------------------------------------------


@dataclass(frozen=True)
class ProjectivePlane:
    q: int
    points: Tuple
    lines: Tuple[FrozenSet, ...]

    @property
    def incidence(self) -> List[Tuple]:
        return [(p, i) for i, line in enumerate(self.lines) for p in sorted(line)]

    def line_through(self, p, r) -> int:
        found = [i for i, line in enumerate(self.lines) if p in line and r in line]
        if len(found) != 1:
            raise InputError(f"points {p}, {r} are not on exactly one common line")
        return found[0]

    def meet(self, i: int, j: int):
        common = self.lines[i] & self.lines[j]
        if len(common) != 1:
            raise InputError(f"lines {i}, {j} do not meet in one point")
        return next(iter(common))

    def axiom_failures(self) -> List[str]:
        q = self.q
        n = q * q + q + 1
        bad = []
        if len(self.points) != n or len(self.lines) != n:
            bad.append("point or line count is not q^2+q+1")
        pts = set(self.points)
        for i, line in enumerate(self.lines):
            if len(line) != q + 1 or not line <= pts:
                bad.append(f"line {i} does not have q+1 points of the plane")
        for p in self.points:
            if sum(p in line for line in self.lines) != q + 1:
                bad.append(f"point {p} is not on q+1 lines")
        for p, r in itertools.combinations(self.points, 2):
            if sum(p in line and r in line for line in self.lines) != 1:
                bad.append(f"points {p}, {r} do not span exactly one line")
        return bad

    def is_valid(self) -> bool:
        return not self.axiom_failures()


def fano_plane() -> ProjectivePlane:
    """Order-2 plane with lines {i, i+1, i+3} mod 7."""
    return ProjectivePlane(2, tuple(range(7)), tuple(frozenset({i, (i + 1) % 7, (i + 3) % 7}) for i in range(7)))


def opposition_in_link(plane: ProjectivePlane, a, b) -> bool:
    """Opposition in the incidence geometry of ``plane``.

    Vertices are tagged ``("p", point)`` or ``("l", line index)``; chambers
    are flags ``(point, line index)``.  Vertices are opposite at incidence
    distance 3, chambers at gallery distance 3.
    """
    def is_vertex(v):
        return isinstance(v, tuple) and len(v) == 2 and v[0] in ("p", "l")

    if is_vertex(a) and is_vertex(b):
        if a[0] == b[0]:
            return False
        p, i = (a[1], b[1]) if a[0] == "p" else (b[1], a[1])
        return p not in plane.lines[i]
    if is_vertex(a) or is_vertex(b):
        raise InputError("cannot compare a vertex with a chamber")
    (p, i), (r, j) = a, b
    if p not in plane.lines[i] or r not in plane.lines[j]:
        raise InputError("chambers must be incident point-line pairs")
    return p not in plane.lines[j] and r not in plane.lines[i]


# -- triangle presentations -------------------------------------------------


@dataclass(frozen=True)
class TrianglePresentation:
    plane: ProjectivePlane
    lam: Tuple[int, ...]
    triples: FrozenSet[Tuple[int, int, int]]

    @property
    def q(self) -> int:
        return self.plane.q

    def failures(self) -> List[str]:
        bad = list(self.plane.axiom_failures())
        n = len(self.plane.points)
        if sorted(self.lam) != list(range(n)):
            bad.append("lambda is not a bijection from points to lines")
            return bad
        for x, y, z in self.triples:
            if (y, z, x) not in self.triples:
                bad.append(f"cyclic image of {(x, y, z)} missing")
        for x in self.plane.points:
            for y in self.plane.points:
                zs = [t[2] for t in self.triples if t[0] == x and t[1] == y]
                on = y in self.plane.lines[self.lam[x]]
                if on and len(zs) != 1:
                    bad.append(f"pair {(x, y)} has {len(zs)} completions")
                if not on and zs:
                    bad.append(f"pair {(x, y)} is completed but y is not on lambda(x)")
        return bad

    def is_valid(self) -> bool:
        return not self.failures()

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "points": list(self.plane.points),
            "lines": [sorted(line) for line in self.plane.lines],
            "incidence": [list(pair) for pair in self.plane.incidence],
            "lambda": {str(p): self.lam[p] for p in self.plane.points},
            "triples": [list(t) for t in sorted(self.triples)],
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "TrianglePresentation":
        try:
            q = int(data["q"])
            points = tuple(int(p) for p in data["points"])
            if points != tuple(range(len(points))):
                raise InputError("points must be 0..n-1")
            if "lines" in data:
                lines = tuple(frozenset(int(p) for p in line) for line in data["lines"])
            else:
                incid: Dict[int, set] = {}
                for p, i in data["incidence"]:
                    incid.setdefault(int(i), set()).add(int(p))
                lines = tuple(frozenset(incid[i]) for i in sorted(incid))
            if "incidence" in data:
                given = {(int(p), int(i)) for p, i in data["incidence"]}
                if given != {(p, i) for i, line in enumerate(lines) for p in line}:
                    raise InputError("incidence does not match lines")
            lam_raw = data["lambda"]
            lam = tuple(int(lam_raw[str(p)] if isinstance(lam_raw, dict) else lam_raw[p]) for p in points)
            triples = frozenset(tuple(int(v) for v in t) for t in data["triples"])
            if any(len(t) != 3 for t in triples):
                raise InputError("triples must have three entries")
        except InputError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"malformed presentation: {exc!r}") from exc
        return cls(ProjectivePlane(q, points, lines), lam, triples)


def validate_triangle_presentation(tp: TrianglePresentation) -> bool:
    return tp.is_valid()


def load_presentation(path) -> TrianglePresentation:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read presentation {path}: {exc}") from exc
    tp = TrianglePresentation.from_dict(data)
    bad = tp.failures()
    if bad:
        raise InputError("presentation does not validate: " + "; ".join(bad[:5]))
    return tp


def bundled_presentation() -> TrianglePresentation:
    """The order-2 presentation shipped with the package."""
    text = resources.files("a2lab").joinpath("data/q2.tp.json").read_text()
    tp = TrianglePresentation.from_dict(json.loads(text))
    if not tp.is_valid():
        raise InputError("bundled presentation failed validation")
    return tp


def search_triangle_presentation(plane: ProjectivePlane, lam: Optional[Sequence[int]] = None) -> Optional[TrianglePresentation]:
    """Backtracking search for triples compatible with ``lam``.

    With ``lam=None`` bijections are tried in lexicographic order and the
    first success is returned.
    """
    pts = list(plane.points)
    candidates = [tuple(lam)] if lam is not None else itertools.permutations(range(len(pts)))
    for lam_try in candidates:
        succ = {x: plane.lines[lam_try[x]] for x in pts}
        pairs = [(x, y) for x in pts for y in sorted(succ[x])]
        covered: set = set()
        chosen: List[Tuple[int, int, int]] = []

        def rec() -> bool:
            rest = [p for p in pairs if p not in covered]
            if not rest:
                return True
            x, y = rest[0]
            for z in sorted(succ[y]):
                if x not in succ[z]:
                    continue
                orbit = {(x, y), (y, z), (z, x)}
                rots = {(x, y, z), (y, z, x), (z, x, y)}
                if orbit & covered or len(orbit) != len(rots):
                    continue
                covered.update(orbit)
                chosen.append((x, y, z))
                if rec():
                    return True
                covered.difference_update(orbit)
                chosen.pop()
            return False

        if rec():
            triples = set()
            for x, y, z in chosen:
                triples.update({(x, y, z), (y, z, x), (z, x, y)})
            return TrianglePresentation(plane, tuple(lam_try), frozenset(triples))
    return None


# -- coset enumeration --------------------------------------------------------


class _CosetTable:
    def __init__(self, ngens: int, relators: List[Tuple[int, ...]], inverse: List[int]):
        self.ngens = ngens
        self.rel = relators
        self.inv = inverse
        self.table: List[List[int]] = []
        self.parent: List[int] = []
        self.depth: List[int] = []
        self.live: List[bool] = []
        self.new_coset(0)

    def new_coset(self, depth: int) -> int:
        self.table.append([-1] * self.ngens)
        self.parent.append(len(self.parent))
        self.depth.append(depth)
        self.live.append(True)
        return len(self.table) - 1

    def rep(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def _merge(self, a: int, b: int, queue: List[int]) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        if b < a:
            a, b = b, a
        self.parent[b] = a
        self.depth[a] = min(self.depth[a], self.depth[b])
        self.live[b] = False
        queue.append(b)

    def coincidence(self, a: int, b: int) -> None:
        queue: List[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            row = self.table[g]
            for x in range(self.ngens):
                d = row[x]
                if d < 0:
                    continue
                xi = self.inv[x]
                if self.table[d][xi] == g:
                    self.table[d][xi] = -1
                m, n = self.rep(g), self.rep(d)
                if self.table[m][x] >= 0:
                    self._merge(n, self.table[m][x], queue)
                elif self.table[n][xi] >= 0:
                    self._merge(m, self.table[n][xi], queue)
                else:
                    self.table[m][x] = n
                    self.table[n][xi] = m

    def scan_and_fill(self, c: int, word: Tuple[int, ...]) -> None:
        f, b = c, c
        i, j = 0, len(word) - 1
        while True:
            while i <= j and self.table[f][word[i]] >= 0:
                f = self.table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and self.table[b][self.inv[word[j]]] >= 0:
                b = self.table[b][self.inv[word[j]]]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                self.table[f][word[i]] = b
                self.table[b][self.inv[word[i]]] = f
                return
            n = self.new_coset(self.depth[f] + 1)
            self.table[f][word[i]] = n
            self.table[n][self.inv[word[i]]] = f

    def closes(self, c: int, word: Tuple[int, ...]) -> bool:
        f = c
        for g in word:
            f = self.table[f][g]
            if f < 0:
                return False
        return f == c


@dataclass
class BuildingBall:
    """Radius-r ball around the identity with vertices in shortlex order."""

    radius: int
    complex: TypedComplex
    presentation: TrianglePresentation
    words: List[Tuple[int, ...]]
    center: int = 0
    provenance: str = ""
    _depth: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.presentation.q

    def depth(self, v: int) -> int:
        """Distance from the centre."""
        if self._depth is None:
            self._depth = self.complex.distances[self.center].astype(np.int64)
        return int(self._depth[v])

    def interior(self, margin: int = 1) -> List[int]:
        return [v for v in range(self.complex.n) if self.depth(v) <= self.radius - margin]

    def sphere_sizes(self) -> List[int]:
        far = max(self.depth(v) for v in range(self.complex.n))
        sizes = [0] * (max(far, self.radius) + 1)
        for v in range(self.complex.n):
            sizes[self.depth(v)] += 1
        return sizes

    def metadata(self) -> dict:
        return {"radius": self.radius, "presentation_sha256": self.provenance, "q": self.q}

    def to_dict(self) -> dict:
        d = self.complex.to_dict()
        d["metadata"] = self.metadata()
        d["presentation"] = self.presentation.to_dict()
        d["words"] = [list(w) for w in self.words]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "BuildingBall":
        try:
            cx = TypedComplex.from_dict(data)
            meta = data["metadata"]
            tp = TrianglePresentation.from_dict(data["presentation"])
            words = [tuple(w) for w in data.get("words", [[]] * cx.n)]
            radius = int(meta["radius"])
        except InputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed ball file: {exc!r}") from exc
        if tp.sha256() != meta.get("presentation_sha256"):
            raise InputError("presentation hash does not match metadata")
        return cls(radius, cx, tp, words, 0, meta["presentation_sha256"])


def build_ball(tp: TrianglePresentation, radius: int) -> BuildingBall:
    """Ball of the given radius around the identity vertex."""
    if radius < 0:
        raise InputError("radius must be non-negative")
    bad = tp.failures()
    if bad:
        raise InputError("presentation does not validate: " + "; ".join(bad[:5]))
    n = len(tp.plane.points)
    ngens = 2 * n
    inverse = [(g + n) % ngens for g in range(ngens)]
    relators = sorted(tp.triples)
    ct = _CosetTable(ngens, relators, inverse)
    limit = radius + 1
    scanned: set = set()

    def sweep(candidates) -> bool:
        changed = False
        for c in candidates:
            if not ct.live[c] or ct.depth[c] > limit:
                continue
            if c in scanned and all(ct.closes(c, w) for w in relators):
                continue
            for w in relators:
                if not ct.live[c]:
                    break
                ct.scan_and_fill(c, w)
            scanned.add(c)
            changed = True
        return changed

    c = 0
    while c < len(ct.table):
        sweep([c])
        c += 1
    # merges may have lowered depths; rescan until every close coset is complete
    for _ in range(10):
        dist = _coset_bfs(ct, limit)
        for v, dv in dist.items():
            ct.depth[v] = min(ct.depth[v], dv)
        if not sweep(sorted(v for v in dist if dist[v] <= limit)):
            break
    else:
        raise ConstructionError("coset enumeration did not stabilise", {"radius": radius})

    dist = _coset_bfs(ct, radius)
    # shortlex relabelling: BFS trying generators in order
    start = ct.rep(0)
    order = [start]
    words = {start: ()}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        if len(words[a]) >= radius:
            continue
        for g in range(ngens):
            b = ct.table[a][g]
            if b < 0:
                raise ConstructionError("undefined coset inside the ball", {"word": list(words[a]), "gen": g})
            b = ct.rep(b)
            if b not in words:
                words[b] = words[a] + (g,)
                order.append(b)
                queue.append(b)
    if len(order) != sum(1 for v in dist if dist[v] <= radius):
        raise ConstructionError("ball size mismatch after relabelling")
    index = {c: i for i, c in enumerate(order)}
    types = [0] * len(order)
    for c in order:
        types[index[c]] = sum(1 if g < n else 2 for g in words[c]) % 3
    edges = set()
    triangles = set()
    for c in order:
        i = index[c]
        for g in range(ngens):
            b = ct.rep(ct.table[c][g]) if ct.table[c][g] >= 0 else -1
            if b in index:
                j = index[b]
                want = (types[i] + (1 if g < n else 2)) % 3
                if types[j] != want:
                    raise ConstructionError("type colouring is inconsistent", {"from": list(words[c]), "gen": g})
                edges.add((min(i, j), max(i, j)))
        for x, y, _z in relators:
            b = ct.table[c][x]
            if b < 0:
                continue
            b = ct.rep(b)
            d = ct.table[b][y]
            if b in index and d >= 0 and ct.rep(d) in index:
                tri = tuple(sorted((i, index[b], index[ct.rep(d)])))
                if len(set(tri)) != 3:
                    raise ConstructionError("degenerate triangle", {"word": list(words[c]), "triple": [x, y]})
                triangles.add(tri)
    cx = TypedComplex(types, sorted(edges), sorted(triangles))
    return BuildingBall(radius, cx, tp, [words[c] for c in order], 0, tp.sha256())


def _coset_bfs(ct: _CosetTable, limit: int) -> Dict[int, int]:
    start = ct.rep(0)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        if dist[a] >= limit:
            continue
        for b in ct.table[a]:
            if b < 0:
                continue
            b = ct.rep(b)
            if b not in dist:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def expected_sphere_size(q: int, r: int) -> int:
    """Number of vertices at distance r from a vertex of a thick Ã₂ building.

    Sums |V_(m,n)| over m + n = r with |V_(m,0)| = |V_(0,m)| = N q^{2(m-1)}
    and |V_(m,n)| = N (q+1) q^{2(m+n)-3} for m, n ≥ 1, N = q²+q+1.
    """
    if r == 0:
        return 1
    N = q * q + q + 1
    total = 2 * N * q ** (2 * (r - 1))
    total += (r - 1) * N * (q + 1) * q ** (2 * r - 3) if r >= 2 else 0
    return total


# -- links ---------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    vertex: int
    plane: ProjectivePlane
    point_ids: Tuple[int, ...]
    line_ids: Tuple[int, ...]


def link_graph(c: TypedComplex, v: int) -> Tuple[List[int], List[Tuple[int, int]]]:
    nbrs = list(c.neighbors[v])
    edges = []
    for t in c.triangles:
        if v in t:
            a, b = sorted(w for w in t if w != v)
            edges.append((a, b))
    return nbrs, sorted(edges)


def extract_and_validate_link(ball: BuildingBall, v: int) -> Link:
    if ball.depth(v) > ball.radius - 1:
        raise InputError(f"vertex {v} is on the boundary of the ball")
    c = ball.complex
    q = ball.q
    N = q * q + q + 1
    nbrs, edges = link_graph(c, v)
    witness = {"vertex": v, "word": list(ball.words[v])}

    def fail(axiom: str):
        raise StructureError(f"link of {v} violates: {axiom}", dict(witness, axiom=axiom))

    pts = sorted(w for w in nbrs if c.types[w] == (c.types[v] + 1) % 3)
    lns = sorted(w for w in nbrs if c.types[w] == (c.types[v] + 2) % 3)
    if len(nbrs) != 2 * N or len(pts) != N or len(lns) != N:
        fail("vertex count 2(q^2+q+1) split evenly by type")
    if len(edges) != (q + 1) * N:
        fail("edge count (q+1)(q^2+q+1)")
    adj = {w: set() for w in nbrs}
    for a, b in edges:
        if c.types[a] == c.types[b]:
            fail("bipartite by type")
        adj[a].add(b)
        adj[b].add(a)
    if any(len(adj[w]) != q + 1 for w in nbrs):
        fail("every vertex has q+1 neighbours")
    for side in (pts, lns):
        for a, b in itertools.combinations(side, 2):
            if len(adj[a] & adj[b]) != 1:
                fail("two elements of one kind share exactly one neighbour")
    if _girth(adj) != 6:
        fail("girth 6")
    pindex = {w: i for i, w in enumerate(pts)}
    lines = tuple(frozenset(pindex[p] for p in adj[l]) for l in lns)
    plane = ProjectivePlane(q, tuple(range(N)), lines)
    if not plane.is_valid():
        fail("projective plane axioms")
    return Link(v, plane, tuple(pts), tuple(lns))


def _girth(adj: Dict[int, set]) -> int:
    best = 10 ** 9
    for s in adj:
        dist = {s: 0}
        par = {s: None}
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for b in adj[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    par[b] = a
                    queue.append(b)
                elif par[a] != b:
                    best = min(best, dist[a] + dist[b] + 1)
    return best


def validate_links(ball: BuildingBall, vertices: Optional[Sequence[int]] = None) -> int:
    """Validate every interior link; returns the number checked."""
    vs = ball.interior(1) if vertices is None else vertices
    for v in vs:
        extract_and_validate_link(ball, v)
    return len(vs)


def check_thickness(ball: BuildingBall) -> int:
    """Every edge with both ends interior lies in exactly q+1 triangles."""
    c = ball.complex
    count: Dict[Tuple[int, int], int] = {e: 0 for e in c.edges}
    for a, b, d in c.triangles:
        for e in ((a, b), (a, d), (b, d)):
            count[e] += 1
    checked = 0
    for (a, b), k in count.items():
        if ball.depth(a) < ball.radius and ball.depth(b) < ball.radius:
            checked += 1
            if k != ball.q + 1:
                raise StructureError("edge thickness differs from q+1", {"edge": [a, b], "triangles": k})
    return checked


def check_degrees(ball: BuildingBall) -> int:
    want = 2 * (ball.q ** 2 + ball.q + 1)
    vs = ball.interior(1)
    for v in vs:
        if ball.complex.degree(v) != want:
            raise StructureError("interior degree differs from 2(q^2+q+1)", {"vertex": v})
    return len(vs)


def links_are_opposite(c: TypedComplex, v: int, a: int, b: int) -> bool:
    """Opposition of two neighbours of v inside lk(v)."""
    if a not in c.neighbors[v] or b not in c.neighbors[v]:
        raise InputError("both vertices must be neighbours of v")
    return c.types[a] != c.types[b] and not c.adjacent(a, b)


# -- flats ----------------------------------------------------------------------


def oriented(c: TypedComplex, emb: Dict[Coord, int], base: Coord = (0, 0)) -> bool:
    """True when the lattice direction e1 maps to a vertex of type +1."""
    nb = (base[0] + 1, base[1])
    if nb not in emb:
        nb = (base[0], base[1] + 1)
        return (c.types[emb[nb]] - c.types[emb[base]]) % 3 == 2
    return (c.types[emb[nb]] - c.types[emb[base]]) % 3 == 1


def embed_lattice_region(c: TypedComplex, points: Sequence[Coord], pins: Dict[Coord, int]):
    """Iterate isometric embeddings of a lattice region with pinned points.

    Yields dicts lattice point -> vertex.
    """
    dom = lattice_complex(points)
    pinned = {dom.vertex(p): v for p, v in pins.items()}
    for img in iter_embeddings(dom, c, pinned=pinned):
        yield {dom.labels[i]: int(img[i]) for i in range(dom.n)}


def sigma(ball: BuildingBall, x: int, y: int) -> Coord:
    """Combinatorial distance between two ball vertices, found in a flat.

    Tries each dominant λ of the right length and type offset and looks for
    an oriented embedding of Conv(0, λ) with 0 -> x and λ -> y.
    """
    c = ball.complex
    d = c.distance(x, y)
    dt = (c.types[y] - c.types[x]) % 3
    for a in range(d + 1):
        lam = (a, d - a)
        if (lam[0] - lam[1]) % 3 != dt:
            continue
        for emb in embed_lattice_region(c, parallelogram_points(lam), {(0, 0): x, lam: y}):
            if lam == (0, 0) or oriented(c, emb):
                return lam
    raise DepthInsufficientError(f"no flat through {x} and {y} inside the ball")


def find_flat_extension(c: TypedComplex, flat: Dict[Coord, int], target: Sequence[int], reach: int = 2):
    """Embedding of a lattice region containing ``flat`` whose image covers ``target``.

    Candidate lattice positions for each target vertex are those at the
    right distance from every flat point within ``reach`` of the flat hull.
    Returns a dict lattice point -> vertex.
    """
    if not flat:
        raise InputError("flat must be non-empty")
    pts = list(flat)
    amin = min(p[0] for p in pts) - reach
    amax = max(p[0] for p in pts) + reach
    bmin = min(p[1] for p in pts) - reach
    bmax = max(p[1] for p in pts) + reach
    box = [(a, b) for a in range(amin, amax + 1) for b in range(bmin, bmax + 1)]
    per_target = []
    for t in target:
        if t in flat.values():
            per_target.append([p for p, v in flat.items() if v == t])
            continue
        cands = [p for p in box if p not in flat
                 and all(lattice_distance(p, f) == c.distance(t, v) for f, v in flat.items())]
        if not cands:
            raise DepthInsufficientError(f"no lattice position for vertex {t}")
        per_target.append(cands)
    for combo in itertools.product(*per_target):
        if len(set(combo)) != len(combo):
            continue
        pins = dict(flat)
        clash = False
        for p, t in zip(combo, target):
            if pins.get(p, t) != t:
                clash = True
            pins[p] = t
        if clash:
            continue
        region = lattice_hull(list(pins))
        for emb in embed_lattice_region(c, region, pins):
            return emb
    raise DepthInsufficientError("no flat containing the configuration inside the ball")


def write_presentation(tp: TrianglePresentation, path) -> None:
    Path(path).write_text(json.dumps(tp.to_dict(), indent=1) + "\n")
