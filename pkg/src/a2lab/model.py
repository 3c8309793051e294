"""Model spaces: the apartment, sector truncations, wall-tree truncations,
decorated trees with their crazy diamonds, elementary extensions and the
comb used by the detecting flow.

Apartment coordinates.  A vertex of the model apartment is an integer pair
``(a, b)`` meaning ``a*e1 + b*e2`` where ``e1`` and ``e2`` are unit vectors
at 60 degrees spanning the positive sector.  The type of ``(a, b)`` is
``(a - b) mod 3``, so ``e1`` points towards a vertex of type +1 and ``e2``
towards type +2 relative to the origin.

Wall-tree coordinates.  A vertex of a wall-tree truncation is ``(z, u)``
with ``z`` a tree vertex and ``u`` an integer height measured in half
units (``u`` is twice the horofunction).  Column ``z`` holds heights of a
fixed parity, vertical edges join ``(z, u)`` to ``(z, u + 2)`` and tree
edges ``z z'`` give edges ``(z, u) (z', u ± 1)``.  The type is ``u mod 3``.
An apartment chart ``(a, b) -> (tree(a), a + 2b)`` turns columns into the
lines of constant ``a``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from .complex import TypedComplex, connected_subsets, convex_hull, is_convex_subcomplex
from .errors import InputError, ViolationError

Coord = Tuple[int, int]

UNIT_VECTORS: Tuple[Coord, ...] = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


# -- apartment arithmetic -------------------------------------------------


def coord_type(p: Coord) -> int:
    return (p[0] - p[1]) % 3


def lattice_distance(p: Coord, q: Coord = (0, 0)) -> int:
    a, b = p[0] - q[0], p[1] - q[1]
    if a * b >= 0:
        return abs(a) + abs(b)
    return max(abs(a), abs(b))


def _rotate(v: Coord) -> Coord:
    a, b = v
    return (-a - b, a)


def _reflect(v: Coord) -> Coord:
    a, b = v
    return (a + b, -b)


def weyl_orbit(v: Coord) -> List[Coord]:
    """Images of ``v`` under the type-preserving stabiliser of the origin."""
    out: List[Coord] = []
    w = v
    for _ in range(3):
        for u in (w, _reflect(w)):
            if u not in out:
                out.append(u)
        w = _rotate(w)
    return out


def dominant(v: Coord) -> Coord:
    """The unique Weyl-group image of ``v`` with both coordinates ≥ 0."""
    for w in weyl_orbit(v):
        if w[0] >= 0 and w[1] >= 0:
            return w
    raise AssertionError(f"no dominant image for {v}")


def apartment_sigma(p: Coord, q: Coord) -> Coord:
    """Combinatorial distance between two vertices of the model apartment."""
    return dominant((q[0] - p[0], q[1] - p[1]))


def length(v: Coord) -> int:
    """Length of an apartment vector, extended linearly as ``a + b``."""
    return v[0] + v[1]


def combinatorial_distance(x: Coord, y: Coord) -> Coord:
    return apartment_sigma(x, y)


def lattice_complex(points: Iterable[Coord]) -> TypedComplex:
    """Full subcomplex of the triangular lattice on ``points``."""
    pts = sorted(set((int(a), int(b)) for a, b in points))
    index = {p: i for i, p in enumerate(pts)}
    edges = []
    for p in pts:
        for d in UNIT_VECTORS[:3]:
            q = (p[0] + d[0], p[1] + d[1])
            if q in index:
                edges.append((index[p], index[q]))
    return TypedComplex([coord_type(p) for p in pts], edges, labels=pts)


def apartment_ball(radius: int) -> TypedComplex:
    pts = [(a, b) for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)
           if lattice_distance((a, b)) <= radius]
    return lattice_complex(pts)


@dataclass(frozen=True)
class ModelApartment:
    radius: int
    complex: TypedComplex = field(compare=False, repr=False, default=None)

    @classmethod
    def build(cls, radius: int) -> "ModelApartment":
        return cls(radius, apartment_ball(radius))


def sector_points(depth: int) -> List[Coord]:
    """Vertices of the sector truncation: a, b ≥ 0 and a + b ≤ depth."""
    return [(a, b) for a in range(depth + 1) for b in range(depth + 1 - a)]


def sector_truncation(depth: int) -> TypedComplex:
    return lattice_complex(sector_points(depth))


def parallelogram_points(lam: Coord) -> List[Coord]:
    """Vertices of Conv(0, lam) for dominant ``lam``."""
    A, B = lam
    if A < 0 or B < 0:
        raise InputError(f"{lam} is not dominant")
    return [(a, b) for a in range(A + 1) for b in range(B + 1)]


def parallelogram(lam: Coord) -> TypedComplex:
    return lattice_complex(parallelogram_points(lam))


def lattice_hull(points: Iterable[Coord]) -> List[Coord]:
    """Convex hull in the lattice: intersection of the wall half-planes."""
    pts = list(points)
    amin = min(p[0] for p in pts)
    amax = max(p[0] for p in pts)
    bmin = min(p[1] for p in pts)
    bmax = max(p[1] for p in pts)
    smin = min(p[0] + p[1] for p in pts)
    smax = max(p[0] + p[1] for p in pts)
    return [(a, b) for a in range(amin, amax + 1) for b in range(bmin, bmax + 1)
            if smin <= a + b <= smax]


# -- trees ----------------------------------------------------------------


class Tree:
    """Finite tree given by vertex labels and edges."""

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Tuple[Hashable, Hashable]]):
        self.vertices = list(dict.fromkeys(vertices))
        self.adj: Dict[Hashable, List[Hashable]] = {v: [] for v in self.vertices}
        self.edges = []
        for a, b in edges:
            for v in (a, b):
                if v not in self.adj:
                    self.vertices.append(v)
                    self.adj[v] = []
            if b in self.adj[a] or a == b:
                raise InputError(f"repeated or loop edge {a}-{b}")
            self.adj[a].append(b)
            self.adj[b].append(a)
            self.edges.append((a, b))
        if not self.vertices:
            raise InputError("a tree needs at least one vertex")
        if len(self.edges) != len(self.vertices) - 1:
            raise InputError("edge count does not match a tree")
        seen = self.distances_from(self.vertices[0])
        if len(seen) != len(self.vertices):
            raise InputError("tree is not connected")
        self._dist: Dict[Hashable, Dict[Hashable, int]] = {}

    def distances_from(self, v: Hashable) -> Dict[Hashable, int]:
        dist = {v: 0}
        queue = deque([v])
        while queue:
            a = queue.popleft()
            for b in self.adj[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    queue.append(b)
        return dist

    def d(self, a: Hashable, b: Hashable) -> int:
        if a not in self._dist:
            self._dist[a] = self.distances_from(a)
        return self._dist[a][b]

    def valency(self, v: Hashable) -> int:
        return len(self.adj[v])

    def path(self, a: Hashable, b: Hashable) -> List[Hashable]:
        out = [a]
        while out[-1] != b:
            cur = out[-1]
            out.append(min((w for w in self.adj[cur] if self.d(w, b) < self.d(cur, b)), key=repr))
        return out

    def is_path_between(self, a: Hashable, b: Hashable) -> bool:
        return len(self.vertices) == self.d(a, b) + 1

    def with_edge(self, z: Hashable, w: Hashable) -> "Tree":
        if z not in self.adj or w in self.adj:
            raise InputError(f"cannot attach {w!r} at {z!r}")
        return Tree(self.vertices + [w], self.edges + [(z, w)])

    def subtree(self, vertices: Iterable[Hashable]) -> "Tree":
        keep = set(vertices)
        return Tree([v for v in self.vertices if v in keep], [(a, b) for a, b in self.edges if a in keep and b in keep])

    def canonical_code(self, root: Hashable, marked: Hashable) -> str:
        def code(v, parent):
            kids = sorted(code(w, v) for w in self.adj[v] if w != parent)
            return "(" + ("*" if v == marked else "") + "".join(kids) + ")"

        return code(root, None)


# -- wall-tree truncations ------------------------------------------------


def wall_tree_complex(tree: Tree, columns: Dict[Hashable, Tuple[int, int]]) -> TypedComplex:
    """Vertices (z, u) with f ≤ u ≤ c for ``columns[z] = (f, c)``, step 2."""
    pts = []
    for z in tree.vertices:
        if z not in columns:
            continue
        lo, hi = columns[z]
        if (hi - lo) % 2:
            raise InputError(f"column {z!r} has odd length")
        pts.extend((z, u) for u in range(lo, hi + 1, 2))
    index = {p: i for i, p in enumerate(pts)}
    edges = []
    for (z, u), i in index.items():
        if (z, u + 2) in index:
            edges.append((i, index[(z, u + 2)]))
        for w in tree.adj[z]:
            for du in (1, -1):
                j = index.get((w, u + du))
                if j is not None and i < j:
                    edges.append((i, j))
    return TypedComplex([u % 3 for _, u in pts], edges, labels=pts)


def wall_tree_distance(tree: Tree, p: Tuple[Hashable, int], q: Tuple[Hashable, int]) -> int:
    """Closed form for the 1-skeleton distance in the wall tree."""
    D = tree.d(p[0], q[0])
    H = abs(p[1] - q[1])
    return max(D, (D + H) // 2)


def star_tree(leaves: int = 3, center: Hashable = "c") -> Tree:
    return Tree([center] + [f"l{i}" for i in range(leaves)], [(center, f"l{i}") for i in range(leaves)])


def segment_tree(n_edges: int) -> Tree:
    return Tree(list(range(n_edges + 1)), [(i, i + 1) for i in range(n_edges)])


def wall_tree_truncation(tree: Tree, extent: int, root: Optional[Hashable] = None) -> TypedComplex:
    """The diamond over ``tree`` peaked at ``root`` with ``extent`` vertical edges there.

    Column z covers heights ``d(root, z) .. 2*extent - d(root, z)``; this is
    a convex region of the wall tree, so its own distances are the
    wall-tree distances.
    """
    root = tree.vertices[0] if root is None else root
    cols = {}
    for z in tree.vertices:
        k = tree.d(root, z)
        if 2 * extent - k < k:
            raise InputError("extent too small for the tree radius")
        cols[z] = (k, 2 * extent - k)
    return wall_tree_complex(tree, cols)


# -- decorated trees and crazy diamonds -------------------------------------


class DecoratedTree:
    """(T, x, y, s, t) with s - t ≡ d(x, y) mod 2 and l(z) ≥ 0 everywhere."""

    def __init__(self, tree: Tree, x: Hashable, y: Hashable, s: int, t: int):
        if x not in tree.adj or y not in tree.adj:
            raise InputError("x and y must be tree vertices")
        self.tree = tree
        self.x, self.y, self.s, self.t = x, y, int(s), int(t)
        if (self.s - self.t - tree.d(x, y)) % 2:
            raise InputError("s - t and d(x, y) have different parities")
        for z in tree.vertices:
            if self.l(z) < 0:
                raise InputError(f"l({z!r}) = {self.l(z)} < 0")

    def c(self, z: Hashable) -> int:
        return self.s - self.tree.d(self.x, z)

    def f(self, z: Hashable) -> int:
        return self.t + self.tree.d(self.y, z)

    def l(self, z: Hashable) -> int:
        return self.c(z) - self.f(z)

    def columns(self) -> Dict[Hashable, Tuple[int, int]]:
        return {z: (self.f(z), self.c(z)) for z in self.tree.vertices}

    def is_point(self) -> bool:
        return len(self.tree.vertices) == 1 and self.s == self.t

    def is_vertical(self) -> bool:
        return len(self.tree.vertices) == 1 and self.s > self.t

    def is_horizontal(self) -> bool:
        return (
            len(self.tree.vertices) > 1
            and self.tree.is_path_between(self.x, self.y)
            and self.s - self.t == self.tree.d(self.x, self.y)
        )

    def is_degenerate(self) -> bool:
        return len(self.tree.vertices) == 1 or self.is_horizontal()

    def canonical(self) -> Tuple[str, int]:
        """Isomorphism invariant: rooted code at x with y marked, and s - t."""
        return (self.tree.canonical_code(self.x, self.y), self.s - self.t)

    def shifted(self, du: int) -> "DecoratedTree":
        return DecoratedTree(self.tree, self.x, self.y, self.s + du, self.t + du)

    def contained_in(self, other: "DecoratedTree") -> bool:
        """Column-wise inclusion over a common labelling."""
        if any(z not in other.tree.adj for z in self.tree.vertices):
            return False
        return all(other.c(z) >= self.c(z) and other.f(z) <= self.f(z) for z in self.tree.vertices)

    def to_dict(self) -> dict:
        d = {"edges": [[a, b] for a, b in self.tree.edges], "x": self.x, "y": self.y, "s": self.s, "t": self.t}
        if not self.tree.edges:
            d["vertices"] = list(self.tree.vertices)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "DecoratedTree":
        try:
            edges = [tuple(e) for e in data["edges"]]
            verts = list(data.get("vertices", []))
            verts += [data["x"], data["y"]]
            return cls(Tree(verts, edges), data["x"], data["y"], data["s"], data["t"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed decorated tree: {exc}") from exc

    def __repr__(self) -> str:
        return f"DecoratedTree(edges={self.tree.edges}, x={self.x!r}, y={self.y!r}, s={self.s}, t={self.t})"


class CrazyDiamond:
    """Realisation of a decorated tree inside T × ℝ."""

    def __init__(self, source: DecoratedTree):
        self.source = source
        self.columns = source.columns()
        self.complex = wall_tree_complex(source.tree, self.columns)

    def pr(self, v: int) -> Hashable:
        return self.complex.labels[v][0]

    def vertex_set(self) -> FrozenSet[Tuple[Hashable, int]]:
        return frozenset(self.complex.labels)

    def alcoves(self) -> int:
        return len(self.complex.triangles)

    def __repr__(self) -> str:
        return f"CrazyDiamond({self.source!r})"


def realize_crazy_diamond(d: DecoratedTree) -> CrazyDiamond:
    return CrazyDiamond(d)


def classify_convex_subcomplex(host: TypedComplex, sub: Iterable[int], tree: Tree) -> DecoratedTree:
    """Recover (T, x, y, s, t) from a convex subcomplex of a wall-tree truncation.

    ``host`` must carry ``(z, u)`` labels over ``tree``.  f and c are the
    per-column minimum and maximum heights; y is the unique minimum of f
    and x the unique maximum of c.
    """
    s_ids = sorted(set(sub))
    if not s_ids or not is_convex_subcomplex(host, s_ids):
        raise InputError("subset is not a convex subcomplex")
    cols: Dict[Hashable, List[int]] = {}
    for v in s_ids:
        z, u = host.labels[v]
        cols.setdefault(z, []).append(u)
    T = tree.subtree(cols)
    f = {z: min(us) for z, us in cols.items()}
    c = {z: max(us) for z, us in cols.items()}
    for z, us in cols.items():
        if sorted(us) != list(range(f[z], c[z] + 1, 2)):
            raise ViolationError("column is not a full segment", {"column": repr(z)})
    fmin = min(f.values())
    cmax = max(c.values())
    ys = [z for z in T.vertices if f[z] == fmin]
    xs = [z for z in T.vertices if c[z] == cmax]
    if len(ys) != 1 or len(xs) != 1:
        raise ViolationError("extremum of f or c is not unique", {"f": repr(f), "c": repr(c)})
    y, x = ys[0], xs[0]
    for z in T.vertices:
        if f[z] != fmin + T.d(y, z) or c[z] != cmax - T.d(x, z):
            raise ViolationError("column bounds are not distance functions", {"z": repr(z)})
    return DecoratedTree(T, x, y, cmax, fmin)


def convex_subcomplexes_exhaustive(host: TypedComplex, max_size: int) -> List[FrozenSet[int]]:
    """Oracle: test every connected vertex subset for convexity."""
    return sorted((s for s in connected_subsets(host, max_size) if is_convex_subcomplex(host, s)),
                  key=lambda s: (len(s), sorted(s)))


def enumerate_convex_subcomplexes(host: TypedComplex, max_size: int) -> List[FrozenSet[int]]:
    """All convex subcomplexes with at most ``max_size`` vertices.

    Grown by hulls: every convex set is reached from a singleton by
    repeatedly adding an adjacent vertex and closing under geodesics.
    """
    if max_size < 1:
        return []
    found = set()
    frontier = [frozenset([v]) for v in range(host.n)]
    found.update(frontier)
    while frontier:
        nxt = []
        for s in frontier:
            boundary = {w for v in s for w in host.neighbors[v]} - s
            for w in sorted(boundary):
                h = convex_hull(host, s | {w})
                if len(h) <= max_size and h not in found:
                    found.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


# -- elementary extensions -------------------------------------------------

KINDS = ("C", "F", "B", "Cv", "Fv", "Bc", "Bf")


@dataclass(frozen=True)
class ElementaryExtension:
    """One enlargement step.

    ``C`` moves x to the adjacent ``target`` and raises s by one, ``F`` moves
    y and lowers t by one (so the column bottoms go down), ``B`` attaches
    the new vertex ``target`` at ``at``, ``Cv``/``Fv`` grow a one-vertex tree
    by a vertical edge, ``Bc``/``Bf`` extend a point or horizontal segment by
    a new tree vertex ``target`` beyond x or y.  ``valency`` records the
    valency of ``at`` before a ``B`` step.
    """

    kind: str
    target: Hashable = None
    at: Hashable = None
    valency: int = 0

    def apply(self, d: DecoratedTree) -> DecoratedTree:
        T = d.tree
        k = self.kind
        if k == "C":
            if self.target not in T.adj.get(d.x, []):
                raise InputError("C step needs a vertex adjacent to x")
            return DecoratedTree(T, self.target, d.y, d.s + 1, d.t)
        if k == "F":
            if self.target not in T.adj.get(d.y, []):
                raise InputError("F step needs a vertex adjacent to y")
            return DecoratedTree(T, d.x, self.target, d.s, d.t - 1)
        if k == "B":
            if d.l(self.at) <= 0:
                raise InputError("B step needs l(z) > 0")
            return DecoratedTree(T.with_edge(self.at, self.target), d.x, d.y, d.s, d.t)
        if k in ("Cv", "Fv"):
            if len(T.vertices) != 1:
                raise InputError("vertical steps need a one-vertex tree")
            return DecoratedTree(T, d.x, d.y, d.s + 2, d.t) if k == "Cv" else DecoratedTree(T, d.x, d.y, d.s, d.t - 2)
        if k == "Bc":
            if not (d.is_point() or d.is_horizontal()):
                raise InputError("Bc needs a point or horizontal diamond")
            return DecoratedTree(T.with_edge(d.x, self.target), self.target, d.y, d.s + 1, d.t)
        if k == "Bf":
            if not (d.is_point() or d.is_horizontal()):
                raise InputError("Bf needs a point or horizontal diamond")
            return DecoratedTree(T.with_edge(d.y, self.target), d.x, self.target, d.s, d.t - 1)
        raise InputError(f"unknown extension kind {k}")


def expected_extension_count(step: ElementaryExtension, before: DecoratedTree, q: int,
                             point_to_edge: Optional[int] = None) -> int:
    """Predicted number of extensions of a fixed embedding along one step.

    ``point_to_edge`` overrides the count for a point growing to an edge;
    by default it is the 1-skeleton degree 2(q²+q+1) of the building.
    """
    if before.is_point():
        return 2 * (q * q + q + 1) if point_to_edge is None else point_to_edge
    k = step.kind
    if k in ("C", "F"):
        return q + 1 if before.is_degenerate() else q
    if k == "B":
        return max(q - step.valency + 1, 0)
    return q * q


# -- decomposition of an inclusion ------------------------------------------


def _neighbor_toward(T: Tree, a: Hashable, b: Hashable) -> Hashable:
    return min((w for w in T.adj[a] if T.d(w, b) < T.d(a, b)), key=repr)


def _projection(T: Tree, big: Tree, target: Hashable) -> Hashable:
    """Closest vertex of the subtree T to ``target`` (distances in ``big``)."""
    return min(T.vertices, key=lambda z: (big.d(z, target), repr(z)))


def decompose_inclusion(small: DecoratedTree, big: DecoratedTree) -> List[ElementaryExtension]:
    """Chain of elementary extensions turning ``small`` into ``big``.

    Both decorations live over labelled trees with ``small.tree`` a subtree
    of ``big.tree`` and heights in the same units.
    """
    if not small.contained_in(big):
        raise InputError("small diamond is not contained in big diamond")
    BT = big.tree
    steps: List[ElementaryExtension] = []
    cur = small

    def push(step: ElementaryExtension) -> None:
        nonlocal cur
        nxt = step.apply(cur)
        if not nxt.contained_in(big):
            raise ViolationError("decomposition left the big diamond", {"step": step.kind})
        steps.append(step)
        cur = nxt

    def done() -> bool:
        return len(cur.tree.vertices) == len(BT.vertices) and all(
            cur.c(z) == big.c(z) and cur.f(z) == big.f(z) for z in BT.vertices)

    # degenerate starting points
    if cur.is_point():
        z = cur.x
        u = cur.s
        if big.c(z) >= u + 2:
            push(ElementaryExtension("Cv"))
        elif big.f(z) <= u - 2:
            push(ElementaryExtension("Fv"))
        else:
            for w in sorted(BT.adj[z], key=repr):
                if big.f(w) <= u + 1 <= big.c(w):
                    push(ElementaryExtension("Bc", target=w))
                    break
                if big.f(w) <= u - 1 <= big.c(w):
                    push(ElementaryExtension("Bf", target=w))
                    break
            else:
                if not done():
                    raise ViolationError("point has no neighbour in the big diamond")
    if cur.is_vertical() and not done():
        z = cur.x
        extra = [w for w in sorted(BT.adj[z], key=repr)]
        if extra:
            push(ElementaryExtension("B", target=extra[0], at=z, valency=0))
        else:
            while cur.s < big.s:
                push(ElementaryExtension("Cv"))
            while cur.t > big.t:
                push(ElementaryExtension("Fv"))
    if cur.is_horizontal() and not done():
        big_degenerate = big.is_horizontal()
        if big_degenerate:
            while not done():
                xs = [w for w in BT.adj[cur.x] if w not in cur.tree.adj and big.f(w) <= cur.s + 1 <= big.c(w)]
                ys = [w for w in BT.adj[cur.y] if w not in cur.tree.adj and big.f(w) <= cur.t - 1 <= big.c(w)]
                if xs:
                    push(ElementaryExtension("Bc", target=sorted(xs, key=repr)[0]))
                elif ys:
                    push(ElementaryExtension("Bf", target=sorted(ys, key=repr)[0]))
                else:
                    raise ViolationError("horizontal segment cannot be extended inside the big diamond")
        else:
            trial_c = ElementaryExtension("C", target=_neighbor_toward(cur.tree, cur.x, cur.y))
            trial_f = ElementaryExtension("F", target=_neighbor_toward(cur.tree, cur.y, cur.x))
            if trial_c.apply(cur).contained_in(big):
                push(trial_c)
            elif trial_f.apply(cur).contained_in(big):
                push(trial_f)
            else:
                raise ViolationError("no alcove of the big diamond is adjacent to the segment")

    guard = 0
    while not done():
        guard += 1
        if guard > 10_000:
            raise ViolationError("decomposition did not terminate")
        T = cur.tree
        progressed = False
        # lift the top at x, two C steps at a time
        if cur.c(cur.x) + 2 <= big.c(cur.x) and T.adj[cur.x]:
            home = cur.x
            push(ElementaryExtension("C", target=sorted(T.adj[home], key=repr)[0]))
            push(ElementaryExtension("C", target=home))
            continue
        if cur.f(cur.y) - 2 >= big.f(cur.y) and T.adj[cur.y]:
            home = cur.y
            push(ElementaryExtension("F", target=sorted(T.adj[home], key=repr)[0]))
            push(ElementaryExtension("F", target=home))
            continue
        # move the peak of c towards the peak of big.c within T
        px = _projection(T, BT, big.x)
        if px != cur.x:
            w = _neighbor_toward(T, cur.x, px)
            trial = ElementaryExtension("C", target=w)
            if trial.apply(cur).contained_in(big):
                push(trial)
                continue
        py = _projection(T, BT, big.y)
        if py != cur.y:
            w = _neighbor_toward(T, cur.y, py)
            trial = ElementaryExtension("F", target=w)
            if trial.apply(cur).contained_in(big):
                push(trial)
                continue
        # attach a missing tree edge where the column has room
        for z in sorted(T.vertices, key=repr):
            for w in sorted(BT.adj[z], key=repr):
                if w not in T.adj and cur.l(z) > 0:
                    trial = ElementaryExtension("B", target=w, at=z, valency=T.valency(z))
                    if trial.apply(cur).contained_in(big):
                        push(trial)
                        progressed = True
                        break
            if progressed:
                break
        if progressed:
            continue
        raise ViolationError("decomposition is stuck", {"current": cur.to_dict(), "big": big.to_dict()})
    return steps


def apply_chain(d: DecoratedTree, steps: Sequence[ElementaryExtension]) -> List[DecoratedTree]:
    out = [d]
    for st in steps:
        out.append(st.apply(out[-1]))
    return out


# -- comb models ---------------------------------------------------------


def spine(n: int) -> Tuple[str, int]:
    return ("s", n)


def antenna(n: int, k: int) -> Tuple:
    return ("s", n) if k == 0 else ("a", n, k)


class CombModel:
    """Finite piece of the comb: apartment plus half-plane antennas.

    In wall-tree coordinates the comb is T_comb × ℝ where T_comb is a line
    (the spine, vertices ``("s", n)``) with a ray ``("a", n, k)`` attached at
    every vertex.  The wall ℓ of the apartment is the line of points
    ``(("s", n), n)``; the glue line ℓ_n is the column over ``("s", n)``.
    """

    def __init__(self, spine_range: Tuple[int, int], antennas: Sequence[int], antenna_depth: int):
        self.lo, self.hi = spine_range
        self.antennas = tuple(sorted(antennas))
        self.depth = antenna_depth
        verts = [spine(n) for n in range(self.lo, self.hi + 1)]
        edges = [(spine(n), spine(n + 1)) for n in range(self.lo, self.hi)]
        for n in self.antennas:
            for k in range(1, antenna_depth + 1):
                verts.append(antenna(n, k))
                edges.append((antenna(n, k - 1), antenna(n, k)))
        self.tree = Tree(verts, edges)

    def chart(self, n: Optional[int], p: Coord) -> Tuple[Hashable, int]:
        """Wall-tree point of apartment coordinate ``p`` in the chart using antenna n.

        ``n=None`` is the chart of the apartment itself.
        """
        a, b = p
        if n is None or a <= n:
            z = spine(a)
        else:
            z = antenna(n, a - n)
        return (z, a + 2 * b)

    def wall_point(self, n: int) -> Tuple[Hashable, int]:
        return (spine(n), n)

    def antenna_sector(self, n: int, depth: int, base: int = 0) -> Dict[Coord, Tuple[Hashable, int]]:
        """Sector truncation at spine vertex ``base`` towards the chamber C_n.

        Sector coordinate (p, q) goes to ``base + p*e1 + q*(e1 - e2)`` in the
        chart of antenna n; its + wall starts along ℓ towards v.
        """
        return {(p, q): self.chart(n, (base + p + q, -q)) for p, q in sector_points(depth)}

    def shift(self, point: Tuple[Hashable, int]) -> Tuple[Hashable, int]:
        z, u = point
        if z[0] == "s":
            return (spine(z[1] + 1), u + 1)
        return (antenna(z[1] + 1, z[2]), u + 1)

    def host(self, margin: int = 2) -> TypedComplex:
        """A convex diamond over the comb tree large enough for hulls."""
        root = spine(0)
        radius = max(self.tree.d(root, z) for z in self.tree.vertices)
        H = radius + max(abs(self.lo), abs(self.hi)) + margin
        H += H % 2  # heights in column z have the parity of d(root, z)
        cols = {z: (-H + self.tree.d(root, z), H - self.tree.d(root, z)) for z in self.tree.vertices}
        return wall_tree_complex(self.tree, cols)

    def truncation(self, points: Iterable[Tuple[Hashable, int]], margin: int = 2) -> TypedComplex:
        """Convex hull of ``points`` inside the comb, as a labelled complex."""
        host = self.host(margin)
        ids = [host.vertex(p) for p in points]
        hull = convex_hull(host, ids)
        return host.induced(hull)


class TreeCombModel:
    """Comb inside a tree: a pinned spine with one antenna per spine vertex."""

    def __init__(self, spine_half: int, antenna_depth: int, degree: int = 3):
        self.half = spine_half
        self.depth = antenna_depth
        self.degree = degree

    def complex(self) -> TypedComplex:
        """Spine vertices ("s", n) for |n| ≤ half + 1 and antennas at |n| ≤ half."""
        labels = [spine(n) for n in range(-self.half - 1, self.half + 2)]
        edges = []
        for n in range(-self.half - 1, self.half + 1):
            edges.append((spine(n), spine(n + 1)))
        for n in range(-self.half, self.half + 1):
            for k in range(1, self.depth + 1):
                labels.append(antenna(n, k))
                edges.append((antenna(n, k - 1), antenna(n, k)))
        index = {lab: i for i, lab in enumerate(labels)}
        parity = {}
        for lab in labels:
            if lab[0] == "s":
                parity[lab] = lab[1] % 2
            else:
                parity[lab] = (lab[1] + lab[2]) % 2
        return TypedComplex([parity[l] for l in labels], [(index[a], index[b]) for a, b in edges], [], labels=labels)
