"""Exact self-avoiding-polygon enumeration on finite honeycomb domains.

The lattice is stored in brick-wall coordinates: face (i, j) is the unit
brick spanning x in [2i + (j & 1), 2i + (j & 1) + 2] at height
y in [j, j + 1]; every vertex has integer coordinates and degree at most
three, with vertical edges at x = j (mod 2).  For distance measurement
the face centers map to the Euclidean hexagonal embedding
(sqrt(3) (i + (j mod 2)/2), 1.5 j) with unit edge length; fits use the
dual-graph distance between face centers, which for same-row pairs is
just the column offset.

Enumeration is a symmetry-free backtracking search: each undirected
polygon is generated exactly once from its lexicographically minimal
vertex, with the traversal orientation fixed by comparing the two cycle
neighbours of the anchor, and pruned by the graph distance back to the
anchor.  A numba-compiled kernel performs the combined
enumerate-and-classify sweeps used for mass tables; a pure-Python twin
with identical traversal order backs it up and serves as its test
oracle.

In half-plane mode the bottom vertex row y = 0 is the reflecting wall;
polygons touching it are excluded and marks must be strictly interior.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    BudgetError,
    InsufficientData,
    InvalidPath,
    MarkOnBoundary,
    RangeError,
)
from .mu_mass import SeparationPattern

try:
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

__all__ = [
    "HoneycombDomain",
    "Polygon",
    "MarkSet",
    "ClassMassTable",
    "critical_weight",
    "enumerate_polygons",
    "classify",
    "crossing_parity",
    "class_masses",
    "fit_two_point_slope",
    "growth_constant_estimate",
]

DEFAULT_NODE_BUDGET = 10**9


def critical_weight(n: float) -> float:
    """Honeycomb critical step weight x_c(n) = 1 / sqrt(2 + sqrt(2 - n))."""
    if not 0.0 <= n <= 2.0:
        raise RangeError(f"loop fugacity n={n} outside [0, 2]")
    return 1.0 / math.sqrt(2.0 + math.sqrt(2.0 - n))


@dataclass(frozen=True)
class HoneycombDomain:
    """Finite brick-wall honeycomb patch of rows x cols faces."""

    rows: int
    cols: int
    boundary_mode: str = "free"

    def __post_init__(self):
        if self.rows < 4 or self.cols < 4:
            raise ValueError("domain needs at least 4 rows and 4 columns of faces")
        if self.boundary_mode not in ("free", "half_plane"):
            raise ValueError(f"unknown boundary mode {self.boundary_mode!r}")

    # -- faces ---------------------------------------------------------

    def faces(self):
        return ((i, j) for j in range(self.rows) for i in range(self.cols))

    @property
    def n_faces(self) -> int:
        return self.rows * self.cols

    def face_x0(self, i: int, j: int) -> int:
        return 2 * i + (j & 1)

    def contains_face(self, i: int, j: int) -> bool:
        return 0 <= i < self.cols and 0 <= j < self.rows

    def face_center_euclid(self, i: int, j: int) -> complex:
        return complex(math.sqrt(3.0) * (i + 0.5 * (j % 2)), 1.5 * j)

    def face_neighbors(self, i: int, j: int):
        off = 0 if j % 2 == 0 else 1
        cands = [
            (i - 1, j),
            (i + 1, j),
            (i - 1 + off, j + 1),
            (i + off, j + 1),
            (i - 1 + off, j - 1),
            (i + off, j - 1),
        ]
        return [f for f in cands if self.contains_face(*f)]

    def shared_edge(self, f1, f2):
        """Primal edge crossed when stepping between two adjacent faces."""
        (i1, j1), (i2, j2) = f1, f2
        if j1 == j2 and abs(i1 - i2) == 1:
            x = self.face_x0(max(i1, i2), j1)
            return ((x, j1), (x, j1 + 1))
        lo, hi = (f1, f2) if j1 < j2 else (f2, f1)
        (il, jl), (ih, jh) = lo, hi
        if jh - jl == 1:
            x0l, x0h = self.face_x0(il, jl), self.face_x0(ih, jh)
            left = max(x0l, x0h)
            if abs(x0l - x0h) == 1:
                return ((left, jh), (left + 1, jh))
        raise InvalidPath(f"faces {f1} and {f2} are not adjacent")

    # -- graph ---------------------------------------------------------

    def graph(self):
        return _build_graph(self.rows, self.cols)

    def wall_blocked(self) -> np.ndarray:
        verts, _, _ = self.graph()
        blocked = np.zeros(len(verts), dtype=np.bool_)
        if self.boundary_mode == "half_plane":
            blocked[verts[:, 1] == 0] = True
        return blocked


@lru_cache(maxsize=32)
def _build_graph(rows: int, cols: int):
    """Vertex list sorted by (y, x), index map and padded adjacency."""
    verts = set()
    edges = set()
    for j in range(rows):
        for i in range(cols):
            x0 = 2 * i + (j & 1)
            for y in (j, j + 1):
                for x in (x0, x0 + 1):
                    edges.add(((x, y), (x + 1, y)))
            for x in (x0, x0 + 2):
                edges.add(((x, j), (x, j + 1)))
    for a, b in edges:
        verts.add(a)
        verts.add(b)
    vlist = sorted(verts, key=lambda v: (v[1], v[0]))
    vidx = {v: k for k, v in enumerate(vlist)}
    nbr = -np.ones((len(vlist), 3), dtype=np.int32)
    deg = np.zeros(len(vlist), dtype=np.int32)
    for a, b in sorted(edges, key=lambda e: (vidx[e[0]], vidx[e[1]])):
        ia, ib = vidx[a], vidx[b]
        nbr[ia, deg[ia]] = ib
        deg[ia] += 1
        nbr[ib, deg[ib]] = ia
        deg[ib] += 1
    for k in range(len(vlist)):
        row = sorted(x for x in nbr[k] if x >= 0)
        nbr[k, : len(row)] = row
        nbr[k, len(row) :] = -1
    coords = np.array(vlist, dtype=np.int32)
    return coords, vidx, nbr


@dataclass(frozen=True)
class Polygon:
    """Closed self-avoiding cycle, stored as its canonical vertex walk."""

    vertices: tuple

    @property
    def length(self) -> int:
        return len(self.vertices)

    def edges(self):
        vs = self.vertices
        out = []
        for a, b in zip(vs, vs[1:] + (vs[0],)):
            out.append((a, b) if a <= b else (b, a))
        return out

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def vertical_edges(self):
        """(x, strip) pairs for the vertical edges of the cycle."""
        out = []
        for (xa, ya), (xb, yb) in self.edges():
            if xa == xb:
                out.append((xa, min(ya, yb)))
        return out

    def encloses_face(self, dom: HoneycombDomain, face) -> bool:
        i, j = face
        cx = dom.face_x0(i, j) + 1
        crossings = sum(1 for (x, s) in self.vertical_edges() if s == j and x < cx)
        return crossings % 2 == 1

    def interior_faces(self, dom: HoneycombDomain) -> frozenset:
        return frozenset(f for f in dom.faces() if self.encloses_face(dom, f))


@dataclass(frozen=True)
class MarkSet:
    """Marked faces standing in for the continuum operator positions."""

    faces: tuple

    def __post_init__(self):
        if len(self.faces) not in (2, 4):
            raise ValueError("mark sets carry 2 or 4 faces")
        if len(set(self.faces)) != len(self.faces):
            raise ValueError("marked faces must be distinct")

    def validate(self, dom: HoneycombDomain):
        for f in self.faces:
            if not dom.contains_face(*f):
                raise MarkOnBoundary(f"mark {f} outside the domain")
            if dom.boundary_mode == "half_plane":
                i, j = f
                if not (1 <= i <= dom.cols - 2 and 1 <= j <= dom.rows - 2):
                    raise MarkOnBoundary(f"mark {f} not strictly interior")
        return self


# ----------------------------------------------------------------------
# streaming enumeration (pure Python)
# ----------------------------------------------------------------------

def enumerate_polygons(
    dom: HoneycombDomain,
    l_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    anchor_rule: str = "min",
):
    """Yield every polygon of length <= l_max exactly once, in canonical order.

    anchor_rule picks the canonical representative vertex ("min" or
    "max" lexicographic); both rules enumerate the same polygons, which
    the test suite uses as a bijectivity check.
    """
    if l_max < 6 or l_max % 2 != 0:
        raise ValueError("l_max must be an even integer >= 6")
    if anchor_rule not in ("min", "max"):
        raise ValueError(f"unknown anchor rule {anchor_rule!r}")
    coords, _, nbr = dom.graph()
    blocked = dom.wall_blocked()
    nv = len(coords)
    sign = 1 if anchor_rule == "min" else -1
    nodes = 0

    order = range(nv) if anchor_rule == "min" else range(nv - 1, -1, -1)
    for anchor in order:
        if blocked[anchor]:
            continue
        dist = _bfs_from(nbr, blocked, anchor, sign)
        on = np.zeros(nv, dtype=bool)
        on[anchor] = True
        path = [anchor]
        stack = [0]
        while stack:
            v = path[-1]
            ni = stack[-1]
            if ni >= 3 or nbr[v, ni] < 0:
                stack.pop()
                on[v] = False
                path.pop()
                continue
            stack[-1] = ni + 1
            u = int(nbr[v, ni])
            nodes += 1
            if nodes > node_budget:
                raise BudgetError(f"node budget {node_budget} exceeded")
            L = len(path)  # closing now gives a polygon of length L
            if u == anchor:
                if L >= 6 and sign * (path[1] - path[-1]) < 0:
                    yield Polygon(tuple((int(x), int(y)) for x, y in coords[path]))
            elif (
                not blocked[u]
                and sign * (u - anchor) > 0
                and not on[u]
                and L + dist[u] <= l_max
            ):
                on[u] = True
                path.append(u)
                stack.append(0)


def _bfs_from(nbr, blocked, anchor, sign):
    nv = len(nbr)
    dist = np.full(nv, 4 * nv, dtype=np.int32)
    dist[anchor] = 0
    dq = deque([anchor])
    while dq:
        v = dq.popleft()
        for u in nbr[v]:
            if u < 0:
                continue
            u = int(u)
            if not blocked[u] and sign * (u - anchor) >= 0 and dist[u] > dist[v] + 1:
                dist[u] = dist[v] + 1
                dq.append(u)
    return dist


def classify(poly: Polygon, marks: MarkSet, dom: HoneycombDomain) -> SeparationPattern:
    """Separation class of a polygon: which marked faces it encloses."""
    marks.validate(dom)
    enclosed = {
        k + 1 for k, f in enumerate(marks.faces) if poly.encloses_face(dom, f)
    }
    if dom.boundary_mode == "half_plane":
        return SeparationPattern.half_plane(enclosed)
    return SeparationPattern.bulk(enclosed, n_marks=len(marks.faces))


def crossing_parity(poly: Polygon, path, dom: HoneycombDomain) -> int:
    """(-1)^(crossings of the polygon with a dual path between two faces)."""
    faces = [tuple(f) for f in path]
    if len(faces) < 1:
        raise InvalidPath("empty dual path")
    for f in faces:
        if not dom.contains_face(*f):
            raise InvalidPath(f"face {f} outside the domain")
    eset = poly.edge_set()
    crossings = 0
    for f1, f2 in zip(faces, faces[1:]):
        e = dom.shared_edge(f1, f2)
        a, b = e
        e = (a, b) if a <= b else (b, a)
        if e in eset:
            crossings += 1
    return 1 if crossings % 2 == 0 else -1


# ----------------------------------------------------------------------
# batch enumerate-and-classify kernel
# ----------------------------------------------------------------------

def _sweep_py(nbr, vx, vy, blocked, l_max, mark_strip, mark_cx, budget):
    nv = len(nbr)
    m = len(mark_strip)
    counts = np.zeros((1 << m, l_max + 1), dtype=np.int64)
    dist = np.empty(nv, dtype=np.int32)
    queue = np.empty(nv, dtype=np.int32)
    on = np.zeros(nv, dtype=np.bool_)
    path = np.empty(l_max + 2, dtype=np.int32)
    state = np.empty(l_max + 2, dtype=np.int32)
    nodes = 0
    for anchor in range(nv):
        if blocked[anchor]:
            continue
        dist[:] = 4 * nv
        dist[anchor] = 0
        queue[0] = anchor
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            for s in range(3):
                u = nbr[v, s]
                if u < 0:
                    continue
                if not blocked[u] and u >= anchor and dist[u] > dist[v] + 1:
                    dist[u] = dist[v] + 1
                    queue[tail] = u
                    tail += 1
        on[anchor] = True
        path[0] = anchor
        state[0] = 0
        depth = 0
        while depth >= 0:
            v = path[depth]
            ni = state[depth]
            if ni >= 3 or nbr[v, ni] < 0:
                on[v] = False
                depth -= 1
                continue
            state[depth] = ni + 1
            u = nbr[v, ni]
            nodes += 1
            if nodes > budget:
                return counts, nodes, 1
            L = depth + 1  # vertices on the path; closing length = L
            if u == anchor:
                if L >= 6 and path[1] < path[depth]:
                    bits = 0
                    for k in range(L):
                        a = path[k]
                        b = path[k + 1] if k + 1 < L else anchor
                        if vx[a] == vx[b]:
                            strip = min(vy[a], vy[b])
                            xe = vx[a]
                            for q in range(m):
                                if strip == mark_strip[q] and xe < mark_cx[q]:
                                    bits ^= 1 << q
                    counts[bits, L] += 1
            elif (
                not blocked[u]
                and u > anchor
                and not on[u]
                and L + dist[u] <= l_max
            ):
                depth += 1
                path[depth] = u
                state[depth] = 0
                on[u] = True
    return counts, nodes, 0


if _HAVE_NUMBA:
    _sweep_jit = njit(cache=True, nogil=True)(_sweep_py)
else:  # pragma: no cover
    _sweep_jit = _sweep_py


def _run_sweep(dom: HoneycombDomain, l_max: int, mark_faces, node_budget: int):
    if l_max < 6 or l_max % 2 != 0:
        raise ValueError("l_max must be an even integer >= 6")
    coords, _, nbr = dom.graph()
    blocked = dom.wall_blocked()
    mark_strip = np.array([j for (_, j) in mark_faces], dtype=np.int32)
    mark_cx = np.array([dom.face_x0(i, j) + 1 for (i, j) in mark_faces], dtype=np.int32)
    counts, nodes, status = _sweep_jit(
        nbr,
        coords[:, 0].astype(np.int32),
        coords[:, 1].astype(np.int32),
        blocked,
        int(l_max),
        mark_strip,
        mark_cx,
        int(node_budget),
    )
    if status == 1:
        raise BudgetError(f"node budget {node_budget} exceeded after {nodes} nodes")
    return counts, nodes


@dataclass(frozen=True)
class ClassMassTable:
    """Counts and weighted masses per separation class."""

    entries: dict
    x_c: float
    l_max: int
    total: int = field(default=0)

    def count(self, pattern: SeparationPattern) -> int:
        return self.entries[pattern][0]

    def mass(self, pattern: SeparationPattern) -> float:
        return self.entries[pattern][1]

    def patterns(self):
        return sorted(self.entries, key=lambda p: p.label())


def _all_patterns(n_marks: int, boundary: bool):
    pats = set()
    for bits in range(1 << n_marks):
        s = {k + 1 for k in range(n_marks) if bits >> k & 1}
        if boundary:
            pats.add(SeparationPattern.half_plane(s))
        else:
            pats.add(SeparationPattern.bulk(s, n_marks=n_marks))
    return pats


def class_masses(
    dom: HoneycombDomain,
    marks: MarkSet,
    l_max: int,
    n: float,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ClassMassTable:
    """Exact per-class polygon counts and weighted masses sum x_c^l."""
    marks.validate(dom)
    x_c = critical_weight(n)
    counts, _ = _run_sweep(dom, l_max, marks.faces, node_budget)
    boundary = dom.boundary_mode == "half_plane"
    m = len(marks.faces)
    weights = x_c ** np.arange(l_max + 1)
    entries = {p: (0, 0.0) for p in _all_patterns(m, boundary)}
    for bits in range(1 << m):
        row = counts[bits]
        tot = int(row.sum())
        if tot == 0:
            continue
        s = {k + 1 for k in range(m) if bits >> k & 1}
        pat = (
            SeparationPattern.half_plane(s)
            if boundary
            else SeparationPattern.bulk(s, n_marks=m)
        )
        c0, m0 = entries[pat]
        entries[pat] = (c0 + tot, m0 + float(row @ weights))
    total = sum(c for c, _ in entries.values())
    return ClassMassTable(entries=entries, x_c=x_c, l_max=l_max, total=total)


def fit_two_point_slope(
    dom: HoneycombDomain,
    l_max: int,
    distances,
    n: float = 0.0,
    node_budget: int = DEFAULT_NODE_BUDGET,
):
    """Least-squares slope of separating-class mass against ln(distance).

    Mark pairs sit on the central face row, centred on the domain, at the
    requested dual-graph distances; all marks must stay at least three
    faces from the domain edge.  Returns (slope, stderr); the continuum
    law predicts 1/(3 pi).
    """
    ds = sorted(set(int(d) for d in distances))
    if len(ds) < 3:
        raise InsufficientData("need at least three distances for a slope fit")
    j0 = dom.rows // 2
    pairs = []
    for d in ds:
        i_lo = (dom.cols - d) // 2
        i_hi = i_lo + d
        if i_lo < 3 or i_hi > dom.cols - 4 or not (3 <= j0 <= dom.rows - 4):
            raise InsufficientData(
                f"distance {d} does not fit in the bulk of a "
                f"{dom.rows}x{dom.cols} domain"
            )
        pairs.append(((i_lo, j0), (i_hi, j0)))
    faces = tuple(f for pair in pairs for f in pair)
    counts, _ = _run_sweep(dom, l_max, faces, node_budget)
    x_c = critical_weight(n)
    weights = x_c ** np.arange(l_max + 1)
    masses = []
    for p_idx in range(len(ds)):
        sel = 0.0
        for bits in range(counts.shape[0]):
            if (bits >> (2 * p_idx) & 1) != (bits >> (2 * p_idx + 1) & 1):
                sel += float(counts[bits] @ weights)
        masses.append(sel)
    xs = np.log(np.array(ds, dtype=float))
    ys = np.array(masses)
    coef, cov = np.polyfit(xs, ys, 1, cov=True)
    return float(coef[0]), float(math.sqrt(max(cov[0][0], 0.0)))


def single_mark_octave_slope(
    dom: HoneycombDomain,
    l_values,
    node_budget: int = DEFAULT_NODE_BUDGET,
):
    """Growth of the around-one-mark mass per unit ln(l_max).

    The mass of loops enclosing a central face grows by (1/6 pi) per
    e-fold of loop diameter; with diameter ~ l^(3/4) on the dilute
    branch the slope against ln(l_max) is nu/(6 pi) with nu = 3/4.
    Returns (slope, masses) with masses keyed by l_max.
    """
    ls = sorted(set(int(l) for l in l_values))
    if len(ls) < 3:
        raise InsufficientData("need at least three l_max values")
    center = ((dom.cols // 2, dom.rows // 2),)
    x_c = critical_weight(0.0)
    counts, _ = _run_sweep(dom, ls[-1], center, node_budget)
    weights = x_c ** np.arange(ls[-1] + 1)
    masses = {}
    for l in ls:
        sel = counts[1][: l + 1] @ weights[: l + 1]
        masses[l] = float(sel)
    xs = np.log(np.array(ls, dtype=float))
    ys = np.array([masses[l] for l in ls])
    coef = np.polyfit(xs, ys, 1)
    return float(coef[0]), masses


def growth_constant_estimate(
    dom: HoneycombDomain,
    l_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
):
    """Estimate the connective constant from the polygon-count series.

    The honeycomb counts oscillate between the two residue classes of
    l mod 4, so ratios compare lengths four apart,

        mu^4 ~ (c_l / c_{l-4}) (l / (l-4))^(5/2),

    with the universal l^(-5/2) polygon exponent divided out.  The two
    largest estimates (one per residue class) are averaged.
    """
    counts, _ = _run_sweep(dom, l_max, ((dom.cols // 2, dom.rows // 2),), node_budget)
    per_l = counts.sum(axis=0)
    ls = [l for l in range(6, l_max + 1) if per_l[l] > 0]
    ests = [
        (per_l[l] / per_l[l - 4] * (l / (l - 4.0)) ** 2.5) ** 0.25
        for l in ls
        if l - 4 in ls and l >= 18
    ]
    if len(ests) < 2:
        raise InsufficientData("need lengths >= 18 in both residue classes")
    return float(np.mean(ests[-2:]))
