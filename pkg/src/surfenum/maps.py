"""Combinatorial maps on surfaces via dart permutations.

A map is a pair of permutations on darts 1..2m: ``sigma`` gives the
counterclockwise rotation at each vertex, ``alpha`` is the fixed-point-free
involution pairing the two darts of each edge.  Faces are orbits of
``sigma∘alpha``.  An optional per-edge sign turns the pair into an embedding
scheme for non-orientable surfaces; faces are then traced on the orientation
double cover.

Surgery (cutting along a cycle), contractibility, the map/quadrangulation
correspondence, widths and core extraction all live here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "CombMap",
    "FaceSet",
    "CutResult",
    "MapError",
    "vertex_map",
    "faces",
    "euler_genus",
    "quadrangulation_of",
    "primal_of_quadrangulation",
    "simple_cycles",
    "cut_along_cycle",
    "is_contractible",
    "edge_width",
    "face_width",
    "near_simple_core",
    "near_irreducible_core",
    "is_simple",
    "is_near_simple",
    "is_irreducible",
    "is_near_irreducible",
    "switch_at_vertex",
    "canonical_form",
    "scheme_key",
    "is_isomorphic",
]

INFINITY = math.inf


class MapError(ValueError):
    pass


def _pad(images: Sequence[int]) -> tuple[int, ...]:
    return (0,) + tuple(images)


def _orbits(perm: tuple[int, ...], n: int) -> list[tuple[int, ...]]:
    seen = [False] * (n + 1)
    out = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(tuple(cyc))
    return out


class CombMap:
    """Dart-based embedded graph; immutable after construction.

    ``sigma`` and ``alpha`` are given as image lists for darts 1..n_darts.
    ``signs`` maps edge ids (the smaller dart of each edge) to +1/-1; absent
    means orientable with all edges positive.  ``root`` is an optional dart.
    The 0-dart map is the single vertex on the sphere.
    """

    __slots__ = ("n_darts", "sigma", "alpha", "signs", "root", "_vertex_of")

    def __init__(
        self,
        sigma: Sequence[int],
        alpha: Sequence[int] | None = None,
        signs: dict[int, int] | None = None,
        root: int | None = None,
    ):
        n = len(sigma)
        if n % 2:
            raise MapError("dart count must be even")
        object.__setattr__(self, "n_darts", n)
        object.__setattr__(self, "sigma", _pad(sigma))
        if alpha is None:
            alpha = [d + 1 if d % 2 else d - 1 for d in range(1, n + 1)]
        object.__setattr__(self, "alpha", _pad(alpha))
        self._validate()
        if signs is not None:
            signs = {e: int(s) for e, s in signs.items()}
            edge_ids = {min(d, self.alpha[d]) for d in range(1, n + 1)}
            if set(signs) != edge_ids or any(s not in (1, -1) for s in signs.values()):
                raise MapError("signs must map every edge id to +1 or -1")
        object.__setattr__(self, "signs", signs)
        if root is not None and not (1 <= root <= n):
            raise MapError(f"root dart {root} out of range")
        object.__setattr__(self, "root", root)
        vo = [0] * (n + 1)
        for i, orbit in enumerate(_orbits(self.sigma, n)):
            for d in orbit:
                vo[d] = i
        object.__setattr__(self, "_vertex_of", tuple(vo))

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("CombMap is immutable")

    def _validate(self) -> None:
        n = self.n_darts
        sigma, alpha = self.sigma, self.alpha
        if sorted(sigma[1:]) != list(range(1, n + 1)):
            raise MapError("sigma is not a permutation of the darts")
        for d in range(1, n + 1):
            if alpha[d] == d or alpha[alpha[d]] != d:
                raise MapError("alpha must be a fixed-point-free involution")
        if n:
            # transitivity of <sigma, alpha>
            seen = [False] * (n + 1)
            stack = [1]
            seen[1] = True
            count = 0
            while stack:
                d = stack.pop()
                count += 1
                for e in (sigma[d], alpha[d]):
                    if not seen[e]:
                        seen[e] = True
                        stack.append(e)
            if count != n:
                raise MapError("dart action is not transitive (map not connected)")

    # ------------------------------------------------------------------

    @classmethod
    def from_cycles(
        cls,
        n_darts: int,
        sigma_cycles: Iterable[Sequence[int]],
        alpha_cycles: Iterable[Sequence[int]] | None = None,
        signs: dict[int, int] | None = None,
        root: int | None = None,
    ) -> "CombMap":
        """Build from cycle notation; unlisted darts are fixed points."""

        def perm_from(cycles):
            img = list(range(n_darts + 1))
            for cyc in cycles:
                for i, d in enumerate(cyc):
                    img[d] = cyc[(i + 1) % len(cyc)]
            return img[1:]

        sigma = perm_from(sigma_cycles)
        alpha = perm_from(alpha_cycles) if alpha_cycles is not None else None
        return cls(sigma, alpha, signs, root)

    def vertex_of(self, d: int) -> int:
        return self._vertex_of[d]

    def vertices(self) -> list[tuple[int, ...]]:
        return _orbits(self.sigma, self.n_darts)

    def edge_of(self, d: int) -> int:
        return min(d, self.alpha[d])

    def edges(self) -> list[int]:
        return sorted({self.edge_of(d) for d in range(1, self.n_darts + 1)})

    def n_vertices(self) -> int:
        return 1 if self.n_darts == 0 else len(self.vertices())

    def n_edges(self) -> int:
        return self.n_darts // 2

    def is_orientable_scheme(self) -> bool:
        """True if the signs (if any) can be switched to all-positive."""
        if self.signs is None:
            return True
        return not _double_cover_connected(self)

    def darts(self) -> range:
        return range(1, self.n_darts + 1)

    def with_root(self, root: int | None) -> "CombMap":
        return CombMap(list(self.sigma[1:]), list(self.alpha[1:]), self.signs, root)

    def to_json(self) -> str:
        m = canonical_form(self)
        data: dict = {
            "n_darts": m.n_darts,
            "sigma": list(m.sigma[1:]),
            "alpha": list(m.alpha[1:]),
        }
        if m.signs is not None:
            data["signs"] = {str(e): s for e, s in sorted(m.signs.items())}
        if m.root is not None:
            data["root"] = m.root
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CombMap":
        data = json.loads(text)
        signs = data.get("signs")
        if signs is not None:
            signs = {int(e): int(s) for e, s in signs.items()}
        return cls(data["sigma"], data["alpha"], signs, data.get("root"))

    def __repr__(self) -> str:
        return f"CombMap(darts={self.n_darts}, V={self.n_vertices()}, E={self.n_edges()})"


def vertex_map(root: int | None = None) -> CombMap:
    """The 0-edge map: a single vertex on the sphere."""
    return CombMap([], [], None, None)


@dataclass(frozen=True)
class FaceSet:
    faces: tuple[tuple[int, ...], ...]
    count: int


# ----------------------------------------------------------------------
# face tracing


def _face_perm(m: CombMap) -> tuple[int, ...]:
    # apply alpha, then sigma
    return (0,) + tuple(m.sigma[m.alpha[d]] for d in m.darts())


def _double_cover(m: CombMap) -> tuple[list[int], list[int]]:
    """Orientation double cover of a signed map.

    Cover darts: d on side +1 keeps id d, side -1 gets id d + n.  Rotation is
    sigma on the positive sheet and sigma^{-1} on the negative one; alpha
    crosses sheets on negative edges.  Returned as raw image lists (the cover
    is disconnected exactly when the scheme is orientable).
    """
    n = m.n_darts
    sigma_inv = [0] * (n + 1)
    for d in m.darts():
        sigma_inv[m.sigma[d]] = d
    sigma = [0] * (2 * n)
    alpha = [0] * (2 * n)
    for d in m.darts():
        sigma[d - 1] = m.sigma[d]
        sigma[d + n - 1] = sigma_inv[d] + n
        s = m.signs[m.edge_of(d)] if m.signs else 1
        a = m.alpha[d]
        alpha[d - 1] = a if s == 1 else a + n
        alpha[d + n - 1] = a + n if s == 1 else a
    return sigma, alpha


def _double_cover_connected(m: CombMap) -> bool:
    if m.n_darts == 0:
        return False
    sigma, alpha = _double_cover(m)
    comp = _components(sigma, alpha, 2 * m.n_darts)
    return len(set(comp[1:])) == 1


def faces(m: CombMap) -> FaceSet:
    """Faces of the map; signed maps are traced on the double cover."""
    if m.n_darts == 0:
        return FaceSet(((),), 1)
    if m.signs is None or all(s == 1 for s in m.signs.values()):
        cycles = _orbits(_face_perm(m), m.n_darts)
        return FaceSet(tuple(cycles), len(cycles))
    n = m.n_darts
    sigma, alpha = _double_cover(m)
    phi = (0,) + tuple(sigma[alpha[d - 1] - 1] for d in range(1, 2 * n + 1))
    cycles = _orbits(phi, 2 * n)
    if len(cycles) % 2:
        raise MapError("internal error: odd face orbit count on double cover")
    # every face lifts to exactly two mirror orbits; keep one of each pair
    projected: list[tuple[int, ...]] = []
    seen: set[frozenset[tuple[int, int]]] = set()
    for cyc in cycles:
        flags = frozenset(
            (((d - 1) % n) + 1, 1 if d <= n else -1) for d in cyc
        )
        mirror = frozenset((d, -s) for d, s in flags)
        if mirror in seen or flags in seen:
            continue
        seen.add(flags)
        projected.append(tuple(((d - 1) % n) + 1 for d in cyc))
    return FaceSet(tuple(projected), len(cycles) // 2)


def euler_genus(m: CombMap) -> int:
    """kappa = 2 - (V - E + F); equals 2g for orientable maps."""
    v = m.n_vertices()
    e = m.n_edges()
    f = faces(m).count
    kappa = 2 - (v - e + f)
    if kappa < 0:
        raise MapError(f"negative Euler genus {kappa}: invalid map")
    if kappa % 2 and (m.signs is None or m.is_orientable_scheme()):
        raise MapError(f"odd Euler genus {kappa} for an orientable map")
    return kappa


def genus(m: CombMap) -> int:
    k = euler_genus(m)
    if m.signs is not None and not m.is_orientable_scheme():
        raise MapError("map is non-orientable; use euler_genus")
    return k // 2


# ----------------------------------------------------------------------
# the map <-> quadrangulation correspondence


def quadrangulation_of(m: CombMap) -> CombMap:
    """Radial construction: white vertex per face, corner-edges to it.

    M-dart d yields the Q-edge {2d-1, 2d} with 2d-1 based at the (black)
    vertex of d and 2d at the white vertex of d's face.  The counts obey
    corners(M)=edges(Q), edges(M)=faces(Q), vertices(M)=black(Q),
    faces(M)=white(Q), and the Euler genus is preserved.
    """
    if m.signs is not None and not m.is_orientable_scheme():
        raise MapError("quadrangulation of signed maps is not supported")
    if m.n_darts == 0:
        # degenerate convention: the vertex map becomes a single black-white
        # edge (zero faces of degree four)
        return CombMap([1, 2], [2, 1], None, 1)
    n = m.n_darts
    phi = _face_perm(m)
    phi_inv = [0] * (n + 1)
    for d in m.darts():
        phi_inv[phi[d]] = d
    sigma = [0] * (2 * n)
    for d in m.darts():
        sigma[2 * d - 2] = 2 * m.sigma[d] - 1  # black rotation follows sigma
        sigma[2 * d - 1] = 2 * phi_inv[d]  # white rotation follows phi^{-1}
    alpha = [0] * (2 * n)
    for d in m.darts():
        alpha[2 * d - 2] = 2 * d
        alpha[2 * d - 1] = 2 * d - 1
    root = 2 * m.root - 1 if m.root is not None else None
    return CombMap(sigma, alpha, None, root)


def bipartition(q: CombMap) -> tuple[set[int], set[int]] | None:
    """Vertex 2-coloring (sets of vertex ids), or None if not bipartite."""
    nv = q.n_vertices()
    color = [-1] * nv
    for start in range(nv):
        if color[start] != -1:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for d in q.darts():
                if q.vertex_of(d) != v:
                    continue
                w = q.vertex_of(q.alpha[d])
                if color[w] == -1:
                    color[w] = 1 - color[v]
                    stack.append(w)
                elif color[w] == color[v]:
                    return None
    blacks = {v for v in range(nv) if color[v] == 0}
    whites = {v for v in range(nv) if color[v] == 1}
    return blacks, whites


def is_quadrangulation(q: CombMap) -> bool:
    if q.n_darts == 0:
        return False
    if bipartition(q) is None:
        return False
    return all(len(f) == 4 for f in faces(q).faces)


def primal_of_quadrangulation(q: CombMap, black: set[int] | None = None) -> CombMap:
    """Inverse of the radial construction.

    ``black`` designates the black vertex class (vertex ids); defaults to the
    class containing the root dart's vertex, else the class of dart 1.
    """
    if q.n_darts == 2:
        return vertex_map()
    parts = bipartition(q)
    if parts is None:
        raise MapError("map is not bipartite")
    for f in faces(q).faces:
        if len(f) != 4:
            raise MapError("a face has degree != 4")
    ref_dart = q.root if q.root is not None else 1
    if black is None:
        ref = q.vertex_of(ref_dart)
        black = parts[0] if ref in parts[0] else parts[1]
    elif black not in (parts[0], parts[1]):
        raise MapError("designated black class is not a bipartition class")
    black_darts = sorted(d for d in q.darts() if q.vertex_of(d) in black)
    index = {d: i + 1 for i, d in enumerate(black_darts)}
    n = len(black_darts)
    sigma = [0] * n
    for d in black_darts:
        sigma[index[d] - 1] = index[q.sigma[d]]
    alpha = [0] * n
    for f in faces(q).faces:
        b = [d for d in f if q.vertex_of(d) in black]
        if len(b) != 2:
            raise MapError("face without two black corners")
        alpha[index[b[0]] - 1] = index[b[1]]
        alpha[index[b[1]] - 1] = index[b[0]]
    root = None
    if q.root is not None:
        if q.vertex_of(q.root) not in black:
            raise MapError("root dart must be based at a black vertex")
        root = index[q.root]
    return CombMap(sigma, alpha, None, root)


# ----------------------------------------------------------------------
# cycles


def _cycle_vertices(m: CombMap, cycle: Sequence[int]) -> list[int]:
    k = len(cycle)
    verts = []
    for i, d in enumerate(cycle):
        if not (1 <= d <= m.n_darts):
            raise MapError(f"dart {d} out of range")
        verts.append(m.vertex_of(d))
        nxt = cycle[(i + 1) % k]
        if m.vertex_of(m.alpha[d]) != m.vertex_of(nxt):
            raise MapError("dart list is not a closed walk")
        if m.alpha[d] == nxt and k > 1:
            raise MapError("cycle backtracks along an edge")
    if len(set(verts)) != k:
        raise MapError("cycle visits a vertex twice")
    return verts


def simple_cycles(m: CombMap, max_len: int | None = None) -> Iterator[list[int]]:
    """All simple cycles (distinct vertices) as dart lists, deduplicated.

    Each cycle is reported once, regardless of starting point or direction.
    """
    limit = max_len if max_len is not None else m.n_vertices()
    seen: set[frozenset[int]] = set()
    for length in range(1, limit + 1):
        yield from _cycles_of_length(m, length, seen)


def _cycles_of_length(
    m: CombMap, length: int, seen: set[frozenset[int]]
) -> Iterator[list[int]]:
    n = m.n_darts
    for start in range(1, n + 1):
        path = [start]
        used_vertices = {m.vertex_of(start)}

        def extend(path, used_vertices):
            d = path[-1]
            arrive = m.vertex_of(m.alpha[d])
            if len(path) == length:
                if arrive == m.vertex_of(path[0]):
                    if len(path) > 1 and m.alpha[d] == path[0]:
                        return
                    key = frozenset(m.edge_of(x) for x in path)
                    if len(key) == length and key not in seen:
                        seen.add(key)
                        yield list(path)
                return
            if arrive in used_vertices:
                return
            base = m.alpha[d]
            e = m.sigma[base]
            while e != base:
                path.append(e)
                used_vertices.add(arrive)
                yield from extend(path, used_vertices)
                used_vertices.discard(arrive)
                path.pop()
                e = m.sigma[e]

        yield from extend(path, used_vertices)


# ----------------------------------------------------------------------
# cutting along a cycle


@dataclass
class CutResult:
    kind: str  # "separating" | "handle" | "crosscap"
    pieces: list[CombMap]
    boundaries: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    # (piece index, boundary face darts in the piece's labelling)


def _switch_signs_along(m: CombMap, cycle: Sequence[int]) -> tuple[CombMap, int]:
    """Switch vertices so the cycle's edges are +1 except possibly the last.

    Returns the switched map and the cycle's (invariant) total sign.
    """
    if m.signs is None:
        return m, 1
    total = 1
    for d in cycle:
        total *= m.signs[m.edge_of(d)]
    cur = m
    for i in range(len(cycle) - 1):
        d = cycle[i]
        if cur.signs[cur.edge_of(d)] == -1:
            # switch at head vertex flips this edge (it is not a loop: the
            # cycle has distinct vertices, except the k=1 loop not hit here)
            cur = switch_at_vertex(cur, cur.vertex_of(cur.alpha[d]))
            d_new = d  # dart ids survive switching
            if cur.signs[cur.edge_of(d_new)] == -1:
                raise MapError("internal error: switch failed to flip edge")
    last = cycle[-1]
    want = total
    if len(cycle) == 1:
        return cur, total
    if cur.signs[cur.edge_of(last)] != want:
        raise MapError("internal error: cycle sign normalization failed")
    return cur, total


def switch_at_vertex(m: CombMap, v: int) -> CombMap:
    """Local switch: reverse the rotation at v, negate signs of non-loop
    edges incident to v.  Face count is invariant."""
    if m.signs is None:
        raise MapError("switching applies to signed maps only")
    orbit = []
    d0 = next(d for d in m.darts() if m.vertex_of(d) == v)
    d = d0
    while True:
        orbit.append(d)
        d = m.sigma[d]
        if d == d0:
            break
    sigma = list(m.sigma[1:])
    rev = list(reversed(orbit))
    for i, d in enumerate(rev):
        sigma[d - 1] = rev[(i + 1) % len(rev)]
    signs = dict(m.signs)
    for d in orbit:
        if m.vertex_of(m.alpha[d]) != v:
            e = m.edge_of(d)
            signs[e] = -signs[e]
    return CombMap(sigma, list(m.alpha[1:]), signs, m.root)


def cut_along_cycle(
    m: CombMap, cycle: Sequence[int], add_special_vertices: bool = False
) -> CutResult:
    """Cut the surface along a cycle of the map.

    Separating cuts produce two maps whose Euler genera sum to kappa(m);
    cutting a handle drops kappa by 2, a crosscap (one-sided cycle of a
    signed map) by 1.  Each cut boundary becomes a face of the result.  With
    ``add_special_vertices`` (bipartite quadrangulations), every boundary
    receives a marked black vertex joined to its white vertices.
    """
    verts = _cycle_vertices(m, cycle)
    k = len(cycle)
    work, total_sign = (m, 1) if m.signs is None else _switch_signs_along(m, cycle)
    one_sided = total_sign == -1

    n = work.n_darts
    cyc_darts: dict[int, tuple[int, int]] = {}  # dart -> (cycle pos, 0=d / 1=a)
    a_list = []
    for i in range(k):
        a_i = work.alpha[cycle[i - 1]]
        a_list.append(a_i)
        cyc_darts[cycle[i]] = (i, 0)
        if a_i in cyc_darts:
            raise MapError("cycle darts collide")
        cyc_darts[a_i] = (i, 1)

    # copies: side-1 keeps the original id, side-2 gets id + n
    def copy(d: int, side: int) -> int:
        return d if side == 1 else d + n

    sigma_new: dict[int, int] = {}
    alpha_new: dict[int, int] = {}
    signs_new: dict[int, int] = {}

    # split each cycle vertex into its two sides
    for i in range(k):
        d_i, a_i = cycle[i], a_list[i]
        orbit = []
        d = d_i
        while True:
            orbit.append(d)
            d = work.sigma[d]
            if d == d_i:
                break
        pos_a = orbit.index(a_i)
        arc_a = orbit[1:pos_a]  # strictly between d_i and a_i
        arc_b = orbit[pos_a + 1 :]  # strictly between a_i and d_i
        side1 = [copy(d_i, 1)] + arc_a + [copy(a_i, 1)]
        side2 = [copy(a_i, 2)] + arc_b + [copy(d_i, 2)]
        for seq in (side1, side2):
            for j, d in enumerate(seq):
                sigma_new[d] = seq[(j + 1) % len(seq)]

    # untouched vertices keep their rotations
    cycle_vertex_set = set(verts)
    for d in work.darts():
        if work.vertex_of(d) not in cycle_vertex_set:
            sigma_new[d] = work.sigma[d]

    # alpha: non-cycle edges unchanged, cycle edges doubled
    cyc_dart_set = set(cyc_darts)
    for d in work.darts():
        if d not in cyc_dart_set:
            alpha_new[d] = work.alpha[d]
    for i in range(k):
        d_i = cycle[i]
        a_next = a_list[(i + 1) % k]
        flip = one_sided and i == k - 1
        alpha_new[copy(d_i, 1)] = copy(a_next, 2 if flip else 1)
        alpha_new[copy(a_next, 2 if flip else 1)] = copy(d_i, 1)
        alpha_new[copy(d_i, 2)] = copy(a_next, 1 if flip else 2)
        alpha_new[copy(a_next, 1 if flip else 2)] = copy(d_i, 2)

    # relabel compactly
    all_darts = sorted(sigma_new)
    relabel = {d: i + 1 for i, d in enumerate(all_darts)}
    total = len(all_darts)
    sigma_flat = [0] * total
    alpha_flat = [0] * total
    for d in all_darts:
        sigma_flat[relabel[d] - 1] = relabel[sigma_new[d]]
        alpha_flat[relabel[d] - 1] = relabel[alpha_new[d]]
    if work.signs is not None:
        base_signs: dict[int, int] = {}
        for d in all_darts:
            orig = d if d <= n else d - n
            e_orig = work.edge_of(orig)
            s = work.signs[e_orig]
            if orig in cyc_dart_set:
                s = 1  # doubled boundary copies are positive by construction
            e_new = min(relabel[d], relabel[alpha_new[d]])
            base_signs[e_new] = s
    else:
        base_signs = None  # type: ignore[assignment]

    # split into connected components
    comp = _components(sigma_flat, alpha_flat, total)
    n_comp = len(set(comp[1:]))
    pieces: list[CombMap] = []
    boundaries: list[tuple[int, tuple[int, ...]]] = []
    kappa_before = euler_genus(m)
    marker_darts = [relabel[copy(cycle[0], 1)], relabel[copy(a_list[0], 2)]]
    for ci in range(n_comp):
        darts_c = [d for d in range(1, total + 1) if comp[d] == ci]
        sub = {d: i + 1 for i, d in enumerate(darts_c)}
        s_sigma = [0] * len(darts_c)
        s_alpha = [0] * len(darts_c)
        for d in darts_c:
            s_sigma[sub[d] - 1] = sub[sigma_flat[d - 1]]
            s_alpha[sub[d] - 1] = sub[alpha_flat[d - 1]]
        s_signs = None
        if base_signs is not None:
            s_signs = {}
            for d in darts_c:
                e = min(sub[d], sub[s_alpha[sub[d] - 1]])
                s_signs[e] = base_signs[min(d, alpha_flat[d - 1])]
        root = None
        if m.root is not None and m.root not in cyc_dart_set and comp[relabel[m.root]] == ci:
            root = sub[relabel[m.root]]
        piece = CombMap(s_sigma, s_alpha, s_signs, root)
        pieces.append(piece)
        for marker in marker_darts:
            if comp[marker] == ci:
                face = _face_orbit_of(piece, sub[marker])
                entry = (ci, face)
                if entry not in boundaries:
                    boundaries.append(entry)

    if n_comp == 2:
        kind = "separating"
        if sum(euler_genus(p) for p in pieces) != kappa_before:
            raise MapError("internal error: genus bookkeeping failed (separating)")
    elif n_comp == 1:
        drop = kappa_before - euler_genus(pieces[0])
        if one_sided and drop == 1:
            kind = "crosscap"
        elif drop == 2:
            kind = "handle"
        else:
            raise MapError(f"internal error: genus drop {drop} on connected cut")
    else:
        raise MapError("internal error: cut produced more than two pieces")

    result = CutResult(kind, pieces, boundaries)
    if add_special_vertices:
        result = _add_special_vertices(result)
    return result


def _components(sigma: list[int], alpha: list[int], n: int) -> list[int]:
    comp = [-1] * (n + 1)
    c = 0
    for start in range(1, n + 1):
        if comp[start] != -1:
            continue
        stack = [start]
        comp[start] = c
        while stack:
            d = stack.pop()
            for e in (sigma[d - 1], alpha[d - 1]):
                if comp[e] == -1:
                    comp[e] = c
                    stack.append(e)
        c += 1
    return comp


def _face_orbit_of(m: CombMap, d: int) -> tuple[int, ...]:
    """Face orbit through d, rotated to start at its smallest dart."""
    phi = _face_perm(m)
    orbit = [d]
    e = phi[d]
    while e != d:
        orbit.append(e)
        e = phi[e]
    k = orbit.index(min(orbit))
    return tuple(orbit[k:] + orbit[:k])


def _add_special_vertices(result: CutResult) -> CutResult:
    """Cap every boundary with a marked black vertex joined to its whites."""
    new_pieces = list(result.pieces)
    new_boundaries = []
    for piece_idx, face in result.boundaries:
        piece = new_pieces[piece_idx]
        parts = bipartition(piece)
        if parts is None:
            raise MapError("special vertices require a bipartite piece")
        # black class: the one holding the root vertex (roots sit on blacks
        # in the radial construction), else the class of dart 1
        ref = piece.vertex_of(piece.root if piece.root is not None else 1)
        blacks = parts[0] if ref in parts[0] else parts[1]
        whites_positions = []
        phi = _face_perm(piece)
        for d in face:
            # corner after dart d in the walk sits at vertex(phi(d)) between
            # alpha(d) and phi(d) in that vertex's rotation
            nxt = phi[d]
            v = piece.vertex_of(nxt)
            if v not in blacks:
                whites_positions.append((piece.alpha[d], nxt))
        n = piece.n_darts
        sigma = list(piece.sigma[1:])
        alpha = list(piece.alpha[1:])
        new_center: list[int] = []
        for j, (after, before) in enumerate(whites_positions):
            spoke_w = n + 2 * j + 1  # dart at the white vertex
            spoke_z = n + 2 * j + 2  # dart at the new black vertex
            sigma.extend([0, 0])
            alpha.extend([0, 0])
            sigma[after - 1] = spoke_w
            sigma[spoke_w - 1] = before
            alpha[spoke_w - 1] = spoke_z
            alpha[spoke_z - 1] = spoke_w
            new_center.append(spoke_z)
        for j, d in enumerate(new_center):
            sigma[d - 1] = new_center[(j + 1) % len(new_center)]
        signs = None
        if piece.signs is not None:
            signs = dict(piece.signs)
            for j in range(len(whites_positions)):
                signs[n + 2 * j + 1] = 1
        new_pieces[piece_idx] = CombMap(sigma, alpha, signs, piece.root)
        new_boundaries.append((piece_idx, tuple(new_center)))
    return CutResult(result.kind, new_pieces, new_boundaries)


# ----------------------------------------------------------------------
# contractibility and widths


def is_contractible(m: CombMap, cycle: Sequence[int]) -> bool:
    """Cut-and-cap test: the cycle separates and one capped side is genus 0."""
    result = cut_along_cycle(m, cycle)
    if result.kind != "separating":
        return False
    return any(euler_genus(p) == 0 for p in result.pieces)


def _is_contractible_fast(
    m: CombMap,
    cycle: Sequence[int],
    face_list: tuple[tuple[int, ...], ...],
    face_of: list[int],
) -> bool:
    """Side-counting contractibility for orientable maps (no surgery).

    Components of the dual graph minus the cycle's dual edges give the two
    sides; the side Euler genus is computed from inner counts.
    """
    cyc_edges = {m.edge_of(d) for d in cycle}
    nf = len(face_list)
    parent = list(range(nf))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d in m.darts():
        if m.edge_of(d) in cyc_edges:
            continue
        a, b = face_of[d], face_of[m.alpha[d]]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps = {find(i) for i in range(nf)}
    if len(comps) == 1:
        return False
    if len(comps) != 2:
        raise MapError("internal error: cycle splits dual into >2 parts")
    k = len(cycle)
    cyc_vertices = {m.vertex_of(d) for d in cycle}
    kappa_total = 0
    for comp_root in comps:
        faces_in = [i for i in range(nf) if find(i) == comp_root]
        face_set = set(faces_in)
        inner_edges = set()
        inner_vertices = set()
        for d in m.darts():
            e = m.edge_of(d)
            if e in cyc_edges:
                continue
            if face_of[d] in face_set:
                inner_edges.add(e)
                v = m.vertex_of(d)
                if v not in cyc_vertices:
                    inner_vertices.add(v)
        V = len(inner_vertices) + k
        E = len(inner_edges) + k
        F = len(faces_in) + 1
        kappa = 2 - (V - E + F)
        if kappa == 0:
            return True
        kappa_total += kappa
    return False


def edge_width(m: CombMap) -> float | int:
    """Minimum length of a non-contractible cycle; +inf on the sphere."""
    if euler_genus(m) == 0:
        return INFINITY
    orientable = m.signs is None or m.is_orientable_scheme()
    fs = faces(m)
    face_of = [0] * (m.n_darts + 1)
    if orientable and (m.signs is None):
        for i, f in enumerate(fs.faces):
            for d in f:
                face_of[d] = i
    best: float | int = INFINITY
    for cycle in simple_cycles(m):
        if len(cycle) >= best:
            break
        if m.signs is None:
            contractible = _is_contractible_fast(m, cycle, fs.faces, face_of)
        else:
            contractible = is_contractible(m, cycle)
        if not contractible:
            best = len(cycle)
    if best is INFINITY:
        raise MapError("no non-contractible cycle found on a positive-genus map")
    return best


def face_width(m: CombMap) -> float | int:
    """Half the edge-width of the quadrangulation (infinite on the sphere)."""
    if m.signs is not None and not m.is_orientable_scheme():
        raise MapError("face width implemented for orientable maps")
    if euler_genus(m) == 0:
        return INFINITY
    ew = edge_width(quadrangulation_of(m))
    if ew is INFINITY:
        return INFINITY
    if ew % 2:
        raise MapError("odd quadrangulation edge-width")
    return ew // 2


# ----------------------------------------------------------------------
# quadrangulation predicates and cores


def _two_cycles(q: CombMap) -> list[list[int]]:
    """All 2-cycles (parallel edge pairs) as dart cycles."""
    by_pair: dict[frozenset[int], list[int]] = {}
    for e in q.edges():
        a, b = q.vertex_of(e), q.vertex_of(q.alpha[e])
        by_pair.setdefault(frozenset((a, b)), []).append(e)
    out = []
    for pair, es in by_pair.items():
        if len(pair) == 1:
            continue  # loops cannot occur in bipartite maps
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                d1 = es[i]
                # orient the second edge back from head(d1) to tail(d1)
                d2 = es[j] if q.vertex_of(es[j]) == q.vertex_of(q.alpha[d1]) else q.alpha[es[j]]
                out.append([d1, d2])
    return out


def _four_cycles(q: CombMap) -> list[list[int]]:
    return [c for c in simple_cycles(q, max_len=4) if len(c) == 4]


def _is_facial(q: CombMap, cycle: Sequence[int]) -> bool:
    cyc_edges = {q.edge_of(d) for d in cycle}
    for f in faces(q).faces:
        if len(f) == len(cycle) and {q.edge_of(d) for d in f} == cyc_edges:
            if len({q.edge_of(d) for d in f}) == len(f):
                return True
    return False


def is_simple(q: CombMap) -> bool:
    """No 2-cycles, i.e. no parallel edges (bipartite maps have no loops)."""
    return not _two_cycles(q)


def is_near_simple(q: CombMap) -> bool:
    """No contractible 2-cycle."""
    return not any(is_contractible(q, c) for c in _two_cycles(q))


def is_near_irreducible(q: CombMap) -> bool:
    """Simple and every contractible 4-cycle delimits a face."""
    if not is_simple(q):
        return False
    for c in _four_cycles(q):
        if is_contractible(q, c) and not _is_facial(q, c):
            return False
    return True


def is_irreducible(q: CombMap) -> bool:
    """Simple and every 4-cycle delimits a face."""
    if not is_simple(q):
        return False
    return all(_is_facial(q, c) for c in _four_cycles(q))


def _disc_side(q: CombMap, result: CutResult) -> int:
    """Index of the piece to treat as the disc of a contractible cycle."""
    k = [euler_genus(p) for p in result.pieces]
    zero = [i for i, x in enumerate(k) if x == 0]
    if not zero:
        raise MapError("no genus-0 side: cycle is not contractible")
    if len(zero) == 1:
        return zero[0]
    with_root = [i for i, p in enumerate(result.pieces) if p.root is not None]
    if len(with_root) == 1:
        return 1 - with_root[0]
    raise MapError("ambiguous disc side on a planar map without a root")


def near_simple_core(q: CombMap) -> CombMap:
    """Collapse all maximal contractible 2-cycles into single edges."""
    current = q
    while True:
        candidates = [c for c in _two_cycles(current) if is_contractible(current, c)]
        if not candidates:
            return current
        # collapse a maximal one: largest disc side
        best, best_size = None, -1
        for c in candidates:
            res = cut_along_cycle(current, c)
            disc = _disc_side(current, res)
            size = res.pieces[disc].n_darts
            if size > best_size:
                best, best_size, best_res, best_disc = c, size, res, disc
        keep = best_res.pieces[1 - best_disc]
        boundary = next(f for i, f in best_res.boundaries if i == 1 - best_disc)
        # the boundary 2-gon has two parallel edges; delete one of them
        drop = boundary[0]
        current = _delete_edge(keep, drop)


def near_irreducible_core(q: CombMap) -> CombMap:
    """Empty the disc within each maximal contractible non-facial 4-cycle."""
    if not is_near_simple(q):
        raise MapError("near-irreducible core requires a near-simple input")
    current = q
    while True:
        candidates = [
            c
            for c in _four_cycles(current)
            if not _is_facial(current, c) and is_contractible(current, c)
        ]
        if not candidates:
            return current
        best, best_size = None, -1
        for c in candidates:
            res = cut_along_cycle(current, c)
            disc = _disc_side(current, res)
            size = res.pieces[disc].n_darts
            if size > best_size:
                best, best_size, best_res, best_disc = c, size, res, disc
        current = best_res.pieces[1 - best_disc]


def _delete_edge(m: CombMap, dart: int) -> CombMap:
    """Remove one edge (both darts) from the map, keeping it connected."""
    a, b = dart, m.alpha[dart]
    keep = [d for d in m.darts() if d not in (a, b)]
    relabel = {d: i + 1 for i, d in enumerate(keep)}
    sigma_old = list(m.sigma)

    def skip(d):
        e = sigma_old[d]
        while e in (a, b):
            e = sigma_old[e]
        return e

    sigma = [0] * len(keep)
    alpha = [0] * len(keep)
    for d in keep:
        sigma[relabel[d] - 1] = relabel[skip(d)]
        alpha[relabel[d] - 1] = relabel[m.alpha[d]]
    signs = None
    if m.signs is not None:
        signs = {}
        for d in keep:
            e_new = min(relabel[d], relabel[m.alpha[d]])
            signs[e_new] = m.signs[m.edge_of(d)]
    root = relabel.get(m.root) if m.root is not None else None
    return CombMap(sigma, alpha, signs, root)


# ----------------------------------------------------------------------
# canonical form and isomorphism


def canonical_form(m: CombMap, root: int | None = None) -> CombMap:
    """Deterministic relabelling: alpha becomes (1 2)(3 4)...; darts are
    numbered in first-visit order of the scan from the root (default: the
    map's root, else dart 1)."""
    if m.n_darts == 0:
        return m
    start = root if root is not None else (m.root if m.root is not None else 1)
    n = m.n_darts
    label = [0] * (n + 1)
    label[start] = 1
    label[m.alpha[start]] = 2
    order = [start, m.alpha[start]]
    nxt = 3
    i = 0
    while i < len(order):
        d = order[i]
        e = m.sigma[d]
        if label[e] == 0:
            label[e] = nxt
            label[m.alpha[e]] = nxt + 1
            order.extend([e, m.alpha[e]])
            nxt += 2
        i += 1
    sigma = [0] * n
    for d in m.darts():
        sigma[label[d] - 1] = label[m.sigma[d]]
    alpha = [0] * n
    for d in m.darts():
        alpha[label[d] - 1] = label[m.alpha[d]]
    signs = None
    if m.signs is not None:
        signs = {}
        for d in m.darts():
            e_new = min(label[d], label[m.alpha[d]])
            signs[e_new] = m.signs[m.edge_of(d)]
    new_root = label[m.root] if m.root is not None else None
    return CombMap(sigma, alpha, signs, new_root)


def _all_switchings(m: CombMap) -> Iterator[CombMap]:
    """All switching-equivalent representatives (2^V of them)."""
    nv = m.n_vertices()
    for mask in range(1 << nv):
        cur = m
        for v in range(nv):
            if mask >> v & 1:
                cur = switch_at_vertex(cur, v)
        yield cur


def scheme_key(m: CombMap, root: int) -> tuple:
    """Canonical key of the embedding scheme rooted at ``root``; signed maps
    are canonicalized over their whole switching class."""
    if m.signs is None:
        c = canonical_form(m, root=root)
        return (c.sigma, c.alpha, None)
    best = None
    for rep in _all_switchings(m):
        c = canonical_form(rep, root=root)
        key = (c.sigma, c.alpha, tuple(sorted(c.signs.items())))
        if best is None or key < best:
            best = key
    return best


def is_isomorphic(m1: CombMap, m2: CombMap, rooted: bool = True) -> bool:
    """Map isomorphism (orientation-preserving; signed maps up to switching)."""
    if m1.n_darts != m2.n_darts:
        return False
    if (m1.signs is None) != (m2.signs is None):
        return False
    if m1.n_darts == 0:
        return True
    if rooted:
        if (m1.root is None) != (m2.root is None):
            return False
        r1 = m1.root if m1.root is not None else 1
        r2 = m2.root if m2.root is not None else 1
        return scheme_key(m1, r1) == scheme_key(m2, r2)
    k1 = min(scheme_key(m1, r) for r in m1.darts())
    k2 = min(scheme_key(m2, r) for r in m2.darts())
    return k1 == k2
