"""Abstract virtual link diagrams and tangles.

A diagram is a finite 4-valent graph together with, at every vertex, a
clockwise cyclic order of the four edge ends.  Slots are numbered 0..3 in
that order and the pair of slots {0, 2} marks the over-going strand.  No
planarity is assumed: two diagrams that differ by "virtual" moves are simply
the same graph, so virtual moves never need to be implemented.  Closed
vertexless loops are allowed and are stored as a bare count.

A k-tangle additionally has k edge ends of degree one, labeled 1..k; gluing
two k-tangles along equal labels is the basic product of the theory (see
:mod:`vlink.algebra`).  A diagram is the k = 0 case.

Internally every tangle is a perfect matching on the endpoint set

    {(v, s) : v vertex index, s slot in 0..3}  union  {(LEG, i) : 1 <= i <= k}

with ``LEG = -1``, plus the loop count.  Isomorphisms are bijections of
vertices combined with per-vertex slot rotations by two positions (rotating
by one or three would exchange over- and under-strands, and mirror images are
deliberately not identified); leg labels are fixed pointwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

__all__ = [
    "LEG",
    "Endpoint",
    "VldError",
    "Tangle",
    "build_tangle",
    "empty_tangle",
    "loop_diagram",
    "strand_tangle",
    "parse_tangle",
    "load_tangle",
    "serialize_tangle",
    "save_tangle",
    "partner_map",
    "slot_edge_map",
    "relabel_legs",
    "disjoint_union",
    "knot_components",
    "canonical_key",
    "CANONICAL_VERTEX_BOUND",
]

#: Pseudo-vertex index marking a labeled degree-one end: ``(LEG, label)``.
LEG = -1

#: An endpoint is ``(vertex, slot)`` with ``vertex >= 0`` or ``(LEG, label)``.
Endpoint = tuple[int, int]

#: Default bound on ``num_vertices`` for exhaustive canonicalization.
CANONICAL_VERTEX_BOUND = 10


class VldError(ValueError):
    """Parse or validation failure of a ``.vld`` diagram file."""

    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


@dataclass(frozen=True)
class Tangle:
    """A k-tangle: vertices, the endpoint matching, and vertexless loops.

    ``edges`` is a frozenset of sorted endpoint pairs forming a perfect
    matching on the endpoint set described in the module docstring.  Use
    :func:`build_tangle` (or the parser) instead of the raw constructor;
    the constructor validates but does not normalize its input.
    """

    num_vertices: int
    arity: int
    edges: frozenset[tuple[Endpoint, Endpoint]]
    loop_count: int = 0

    def __post_init__(self) -> None:
        if self.num_vertices < 0 or self.arity < 0 or self.loop_count < 0:
            raise ValueError("vertex, leg and loop counts must be nonnegative")
        if self.arity % 2:
            raise ValueError(f"arity must be even, got {self.arity}")
        seen: set[Endpoint] = set()
        for edge in self.edges:
            if len(edge) != 2 or edge[0] >= edge[1]:
                raise ValueError(f"edge {edge!r} is not a sorted pair of distinct endpoints")
            for ep in edge:
                if ep in seen:
                    raise ValueError(f"endpoint {ep!r} used by more than one edge")
                seen.add(ep)
        expected = {(v, s) for v in range(self.num_vertices) for s in range(4)}
        expected |= {(LEG, i) for i in range(1, self.arity + 1)}
        if seen != expected:
            missing = sorted(expected - seen)
            extra = sorted(seen - expected)
            raise ValueError(
                f"edges do not form a perfect matching on the endpoint set"
                f" (missing {missing!r}, unexpected {extra!r})"
            )

    @property
    def is_diagram(self) -> bool:
        return self.arity == 0

    def __repr__(self) -> str:  # compact, deterministic
        return (
            f"Tangle(v={self.num_vertices}, k={self.arity}, "
            f"loops={self.loop_count}, edges={sorted(self.edges)!r})"
        )


def build_tangle(
    num_vertices: int,
    edges: object,
    loop_count: int = 0,
) -> Tangle:
    """Build a tangle from an iterable of endpoint pairs, inferring the arity.

    Edge pairs are normalized (sorted); leg labels present in the endpoints
    must be exactly 1..k for some even k.
    """
    norm = []
    labels = set()
    for a, b in edges:  # type: ignore[misc]
        ea, eb = (a, b) if a <= b else (b, a)
        norm.append((ea, eb))
        for v, x in (ea, eb):
            if v == LEG:
                labels.add(x)
    arity = len(labels)
    if labels != set(range(1, arity + 1)):
        raise ValueError(f"leg labels must be 1..k, got {sorted(labels)}")
    return Tangle(num_vertices, arity, frozenset(norm), loop_count)


def empty_tangle() -> Tangle:
    """The empty diagram (no vertices, no edges, no loops)."""
    return Tangle(0, 0, frozenset(), 0)


def loop_diagram(count: int = 1) -> Tangle:
    """A diagram consisting of ``count`` vertexless loops."""
    return Tangle(0, 0, frozenset(), count)


def strand_tangle(a: int = 1, b: int = 2) -> Tangle:
    """The 2-tangle that is a single edge joining legs ``a`` and ``b``."""
    if a == b:
        raise ValueError("a strand needs two distinct leg labels")
    return build_tangle(0, [((LEG, a), (LEG, b))])


# ---------------------------------------------------------------------------
# .vld parsing and serialization
#
# Line-oriented UTF-8.  Blank lines and text after "#" are ignored.
#   loops <m>                      vertexless loop count (lines accumulate)
#   x <vertex-id> <e0> <e1> <e2> <e3>   vertex with edge ids at slots 0..3
#   leg <label> <edge-id>          degree-one end of <edge-id>
# Every edge id must occur exactly twice across all slot/leg positions.


def parse_tangle(text: str, source: str = "<string>") -> Tangle:
    """Parse ``.vld`` text into a :class:`Tangle`.

    Vertices are numbered in order of appearance.  Raises :class:`VldError`
    with the offending line on malformed input.
    """
    occurrences: dict[str, list[tuple[Endpoint, int]]] = {}
    vertex_index: dict[str, int] = {}
    leg_lines: dict[int, int] = {}
    loops = 0

    def note(edge_id: str, ep: Endpoint, lineno: int) -> None:
        occurrences.setdefault(edge_id, []).append((ep, lineno))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kw = tokens[0]
        if kw == "loops":
            if len(tokens) != 2:
                raise VldError("expected: loops <count>", source, lineno)
            try:
                m = int(tokens[1])
            except ValueError:
                raise VldError(f"loop count {tokens[1]!r} is not an integer", source, lineno)
            if m < 0:
                raise VldError("loop count must be nonnegative", source, lineno)
            loops += m
        elif kw == "x":
            if len(tokens) != 6:
                raise VldError("expected: x <vertex-id> <e0> <e1> <e2> <e3>", source, lineno)
            name = tokens[1]
            if name in vertex_index:
                raise VldError(f"duplicate vertex id {name!r}", source, lineno)
            v = len(vertex_index)
            vertex_index[name] = v
            for s, edge_id in enumerate(tokens[2:6]):
                note(edge_id, (v, s), lineno)
        elif kw == "leg":
            if len(tokens) != 3:
                raise VldError("expected: leg <label> <edge-id>", source, lineno)
            try:
                label = int(tokens[1])
            except ValueError:
                raise VldError(f"leg label {tokens[1]!r} is not an integer", source, lineno)
            if label < 1:
                raise VldError("leg labels start at 1", source, lineno)
            if label in leg_lines:
                raise VldError(f"duplicate leg label {label}", source, lineno)
            leg_lines[label] = lineno
            note(tokens[2], (LEG, label), lineno)
        else:
            raise VldError(f"unknown directive {kw!r}", source, lineno)

    arity = len(leg_lines)
    if leg_lines and sorted(leg_lines) != list(range(1, arity + 1)):
        missing = sorted(set(range(1, max(leg_lines) + 1)) - set(leg_lines))
        raise VldError(f"leg labels are not contiguous 1..k (missing {missing})", source)
    edges = []
    for edge_id, occ in sorted(occurrences.items()):
        if len(occ) != 2:
            lines = ", ".join(str(ln) for _, ln in occ)
            raise VldError(
                f"edge id {edge_id!r} occurs {len(occ)} time(s) (lines {lines}); "
                "every edge id must occur exactly twice",
                source,
            )
        (ep_a, _), (ep_b, _) = occ
        edges.append((ep_a, ep_b))
    try:
        return build_tangle(len(vertex_index), edges, loops)
    except ValueError as exc:
        raise VldError(str(exc), source) from exc


def load_tangle(path: str) -> Tangle:
    with open(path, encoding="utf-8") as fh:
        return parse_tangle(fh.read(), source=str(path))


def serialize_tangle(t: Tangle) -> str:
    """Serialize to ``.vld`` text; ``parse_tangle`` recovers an equal tangle."""
    edge_ids: dict[tuple[Endpoint, Endpoint], str] = {}
    slot_edge = slot_edge_map(t)

    def name_for(ep: Endpoint) -> str:
        edge = slot_edge[ep]
        if edge not in edge_ids:
            edge_ids[edge] = f"e{len(edge_ids)}"
        return edge_ids[edge]

    lines = []
    if t.loop_count:
        lines.append(f"loops {t.loop_count}")
    for v in range(t.num_vertices):
        ids = " ".join(name_for((v, s)) for s in range(4))
        lines.append(f"x v{v} {ids}")
    for i in range(1, t.arity + 1):
        lines.append(f"leg {i} {name_for((LEG, i))}")
    return "\n".join(lines) + ("\n" if lines else "")


def save_tangle(t: Tangle, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_tangle(t))


# ---------------------------------------------------------------------------
# Structural helpers


def partner_map(t: Tangle) -> dict[Endpoint, Endpoint]:
    """Map each endpoint to the opposite endpoint of its edge."""
    partner: dict[Endpoint, Endpoint] = {}
    for a, b in t.edges:
        partner[a] = b
        partner[b] = a
    return partner


def slot_edge_map(t: Tangle) -> dict[Endpoint, tuple[Endpoint, Endpoint]]:
    """Map each endpoint to its (sorted) edge."""
    out: dict[Endpoint, tuple[Endpoint, Endpoint]] = {}
    for edge in t.edges:
        out[edge[0]] = edge
        out[edge[1]] = edge
    return out


def relabel_legs(t: Tangle, perm: dict[int, int]) -> Tangle:
    """Relabel legs by the permutation ``perm`` of 1..k (label -> new label)."""
    if sorted(perm) != list(range(1, t.arity + 1)) or sorted(perm.values()) != sorted(perm):
        raise ValueError(f"perm must permute 1..{t.arity}")

    def mapped(ep: Endpoint) -> Endpoint:
        return (LEG, perm[ep[1]]) if ep[0] == LEG else ep

    return build_tangle(
        t.num_vertices,
        [(mapped(a), mapped(b)) for a, b in t.edges],
        t.loop_count,
    )


def disjoint_union(g: Tangle, h: Tangle) -> Tangle:
    """Disjoint union of two diagrams (arity 0 on both sides)."""
    if g.arity or h.arity:
        raise ValueError("disjoint_union is defined for diagrams (arity 0) only")
    shift = g.num_vertices

    def mapped(ep: Endpoint) -> Endpoint:
        return (ep[0] + shift, ep[1])

    edges = list(g.edges) + [(mapped(a), mapped(b)) for a, b in h.edges]
    return build_tangle(g.num_vertices + h.num_vertices, edges, g.loop_count + h.loop_count)


def knot_components(g: Tangle) -> int:
    """Number of knots of a diagram.

    Two edges belong to the same knot when some chain of vertices joins them
    through opposite slots (0 with 2, 1 with 3); every vertexless loop is one
    further knot.
    """
    if g.arity:
        raise ValueError("knot_components is defined for diagrams (arity 0) only")
    edges = sorted(g.edges)
    index = {e: i for i, e in enumerate(edges)}
    parent = list(range(len(edges)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    slot_edge = slot_edge_map(g)
    for v in range(g.num_vertices):
        union(index[slot_edge[(v, 0)]], index[slot_edge[(v, 2)]])
        union(index[slot_edge[(v, 1)]], index[slot_edge[(v, 3)]])
    roots = {find(i) for i in range(len(edges))}
    return len(roots) + g.loop_count


# ---------------------------------------------------------------------------
# Canonical form
#
# The canonical key is the lexicographically minimal encoding of the tangle
# over all vertex orderings and per-vertex rotations by two slots.  Candidate
# orderings are restricted to those sorted by an iteratively refined vertex
# invariant; the invariant is isomorphism-invariant, so the minimum over the
# restricted set is still a canonical form.  Keys are equal iff the tangles
# are isomorphic (with legs fixed pointwise).

_key_cache: dict[Tangle, bytes] = {}


def canonical_key(t: Tangle, max_vertices: int = CANONICAL_VERTEX_BOUND) -> bytes:
    """Canonical byte-string key of the isomorphism class of ``t``."""
    if t.num_vertices > max_vertices:
        raise ValueError(
            f"tangle has {t.num_vertices} vertices, above the exhaustive "
            f"canonicalization bound {max_vertices}; raise max_vertices "
            "explicitly or fall back to a non-canonical structural hash"
        )
    cached = _key_cache.get(t)
    if cached is not None:
        return cached

    nv = t.num_vertices
    classes = _refined_classes(t)
    best: tuple | None = None
    for order in _admissible_orders(classes, nv):
        pos = {old: new for new, old in enumerate(order)}
        for rots in itertools.product((0, 2), repeat=nv):

            def mapped(ep: Endpoint) -> Endpoint:
                if ep[0] == LEG:
                    return ep
                v, s = ep
                return (pos[v], (s + rots[v]) % 4)

            code = (
                nv,
                t.arity,
                t.loop_count,
                tuple(sorted(tuple(sorted((mapped(a), mapped(b)))) for a, b in t.edges)),
            )
            if best is None or code < best:
                best = code
    key = repr(best).encode("ascii")
    _key_cache[t] = key
    return key


def _refined_classes(t: Tangle) -> dict[int, int]:
    """Iteratively refined vertex classes, invariant under isomorphism."""
    partner = partner_map(t)
    nv = t.num_vertices
    cls = {v: 0 for v in range(nv)}
    for _ in range(max(nv, 1)):
        sigs = {}
        for v in range(nv):
            rows = []
            for r in (0, 2):
                row = []
                for s in range(4):
                    p = partner[(v, (s + r) % 4)]
                    if p[0] == LEG:
                        row.append((0, p[1], 0))
                    elif p[0] == v:
                        # relative slot offset is rotation-invariant
                        row.append((1, (p[1] - (s + r)) % 4, 0))
                    else:
                        # partner slot parity survives rotation by two
                        row.append((2, cls[p[0]], p[1] % 2))
                rows.append(tuple(row))
            sigs[v] = (cls[v], min(rows))
        order = {sig: i for i, sig in enumerate(sorted(set(sigs.values())))}
        new = {v: order[sigs[v]] for v in range(nv)}
        if new == cls:
            break
        cls = new
    return cls


def _admissible_orders(cls: dict[int, int], nv: int):
    """All vertex orderings listing refined classes in increasing order."""
    cells: dict[int, list[int]] = {}
    for v in range(nv):
        cells.setdefault(cls[v], []).append(v)
    cell_lists = [sorted(cells[c]) for c in sorted(cells)]
    for parts in itertools.product(*(itertools.permutations(cell) for cell in cell_lists)):
        yield [v for part in parts for v in part]
