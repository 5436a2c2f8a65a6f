"""Gluing products, formal linear combinations, and derived tangles.

Gluing two k-tangles identifies legs with equal labels; every chain of
identified legs collapses to a single edge and every closed chain becomes a
vertexless loop.  For k = 0 this is the disjoint union of diagrams.  The
product of tangles of different arities is zero, which is why linear
combinations (:class:`QuantumTangle`) are the natural ambient objects.

Also here: the matching tangles (vertex-free tangles pairing legs), their
signed sum over permutations (the determinant tangle, whose gluings span the
kernel of every n-state partition function with 2(n+1) legs), and the
derivative tangle of a diagram (the formal derivative of the partition
function with respect to the vertex tensor).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .diagram import (
    LEG,
    Endpoint,
    Tangle,
    VldError,
    build_tangle,
    canonical_key,
    load_tangle,
)

__all__ = [
    "COEFF_PRUNE_TOL",
    "DET_ARITY_BOUND",
    "glue",
    "QuantumTangle",
    "qt_add",
    "qt_scale",
    "qt_glue",
    "matching_tangle",
    "permutation_matching",
    "det_tangle",
    "tangle_derivative",
    "load_quantum_tangle",
]

#: Terms with |coefficient| at or below this are dropped.
COEFF_PRUNE_TOL = 1e-14

#: ``det_tangle(m)`` has m! terms; refuse beyond this bound.
DET_ARITY_BOUND = 6


def glue(t: Tangle, u: Tangle) -> Tangle:
    """Glue equal-labeled legs of two k-tangles into a closed product.

    Vertices of ``u`` are shifted past those of ``t``.  Each maximal chain of
    edges through identified legs becomes one edge; chains closing on
    themselves become vertexless loops.
    """
    if t.arity != u.arity:
        raise ValueError(f"arity mismatch: cannot glue a {t.arity}-tangle to a {u.arity}-tangle")
    shift = t.num_vertices

    def t_end(ep: Endpoint) -> tuple:
        return ("c", ep[1]) if ep[0] == LEG else ("t", ep)

    def u_end(ep: Endpoint) -> tuple:
        return ("c", ep[1]) if ep[0] == LEG else ("t", (ep[0] + shift, ep[1]))

    # Arcs of the connector graph: connectors ("c", label) have degree two
    # (one arc from each side), terminals ("t", endpoint) degree one.
    arcs = [(t_end(a), t_end(b)) for a, b in t.edges]
    arcs += [(u_end(a), u_end(b)) for a, b in u.edges]

    incident: dict[tuple, list[int]] = {}
    for i, (a, b) in enumerate(arcs):
        incident.setdefault(a, []).append(i)
        incident.setdefault(b, []).append(i)

    used = [False] * len(arcs)
    edges: list[tuple[Endpoint, Endpoint]] = []

    def walk(start_arc: int, start_node: tuple) -> tuple:
        """Follow the chain from a terminal until the far terminal."""
        arc, node = start_arc, start_node
        while True:
            used[arc] = True
            a, b = arcs[arc]
            node = b if node == a else a
            if node[0] == "t":
                return node[1]
            arc = next(j for j in incident[node] if j != arc)

    for i, (a, b) in enumerate(arcs):
        if used[i]:
            continue
        if a[0] == "t":
            edges.append((a[1], walk(i, a)))
        elif b[0] == "t":
            edges.append((b[1], walk(i, b)))
    loops = t.loop_count + u.loop_count
    for i in range(len(arcs)):
        if not used[i]:  # chain of connectors with no terminal: a closed loop
            arc, node = i, arcs[i][0]
            while not used[arc]:
                used[arc] = True
                a, b = arcs[arc]
                node = b if node == a else a
                arc = next(j for j in incident[node] if j != arc)
            loops += 1
    return build_tangle(t.num_vertices + u.num_vertices, edges, loops)


# ---------------------------------------------------------------------------
# Formal linear combinations


@dataclass(frozen=True)
class QuantumTangle:
    """A finite complex-linear combination of tangles.

    Terms are keyed by canonical key, so isomorphic tangles always combine.
    Instances are immutable; use the ``qt_*`` functions to build new ones.
    """

    terms: tuple[tuple[bytes, Tangle, complex], ...]

    @staticmethod
    def zero() -> "QuantumTangle":
        return QuantumTangle(())

    @staticmethod
    def of(t: Tangle, coeff: complex = 1.0) -> "QuantumTangle":
        return _from_items([(t, complex(coeff))])

    def coefficient(self, t: Tangle) -> complex:
        key = canonical_key(t)
        for k, _, c in self.terms:
            if k == key:
                return c
        return 0j

    @property
    def arities(self) -> set[int]:
        return {t.arity for _, t, _ in self.terms}

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        for _, t, c in self.terms:
            yield t, c


def _from_items(items) -> QuantumTangle:
    acc: dict[bytes, tuple[Tangle, complex]] = {}
    for t, c in items:
        key = canonical_key(t)
        if key in acc:
            rep, prev = acc[key]
            acc[key] = (rep, prev + c)
        else:
            acc[key] = (t, c)
    kept = [
        (key, rep, c)
        for key, (rep, c) in acc.items()
        if abs(c) > COEFF_PRUNE_TOL
    ]
    kept.sort(key=lambda item: item[0])
    return QuantumTangle(tuple(kept))


def qt_add(a: QuantumTangle, b: QuantumTangle) -> QuantumTangle:
    return _from_items([(t, c) for t, c in a] + [(t, c) for t, c in b])


def qt_scale(z: complex, a: QuantumTangle) -> QuantumTangle:
    return _from_items([(t, complex(z) * c) for t, c in a])


def qt_glue(a: QuantumTangle, b: QuantumTangle) -> QuantumTangle:
    """Bilinear extension of :func:`glue`; cross-arity products vanish."""
    items = []
    for t, ct in a:
        for u, cu in b:
            if t.arity != u.arity:
                continue
            items.append((glue(t, u), ct * cu))
    return _from_items(items)


# ---------------------------------------------------------------------------
# Matching tangles and the determinant tangle


def matching_tangle(pairs) -> Tangle:
    """Vertex-free tangle whose edges pair legs as in ``pairs``.

    ``pairs`` is an iterable of label pairs partitioning 1..2m.
    """
    return build_tangle(0, [((LEG, a), (LEG, b)) for a, b in pairs])


def permutation_matching(perm: tuple[int, ...]) -> Tangle:
    """The 2m-tangle with edges {i, m + perm(i)} for a permutation of 0..m-1."""
    m = len(perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"not a permutation of 0..{m - 1}: {perm!r}")
    return matching_tangle((i + 1, m + perm[i] + 1) for i in range(m))


def _parity_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_tangle(m: int, max_m: int = DET_ARITY_BOUND) -> QuantumTangle:
    """Signed sum of all permutation matchings: sum_perm sgn(perm) T_perm.

    A 2m-tangle combination with m! terms.  Gluing it to any 2m-tangle with
    m > n yields an element of the kernel of the n-state partition function.
    """
    if m < 1:
        raise ValueError("det_tangle needs m >= 1")
    if m > max_m:
        raise ValueError(f"det_tangle(m={m}) would have {m}! terms, above the bound m <= {max_m}")
    items = []
    for perm in itertools.permutations(range(m)):
        items.append((permutation_matching(perm), complex(_parity_sign(perm))))
    return _from_items(items)


# ---------------------------------------------------------------------------
# Derivative tangles


def tangle_derivative(g: Tangle) -> QuantumTangle:
    """Formal derivative of a diagram: a 4-tangle combination, one pair of
    half-weight terms per vertex.

    Deleting a vertex frees its four edge ends; they become legs 1..4 in slot
    order, and again legs 3,4,1,2 (the rotation by two), each with weight 1/2.
    Pairing the result with a direction tensor S gives the directional
    derivative of the partition function at R along S.
    """
    if g.arity:
        raise ValueError("tangle_derivative is defined for diagrams (arity 0) only")
    items: list[tuple[Tangle, complex]] = []
    for v in range(g.num_vertices):
        for labels in ((1, 2, 3, 4), (3, 4, 1, 2)):
            items.append((_delete_vertex(g, v, labels), 0.5 + 0j))
    return _from_items(items)


def _delete_vertex(g: Tangle, v: int, labels: tuple[int, int, int, int]) -> Tangle:
    def mapped(ep: Endpoint) -> Endpoint:
        if ep[0] == v:
            return (LEG, labels[ep[1]])
        if ep[0] > v:
            return (ep[0] - 1, ep[1])
        return ep

    return build_tangle(
        g.num_vertices - 1,
        [(mapped(a), mapped(b)) for a, b in g.edges],
        g.loop_count,
    )


# ---------------------------------------------------------------------------
# .qtl manifests: "term <re> <im> <path-to-.vld>" per line


def load_quantum_tangle(path: str) -> QuantumTangle:
    """Load a linear combination from a ``.qtl`` manifest.

    Diagram paths are resolved relative to the manifest's directory.
    """
    base = os.path.dirname(os.path.abspath(path))
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0] != "term" or len(tokens) != 4:
                raise VldError("expected: term <re> <im> <path>", str(path), lineno)
            try:
                re_part, im_part = float(tokens[1]), float(tokens[2])
            except ValueError:
                raise VldError("coefficient parts must be numbers", str(path), lineno)
            sub = tokens[3]
            if not os.path.isabs(sub):
                sub = os.path.join(base, sub)
            items.append((load_tangle(sub), complex(re_part, im_part)))
    return _from_items(items)
