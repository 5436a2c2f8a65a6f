"""Desk-scale checks of the partition-function characterization machinery.

Four families of evidence about which tensors arise as n-state partition
functions:

* kernel vanishing: gluing the determinant tangle on 2(n+1) legs to any
  2(n+1)-tangle evaluates to zero under every n-state model, while the
  determinant on 2n legs does not (the negative control);
* the Gram matrix of glued tangle pairs is positive semidefinite for real
  models;
* a rank probe comparing the pairing Gram rank with the tensor span rank
  (equal for real models, possibly smaller for complex ones since the
  pairing has no conjugation);
* the derivative tangle reproduces directional derivatives of the partition
  function, checked against central finite differences.

Tangle enumeration is exhaustive generation of endpoint matchings with
canonical deduplication, deterministic by canonical key.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    QuantumTangle,
    det_tangle,
    qt_glue,
    tangle_derivative,
)
from .diagram import LEG, Endpoint, Tangle, build_tangle, canonical_key
from .model import (
    TangleTensor,
    VertexModel,
    pair,
    partition_function,
    qt_evaluate,
    tangle_tensor,
)

__all__ = [
    "ENUMERATION_ENDPOINT_BUDGET",
    "enumerate_tangles",
    "random_tangle",
    "KernelReport",
    "kernel_residual",
    "kernel_probe",
    "GramReport",
    "gram_psd",
    "nondegeneracy_probe",
    "fd_check",
]

#: Exhaustive enumeration refuses beyond this many endpoints (k + 4v).
ENUMERATION_ENDPOINT_BUDGET = 16


def _matchings(points: list[Endpoint]):
    """All perfect matchings of an even-sized point list."""
    if not points:
        yield []
        return
    first = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1 :]
        for sub in _matchings(rest):
            yield [(first, points[i])] + sub


def enumerate_tangles(k: int, max_vertices: int) -> list[Tangle]:
    """All loop-free k-tangles with at most ``max_vertices`` vertices, up to
    isomorphism, sorted by canonical key."""
    if k % 2:
        raise ValueError("arity must be even")
    if k + 4 * max_vertices > ENUMERATION_ENDPOINT_BUDGET:
        raise ValueError(
            f"endpoint budget exceeded: k + 4*max_vertices = {k + 4 * max_vertices} "
            f"> {ENUMERATION_ENDPOINT_BUDGET}"
        )
    seen: dict[bytes, Tangle] = {}
    for v in range(max_vertices + 1):
        points = [(LEG, i) for i in range(1, k + 1)]
        points += [(vv, s) for vv in range(v) for s in range(4)]
        for matching in _matchings(points):
            t = build_tangle(v, matching, 0)
            key = canonical_key(t)
            if key not in seen:
                seen[key] = t
    return [seen[key] for key in sorted(seen)]


def random_tangle(
    rng: np.random.Generator,
    arity: int,
    num_vertices: int,
    loop_count: int = 0,
) -> Tangle:
    """Uniform random wiring: shuffle all endpoints, pair them consecutively."""
    if arity % 2:
        raise ValueError("arity must be even")
    points: list[Endpoint] = [(LEG, i) for i in range(1, arity + 1)]
    points += [(v, s) for v in range(num_vertices) for s in range(4)]
    order = rng.permutation(len(points))
    shuffled = [points[i] for i in order]
    edges = [(shuffled[2 * i], shuffled[2 * i + 1]) for i in range(len(points) // 2)]
    return build_tangle(num_vertices, edges, loop_count)


# ---------------------------------------------------------------------------
# Kernel of the partition function


def kernel_residual(model: VertexModel, t: Tangle) -> float:
    """|f_R(det(n+1) . t)| for a 2(n+1)-tangle t; zero in exact arithmetic."""
    m = model.n + 1
    if t.arity != 2 * m:
        raise ValueError(f"need a {2 * m}-tangle for an n={model.n} model, got arity {t.arity}")
    value = qt_evaluate(model, qt_glue(det_tangle(m), QuantumTangle.of(t)))
    return abs(value)


@dataclass(frozen=True)
class KernelReport:
    n: int
    residuals: tuple[float, ...]
    scales: tuple[float, ...]
    max_scaled_residual: float
    negative_control: float

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_scaled_residual <= tol


def kernel_probe(
    model: VertexModel,
    samples: int,
    max_vertices: int,
    rng: np.random.Generator,
) -> KernelReport:
    """Evaluate kernel residuals on random tangles, with a negative control.

    Residuals are scaled by 1 + |R|^v.  The control glues the determinant
    tangle on 2n legs (one size too small) to random 2n-tangles and records
    the largest magnitude, which should be far from zero.
    """
    residuals = []
    scales = []
    norm = model.norm
    for _ in range(samples):
        v = int(rng.integers(max_vertices + 1))
        t = random_tangle(rng, 2 * (model.n + 1), v)
        residuals.append(kernel_residual(model, t))
        scales.append(1.0 + norm**v)
    control = 0.0
    if model.n >= 1:
        det_small = det_tangle(model.n)
        for _ in range(samples):
            v = int(rng.integers(max_vertices + 1))
            t = random_tangle(rng, 2 * model.n, v)
            value = qt_evaluate(model, qt_glue(det_small, QuantumTangle.of(t)))
            control = max(control, abs(value))
    scaled = max(
        (r / s for r, s in zip(residuals, scales)),
        default=0.0,
    )
    return KernelReport(model.n, tuple(residuals), tuple(scales), scaled, control)


# ---------------------------------------------------------------------------
# Gram positivity and the rank probe


@dataclass(frozen=True)
class GramReport:
    basis: tuple[Tangle, ...]
    gram: np.ndarray
    min_eigenvalue: float
    hermiticity_residual: float

    def passed(self, tol: float = 1e-8) -> bool:
        scale = 1.0 + float(np.linalg.norm(self.gram))
        return self.min_eigenvalue >= -tol * scale


def _tensor_rows(model: VertexModel, basis: list[Tangle]) -> np.ndarray:
    rows = [tangle_tensor(model, t).values.ravel() for t in basis]
    return np.array(rows) if rows else np.zeros((0, model.n**4), dtype=complex)


def gram_psd(model: VertexModel, max_vertices: int, arity: int = 4) -> GramReport:
    """Gram matrix of glued basis pairs for a real model; PSD if the model's
    tensors are honest real partition-function data.

    Entries are pair(f(T), f(T')), equal to f(T . T') by the pairing
    identity.
    """
    if not model.is_real:
        raise ValueError("gram_psd needs a real model")
    basis = enumerate_tangles(arity, max_vertices)
    rows = _tensor_rows(model, basis)
    gram = rows @ rows.T
    herm = float(np.max(np.abs(gram.imag))) if gram.size else 0.0
    sym = (gram.real + gram.real.T) / 2.0
    eigs = np.linalg.eigvalsh(sym) if gram.size else np.array([0.0])
    return GramReport(tuple(basis), gram, float(eigs.min()), herm)


def nondegeneracy_probe(
    model: VertexModel,
    arity: int,
    max_vertices: int,
    rank_tol: float = 1e-8,
) -> tuple[int, int]:
    """(gram_rank, span_rank) over the enumerated basis.

    Ranks count singular values at or above ``rank_tol`` times the largest.
    Equality certifies the pairing is nondegenerate on the span; real models
    always pass, while complex models can drop Gram rank on isotropic
    directions.
    """
    basis = enumerate_tangles(arity, max_vertices)
    rows = _tensor_rows(model, basis)
    gram = rows @ rows.T

    def rank(a: np.ndarray) -> int:
        if a.size == 0:
            return 0
        sv = np.linalg.svd(a, compute_uv=False)
        top = sv.max()
        if top == 0.0:
            return 0
        return int(np.sum(sv >= rank_tol * top))

    return rank(gram), rank(rows)


# ---------------------------------------------------------------------------
# Derivative tangles vs finite differences


def fd_check(
    model: VertexModel,
    g: Tangle,
    direction: VertexModel,
    h: float = 1e-5,
) -> float:
    """|central difference - pairing with the derivative tangle| at ``g``.

    The derivative tangle evaluates to a 4-leg tensor; pairing it with the
    direction tensor gives the exact directional derivative, so the return
    value is the finite-difference error (zero up to O(h^2) terms, exactly
    zero for diagrams with fewer than three vertices).
    """
    f_plus = partition_function(model.perturbed(direction, +h), g)
    f_minus = partition_function(model.perturbed(direction, -h), g)
    central = (f_plus - f_minus) / (2.0 * h)
    derivative = qt_evaluate(model, tangle_derivative(g))
    if isinstance(derivative, complex):
        paired = 0j
    else:
        paired = pair(derivative, TangleTensor(4, model.n, direction.entries))
    return abs(central - paired)
