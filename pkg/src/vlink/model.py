"""Vertex models and partition functions.

An n-state vertex model is a complex tensor R of shape (n, n, n, n) that is
invariant under swapping its first and last index pairs:
R[i, j, k, l] = R[k, l, i, j].  The indices follow the four slots of a vertex
in clockwise order, so positions 1,3 see the over-going strand and positions
2,4 the under-going one.

The partition function of a diagram G is

    f_R(G) = sum over edge colorings phi : E(G) -> {1..n} of
             prod over vertices of R[phi at slots 0..3]   times  n^loops,

with f_R(empty) = 1.  It is multiplicative over disjoint union.  For a
k-tangle the leg colors stay free and the result is a tensor of shape
(n,) * k, ordered by leg labels; gluing tangles corresponds to the bilinear
pairing of their tensors (no conjugation).

The orthogonal group acting diagonally on all four indices fixes every
partition function, which is exercised by :func:`apply_orthogonal` together
with the Cayley transform generator for complex orthogonal matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import QuantumTangle
from .contraction import ContractionPlan, execute_plan, plan_contraction
from .diagram import Tangle

__all__ = [
    "VertexModel",
    "TangleTensor",
    "symmetrize",
    "transmission_model",
    "strand_product_model",
    "knot_counting_model",
    "random_model",
    "random_orthogonal",
    "cayley_orthogonal",
    "load_model",
    "model_to_json",
    "save_model",
    "partition_function",
    "tangle_tensor",
    "qt_evaluate",
    "pair",
    "apply_orthogonal",
    "ORTHOGONALITY_TOL",
]

#: Frobenius tolerance on U^T U - I for apply_orthogonal.
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class VertexModel:
    """State count and the swap-invariant vertex tensor."""

    n: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("state count n must be >= 1")
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.n,) * 4:
            raise ValueError(f"entries must have shape {(self.n,) * 4}, got {entries.shape}")
        swapped = entries.transpose(2, 3, 0, 1)
        if not np.array_equal(entries, swapped):
            raise ValueError(
                "entries are not swap-invariant (R[i,j,k,l] != R[k,l,i,j]); "
                "use symmetrize() if projection is intended"
            )
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def norm(self) -> float:
        """Frobenius norm of the vertex tensor."""
        return float(np.linalg.norm(self.entries.ravel()))

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.entries.imag == 0.0))

    def perturbed(self, direction: "VertexModel", h: float) -> "VertexModel":
        """The model R + h * S for a swap-invariant direction S."""
        if direction.n != self.n:
            raise ValueError("direction must have the same state count")
        return VertexModel(self.n, self.entries + h * direction.entries)


def symmetrize(raw: np.ndarray) -> VertexModel:
    """Project an arbitrary rank-4 tensor onto swap-invariant models."""
    raw = np.asarray(raw, dtype=complex)
    if raw.ndim != 4 or len(set(raw.shape)) != 1:
        raise ValueError(f"expected shape (n, n, n, n), got {raw.shape}")
    sym = (raw + raw.transpose(2, 3, 0, 1)) / 2.0
    return VertexModel(raw.shape[0], sym)


@dataclass(frozen=True, eq=False)
class TangleTensor:
    """Evaluation of a k-tangle: a dense tensor over leg labels 1..k."""

    arity: int
    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.n,) * self.arity:
            raise ValueError(f"values must have shape {(self.n,) * self.arity}")
        object.__setattr__(self, "values", values)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values.ravel()))


# ---------------------------------------------------------------------------
# Stock models and generators


def transmission_model(n: int) -> VertexModel:
    """Colors pass straight through every crossing: R[i,j,k,l] = d_ik d_jl.

    Counts colorings constant on knots, so f_R(G) = n^knots; satisfies all
    three move conditions exactly.
    """
    eye = np.eye(n)
    return VertexModel(n, np.einsum("ik,jl->ijkl", eye, eye))


def strand_product_model(a: np.ndarray) -> VertexModel:
    """R[i,j,k,l] = A[i,k] A[j,l] for a symmetric matrix A.

    Each strand passing a vertex picks up a factor of A, so the partition
    function is a product of tr(A^m) over knots.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if not np.array_equal(a, a.T):
        raise ValueError("need a symmetric matrix for swap invariance")
    return VertexModel(a.shape[0], np.einsum("ik,jl->ijkl", a, a))


#: Symmetric matrix with double eigenvalue 1: all positive powers have trace 2.
KNOT_COUNT_MATRIX = np.array([[2.0, 1.0j], [1.0j, 0.0]])


def knot_counting_model() -> VertexModel:
    """Two-state model whose partition function is 2^knots on every diagram,
    despite failing the kink condition outright."""
    return strand_product_model(KNOT_COUNT_MATRIX)


def random_model(n: int, rng: np.random.Generator, real: bool = False) -> VertexModel:
    """Swap-symmetrized standard-normal model."""
    raw = rng.standard_normal((n,) * 4)
    if not real:
        raw = raw + 1j * rng.standard_normal((n,) * 4)
    return symmetrize(raw)


def cayley_orthogonal(a: np.ndarray) -> np.ndarray:
    """Cayley transform (I - A)(I + A)^-1 of an antisymmetric matrix.

    The result U satisfies U^T U = I; for complex antisymmetric A this
    produces complex orthogonal (not unitary) matrices.
    """
    a = np.asarray(a, dtype=complex)
    if not np.allclose(a, -a.T, atol=1e-12):
        raise ValueError("need an antisymmetric matrix")
    eye = np.eye(a.shape[0])
    return np.linalg.solve(eye + a, eye - a)


def random_orthogonal(
    n: int,
    rng: np.random.Generator,
    real: bool = False,
    max_norm: float | None = None,
) -> np.ndarray:
    """Random orthogonal matrix: QR-based when real, Cayley-based otherwise.

    The complex orthogonal group is unbounded, and an ill-conditioned
    transform amplifies round-off in every contraction it touches, so
    complex draws are rejected until |U|_F <= max_norm (default 3n).
    """
    if real:
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        return q * np.where(np.diag(r) >= 0, 1.0, -1.0)
    bound = 3.0 * n if max_norm is None else max_norm
    while True:
        raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        u = cayley_orthogonal(0.3 * (raw - raw.T))
        if float(np.linalg.norm(u)) <= bound:
            return u


# ---------------------------------------------------------------------------
# Model files: {"n": ..., "entries": [{"i","j","k","l","re","im"}, ...]}
# with 1-based indices; omitted entries are zero.


def load_model(path: str, project: bool = False) -> VertexModel:
    """Load a model from JSON; validates swap invariance unless ``project``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        n = int(doc["n"])
        items = doc.get("entries", [])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed model file ({exc})") from exc
    if n < 1:
        raise ValueError(f"{path}: state count n must be >= 1")
    entries = np.zeros((n,) * 4, dtype=complex)
    for pos, item in enumerate(items):
        try:
            idx = tuple(int(item[key]) - 1 for key in ("i", "j", "k", "l"))
            value = complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: malformed entry #{pos} ({exc})") from exc
        if not all(0 <= x < n for x in idx):
            raise ValueError(f"{path}: entry #{pos} index out of range 1..{n}")
        entries[idx] = value
    if project:
        return symmetrize(entries)
    try:
        return VertexModel(n, entries)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def model_to_json(model: VertexModel) -> str:
    items = []
    for idx in np.ndindex(model.entries.shape):
        z = model.entries[idx]
        if z != 0:
            i, j, k, l = (x + 1 for x in idx)
            items.append(
                {"i": i, "j": j, "k": k, "l": l, "re": float(z.real), "im": float(z.imag)}
            )
    return json.dumps({"n": model.n, "entries": items}, indent=2) + "\n"


def save_model(model: VertexModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))


# ---------------------------------------------------------------------------
# Evaluation


def tangle_tensor(model: VertexModel, t: Tangle, plan: ContractionPlan | None = None) -> TangleTensor:
    """Evaluate a k-tangle to its tensor over leg labels 1..k."""
    if plan is None:
        plan = plan_contraction(t)
    values = execute_plan(model.entries, model.n, t, plan)
    if t.loop_count:
        values = values * float(model.n) ** t.loop_count
    return TangleTensor(t.arity, model.n, values)


def partition_function(model: VertexModel, g: Tangle, plan: ContractionPlan | None = None) -> complex:
    """The scalar f_R(G) of a diagram (arity 0)."""
    if g.arity:
        raise ValueError("partition_function needs a diagram; use tangle_tensor for tangles")
    return complex(tangle_tensor(model, g, plan).values)


def qt_evaluate(model: VertexModel, qt: QuantumTangle) -> TangleTensor | complex:
    """Evaluate a linear combination; scalar for arity 0, tensor otherwise.

    The empty combination evaluates to the scalar 0.
    """
    arities = qt.arities
    if len(arities) > 1:
        raise ValueError(f"mixed arities in combination: {sorted(arities)}")
    if not arities:
        return 0j
    (arity,) = arities
    total = np.zeros((model.n,) * arity, dtype=complex)
    for t, c in qt:
        total += c * tangle_tensor(model, t).values
    if arity == 0:
        return complex(total)
    return TangleTensor(arity, model.n, total)


def pair(x: TangleTensor, y: TangleTensor) -> complex:
    """Bilinear pairing sum(x * y), no conjugation.

    Mismatched arity or state count pairs to 0, matching the vanishing of
    cross-arity glue products.
    """
    if x.arity != y.arity or x.n != y.n:
        return 0j
    return complex(np.sum(x.values * y.values))


def apply_orthogonal(model: VertexModel, u: np.ndarray) -> VertexModel:
    """Transform the model by U acting on all four indices.

    Requires U^T U = I to ``ORTHOGONALITY_TOL``; such transforms leave every
    partition function unchanged.  The result is re-symmetrized to keep swap
    invariance exact against round-off.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (model.n, model.n):
        raise ValueError(f"U must be {model.n} x {model.n}")
    residual = float(np.linalg.norm(u.T @ u - np.eye(model.n)))
    if residual > ORTHOGONALITY_TOL:
        raise ValueError(f"U^T U - I has Frobenius norm {residual:.3e} > {ORTHOGONALITY_TOL}")
    out = np.einsum("ai,bj,ck,dl,ijkl->abcd", u, u, u, u, model.entries, optimize=True)
    return symmetrize(out)
