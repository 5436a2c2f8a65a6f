"""Vertex models on virtual link diagrams and tangles.

A diagram is an abstract 4-valent graph whose vertices carry a clockwise
slot order (slots 0 and 2 form the over-going strand); a k-tangle also has
k labeled legs.  Given an n-state vertex model R, `partition_function`
sums over edge colorings, `tangle_tensor` leaves leg colorings open, and
the move machinery checks that R defines an invariant both algebraically
and by rewriting diagrams in place.
"""

from .algebra import (
    QuantumTangle,
    det_tangle,
    glue,
    load_quantum_tangle,
    matching_tangle,
    permutation_matching,
    qt_add,
    qt_glue,
    qt_scale,
    tangle_derivative,
)
from .characterize import (
    GramReport,
    KernelReport,
    enumerate_tangles,
    fd_check,
    gram_psd,
    kernel_probe,
    kernel_residual,
    nondegeneracy_probe,
    random_tangle,
)
from .contraction import ContractionPlan, plan_contraction
from .diagram import (
    LEG,
    Tangle,
    VldError,
    build_tangle,
    canonical_key,
    disjoint_union,
    empty_tangle,
    knot_components,
    load_tangle,
    loop_diagram,
    parse_tangle,
    relabel_legs,
    save_tangle,
    serialize_tangle,
    strand_tangle,
)
from .model import (
    TangleTensor,
    VertexModel,
    apply_orthogonal,
    cayley_orthogonal,
    knot_counting_model,
    load_model,
    model_to_json,
    pair,
    partition_function,
    qt_evaluate,
    random_model,
    random_orthogonal,
    save_model,
    strand_product_model,
    symmetrize,
    tangle_tensor,
    transmission_model,
)
from .moves import (
    ConditionReport,
    MoveSite,
    apply_move,
    check_algebraic,
    enumerate_move_sites,
    find_move_witness,
    move_tangles,
    random_move,
)

__version__ = "0.1.0"

__all__ = [
    "LEG",
    "ConditionReport",
    "ContractionPlan",
    "GramReport",
    "KernelReport",
    "MoveSite",
    "QuantumTangle",
    "Tangle",
    "TangleTensor",
    "VertexModel",
    "VldError",
    "apply_move",
    "apply_orthogonal",
    "build_tangle",
    "canonical_key",
    "cayley_orthogonal",
    "check_algebraic",
    "det_tangle",
    "disjoint_union",
    "empty_tangle",
    "enumerate_move_sites",
    "enumerate_tangles",
    "fd_check",
    "find_move_witness",
    "glue",
    "gram_psd",
    "kernel_probe",
    "kernel_residual",
    "knot_components",
    "knot_counting_model",
    "load_model",
    "load_quantum_tangle",
    "load_tangle",
    "loop_diagram",
    "matching_tangle",
    "model_to_json",
    "move_tangles",
    "nondegeneracy_probe",
    "pair",
    "parse_tangle",
    "partition_function",
    "permutation_matching",
    "plan_contraction",
    "qt_add",
    "qt_evaluate",
    "qt_glue",
    "qt_scale",
    "random_model",
    "random_move",
    "random_orthogonal",
    "random_tangle",
    "relabel_legs",
    "save_model",
    "save_tangle",
    "serialize_tangle",
    "strand_product_model",
    "strand_tangle",
    "symmetrize",
    "tangle_derivative",
    "tangle_tensor",
    "transmission_model",
]
