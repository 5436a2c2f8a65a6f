import itertools

import numpy as np
import pytest

import vlink as vl
from vlink import LEG

from oracles import brute_isomorphic


# ---------------------------------------------------------------------------
# Enumeration


def test_enumerate_base_cases():
    assert vl.enumerate_tangles(0, 0) == [vl.empty_tangle()]
    assert vl.enumerate_tangles(2, 0) == [vl.strand_tangle()]
    assert len(vl.enumerate_tangles(4, 0)) == 3  # the three pairings of 4 legs


def test_enumerate_is_complete_and_irredundant():
    # Validate the k=2, one-vertex list against exhaustive isomorphism tests.
    listed = vl.enumerate_tangles(2, 1)
    for a, b in itertools.combinations(listed, 2):
        assert not brute_isomorphic(a, b)
    points = [(LEG, 1), (LEG, 2)] + [(0, s) for s in range(4)]

    def matchings(pts):
        if not pts:
            yield []
            return
        for i in range(1, len(pts)):
            for sub in matchings(pts[1:i] + pts[i + 1 :]):
                yield [(pts[0], pts[i])] + sub

    for matching in matchings(points):
        t = vl.build_tangle(1, matching, 0)
        assert sum(brute_isomorphic(t, u) for u in listed) == 1


def test_enumerate_counts_frozen():
    # Regression pins; the k=2 value is brute-validated above.
    assert len(vl.enumerate_tangles(2, 1)) == 10
    assert len(vl.enumerate_tangles(4, 1)) == 60
    assert len(vl.enumerate_tangles(0, 1)) == 4


def test_enumerate_is_loop_free_and_sorted():
    listed = vl.enumerate_tangles(4, 1)
    assert all(t.loop_count == 0 for t in listed)
    keys = [vl.canonical_key(t) for t in listed]
    assert keys == sorted(keys)


def test_enumerate_budget():
    with pytest.raises(ValueError, match="endpoint budget"):
        vl.enumerate_tangles(2, 4)
    with pytest.raises(ValueError, match="arity must be even"):
        vl.enumerate_tangles(3, 0)


# ---------------------------------------------------------------------------
# Random tangles


def test_random_tangle_shape():
    rng = np.random.default_rng(0)
    t = vl.random_tangle(rng, 4, 3, loop_count=2)
    assert (t.arity, t.num_vertices, t.loop_count) == (4, 3, 2)


def test_random_tangle_deterministic():
    a = vl.random_tangle(np.random.default_rng(12), 2, 3)
    b = vl.random_tangle(np.random.default_rng(12), 2, 3)
    assert a == b


def test_random_tangle_odd_arity():
    with pytest.raises(ValueError):
        vl.random_tangle(np.random.default_rng(0), 3, 1)


# ---------------------------------------------------------------------------
# Determinant-tangle kernel


def test_kernel_residual_arity_check():
    model = vl.transmission_model(2)
    with pytest.raises(ValueError, match="6-tangle"):
        vl.kernel_residual(model, vl.strand_tangle())


def test_kernel_vanishes_exhaustively_n1():
    # n = 1: every 4-tangle with up to one vertex kills the 2-leg determinant.
    model = vl.random_model(1, np.random.default_rng(31))
    for t in vl.enumerate_tangles(4, 1):
        assert vl.kernel_residual(model, t) <= 1e-12


def test_kernel_vanishes_on_random_tangles_n2():
    model = vl.random_model(2, np.random.default_rng(32))
    rng = np.random.default_rng(33)
    norm = model.norm
    for _ in range(25):
        v = int(rng.integers(0, 3))
        t = vl.random_tangle(rng, 6, v)
        assert vl.kernel_residual(model, t) <= 1e-10 * (1.0 + norm**v)


def test_kernel_probe_passes_and_controls():
    rng = np.random.default_rng(34)
    model = vl.random_model(2, rng)
    report = vl.kernel_probe(model, samples=30, max_vertices=2, rng=rng)
    assert report.n == 2
    assert len(report.residuals) == 30
    assert report.passed()
    assert report.negative_control > 1e-3


def test_kernel_probe_deterministic():
    def run():
        rng = np.random.default_rng(35)
        model = vl.random_model(2, rng)
        return vl.kernel_probe(model, samples=10, max_vertices=2, rng=rng)

    assert run().residuals == run().residuals


# ---------------------------------------------------------------------------
# Gram positivity


def test_gram_psd_real_models():
    for seed in range(4):
        model = vl.random_model(2, np.random.default_rng(seed), real=True)
        report = vl.gram_psd(model, max_vertices=1)
        assert report.gram.shape == (60, 60)
        assert report.hermiticity_residual <= 1e-10
        assert report.passed()


def test_gram_entries_are_glued_partition_values():
    model = vl.random_model(2, np.random.default_rng(40), real=True)
    report = vl.gram_psd(model, max_vertices=1)
    basis = report.basis
    for i, j in [(0, 0), (0, 5), (7, 3)]:
        direct = vl.partition_function(model, vl.glue(basis[i], basis[j]))
        assert abs(report.gram[i, j] - direct) <= 1e-9 * (1.0 + abs(direct))


def test_gram_rejects_complex_models():
    with pytest.raises(ValueError, match="real"):
        vl.gram_psd(vl.knot_counting_model(), max_vertices=1)


def test_gram_zero_model_still_psd():
    # With R = 0 only the vertex-free rows survive, and those still form a
    # nonzero PSD Gram matrix of matching tensors.
    model = vl.VertexModel(2, np.zeros((2, 2, 2, 2)))
    report = vl.gram_psd(model, max_vertices=1)
    assert float(np.linalg.norm(report.gram)) > 0
    assert report.passed()


def test_nondegeneracy_probe_ranks_agree():
    for arity in (2, 4):
        model = vl.random_model(2, np.random.default_rng(41), real=True)
        gram_rank, span_rank = vl.nondegeneracy_probe(model, arity, max_vertices=1)
        assert gram_rank == span_rank
        assert gram_rank >= 1


# ---------------------------------------------------------------------------
# Derivative tangles vs finite differences


def test_fd_exact_for_small_diagrams():
    model = vl.random_model(2, np.random.default_rng(50))
    direction = vl.random_model(2, np.random.default_rng(51))
    one = vl.parse_tangle("x v1 a b a b")
    two = vl.parse_tangle("x v1 a b c d\nx v2 c d a b")
    assert vl.fd_check(model, one, direction, h=1e-2) <= 1e-10
    assert vl.fd_check(model, two, direction, h=1e-3) <= 1e-9


def test_fd_small_for_larger_diagrams():
    model = vl.random_model(2, np.random.default_rng(52))
    direction = vl.random_model(2, np.random.default_rng(53))
    g = vl.parse_tangle("x v1 a b c d\nx v2 c d e f\nx v3 e f a b")
    bound = 1e-5 * (1.0 + model.norm**4 * direction.norm)
    assert vl.fd_check(model, g, direction) <= bound


def test_fd_zero_for_vertexless():
    model = vl.random_model(2, np.random.default_rng(54))
    direction = vl.random_model(2, np.random.default_rng(55))
    assert vl.fd_check(model, vl.loop_diagram(2), direction) <= 1e-12


def test_fd_direction_must_match_n():
    model = vl.random_model(2, np.random.default_rng(56))
    direction = vl.random_model(3, np.random.default_rng(57))
    with pytest.raises(ValueError):
        vl.fd_check(model, vl.loop_diagram(1), direction)
