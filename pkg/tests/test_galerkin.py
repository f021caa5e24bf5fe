"""Projection engine: compression spectra, injection, probes, triangularity."""

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from specpol import essrange, galerkin
from specpol.errors import HypothesisViolated
from specpol.linalg import ComplexMatrix, compress, general_eig, rayleigh
from specpol.operators import diag_alternating, ex1_models
from conftest import block_schedule


def multiset_close(a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    if a.size != b.size:
        return False
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) <= tol


def test_compress_sequence_delay(delay_model):
    bases = [galerkin.SubspaceBasis.first_blocks(n) for n in (1, 2, 3, 5)]
    run = galerkin.compress_sequence(delay_model, bases)
    for basis, lvl in zip(bases, run.levels):
        n = basis.dim // 2
        expect = [1.0] * (n + 1) + [float(k * k) for k in range(2, n + 1)]
        assert multiset_close(lvl.eigenvalues, expect, 1e-9)


def test_compress_sequence_diagonal_coordinates():
    op = diag_alternating()
    basis = galerkin.SubspaceBasis.coordinates(0, 4)
    run = galerkin.compress_sequence(op, [basis] * 3)
    expect = [op.entry(i, i) for i in range(5)]
    assert multiset_close(run.levels[0].eigenvalues, expect, 1e-12)


def test_compress_sequence_rank_one(delay_model):
    v = np.array([1.0, 1j], dtype=complex) / np.sqrt(2)
    basis = galerkin.SubspaceBasis((1, 2), v[:, None])
    run = galerkin.compress_sequence(delay_model, [basis] * 3)
    expected = rayleigh(delay_model.window(1, 2), v)
    assert abs(run.levels[0].eigenvalues[0] - expected) < 1e-12


@pytest.fixture(scope="module")
def delay_injections(delay_model, delay_estimate):
    V = galerkin.SubspaceBasis.first_blocks(10)
    out = []
    for target in (2.0 + 0j, 3 + 1j, 1.5 - 0.5j):
        w, mu = galerkin.inject_spurious(delay_model, V, target, 1e-3,
                                         region=delay_estimate.limit)
        out.append((target, w, mu))
    return V, out


def test_injection_hits_targets(delay_injections):
    _V, results = delay_injections
    for target, _w, mu in results:
        assert abs(mu - target) <= 1e-3


def test_injection_witness_orthogonality(delay_model, delay_injections):
    V, results = delay_injections
    for _target, w, _mu in results:
        hi = w.window[1]
        big = delay_model.window(1, hi + delay_model.bandwidth).data
        x = np.zeros(hi + delay_model.bandwidth, dtype=complex)
        x[w.window[0] - 1: w.window[1]] = w.components
        for c in range(V.dim):
            v = np.zeros_like(x)
            v[:V.dim] = V.vectors[:, c]
            assert abs(np.vdot(x, big @ v)) <= 1e-8   # <T v, x>
            assert abs(np.vdot(v, big @ x)) <= 1e-8   # <T x, v>


def test_injection_spectral_bookkeeping(delay_model, delay_injections):
    V, results = delay_injections
    for target, w, mu in results:
        H = galerkin.joint_basis(delay_model, V, [w])
        comp = compress(delay_model.window(*H.window), H.vectors)
        assert galerkin.verify_triangular(comp, (V.dim, 1))
        got = general_eig(comp).values
        base = general_eig(compress(delay_model.window(*V.window), V.vectors)).values
        expect = np.concatenate([base, [mu]])
        assert multiset_close(got, expect, 1e-7)


def test_injection_rejects_target_outside(delay_model, delay_estimate):
    V = galerkin.SubspaceBasis.first_blocks(10)
    with pytest.raises(HypothesisViolated):
        galerkin.inject_spurious(delay_model, V, -5.0 + 0j, 1e-3,
                                 region=delay_estimate.limit)


def test_injection_selfadjoint_ex1():
    T, _ = ex1_models()
    sched = block_schedule((8, 16, 32, 64), 32, (0.0, 50.0, -5.0, 5.0))
    region = essrange.selfadjoint_essential_range(T, sched)
    V = galerkin.SubspaceBasis.coordinates(1, 4, "first 4 coordinates")
    w, mu = galerkin.inject_spurious(T, V, 1.5 + 0j, 1e-3, region=region)
    assert abs(mu.imag) < 1e-10
    assert abs(mu - 1.5) <= 1e-3


def test_fill_region_delay(delay_model, delay_estimate):
    V = galerkin.SubspaceBasis.first_blocks(10)
    result = galerkin.fill_region(delay_model, V, [2.0, 3 + 1j, 3 - 1j], 10,
                                  region=delay_estimate.limit)
    assert result.sup_dist <= 2.0 / 10
    W = np.column_stack([w.embed(*result.basis.window) for _t, w, _win in result.plan.achieved])
    gram = W.conj().T @ W
    assert np.abs(gram - np.eye(3)).max() <= 1e-8


def test_fill_region_selfadjoint_point():
    T, _ = ex1_models()
    sched = block_schedule((8, 16, 32, 64), 32, (0.0, 50.0, -5.0, 5.0))
    region = essrange.selfadjoint_essential_range(T, sched)
    V = galerkin.SubspaceBasis.first_blocks(4)
    result = galerkin.fill_region(T, V, [1.5], 10, region=region)
    assert np.abs(result.spectrum - 1.5).min() <= 1.0 / 10


def test_fill_region_empty_omega(delay_model, delay_estimate):
    V = galerkin.SubspaceBasis.first_blocks(3)
    result = galerkin.fill_region(delay_model, V, [], 10, region=delay_estimate.limit)
    assert result.basis is V
    assert result.sup_dist == 0.0


def test_delay_probe_vector_values():
    vec, lam = galerkin.delay_probe_vector(0.0, 7)
    np.testing.assert_allclose(np.abs(vec.components), [0, 1], atol=1e-14)
    assert lam == 1.0

    _vec, lam10 = galerkin.delay_probe_vector(1.0, 10)
    assert abs(lam10 - 3.0 / (1 + 1 / 100)) < 1e-14

    # matrix-coordinate oracle fixes the conjugate limit for complex gamma
    g = 1j
    block = np.array([[100, 0], [10, 1]], dtype=complex)
    z = np.array([np.conj(g) / 10, 1.0])
    oracle = np.vdot(z, block @ z) / np.vdot(z, z)
    _vec, lam_i = galerkin.delay_probe_vector(g, 10)
    assert abs(lam_i - oracle) < 1e-14
    assert abs(lam_i - (2 - 1j)) <= 5.0 / 10


def test_verify_triangular_cases(delay_model, rng):
    lower = ComplexMatrix.from_rows([[1, 0], [5, 2]])
    assert not galerkin.verify_triangular(lower, (1, 1))
    upper = ComplexMatrix.from_rows([[1, 5], [0, 2]])
    assert galerkin.verify_triangular(upper, (1, 1))
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert not galerkin.verify_triangular(ComplexMatrix(a), (3, 3))
    assert galerkin.verify_triangular(ComplexMatrix(a), (6, 0))
    assert galerkin.verify_triangular(ComplexMatrix.from_rows([[2]]), (1, 0))


def test_limiting_range_of_delay_compressions(delay_model, delay_estimate):
    mats = [delay_model.window(1, 2 * n) for n in (24, 32, 48, 64, 96)]
    est = essrange.limiting_essential_range(mats, 0.5, (0, 30, -6, 6))
    from specpol.numrange import hausdorff_clipped
    d = hausdorff_clipped(est.limit, delay_estimate.limit, (0, 30, -6, 6))
    assert d <= 0.05


def test_limiting_range_of_ex1_compressions(ex1_sum_model):
    clip = (0.0, 50.0, -5.0, 5.0)
    mats = [ex1_sum_model.window(1, 2 * n) for n in (24, 32, 48, 64, 96)]
    limiting = essrange.limiting_essential_range(mats, 0.5, clip)
    sched = block_schedule((8, 16, 32, 64), 32, clip)
    est = essrange.estimate_essential_range(ex1_sum_model, sched)
    from specpol.numrange import hausdorff_clipped
    assert hausdorff_clipped(limiting.limit, est.limit, clip) <= 0.05
