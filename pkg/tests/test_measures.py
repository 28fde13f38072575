import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from galphac import measures as ms
from galphac import states
from galphac.bipartitions import Bipartition, cardinality, enumerate_bipartitions
from galphac.core import reduced_spectrum, trace_distance
from galphac.errors import InvalidArgumentError, InvalidParameterError, NotMultipartiteError

from conftest import brute_galpha

SQRT2 = math.sqrt(2)


def bell_times_zero():
    """|0> ⊗ (|00> + |11>)/sqrt2, biseparable across 0|12."""
    return states.from_terms({"000": 1, "011": 1})


# --- kernels ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, alpha, expected",
    [
        ([0.5, 0.5], 0.5, SQRT2 - 1),
        ([1.0], 0.3, 0.0),
        ([1.0, 0.0], 0.0, 0.0),
        ([2 / 3, 1 / 3], 0.5, math.sqrt(2 / 3) + math.sqrt(1 / 3) - 1),
    ],
)
def test_alpha_concurrence(spec, alpha, expected):
    assert ms.alpha_concurrence(spec, alpha) == pytest.approx(expected, abs=1e-12)


def test_alpha_concurrence_w3_cut_matches_closed_form():
    assert ms.alpha_concurrence([2 / 3, 1 / 3], 0.5) == pytest.approx(0.393847, abs=1e-6)
    assert ms.alpha_concurrence([2 / 3, 1 / 3], 0.5) == pytest.approx(ms.w_cut_alpha_c(3, 1, 0.5), abs=1e-15)


def test_alpha_zero_counts_rank():
    assert ms.alpha_concurrence([0.5, 0.3, 0.2, 0.0], 0.0) == 2.0


@pytest.mark.parametrize("alpha", [-0.1, 0.51, 1.0])
def test_alpha_out_of_range(alpha):
    with pytest.raises(InvalidParameterError):
        ms.alpha_concurrence([0.5, 0.5], alpha)


@pytest.mark.parametrize(
    "spec, q, expected",
    [([0.5, 0.5], 3, 0.75), ([1.0], 5, 0.0), ([2 / 3, 1 / 3], 2, 4 / 9)],
)
def test_q_concurrence(spec, q, expected):
    assert ms.q_concurrence(spec, q) == pytest.approx(expected, abs=1e-12)


def test_q_out_of_range():
    with pytest.raises(InvalidParameterError):
        ms.q_concurrence([0.5, 0.5], 1.5)


@pytest.mark.parametrize(
    "spec, expected",
    [([0.5, 0.5], 1.0), ([1.0], 0.0), ([2 / 3, 1 / 3], 2 * SQRT2 / 3)],
)
def test_concurrence(spec, expected):
    assert ms.concurrence(spec) == pytest.approx(expected, abs=1e-12)
    # normalization is a no-op on qubit cuts
    assert ms.concurrence(spec, normalized=True) == pytest.approx(
        expected if len(spec) == 2 else 0.0, abs=1e-12
    )


def test_normalized_concurrence_maximal_on_every_dimension():
    for d in (2, 3, 4, 8):
        assert ms.concurrence(np.full(d, 1 / d), normalized=True) == pytest.approx(1.0)
        assert ms.concurrence(np.full(d, 1 / d)) == pytest.approx(math.sqrt(2 * (d - 1) / d))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6), st.floats(0.02, 0.49))
def test_alpha_concurrence_strictly_decreasing_in_alpha(raw, alpha):
    spec = np.array(raw) / sum(raw)
    lo, hi = ms.alpha_concurrence(spec, alpha), ms.alpha_concurrence(spec, alpha + 0.01)
    assert hi < lo


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8).filter(lambda v: sum(v) > 0.1),
       st.floats(0.0, 0.5))
def test_alpha_concurrence_range(raw, alpha):
    spec = np.array(raw) / sum(raw)
    v = ms.alpha_concurrence(spec, alpha)
    assert -1e-12 <= v <= len(spec) ** (1 - alpha) - 1 + 1e-12


# --- state-level measures ---------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 5, 7])
@pytest.mark.parametrize("alpha", [0.1, 0.5])
def test_galphac_ghz(n, alpha):
    # closed form 2**(1-alpha) - 1, independent of n
    assert ms.galpha_c(states.ghz(n), alpha).aggregate == pytest.approx(2 ** (1 - alpha) - 1, abs=1e-12)


def test_galphac_biseparable_is_exactly_zero():
    r = ms.galpha_c(bell_times_zero(), 0.5)
    assert r.aggregate == 0.0
    assert r.per_cut[Bipartition(3, (0,))] == 0.0
    assert r.product == 0.0


def test_galphac_w3():
    r = ms.galpha_c(states.w(3), 0.5)
    assert r.aggregate == pytest.approx(0.393846850117352, abs=1e-12)
    assert len(set(np.round(list(r.per_cut.values()), 14))) == 1


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 2, 2, 2), (2, 3, 2)])
def test_galphac_against_all_subsets_oracle(dims, rng):
    for alpha in (0.25, 0.5):
        psi = states.random_pure(dims, rng)
        assert ms.galpha_c(psi, alpha).aggregate == pytest.approx(
            brute_galpha(psi.amplitudes, dims, alpha), abs=1e-10
        )


def test_galphac_rejects_two_parties():
    with pytest.raises(NotMultipartiteError):
        ms.galpha_c(states.ghz(2), 0.5)


def test_gqc_examples():
    assert ms.gqc(states.ghz(3), 3).aggregate == pytest.approx(0.75, abs=1e-12)
    assert ms.gqc(states.w(3), 2).aggregate == pytest.approx(4 / 9, abs=1e-12)
    assert ms.gqc(bell_times_zero(), 3).aggregate == 0.0


def test_gmc_examples():
    assert ms.gmc(states.ghz(3)).aggregate == pytest.approx(1.0, abs=1e-12)
    assert ms.gmc(states.w(3)).aggregate == pytest.approx(0.942809, abs=1e-6)
    assert ms.gmc(bell_times_zero()).aggregate == 0.0


def test_gmc_normalizes_two_qubit_sides():
    # GHZ_4: every cut spectrum is {1/2, 1/2, 0, 0}; 2|2 cuts: sqrt(4/3 * 1/2)
    r = ms.gmc(states.ghz(4))
    assert r.per_cut[Bipartition(4, (0, 1))] == pytest.approx(math.sqrt(2 / 3))
    assert r.aggregate == pytest.approx(math.sqrt(2 / 3))


def test_ggm_examples():
    assert ms.ggm(states.ghz(3)).aggregate == pytest.approx(0.5, abs=1e-12)
    assert ms.ggm(states.w(3)).aggregate == pytest.approx(1 / 3, abs=1e-12)
    assert ms.ggm(states.product(3)).aggregate == 0.0


def test_concurrence_fill_examples():
    assert ms.concurrence_fill(states.ghz(3)) == pytest.approx(1.0, abs=1e-12)
    assert ms.concurrence_fill(bell_times_zero()) == 0.0
    assert ms.concurrence_fill(states.w(3)) == pytest.approx(8 / 9, abs=1e-12)


def test_concurrence_fill_shape():
    with pytest.raises(InvalidArgumentError):
        ms.concurrence_fill(states.ghz(4))


def test_report_consistency(rng):
    for _ in range(20):
        psi = states.random_pure((2, 2, 2, 2), rng)
        for r in (ms.galpha_c(psi, 0.3), ms.gqc(psi, 2.5)):
            vals = list(r.per_cut.values())
            assert all(v > 0 for v in vals)
            assert math.exp(sum(map(math.log, vals)) / cardinality(4)) == pytest.approx(r.aggregate, abs=1e-12)
            assert r.product ** (1 / cardinality(4)) == pytest.approx(r.aggregate, rel=1e-12)
        r = ms.gmc(psi)
        assert r.aggregate == min(r.per_cut.values())


def test_report_tags():
    assert ms.galpha_c(states.ghz(3), 0.5).tag == "galphac(alpha=0.5)"
    assert ms.gqc(states.ghz(3), 3).tag == "gqc(q=3)"
    assert ms.gmc(states.ghz(3)).tag == "gmc"
    assert ms.ggm(states.ghz(3)).tag == "ggm"
    assert ms.report(states.ghz(3), "fill").tag == "fill"


def test_galphac_from_precomputed_spectra():
    spectra = ms.cut_spectra(states.w(5))
    for a in (0.1, 0.4):
        assert ms.galpha_c(spectra, a).aggregate == ms.galpha_c(states.w(5), a).aggregate


def test_fast_path_matches_report(rng):
    for dims in [(2, 2, 2), (2, 3, 2, 2), (2,) * 5]:
        for _ in range(5):
            psi = states.random_pure(dims, rng)
            for a in (0.0, 0.2, 0.5):
                assert ms.galpha_c_value(psi.amplitudes, dims, a) == pytest.approx(
                    ms.galpha_c(psi, a).aggregate, abs=1e-13
                )


# --- invariance properties ----------------------------------------------------------


def test_local_unitary_invariance(rng):
    for dims in [(2, 2, 2), (2, 3, 2), (2, 2, 2, 2)]:
        for _ in range(20):
            psi = states.random_pure(dims, rng)
            moved = states.apply_local(psi, states.random_local_unitaries(dims, rng))
            for a in (0.25, 0.5):
                assert abs(ms.galpha_c(moved, a).aggregate - ms.galpha_c(psi, a).aggregate) <= 1e-9


def test_party_permutation_invariance(rng):
    for dims in [(2, 2, 2, 2), (2, 3, 4)]:
        for _ in range(20):
            psi = states.random_pure(dims, rng)
            order = rng.permutation(len(dims)).tolist()
            moved = states.permute_parties(psi, order)
            for mid, p in [("galphac", 0.3), ("gqc", 3.0), ("gmc", None), ("ggm", None)]:
                assert abs(ms.evaluate(moved, mid, p) - ms.evaluate(psi, mid, p)) <= 1e-9


def test_biseparable_states_score_zero(rng):
    for dims in [(2, 2, 2), (2, 2, 3, 2)]:
        for _ in range(20):
            psi = states.random_biseparable(dims, rng)
            for mid, p in [("galphac", 0.5), ("gqc", 2.0), ("gmc", None), ("ggm", None)]:
                assert ms.evaluate(psi, mid, p) == 0.0


def test_per_cut_range(rng):
    for dims in [(2, 2, 2, 2), (3, 2, 2)]:
        total = math.prod(dims)
        psi = states.random_pure(dims, rng)
        for alpha in (0.0, 0.3, 0.5):
            r = ms.galpha_c(psi, alpha)
            for b, v in r.per_cut.items():
                ds = math.prod(dims[p] for p in b.parties)
                assert 0 <= v <= min(ds, total // ds) ** (1 - alpha) - 1 + 1e-12


# --- closed forms -----------------------------------------------------------------


def test_ghz_analytic():
    assert ms.ghz_alpha_c_analytic(3, 0.5) == pytest.approx(0.414214, abs=1e-6)
    assert ms.ghz_alpha_c_analytic(11, 0.5) == ms.ghz_alpha_c_analytic(3, 0.5)
    assert ms.ghz_alpha_c_analytic(5, 0.0) == 1.0
    with pytest.raises(NotMultipartiteError):
        ms.ghz_alpha_c_analytic(2, 0.5)


def test_w_analytic_values():
    # n=3: single class k=1, value sqrt(2/3) + sqrt(1/3) - 1
    assert ms.w_alpha_c_analytic(3, 0.5) == pytest.approx((1 + SQRT2) / math.sqrt(3) - 1, abs=1e-14)
    # n=4: 4 cuts of class k=1, 3 cuts of class k=2, from the all-subsets oracle
    assert ms.w_alpha_c_analytic(4, 0.5) == pytest.approx(0.38595006864814774, abs=1e-12)


@pytest.mark.parametrize("n", range(3, 10))
@pytest.mark.parametrize("alpha", [0.0, 0.2, 0.5])
def test_w_analytic_matches_numeric(n, alpha):
    assert ms.w_alpha_c_analytic(n, alpha) == pytest.approx(ms.galpha_c(states.w(n), alpha).aggregate, abs=1e-9)


# --- continuity bounds -------------------------------------------------------------


def test_bipartite_bound():
    assert ms.continuity_bound_bipartite(0.0, 2, 0.5) == 0.0
    assert ms.continuity_bound_bipartite(0.01, 2, 0.5) == pytest.approx(0.141421, abs=1e-6)
    assert ms.continuity_bound_bipartite(0.3, 1, 0.25) == pytest.approx(0.3**0.25)
    with pytest.raises(InvalidArgumentError):
        ms.continuity_bound_bipartite(-0.1, 2, 0.5)


def test_multipartite_bound():
    assert ms.continuity_bound_multipartite(0.0, 3, [2], 0.5) == 0.0
    assert ms.continuity_bound_multipartite(0.04, 3, [2], 0.5) == pytest.approx(0.9467211571056353, abs=1e-12)
    assert ms.continuity_bound_multipartite(0.04, 3, [2], 0.5) == pytest.approx(0.947, abs=5e-4)
    # even n: halved middle class
    expected = (4 * 0.04**0.5 * 2**0.5 + 3 * 0.04**0.5 * 4**0.5) ** (1 / 7)
    assert ms.continuity_bound_multipartite(0.04, 4, [2, 4], 0.5) == pytest.approx(expected)
    with pytest.raises(InvalidArgumentError):
        ms.continuity_bound_multipartite(0.04, 4, [2], 0.5)


def test_class_min_dims():
    assert ms.class_min_dims((2, 2, 2, 2)) == [2, 4]
    assert ms.class_min_dims((2, 3, 2)) == [3]


def test_single_cut_bound_on_random_pairs(rng):
    violations = 0
    for _ in range(1000):
        psi = states.random_pure((2, 2, 2), rng)
        eps = float(np.exp(rng.uniform(np.log(1e-6), np.log(2))))
        phi = states.perturb(psi, eps, rng)
        bound = ms.continuity_bound_bipartite(trace_distance(psi, phi), 2, 0.5)
        for b in enumerate_bipartitions(3):
            diff = abs(ms.alpha_concurrence(reduced_spectrum(psi, b), 0.5)
                       - ms.alpha_concurrence(reduced_spectrum(phi, b), 0.5))
            violations += diff > bound + 1e-12
    assert violations == 0


def test_ghz3_not_beaten_by_haar_samples():
    # sampling spot-check of AME maximality for three qubits, not a proof
    rng = np.random.default_rng(7)
    alpha, count = 0.5, 100_000
    psi = rng.standard_normal((count, 8)) + 1j * rng.standard_normal((count, 8))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    t = psi.reshape(count, 2, 2, 2)
    log_sum = np.zeros(count)
    for k in range(3):
        m = np.moveaxis(t, k + 1, 1).reshape(count, 2, 4)
        lam = np.clip(np.linalg.eigvalsh(m @ m.conj().transpose(0, 2, 1)), 0, None)
        log_sum += np.log((lam**alpha).sum(axis=1) - 1)
    best = np.exp(log_sum / 3).max()
    ghz = ms.galpha_c(states.ghz(3), alpha).aggregate
    assert best <= ghz + 1e-12
    # the batched kernel agrees with the library on a few samples
    for i in range(3):
        got = ms.galpha_c_value(psi[i], (2, 2, 2), alpha)
        assert got == pytest.approx(float(np.exp(log_sum[i] / 3)), abs=1e-10)
