import numpy as np
import pytest

import sfsim


def test_generate_and_round_trip():
    c = sfsim.generate(3, 3, 10, seed=1)
    assert c.num_qubits == 9
    assert c.depth_label == "1+10+1"
    again = sfsim.parse_circuit(c.serialize())
    assert again == c


def test_state_is_normalized():
    c = sfsim.generate(3, 3, 8, seed=2)
    psi = sfsim.simulate(c)
    assert psi.shape == (512,)
    assert abs(np.sum(np.abs(psi.astype(np.complex128)) ** 2) - 1) < 1e-5


def test_hybrid_matches_state_vector():
    c = sfsim.generate(3, 4, 12, seed=3)
    psi = sfsim.simulate(c)
    idx = sfsim.select_indices(12, 300, 9)
    plan = sfsim.make_plan(c, n_a=len(idx))
    amps = sfsim.run_approx(c, plan, idx)
    assert np.max(np.abs(amps - psi[idx])) < 1e-5


def test_partial_fidelity_keeps_fraction_of_prefixes():
    c = sfsim.generate(4, 4, 16, seed=4)
    plan = sfsim.make_plan(c, fidelity=0.25, x_p=4, seed=1)
    assert len(plan.retained) == 4
    full = sfsim.simulate(c).astype(np.complex128)
    idx = list(range(1 << 16))
    approx = sfsim.run_approx(c, plan, idx)
    f = sfsim.estimate_fidelity(full, approx)
    assert 0.1 < f < 0.5


def test_sampling_helpers():
    assert sfsim.plan_basic(49, 1e-3) == 41
    p = np.full(64, 1 / 64)
    assert sfsim.total_variation(p, p) == 0
    samples = sfsim.sample_frugal(6, list(range(64)) * 5, [1 / 64] * 320, m_prime=10, seed=3)
    assert all(0 <= s < 64 for s in samples)


def test_schmidt_ranks():
    assert sfsim.schmidt_rank(sfsim.GateKind.CZ) == 2
    assert sfsim.schmidt_rank(sfsim.GateKind.ISWAP) == 4


def test_campaign_matches_in_process(tmp_path):
    c = sfsim.generate(3, 4, 10, seed=5)
    idx, amps = sfsim.run_campaign(c, str(tmp_path), n_a=200, request_seed=7, x_p=3, workers=2)
    plan = sfsim.make_plan(c, x_p=3, n_a=200)
    direct = sfsim.run_approx(c, plan, list(idx))
    assert np.array_equal(amps, direct)


def test_validation_round():
    c = sfsim.generate(2, 7, 12, seed=5)
    ch = sfsim.issue_challenge(c, 1 << 14, 0.05, 1)
    honest = sfsim.claimant_round(c, ch, sfsim.ClaimantEngine.Exact)
    ok, f_e = sfsim.verifier_round(c, ch, 0.2, 11, honest)
    assert ok
    cheat = sfsim.claimant_round(c, ch, sfsim.ClaimantEngine.Random, seed=2)
    ok, _ = sfsim.verifier_round(c, ch, 0.2, 11, cheat)
    assert not ok


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        sfsim.parse_circuit("2\n0 bogus 0\n")
