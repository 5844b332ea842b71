"""Outer receiver loop: initial draws, per-hypothesis records, the three
operating modes, and their single-receiver equivalence."""

import numpy as np
import pytest

from blindrx.channel import (FrameTruth, ReceivedFrame, draw_channel,
                             snr_db_to_noise_power, transmit)
from blindrx.decision import FinalDecision
from blindrx.ldpc import encode, load_code, syndrome_llr_profile
from blindrx.modem import get_constellation, modulate
from blindrx.receiver import (ReceiverConfig, draw_initial_params,
                              run_cooperative, run_distributed,
                              run_hypothesis, run_receiver, run_single)

GRID = [("qpsk", "ldpc_648_r12"), ("qpsk", "ldpc_648_r23"),
        ("16qam", "ldpc_648_r12")]


def _frame(rng, snr_db=8.0, theta=("qpsk", "ldpc_648_r12"), k_receivers=1):
    mod, code_name = theta
    code = load_code(code_name)
    constellation = get_constellation(mod)
    message = rng.integers(0, 2, size=code.q).astype(np.uint8)
    coded = encode(code, message)
    symbols = modulate(coded, constellation)
    noise = snr_db_to_noise_power(snr_db)
    params = [draw_channel(rng, 6, 0.1, noise) for _ in range(k_receivers)]
    rec = transmit(symbols, params, rng)
    rec.truth = FrameTruth(params=params, modulation=mod, code=code_name,
                           message_bits=message, coded_bits=coded,
                           symbols=symbols)
    return rec


def _config(**kwargs):
    kwargs.setdefault("candidates", list(GRID))
    return ReceiverConfig(**kwargs)


# ---------------------------------------------------------------- config


def test_receiver_config_validation():
    with pytest.raises(ValueError, match="i_max"):
        _config(i_max=0)
    with pytest.raises(ValueError, match="eps"):
        _config(eps=0.0)
    with pytest.raises(ValueError, match="non-empty"):
        ReceiverConfig(candidates=[])
    with pytest.raises(ValueError, match="unknown mode"):
        _config(mode="psychic")


# ----------------------------------------------------------- initializers


def test_draw_initial_params_biased_truth(rng):
    frame = _frame(rng, k_receivers=2)
    inits = draw_initial_params(frame, _config(), rng)
    assert len(inits) == 2
    for init, truth in zip(inits, frame.truth.params):
        assert init is not truth
        assert (np.abs(init.gains - truth.gains) <= 0.1 + 1e-12).all()


def test_draw_initial_params_requires_truth(rng):
    frame = _frame(rng)
    frame.truth = None
    with pytest.raises(ValueError, match="truth"):
        draw_initial_params(frame, _config(), rng)


def test_draw_initial_params_moment_based_is_blind(rng):
    frame = _frame(rng)
    frame.truth = None
    cfg = _config()
    cfg.estimator.init_mode = "moment-based"
    inits = draw_initial_params(frame, cfg, rng)
    assert len(inits) == 1 and inits[0].n_paths == 6


def test_draw_initial_params_freeze_copies_truth(rng):
    frame = _frame(rng)
    inits = draw_initial_params(frame, _config(freeze_estimates=True), rng)
    truth = frame.truth.params[0]
    assert inits[0] is not truth
    assert np.array_equal(inits[0].gains, truth.gains)
    assert np.array_equal(inits[0].phases, truth.phases)
    assert inits[0].noise_power == truth.noise_power


# ------------------------------------------------------------- hypotheses


def test_run_hypothesis_shape_filter(rng):
    frame = _frame(rng)  # 324 QPSK symbols = 648 bits
    cfg = _config()
    rec = run_hypothesis(frame, ("qpsk", "ldpc_1296_r12"), cfg, rng=rng)
    assert not rec.feasible
    assert rec.loglik == -np.inf
    assert rec.gamma_prefix is None and rec.detection is None
    # 16qam needs 1296 bits for 324 symbols: also infeasible here
    assert not run_hypothesis(frame, ("16qam", "ldpc_648_r12"), cfg,
                              rng=rng).feasible


def test_run_hypothesis_true_theta_record(rng):
    frame = _frame(rng)
    cfg = _config()
    rec = run_hypothesis(frame, ("qpsk", "ldpc_648_r12"), cfg, rng=rng)
    assert rec.feasible
    assert 1 <= rec.iterations <= cfg.i_max
    code = load_code("ldpc_648_r12")
    assert rec.gamma_prefix.shape == (code.n_checks,)
    assert np.isfinite(rec.loglik)
    # at 8 dB with a biased-truth start the true hypothesis decodes
    assert np.array_equal(rec.detection.bits_hat, frame.truth.message_bits)
    # the prefix is the running mean of the per-check syndrome LLRs
    profile = syndrome_llr_profile(code, rec.detection.codeword_llrs)
    expect = np.cumsum(profile) / np.arange(1, len(profile) + 1)
    assert np.allclose(rec.gamma_prefix, expect, rtol=1e-12)
    assert rec.gamma_prefix[-1] > 0.5  # decoded frame: checks well satisfied


def test_run_hypothesis_freeze_single_pass(rng):
    frame = _frame(rng)
    cfg = _config(freeze_estimates=True)
    cfg.estimator.init_mode = "truth"
    rec = run_hypothesis(frame, ("qpsk", "ldpc_648_r12"), cfg, rng=rng)
    assert rec.iterations == 1.0
    truth = frame.truth.params[0]
    assert np.array_equal(rec.beta_hat[0].gains, truth.gains)
    assert rec.beta_hat[0].noise_power == truth.noise_power


# ------------------------------------------------------------------ modes


def test_run_single_rejects_multirow(rng):
    frame = _frame(rng, k_receivers=2)
    with pytest.raises(ValueError, match="one receiver row"):
        run_single(frame, _config(), rng)


def test_run_receiver_decides_true_hypothesis(rng):
    frame = _frame(rng, snr_db=10.0)
    decision = run_receiver(frame, _config(), rng)
    assert isinstance(decision, FinalDecision)
    assert decision.theta_hat == ("qpsk", "ldpc_648_r12")
    assert np.array_equal(decision.bits_hat, frame.truth.message_bits)
    assert 1 <= decision.outer_iterations <= 30


def test_cooperative_multireceiver_decodes_low_snr(rng):
    # five fused rows at 0 dB: the array gain carries the detection
    frame = _frame(rng, snr_db=0.0, k_receivers=5)
    cfg = _config(mode="cooperative")
    decision = run_cooperative(frame, cfg, rng)
    assert decision.theta_hat == ("qpsk", "ldpc_648_r12")
    assert np.array_equal(decision.bits_hat, frame.truth.message_bits)


def test_modes_coincide_for_one_receiver():
    # bitwise: same frame, same seed stream, all three modes
    for trial in range(5):
        frame_rng = np.random.default_rng([7, trial])
        frame = _frame(frame_rng, snr_db=8.0)
        outs = []
        for mode in ("single", "cooperative", "distributed"):
            cfg = _config(mode=mode)
            runner = np.random.default_rng([99, trial])
            outs.append(run_receiver(frame, cfg, runner))
        a, b, c = outs
        assert a.theta_hat == b.theta_hat == c.theta_hat
        assert np.array_equal(a.bits_hat, b.bits_hat)
        assert np.array_equal(a.bits_hat, c.bits_hat)
        for x in (b, c):
            assert np.array_equal(a.beta_hat[0].gains, x.beta_hat[0].gains)
            assert np.array_equal(a.beta_hat[0].phases, x.beta_hat[0].phases)
            assert a.beta_hat[0].noise_power == x.beta_hat[0].noise_power
        assert a.outer_iterations == b.outer_iterations == c.outer_iterations


def test_distributed_multireceiver_runs(rng):
    frame = _frame(rng, snr_db=8.0, k_receivers=2)
    cfg = _config(mode="distributed")
    decision = run_distributed(frame, cfg, rng)
    assert decision.theta_hat == ("qpsk", "ldpc_648_r12")
    assert len(decision.beta_hat) == 2
