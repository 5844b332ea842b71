"""Experiment harness: scenario parsing, frame draws, pilot baselines,
trial metrics, aggregation, CSV round trips, worker determinism, and the
command-line interface."""

import numpy as np
import pytest

from blindrx.channel import draw_channel, transmit
from blindrx.cli import main
from blindrx.harness import (BENCHMARK_VARIANTS, MetricRow, Scenario,
                             _aggregate, _draw_frame,
                             _pilot_channel_estimate, emit_csv,
                             emit_gamma_trace, gamma_trace_records,
                             parse_scenario_file, read_csv, run_benchmarks,
                             run_scenario, run_trial)
from blindrx.modem import get_constellation, modulate

FULL_SCENARIO_TEXT = """\
# exercise every key
modulations = qpsk, 16qam
codes = ldpc_648_r12, ldpc_648_r23
true_theta = qpsk:ldpc_648_r12, qpsk:ldpc_648_r23
snr_grid_db = -2, 0, 2
trials_per_point = 7
k_receivers = 2
n_paths = 3
tap_variance = 0.05
init_mode = moment-based
seed = 99
mode = cooperative
benchmarks = perfect_csi, pilot_zf
workers = 2
i_max = 5
t_max = 9
eps_outer = 0.01
eps_em = 0.02
iota = 100
bias_deltas = 0.2, 0.1, 0.3
moment_grid_step = 0.05
"""


def _tiny_scenario(**overrides):
    """A seconds-scale sweep: 4-symbol frames on the extended Hamming
    code."""
    kwargs = dict(modulations=["qpsk"], codes=["hamming_8_4_ext"],
                  true_theta=("qpsk", "hamming_8_4_ext"),
                  snr_grid_db=[6.0, 10.0], trials_per_point=3,
                  n_paths=2, seed=7)
    kwargs.update(overrides)
    return Scenario(**kwargs)


# --------------------------------------------------------------- parsing


def test_parse_scenario_file_full_roundtrip(tmp_path):
    path = tmp_path / "scenario.txt"
    path.write_text(FULL_SCENARIO_TEXT)
    s = parse_scenario_file(path)
    assert s.modulations == ["qpsk", "16qam"]
    assert s.codes == ["ldpc_648_r12", "ldpc_648_r23"]
    assert s.true_theta == [("qpsk", "ldpc_648_r12"),
                            ("qpsk", "ldpc_648_r23")]
    assert s.snr_grid_db == [-2.0, 0.0, 2.0]
    assert (s.trials_per_point, s.k_receivers, s.n_paths) == (7, 2, 3)
    assert s.tap_variance == 0.05
    assert (s.init_mode, s.mode) == ("moment-based", "cooperative")
    assert s.seed == 99 and s.workers == 2
    assert s.benchmarks == ["perfect_csi", "pilot_zf"]
    assert (s.i_max, s.t_max) == (5, 9)
    assert (s.eps_outer, s.eps_em) == (0.01, 0.02)
    assert s.iota == 100
    assert s.bias_deltas == (0.2, 0.1, 0.3)
    assert s.moment_grid_step == 0.05


def test_parse_scenario_true_theta_forms(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("true_theta = uniform\n")
    assert parse_scenario_file(path).true_theta == "uniform"
    path.write_text("true_theta = qpsk:ldpc_648_r12\n")
    assert parse_scenario_file(path).true_theta == ("qpsk", "ldpc_648_r12")
    path.write_text("iota = none\n")
    assert parse_scenario_file(path).iota is None
    path.write_text("true_theta = qpsk\n")
    with pytest.raises(ValueError, match="mod:code"):
        parse_scenario_file(path)


def test_parse_scenario_rejects_unknown_key(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("modulations = qpsk\nwarp_factor = 9\n")
    with pytest.raises(ValueError, match=r"s.txt:2: unknown key"):
        parse_scenario_file(path)
    path.write_text("just some words\n")
    with pytest.raises(ValueError, match="expected key = value"):
        parse_scenario_file(path)


def test_candidate_grid_order():
    s = Scenario(modulations=["qpsk", "16qam"], codes=["a", "b"])
    assert s.candidate_grid() == [("qpsk", "a"), ("qpsk", "b"),
                                  ("16qam", "a"), ("16qam", "b")]


def test_receiver_config_mapping():
    s = _tiny_scenario(i_max=4, t_max=6, eps_outer=0.5, eps_em=0.25,
                       iota=2)
    cfg = s.receiver_config()
    assert cfg.candidates == [("qpsk", "hamming_8_4_ext")]
    assert (cfg.i_max, cfg.eps, cfg.iota) == (4, 0.5, 2)
    assert (cfg.estimator.t_max, cfg.estimator.eps) == (6, 0.25)
    assert not cfg.freeze_estimates
    frozen = s.receiver_config(candidates=[("qpsk", "x")], freeze=True,
                               init_mode="truth")
    assert frozen.freeze_estimates
    assert frozen.candidates == [("qpsk", "x")]
    assert frozen.estimator.init_mode == "truth"


# ------------------------------------------------------------ frame draw


def test_draw_frame_pinned_truth():
    s = _tiny_scenario()
    rng = np.random.default_rng(0)
    frame, theta, constellation, code = _draw_frame(s, 10.0, rng)
    assert theta == ("qpsk", "hamming_8_4_ext")
    assert frame.truth.modulation == "qpsk"
    assert frame.n_symbols == code.n // constellation.bits_per_symbol
    assert len(frame.truth.coded_bits) == code.n
    assert len(frame.truth.message_bits) == code.q
    assert not ((code.h @ frame.truth.coded_bits) % 2).any()


def test_draw_frame_pool_draws():
    pool = [("qpsk", "ldpc_648_r12"), ("qpsk", "ldpc_648_r23")]
    s = Scenario(modulations=["qpsk"],
                 codes=["ldpc_648_r12", "ldpc_648_r23", "ldpc_1296_r12"],
                 true_theta=pool, trials_per_point=1)
    seen = set()
    for seed in range(12):
        rng = np.random.default_rng(seed)
        _, theta, _, _ = _draw_frame(s, 8.0, rng)
        seen.add(theta)
    assert seen == set(pool)


def test_draw_frame_uniform_covers_grid():
    s = Scenario(modulations=["qpsk", "16qam"], codes=["ldpc_648_r12"],
                 true_theta="uniform")
    seen = set()
    for seed in range(16):
        _, theta, _, _ = _draw_frame(s, 8.0, np.random.default_rng(seed))
        seen.add(theta)
    assert seen == set(s.candidate_grid())


# -------------------------------------------------------- pilot baselines


def test_pilot_zf_recovers_noiseless_channel(rng):
    s = modulate(rng.integers(0, 2, size=400),
                 get_constellation("qpsk")).symbols
    truth = draw_channel(rng, 3, 0.1, 1e-12)
    row = np.convolve(s, truth.taps)[:len(s)]
    est = _pilot_channel_estimate(row, s, 3, "pilot_zf", 1e-12, 0.1)
    assert np.allclose(est.taps, truth.taps, atol=1e-6)
    assert est.noise_power <= 1e-9


def test_pilot_lmmse_shrinks_at_high_noise(rng):
    from blindrx.modem import SymbolFrame
    s = modulate(rng.integers(0, 2, size=400),
                 get_constellation("qpsk")).symbols
    truth = draw_channel(rng, 3, 0.1, 4.0)
    row = transmit(SymbolFrame(s), truth, rng).samples[0]
    zf = _pilot_channel_estimate(row, s, 3, "pilot_zf", 4.0, 0.1)
    lm = _pilot_channel_estimate(row, s, 3, "pilot_lmmse", 4.0, 0.1)
    # heavy ridge on the weak trailing taps pulls them towards zero
    assert (lm.gains[1:] < zf.gains[1:]).all()


# ------------------------------------------------------ trials/aggregate


def test_run_trial_perfect_csi_true_theta_is_clean():
    s = _tiny_scenario(snr_grid_db=[14.0])
    out = run_trial(s, 0, 0, 14.0, variant="perfect_csi_true_theta")
    errors, q, mcs, mod, code, mse_ch, mse_n, iters = out
    assert (errors, q) == (0, 4)
    assert mcs and mod and code
    assert mse_ch == 0.0 and mse_n == 0.0  # frozen truth estimates
    assert iters == 1.0


def test_run_trial_unknown_variant():
    with pytest.raises(ValueError, match="unknown variant"):
        run_trial(_tiny_scenario(), 0, 0, 10.0, variant="oracle")


def test_run_trial_failure_counts_all_bits():
    # an unloadable candidate code fails the receiver; the trial reports
    # a total loss instead of crashing the sweep
    s = _tiny_scenario(codes=["hamming_8_4_ext", "no_such_code"])
    out = run_trial(s, 0, 0, 10.0)
    errors, q, mcs, mod, code = out[:5]
    assert (errors, q) == (4, 4)
    assert not (mcs or mod or code)
    assert np.isnan(out[5]) and np.isnan(out[6]) and np.isnan(out[7])


def test_aggregate_hand_values():
    results = [
        (1, 4, True, True, True, 0.5, 0.01, 3.0),
        (3, 4, False, True, False, np.nan, np.nan, 5.0),
    ]
    row = _aggregate(2.0, results)
    assert row.snr_db == 2.0
    assert row.ber == pytest.approx(0.5)
    assert row.pcc_mcs == pytest.approx(0.5)
    assert row.pcc_mod == pytest.approx(1.0)
    assert row.pcc_code == pytest.approx(0.5)
    assert row.mse_channel == pytest.approx(0.5)   # nan-skipping mean
    assert row.mse_noise == pytest.approx(0.01)
    assert row.mean_outer_iters == pytest.approx(4.0)
    assert row.trials == 2
    all_nan = [(0, 4, True, True, True, np.nan, np.nan, np.nan)]
    assert np.isnan(_aggregate(0.0, all_nan).mse_channel)


def test_metric_row_csv_roundtrip(tmp_path):
    rows = [
        MetricRow(snr_db=0.0, ber=0.125, pcc_mcs=0.5, pcc_mod=1.0,
                  pcc_code=0.5, mse_channel=0.0123456789012345,
                  mse_noise=np.nan, mean_outer_iters=3.5, trials=4),
        MetricRow(snr_db=2.0, ber=0.0, pcc_mcs=1.0, pcc_mod=1.0,
                  pcc_code=1.0, mse_channel=1e-300, mse_noise=0.25,
                  mean_outer_iters=1.0, trials=4),
    ]
    path = tmp_path / "rows.csv"
    emit_csv(rows, path)
    header = path.read_text().splitlines()[0]
    assert header == ("snr_db,ber,pcc_mcs,pcc_mod,pcc_code,mse_channel,"
                      "mse_noise,mean_outer_iters,trials")
    back = read_csv(path)
    assert len(back) == 2
    assert back[0].mse_channel == rows[0].mse_channel  # repr round trip
    assert np.isnan(back[0].mse_noise)
    assert back[1].mse_channel == 1e-300
    assert back[1].trials == 4 and isinstance(back[1].trials, int)


def test_run_scenario_worker_count_invariance(tmp_path):
    s = _tiny_scenario()
    seq = run_scenario(s, workers=1)
    par = run_scenario(s, workers=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(seq, a)
    emit_csv(par, b)
    assert a.read_bytes() == b.read_bytes()


def test_run_benchmarks_all_variants():
    s = _tiny_scenario(trials_per_point=2, snr_grid_db=[10.0],
                       benchmarks=list(BENCHMARK_VARIANTS))
    out = run_benchmarks(s)
    assert set(out) == set(BENCHMARK_VARIANTS)
    for rows in out.values():
        assert len(rows) == 1 and rows[0].trials == 2
    with pytest.raises(ValueError, match="unknown benchmark"):
        run_benchmarks(_tiny_scenario(benchmarks=["oracle"]))


# ------------------------------------------------------------ gamma trace


def test_gamma_trace_records_and_emit(tmp_path):
    s = _tiny_scenario(codes=["hamming_8_4_ext", "ldpc_648_r12"],
                       snr_grid_db=[10.0])
    records = gamma_trace_records(s)
    assert len(records) == 2
    feasible = {r.theta_id: r.feasible for r in records}
    assert feasible == {"qpsk:hamming_8_4_ext": True,
                        "qpsk:ldpc_648_r12": False}
    ok = records[0]
    assert ok.gamma_prefix.shape == (4,)
    path = tmp_path / "trace.csv"
    emit_gamma_trace(records, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iota,gamma_avg,theta_id"
    assert len(lines) == 1 + 4  # infeasible records emit nothing
    assert lines[1].endswith("qpsk:hamming_8_4_ext")


# ------------------------------------------------------------------- CLI


def _write_tiny_scenario(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text(
        "modulations = qpsk\n"
        "codes = hamming_8_4_ext\n"
        "true_theta = qpsk:hamming_8_4_ext\n"
        "snr_grid_db = 6, 10\n"
        "trials_per_point = 3\n"
        "n_paths = 2\n"
        "seed = 7\n"
        "benchmarks = perfect_csi_true_theta, pilot_zf\n")
    return path


def test_cli_sweep(tmp_path, capsys):
    scn = _write_tiny_scenario(tmp_path)
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--scenario", str(scn), "--out", str(out),
                 "--trials", "2"]) == 0
    rows = read_csv(out)
    assert len(rows) == 2 and rows[0].trials == 2
    assert f"wrote {out}" in capsys.readouterr().out


def test_cli_sweep_seed_override_changes_output(tmp_path):
    scn = _write_tiny_scenario(tmp_path)
    out1, out2, out3 = (tmp_path / f"s{i}.csv" for i in (1, 2, 3))
    main(["sweep", "--scenario", str(scn), "--out", str(out1)])
    main(["sweep", "--scenario", str(scn), "--out", str(out2),
          "--seed", "1234"])
    main(["sweep", "--scenario", str(scn), "--out", str(out3),
          "--seed", "7"])
    assert out1.read_bytes() == out3.read_bytes()  # same seed, same bytes
    assert out1.read_bytes() != out2.read_bytes()


def test_cli_bench_writes_suffixed_files(tmp_path, capsys):
    scn = _write_tiny_scenario(tmp_path)
    out = tmp_path / "bench.csv"
    assert main(["bench", "--scenario", str(scn), "--out", str(out),
                 "--trials", "2"]) == 0
    for name in ("perfect_csi_true_theta", "pilot_zf"):
        suffixed = tmp_path / f"bench_{name}.csv"
        assert suffixed.exists()
        assert len(read_csv(suffixed)) == 2
    assert not out.exists()  # only the suffixed files are written


def test_cli_gamma_trace(tmp_path):
    scn = _write_tiny_scenario(tmp_path)
    out = tmp_path / "trace.csv"
    assert main(["gamma-trace", "--scenario", str(scn), "--out", str(out),
                 "--snr", "10"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "iota,gamma_avg,theta_id"
    assert len(lines) == 5  # four checks on the extended Hamming code


def test_cli_defaults_without_scenario(tmp_path):
    # --scenario omitted: the desk defaults apply, overridable per flag
    out = tmp_path / "trace.csv"
    assert main(["gamma-trace", "--out", str(out), "--snr", "10",
                 "--seed", "3"]) == 0
    assert out.exists()
