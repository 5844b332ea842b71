"""Monte Carlo experiment driver: SNR sweeps, benchmark baselines, metric
aggregation, and CSV emission.

Trials are reproducible and worker-count independent: trial (p, t) of a
scenario always uses the generator seeded with [seed, p, t], and the
per-point reduction folds results in trial order regardless of how many
processes computed them.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from itertools import product
from typing import Optional

import numpy as np

from . import ldpc
from .channel import (ChannelParams, FrameTruth, draw_channel,
                      snr_db_to_noise_power, transmit)
from .detector import detect_and_regenerate
from .estimator import EstimatorConfig, shift_matrix
from .modem import get_constellation, modulate
from .receiver import (ReceiverConfig, draw_initial_params, run_hypothesis,
                       run_receiver)

__all__ = [
    "Scenario",
    "MetricRow",
    "DEFAULT_SCENARIO",
    "parse_scenario_file",
    "run_scenario",
    "run_benchmarks",
    "gamma_trace_records",
    "emit_csv",
    "emit_gamma_trace",
]

BENCHMARK_VARIANTS = ("perfect_csi", "perfect_csi_true_theta",
                      "pilot_zf", "pilot_lmmse")


@dataclass
class Scenario:
    """A full sweep description; see parse_scenario_file for the on-disk
    key=value format."""

    modulations: list = field(
        default_factory=lambda: ["qpsk", "8psk", "16qam"])
    codes: list = field(default_factory=lambda: [
        "ldpc_648_r12", "ldpc_648_r23", "ldpc_1296_r12", "ldpc_1944_r12"])
    # "uniform" (whole candidate grid), one (mod, code) pair, or a list of
    # pairs to draw from uniformly
    true_theta: object = "uniform"
    snr_grid_db: list = field(
        default_factory=lambda: [-2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0])
    trials_per_point: int = 200
    k_receivers: int = 1
    n_paths: int = 6
    tap_variance: float = 0.1
    init_mode: str = "biased-truth"
    seed: int = 2026
    mode: str = "single"
    benchmarks: list = field(
        default_factory=lambda: list(BENCHMARK_VARIANTS))
    workers: int = 1
    i_max: int = 30
    t_max: int = 30
    eps_outer: float = 1e-3
    eps_em: float = 1e-3
    iota: Optional[int] = None
    bias_deltas: tuple = (0.1, float(np.pi) / 20.0, 0.1)
    moment_grid_step: float = 0.1

    def candidate_grid(self) -> list:
        return list(product(self.modulations, self.codes))

    def receiver_config(self, candidates=None, freeze=False,
                        init_mode=None) -> ReceiverConfig:
        est = EstimatorConfig(
            t_max=self.t_max, eps=self.eps_em,
            init_mode=init_mode or self.init_mode,
            bias_deltas=tuple(self.bias_deltas),
            moment_grid_step=self.moment_grid_step)
        return ReceiverConfig(
            candidates=candidates or self.candidate_grid(),
            i_max=self.i_max, eps=self.eps_outer, mode=self.mode,
            estimator=est, iota=self.iota, freeze_estimates=freeze,
            n_paths=self.n_paths)


@dataclass
class MetricRow:
    """One sweep point.  Field order is the CSV column order."""

    snr_db: float
    ber: float
    pcc_mcs: float
    pcc_mod: float
    pcc_code: float
    mse_channel: float
    mse_noise: float
    mean_outer_iters: float
    trials: int


DEFAULT_SCENARIO = Scenario()

_LIST_KEYS = {"modulations", "codes", "benchmarks"}
_FLOAT_LIST_KEYS = {"snr_grid_db", "bias_deltas"}
_INT_KEYS = {"trials_per_point", "k_receivers", "n_paths", "seed",
             "workers", "i_max", "t_max"}
_FLOAT_KEYS = {"tap_variance", "eps_outer", "eps_em", "moment_grid_step"}


def parse_scenario_file(path) -> Scenario:
    """Read a flat key=value scenario file.

    Lists are comma separated; ``true_theta`` is ``uniform``, a single
    ``modulation:code`` pair, or a comma-separated list of such pairs to
    draw from; ``#`` starts a comment.  Unknown keys are rejected.
    Example::

        modulations = qpsk,16qam
        codes = ldpc_648_r12,ldpc_648_r23
        true_theta = uniform
        snr_grid_db = -2,0,2,4,6,8
        trials_per_point = 200
        seed = 7
        mode = single
    """
    known = {f.name for f in fields(Scenario)}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, text)
    return Scenario(**values)


def _parse_value(key, text):
    if key in _LIST_KEYS:
        return [tok.strip() for tok in text.split(",") if tok.strip()]
    if key in _FLOAT_LIST_KEYS:
        parsed = [float(tok) for tok in text.split(",") if tok.strip()]
        return tuple(parsed) if key == "bias_deltas" else parsed
    if key in _INT_KEYS:
        return int(text)
    if key in _FLOAT_KEYS:
        return float(text)
    if key == "iota":
        return None if text.lower() in ("", "none", "full") else int(text)
    if key == "true_theta":
        if text.lower() == "uniform":
            return "uniform"
        pairs = []
        for token in text.split(","):
            mod, _, code = token.partition(":")
            if not code:
                raise ValueError("true_theta must be 'uniform' or one or "
                                 "more comma-separated 'mod:code' pairs")
            pairs.append((mod.strip(), code.strip()))
        return pairs[0] if len(pairs) == 1 else pairs
    return text


def _draw_frame(scenario: Scenario, snr_db: float,
                rng: np.random.Generator):
    """Channel draw, hypothesis-true bit/symbol generation, transmission.

    The draw order is fixed so every variant sees the same frame for a
    given (seed, point, trial)."""
    pool = scenario.true_theta
    if isinstance(pool, str):
        pool = scenario.candidate_grid()
    elif not isinstance(pool[0], (list, tuple)):
        pool = [pool]
    theta = tuple(pool[int(rng.integers(len(pool)))])
    constellation = get_constellation(theta[0])
    code = ldpc.load_code(theta[1])
    noise_power = snr_db_to_noise_power(snr_db)
    params = [draw_channel(rng, scenario.n_paths, scenario.tap_variance,
                           noise_power)
              for _ in range(scenario.k_receivers)]
    message = rng.integers(0, 2, code.q).astype(np.uint8)
    coded = ldpc.encode(code, message)
    symbols = modulate(coded, constellation)
    frame = transmit(symbols, params, rng)
    frame.truth = FrameTruth(params=params, modulation=theta[0],
                             code=theta[1], message_bits=message,
                             coded_bits=coded, symbols=symbols)
    return frame, theta, constellation, code


def _pilot_channel_estimate(row: np.ndarray, symbols: np.ndarray,
                            n_paths: int, method: str, noise_power: float,
                            tap_variance: float) -> ChannelParams:
    """All-pilot least-squares (zf) or prior-regularized (lmmse) estimate.

    The lmmse ridge uses per-tap prior variances (1 for the deterministic
    leading tap, the tap variance for the rest) and the true noise power.
    """
    a = shift_matrix(symbols, n_paths).T     # N x L
    gram = a.conj().T @ a
    rhs = a.conj().T @ row
    if method == "pilot_zf":
        taps = np.linalg.solve(gram, rhs)
    else:
        prior = np.full(n_paths, tap_variance)
        prior[0] = 1.0
        taps = np.linalg.solve(gram + noise_power * np.diag(1.0 / prior),
                               rhs)
    residual = row - a @ taps
    sigma2 = max(float(np.mean(np.abs(residual) ** 2)), 1e-12)
    return ChannelParams(np.abs(taps), np.angle(taps) % (2 * np.pi), sigma2)


def _trial_metrics(frame, theta_hat, bits_hat, beta_hat, outer_iters):
    truth = frame.truth
    q_true = len(truth.message_bits)
    if bits_hat is None or len(bits_hat) != q_true:
        bit_errors = q_true
    else:
        bit_errors = int(np.sum(bits_hat != truth.message_bits))
    channel_se = np.nan
    noise_se = np.nan
    if beta_hat is not None:
        channel_se = float(np.mean([
            np.sum(np.abs(b.taps - p.taps) ** 2)
            for b, p in zip(beta_hat, truth.params)]))
        noise_se = float(np.mean([
            (b.noise_power - p.noise_power) ** 2
            for b, p in zip(beta_hat, truth.params)]))
    true_theta = (truth.modulation, truth.code)
    return (bit_errors, q_true,
            theta_hat == true_theta,
            theta_hat is not None and theta_hat[0] == true_theta[0],
            theta_hat is not None and theta_hat[1] == true_theta[1],
            channel_se, noise_se, outer_iters)


def run_trial(scenario: Scenario, point_idx: int, trial_idx: int,
              snr_db: float, variant: str = "blind"):
    """One Monte Carlo trial; returns the per-trial metric tuple."""
    if variant not in ("blind",) + BENCHMARK_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; "
                         f"available: {('blind',) + BENCHMARK_VARIANTS}")
    rng = np.random.default_rng([scenario.seed, point_idx, trial_idx])
    frame, theta, constellation, code = _draw_frame(scenario, snr_db, rng)
    try:
        if variant == "blind":
            cfg = scenario.receiver_config()
            dec = run_receiver(frame, cfg, rng)
        elif variant == "perfect_csi":
            cfg = scenario.receiver_config(freeze=True, init_mode="truth")
            dec = run_receiver(frame, cfg, rng)
        elif variant == "perfect_csi_true_theta":
            cfg = scenario.receiver_config(candidates=[theta], freeze=True,
                                           init_mode="truth")
            dec = run_receiver(frame, cfg, rng)
        else:
            return _run_pilot_trial(scenario, frame, theta, constellation,
                                    code, snr_db, variant)
    except Exception:
        return (len(frame.truth.message_bits), len(frame.truth.message_bits),
                False, False, False, np.nan, np.nan, np.nan)
    return _trial_metrics(frame, dec.theta_hat, dec.bits_hat, dec.beta_hat,
                          dec.outer_iterations)


def _run_pilot_trial(scenario, frame, theta, constellation, code, snr_db,
                     variant):
    """Known-symbol channel estimation followed by detection at the true
    hypothesis (the pilot baselines measure estimation quality, so the
    hypothesis search is granted)."""
    noise_power = snr_db_to_noise_power(snr_db)
    betas = [_pilot_channel_estimate(
        frame.samples[k], frame.truth.symbols.symbols, scenario.n_paths,
        variant, noise_power, scenario.tap_variance)
        for k in range(frame.n_receivers)]
    det = detect_and_regenerate(frame.samples, betas, constellation, code)
    return _trial_metrics(frame, theta, det.bits_hat, betas, 1.0)


def _trial_args(scenario, variant):
    for p, snr in enumerate(scenario.snr_grid_db):
        yield [(scenario, p, t, snr, variant)
               for t in range(scenario.trials_per_point)]


def _run_trial_star(args):
    return run_trial(*args)


def _aggregate(snr_db: float, results) -> MetricRow:
    arr = np.array(results, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        return MetricRow(
            snr_db=float(snr_db),
            ber=float(arr[:, 0].sum() / arr[:, 1].sum()),
            pcc_mcs=float(arr[:, 2].mean()),
            pcc_mod=float(arr[:, 3].mean()),
            pcc_code=float(arr[:, 4].mean()),
            mse_channel=_nanmean(arr[:, 5]),
            mse_noise=_nanmean(arr[:, 6]),
            mean_outer_iters=_nanmean(arr[:, 7]),
            trials=len(results))


def _nanmean(col):
    return float(np.nanmean(col)) if not np.isnan(col).all() else np.nan


def run_scenario(scenario: Scenario, workers: Optional[int] = None,
                 variant: str = "blind") -> list:
    """Sweep all SNR points; returns one MetricRow per point.

    Results are identical for any worker count: trials are seeded by
    index and reduced in index order."""
    workers = workers if workers is not None else scenario.workers
    rows = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for snr, args in zip(scenario.snr_grid_db,
                                 _trial_args(scenario, variant)):
                results = list(pool.map(_run_trial_star, args,
                                        chunksize=8))
                rows.append(_aggregate(snr, results))
    else:
        for snr, args in zip(scenario.snr_grid_db,
                             _trial_args(scenario, variant)):
            rows.append(_aggregate(snr, [run_trial(*a) for a in args]))
    return rows


def run_benchmarks(scenario: Scenario,
                   workers: Optional[int] = None) -> dict:
    """Run every benchmark variant listed in the scenario."""
    out = {}
    for name in scenario.benchmarks:
        if name not in BENCHMARK_VARIANTS:
            raise ValueError(f"unknown benchmark {name!r}; "
                             f"available: {BENCHMARK_VARIANTS}")
        out[name] = run_scenario(scenario, workers=workers, variant=name)
    return out


def gamma_trace_records(scenario: Scenario, snr_db: Optional[float] = None,
                        trial_idx: int = 0) -> list:
    """Per-hypothesis records for one frame (for syndrome-average plots).

    Uses the first sweep point's SNR unless overridden; the frame is the
    same one trial (0, trial_idx) of a sweep would see."""
    snr = snr_db if snr_db is not None else scenario.snr_grid_db[0]
    rng = np.random.default_rng([scenario.seed, 0, trial_idx])
    frame, _, _, _ = _draw_frame(scenario, snr, rng)
    cfg = scenario.receiver_config()
    inits = draw_initial_params(frame, cfg, rng)
    return [run_hypothesis(frame, theta, cfg,
                           inits=[b.copy() for b in inits])
            for theta in cfg.candidates]


def emit_csv(rows, path) -> None:
    """Write MetricRows with the field order as columns."""
    names = [f.name for f in fields(MetricRow)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in rows:
            writer.writerow([_format(getattr(row, name))
                             for name in names])


def read_csv(path) -> list:
    """Parse a CSV written by emit_csv back into MetricRows."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        rows = []
        for rec in reader:
            kwargs = dict(zip(names, rec))
            kwargs = {k: (int(v) if k == "trials" else float(v))
                      for k, v in kwargs.items()}
            rows.append(MetricRow(**kwargs))
    return rows


def emit_gamma_trace(records, path) -> None:
    """Write per-hypothesis syndrome-average traces as CSV
    (iota, gamma_avg, theta_id)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iota", "gamma_avg", "theta_id"])
        for rec in records:
            if not rec.feasible:
                continue
            for i, gamma in enumerate(rec.gamma_prefix, start=1):
                writer.writerow([i, repr(float(gamma)), rec.theta_id])


def _format(value):
    if isinstance(value, int):
        return value
    if isinstance(value, float) and np.isnan(value):
        return "nan"
    return repr(float(value))
