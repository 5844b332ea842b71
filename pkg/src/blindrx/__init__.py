"""blindrx: a blind iterative receiver over multipath channels.

Joint channel/noise estimation, Bayes equalization, soft decoding,
modulation-and-coding recognition from parity-check consistency, and
data detection for one or several receivers, plus a Monte Carlo harness.

The two inner kernels (equalizer, belief propagation) run on a compiled
backend when available; ``blindrx.kernel_backend()`` reports which one
is active.
"""

from ._kernels import BACKEND as _KERNEL_BACKEND
from .channel import (ChannelParams, FrameTruth, ReceivedFrame,
                      draw_channel, dump_frame, load_frame,
                      noise_power_to_snr_db, snr_db_to_noise_power,
                      transmit)
from .decision import (FinalDecision, HypothesisRecord, decide,
                       log_likelihood, modulation_vote)
from .detector import (DetectionResult, HypothesisShapeError,
                       PosteriorGrid, bayes_equalize, detect_and_regenerate,
                       soft_demodulate)
from .estimator import (EmState, EstimatorConfig, convergence_matrix,
                        e_step, init_biased_truth, init_moment_based,
                        m_step, run_em, update_noise_power)
from .harness import (MetricRow, Scenario, emit_csv, emit_gamma_trace,
                      parse_scenario_file, run_benchmarks, run_scenario)
from .ldpc import (BpResult, LinearBlockCode, available_codes,
                   average_syndrome_llr, bp_decode, encode, load_code,
                   syndrome_llr)
from .modem import (Constellation, SymbolFrame, bit_zero_set, demap,
                    get_constellation, modulate, soft_symbol)
from .receiver import (ReceiverConfig, run_cooperative, run_distributed,
                       run_hypothesis, run_receiver, run_single)

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active kernel backend ("native" or "numpy")."""
    return _KERNEL_BACKEND
