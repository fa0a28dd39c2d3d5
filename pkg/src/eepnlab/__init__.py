"""eepnlab: equalization-enhanced phase noise in coherent QPSK links.

Monte Carlo link pipelines for transmitter- and receiver-side electronic
chromatic-dispersion compensation, the closed-form EEPN/BER-floor model,
and a sweep harness that writes plot-ready CSV/JSON.
"""

__version__ = "0.1.0"

from .analytics import (
    FiberSpec,
    LaserSpec,
    SymbolClock,
    ber_floor,
    eepn_linewidth,
    eepn_variance,
    effective_linewidth,
    osnr_to_es_n0,
    qpsk_ber_awgn,
)
from .link import BerRecord, LinkScenario, simulate, simulate_optical_comp, simulate_post, simulate_pre
from .noise import RngStream

__all__ = [
    "FiberSpec",
    "LaserSpec",
    "SymbolClock",
    "RngStream",
    "LinkScenario",
    "BerRecord",
    "eepn_variance",
    "eepn_linewidth",
    "effective_linewidth",
    "ber_floor",
    "osnr_to_es_n0",
    "qpsk_ber_awgn",
    "simulate",
    "simulate_post",
    "simulate_pre",
    "simulate_optical_comp",
    "__version__",
]
