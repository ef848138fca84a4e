"""Quantum information quantities, ensemble metrics and continuity bounds."""
from .channels import Channel, ChannelFamily, apply, complementary, from_family
from .ensembles import Ensemble, MetricResult, d0, d_k, d_star
from .energy import EnergySpec, OscillatorSpec, f_h, f_osc, f_osc_hat, gibbs_state
from .errors import QcbError, TruncationWarning
from .qinfo import entropy, holevo, mutual_information, qcmi, relative_entropy
from .qmat import DensityMatrix, partial_trace

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "ChannelFamily",
    "DensityMatrix",
    "EnergySpec",
    "Ensemble",
    "MetricResult",
    "OscillatorSpec",
    "QcbError",
    "TruncationWarning",
    "apply",
    "complementary",
    "d0",
    "d_k",
    "d_star",
    "entropy",
    "f_h",
    "f_osc",
    "f_osc_hat",
    "from_family",
    "gibbs_state",
    "holevo",
    "mutual_information",
    "partial_trace",
    "qcmi",
    "relative_entropy",
]
