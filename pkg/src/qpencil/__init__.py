"""Matrix pencil estimation of damped exponentials, classically and through a
simulated twofold quantum phase estimation."""
from .classical import EstimationReport, RankSpec, estimate
from .errors import ContractError, NumericalError, QPencilError
from .hankel import build_hankel_pair, extend
from .quantum import QuantumConfig, QuantumEstimateReport, qmpm_estimate
from .signal import SampledSignal, SignalModel, add_noise, add_reference_pole, sample

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "EstimationReport",
    "NumericalError",
    "QPencilError",
    "QuantumConfig",
    "QuantumEstimateReport",
    "RankSpec",
    "SampledSignal",
    "SignalModel",
    "add_noise",
    "add_reference_pole",
    "build_hankel_pair",
    "estimate",
    "extend",
    "qmpm_estimate",
    "sample",
]
