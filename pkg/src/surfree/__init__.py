"""surfree: a query-efficient, gradient-free hard-label attack toolkit.

Geometric search over random 2-D planes with a distortion-coupled angle
parametrization, DCT subband direction sampling, synthetic ground-truth
oracles, a loopback HTTP oracle, and a benchmarking harness.
"""
from .attack import AttackResult, AttackState, SurFreeConfig, run
from .errors import SurFreeError
from .metrics import AttackTrace, best_distortion_curve, mean_curve, success_rate
from .oracles import (BallOracle, DecisionOracle, HalfspaceOracle,
                      LinearClassifierOracle, OracleSession,
                      min_adversarial_distance)
from .remote import RemoteOracle, serve
from .sampler import DirectionWindow, ShapingFunction
from .transforms import TransformMode

__version__ = "0.1.0"

__all__ = [
    "AttackResult",
    "AttackState",
    "AttackTrace",
    "BallOracle",
    "DecisionOracle",
    "DirectionWindow",
    "HalfspaceOracle",
    "LinearClassifierOracle",
    "OracleSession",
    "RemoteOracle",
    "ShapingFunction",
    "SurFreeConfig",
    "SurFreeError",
    "TransformMode",
    "best_distortion_curve",
    "mean_curve",
    "min_adversarial_distance",
    "run",
    "serve",
    "success_rate",
    "__version__",
]
