"""Hard-label decision oracles, query counting, and synthetic ground-truth models."""
from __future__ import annotations

import threading

import numpy as np

from .errors import BudgetExhausted, NotMisclassifiedOriginal
from .metrics import AttackTrace


class DecisionOracle:
    """Top-1-label query interface. Subclasses implement ``_decide``.

    Every ``decide`` call bumps an atomic counter, successful or not in terms
    of the attack; the label is all an attacker ever sees.
    """

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    @property
    def query_count(self) -> int:
        return self._count

    def decide(self, x: np.ndarray) -> int:
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise ValueError("oracle input must be finite")
        with self._lock:
            self._count += 1
        return int(self._decide(x))

    def _decide(self, x: np.ndarray) -> int:
        raise NotImplementedError


class HalfspaceOracle(DecisionOracle):
    """Single linear boundary: outside label wherever x . normal >= offset."""

    def __init__(self, normal: np.ndarray, offset: float,
                 inside_label: int = 0, outside_label: int = 1):
        super().__init__()
        normal = np.asarray(normal, dtype=np.float64)
        scale = float(np.linalg.norm(normal.ravel()))
        if scale == 0.0:
            raise ValueError("normal must be nonzero")
        self.normal = normal / scale
        self.offset = float(offset) / scale
        self.inside_label = inside_label
        self.outside_label = outside_label

    def _decide(self, x):
        if float(np.vdot(x, self.normal)) >= self.offset:
            return self.outside_label
        return self.inside_label

    def min_adversarial_distance(self, x_o: np.ndarray) -> float:
        return self.offset - float(np.vdot(x_o, self.normal))


class BallOracle(DecisionOracle):
    """Spherical boundary: inside label strictly within ``radius`` of ``center``."""

    def __init__(self, center: np.ndarray, radius: float,
                 inside_label: int = 0, outside_label: int = 1):
        super().__init__()
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = np.asarray(center, dtype=np.float64)
        self.radius = float(radius)
        self.inside_label = inside_label
        self.outside_label = outside_label

    def _decide(self, x):
        if float(np.linalg.norm((x - self.center).ravel())) >= self.radius:
            return self.outside_label
        return self.inside_label

    def min_adversarial_distance(self, x_o: np.ndarray) -> float:
        return self.radius - float(np.linalg.norm((x_o - self.center).ravel()))


class LinearClassifierOracle(DecisionOracle):
    """argmax of W x + b over C classes; ties go to the smallest class index."""

    def __init__(self, weights: np.ndarray, bias: np.ndarray):
        super().__init__()
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError("weights must be C x D and bias length C")

    def _decide(self, x):
        scores = self.weights @ x.ravel() + self.bias
        return int(np.argmax(scores))

    def min_adversarial_distance(self, x_o: np.ndarray) -> float:
        """Distance to the nearest pairwise decision hyperplane, box ignored."""
        x = np.asarray(x_o, dtype=np.float64).ravel()
        c = int(np.argmax(self.weights @ x + self.bias))
        dists = []
        for j in range(self.weights.shape[0]):
            if j == c:
                continue
            dw = self.weights[c] - self.weights[j]
            gap = float(dw @ x) + float(self.bias[c] - self.bias[j])
            dists.append(gap / float(np.linalg.norm(dw)))
        return min(dists)


def min_adversarial_distance(oracle, x_o: np.ndarray) -> float:
    """Exact smallest distortion reaching a different label, for synthetic oracles."""
    return oracle.min_adversarial_distance(np.asarray(x_o, dtype=np.float64))


class OracleSession:
    """One attack run's view of an oracle: clipping, budget, trace, best point.

    Every query clips to [0, 1], burns exactly one unit of budget, and records
    one trace entry; distortion is measured on the clipped point actually sent.
    """

    def __init__(self, oracle: DecisionOracle, x_o: np.ndarray, budget: int,
                 original_label: int | None = None):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.oracle = oracle
        self.x_o = np.asarray(x_o, dtype=np.float64)
        self.budget = budget
        self.original_label = original_label
        self.trace = AttackTrace(original_label=original_label)
        self.best_distortion: float | None = None
        self.best_point: np.ndarray | None = None

    @property
    def queries_used(self) -> int:
        return len(self.trace)

    @property
    def remaining(self) -> int:
        return self.budget - len(self.trace)

    def observe_original(self) -> int:
        """Query the unmodified original; pins the reference label."""
        label = self._raw_query(self.x_o)
        if self.original_label is None:
            self.original_label = label
            self.trace.original_label = label
        elif label != self.original_label:
            raise NotMisclassifiedOriginal(
                f"oracle already answers {label} for the original")
        self.trace.append(label, label != self.original_label, 0.0)
        return label

    def query(self, x: np.ndarray) -> bool:
        """Clip, query, record; returns whether the answer differs from the original."""
        if self.original_label is None:
            raise RuntimeError("observe_original must run before any other query")
        clipped = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
        label = self._raw_query(clipped)
        adversarial = label != self.original_label
        distortion = float(np.linalg.norm((clipped - self.x_o).ravel()))
        self.trace.append(label, adversarial, distortion)
        if adversarial and (self.best_distortion is None
                            or distortion < self.best_distortion):
            self.best_distortion = distortion
            self.best_point = clipped
        return adversarial

    def _raw_query(self, x: np.ndarray) -> int:
        if len(self.trace) >= self.budget:
            raise BudgetExhausted(f"query budget of {self.budget} exhausted")
        return self.oracle.decide(x)
