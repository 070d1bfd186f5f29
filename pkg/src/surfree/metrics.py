"""Distortion bookkeeping: query traces, best-distortion curves, success rates."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import EmptySet, LengthMismatch

CSV_HEADER = ["query_index", "label", "is_adversarial", "l2_distortion"]


@dataclass(frozen=True)
class TraceEntry:
    query_index: int
    label: int
    is_adversarial: bool
    l2_distortion: float


@dataclass
class AttackTrace:
    """Ordered record of every oracle query made during one attack run."""

    original_label: int | None = None
    entries: list = field(default_factory=list)

    def append(self, label: int, is_adversarial: bool, l2_distortion: float) -> TraceEntry:
        if l2_distortion < 0:
            raise ValueError("distortion cannot be negative")
        entry = TraceEntry(len(self.entries) + 1, int(label), bool(is_adversarial),
                           float(l2_distortion))
        self.entries.append(entry)
        return entry

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, AttackTrace) and self.entries == other.entries


def best_distortion_curve(trace: AttackTrace, up_to_k: int | None = None) -> list:
    """Running minimum distortion over adversarial queries.

    Position k-1 holds the best distortion among adversarial queries 1..k, or
    None while no adversarial query has been seen. When ``up_to_k`` exceeds the
    trace length the final value is carried forward (no further queries can
    change the minimum up to that budget).
    """
    k = len(trace) if up_to_k is None else up_to_k
    curve = []
    best = None
    for entry in trace:
        if len(curve) >= k:
            break
        if entry.is_adversarial and (best is None or entry.l2_distortion < best):
            best = entry.l2_distortion
        curve.append(best)
    while len(curve) < k:
        curve.append(best)
    return curve


def mean_curve(curves: list) -> list:
    """Pointwise arithmetic mean of equally long, fully defined curves."""
    if not curves:
        raise EmptySet("no curves to average")
    n = len(curves[0])
    for c in curves:
        if len(c) != n:
            raise LengthMismatch(f"curve lengths differ: {len(c)} != {n}")
        if any(v is None for v in c):
            raise ValueError("curves must be defined at every position")
    return [sum(c[i] for c in curves) / len(curves) for i in range(n)]


def success_rate(final_distortions: list, d_t: float) -> float:
    """Fraction of runs whose final best distortion is at most ``d_t``."""
    if not final_distortions:
        raise EmptySet("no distortions given")
    hits = sum(1 for d in final_distortions if d is not None and d <= d_t)
    return hits / len(final_distortions)


def export_trace(trace: AttackTrace, path) -> None:
    """Write the trace as CSV; distortions keep 17 significant digits so the
    exact float64 values survive a round-trip."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for e in trace:
            writer.writerow([e.query_index, e.label, int(e.is_adversarial),
                             format(e.l2_distortion, ".17g")])


def import_trace(path, original_label: int | None = None) -> AttackTrace:
    trace = AttackTrace(original_label=original_label)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected trace header {header!r}")
        for row in reader:
            trace.append(int(row[1]), bool(int(row[2])), float(row[3]))
    return trace
