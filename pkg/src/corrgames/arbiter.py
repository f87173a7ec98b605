"""Monte Carlo protocol: play runs, log them, infer strategies, settle payoffs.

Each run: both players receive one half of a shared pair, pick a measurement
axis according to their announced strategy (the common z-axis with their move
probability, their own direction otherwise), and report axis and outcome.
The arbiter never learns what kind of pairs were distributed: strategies are
inferred by counting axis choices, correlations are estimated per axis
combination, and payoffs follow from the agreed correlation settlement rule
alone.

Randomness is drawn from four seed-derived substreams (Alice's axis, Bob's
axis, outcome product, outcome sign), so run ``k``'s draws are a pure
function of the master seed and ``k`` and partitioned generation would match
sequential generation exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .corrmodel import axis_angle, kernel
from .game import GameSpec, correlation_payoff
from .gfn import eval_g

__all__ = [
    "ArbiterError",
    "UndefinedCorrelationError",
    "StrategyMix",
    "RunRecord",
    "RunLog",
    "CorrelationEstimate",
    "CorrelationEstimates",
    "SimulationResult",
    "play_runs",
    "infer_strategies",
    "estimate_correlations",
    "settle",
    "write_jsonl",
    "read_jsonl",
    "write_csv",
]

_AXIS_A = ("Z", "A")
_AXIS_B = ("Z", "B")


class ArbiterError(RuntimeError):
    """Protocol-level failure."""


class UndefinedCorrelationError(ArbiterError):
    """A correlation required for settlement has no supporting runs.

    Pure strategies starve one of the axis combinations; use the analytic
    payoff functions for pure play instead of simulating it.
    """


@dataclass(frozen=True)
class StrategyMix:
    """A direction together with its announced identity-move probability."""

    theta: float
    p: float

    @staticmethod
    def from_angle(g, theta: float) -> "StrategyMix":
        return StrategyMix(float(theta), eval_g(g, theta))


@dataclass(frozen=True)
class RunRecord:
    index: int
    alice_axis: str
    bob_axis: str
    a_out: int
    b_out: int


@dataclass
class RunLog:
    """Per-run axis choices and outcomes plus reproducibility metadata.

    Arrays are column-oriented for speed; ``records()`` iterates row views.
    """

    meta: dict
    alice_axis: np.ndarray  # uint8, 0 = Z, 1 = A
    bob_axis: np.ndarray  # uint8, 0 = Z, 1 = B
    a_out: np.ndarray  # int8, +/-1
    b_out: np.ndarray  # int8, +/-1

    def __post_init__(self) -> None:
        n = int(self.meta.get("n", len(self.a_out)))
        arrays = (self.alice_axis, self.bob_axis, self.a_out, self.b_out)
        if not all(len(a) == n for a in arrays):
            raise ArbiterError("record arrays must all have length n")
        for a in arrays:
            a.setflags(write=False)

    def __len__(self) -> int:
        return len(self.a_out)

    def records(self) -> Iterator[RunRecord]:
        for k in range(len(self)):
            yield RunRecord(
                k,
                _AXIS_A[self.alice_axis[k]],
                _AXIS_B[self.bob_axis[k]],
                int(self.a_out[k]),
                int(self.b_out[k]),
            )


def _substreams(seed: int, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    children = np.random.SeedSequence(seed).spawn(4)
    gens = [np.random.Generator(np.random.Philox(c)) for c in children]
    return tuple(gen.random(n) for gen in gens)  # type: ignore[return-value]


def play_runs(
    spec: GameSpec, theta_a: float, theta_b: float, n: int, seed: int
) -> RunLog:
    """Play ``n`` seeded runs with fixed strategies and log every run.

    Alice measures along z with probability ``g(theta_a)`` and along her
    direction otherwise; Bob independently with ``g(theta_b)``.  The outcome
    pair is drawn from the model's joint law at the angle between the two
    chosen axes.  Identical ``(spec, angles, n, seed)`` give identical logs.
    """
    if n < 1:
        raise ArbiterError("n must be at least 1")
    p_a = eval_g(spec.g, theta_a)
    p_b = eval_g(spec.g, theta_b)
    u_axis_a, u_axis_b, u_prod, u_sign = _substreams(int(seed), n)
    alice = (u_axis_a >= p_a).astype(np.uint8)  # 1 = own direction
    bob = (u_axis_b >= p_b).astype(np.uint8)

    c_by_combo = np.array(
        [
            [kernel(spec.model, axis_angle("Z", "Z", theta_a, theta_b)),
             kernel(spec.model, axis_angle("Z", "B", theta_a, theta_b))],
            [kernel(spec.model, axis_angle("A", "Z", theta_a, theta_b)),
             kernel(spec.model, axis_angle("A", "B", theta_a, theta_b))],
        ]
    )
    c = c_by_combo[alice, bob]
    s = np.where(u_prod < 0.5 * (1.0 + c), 1, -1).astype(np.int8)
    a = np.where(u_sign < 0.5, 1, -1).astype(np.int8)
    b = (s * a).astype(np.int8)

    meta = {
        "n": int(n),
        "seed": int(seed),
        "theta_a": float(theta_a),
        "theta_b": float(theta_b),
        "p_a": float(p_a),
        "p_b": float(p_b),
        "model": spec.model.describe(),
        "game": spec.describe(),
    }
    return RunLog(meta, alice, bob, a, b)


def infer_strategies(log: RunLog) -> tuple[float, float]:
    """Estimate the announced probabilities by counting axis choices."""
    n = len(log)
    if n < 1:
        raise ArbiterError("empty log")
    p_a = float(np.count_nonzero(log.alice_axis == 0)) / n
    p_b = float(np.count_nonzero(log.bob_axis == 0)) / n
    return p_a, p_b


@dataclass(frozen=True)
class CorrelationEstimate:
    """Mean outcome product over one axis combination; ``value`` is ``None``
    when no runs support it."""

    value: float | None
    count: int
    stderr: float | None

    def to_dict(self) -> dict:
        return {"value": self.value, "count": self.count, "stderr": self.stderr}


@dataclass(frozen=True)
class CorrelationEstimates:
    ac: CorrelationEstimate  # Alice direction, Bob z
    cb: CorrelationEstimate  # Alice z, Bob direction
    ab: CorrelationEstimate  # both own directions (diagnostic)
    cc: CorrelationEstimate  # both z (diagnostic)

    def to_dict(self) -> dict:
        return {
            "ac": self.ac.to_dict(),
            "cb": self.cb.to_dict(),
            "ab": self.ab.to_dict(),
            "cc": self.cc.to_dict(),
        }


def _estimate(products: np.ndarray) -> CorrelationEstimate:
    count = int(products.size)
    if count == 0:
        return CorrelationEstimate(None, 0, None)
    value = float(products.mean())
    stderr = math.sqrt(max(1.0 - value * value, 0.0) / count)
    return CorrelationEstimate(value, count, stderr)


def estimate_correlations(log: RunLog) -> CorrelationEstimates:
    """Per-axis-combination correlation estimates with counts and standard
    errors; empty combinations are reported as undefined, never as zero."""
    products = (log.a_out.astype(np.int32) * log.b_out.astype(np.int32))
    alice_own = log.alice_axis == 1
    bob_own = log.bob_axis == 1
    return CorrelationEstimates(
        ac=_estimate(products[alice_own & ~bob_own]),
        cb=_estimate(products[~alice_own & bob_own]),
        ab=_estimate(products[alice_own & bob_own]),
        cc=_estimate(products[~alice_own & ~bob_own]),
    )


@dataclass(frozen=True)
class SimulationResult:
    p_a_hat: float
    p_b_hat: float
    correlations: CorrelationEstimates
    payoffs: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "p_a_hat": self.p_a_hat,
            "p_b_hat": self.p_b_hat,
            "correlations": self.correlations.to_dict(),
            "payoffs": list(self.payoffs),
        }


def settle(log: RunLog, spec: GameSpec) -> SimulationResult:
    """Settle payoffs from the log alone via the correlation payoff rule.

    Deliberately blind to what produced the data: only the recorded axis
    choices and outcomes, the payoff matrix, and the link function enter.
    Raises :class:`UndefinedCorrelationError` when a required axis
    combination has no runs.
    """
    est = estimate_correlations(log)
    if est.ac.value is None or est.cb.value is None:
        starved = [
            name
            for name, e in (("ac", est.ac), ("cb", est.cb))
            if e.value is None
        ]
        raise UndefinedCorrelationError(
            f"no runs support correlation(s) {', '.join(starved)}; "
            "pure strategies cannot be settled from data - use the analytic payoffs"
        )
    p_a_hat, p_b_hat = infer_strategies(log)
    payoffs = correlation_payoff(spec.matrix, spec.g, est.ac.value, est.cb.value)
    return SimulationResult(p_a_hat, p_b_hat, est, payoffs)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def write_jsonl(log: RunLog, path: str | Path) -> None:
    """One header line with the metadata, then one line per run."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"meta": log.meta}, sort_keys=True) + "\n")
        for k in range(len(log)):
            fh.write(
                json.dumps(
                    {
                        "i": k,
                        "a_axis": _AXIS_A[log.alice_axis[k]],
                        "b_axis": _AXIS_B[log.bob_axis[k]],
                        "a": int(log.a_out[k]),
                        "b": int(log.b_out[k]),
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_jsonl(path: str | Path) -> RunLog:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        meta = header["meta"]
        n = int(meta["n"])
        alice = np.empty(n, dtype=np.uint8)
        bob = np.empty(n, dtype=np.uint8)
        a = np.empty(n, dtype=np.int8)
        b = np.empty(n, dtype=np.int8)
        for k, line in enumerate(fh):
            rec = json.loads(line)
            alice[k] = _AXIS_A.index(rec["a_axis"])
            bob[k] = _AXIS_B.index(rec["b_axis"])
            a[k] = rec["a"]
            b[k] = rec["b"]
    return RunLog(meta, alice, bob, a, b)


def write_csv(log: RunLog, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write("index,alice_axis,bob_axis,a,b\n")
        for k in range(len(log)):
            fh.write(
                f"{k},{_AXIS_A[log.alice_axis[k]]},{_AXIS_B[log.bob_axis[k]]},"
                f"{int(log.a_out[k])},{int(log.b_out[k])}\n"
            )
