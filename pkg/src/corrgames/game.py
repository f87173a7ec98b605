"""Payoff engine for 2x2 bimatrix games settled through correlations.

The engine works with the full bimatrix bilinear form; the symmetric
``(K, L, M, N)`` view is a derived accessor valid for symmetric games only.
Correlation payoffs substitute link-transformed correlation values for the
move probabilities, which reproduces the plain bilinear game exactly when the
input pairs are classical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corrmodel import CorrelationModel, kernel, singlet_model
from .gfn import GFunction, big_G, eval_g, q_transform

__all__ = [
    "GameError",
    "OrderingViolation",
    "Bimatrix2x2",
    "SymmetricParams",
    "GameSpec",
    "from_rstu",
    "expected_payoff_classical",
    "correlation_payoff",
    "classical_payoff",
    "quantum_payoff",
    "quantum_payoff_angle",
    "make_preset",
]


class GameError(ValueError):
    """Invalid game construction or payoff arguments."""


class OrderingViolation(GameError):
    """A preset's defining payoff inequality fails."""


@dataclass(frozen=True)
class Bimatrix2x2:
    """Payoff pairs ``(to Alice, to Bob)``; rows are Alice's moves (identity,
    switch), columns Bob's."""

    entries: tuple[
        tuple[tuple[float, float], tuple[float, float]],
        tuple[tuple[float, float], tuple[float, float]],
    ]

    def __post_init__(self) -> None:
        ent = tuple(
            tuple(tuple(float(v) for v in cell) for cell in row)
            for row in self.entries
        )
        for row in ent:
            for cell in row:
                if len(cell) != 2 or not all(math.isfinite(v) for v in cell):
                    raise GameError(f"payoff entries must be finite pairs, got {cell}")
        object.__setattr__(self, "entries", ent)

    def payoff(self, alice_move: int, bob_move: int) -> tuple[float, float]:
        """Cell payoffs; move 0 is the identity, move 1 the switch action."""
        return self.entries[alice_move][bob_move]

    @property
    def is_symmetric(self) -> bool:
        (aII, bII), (aIS, bIS) = self.entries[0]
        (aSI, bSI), (aSS, bSS) = self.entries[1]
        return (
            abs(aII - bII) <= 1e-12
            and abs(aSS - bSS) <= 1e-12
            and abs(aIS - bSI) <= 1e-12
            and abs(aSI - bIS) <= 1e-12
        )

    def symmetric_params(self) -> SymmetricParams:
        if not self.is_symmetric:
            raise GameError("matrix is not in the symmetric family")
        r = self.entries[0][0][0]
        s = self.entries[0][1][0]
        t = self.entries[1][0][0]
        u = self.entries[1][1][0]
        return from_rstu(r, s, t, u)


@dataclass(frozen=True)
class SymmetricParams:
    """Coefficients of the symmetric bilinear payoff
    ``K*pA*pB + L*pA + M*pB + N`` (Alice; Bob swaps L and M)."""

    K: float
    L: float
    M: float
    N: float

    def to_rstu(self) -> tuple[float, float, float, float]:
        return (
            self.K + self.L + self.M + self.N,
            self.L + self.N,
            self.M + self.N,
            self.N,
        )

    def to_matrix(self) -> Bimatrix2x2:
        r, s, t, u = self.to_rstu()
        return Bimatrix2x2((((r, r), (s, t)), ((t, s), (u, u))))


def from_rstu(r: float, s: float, t: float, u: float) -> SymmetricParams:
    """Invert the corner payoffs of a symmetric game into (K, L, M, N)."""
    for name, v in (("r", r), ("s", s), ("t", t), ("u", u)):
        if not math.isfinite(float(v)):
            raise GameError(f"{name} must be finite, got {v!r}")
    return SymmetricParams(K=r - s - t + u, L=s - u, M=t - u, N=u)


@dataclass(frozen=True)
class GameSpec:
    """A playable configuration: matrix, link function, input-pair family."""

    matrix: Bimatrix2x2
    g: GFunction
    model: CorrelationModel
    tag: str = "custom"

    def describe(self) -> dict:
        return {
            "tag": self.tag,
            "matrix": [
                [list(cell) for cell in row] for row in self.matrix.entries
            ],
            "gfunction": self.g.describe(),
            "model": self.model.describe(),
        }


def expected_payoff_classical(
    m: Bimatrix2x2, p_a: float, p_b: float
) -> tuple[float, float]:
    """Bilinear expected payoffs when Alice plays the identity with
    probability ``p_a`` and Bob with ``p_b``."""
    pa, pb = float(p_a), float(p_b)
    if not (-1e-12 <= pa <= 1.0 + 1e-12 and -1e-12 <= pb <= 1.0 + 1e-12):
        raise GameError(f"probabilities must lie in [0, 1], got ({p_a}, {p_b})")
    pa = min(max(pa, 0.0), 1.0)
    pb = min(max(pb, 0.0), 1.0)
    qa, qb = 1.0 - pa, 1.0 - pb
    w = ((pa * pb, pa * qb), (qa * pb, qa * qb))
    total_a = total_b = 0.0
    for i in range(2):
        for j in range(2):
            cell = m.entries[i][j]
            weight = w[i][j]
            total_a += weight * cell[0]
            total_b += weight * cell[1]
    return total_a, total_b


def correlation_payoff(
    m: Bimatrix2x2, g: GFunction, c_ac: float, c_cb: float
) -> tuple[float, float]:
    """Payoffs from the two measured correlations, via the link transform.

    ``G(c_ac)`` substitutes for Alice's probability and ``G(c_cb)`` for
    Bob's; both correlations must lie in [-1, 1].  This settlement rule never
    refers to what produced the correlations.
    """
    return expected_payoff_classical(m, big_G(g, c_ac), big_G(g, c_cb))


def classical_payoff(
    spec: GameSpec, theta_a: float, theta_b: float
) -> tuple[float, float]:
    """Payoffs when the shared pairs are classical and directions are
    ``theta_a``, ``theta_b``: correlation settlement with the linear kernel,
    which collapses to the bilinear form at ``(g(theta_a), g(theta_b))``."""
    cls = CorrelationModel("classical")
    return correlation_payoff(
        spec.matrix, spec.g, kernel(cls, theta_a), kernel(cls, theta_b)
    )


def quantum_payoff(spec: GameSpec, p_a: float, p_b: float) -> tuple[float, float]:
    """Singlet-input payoffs as a function of the announced probabilities.

    Each probability is replaced by its effective value under singlet
    statistics; requires an invertible link (the probability alone must pin
    the direction).  Non-linear in ``p_a`` and ``p_b`` in general.
    """
    return expected_payoff_classical(
        spec.matrix, q_transform(spec.g, p_a), q_transform(spec.g, p_b)
    )


def quantum_payoff_angle(
    spec: GameSpec, theta_a: float, theta_b: float
) -> tuple[float, float]:
    """Payoffs as a function of directions, total for every link function.

    Uses the spec's input-pair family (singlet by default, the weakened
    mixture kernel when configured so); with the classical family it equals
    :func:`classical_payoff`.
    """
    return correlation_payoff(
        spec.matrix,
        spec.g,
        kernel(spec.model, theta_a),
        kernel(spec.model, theta_b),
    )


def make_preset(
    name: str,
    g: GFunction,
    model: CorrelationModel | None = None,
    **params: float,
) -> GameSpec:
    """Build a preset game.

    ``pd``: symmetric matrix from corner payoffs r, s, t, u with the dilemma
    ordering ``s < u < r < t`` (defaults 3, 0, 5, 1).  ``bos``: the
    coordination matrix from alpha > beta > gamma (defaults 2, 1, 0).
    """
    model = model if model is not None else singlet_model()
    key = name.lower()
    if key == "pd":
        r = float(params.pop("r", 3.0))
        s = float(params.pop("s", 0.0))
        t = float(params.pop("t", 5.0))
        u = float(params.pop("u", 1.0))
        if params:
            raise GameError(f"unexpected pd parameters: {sorted(params)}")
        for cond, text in (
            (s < u, f"s < u fails ({s} >= {u})"),
            (u < r, f"u < r fails ({u} >= {r})"),
            (r < t, f"r < t fails ({r} >= {t})"),
        ):
            if not cond:
                raise OrderingViolation(f"pd ordering s<u<r<t violated: {text}")
        matrix = Bimatrix2x2((((r, r), (s, t)), ((t, s), (u, u))))
        return GameSpec(matrix, g, model, "pd")
    if key == "bos":
        alpha = float(params.pop("alpha", 2.0))
        beta = float(params.pop("beta", 1.0))
        gamma = float(params.pop("gamma", 0.0))
        if params:
            raise GameError(f"unexpected bos parameters: {sorted(params)}")
        for cond, text in (
            (alpha > beta, f"alpha > beta fails ({alpha} <= {beta})"),
            (beta > gamma, f"beta > gamma fails ({beta} <= {gamma})"),
        ):
            if not cond:
                raise OrderingViolation(f"bos ordering alpha>beta>gamma violated: {text}")
        matrix = Bimatrix2x2(
            (((alpha, beta), (gamma, gamma)), ((gamma, gamma), (beta, alpha)))
        )
        return GameSpec(matrix, g, model, "bos")
    raise GameError(f"unknown preset {name!r}; known: pd, bos")
