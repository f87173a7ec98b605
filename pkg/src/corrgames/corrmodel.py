"""Correlation kernels and outcome samplers for the shared input-pair families.

Three named families are supported.  ``classical`` pairs carry perfectly
anti-correlated angular momenta, giving the linear kernel ``-1 + 2*theta/pi``
for axes separated by ``theta``.  ``singlet`` pairs are maximally entangled
spin pairs with kernel ``-cos(theta)``.  ``mixture`` is an isotropic blend of
anti-correlated product states whose correlations are weakened by a factor of
three: ``-cos(theta) / 3``.  A ``custom`` family wraps any user kernel.

Samplers realize a kernel value ``c`` as +/-1 outcome pairs with the unique
unbiased joint law ``P(a, b) = (1 + a*b*c) / 4``, so the empirical product
mean converges to the kernel.  A hidden-shared-vector sampler reproduces the
classical family mechanically for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "ModelError",
    "OutcomePair",
    "CorrelationModel",
    "classical_model",
    "singlet_model",
    "mixture_model",
    "custom_model",
    "model_from_name",
    "kernel",
    "effective_angle",
    "effective_angle_inverse_for",
    "sample_pair",
    "sample_pairs",
    "hidden_variable_sample",
    "hidden_variable_samples",
    "axis_angle",
]

PI = math.pi
_EPS = 1e-12

MODEL_NAMES = ("classical", "singlet", "mixture")


class ModelError(ValueError):
    """Invalid model construction or kernel output."""


@dataclass(frozen=True)
class OutcomePair:
    """A pair of dichotomic measurement results, each -1 or +1."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a not in (-1, 1) or self.b not in (-1, 1):
            raise ModelError(f"outcomes must be +/-1, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class CorrelationModel:
    """An input-pair family identified by its correlation kernel."""

    kind: str
    custom_kernel: Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in MODEL_NAMES + ("custom",):
            raise ModelError(f"unknown model kind {self.kind!r}")
        if self.kind == "custom" and self.custom_kernel is None:
            raise ModelError("custom model needs a kernel callable")

    def describe(self) -> str:
        return self.kind


def classical_model() -> CorrelationModel:
    return CorrelationModel("classical")


def singlet_model() -> CorrelationModel:
    return CorrelationModel("singlet")


def mixture_model() -> CorrelationModel:
    return CorrelationModel("mixture")


def custom_model(fn: Callable[[float], float]) -> CorrelationModel:
    return CorrelationModel("custom", fn)


def model_from_name(name: str) -> CorrelationModel:
    if name not in MODEL_NAMES:
        raise ModelError(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")
    return CorrelationModel(name)


def kernel(model: CorrelationModel, theta: float) -> float:
    """Expected outcome product for axes separated by ``theta``."""
    t = float(theta)
    if not (0.0 - _EPS <= t <= PI + _EPS):
        raise ModelError(f"theta must lie in [0, pi], got {theta}")
    t = min(max(t, 0.0), PI)
    if model.kind == "classical":
        return -1.0 + 2.0 * t / PI
    if model.kind == "singlet":
        return -math.cos(t)
    if model.kind == "mixture":
        return -math.cos(t) / 3.0
    value = float(model.custom_kernel(t))  # type: ignore[misc]
    if not (-1.0 - _EPS <= value <= 1.0 + _EPS):
        raise ModelError(f"custom kernel returned {value} outside [-1, 1]")
    return min(max(value, -1.0), 1.0)


def effective_angle(model: CorrelationModel, theta: float) -> float:
    """Angle whose classical correlation equals this model's correlation.

    ``pi * (1 + kernel(theta)) / 2``; the identity map for the classical
    family.  Link functions applied to a measured correlation see exactly
    this angle.
    """
    return 0.5 * PI * (1.0 + kernel(model, theta))


def effective_angle_inverse_for(model: CorrelationModel, u: float) -> float | None:
    """Direction whose effective angle is ``u``, or ``None`` when out of reach.

    The effective angle is strictly increasing in ``theta`` for the three
    named families, so the inverse is unique whenever it exists.
    """
    v = float(u)
    if not (0.0 - _EPS <= v <= PI + _EPS):
        return None
    v = min(max(v, 0.0), PI)
    x = 1.0 - 2.0 * v / PI  # target kernel value, negated sign convention below
    if model.kind == "classical":
        return v
    if model.kind == "singlet":
        return math.acos(min(max(x, -1.0), 1.0))
    if model.kind == "mixture":
        scaled = 3.0 * x
        if scaled < -1.0 - 1e-9 or scaled > 1.0 + 1e-9:
            return None
        return math.acos(min(max(scaled, -1.0), 1.0))
    raise ModelError("custom models have no closed-form effective-angle inverse")


def sample_pairs(
    model: CorrelationModel, theta: float, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` outcome pairs with product mean ``kernel(model, theta)``.

    The product sign and the common sign use separate uniforms, so both
    marginals are exactly unbiased whatever the kernel value.
    """
    c = kernel(model, theta)
    u_prod = rng.random(n)
    u_sign = rng.random(n)
    s = np.where(u_prod < 0.5 * (1.0 + c), 1, -1).astype(np.int8)
    a = np.where(u_sign < 0.5, 1, -1).astype(np.int8)
    return a, (s * a).astype(np.int8)


def sample_pair(
    model: CorrelationModel, theta: float, rng: np.random.Generator
) -> OutcomePair:
    a, b = sample_pairs(model, theta, 1, rng)
    return OutcomePair(int(a[0]), int(b[0]))


def hidden_variable_samples(
    theta: float, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Mechanical anti-correlated pairs: a shared random vector decides both.

    One half carries +J, the other -J; each side reports the sign of J along
    its axis, the axes separated by ``theta``.  The resulting correlation is
    the classical kernel ``-1 + 2*theta/pi``.
    """
    t = float(theta)
    if not (0.0 - _EPS <= t <= PI + _EPS):
        raise ModelError(f"theta must lie in [0, pi], got {theta}")
    e1 = np.array([0.0, 0.0, 1.0])
    e2 = np.array([math.sin(t), 0.0, math.cos(t)])
    a = np.empty(n, dtype=np.int8)
    b = np.empty(n, dtype=np.int8)
    todo = np.arange(n)
    while todo.size:
        j = rng.normal(size=(todo.size, 3))
        d1 = j @ e1
        d2 = -(j @ e2)
        ok = (d1 != 0.0) & (d2 != 0.0)
        idx = todo[ok]
        a[idx] = np.where(d1[ok] > 0, 1, -1)
        b[idx] = np.where(d2[ok] > 0, 1, -1)
        todo = todo[~ok]
    return a, b


def hidden_variable_sample(theta: float, rng: np.random.Generator) -> OutcomePair:
    a, b = hidden_variable_samples(theta, 1, rng)
    return OutcomePair(int(a[0]), int(b[0]))


def axis_angle(
    alice_axis: str, bob_axis: str, theta_a: float, theta_b: float
) -> float:
    """Angle between the two measured axes for one run.

    Alice measures along the shared z-axis (``"Z"``) or her direction ``"A"``
    at ``theta_a`` in the xz-plane; Bob along ``"Z"`` or ``"B"`` at
    ``theta_b`` in the yz-plane.  The planes are orthogonal, so the mixed
    choice gives ``arccos(cos theta_a * cos theta_b)``.
    """
    if alice_axis not in ("Z", "A") or bob_axis not in ("Z", "B"):
        raise ModelError(f"bad axis selection ({alice_axis!r}, {bob_axis!r})")
    if alice_axis == "Z" and bob_axis == "Z":
        return 0.0
    if alice_axis == "A" and bob_axis == "Z":
        return float(theta_a)
    if alice_axis == "Z" and bob_axis == "B":
        return float(theta_b)
    dot = math.cos(theta_a) * math.cos(theta_b)
    return math.acos(min(max(dot, -1.0), 1.0))
