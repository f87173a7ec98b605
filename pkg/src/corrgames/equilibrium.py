"""Nash analysis of correlation games, analytic and by independent grid oracle.

The classical game is the bilinear 2x2 game over announced probabilities.
With singlet or mixture input pairs the payoff sees each player's *effective*
probability instead: the link function applied to the measured correlation of
that player's direction.  Equilibria are therefore found in effective space
(over the attained range of effective values), then mapped back to every
strategic realization: the announced probability and direction that produce
them.  A non-invertible link can realize one effective equilibrium through
several directions, and a jump in the link can make an equilibrium value
reachable only in the limit of feasible play; both show up as distinct,
flagged records.

Every analytic record is re-checked by unilateral-deviation scans, and a
best-response grid oracle provides discovery that is independent of the
transform algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .corrmodel import (
    CorrelationModel,
    effective_angle,
    effective_angle_inverse_for,
    singlet_model,
)
from .game import Bimatrix2x2, expected_payoff_classical
from .gfn import (
    GFunction,
    GfnError,
    NonInvertibleError,
    eval_g,
    preimage_g,
    side_limits,
    snap_to_breakpoints,
)

__all__ = [
    "Profile",
    "Equilibrium",
    "EquilibriumReport",
    "OracleCluster",
    "DiscrepancyError",
    "classical_equilibria",
    "quantum_equilibria",
    "verify_equilibrium",
    "best_response_oracle",
    "effective_value",
]

PI = math.pi
_EPS = 1e-12

REGIME_BY_MODEL = {"classical": "classical", "singlet": "quantum", "mixture": "mixture"}


class DiscrepancyError(RuntimeError):
    """Analytic equilibria and the grid oracle disagree beyond tolerance."""


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    p_a: float
    p_b: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.p_a, self.p_b)


@dataclass(frozen=True)
class Realization:
    """How one effective-space coordinate is realized strategically."""

    p: float
    theta: float
    side: int = 0  # -1 approach from below, +1 from above, 0 exact
    limit_only: bool = False


@dataclass(frozen=True)
class Equilibrium:
    profile: Profile
    kind: str  # "pure" | "mixed"
    payoffs: tuple[float, float]
    provenance: str  # "analytic" | "oracle"
    limit_only: bool = False
    weak: bool = False
    verified: bool = False
    max_gain: float = float("nan")
    source_classical: tuple[float, float] | None = None
    shift: float | None = None
    realization: dict | None = None  # angles/sides/effective values, when known
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "profile": [self.profile.p_a, self.profile.p_b],
            "kind": self.kind,
            "payoffs": list(self.payoffs),
            "provenance": self.provenance,
            "limit_only": self.limit_only,
            "weak": self.weak,
            "verified": self.verified,
            "max_gain": self.max_gain,
            "source_classical": (
                list(self.source_classical) if self.source_classical else None
            ),
            "shift": self.shift,
            "realization": self.realization,
            "notes": list(self.notes),
        }

    @staticmethod
    def from_dict(d: dict) -> "Equilibrium":
        return Equilibrium(
            profile=Profile(*d["profile"]),
            kind=d["kind"],
            payoffs=tuple(d["payoffs"]),
            provenance=d["provenance"],
            limit_only=d["limit_only"],
            weak=d["weak"],
            verified=d["verified"],
            max_gain=d["max_gain"],
            source_classical=(
                tuple(d["source_classical"]) if d["source_classical"] else None
            ),
            shift=d["shift"],
            realization=d["realization"],
            notes=tuple(d["notes"]),
        )


@dataclass(frozen=True)
class OracleCluster:
    """A merged patch of grid-Nash points from the best-response scan."""

    centroid: tuple[float, float]
    representative: tuple[float, float]
    radius: float
    size: int
    max_gain: float
    space: str  # "probability" | "angle"
    profile: tuple[float, float]  # announced probabilities at the representative

    def to_dict(self) -> dict:
        return {
            "centroid": list(self.centroid),
            "representative": list(self.representative),
            "radius": self.radius,
            "size": self.size,
            "max_gain": self.max_gain,
            "space": self.space,
            "profile": list(self.profile),
        }

    @staticmethod
    def from_dict(d: dict) -> "OracleCluster":
        return OracleCluster(
            centroid=tuple(d["centroid"]),
            representative=tuple(d["representative"]),
            radius=d["radius"],
            size=d["size"],
            max_gain=d["max_gain"],
            space=d["space"],
            profile=tuple(d["profile"]),
        )


@dataclass(frozen=True)
class EquilibriumReport:
    regime: str
    equilibria: tuple[Equilibrium, ...]
    bifurcated: bool = False
    degenerate: bool = False
    missing: tuple[str, ...] = ()
    notes: tuple[dict, ...] = ()
    oracle_clusters: tuple[OracleCluster, ...] = ()
    grid_step: float = float("nan")
    tol: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "equilibria": [e.to_dict() for e in self.equilibria],
            "bifurcated": self.bifurcated,
            "degenerate": self.degenerate,
            "missing": list(self.missing),
            "notes": list(self.notes),
            "oracle_clusters": [c.to_dict() for c in self.oracle_clusters],
            "grid_step": self.grid_step,
            "tol": self.tol,
        }

    @staticmethod
    def from_dict(d: dict) -> "EquilibriumReport":
        return EquilibriumReport(
            regime=d["regime"],
            equilibria=tuple(Equilibrium.from_dict(e) for e in d["equilibria"]),
            bifurcated=d["bifurcated"],
            degenerate=d["degenerate"],
            missing=tuple(d["missing"]),
            notes=tuple(d["notes"]),
            oracle_clusters=tuple(
                OracleCluster.from_dict(c) for c in d["oracle_clusters"]
            ),
            grid_step=d["grid_step"],
            tol=d["tol"],
        )


# ---------------------------------------------------------------------------
# Effective values
# ---------------------------------------------------------------------------

def effective_value_angle(g: GFunction, model: CorrelationModel, theta: float) -> float:
    """Effective probability of direction ``theta`` under the model's kernel."""
    return eval_g(g, snap_to_breakpoints(g, effective_angle(model, theta)))


def effective_value(g: GFunction, model: CorrelationModel, p: float) -> float:
    """Effective probability of announced probability ``p``.

    The angle behind ``p`` is recovered through the link's preimage (a
    one-sided-limit preimage counts) and pushed through the model's kernel.
    Raises when several angles announce ``p`` with differing effective
    values; direction-first evaluation is then the only faithful route.
    """
    pts = preimage_g(g, p)
    if not pts:
        raise GfnError(f"{g.name} never reaches p={p}")
    values = [effective_value_angle(g, model, pt.theta) for pt in pts]
    if max(values) - min(values) > 1e-9:
        raise NonInvertibleError(
            f"p={p} has several directions with differing effective values"
        )
    return values[0]


def _effective_side_value(
    g: GFunction, model: CorrelationModel, theta: float, side: int
) -> float:
    """One-sided limit of the effective probability near ``theta``."""
    if side == 0:
        return effective_value_angle(g, model, theta)
    u = effective_angle(model, theta)
    for b in [s.hi for s in g.segments[:-1]]:
        if abs(u - b) <= 1e-9:
            left, right = side_limits(g, b)
            if side < 0 and left is not None:
                return left
            if side > 0 and right is not None:
                return right
    return eval_g(g, snap_to_breakpoints(g, min(max(u, 0.0), PI)))


# ---------------------------------------------------------------------------
# Derivative coefficients and the effective-range solver
# ---------------------------------------------------------------------------

def _deriv_coeffs(m: Bimatrix2x2) -> tuple[float, float, float, float]:
    """Slopes of each player's payoff in their own effective probability.

    ``dPA/dqA = den_a * qB + con_a`` and ``dPB/dqB = den_b * qA + con_b``.
    """
    (a_ii, b_ii), (a_is, b_is) = m.entries[0]
    (a_si, b_si), (a_ss, b_ss) = m.entries[1]
    den_a = a_ii - a_is - a_si + a_ss
    con_a = a_is - a_ss
    den_b = b_ii - b_is - b_si + b_ss
    con_b = b_si - b_ss
    return den_a, con_a, den_b, con_b


@dataclass(frozen=True)
class _Interval:
    lo: float
    hi: float
    lo_att: bool
    hi_att: bool


def _attained_intervals(
    g: GFunction, u_lo: float, u_hi: float
) -> tuple[_Interval, ...]:
    """Value intervals of the link restricted to effective angles [u_lo, u_hi]."""
    out: list[_Interval] = []
    for s in g.segments:
        a, b = max(s.lo, u_lo), min(s.hi, u_hi)
        if b < a - _EPS:
            continue
        va, vb = s.value(a), s.value(b)
        a_att = s.contains(a)
        b_att = s.contains(b)
        if abs(b - a) <= _EPS:
            if a_att or b_att:
                v = s.value(0.5 * (a + b))
                out.append(_Interval(v, v, True, True))
            continue
        if va <= vb:
            out.append(_Interval(va, vb, a_att, b_att))
        else:
            out.append(_Interval(vb, va, b_att, a_att))
    return tuple(out)


def _range_bounds(intervals: Sequence[_Interval]) -> tuple[float, bool, float, bool]:
    inf = min(i.lo for i in intervals)
    sup = max(i.hi for i in intervals)
    inf_att = any(abs(i.lo - inf) <= _EPS and i.lo_att for i in intervals) or any(
        i.lo < inf - _EPS for i in intervals
    )
    sup_att = any(abs(i.hi - sup) <= _EPS and i.hi_att for i in intervals)
    return inf, inf_att, sup, sup_att


def _value_attained(intervals: Sequence[_Interval], q: float) -> bool:
    for i in intervals:
        if i.lo + _EPS < q < i.hi - _EPS:
            return True
        if abs(q - i.lo) <= _EPS and i.lo_att:
            return True
        if abs(q - i.hi) <= _EPS and i.hi_att:
            return True
    return False


@dataclass(frozen=True)
class _EffectiveEq:
    q_a: float
    q_b: float
    a_limit: bool
    b_limit: bool
    weak: bool


def _effective_equilibria(
    m: Bimatrix2x2,
    intervals: Sequence[_Interval],
    tol: float,
) -> tuple[list[_EffectiveEq], bool, list[str]]:
    """Nash profiles of the bilinear game over the attained effective range.

    Candidates are range extremes (flagged when only approachable) and the
    two indifference roots; a candidate survives when each coordinate is a
    best response to the other.  Returns (equilibria, degenerate, notes).
    """
    den_a, con_a, den_b, con_b = _deriv_coeffs(m)
    inf, inf_att, sup, sup_att = _range_bounds(intervals)
    notes: list[str] = []

    degenerate_a = abs(den_a) <= tol and abs(con_a) <= tol
    degenerate_b = abs(den_b) <= tol and abs(con_b) <= tol
    degenerate = degenerate_a or degenerate_b
    if degenerate_a:
        notes.append("degenerate game: the first player is indifferent everywhere")
    if degenerate_b:
        notes.append("degenerate game: the second player is indifferent everywhere")

    cand_a: list[tuple[float, bool]] = [(inf, not inf_att), (sup, not sup_att)]
    cand_b: list[tuple[float, bool]] = [(inf, not inf_att), (sup, not sup_att)]
    if abs(den_b) > tol:
        root_a = -con_b / den_b  # Bob indifferent at this q_a
        if inf - tol <= root_a <= sup + tol:
            root_a = min(max(root_a, inf), sup)
            if _value_attained(intervals, root_a):
                cand_a.append((root_a, False))
            else:
                notes.append(
                    f"indifference value q_a={root_a:.6g} is not an attained effective value"
                )
    if abs(den_a) > tol:
        root_b = -con_a / den_a  # Alice indifferent at this q_b
        if inf - tol <= root_b <= sup + tol:
            root_b = min(max(root_b, inf), sup)
            if _value_attained(intervals, root_b):
                cand_b.append((root_b, False))
            else:
                notes.append(
                    f"indifference value q_b={root_b:.6g} is not an attained effective value"
                )

    def best_response_ok(phi: float, q: float) -> tuple[bool, bool]:
        """(is best response, is tied) for slope ``phi`` at own value ``q``."""
        if phi > tol:
            return abs(q - sup) <= tol, False
        if phi < -tol:
            return abs(q - inf) <= tol, False
        return True, True

    found: dict[tuple[float, float], _EffectiveEq] = {}
    for q_a, a_lim in cand_a:
        for q_b, b_lim in cand_b:
            phi_a = den_a * q_b + con_a
            phi_b = den_b * q_a + con_b
            ok_a, tie_a = best_response_ok(phi_a, q_a)
            ok_b, tie_b = best_response_ok(phi_b, q_b)
            if not (ok_a and ok_b):
                continue
            corner_a = abs(q_a - inf) <= tol or abs(q_a - sup) <= tol
            corner_b = abs(q_b - inf) <= tol or abs(q_b - sup) <= tol
            weak = (tie_a and corner_a) or (tie_b and corner_b)
            key = (round(q_a, 12), round(q_b, 12))
            if key not in found:
                found[key] = _EffectiveEq(q_a, q_b, a_lim, b_lim, weak)
    out = sorted(found.values(), key=lambda e: (e.q_a, e.q_b))
    return out, degenerate, notes


# ---------------------------------------------------------------------------
# Realizations
# ---------------------------------------------------------------------------

def _realizations(
    g: GFunction,
    model: CorrelationModel,
    q: float,
    attained: bool,
    u_lo: float,
    u_hi: float,
) -> list[Realization]:
    """Strategic realizations (announced p, direction) of effective value ``q``."""
    out: list[Realization] = []
    for upt in preimage_g(g, q):
        u = upt.theta
        if u < u_lo - 1e-9 or u > u_hi + 1e-9:
            continue
        theta = effective_angle_inverse_for(model, min(max(u, u_lo), u_hi))
        if theta is None:
            continue
        if not upt.limit_only:
            p_at = eval_g(g, theta)
            out.append(Realization(p_at, theta, 0, False))
            left, right = side_limits(g, theta)
            if left is not None and abs(left - p_at) > _EPS and theta > _EPS:
                out.append(Realization(left, theta, -1, True))
            if right is not None and abs(right - p_at) > _EPS and theta < PI - _EPS:
                out.append(Realization(right, theta, +1, True))
        elif not attained:
            # The effective value is only approachable near this direction.
            if upt.side > 0 and (u >= u_hi - 1e-9 or theta >= PI - _EPS):
                continue
            if upt.side < 0 and (u <= u_lo + 1e-9 or theta <= _EPS):
                continue
            limit_left, limit_right = side_limits(g, theta)
            p_lim = limit_right if upt.side > 0 else limit_left
            if p_lim is None:
                p_lim = eval_g(g, theta)
            out.append(Realization(p_lim, theta, upt.side, True))
    unique: dict[tuple[float, float, int], Realization] = {}
    for r in out:
        unique.setdefault((round(r.p, 12), round(r.theta, 12), r.side), r)
    return sorted(unique.values(), key=lambda r: (r.p, r.theta, r.side))


# ---------------------------------------------------------------------------
# Verification and the grid oracle
# ---------------------------------------------------------------------------

def verify_equilibrium(
    payoff: Callable[[float, float], tuple[float, float]],
    profile: tuple[float, float],
    grid_step: float = 1e-3,
    tol: float = 1e-9,
    box: tuple[float, float] = (0.0, 1.0),
) -> tuple[bool, float]:
    """Scan unilateral deviations of both players on a grid plus endpoints.

    Returns ``(no deviation gains more than tol, largest gain seen)``.
    """
    if not (0.0 < grid_step <= 0.1):
        raise ValueError("grid_step must lie in (0, 0.1]")
    lo, hi = box
    x0, y0 = profile
    n = max(int(round((hi - lo) / grid_step)), 1)
    points = [lo + (hi - lo) * k / n for k in range(n + 1)]
    base_a, base_b = payoff(x0, y0)
    max_gain = -math.inf
    for x in points + [lo, hi, x0]:
        max_gain = max(max_gain, payoff(x, y0)[0] - base_a)
    for y in points + [lo, hi, y0]:
        max_gain = max(max_gain, payoff(x0, y)[1] - base_b)
    return max_gain <= tol, max_gain


def _payoff_matrices(
    m: Bimatrix2x2, qa: np.ndarray, qb: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    (a_ii, b_ii), (a_is, b_is) = m.entries[0]
    (a_si, b_si), (a_ss, b_ss) = m.entries[1]
    pa, pb = qa[:, None], qb[None, :]
    w_ii = pa * pb
    w_is = pa * (1.0 - pb)
    w_si = (1.0 - pa) * pb
    w_ss = (1.0 - pa) * (1.0 - pb)
    pay_a = a_ii * w_ii + a_is * w_is + a_si * w_si + a_ss * w_ss
    pay_b = b_ii * w_ii + b_is * w_is + b_si * w_si + b_ss * w_ss
    return pay_a, pay_b


def _grid_nash_clusters(
    pay_a: np.ndarray,
    pay_b: np.ndarray,
    axis_x: np.ndarray,
    axis_y: np.ndarray,
    improve_tol: float | None,
    space: str,
    profile_of: Callable[[float, float], tuple[float, float]],
) -> list[OracleCluster]:
    col_best = pay_a.max(axis=0)
    row_best = pay_b.max(axis=1)
    gain = np.maximum(col_best[None, :] - pay_a, row_best[:, None] - pay_b)
    if improve_tol is None:
        # Natural payoff resolution of the grid: the largest payoff change
        # between neighbouring cells.  Indifference-supported equilibria are
        # never exact grid-Nash points, so an absolute threshold would lose
        # them.
        steps = []
        if pay_a.shape[0] > 1:
            steps.append(np.abs(np.diff(pay_a, axis=0)).max())
            steps.append(np.abs(np.diff(pay_b, axis=0)).max())
        if pay_a.shape[1] > 1:
            steps.append(np.abs(np.diff(pay_a, axis=1)).max())
            steps.append(np.abs(np.diff(pay_b, axis=1)).max())
        improve_tol = max(max(steps) if steps else 0.0, 1e-9)
    mask = gain <= improve_tol
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    clusters: list[OracleCluster] = []
    for lbl in range(1, count + 1):
        ii, jj = np.nonzero(labels == lbl)
        xs, ys = axis_x[ii], axis_y[jj]
        cx, cy = float(xs.mean()), float(ys.mean())
        radius = float(np.hypot(xs - cx, ys - cy).max())
        member_gains = gain[ii, jj]
        k = int(member_gains.argmin())
        rep = (float(xs[k]), float(ys[k]))
        clusters.append(
            OracleCluster(
                centroid=(cx, cy),
                representative=rep,
                radius=radius,
                size=int(ii.size),
                max_gain=float(member_gains[k]),
                space=space,
                profile=profile_of(*rep),
            )
        )
    clusters.sort(key=lambda c: c.centroid)
    return clusters


def best_response_oracle(
    payoff: Callable[[float, float], tuple[float, float]],
    grid_step: float = 1e-3,
    box: tuple[float, float] = (0.0, 1.0),
    improve_tol: float | None = None,
) -> list[OracleCluster]:
    """Independent equilibrium discovery by exhaustive grid best-response scan.

    Every grid profile none of whose unilateral grid deviations improves the
    deviator by more than the improvement threshold is kept; adjacent
    survivors merge into clusters reported with centroid and radius.  The
    default threshold adapts to the payoff resolution of the grid so that
    indifference-supported (mixed) equilibria are retained.
    """
    if not (0.0 < grid_step <= 0.05):
        raise ValueError("grid_step must lie in (0, 0.05]")
    lo, hi = box
    n = max(int(round((hi - lo) / grid_step)), 1)
    axis = np.linspace(lo, hi, n + 1)
    pay = [payoff(float(x), float(y)) for x in axis for y in axis]
    arr = np.array(pay, dtype=float).reshape(len(axis), len(axis), 2)
    return _grid_nash_clusters(
        arr[:, :, 0],
        arr[:, :, 1],
        axis,
        axis,
        improve_tol,
        "probability",
        lambda x, y: (x, y),
    )


def _oracle_probability(
    m: Bimatrix2x2,
    q_of_p: Callable[[np.ndarray], np.ndarray],
    grid_step: float,
    improve_tol: float | None = None,
) -> list[OracleCluster]:
    n = max(int(round(1.0 / grid_step)), 1)
    axis = np.linspace(0.0, 1.0, n + 1)
    q = q_of_p(axis)
    pay_a, pay_b = _payoff_matrices(m, q, q)
    return _grid_nash_clusters(
        pay_a, pay_b, axis, axis, improve_tol, "probability", lambda x, y: (x, y)
    )


def _oracle_angle(
    m: Bimatrix2x2,
    g: GFunction,
    model: CorrelationModel,
    grid_step: float,
    improve_tol: float | None = None,
) -> list[OracleCluster]:
    n = max(int(round(1.0 / grid_step)), 1)
    base = np.linspace(0.0, PI, n + 1)
    special: list[float] = []
    for b in [s.hi for s in g.segments[:-1]]:
        special.append(b)
        inv = effective_angle_inverse_for(model, b)
        if inv is not None:
            special.append(inv)
    axis = np.unique(np.concatenate([base, np.array(special)])) if special else base
    q = np.array([effective_value_angle(g, model, float(t)) for t in axis])
    pay_a, pay_b = _payoff_matrices(m, q, q)

    def profile_of(ta: float, tb: float) -> tuple[float, float]:
        return (eval_g(g, ta), eval_g(g, tb))

    return _grid_nash_clusters(
        pay_a, pay_b, axis, axis, improve_tol, "angle", profile_of
    )


# ---------------------------------------------------------------------------
# Classical analysis
# ---------------------------------------------------------------------------

_FULL_RANGE = (_Interval(0.0, 1.0, True, True),)


def classical_equilibria(
    m: Bimatrix2x2,
    tol: float = 1e-9,
    grid_step: float = 1e-3,
    run_oracle: bool = True,
) -> EquilibriumReport:
    """Nash equilibria of the bilinear game over announced probabilities.

    The four pure profiles are kept when no unilateral switch gains (ties
    flagged weak); the interior mixed profile comes from the two indifference
    conditions when both land strictly inside (0, 1).  A player indifferent
    everywhere marks the game degenerate.
    """
    effs, degenerate, notes = _effective_equilibria(m, _FULL_RANGE, tol)

    def pay(pa: float, pb: float) -> tuple[float, float]:
        return expected_payoff_classical(m, pa, pb)

    records: list[Equilibrium] = []
    for e in effs:
        ok, gain = verify_equilibrium(pay, (e.q_a, e.q_b), grid_step, tol)
        kind = "pure" if _is_corner(e.q_a) and _is_corner(e.q_b) else "mixed"
        records.append(
            Equilibrium(
                profile=Profile(e.q_a, e.q_b),
                kind=kind,
                payoffs=pay(e.q_a, e.q_b),
                provenance="analytic",
                weak=e.weak,
                verified=ok,
                max_gain=gain,
            )
        )
    clusters: tuple[OracleCluster, ...] = ()
    note_dicts = [{"kind": "solver", "text": t} for t in notes]
    if run_oracle:
        oc = _oracle_probability(m, lambda p: p, grid_step)
        clusters = tuple(oc)
        records, extra_notes = _match_oracle(
            records, oc, grid_step, lambda pa, pb: pay(pa, pb), None
        )
        note_dicts.extend(extra_notes)
    records.sort(key=_record_key)
    return EquilibriumReport(
        regime="classical",
        equilibria=tuple(records),
        bifurcated=False,
        degenerate=degenerate,
        notes=tuple(note_dicts),
        oracle_clusters=clusters,
        grid_step=grid_step,
        tol=tol,
    )


def _is_corner(q: float) -> bool:
    return abs(q) <= 1e-9 or abs(q - 1.0) <= 1e-9


def _record_key(e: Equilibrium):
    r = e.realization or {}
    return (
        round(e.profile.p_a, 12),
        round(e.profile.p_b, 12),
        r.get("theta_a", -1.0),
        r.get("theta_b", -1.0),
        e.limit_only,
    )


# ---------------------------------------------------------------------------
# Transformed-regime analysis
# ---------------------------------------------------------------------------

def quantum_equilibria(
    m: Bimatrix2x2,
    g: GFunction,
    model: CorrelationModel | None = None,
    tol: float = 1e-9,
    grid_step: float = 1e-3,
    run_oracle: bool = True,
) -> EquilibriumReport:
    """Equilibria of the correlation game with transformed input statistics.

    Effective-space equilibria are solved over the attained range of the
    link-through-kernel composition, mapped to every strategic realization,
    deviation-checked, and cross-matched against an independent direction-grid
    oracle.  Records whose coordinates are only approachable in the limit of
    feasible play carry ``limit_only``; their verification uses the values the
    link attains at the limiting directions, while their payoffs are the
    values approached along feasible play (the two differ exactly when the
    link jumps there, and a note records the gap).
    """
    model = model if model is not None else singlet_model()
    regime = REGIME_BY_MODEL.get(model.kind, model.kind)
    u_lo = effective_angle(model, 0.0)
    u_hi = effective_angle(model, PI)
    intervals = _attained_intervals(g, u_lo, u_hi)
    effs, degenerate, solver_notes = _effective_equilibria(m, intervals, tol)
    note_dicts: list[dict] = [{"kind": "solver", "text": t} for t in solver_notes]

    classical = _effective_equilibria(m, _FULL_RANGE, tol)[0]
    classical_keys = {(round(e.q_a, 9), round(e.q_b, 9)) for e in classical}
    missing: list[str] = []
    for ce in classical:
        if not _value_attained(intervals, ce.q_a) or not _value_attained(
            intervals, ce.q_b
        ):
            covered = any(
                abs(e.q_a - ce.q_a) <= 1e-9 and abs(e.q_b - ce.q_b) <= 1e-9
                for e in effs
            )
            if not covered:
                missing.append(
                    f"classical equilibrium ({ce.q_a:.6g}, {ce.q_b:.6g}) has no "
                    f"effective-value preimage under this model"
                )

    records: list[Equilibrium] = []
    source_counts: dict[tuple[float, float], int] = {}
    for e in effs:
        reals_a = _realizations(g, model, e.q_a, not e.a_limit, u_lo, u_hi)
        reals_b = _realizations(g, model, e.q_b, not e.b_limit, u_lo, u_hi)
        if not reals_a or not reals_b:
            missing.append(
                f"effective equilibrium ({e.q_a:.6g}, {e.q_b:.6g}) has no strategic realization"
            )
            continue
        source = (e.q_a, e.q_b)
        from_classical = (round(e.q_a, 9), round(e.q_b, 9)) in classical_keys
        for ra in reals_a:
            for rb in reals_b:
                rec = _build_record(m, g, model, e, ra, rb, grid_step, tol)
                if not from_classical:
                    rec = Equilibrium(
                        **{
                            **rec.__dict__,
                            "notes": rec.notes
                            + (
                                "source is a boundary equilibrium of the attained "
                                "effective range, not a classical equilibrium",
                            ),
                        }
                    )
                records.append(rec)
                source_counts[source] = source_counts.get(source, 0) + 1

    clusters: tuple[OracleCluster, ...] = ()
    if run_oracle:
        oc = _oracle_angle(m, g, model, grid_step)
        clusters = tuple(oc)

        def pay_angle(ta: float, tb: float) -> tuple[float, float]:
            return expected_payoff_classical(
                m,
                effective_value_angle(g, model, ta),
                effective_value_angle(g, model, tb),
            )

        records, extra = _match_oracle(
            records, oc, grid_step, None, pay_angle
        )
        note_dicts.extend(extra)

    if g.name == "g1":
        note_dicts.extend(_linear_link_formula_notes(m, records, classical, tol))

    bifurcated = any(count > 1 for count in source_counts.values())
    records.sort(key=_record_key)
    return EquilibriumReport(
        regime=regime,
        equilibria=tuple(records),
        bifurcated=bifurcated,
        degenerate=degenerate,
        missing=tuple(missing),
        notes=tuple(note_dicts),
        oracle_clusters=clusters,
        grid_step=grid_step,
        tol=tol,
    )


def _build_record(
    m: Bimatrix2x2,
    g: GFunction,
    model: CorrelationModel,
    e: _EffectiveEq,
    ra: Realization,
    rb: Realization,
    grid_step: float,
    tol: float,
) -> Equilibrium:
    profile = Profile(ra.p, rb.p)
    limit_only = ra.limit_only or rb.limit_only
    q_at = (
        effective_value_angle(g, model, ra.theta),
        effective_value_angle(g, model, rb.theta),
    )
    q_approach = (
        _effective_side_value(g, model, ra.theta, ra.side),
        _effective_side_value(g, model, rb.theta, rb.side),
    )
    payoffs = expected_payoff_classical(m, q_approach[0], q_approach[1])
    notes: list[str] = []
    if limit_only:
        notes.append(
            "profile reached only in the limit of feasible play; payoffs are the approached values"
        )
        if abs(q_approach[0] - q_at[0]) > 1e-9 or abs(q_approach[1] - q_at[1]) > 1e-9:
            notes.append(
                "effective value jumps at the limiting direction: verification uses the "
                f"attained values {tuple(round(v, 6) for v in q_at)}, play approaches "
                f"{tuple(round(v, 6) for v in q_approach)}"
            )

    verified, gain = _verify_record(m, g, model, profile, (ra.theta, rb.theta), grid_step, tol)
    source = (e.q_a, e.q_b)
    shift = math.hypot(profile.p_a - e.q_a, profile.p_b - e.q_b)
    kind = "pure" if _is_corner(profile.p_a) and _is_corner(profile.p_b) else "mixed"
    return Equilibrium(
        profile=profile,
        kind=kind,
        payoffs=payoffs,
        provenance="analytic",
        limit_only=limit_only,
        weak=e.weak,
        verified=verified,
        max_gain=gain,
        source_classical=source,
        shift=shift,
        realization={
            "theta_a": ra.theta,
            "theta_b": rb.theta,
            "side_a": ra.side,
            "side_b": rb.side,
            "effective_at": list(q_at),
            "effective_approach": list(q_approach),
        },
        notes=tuple(notes),
    )


def _verify_record(
    m: Bimatrix2x2,
    g: GFunction,
    model: CorrelationModel,
    profile: Profile,
    thetas: tuple[float, float],
    grid_step: float,
    tol: float,
) -> tuple[bool, float]:
    """Deviation-check a record, preferring the announced-probability space.

    Falls back to direction space when several directions announce the same
    probability with differing effective values.
    """
    try:
        def pay_p(pa: float, pb: float) -> tuple[float, float]:
            return expected_payoff_classical(
                m, effective_value(g, model, pa), effective_value(g, model, pb)
            )

        return verify_equilibrium(pay_p, profile.as_tuple(), grid_step, tol)
    except (NonInvertibleError, GfnError):
        def pay_t(ta: float, tb: float) -> tuple[float, float]:
            return expected_payoff_classical(
                m,
                effective_value_angle(g, model, ta),
                effective_value_angle(g, model, tb),
            )

        return verify_equilibrium(
            pay_t, thetas, grid_step * PI, tol, box=(0.0, PI)
        )


def _match_oracle(
    records: list[Equilibrium],
    clusters: list[OracleCluster],
    grid_step: float,
    pay_probability: Callable[[float, float], tuple[float, float]] | None,
    pay_angle: Callable[[float, float], tuple[float, float]] | None,
) -> tuple[list[Equilibrium], list[dict]]:
    """Cross-match analytic records with oracle clusters; unmatched clusters
    become oracle-provenance records, unmatched analytic records raise a note."""
    notes: list[dict] = []
    p_tol = max(4.0 * grid_step, 5e-3)
    t_tol = max(4.0 * grid_step * PI, 5e-3 * PI)

    def matches(rec: Equilibrium, cl: OracleCluster) -> bool:
        if cl.space == "angle" and rec.realization:
            dt = max(
                abs(rec.realization["theta_a"] - cl.representative[0]),
                abs(rec.realization["theta_b"] - cl.representative[1]),
            )
            if dt <= t_tol + cl.radius:
                return True
        dp = max(
            abs(rec.profile.p_a - cl.profile[0]),
            abs(rec.profile.p_b - cl.profile[1]),
        )
        return dp <= p_tol + cl.radius

    matched_clusters: set[int] = set()
    unmatched_records: list[Equilibrium] = []
    for rec in records:
        hit = False
        for idx, cl in enumerate(clusters):
            if matches(rec, cl):
                matched_clusters.add(idx)
                hit = True
        if not hit:
            unmatched_records.append(rec)

    out = list(records)
    for idx, cl in enumerate(clusters):
        if idx in matched_clusters:
            continue
        pa, pb = cl.profile
        if pay_probability is not None:
            payoffs = pay_probability(pa, pb)
        elif pay_angle is not None:
            payoffs = pay_angle(*cl.representative)
        else:
            payoffs = (float("nan"), float("nan"))
        kind = "pure" if _is_corner(pa) and _is_corner(pb) else "mixed"
        realization = None
        if cl.space == "angle":
            realization = {
                "theta_a": cl.representative[0],
                "theta_b": cl.representative[1],
                "side_a": 0,
                "side_b": 0,
                "effective_at": None,
                "effective_approach": None,
            }
        out.append(
            Equilibrium(
                profile=Profile(pa, pb),
                kind=kind,
                payoffs=payoffs,
                provenance="oracle",
                verified=True,
                max_gain=cl.max_gain,
                realization=realization,
                notes=("discovered by the grid oracle without an analytic counterpart",),
            )
        )
        notes.append(
            {
                "kind": "discrepancy",
                "text": "oracle cluster without analytic counterpart",
                "cluster": cl.to_dict(),
            }
        )
    for rec in unmatched_records:
        notes.append(
            {
                "kind": "discrepancy",
                "text": "analytic equilibrium not recovered by the grid oracle",
                "profile": [rec.profile.p_a, rec.profile.p_b],
            }
        )
    return out, notes


def _linear_link_formula_notes(
    m: Bimatrix2x2,
    records: list[Equilibrium],
    classical: list[_EffectiveEq],
    tol: float,
) -> list[dict]:
    """For the plain rising link, log both published closed forms of the mixed
    equilibrium shift and record which one the verified equilibrium obeys."""
    notes: list[dict] = []
    for ce in classical:
        if _is_corner(ce.q_a) and _is_corner(ce.q_b):
            continue
        general = tuple(math.acos(1.0 - 2.0 * q) / PI for q in (ce.q_a, ce.q_b))
        alternate = tuple(1.0 - math.acos(q) / PI for q in (ce.q_a, ce.q_b))
        verdict = "neither"
        observed = None
        for rec in records:
            if rec.source_classical is None:
                continue
            if (
                abs(rec.source_classical[0] - ce.q_a) <= 1e-9
                and abs(rec.source_classical[1] - ce.q_b) <= 1e-9
                and rec.verified
            ):
                observed = rec.profile.as_tuple()
                break
        if observed is not None:
            if all(abs(o - f) <= 1e-3 for o, f in zip(observed, general)):
                verdict = "general_transform"
            elif all(abs(o - f) <= 1e-3 for o, f in zip(observed, alternate)):
                verdict = "alternate_text_form"
        notes.append(
            {
                "kind": "formula_comparison",
                "classical_mixed": [ce.q_a, ce.q_b],
                "general_transform": list(general),
                "alternate_text_form": list(alternate),
                "observed": list(observed) if observed else None,
                "agrees_with": verdict,
            }
        )
    return notes
