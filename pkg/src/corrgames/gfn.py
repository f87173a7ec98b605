"""Piecewise-linear link functions between measurement angles and move probabilities.

A link function ``g`` maps the angle interval [0, pi] onto move probabilities
in [0, 1].  Players announce ``g`` up front; a strategy is then a single
direction ``theta`` played with identity-move probability ``p = g(theta)``.
This module holds the link functions themselves (segments with explicit
open/closed endpoint flags, so jumps are represented faithfully), their
preimages, and the two derived transforms:

* ``big_G(g, x) = g(pi * (1 + x) / 2)`` converts a measured correlation
  ``x`` in [-1, 1] into a probability, and
* ``q_transform`` / ``q_transform_angle`` give the effective probability a
  strategy acquires when the shared pairs carry singlet statistics.

Everything here is pure and immutable; instances can be shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "GfnError",
    "DomainError",
    "NonInvertibleError",
    "CatalogError",
    "Segment",
    "Traits",
    "GFunction",
    "PreimagePoint",
    "QPreimagePoint",
    "eval_g",
    "preimage_g",
    "side_limits",
    "big_G",
    "q_transform_angle",
    "q_transform",
    "q_preimage",
    "effective_angle_inverse",
    "make_catalog",
    "catalog_names",
    "catalog_info",
    "sample_curve",
]

PI = math.pi

# Matching tolerance for "this float is that breakpoint" questions.  Segment
# boundaries are exact stored floats; solved preimages may be off by a few ulp.
_EPS = 1e-12


class GfnError(Exception):
    """Base error for link-function operations."""


class DomainError(GfnError, ValueError):
    """Argument outside the declared domain."""


class NonInvertibleError(GfnError):
    """Probability-first transform requested for a non-invertible link."""


class CatalogError(GfnError, ValueError):
    """Unknown catalog name or parameter outside its allowed range."""


def _require_angle(theta: float, name: str = "theta") -> float:
    t = float(theta)
    if not math.isfinite(t):
        raise DomainError(f"{name} must be finite, got {theta!r}")
    if t < -_EPS or t > PI + _EPS:
        raise DomainError(f"{name} must lie in [0, pi], got {t}")
    return min(max(t, 0.0), PI)


def _require_prob(p: float, name: str = "p") -> float:
    x = float(p)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {p!r}")
    if x < -_EPS or x > 1.0 + _EPS:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class Segment:
    """One affine piece ``theta -> slope * theta + intercept`` of a link function.

    ``lo``/``hi`` bound the piece; the closed flags say which endpoints belong
    to it.  Values at open endpoints are one-sided limits, not attained.
    """

    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    slope: float
    intercept: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("segment bounds must be finite")
        if self.hi <= self.lo:
            raise DomainError(f"empty segment [{self.lo}, {self.hi}]")
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise DomainError("segment coefficients must be finite")

    def value(self, theta: float) -> float:
        return self.slope * theta + self.intercept

    def contains(self, theta: float) -> bool:
        if theta < self.lo or theta > self.hi:
            return False
        if theta == self.lo and not self.lo_closed:
            return False
        if theta == self.hi and not self.hi_closed:
            return False
        return True

    def value_range(self) -> tuple[float, float]:
        """Min/max of the closure of the image (endpoint values, either order)."""
        a, b = self.value(self.lo), self.value(self.hi)
        return (a, b) if a <= b else (b, a)

    def attained_at(self, bound: str) -> bool:
        return self.lo_closed if bound == "lo" else self.hi_closed


@dataclass(frozen=True)
class Traits:
    """Cached classification of a link function."""

    invertible: bool
    continuous: bool
    discontinuity_points: tuple[float, ...]


def _classify(segments: tuple[Segment, ...]) -> Traits:
    # Continuity: one-sided limits must agree at every internal breakpoint.
    discontinuities: list[float] = []
    for left, right in zip(segments, segments[1:]):
        b = left.hi
        if abs(left.value(b) - right.value(b)) > _EPS:
            discontinuities.append(b)

    # Invertibility: every piece strictly monotone and the interiors of the
    # attained images pairwise disjoint.  Catalog links may share a single
    # boundary value between two pieces (each attains it at one endpoint);
    # those isolated collisions surface through preimage sets instead.
    invertible = all(abs(s.slope) > _EPS for s in segments)
    if invertible:
        interiors = [s.value_range() for s in segments]
        for i in range(len(interiors)):
            for j in range(i + 1, len(interiors)):
                lo = max(interiors[i][0], interiors[j][0])
                hi = min(interiors[i][1], interiors[j][1])
                if lo + _EPS < hi:
                    invertible = False
                    break
            if not invertible:
                break

    return Traits(invertible, not discontinuities, tuple(discontinuities))


@dataclass(frozen=True)
class GFunction:
    """A piecewise-linear map from [0, pi] to [0, 1] with jump bookkeeping.

    Invariants enforced at construction: segments partition [0, pi] exactly
    (adjacent pieces share a breakpoint with exactly one closed side) and all
    segment values, including one-sided limits, stay within [0, 1].
    """

    name: str
    segments: tuple[Segment, ...]
    params: dict[str, float] = field(default_factory=dict)
    traits: Traits = field(init=False)

    def __post_init__(self) -> None:
        segs = tuple(self.segments)
        if not segs:
            raise DomainError("a link function needs at least one segment")
        if abs(segs[0].lo) > _EPS or not segs[0].lo_closed:
            raise DomainError("first segment must start closed at 0")
        if abs(segs[-1].hi - PI) > _EPS or not segs[-1].hi_closed:
            raise DomainError("last segment must end closed at pi")
        for left, right in zip(segs, segs[1:]):
            if abs(left.hi - right.lo) > _EPS:
                raise DomainError(
                    f"gap or overlap between segments at {left.hi} vs {right.lo}"
                )
            if left.hi_closed == right.lo_closed:
                raise DomainError(
                    f"breakpoint {left.hi} must be closed on exactly one side"
                )
        for s in segs:
            vlo, vhi = s.value_range()
            if vlo < -1e-9 or vhi > 1.0 + 1e-9:
                raise DomainError(
                    f"segment image [{vlo}, {vhi}] leaves the probability range"
                )
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "traits", _classify(segs))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "invertible": self.traits.invertible,
            "continuous": self.traits.continuous,
            "discontinuities": list(self.traits.discontinuity_points),
        }


def eval_g(g: GFunction, theta: float) -> float:
    """Value of the link at ``theta``; at a jump the closed side decides."""
    t = _require_angle(theta)
    for s in g.segments:
        if s.contains(t):
            return _require_prob(s.value(t), "g(theta)")
    # Float dust exactly on an open boundary shared with no closed twin can
    # only happen for malformed inputs; nudge onto the nearest piece.
    for s in g.segments:
        if s.lo - _EPS <= t <= s.hi + _EPS:
            return _require_prob(s.value(min(max(t, s.lo), s.hi)), "g(theta)")
    raise DomainError(f"no segment covers theta={t}")


def side_limits(g: GFunction, theta: float) -> tuple[float | None, float | None]:
    """One-sided limits ``(from below, from above)`` of g at ``theta``.

    ``None`` marks a side with no interior approach (theta at a domain edge).
    """
    t = _require_angle(theta)
    left = right = None
    for s in g.segments:
        if s.lo < t <= s.hi:
            left = s.value(t) if left is None else left
        if s.lo <= t < s.hi:
            right = s.value(t)
    # When theta falls strictly inside one segment both limits equal the value.
    return left, right


@dataclass(frozen=True)
class PreimagePoint:
    """An angle solving ``g(theta) = p``.

    ``limit_only`` marks values reached only as a one-sided limit (open
    endpoint of a piece); ``side`` is +1 when the approach is from above,
    -1 from below, 0 for an attained solution.
    """

    theta: float
    limit_only: bool = False
    side: int = 0


def preimage_g(g: GFunction, p: float) -> tuple[PreimagePoint, ...]:
    """All angles with ``g(theta) = p``, plus flagged one-sided-limit solutions.

    The returned tuple may be empty (value not reached even as a limit).  For
    an invertible link every probability has at most one attained solution,
    except isolated boundary values two pieces share at their endpoints.
    """
    target = _require_prob(p)
    points: list[PreimagePoint] = []
    for s in g.segments:
        if abs(s.slope) <= _EPS:
            if abs(s.value(s.lo) - target) <= _EPS:
                # Constant piece: the preimage is the whole interval; report
                # its endpoints as representatives.
                points.append(PreimagePoint(s.lo, not s.lo_closed, +1 if not s.lo_closed else 0))
                points.append(PreimagePoint(s.hi, not s.hi_closed, -1 if not s.hi_closed else 0))
            continue
        theta = (target - s.intercept) / s.slope
        if theta < s.lo - _EPS or theta > s.hi + _EPS:
            continue
        theta = min(max(theta, s.lo), s.hi)
        if abs(theta - s.lo) <= _EPS:
            theta = s.lo
            if s.lo_closed:
                points.append(PreimagePoint(theta))
            else:
                points.append(PreimagePoint(theta, True, +1))
        elif abs(theta - s.hi) <= _EPS:
            theta = s.hi
            if s.hi_closed:
                points.append(PreimagePoint(theta))
            else:
                points.append(PreimagePoint(theta, True, -1))
        else:
            points.append(PreimagePoint(theta))
    unique: dict[tuple[float, bool, int], PreimagePoint] = {}
    for pt in points:
        key = (round(pt.theta, 12), pt.limit_only, pt.side)
        unique.setdefault(key, pt)
    return tuple(sorted(unique.values(), key=lambda q: (q.theta, q.limit_only, q.side)))


def snap_to_breakpoints(g: GFunction, theta: float, tol: float = 1e-12) -> float:
    """Snap ``theta`` onto an exact segment boundary when within ``tol``.

    Derived quantities (inverse trig round trips) land a few ulp off the
    stored breakpoints; without snapping they would silently fall on the open
    side of a jump.
    """
    for s in g.segments[:-1]:
        if abs(theta - s.hi) <= tol:
            return s.hi
    return theta


def big_G(g: GFunction, x: float) -> float:
    """Correlation-to-probability transform ``G(x) = g(pi * (1 + x) / 2)``."""
    c = float(x)
    if not math.isfinite(c) or c < -1.0 - _EPS or c > 1.0 + _EPS:
        raise DomainError(f"correlation must lie in [-1, 1], got {x!r}")
    c = min(max(c, -1.0), 1.0)
    return eval_g(g, snap_to_breakpoints(g, 0.5 * PI * (1.0 + c)))


def q_transform_angle(g: GFunction, theta: float) -> float:
    """Effective probability of direction ``theta`` under singlet statistics.

    Equals ``g(pi * (1 - cos theta) / 2)`` and is total for every link,
    invertible or not.
    """
    t = _require_angle(theta)
    return big_G(g, -math.cos(t))


def q_transform(g: GFunction, p: float) -> float:
    """Effective probability of playing ``p`` under singlet statistics.

    Requires an invertible link: the unique angle preimage of ``p`` (a
    one-sided-limit preimage counts) is pushed through ``q_transform_angle``.
    Raises :class:`NonInvertibleError` when no single angle can be selected,
    including the isolated boundary values where two pieces of an otherwise
    invertible link meet with differing effective probabilities.
    """
    if not g.traits.invertible:
        raise NonInvertibleError(
            f"{g.name} is not invertible; evaluate by angle instead"
        )
    pts = preimage_g(g, p)
    if not pts:
        raise GfnError(f"{g.name} never reaches p={p}")
    values = [q_transform_angle(g, pt.theta) for pt in pts]
    if max(values) - min(values) > 1e-9:
        raise NonInvertibleError(
            f"p={p} is a boundary value of {g.name} with ambiguous effective probability"
        )
    return values[0]


@dataclass(frozen=True)
class QPreimagePoint:
    """One realization of a target effective probability.

    ``p`` is the announced move probability, ``theta`` the direction that
    realizes it.  ``limit_only`` realizations require approaching ``theta``
    from ``side`` (+1 above / -1 below); the probability is then reached only
    in the limit of feasible play.
    """

    p: float
    theta: float
    limit_only: bool = False
    side: int = 0


def effective_angle_inverse(u: float) -> float:
    """Angle whose singlet effective angle ``pi * (1 - cos theta) / 2`` is ``u``."""
    v = _require_angle(u, "effective angle")
    return math.acos(min(max(1.0 - 2.0 * v / PI, -1.0), 1.0))


def q_preimage(g: GFunction, p_target: float) -> tuple[QPreimagePoint, ...]:
    """All probabilities whose effective value under singlet statistics is ``p_target``.

    Enumerated angle-first: every direction ``theta`` with
    ``q_transform_angle(g, theta) = p_target`` contributes its announced
    probability ``g(theta)``; when ``theta`` sits on a jump of ``g`` the
    one-sided limit values are included as ``limit_only`` realizations (they
    are announced probabilities of play arbitrarily close to ``theta``).  More
    than one member signals that the target splits across several strategic
    realizations.  An empty tuple is a valid result.
    """
    target = _require_prob(p_target, "p_target")
    out: list[QPreimagePoint] = []
    for upt in preimage_g(g, target):
        if upt.limit_only:
            # The effective value only approaches the target near this angle;
            # nothing announced at the angle itself attains it.
            continue
        theta = effective_angle_inverse(upt.theta)
        out.append(QPreimagePoint(eval_g(g, theta), theta))
        at = eval_g(g, theta)
        left, right = side_limits(g, theta)
        if left is not None and abs(left - at) > _EPS:
            out.append(QPreimagePoint(left, theta, True, -1))
        if right is not None and abs(right - at) > _EPS:
            out.append(QPreimagePoint(right, theta, True, +1))
    unique: dict[tuple[float, float, bool, int], QPreimagePoint] = {}
    for pt in out:
        key = (round(pt.p, 12), round(pt.theta, 12), pt.limit_only, pt.side)
        unique.setdefault(key, pt)
    return tuple(
        sorted(unique.values(), key=lambda q: (q.p, q.theta, q.limit_only, q.side))
    )


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _check_delta(delta: float) -> float:
    d = float(delta)
    if not (0.0 < d < 1.0):
        raise CatalogError(f"delta must lie strictly inside (0, 1), got {delta!r}")
    return d


def _check_eps(eps: float) -> float:
    e = float(eps)
    if not (0.0 < e < PI):
        raise CatalogError(f"epsilon must lie strictly inside (0, pi), got {eps!r}")
    return e


def _g1(_: dict) -> tuple[Segment, ...]:
    return (Segment(0.0, PI, True, True, 1.0 / PI, 0.0),)


def _g2(_: dict) -> tuple[Segment, ...]:
    return (Segment(0.0, PI, True, True, -1.0 / PI, 1.0),)


def _g3(p: dict) -> tuple[Segment, ...]:
    d, e = p["delta"], p["epsilon"]
    return (
        Segment(0.0, e, True, True, -d / e, d),
        Segment(e, PI, False, True, (1.0 - d) / (PI - e), d - (1.0 - d) * e / (PI - e)),
    )


def _g4(p: dict) -> tuple[Segment, ...]:
    d = p["delta"]
    return (
        Segment(0.0, PI / 2, True, True, -2.0 * d / PI, d),
        Segment(PI / 2, PI, False, True, -2.0 * (1.0 - d) / PI, 2.0 - d),
    )


def _g5(p: dict) -> tuple[Segment, ...]:
    d = p["delta"]
    return (
        Segment(0.0, PI / 2, True, True, 2.0 * (1.0 - d) / PI, d),
        Segment(PI / 2, PI, False, True, 2.0 * d / PI, -d),
    )


def _g6(p: dict) -> tuple[Segment, ...]:
    d, e = p["delta"], p["epsilon"]
    return (
        Segment(0.0, e, True, True, (1.0 - d) / e, d),
        Segment(e, PI, False, True, -d / (PI - e), d * PI / (PI - e)),
    )


def _g7(p: dict) -> tuple[Segment, ...]:
    d, e = p["delta"], p["epsilon"]
    return (
        Segment(0.0, e, True, True, -(1.0 - d) / e, 1.0),
        Segment(e, PI, False, True, d / (PI - e), -d * e / (PI - e)),
    )


def _g8(_: dict) -> tuple[Segment, ...]:
    return (
        Segment(0.0, PI / 2, True, True, 2.0 / PI, 0.0),
        Segment(PI / 2, PI, False, True, -2.0 / PI, 2.0),
    )


_CATALOG: dict[str, dict] = {
    "g1": {"build": _g1, "params": (), "doc": "rising line theta/pi; continuous, invertible"},
    "g2": {"build": _g2, "params": (), "doc": "falling line 1 - theta/pi; continuous, invertible"},
    "g3": {
        "build": _g3,
        "params": ("delta", "epsilon"),
        "doc": "falls delta->0 on [0, eps], jumps, rises delta->1; invertible, one jump",
    },
    "g4": {
        "build": _g4,
        "params": ("delta",),
        "doc": "falls delta->0 on [0, pi/2], jumps to 1, falls to delta; jump at pi/2",
    },
    "g5": {
        "build": _g5,
        "params": ("delta",),
        "doc": "rises delta->1 on [0, pi/2], drops toward 0, rises to delta; jump at pi/2",
    },
    "g6": {
        "build": _g6,
        "params": ("delta", "epsilon"),
        "doc": "rises delta->1 on [0, eps], drops toward delta, falls to 0; one jump",
    },
    "g7": {
        "build": _g7,
        "params": ("delta", "epsilon"),
        "doc": "falls 1->delta on [0, eps], drops toward 0, rises to delta; one jump",
    },
    "g8": {"build": _g8, "params": (), "doc": "symmetric triangle peaking at (pi/2, 1); continuous, non-invertible"},
}


def catalog_names() -> tuple[str, ...]:
    return tuple(_CATALOG)


def catalog_info(name: str) -> dict:
    if name not in _CATALOG:
        raise CatalogError(f"unknown link function {name!r}; known: {', '.join(_CATALOG)}")
    entry = _CATALOG[name]
    return {"name": name, "params": list(entry["params"]), "doc": entry["doc"]}


def make_catalog(name: str, **params: float) -> GFunction:
    """Build a named catalog link function with validated parameters."""
    if name not in _CATALOG:
        raise CatalogError(f"unknown link function {name!r}; known: {', '.join(_CATALOG)}")
    entry = _CATALOG[name]
    expected = set(entry["params"])
    given = set(params)
    if given != expected:
        raise CatalogError(
            f"{name} takes parameters {sorted(expected)}, got {sorted(given)}"
        )
    clean: dict[str, float] = {}
    if "delta" in expected:
        clean["delta"] = _check_delta(params["delta"])
    if "epsilon" in expected:
        clean["epsilon"] = _check_eps(params["epsilon"])
    return GFunction(name=name, segments=entry["build"](clean), params=clean)


# ---------------------------------------------------------------------------
# Curve export
# ---------------------------------------------------------------------------

def _q_side(g: GFunction, theta: float, side: int) -> float:
    """One-sided value of the singlet effective probability near ``theta``."""
    u = 0.5 * PI * (1.0 - math.cos(theta))
    for b in [s.hi for s in g.segments[:-1]]:
        if abs(u - b) <= 1e-9:
            left, right = side_limits(g, b)
            if side < 0 and left is not None:
                return left
            if side > 0 and right is not None:
                return right
            break
    return eval_g(g, snap_to_breakpoints(g, min(max(u, 0.0), PI)))


def _g_side(g: GFunction, theta: float, side: int) -> float:
    left, right = side_limits(g, theta)
    if side < 0 and left is not None:
        return left
    if side > 0 and right is not None:
        return right
    return eval_g(g, theta)


def sample_curve(g: GFunction, resolution: int) -> list[tuple[float, float, float]]:
    """Rows ``(theta, g, q_angle)`` for plotting, jump-faithful.

    Uniform sampling at ``resolution`` points plus every breakpoint of the
    link and every angle where the singlet effective probability jumps; at
    each jump two rows carry the one-sided values (left first).
    """
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    thetas = {i * PI / (resolution - 1) for i in range(resolution)}
    breakpoints = [s.hi for s in g.segments[:-1]]
    special: set[float] = set()
    for b in breakpoints:
        special.add(b)
        special.add(effective_angle_inverse(b))
    thetas |= special
    rows: list[tuple[float, float, float]] = []
    for t in sorted(thetas):
        is_jump = any(abs(t - s) <= 1e-9 for s in special) and 0.0 < t < PI
        if is_jump:
            gl, gr = _g_side(g, t, -1), _g_side(g, t, +1)
            ql, qr = _q_side(g, t, -1), _q_side(g, t, +1)
            if abs(gl - gr) > _EPS or abs(ql - qr) > _EPS:
                rows.append((t, gl, ql))
                rows.append((t, gr, qr))
                continue
        rows.append((t, eval_g(g, t), q_transform_angle(g, t)))
    return rows
