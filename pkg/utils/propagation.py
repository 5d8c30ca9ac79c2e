# utils/propagation.py
"""
Propagation models, SINR, the distance criterion DC(C, D) and the series
calculus that links the two.

Every series evaluated here is bounded from above (partial sum plus a
padded remainder), so a positive "ensures" verdict is never the product of
truncation error. A negative verdict is only demonstrated by an explicit
adversarial configuration.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import zeta

from utils.errors import CriterionNotEnsuredError, DivergentSeriesError, ParameterError
from utils.geometry import Point, min_site_spacing

logger = logging.getLogger(__name__)

# Terms summed explicitly before the zeta remainder takes over.
PARTIAL_TERMS = 1024
# Upward relative padding on every series remainder.
REMAINDER_PAD = 1e-10
# Relative safety factor applied to computed powers.
POWER_SAFETY = 1e-9
# Grid and refinement of find_D_for_C.
D_GRID_START = 1e-3
D_GRID_MAX_DOUBLINGS = 200
D_BISECTION_STEPS = 40

ModelKind = Literal["A", "B"]


@dataclass(frozen=True)
class PropagationModel:
    """
    Model A: eta(d) = 1/d^alpha.  Model B: eta(d) = 1/(1+d)^alpha.
    """

    kind: ModelKind = "B"
    alpha: float = 3.0

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise ParameterError(f"unknown propagation model {self.kind!r}, expected 'A' or 'B'")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")

    def gains(self, distances) -> np.ndarray:
        d = np.asarray(distances, dtype=float)
        if np.any(d < 0):
            raise ParameterError("distances must be non-negative")
        if self.kind == "A":
            if np.any(d == 0):
                raise ParameterError("Model A undefined at zero distance")
            return d ** -self.alpha
        return (1.0 + d) ** -self.alpha


@dataclass(frozen=True)
class RadioParams:
    P: float
    N0: float
    beta: float

    def __post_init__(self):
        # N0 = 0 is the zero-noise limit used by the converse checks
        if not self.P > 0:
            raise ParameterError(f"power P must be positive, got {self.P}")
        if not self.N0 >= 0:
            raise ParameterError(f"noise N0 must be non-negative, got {self.N0}")
        if not self.beta > 0:
            raise ParameterError(f"threshold beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class DcParams:
    C: float
    D: float

    def __post_init__(self):
        if not (self.C > 0 and self.D > 0):
            raise ParameterError(f"DC(C, D) needs C > 0 and D > 0, got C={self.C}, D={self.D}")

    @property
    def spacing(self) -> float:
        """Minimum distance between simultaneous transmitters, C(2+D)."""
        return self.C * (2.0 + self.D)

    @property
    def ring_width(self) -> float:
        """Interferer ring width C(1+D/2) of the SINR lower bound."""
        return self.C * (1.0 + self.D / 2.0)


@dataclass(frozen=True)
class TxConfig:
    """One transmission t -> r with the simultaneous transmitters T."""

    t: Point
    r: Point
    T: tuple[Point, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "t", Point(*map(float, self.t)))
        object.__setattr__(self, "r", Point(*map(float, self.r)))
        others = tuple(Point(*map(float, p)) for p in self.T)
        if self.t in others:
            raise ParameterError("the transmitter cannot also be one of its interferers")
        object.__setattr__(self, "T", others)

    @property
    def interferers(self) -> np.ndarray:
        return np.asarray(self.T, dtype=float).reshape(-1, 2)


def attenuation(model: PropagationModel, d: float) -> float:
    return float(model.gains(d))


def sinr(cfg: TxConfig, radio: RadioParams, model: PropagationModel) -> float:
    signal = radio.P * attenuation(model, math.dist(cfg.t, cfg.r))
    if cfg.T:
        distances = cdist(cfg.interferers, np.asarray([cfg.r], dtype=float))[:, 0]
        interference = math.fsum(radio.P * model.gains(distances))
    else:
        interference = 0.0
    denominator = radio.N0 + interference
    return signal / denominator if denominator > 0 else math.inf


def sinr_many(transmitters, receivers, radio: RadioParams, model: PropagationModel) -> np.ndarray:
    """
    SINR of every hop of one slot; hop i hears all other transmitters.

    Args:
        transmitters: (k, 2) transmitter positions, one per hop
        receivers: (k, 2) receiver positions in the same order
    """
    tx = np.asarray(transmitters, dtype=float).reshape(-1, 2)
    rx = np.asarray(receivers, dtype=float).reshape(-1, 2)
    if len(tx) != len(rx):
        raise ParameterError("every hop needs one transmitter and one receiver")
    if len(tx) == 0:
        return np.zeros(0)

    received = radio.P * model.gains(cdist(rx, tx))
    out = np.empty(len(tx))
    for i, row in enumerate(received):
        interference = math.fsum(np.delete(row, i))
        denominator = radio.N0 + interference
        out[i] = row[i] / denominator if denominator > 0 else math.inf
    return out


def sinr_success(cfg: TxConfig, radio: RadioParams, model: PropagationModel) -> bool:
    return sinr(cfg, radio, model) >= radio.beta


def dc_satisfied(cfg: TxConfig, dc: DcParams) -> bool:
    if math.dist(cfg.t, cfg.r) > dc.C:
        return False
    if not cfg.T:
        return True
    points = np.vstack((np.asarray([cfg.t], dtype=float), cfg.interferers))
    return min_site_spacing(points) >= dc.spacing


def _prefactor(dc: DcParams, alpha: float, model: PropagationModel | None) -> float:
    if model is not None and model.kind == "A":
        return dc.C**alpha
    return (1.0 + dc.C) ** alpha


def _ring_terms(dc: DcParams, alpha: float, K: int, model: PropagationModel | None) -> float:
    if K <= 0:
        return 0.0
    k = np.arange(1, K + 1, dtype=float)
    scaled = k * dc.ring_width
    if model is None or model.kind == "B":
        scaled += 1.0
    return math.fsum((6.0 * k + 3.0) / scaled**alpha)


def _ring_remainder(dc: DcParams, alpha: float, start: int, model: PropagationModel | None) -> float:
    """
    Exact sum of (6k+3)/(1+k*delta)^alpha for k >= start, padded upward.

    With q = 1/delta, 6k+3 = 6(k+q) + (3-6q) splits the tail into two
    Hurwitz zeta values. Model A is the q = 0 case.
    """
    delta = dc.ring_width
    q = 1.0 / delta if model is None or model.kind == "B" else 0.0
    tail = 6.0 * zeta(alpha - 1.0, start + q) + (3.0 - 6.0 * q) * zeta(alpha, start + q)
    return float(delta**-alpha * tail * (1.0 + REMAINDER_PAD))


def _check_convergent(alpha: float) -> None:
    if not alpha > 2:
        raise DivergentSeriesError(f"divergent series: the unbounded sum needs alpha > 2, got {alpha}")


def _interference_sum(dc: DcParams, alpha: float, K: Optional[float], model) -> float:
    if K is None or math.isinf(K):
        _check_convergent(alpha)
        return _ring_terms(dc, alpha, PARTIAL_TERMS, model) + _ring_remainder(dc, alpha, PARTIAL_TERMS + 1, model)
    return _ring_terms(dc, alpha, int(K), model)


def _rings_within(dc: DcParams, distance: Optional[float]) -> Optional[int]:
    if distance is None or math.isinf(distance):
        return None
    return int(math.floor(distance / dc.ring_width))


def sinr_lower_bound(
    dc: DcParams,
    radio: RadioParams,
    alpha: float,
    max_interferer_distance: float,
    model: PropagationModel | None = None,
) -> float:
    """Guaranteed SINR of any DC(C, D) configuration whose interferers lie within the given distance."""
    K = _rings_within(dc, max_interferer_distance)
    total = radio.N0 / radio.P + _interference_sum(dc, alpha, K, model)
    denominator = _prefactor(dc, alpha, model) * total
    return 1.0 / denominator if denominator > 0 else math.inf


def ensure_sum(dc: DcParams, alpha: float, K: Optional[float] = None, model: PropagationModel | None = None) -> float:
    """
    (1+C)^alpha * sum_{k=1..K} (6k+3)/(1+kC(1+D/2))^alpha.

    ``K=None`` (or infinity) sums the whole series. The result is then an
    upper estimate of the true value.
    """
    return _prefactor(dc, alpha, model) * _interference_sum(dc, alpha, K, model)


def series_tail_bound(dc: DcParams, alpha: float, K: int, model: PropagationModel | None = None) -> float:
    """Integral bound on the part of the unbounded ensure sum beyond ring K, in ensure-sum units."""
    _check_convergent(alpha)
    if K < 1:
        raise ParameterError(f"tail bound needs K >= 1, got {K}")
    bracket = 6.0 * K ** (2.0 - alpha) / (alpha - 2.0) + 3.0 * K ** (1.0 - alpha) / (alpha - 1.0)
    return _prefactor(dc, alpha, model) * dc.ring_width**-alpha * bracket


def ensures_sinr(
    dc: DcParams,
    alpha: float,
    beta: float,
    diameter: Optional[float] = None,
    model: PropagationModel | None = None,
) -> bool:
    K = _rings_within(dc, diameter)
    return ensure_sum(dc, alpha, K, model) < 1.0 / beta


def tau(alpha: float) -> float:
    """2 * (sum 6/k^(alpha-1) + sum 3/k^alpha)^(1/alpha)."""
    _check_convergent(alpha)
    inner = 6.0 * zeta(alpha - 1.0) + 3.0 * zeta(alpha)
    return float(2.0 * (inner * (1.0 + REMAINDER_PAD)) ** (1.0 / alpha))


def sufficient_pair(dc: DcParams, alpha: float, beta: float) -> bool:
    return (1.0 + dc.C) / dc.spacing < 1.0 / (tau(alpha) * beta ** (1.0 / alpha))


def find_D_for_C(C: float, alpha: float, beta: float, model: PropagationModel | None = None) -> float:
    """
    Smallest D (to bisection precision) for which DC(C, D) ensures SINR_beta
    everywhere. The returned value always passes :func:`ensures_sinr`.
    """
    _check_convergent(alpha)

    def passes(D: float) -> bool:
        return ensures_sinr(DcParams(C, D), alpha, beta, None, model)

    failing, passing = None, D_GRID_START
    for _ in range(D_GRID_MAX_DOUBLINGS):
        if passes(passing):
            break
        failing, passing = passing, 2.0 * passing
    else:
        raise CriterionNotEnsuredError(f"no D ensures SINR_beta for C={C}, alpha={alpha}, beta={beta}")

    if failing is not None:
        for _ in range(D_BISECTION_STEPS):
            mid = 0.5 * (failing + passing)
            if passes(mid):
                passing = mid
            else:
                failing = mid
    logger.debug("find_D_for_C C=%.6g alpha=%.4g beta=%.4g -> D=%.9g", C, alpha, beta, passing)
    return passing


def min_power(
    dc: DcParams,
    alpha: float,
    beta: float,
    N0: float,
    diameter: Optional[float] = None,
    model: PropagationModel | None = None,
) -> float:
    """Power at which every DC(C, D) configuration inside the region meets SINR_beta."""
    interference = _interference_sum(dc, alpha, _rings_within(dc, diameter), model)
    margin = 1.0 / (beta * _prefactor(dc, alpha, model)) - interference
    if margin <= 0:
        raise CriterionNotEnsuredError(
            f"pair does not ensure criterion: C={dc.C}, D={dc.D}, alpha={alpha}, beta={beta}"
        )
    return N0 / margin * (1.0 + POWER_SAFETY)


def sample_dc_config(dc: DcParams, m: int, extent: float, rng: np.random.Generator, max_tries: int = 200) -> TxConfig:
    """
    Random configuration satisfying DC(C, D): r at the origin, t within C of it,
    and up to ``m`` interferers accepted one by one from the disk of radius
    ``extent``. Fewer than ``m`` come back when the disk fills up.
    """
    angle = rng.uniform(0.0, 2.0 * math.pi)
    reach = dc.C * rng.random()
    t = Point(reach * math.cos(angle), reach * math.sin(angle))

    accepted = [np.asarray(t)]
    for _ in range(m):
        for _ in range(max_tries):
            radius = extent * math.sqrt(rng.random())
            theta = rng.uniform(0.0, 2.0 * math.pi)
            candidate = np.array([radius * math.cos(theta), radius * math.sin(theta)])
            if cdist(candidate[None, :], np.asarray(accepted)).min() >= dc.spacing:
                accepted.append(candidate)
                break
        else:
            logger.debug("sample_dc_config stopped at %d of %d interferers", len(accepted) - 1, m)
            break
    return TxConfig(t=t, r=Point(0.0, 0.0), T=tuple(Point(*p) for p in accepted[1:]))


def adversarial_config(dc: DcParams, m: int) -> TxConfig:
    """
    Dense interferer packing that satisfies DC(C, D) with ``m`` interferers.

    r sits at the origin and t at (C, 0). Ring k has radius 2k*delta with
    delta = C(2+D); consecutive points on a ring are delta apart and the
    closing gap lies in [delta, 2*delta).
    """
    if m < 1:
        raise ParameterError(f"adversarial configuration needs m >= 1, got {m}")
    delta = dc.spacing
    placed: list[np.ndarray] = []
    k = 0
    while sum(len(ring) for ring in placed) < m:
        k += 1
        # chord a hair above delta so the spacing survives rounding
        step = 2.0 * math.asin((1.0 + 1e-12) / (4.0 * k))
        count = int(math.floor(2.0 * math.pi / step))
        angles = step * np.arange(count)
        placed.append(2.0 * k * delta * np.column_stack((np.cos(angles), np.sin(angles))))

    interferers = np.vstack(placed)[:m]
    return TxConfig(t=Point(dc.C, 0.0), r=Point(0.0, 0.0), T=tuple(Point(*p) for p in interferers))


def ring_populations(cfg: TxConfig, dc: DcParams) -> list[int]:
    """Interferer count per ring of an :func:`adversarial_config` output."""
    radii = np.hypot(*cfg.interferers.T) / (2.0 * dc.spacing)
    rings = np.rint(radii).astype(int)
    return np.bincount(rings)[1:].tolist() if len(rings) else []


def _converse_factor(dc: DcParams, alpha: float) -> float:
    return ((1.0 + 2.0 * dc.spacing) / (1.0 + dc.C)) ** alpha / 7.0


def adversarial_sinr_bound(dc: DcParams, alpha: float, m: int) -> float:
    """
    Upper bound on the zero-noise SINR of :func:`adversarial_config`.

    Returns +inf when m is too small for any complete ring to count.
    """
    rings = int(math.floor(math.sqrt(m / 7.0) - 2.0))
    if rings < 1:
        return math.inf
    k = np.arange(1, rings + 1, dtype=float)
    return _converse_factor(dc, alpha) / math.fsum(k ** (1.0 - alpha))


def converse_threshold(dc: DcParams, alpha: float) -> float:
    """SINR ceiling over all m; (C, D) cannot ensure SINR_beta for beta above it."""
    _check_convergent(alpha)
    return _converse_factor(dc, alpha) / float(zeta(alpha - 1.0))


def small_pair_threshold(alpha: float) -> float:
    """Beta above which all sufficiently small (C, D) fail to ensure SINR_beta."""
    _check_convergent(alpha)
    return 1.0 / (7.0 * float(zeta(alpha - 1.0)))


def max_distance(points: Iterable, origin) -> float:
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return 0.0
    return float(cdist(pts, np.asarray([origin], dtype=float)).max())
