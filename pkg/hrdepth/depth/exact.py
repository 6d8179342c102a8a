"""
Closed-form depth for product measures and the Sparre-Andersen grid oracle.

For independent coordinates the depth of a sequence a is
min(prod_t P(Z_t <= a_t), prod_t P(Z_t >= a_t)); both products are
accumulated as sums of logs.
"""

import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import special, stats

from ..exceptions import DomainError, NumericError
from ..processes.marginals import tail_probabilities
from ..processes.models import MarginalKind, MarginalSpec
from .models import TailKind, TailModel, VerdictKind, ZeroDepthVerdict

logger = logging.getLogger(__name__)

# explicit tail terms before the integral remainder takes over
_TAIL_TERMS = 100_000
_CHECKPOINTS = (10, 100, 1_000, 10_000, 100_000, 1_000_000)


def _log(p: float) -> float:
    return math.log(p) if p > 0 else -math.inf


def log_sides(spec: MarginalSpec, a: float) -> Tuple[float, float]:
    """(log P(Z <= a), log P(Z >= a))."""
    if spec.kind is MarginalKind.GAUSSIAN:
        return (
            float(stats.norm.logcdf(a, loc=spec.mu, scale=spec.sigma)),
            float(stats.norm.logsf(a, loc=spec.mu, scale=spec.sigma)),
        )
    up, down = tail_probabilities(spec, a)
    return _log(down), _log(up)


def _check_lengths(marginals: Sequence[MarginalSpec], a: Sequence[float]) -> None:
    if len(marginals) != len(a):
        raise DomainError(f"{len(marginals)} marginals but {len(a)} values")
    if not marginals:
        raise DomainError("marginals must be non-empty")


def _explicit_logs(marginals: Sequence[MarginalSpec], a: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    logs = np.array([log_sides(spec, float(x)) for spec, x in zip(marginals, a)])
    return logs[:, 0], logs[:, 1]


def exact_product_depth(marginals: Sequence[MarginalSpec], a: Sequence[float]) -> float:
    """
    Depth of the sequence a under independent coordinates with the given marginals.

    Args:
        marginals: One distribution per coordinate.
        a: The sequence, same length.

    Returns:
        min(prod P(Z_t <= a_t), prod P(Z_t >= a_t)).
    """
    _check_lengths(marginals, a)
    log_below, log_above = _explicit_logs(marginals, a)
    return math.exp(min(float(np.sum(log_below)), float(np.sum(log_above))))


def _tail_log_product(tail: TailModel, share: float, start: int) -> float:
    """sum_{t >= start} log(1 - share * q_t) for a summable tail."""
    if tail.kind is TailKind.NONE or share == 0:
        return 0.0
    t = np.arange(start, start + _TAIL_TERMS, dtype=float)
    total = float(np.sum(np.log1p(-share * tail.q(t))))
    nxt = start + _TAIL_TERMS
    # log(1 - x) ~ -x once the terms are this small
    if tail.kind is TailKind.GEOMETRIC:
        remainder = tail.scale * tail.ratio**nxt / (1.0 - tail.ratio)
    else:
        p = tail.exponent
        remainder = tail.scale * (nxt - 0.5) ** (1.0 - p) / (p - 1.0)
    return total - share * remainder


def _partial_sums(explicit: np.ndarray, tail: TailModel) -> Dict[int, float]:
    """sum_{t <= T} P(Z_t != a_t) at checkpoint indices T."""
    k = explicit.size
    cumulative = np.cumsum(explicit)
    sums: Dict[int, float] = {}
    for T in _CHECKPOINTS:
        if T <= k:
            sums[T] = float(cumulative[T - 1])
        else:
            t = np.arange(k + 1, T + 1, dtype=float)
            sums[T] = float(cumulative[-1] + np.sum(tail.q(t)))
    return sums


def _mismatch(spec: MarginalSpec, a: float) -> float:
    """P(Z != a)."""
    up, down = tail_probabilities(spec, a)
    return min(1.0, max(0.0, 2.0 - up - down))


def nasc_verdict(marginals: List[MarginalSpec], a: List[float], tail_model: TailModel) -> ZeroDepthVerdict:
    """
    Decide whether the depth of a vanishes for a product measure.

    The depth is zero exactly when some coordinate puts no mass on one side
    of a_t, or when sum_t P(Z_t != a_t) diverges. ``tail_model`` describes the
    coordinates past the explicit list.

    Args:
        marginals: Explicit coordinate marginals, indices 1..k.
        a: Values a_1..a_k.
        tail_model: P(Z_t != a_t) for t > k.

    Returns:
        ZeroDepthVerdict; a positive verdict carries the exact depth.

    Raises:
        DomainError: If the tail model gives a probability above 1.
    """
    _check_lengths(marginals, a)
    k = len(marginals)
    first = float(tail_model.q(float(k + 1)))
    if first > 1.0:
        raise DomainError(f"tail model gives P(Z_t != a_t) = {first} > 1 at t={k + 1}")

    for t, (spec, x) in enumerate(zip(marginals, a), start=1):
        up, down = tail_probabilities(spec, float(x))
        if up == 0 or down == 0:
            side = "above" if up == 0 else "below"
            logger.debug("boundary witness at t=%d (no mass %s a_t)", t, side)
            return ZeroDepthVerdict(kind=VerdictKind.ZERO_BY_BOUNDARY, witness=t, side=side)
    # past the list the largest mismatch is at t = k+1 (q_t is non-increasing)
    if tail_model.kind is not TailKind.NONE:
        for side, share in (("below", tail_model.up), ("above", tail_model.down)):
            if share * first >= 1.0:
                return ZeroDepthVerdict(kind=VerdictKind.ZERO_BY_BOUNDARY, witness=k + 1, side=side)

    explicit = np.array([_mismatch(spec, float(x)) for spec, x in zip(marginals, a)])
    if not tail_model.summable:
        return ZeroDepthVerdict(
            kind=VerdictKind.ZERO_BY_DIVERGENCE, partial_sums=_partial_sums(explicit, tail_model)
        )

    log_below, log_above = _explicit_logs(marginals, a)
    total_below = float(np.sum(log_below)) + _tail_log_product(tail_model, tail_model.up, k + 1)
    total_above = float(np.sum(log_above)) + _tail_log_product(tail_model, tail_model.down, k + 1)
    value = math.exp(min(total_below, total_above))
    if value <= 0:
        raise NumericError(
            "product depth underflows double precision",
            {"log_below": total_below, "log_above": total_above},
        )
    return ZeroDepthVerdict(kind=VerdictKind.POSITIVE, value=value)


def sparre_andersen_exact(m: int) -> float:
    """C(2m, m) / 4^m: the chance a symmetric continuous m-step walk stays on one side of 0."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return math.exp(special.gammaln(2 * m + 1) - 2.0 * special.gammaln(m + 1) - m * math.log(4.0))
