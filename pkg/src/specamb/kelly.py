"""Proportional betting on the target variable.

A :class:`RaceMarket` treats each target event as a horse paying fixed
odds.  A gambler who may see some predictor variables (the wire) bets
their full capital in proportion to the best conditional distribution
available to them.  Under fair odds the long-run growth of log capital
recovers the information measures: the rate gained from the wire is the
mutual information, the log return of a single race is the pointwise
mutual information, and a chained bet on the components of a composite
target accrues one conditional pointwise term per leg.

Proportional betting never stakes anything on a horse with zero
posterior probability, so capital never hits zero.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from specamb.distribution import (
    JointDistribution,
    MassError,
    SchemaError,
)
from specamb.measures import InfoValue, mutual_information

__all__ = [
    "RNG_ALGORITHM",
    "RaceMarket",
    "SimulationResult",
    "optimal_doubling_rate",
    "value_of_side_information",
    "pointwise_return",
    "simulate_races",
    "accumulator_legs",
    "accumulator_log_return",
]

# Seedable Mersenne Twister, sampled by inverse CDF over the support rows
# in canonical (first-appearance) order.  Recorded in simulation output so
# trajectories can be tied to the generator that produced them.
RNG_ALGORITHM = "mt19937-inverse-cdf"

TargetKey = Union[str, Sequence[str]]
WireMessage = Union[Mapping[str, str], Sequence[str]]


def _as_target(dist: JointDistribution, t: TargetKey) -> tuple[str, ...]:
    arity = len(dist.schema.target_alphabet[0])
    if isinstance(t, str):
        parts = tuple(t.split(",")) if arity > 1 else (t,)
    else:
        parts = tuple(t)
    if len(parts) != arity:
        raise SchemaError(f"target event {t!r} has arity {len(parts)}, need {arity}")
    return parts


class RaceMarket:
    """A horse race over the target events of a joint distribution.

    ``wire`` names the predictor variables the gambler observes before
    betting; it may be empty.  ``odds`` maps each positive-probability
    target event to its payout multiplier and defaults to the fair book
    ``o(t) = 1/p(t)``.  Explicit odds only need to be positive; whether
    the book has a track take is reported, not forbidden, since shifted
    books are useful reference points.
    """

    __slots__ = ("joint", "wire", "odds", "_p_target", "_p_wire", "_p_joint")

    def __init__(
        self,
        joint: JointDistribution,
        *,
        wire: Sequence[str] = (),
        odds: Optional[Mapping[TargetKey, object]] = None,
    ) -> None:
        if joint.schema.target is None:
            raise SchemaError("a race market needs a distribution with a target")
        wire_names = tuple(wire)
        known = joint.schema.predictors
        if len(set(wire_names)) != len(wire_names):
            raise SchemaError(f"wire names repeat: {wire_names}")
        for name in wire_names:
            if name not in known:
                raise SchemaError(f"wire variable {name!r} is not a predictor")
        p_target: dict[tuple[str, ...], Fraction] = {}
        p_wire: dict[tuple[str, ...], Fraction] = {}
        p_joint: dict[tuple[tuple[str, ...], tuple[str, ...]], Fraction] = {}
        slots = [known.index(name) for name in wire_names]
        for (preds, target), p in joint.mass.items():
            msg = tuple(preds[i] for i in slots)
            p_target[target] = p_target.get(target, Fraction(0)) + p
            p_wire[msg] = p_wire.get(msg, Fraction(0)) + p
            key = (msg, target)
            p_joint[key] = p_joint.get(key, Fraction(0)) + p
        if odds is None:
            book = {t: Fraction(1) / p for t, p in p_target.items()}
        else:
            book = {}
            for key, value in odds.items():
                event = _as_target(joint, key)
                if event not in p_target:
                    raise SchemaError(f"odds given for zero-probability horse {key!r}")
                payout = Fraction(value)  # type: ignore[arg-type]
                if payout <= 0:
                    raise MassError(f"odds must be positive, got {key!r}: {payout}")
                book[event] = payout
            missing = set(p_target) - set(book)
            if missing:
                raise SchemaError(f"no odds for horses: {sorted(missing)}")
        self.joint = joint
        self.wire = wire_names
        self.odds = book
        self._p_target = p_target
        self._p_wire = p_wire
        self._p_joint = p_joint

    @property
    def is_fair(self) -> bool:
        """True when every payout is exactly the reciprocal probability."""
        return all(self.odds[t] * p == 1 for t, p in self._p_target.items())

    def book_sum(self) -> Fraction:
        """Sum of reciprocal payouts; 1 means no track take."""
        return sum((Fraction(1) / o for o in self.odds.values()), Fraction(0))

    def _require_fair(self, operation: str) -> None:
        if not self.is_fair:
            raise MassError(f"{operation} assumes fair odds o(t) = 1/p(t)")

    def message(self, s: WireMessage) -> tuple[str, ...]:
        """Normalise a wire message to a tuple in wire order."""
        if isinstance(s, Mapping):
            extra = set(s) - set(self.wire)
            if extra:
                raise SchemaError(f"message names unknown wire variables {sorted(extra)}")
            try:
                msg = tuple(s[name] for name in self.wire)
            except KeyError as exc:
                raise SchemaError(f"message misses wire variable {exc.args[0]!r}") from None
        else:
            msg = tuple(s)
        if len(msg) != len(self.wire):
            raise SchemaError(
                f"message {msg} has {len(msg)} entries, wire has {len(self.wire)}"
            )
        if msg not in self._p_wire:
            raise MassError(f"wire message {msg} has zero probability")
        return msg


def optimal_doubling_rate(market: RaceMarket, *, base: float = 2.0) -> InfoValue:
    """Per-race growth of log capital for the wireless proportional bettor.

    Equals ``sum_t p(t) log[p(t) o(t)]``; exactly zero under fair odds.
    """
    total = math.fsum(
        float(p) * _log(p * market.odds[t], base)
        for t, p in market._p_target.items()
    )
    return InfoValue(total, base)


def value_of_side_information(market: RaceMarket, *, base: float = 2.0) -> InfoValue:
    """Rate gained by betting on the wire posterior instead of the prior.

    Requires fair odds and a nonempty wire.  The value is checked against
    the mutual information between the wire and the target before being
    returned; the two are the same quantity computed by different routes.
    """
    if not market.wire:
        raise SchemaError("market has no wire; there is no side information")
    market._require_fair("value_of_side_information")
    gain = math.fsum(
        float(p) * _log(p / (market._p_wire[msg] * market._p_target[t]), base)
        for (msg, t), p in market._p_joint.items()
    )
    sub = market.joint.marginal(market.wire + (market.joint.schema.target,))
    info = float(mutual_information(sub, base=base))
    if abs(gain - info) > 1e-9:
        raise ArithmeticError(
            f"doubling-rate gain {gain!r} and mutual information {info!r} disagree"
        )
    return InfoValue(gain, base)


def pointwise_return(
    market: RaceMarket, s: WireMessage, t: TargetKey, *, base: float = 2.0
) -> InfoValue:
    """Log return of one race given the wire message and the winner.

    Under fair odds this is the pointwise mutual information between the
    message and the winning target event; capital multiplies by
    ``base ** return``.
    """
    market._require_fair("pointwise_return")
    msg = market.message(s)
    event = _as_target(market.joint, t)
    joint = market._p_joint.get((msg, event))
    if not joint:
        raise MassError(f"pair {msg} / {event} has zero probability")
    ratio = joint / (market._p_wire[msg] * market._p_target[event])
    return InfoValue(_log(ratio, base), base)


@dataclass(frozen=True)
class SimulationResult:
    """Outcome of a seeded race-sequence simulation.

    ``checkpoints`` lists ``(race_number, log_wealth)`` samples including
    the final race; ``empirical_rate`` is ``log_wealth / races`` and is
    expected to approach ``analytic_rate`` as the race count grows.
    """

    races: int
    seed: int
    rng: str
    analytic_rate: float
    empirical_rate: float
    final_log_wealth: float
    checkpoints: tuple[tuple[int, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "races": self.races,
            "seed": self.seed,
            "rng": self.rng,
            "analytic_rate": self.analytic_rate,
            "empirical_rate": self.empirical_rate,
            "final_log_wealth": self.final_log_wealth,
            "checkpoints": [list(point) for point in self.checkpoints],
        }


def simulate_races(
    market: RaceMarket, races: int, seed: int, *, base: float = 2.0
) -> SimulationResult:
    """Run ``races`` independent races and track log wealth.

    Each race draws a (message, winner) pair by inverse CDF over the
    support in canonical order using ``random.Random(seed)``, then bets
    the posterior given the message at the market's odds.  Wealth is kept
    in log space so long runs cannot overflow.
    """
    if races < 1:
        raise MassError(f"need at least one race, got {races}")
    rows = list(market._p_joint.items())
    returns = []
    cumulative = []
    acc = 0.0
    for (msg, t), p in rows:
        bet = p / market._p_wire[msg]
        returns.append(_log(bet * market.odds[t], base))
        acc += float(p)
        cumulative.append(acc)
    cumulative[-1] = 1.0
    analytic = math.fsum(
        float(p) * r for (_, p), r in zip(rows, returns)
    )
    rng = random.Random(seed)
    stride = max(1, races // 100)
    log_wealth = 0.0
    checkpoints: list[tuple[int, float]] = []
    for race in range(1, races + 1):
        log_wealth += returns[bisect_right(cumulative, rng.random())]
        if race % stride == 0 or race == races:
            checkpoints.append((race, log_wealth))
    return SimulationResult(
        races=races,
        seed=seed,
        rng=RNG_ALGORITHM,
        analytic_rate=analytic,
        empirical_rate=log_wealth / races,
        final_log_wealth=log_wealth,
        checkpoints=tuple(checkpoints),
    )


def accumulator_legs(
    market: RaceMarket,
    s: WireMessage,
    t: TargetKey,
    order: Optional[Sequence[str]] = None,
    *,
    base: float = 2.0,
) -> tuple[InfoValue, ...]:
    """Per-leg log returns of a chained bet on the target components.

    Legs settle in ``order`` (default: declared component order).  Leg
    ``k`` bets the posterior of component ``k`` given the wire message and
    the already-settled components, at odds fair given the settled
    components alone, so its log return is the conditional pointwise
    mutual information of that leg.
    """
    ratios = _leg_ratios(market, s, t, order)
    return tuple(InfoValue(_log(r, base), base) for r in ratios)


def accumulator_log_return(
    market: RaceMarket,
    s: WireMessage,
    t: TargetKey,
    order: Optional[Sequence[str]] = None,
    *,
    base: float = 2.0,
) -> InfoValue:
    """Total log return of the chained bet; independent of leg order.

    The leg ratios telescope, so the product is the single-race return on
    the full composite winner and every component permutation yields the
    same value.
    """
    product = Fraction(1)
    for ratio in _leg_ratios(market, s, t, order):
        product *= ratio
    return InfoValue(_log(product, base), base)


def _leg_ratios(
    market: RaceMarket,
    s: WireMessage,
    t: TargetKey,
    order: Optional[Sequence[str]],
) -> list[Fraction]:
    schema = market.joint.schema
    market._require_fair("accumulator_log_return")
    if schema.target_components is None:
        # A plain target is a one-leg chain: the whole race in one bet.
        if order is not None and tuple(order) != (schema.target,):
            raise SchemaError(
                f"order {tuple(order)} does not match the single target {schema.target!r}"
            )
        msg = market.message(s)
        event = _as_target(market.joint, t)
        joint = market._p_joint.get((msg, event))
        if not joint:
            raise MassError(f"pair {msg} / {event} has zero probability")
        return [joint / (market._p_wire[msg] * market._p_target[event])]
    names = schema.target_components if order is None else tuple(order)
    if sorted(names) != sorted(schema.target_components):
        raise SchemaError(
            f"order {tuple(names)} is not a permutation of {schema.target_components}"
        )
    msg = market.message(s)
    event = _as_target(market.joint, t)
    slots = [schema.component_index(name) for name in names]
    ratios: list[Fraction] = []
    settled: list[tuple[int, str]] = []
    for slot in slots:
        p_msg_prev, p_prev = _masses(market, msg, settled)
        settled.append((slot, event[slot]))
        p_msg_next, p_next = _masses(market, msg, settled)
        if not p_msg_next or not p_next:
            raise MassError(
                f"leg {schema.target_components[slot]!r}={event[slot]!r} "
                f"has zero probability"
            )
        ratios.append((p_msg_next / p_msg_prev) / (p_next / p_prev))
    return ratios


def _masses(
    market: RaceMarket, msg: tuple[str, ...], settled: list[tuple[int, str]]
) -> tuple[Fraction, Fraction]:
    with_msg = Fraction(0)
    total = Fraction(0)
    for (row_msg, target), p in market._p_joint.items():
        if any(target[slot] != label for slot, label in settled):
            continue
        total += p
        if row_msg == msg:
            with_msg += p
    return with_msg, total


def _log(value: Fraction, base: float) -> float:
    if value <= 0:
        raise MassError(f"log of non-positive value {value}")
    if base == 2.0:
        return math.log2(value)
    if base <= 0 or base == 1:
        raise MassError(f"log base must be positive and not 1, got {base}")
    return math.log2(value) / math.log2(base)
