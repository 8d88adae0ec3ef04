"""Pointwise information measures over exact joint distributions.

Every function here evaluates at a single realisation (a support row) and
returns an :class:`InfoValue` in bits by default.  The central identity is
the split of the pointwise mutual information carried by a source event
``a`` about the realised target event ``t`` into two nonnegative parts::

    i(a; t) = specificity(a) - ambiguity(a)
            = h(a)           - h(a | t)

where ``h`` is the pointwise entropy (surprisal).  Specificity does not
depend on the target event; ambiguity does.  Both generalise to
conditional forms by adding realised source events or target components to
the conditioning set, and the same split applies there.

Probabilities stay :class:`fractions.Fraction` until the single logarithm
at the end, so equal probabilities always produce bit-identical values.
Averages over the support use compensated summation.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from specamb.distribution import (
    JointDistribution,
    MassError,
    Realisation,
    SchemaError,
    SourceEvent,
)

__all__ = [
    "InfoValue",
    "pointwise_entropy",
    "pointwise_conditional_entropy",
    "specificity",
    "ambiguity",
    "pointwise_mutual_information",
    "co_information",
    "average",
    "mutual_information",
]


@dataclass(frozen=True)
class InfoValue:
    """An information quantity together with the log base it is stated in."""

    value: float
    base: float = 2.0

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        unit = "bits" if self.base == 2.0 else f"base-{self.base:g} units"
        return f"InfoValue({self.value!r} {unit})"


def _log_prob(p: Fraction, base: float) -> float:
    if p <= 0:
        raise MassError("information value of a zero-probability event")
    if base == 2.0:
        return math.log2(p)
    if base <= 0 or base == 1.0:
        raise ValueError(f"log base must be positive and != 1, got {base!r}")
    return math.log2(p) / math.log2(base)


def surprisal_of(p: object, base: float = 2.0) -> float:
    """Plain ``-log p`` for an exact probability.

    Accepts anything ``Fraction`` accepts, including rational strings.

    >>> surprisal_of(Fraction(1, 4))
    2.0
    """
    return -_log_prob(Fraction(p), base)  # type: ignore[arg-type]


def _assignment(
    dist: JointDistribution,
    realisation: Realisation,
    sources: Iterable[SourceEvent],
    components: Iterable[str],
    full_target: bool,
) -> dict[str, str]:
    schema = dist.schema
    out: dict[str, str] = {}
    for source in sources:
        for i, label in zip(source.indices, realisation.source_labels(source)):
            name = schema.predictors[i - 1]
            if out.setdefault(name, label) != label:
                raise SchemaError(f"conflicting constraints on predictor {name!r}")
    if full_target:
        if schema.target is None:
            raise SchemaError("this distribution has no target")
        out[schema.target] = realisation.target  # type: ignore[assignment]
    for name in components:
        k = schema.component_index(name)
        out[name] = realisation.target[k]
    return out


def _conditional_probability(
    dist: JointDistribution,
    event: dict[str, str],
    given: dict[str, str],
) -> Fraction:
    denom = dist.probability(given) if given else Fraction(1)
    if denom == 0:
        raise MassError(f"conditioning event {given!r} has zero probability")
    joint = dist.probability({**event, **given})
    return joint / denom


def pointwise_entropy(
    dist: JointDistribution,
    event: dict[str, Union[str, tuple[str, ...]]],
    base: float = 2.0,
) -> InfoValue:
    """Surprisal ``h(event) = -log p(event)`` of a partial assignment.

    >>> from specamb.distribution import JointDistribution
    >>> d = JointDistribution.from_rows(
    ...     [("1/2", ("0",), "0"), ("1/4", ("1",), "0"), ("1/4", ("1",), "1")],
    ...     predictors=("s1",))
    >>> pointwise_entropy(d, {"s1": "1"})
    InfoValue(1.0 bits)
    """
    return InfoValue(-_log_prob(dist.probability(event), base), base)


def pointwise_conditional_entropy(
    dist: JointDistribution,
    event: dict[str, Union[str, tuple[str, ...]]],
    given: dict[str, Union[str, tuple[str, ...]]],
    base: float = 2.0,
) -> InfoValue:
    """Conditional surprisal ``h(event | given)``."""
    denom = dist.probability(given)
    if denom == 0:
        raise MassError(f"conditioning event {given!r} has zero probability")
    joint = dist.probability({**event, **given})
    return InfoValue(-_log_prob(joint / denom, base), base)


def specificity(
    dist: JointDistribution,
    source: SourceEvent,
    realisation: Realisation,
    *,
    given_sources: Iterable[SourceEvent] = (),
    given_components: Sequence[str] = (),
    base: float = 2.0,
) -> InfoValue:
    """Specificity of a source event: its (conditional) surprisal.

    With empty conditioning this is ``h(a)``, the information the event
    ``a`` supplies about any target whatsoever.  Conditioning on other
    realised source events gives ``h(a | b)``; conditioning on realised
    target components gives the specificity used by conditional
    decompositions.
    """
    event = _assignment(dist, realisation, (source,), (), False)
    given = _assignment(dist, realisation, given_sources, given_components, False)
    return InfoValue(-_log_prob(_conditional_probability(dist, event, given), base), base)


def ambiguity(
    dist: JointDistribution,
    source: SourceEvent,
    realisation: Realisation,
    *,
    components: Union[Sequence[str], None] = None,
    given_sources: Iterable[SourceEvent] = (),
    given_components: Sequence[str] = (),
    base: float = 2.0,
) -> InfoValue:
    """Ambiguity of a source event: its surprisal given the target event.

    ``h(a | t)`` by default.  ``components`` restricts the conditioning to
    the named target components (the ambiguity *towards* that part of the
    target); extra realised source events or components extend the
    conditioning set exactly as for :func:`specificity`.
    """
    event = _assignment(dist, realisation, (source,), (), False)
    given = _assignment(
        dist,
        realisation,
        given_sources,
        tuple(components) + tuple(given_components) if components is not None else given_components,
        components is None,
    )
    return InfoValue(-_log_prob(_conditional_probability(dist, event, given), base), base)


def pointwise_mutual_information(
    dist: JointDistribution,
    realisation: Realisation,
    source: Union[SourceEvent, None] = None,
    *,
    components: Union[Sequence[str], None] = None,
    given_sources: Iterable[SourceEvent] = (),
    given_components: Sequence[str] = (),
    base: float = 2.0,
) -> InfoValue:
    """Pointwise mutual information ``i(a; t) = log [p(t | a) / p(t)]``.

    ``source`` defaults to the full predictor set.  ``components`` selects a
    part of a composite target; the ``given_*`` arguments condition both the
    numerator and the denominator, giving ``i(a; t_sel | t_giv)`` and its
    source-conditioned analogues.  Computed directly from the probability
    ratio, not via the specificity/ambiguity split, so the identity
    ``i = specificity - ambiguity`` is a genuine cross-check.

    The value is negative exactly when the source event is misinformative
    about the realised target event.
    """
    if source is None:
        source = SourceEvent(tuple(range(1, dist.n + 1)))
    target_event = _assignment(
        dist, realisation, (), tuple(components) if components is not None else (), components is None
    )
    given = _assignment(dist, realisation, given_sources, given_components, False)
    source_event = _assignment(dist, realisation, (source,), (), False)
    posterior = _conditional_probability(dist, target_event, {**source_event, **given})
    prior = _conditional_probability(dist, target_event, given)
    return InfoValue(_log_prob(posterior, base) - _log_prob(prior, base), base)


def co_information(
    dist: JointDistribution, realisation: Realisation, base: float = 2.0
) -> InfoValue:
    """Bivariate pointwise co-information ``i(s1;t) + i(s2;t) - i(s1,s2;t)``.

    Positive values indicate overlap of the two individual informations,
    negative values indicate synergy; unlike the lattice decomposition it
    conflates the two, which is what makes it a useful diagnostic foil.
    """
    if dist.n != 2:
        raise SchemaError("co-information is defined here for two predictors")
    parts = [
        pointwise_mutual_information(dist, realisation, SourceEvent.of(1), base=base).value,
        pointwise_mutual_information(dist, realisation, SourceEvent.of(2), base=base).value,
        pointwise_mutual_information(dist, realisation, SourceEvent.of(1, 2), base=base).value,
    ]
    return InfoValue(parts[0] + parts[1] - parts[2], base)


def average(
    dist: JointDistribution,
    fn: Callable[[Realisation], Union[InfoValue, float]],
    base: float = 2.0,
) -> InfoValue:
    """Support-weighted expectation of a pointwise functional.

    Uses compensated summation, so desk-scale averages of exactly
    representable pointwise values stay exact.
    """
    terms = []
    for row in dist.support:
        value = fn(row)
        terms.append(float(row.p) * float(value))
    return InfoValue(math.fsum(terms), base)


def mutual_information(
    dist: JointDistribution,
    source: Union[SourceEvent, None] = None,
    base: float = 2.0,
) -> InfoValue:
    """Average mutual information ``I(S_a; T)`` carried by a source set."""
    return average(
        dist,
        lambda row: pointwise_mutual_information(dist, row, source, base=base),
        base,
    )
