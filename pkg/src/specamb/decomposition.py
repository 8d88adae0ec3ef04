"""Decomposition of pointwise mutual information over redundancy lattices.

The pipeline runs twice per support row, once for each half of the
``i = specificity - ambiguity`` split:

1. the redundancy a node carries is the *minimum* specificity (or
   ambiguity) over its member source events,
2. Moebius inversion over the lattice turns these cumulative node values
   into per-node increments ``pi_plus`` and ``pi_minus``,
3. the recombined increment ``pi = pi_plus - pi_minus`` is the signed
   share of pointwise mutual information unique to that node.

Both halves are nonnegative at every node and sum over the lattice to the
joint surprisal ``h(s1..sn)`` and ``h(s1..sn | t)`` respectively, so the
recombined increments always account for exactly ``i(s1..sn; t)``.
Averaging the table row-by-row with the support masses gives the familiar
set-level decomposition of ``I(S1..Sn; T)``.

Composite targets support conditional decompositions: ``given`` names the
target components held fixed, and all redundancies become conditional on
their realised events.  The target chain rule (redundancy about a joint
target equals the sum of conditional redundancies in any component order)
and the two-event target coarsening invariance are exposed as report
functions, since they are the load-bearing consistency properties of the
construction.

Probabilities are compared as exact rationals and only the final value
takes a logarithm, so the minimum in step 1 and every equality the reports
check are immune to float noise.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from types import MappingProxyType
from typing import Union

from specamb.distribution import (
    JointDistribution,
    MassError,
    Realisation,
    SchemaError,
    SourceEvent,
)
from specamb.lattice import (
    DEFAULT_MAX_PREDICTORS,
    Lattice,
    LatticeNode,
    lattice_for,
)
from specamb.measures import InfoValue

__all__ = [
    "AtomRow",
    "AtomTable",
    "ZERO_CLAMP",
    "rmin_specificity",
    "rmin_ambiguity",
    "node_redundancy",
    "decompose",
    "ChainRuleReport",
    "target_chain_rule_report",
    "CoarseningReport",
    "coarsening_invariance_report",
]

ZERO_CLAMP = 1e-12

BIVARIATE_ATOM_NAMES = ("R", "U1", "U2", "C")


@dataclass(frozen=True)
class AtomRow:
    """Values attached to one lattice node (pointwise or averaged)."""

    r_plus: float
    r_minus: float
    pi_plus: float
    pi_minus: float
    pi: float


def _surprisal(p: Fraction, base: float) -> float:
    if p <= 0:
        raise MassError("surprisal of a zero-probability event")
    if base == 2.0:
        return -math.log2(p)
    return -math.log2(p) / math.log2(base)


def _component_slot(dist: JointDistribution, name: str) -> int:
    """Index of a target component within the stored target event tuple."""
    schema = dist.schema
    if schema.target_components is None:
        if name != schema.target:
            raise SchemaError(f"unknown target component {name!r}")
        return 0
    return schema.component_index(name)


def _member_probability(
    dist: JointDistribution,
    source: SourceEvent,
    realisation: Realisation,
    conditioning: Sequence[str],
) -> Fraction:
    """P(source event | realised conditioning components), exactly."""
    event: dict[str, object] = {
        dist.schema.predictors[i - 1]: label
        for i, label in zip(source.indices, realisation.source_labels(source))
    }
    if not conditioning:
        return dist.probability(event)
    given = {
        name: realisation.target[_component_slot(dist, name)] for name in conditioning
    }
    denom = dist.probability(given)
    if denom == 0:
        raise MassError(f"conditioning event {given!r} has zero probability")
    return dist.probability({**event, **given}) / denom


def _component_names(dist: JointDistribution) -> tuple[str, ...]:
    schema = dist.schema
    if schema.target is None:
        raise SchemaError("this distribution has no target to decompose against")
    if schema.target_components is not None:
        return schema.target_components
    return (schema.target,)


def _resolve_components(
    dist: JointDistribution, names: Union[Sequence[str], None]
) -> tuple[str, ...]:
    available = _component_names(dist)
    if names is None:
        return available
    for name in names:
        if name not in available:
            raise SchemaError(f"unknown target component {name!r}; have {available!r}")
    if len(set(names)) != len(names):
        raise SchemaError(f"repeated target components in {names!r}")
    return tuple(names)


def _sources_of(sources: Union[LatticeNode, Iterable[SourceEvent]]) -> tuple[SourceEvent, ...]:
    if isinstance(sources, LatticeNode):
        return sources.sources
    out = tuple(sources)
    if not out:
        raise SchemaError("at least one source event is required")
    return out


def rmin_specificity(
    dist: JointDistribution,
    sources: Union[LatticeNode, Iterable[SourceEvent]],
    realisation: Realisation,
    *,
    given: Sequence[str] = (),
    base: float = 2.0,
) -> float:
    """Minimum (conditional) specificity over a collection of source events.

    Accepts any nonempty collection, not only antichains: the value is
    invariant under member order and under adding a superset of an existing
    member, which is what makes the lattice of antichains sufficient.
    ``given`` names target components to condition on; without them the
    value is target-independent.
    """
    given = _resolve_components(dist, given)
    best = max(
        _member_probability(dist, a, realisation, given) for a in _sources_of(sources)
    )
    return _surprisal(best, base)


def rmin_ambiguity(
    dist: JointDistribution,
    sources: Union[LatticeNode, Iterable[SourceEvent]],
    realisation: Realisation,
    *,
    components: Union[Sequence[str], None] = None,
    given: Sequence[str] = (),
    base: float = 2.0,
) -> float:
    """Minimum ambiguity over source events, towards the realised target.

    ``components`` selects the part of a composite target the ambiguity is
    towards (default: all of it); ``given`` adds fixed components.  Both
    end up in the conditioning set, which is why the conditional form
    towards one component given the rest equals the plain form towards
    their union.
    """
    sel = _resolve_components(dist, components)
    giv = _resolve_components(dist, given)
    conditioning = tuple(dict.fromkeys(tuple(sel) + tuple(giv)))
    best = max(
        _member_probability(dist, a, realisation, conditioning)
        for a in _sources_of(sources)
    )
    return _surprisal(best, base)


def node_redundancy(
    dist: JointDistribution,
    sources: Union[LatticeNode, Iterable[SourceEvent]],
    realisation: Realisation,
    *,
    components: Union[Sequence[str], None] = None,
    given: Sequence[str] = (),
    base: float = 2.0,
) -> float:
    """Recombined redundancy: specificity minus ambiguity at a node."""
    return rmin_specificity(dist, sources, realisation, given=given, base=base) - rmin_ambiguity(
        dist, sources, realisation, components=components, given=given, base=base
    )


class AtomTable:
    """Pointwise and averaged lattice increments for one decomposition."""

    __slots__ = (
        "dist",
        "lattice",
        "target_components",
        "given_components",
        "base",
        "pointwise",
        "averages",
    )

    def __init__(
        self,
        dist: JointDistribution,
        lattice: Lattice,
        target_components: tuple[str, ...],
        given_components: tuple[str, ...],
        base: float,
        pointwise: dict[Realisation, dict[LatticeNode, AtomRow]],
        averages: dict[LatticeNode, AtomRow],
    ) -> None:
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "target_components", target_components)
        object.__setattr__(self, "given_components", given_components)
        object.__setattr__(self, "base", base)
        object.__setattr__(
            self,
            "pointwise",
            MappingProxyType({r: MappingProxyType(rows) for r, rows in pointwise.items()}),
        )
        object.__setattr__(self, "averages", MappingProxyType(averages))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("AtomTable is immutable")

    @property
    def nodes(self) -> tuple[LatticeNode, ...]:
        return self.lattice.nodes

    @property
    def realisations(self) -> tuple[Realisation, ...]:
        return tuple(self.pointwise)

    def total(self) -> InfoValue:
        """Sum of averaged recombined increments: the mutual information."""
        return InfoValue(math.fsum(row.pi for row in self.averages.values()), self.base)

    def pointwise_sums(self, realisation: Realisation) -> tuple[float, float]:
        """Lattice-wide sums (pi_plus, pi_minus) at one realisation."""
        rows = self.pointwise[realisation]
        return (
            math.fsum(row.pi_plus for row in rows.values()),
            math.fsum(row.pi_minus for row in rows.values()),
        )

    def bivariate_atoms(self, which: str = "average") -> dict[str, AtomRow]:
        """The four named two-predictor atoms R, U1, U2, C.

        ``which`` is ``"average"`` or a realisation from the table.
        """
        if self.dist.n != 2:
            raise SchemaError("named atoms R/U1/U2/C exist only for two predictors")
        rows = self.averages if which == "average" else self.pointwise[which]
        order = (
            LatticeNode.of((1,), (2,)),
            LatticeNode.of((1,)),
            LatticeNode.of((2,)),
            LatticeNode.of((1, 2)),
        )
        return {name: rows[node] for name, node in zip(BIVARIATE_ATOM_NAMES, order)}

    # ------------------------------------------------------------------
    # serialisation

    def to_csv(self, which: str = "both") -> str:
        """Deterministic CSV.  ``which`` is ``pointwise``, ``average`` or ``both``.

        The pointwise block has one row per (realisation, node) with columns
        ``p``, the predictor events, the target event, ``node``, ``r_plus``,
        ``r_minus``, ``pi_plus``, ``pi_minus``, ``pi``.  The averaged block
        drops the realisation columns.
        """
        if which not in ("pointwise", "average", "both"):
            raise ValueError(f"unknown table selection {which!r}")
        blocks: list[str] = []
        schema = self.dist.schema
        labels = self._atom_labels()
        value_names = ["r_plus", "r_minus", "pi_plus", "pi_minus", "pi"]
        if which in ("pointwise", "both"):
            header = (
                ["p", *schema.predictors]
                + [",".join(self.target_components + self.given_components)]
                + ["node", "atom", *value_names]
            )
            lines = [",".join(_csv_cell(h) for h in header)]
            for realisation, rows in self.pointwise.items():
                for node in self.nodes:
                    row = rows[node]
                    cells = [
                        str(realisation.p),
                        *realisation.predictors,
                        _target_cell(self.dist, realisation, self.target_components, self.given_components),
                        str(node),
                        labels.get(node, ""),
                        *(_fmt(v) for v in _row_values(row)),
                    ]
                    lines.append(",".join(_csv_cell(c) for c in cells))
            blocks.append("\n".join(lines))
        if which in ("average", "both"):
            lines = [",".join(["node", "atom", *value_names])]
            for node in self.nodes:
                row = self.averages[node]
                lines.append(
                    ",".join([
                        _csv_cell(str(node)),
                        labels.get(node, ""),
                        *(_fmt(v) for v in _row_values(row)),
                    ])
                )
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"

    def _atom_labels(self) -> dict[LatticeNode, str]:
        """R/U1/U2/C names for the four two-predictor nodes, else empty."""
        if self.dist.n != 2:
            return {}
        order = (
            LatticeNode.of((1,), (2,)),
            LatticeNode.of((1,)),
            LatticeNode.of((2,)),
            LatticeNode.of((1, 2)),
        )
        return dict(zip(order, BIVARIATE_ATOM_NAMES))

    def to_json_dict(self) -> dict:
        """JSON-ready dict mirroring the CSV content plus table metadata."""
        schema = self.dist.schema
        return {
            "predictors": list(schema.predictors),
            "target_components": list(self.target_components),
            "given_components": list(self.given_components),
            "base": self.base,
            "mode": self.dist.mode,
            "nodes": [str(node) for node in self.nodes],
            "atom_names": {str(n): a for n, a in self._atom_labels().items()},
            "pointwise": [
                {
                    "p": str(realisation.p),
                    "predictors": list(realisation.predictors),
                    "target": list(realisation.target),
                    "atoms": {
                        str(node): _row_dict(rows[node]) for node in self.nodes
                    },
                }
                for realisation, rows in self.pointwise.items()
            ],
            "averages": {str(node): _row_dict(self.averages[node]) for node in self.nodes},
            "total_pi": self.total().value,
        }


def _row_values(row: AtomRow) -> tuple[float, ...]:
    return (row.r_plus, row.r_minus, row.pi_plus, row.pi_minus, row.pi)


def _row_dict(row: AtomRow) -> dict[str, float]:
    return {
        "r_plus": row.r_plus,
        "r_minus": row.r_minus,
        "pi_plus": row.pi_plus,
        "pi_minus": row.pi_minus,
        "pi": row.pi,
    }


def _fmt(x: float) -> str:
    if x == 0:
        x = 0.0
    return format(x, ".12g")


def _csv_cell(value: str) -> str:
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def _target_cell(
    dist: JointDistribution,
    realisation: Realisation,
    target_components: tuple[str, ...],
    given_components: tuple[str, ...],
) -> str:
    index = dist.schema.component_index if dist.schema.target_components is not None else None
    if index is None:
        return realisation.target[0]
    shown = tuple(target_components) + tuple(given_components)
    return ",".join(realisation.target[index(name)] for name in shown)


def _clamp(x: float, active: bool) -> float:
    if active and abs(x) < ZERO_CLAMP:
        return 0.0
    return x


def decompose(
    dist: JointDistribution,
    *,
    given: Sequence[str] = (),
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
    jobs: int = 1,
) -> AtomTable:
    """Full pointwise decomposition of ``i(s1..sn; t | given)`` plus averages.

    ``given`` names target components to hold fixed (conditional
    decomposition); the decomposed-for target is whatever remains.  In
    rational input mode, increments within 1e-12 of zero are reported as
    exact zeros.
    """
    if dist.schema.target is None:
        raise SchemaError("this distribution has no target to decompose against")
    available = _component_names(dist)
    given = _resolve_components(dist, tuple(given))
    target_components = tuple(name for name in available if name not in given)
    if not target_components:
        raise SchemaError("conditioning on every target component leaves nothing to decompose")
    lattice = lattice_for(dist.n, max_predictors)
    clamp_active = dist.mode == "rational"

    # One pass over the support per predictor subset builds every joint
    # mass the per-realisation conditionals can ask for.
    all_sources = [
        SourceEvent(c)
        for size in range(1, dist.n + 1)
        for c in combinations(range(1, dist.n + 1), size)
    ]
    sel_slots = tuple(_component_slot(dist, name) for name in target_components)
    giv_slots = tuple(_component_slot(dist, name) for name in given)

    joint_sel: dict[SourceEvent, dict[tuple, Fraction]] = {a: {} for a in all_sources}
    joint_giv: dict[SourceEvent, dict[tuple, Fraction]] = {a: {} for a in all_sources}
    mass_sel: dict[tuple, Fraction] = {}
    mass_giv: dict[tuple, Fraction] = {}
    for row in dist.support:
        sel_labels = tuple(row.target[k] for k in sel_slots)
        giv_labels = tuple(row.target[k] for k in giv_slots)
        mass_sel[sel_labels + giv_labels] = (
            mass_sel.get(sel_labels + giv_labels, Fraction(0)) + row.p
        )
        mass_giv[giv_labels] = mass_giv.get(giv_labels, Fraction(0)) + row.p
        for a in all_sources:
            labels = row.source_labels(a)
            key_sel = (labels, sel_labels + giv_labels)
            key_giv = (labels, giv_labels)
            joint_sel[a][key_sel] = joint_sel[a].get(key_sel, Fraction(0)) + row.p
            joint_giv[a][key_giv] = joint_giv[a].get(key_giv, Fraction(0)) + row.p

    def solve(realisation: Realisation) -> dict[LatticeNode, AtomRow]:
        sel_labels = tuple(realisation.target[k] for k in sel_slots)
        giv_labels = tuple(realisation.target[k] for k in giv_slots)
        p_plus: dict[SourceEvent, Fraction] = {}
        p_minus: dict[SourceEvent, Fraction] = {}
        for a in all_sources:
            labels = realisation.source_labels(a)
            p_plus[a] = joint_giv[a][(labels, giv_labels)] / mass_giv[giv_labels]
            p_minus[a] = (
                joint_sel[a][(labels, sel_labels + giv_labels)]
                / mass_sel[sel_labels + giv_labels]
            )
        cum_plus = {
            node: _surprisal(max(p_plus[a] for a in node.sources), base)
            for node in lattice.nodes
        }
        cum_minus = {
            node: _surprisal(max(p_minus[a] for a in node.sources), base)
            for node in lattice.nodes
        }
        pi_plus = lattice.mobius_invert(cum_plus)
        pi_minus = lattice.mobius_invert(cum_minus)
        rows: dict[LatticeNode, AtomRow] = {}
        for node in lattice.nodes:
            plus = _clamp(pi_plus[node], clamp_active)
            minus = _clamp(pi_minus[node], clamp_active)
            rows[node] = AtomRow(
                r_plus=cum_plus[node],
                r_minus=cum_minus[node],
                pi_plus=plus,
                pi_minus=minus,
                pi=_clamp(plus - minus, clamp_active),
            )
        return rows

    support = dist.support
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            solved = list(pool.map(solve, support))
    else:
        solved = [solve(r) for r in support]
    pointwise = dict(zip(support, solved))

    averages: dict[LatticeNode, AtomRow] = {}
    for node in lattice.nodes:
        weights = [float(r.p) for r in support]
        cells = [pointwise[r][node] for r in support]
        averages[node] = AtomRow(
            *(
                _clamp(
                    math.fsum(w * v for w, v in zip(weights, values)), clamp_active
                )
                for values in zip(*(_row_values(c) for c in cells))
            )
        )
    return AtomTable(dist, lattice, target_components, given, base, pointwise, averages)


@dataclass(frozen=True)
class ChainRuleReport:
    """Residuals of the target chain rule for one component ordering."""

    order: tuple[str, ...]
    residuals: Mapping[tuple[Realisation, LatticeNode], float]
    max_abs_residual: float

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_abs_residual <= tol


def target_chain_rule_report(
    dist: JointDistribution,
    order: Sequence[str],
    *,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> ChainRuleReport:
    """Check ``r(node -> joint target) = sum of conditional r`` in ``order``.

    Evaluates every lattice node at every support row: the redundancy about
    the joint of the listed components must equal the telescoping sum of
    conditional redundancies, for this and any other ordering.
    """
    order = _resolve_components(dist, tuple(order))
    if not order:
        raise SchemaError("the chain rule needs at least one target component")
    lattice = lattice_for(dist.n, max_predictors)
    residuals: dict[tuple[Realisation, LatticeNode], float] = {}
    worst = 0.0
    for realisation in dist.support:
        for node in lattice.nodes:
            joint = node_redundancy(
                dist, node, realisation, components=order, base=base
            )
            parts = []
            for k, name in enumerate(order):
                parts.append(
                    node_redundancy(
                        dist,
                        node,
                        realisation,
                        components=(name,),
                        given=order[:k],
                        base=base,
                    )
                )
            residual = joint - math.fsum(parts)
            residuals[(realisation, node)] = residual
            worst = max(worst, abs(residual))
    return ChainRuleReport(order, MappingProxyType(residuals), worst)


@dataclass(frozen=True)
class CoarseningReport:
    """Residuals of two-event target coarsening at each realisation."""

    residuals: Mapping[tuple[Realisation, LatticeNode], float]
    max_abs_residual: float

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_abs_residual <= tol


def coarsening_invariance_report(
    dist: JointDistribution,
    *,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CoarseningReport:
    """Check that both node redundancies survive the two-event coarsening.

    For each support row the target is collapsed to "this event or not"
    and every node's specificity and ambiguity redundancies are recomputed
    on the coarsened distribution.  The worst absolute difference is
    reported; the specificity side cannot move at all (the predictor
    marginal is untouched) and the ambiguity side conditions on an event
    of identical mass.
    """
    if dist.schema.target is None:
        raise SchemaError("this distribution has no target to coarsen")
    lattice = lattice_for(dist.n, max_predictors)
    residuals: dict[tuple[Realisation, LatticeNode], float] = {}
    worst = 0.0
    for realisation in dist.support:
        coarse = dist.coarsen_target_to_two_events(realisation.target)
        kept_label = ",".join(realisation.target)
        coarse_real = coarse.realisation(realisation.predictors, kept_label)
        for node in lattice.nodes:
            d_plus = rmin_specificity(dist, node, realisation, base=base) - rmin_specificity(
                coarse, node, coarse_real, base=base
            )
            d_minus = rmin_ambiguity(dist, node, realisation, base=base) - rmin_ambiguity(
                coarse, node, coarse_real, base=base
            )
            residual = max(abs(d_plus), abs(d_minus))
            residuals[(realisation, node)] = residual
            worst = max(worst, residual)
    return CoarseningReport(MappingProxyType(residuals), worst)
