"""Named invariant checks for a distribution and its decomposition.

Every public function returns a :class:`CheckResult` holding the worst
observed violation, so a caller can both gate on ``ok`` and report how
close the run came to the tolerance.  :func:`run_all` bundles the checks
that apply to a given distribution; the command-line ``verify`` command
prints one line per result.

The checks deliberately recompute their reference values through routes
different from the decomposition engine (probability ratios, library
entropy sums, the closed-form increment), so agreement is evidence and
not tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional

from specamb.decomposition import (
    AtomTable,
    coarsening_invariance_report,
    decompose,
    node_redundancy,
    rmin_ambiguity,
    rmin_specificity,
    target_chain_rule_report,
)
from specamb.distribution import JointDistribution, SchemaError, SourceEvent
from specamb.lattice import DEFAULT_MAX_PREDICTORS, closed_form_partial, lattice_for
from specamb.measures import (
    ambiguity,
    average,
    pointwise_mutual_information,
    specificity,
)

__all__ = [
    "CheckResult",
    "check_mass_normalisation",
    "check_recombination_identity",
    "check_member_permutation",
    "check_superset_irrelevance",
    "check_self_redundancy",
    "check_lattice_monotonicity",
    "check_partial_nonnegativity",
    "check_mobius_reconstruction",
    "check_closed_form_agreement",
    "check_pointwise_sums",
    "check_total_information",
    "check_bivariate_consistency",
    "check_coarsening_invariance",
    "check_target_chain_rule",
    "check_conditional_corollaries",
    "run_all",
]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named invariant check."""

    name: str
    ok: bool
    worst: float
    detail: str

    def __str__(self) -> str:
        flag = "pass" if self.ok else "FAIL"
        return f"{flag}  {self.name}: {self.detail} (worst {self.worst:.3g})"


def _result(name: str, worst: float, tol: float, detail: str) -> CheckResult:
    return CheckResult(name, worst <= tol, worst, detail)


def _table(
    dist: JointDistribution,
    table: Optional[AtomTable],
    base: float,
    max_predictors: int,
) -> AtomTable:
    if table is not None:
        return table
    return decompose(dist, base=base, max_predictors=max_predictors)


def _events(n: int) -> list[SourceEvent]:
    out: list[SourceEvent] = []
    for size in range(1, n + 1):
        out.extend(SourceEvent.of(*combo) for combo in combinations(range(1, n + 1), size))
    return out


def check_mass_normalisation(
    dist: JointDistribution, *, tol: float = 1e-9
) -> CheckResult:
    """Support masses are positive and sum to one."""
    total = sum(dist.mass.values(), Fraction(0))
    worst = abs(float(total) - 1.0)
    bad = sum(1 for p in dist.mass.values() if p <= 0)
    if bad:
        return CheckResult("mass-normalisation", False, float("inf"),
                           f"{bad} non-positive masses")
    return _result("mass-normalisation", worst, tol, f"total mass {float(total)!r}")


def check_recombination_identity(
    dist: JointDistribution, *, tol: float = 1e-9, base: float = 2.0
) -> CheckResult:
    """Signed pointwise information equals specificity minus ambiguity.

    The left side is a single probability ratio; the right side is the
    difference of two surprisals.
    """
    worst = 0.0
    for realisation in dist.support:
        for event in _events(dist.n):
            pmi = float(pointwise_mutual_information(dist, realisation, event, base=base))
            split = float(specificity(dist, event, realisation, base=base)) - float(
                ambiguity(dist, event, realisation, base=base)
            )
            worst = max(worst, abs(pmi - split))
    return _result("recombination-identity", worst, tol,
                   f"{len(dist.support)} realisations, all source events")


def check_member_permutation(
    dist: JointDistribution,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Node redundancies ignore the order in which members are listed."""
    lattice = lattice_for(dist.n, max_predictors)
    worst = 0.0
    for realisation in dist.support:
        for node in lattice.nodes:
            members = list(node.sources)
            for perm in (list(reversed(members)), members[1:] + members[:1]):
                worst = max(
                    worst,
                    abs(rmin_specificity(dist, perm, realisation, base=base)
                        - rmin_specificity(dist, node, realisation, base=base)),
                    abs(rmin_ambiguity(dist, perm, realisation, base=base)
                        - rmin_ambiguity(dist, node, realisation, base=base)),
                )
    return _result("member-permutation", worst, tol, "reversed and rotated members")


def check_superset_irrelevance(
    dist: JointDistribution,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Adding a superset of an existing member never moves the minimum."""
    lattice = lattice_for(dist.n, max_predictors)
    full = SourceEvent.of(*range(1, dist.n + 1))
    worst = 0.0
    for realisation in dist.support:
        for node in lattice.nodes:
            padded = list(node.sources) + [full]
            worst = max(
                worst,
                abs(rmin_specificity(dist, padded, realisation, base=base)
                    - rmin_specificity(dist, node, realisation, base=base)),
                abs(rmin_ambiguity(dist, padded, realisation, base=base)
                    - rmin_ambiguity(dist, node, realisation, base=base)),
            )
    return _result("superset-irrelevance", worst, tol,
                   "every node padded with the full predictor event")


def check_self_redundancy(
    dist: JointDistribution, *, tol: float = 1e-9, base: float = 2.0
) -> CheckResult:
    """Single-member nodes reduce to the event's own surprisals."""
    worst = 0.0
    for realisation in dist.support:
        for event in _events(dist.n):
            worst = max(
                worst,
                abs(rmin_specificity(dist, [event], realisation, base=base)
                    - float(specificity(dist, event, realisation, base=base))),
                abs(rmin_ambiguity(dist, [event], realisation, base=base)
                    - float(ambiguity(dist, event, realisation, base=base))),
            )
    return _result("self-redundancy", worst, tol, "all single-event nodes")


def check_lattice_monotonicity(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Both node redundancies grow along the lattice order."""
    table = _table(dist, table, base, max_predictors)
    lattice = table.lattice
    worst = 0.0
    for rows in table.pointwise.values():
        for alpha in lattice.nodes:
            for beta in lattice.nodes:
                if alpha is beta or not lattice.leq(alpha, beta):
                    continue
                worst = max(
                    worst,
                    rows[alpha].r_plus - rows[beta].r_plus,
                    rows[alpha].r_minus - rows[beta].r_minus,
                )
    worst = max(worst, 0.0)
    return _result("lattice-monotonicity", worst, tol,
                   "all ordered node pairs, all realisations")


def check_partial_nonnegativity(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Per-half increments are non-negative (the recombined ones may not be)."""
    table = _table(dist, table, base, max_predictors)
    low = 0.0
    for rows in table.pointwise.values():
        for row in rows.values():
            low = min(low, row.pi_plus, row.pi_minus)
    return _result("partial-nonnegativity", max(0.0, -low), tol,
                   "pi+ and pi- at every node and realisation")


def check_mobius_reconstruction(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Summing increments over a down-set recovers the cumulative value."""
    table = _table(dist, table, base, max_predictors)
    lattice = table.lattice
    worst = 0.0
    for rows in table.pointwise.values():
        for node in lattice.nodes:
            down = lattice.down_set(node)
            plus = math.fsum(rows[beta].pi_plus for beta in down)
            minus = math.fsum(rows[beta].pi_minus for beta in down)
            worst = max(
                worst,
                abs(plus - rows[node].r_plus),
                abs(minus - rows[node].r_minus),
            )
    return _result("mobius-reconstruction", worst, tol,
                   "cumulative values rebuilt from increments")


def check_closed_form_agreement(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """The cover-difference shortcut matches the recursive inversion."""
    table = _table(dist, table, base, max_predictors)
    lattice = table.lattice
    worst = 0.0
    for realisation, rows in table.pointwise.items():
        h_plus = {
            event: rmin_specificity(dist, [event], realisation, base=base)
            for event in _events(dist.n)
        }
        h_minus = {
            event: rmin_ambiguity(dist, [event], realisation, base=base)
            for event in _events(dist.n)
        }
        for node in lattice.nodes:
            worst = max(
                worst,
                abs(closed_form_partial(lattice, node, h_plus) - rows[node].pi_plus),
                abs(closed_form_partial(lattice, node, h_minus) - rows[node].pi_minus),
            )
    return _result("closed-form-agreement", worst, tol,
                   "direct increment vs recursive inversion")


def check_pointwise_sums(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Increments over the whole lattice sum to the full-event surprisals."""
    table = _table(dist, table, base, max_predictors)
    full = SourceEvent.of(*range(1, dist.n + 1))
    worst = 0.0
    for realisation in table.pointwise:
        plus, minus = table.pointwise_sums(realisation)
        worst = max(
            worst,
            abs(plus - float(specificity(
                dist, full, realisation,
                given_components=table.given_components, base=base))),
            abs(minus - float(ambiguity(
                dist, full, realisation,
                given_components=table.given_components, base=base))),
        )
    return _result("pointwise-sums", worst, tol,
                   "lattice totals vs full-event surprisals")


def check_total_information(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Averaged recombined increments sum to the mutual information."""
    table = _table(dist, table, base, max_predictors)
    given = table.given_components

    def signed(realisation) -> float:
        return float(pointwise_mutual_information(
            dist, realisation, given_components=given, base=base))

    information = float(average(dist, signed, base=base))
    worst = abs(float(table.total()) - information)
    return _result("total-information", worst, tol,
                   f"atom total vs mutual information {information:.6g}")


def check_bivariate_consistency(
    dist: JointDistribution,
    table: Optional[AtomTable] = None,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """With two predictors the four atoms tile the single-event surprisals."""
    if dist.n != 2:
        raise SchemaError("bivariate consistency applies to two predictors only")
    table = _table(dist, table, base, max_predictors)
    given = table.given_components
    worst = 0.0
    for realisation, rows in table.pointwise.items():
        atoms = table.bivariate_atoms(realisation)
        for sign, pick in (("plus", lambda r: r.pi_plus), ("minus", lambda r: r.pi_minus)):
            fn = specificity if sign == "plus" else ambiguity
            r = pick(atoms["R"])
            u1 = pick(atoms["U1"])
            u2 = pick(atoms["U2"])
            c = pick(atoms["C"])
            for total, parts in (
                (fn(dist, SourceEvent.of(1), realisation,
                    given_components=given, base=base), r + u1),
                (fn(dist, SourceEvent.of(2), realisation,
                    given_components=given, base=base), r + u2),
                (fn(dist, SourceEvent.of(1, 2), realisation,
                    given_components=given, base=base), r + u1 + u2 + c),
            ):
                worst = max(worst, abs(float(total) - parts))
    return _result("bivariate-consistency", worst, tol,
                   "atom sums vs single- and joint-event surprisals")


def check_coarsening_invariance(
    dist: JointDistribution,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Merging unrealised targets into one event moves nothing."""
    report = coarsening_invariance_report(dist, base=base, max_predictors=max_predictors)
    return _result("coarsening-invariance", report.max_abs_residual, tol,
                   "two-event coarsening at every realised target")


def check_target_chain_rule(
    dist: JointDistribution,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """Redundancy about a composite target telescopes over its components."""
    if dist.schema.target_components is None:
        raise ValueError("the chain rule applies to composite targets only")
    worst = 0.0
    names = dist.schema.target_components
    orders = [names, tuple(reversed(names))]
    for order in orders:
        report = target_chain_rule_report(
            dist, order, base=base, max_predictors=max_predictors
        )
        worst = max(worst, report.max_abs_residual)
    return _result("target-chain-rule", worst, tol,
                   "declared order and its reverse")


def check_conditional_corollaries(
    dist: JointDistribution,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> CheckResult:
    """The three identities tying conditional forms to plain ones.

    For target components a and b: conditional specificity towards b
    equals the ambiguity towards b; specificity does not depend on the
    target at all; ambiguity towards a conditioned on b equals ambiguity
    towards the pair.
    """
    names = dist.schema.target_components
    if names is None or len(names) < 2:
        raise ValueError("conditional corollaries need at least two target components")
    lattice = lattice_for(dist.n, max_predictors)
    reduced = {name: dist.compose_targets((name,)) for name in names}
    slots = {name: dist.schema.component_index(name) for name in names}
    worst = 0.0
    for realisation in dist.support:
        for node in lattice.nodes:
            plain_plus = rmin_specificity(dist, node, realisation, base=base)
            for name, sub in reduced.items():
                sub_real = sub.realisation(
                    realisation.predictors, (realisation.target[slots[name]],)
                )
                worst = max(worst, abs(
                    rmin_specificity(sub, node, sub_real, base=base) - plain_plus))
            for a, b in permutations(names, 2):
                cond_plus = rmin_specificity(dist, node, realisation, given=(b,), base=base)
                amb_b = rmin_ambiguity(dist, node, realisation, components=(b,), base=base)
                cond_minus = rmin_ambiguity(
                    dist, node, realisation, components=(a,), given=(b,), base=base
                )
                pair_minus = rmin_ambiguity(
                    dist, node, realisation, components=(a, b), base=base
                )
                worst = max(
                    worst,
                    abs(cond_plus - amb_b),
                    abs(cond_minus - pair_minus),
                )
    return _result("conditional-corollaries", worst, tol,
                   "all ordered component pairs, all nodes")


def run_all(
    dist: JointDistribution,
    *,
    tol: float = 1e-9,
    base: float = 2.0,
    max_predictors: int = DEFAULT_MAX_PREDICTORS,
) -> tuple[CheckResult, ...]:
    """Run every check that applies to this distribution."""
    table = decompose(dist, base=base, max_predictors=max_predictors)
    results = [
        check_mass_normalisation(dist, tol=tol),
        check_recombination_identity(dist, tol=tol, base=base),
        check_member_permutation(dist, tol=tol, base=base, max_predictors=max_predictors),
        check_superset_irrelevance(dist, tol=tol, base=base, max_predictors=max_predictors),
        check_self_redundancy(dist, tol=tol, base=base),
        check_lattice_monotonicity(dist, table, tol=tol, base=base),
        check_partial_nonnegativity(dist, table, tol=tol, base=base),
        check_mobius_reconstruction(dist, table, tol=tol, base=base),
        check_closed_form_agreement(dist, table, tol=tol, base=base),
        check_pointwise_sums(dist, table, tol=tol, base=base),
        check_total_information(dist, table, tol=tol, base=base),
        check_coarsening_invariance(dist, tol=tol, base=base, max_predictors=max_predictors),
    ]
    if dist.n == 2:
        results.insert(11, check_bivariate_consistency(dist, table, tol=tol, base=base))
    names = dist.schema.target_components
    if names is not None and len(names) >= 2:
        results.append(check_target_chain_rule(
            dist, tol=tol, base=base, max_predictors=max_predictors))
        results.append(check_conditional_corollaries(
            dist, tol=tol, base=base, max_predictors=max_predictors))
    return tuple(results)
