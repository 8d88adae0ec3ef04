"""Acceptance gate: ten numbered criteria, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL
line for every criterion.  Each criterion states its own tolerance; the
random sweeps draw exact rational distributions from a fixed seed, so a
failure is always reproducible.
"""

import itertools
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

from conftest import random_rational_distribution
from specamb.checks import (
    check_closed_form_agreement,
    check_conditional_corollaries,
    check_lattice_monotonicity,
    check_member_permutation,
    check_mobius_reconstruction,
    check_partial_nonnegativity,
    check_self_redundancy,
    check_superset_irrelevance,
)
from specamb.corpus import BIVARIATE_CORPUS_NAMES, CORPUS_NAMES, build, expected_atoms
from specamb.decomposition import (
    coarsening_invariance_report,
    decompose,
    target_chain_rule_report,
)
from specamb.distribution import SourceEvent
from specamb.kelly import (
    RaceMarket,
    accumulator_log_return,
    simulate_races,
    value_of_side_information,
)
from specamb.lattice import enumerate_nodes, lattice_for, meet, node_leq
from specamb.measures import ambiguity, mutual_information, specificity

TIGHT = 1e-9
PRINTED = 1e-3
NOISE = 1e-12

ATOM_ORDER = ("R", "U1", "U2", "C")


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {number}: {description}", flush=True)
        raise
    print(f"PASS criterion {number}: {description}", flush=True)


def averaged_atoms(dist, **kwargs):
    table = decompose(dist, **kwargs)
    atoms = table.bivariate_atoms()
    return tuple(atoms[name].pi for name in ATOM_ORDER)


def scalar_instances(count, seed):
    rng = random.Random(seed)
    half = count // 2
    return [
        random_rational_distribution(rng, n)
        for n in (2, 3)
        for _ in range(half if n == 2 else count - half)
    ]


def composite_instances(count, seed):
    rng = random.Random(seed)
    return [
        random_rational_distribution(rng, 2, composite=True) for _ in range(count)
    ]


def test_criterion_01_bivariate_corpus_averages():
    with criterion(1, "bivariate corpus averages match the worked values"):
        started = time.perf_counter()
        exact = {
            "xor": (0.0, 0.0, 0.0, 1.0),
            "pwunq": (0.0, 0.5, 0.5, 0.0),
            "tbc": (1.0, 0.0, 0.0, 1.0),
            "unq": (1.0, 0.0, -1.0, 1.0),
        }
        for name, want in exact.items():
            got = averaged_atoms(build(name))
            for label, a, b in zip(ATOM_ORDER, got, want):
                assert abs(a - b) <= TIGHT, f"{name} {label}: {a} != {b}"

        got = averaged_atoms(build("and"))
        printed = (0.561, -0.25, -0.25, 0.75)
        closed = (1.75 - 0.75 * math.log2(3), -0.25, -0.25, 0.75)
        for label, a, rough, fine in zip(ATOM_ORDER, got, printed, closed):
            assert abs(a - rough) <= PRINTED, f"and {label}: {a} vs printed {rough}"
            assert abs(a - fine) <= TIGHT, f"and {label}: {a} vs closed {fine}"

        got = averaged_atoms(build("rdnerr"))
        entropy = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
        printed = (1.0, 0.0, -0.811, 0.811)
        closed = (1.0, 0.0, -entropy, entropy)
        for label, a, rough, fine in zip(ATOM_ORDER, got, printed, closed):
            assert abs(a - rough) <= PRINTED, f"rdnerr {label}: {a} vs printed {rough}"
            assert abs(a - fine) <= TIGHT, f"rdnerr {label}: {a} vs closed {fine}"

        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"took {elapsed:.2f} s, budget 1 s"


def test_criterion_02_pointwise_fixture_columns():
    with criterion(2, "every pointwise fixture column matches at 1e-9"):
        for name in BIVARIATE_CORPUS_NAMES:
            dist = build(name)
            table = decompose(dist)
            for row in expected_atoms(name).rows:
                real = dist.realisation(row.predictors, row.target)
                atoms = table.bivariate_atoms(real)
                for label, prefix in zip(ATOM_ORDER, ("r", "u1", "u2", "c")):
                    for side, got in (
                        ("plus", atoms[label].pi_plus),
                        ("minus", atoms[label].pi_minus),
                    ):
                        want = row.columns[f"{prefix}_{side}"]
                        assert abs(got - want) <= TIGHT, (
                            f"{name} {row.predictors}->{row.target} "
                            f"{prefix}_{side}: {got} != {want}"
                        )
                for column, indices in (("i1", (1,)), ("i2", (2,)), ("i12", (1, 2))):
                    event = SourceEvent.of(*indices)
                    plus = float(specificity(dist, event, real))
                    minus = float(ambiguity(dist, event, real))
                    assert abs(plus - row.columns[f"{column}_plus"]) <= TIGHT
                    assert abs(minus - row.columns[f"{column}_minus"]) <= TIGHT


def test_criterion_03_trivariate_even_parity():
    with criterion(3, "even-parity triple puts 1 bit at two nodes, zero elsewhere"):
        started = time.perf_counter()
        table = decompose(build("tbep"))
        nonzero = {"{1}{2}{3}": 1.0, "{12}{13}{23}": 1.0}
        assert len(table.nodes) == 18
        for node in table.nodes:
            want = nonzero.get(str(node))
            rows = [table.averages[node]] + [
                table.pointwise[real][node] for real in table.pointwise
            ]
            for row in rows:
                if want is None:
                    assert abs(row.pi_plus) <= NOISE, f"{node}: {row.pi_plus}"
                else:
                    assert abs(row.pi_plus - want) <= TIGHT, f"{node}: {row.pi_plus}"
                assert abs(row.pi_minus) <= NOISE, f"{node}: {row.pi_minus}"
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"took {elapsed:.2f} s, budget 1 s"


def brute_force_nodes(n):
    events = [
        frozenset(c)
        for size in range(1, n + 1)
        for c in combinations(range(1, n + 1), size)
    ]
    nodes = []
    for bits in range(1, 1 << len(events)):
        members = [e for k, e in enumerate(events) if (bits >> k) & 1]
        if any(
            a != b and a.issubset(b) for a in members for b in members
        ):
            continue
        nodes.append(frozenset(members))
    return set(nodes)


def test_criterion_04_lattice_structure():
    with criterion(4, "node counts, order axioms and meet-as-glb verified"):
        for n, count in ((1, 1), (2, 4), (3, 18)):
            assert len(enumerate_nodes(n)) == count
        oracle = brute_force_nodes(4)
        assert len(oracle) == 166
        engine = {
            frozenset(frozenset(s.indices) for s in node.sources)
            for node in enumerate_nodes(4)
        }
        assert engine == oracle

        for n in (1, 2, 3):
            lattice = lattice_for(n)
            nodes = lattice.nodes
            for a in nodes:
                assert node_leq(a, a)
            for a in nodes:
                for b in nodes:
                    if node_leq(a, b) and node_leq(b, a):
                        assert a == b
                    glb = meet(a, b)
                    assert node_leq(glb, a) and node_leq(glb, b)
                    for c in nodes:
                        if node_leq(a, b) and node_leq(b, c):
                            assert node_leq(a, c)
                        if node_leq(c, a) and node_leq(c, b):
                            assert node_leq(c, glb)


def test_criterion_05_theorem_property_suites():
    with criterion(5, "axioms, monotonicity, nonnegativity, closed form on 500+ instances"):
        dists = [build(name) for name in CORPUS_NAMES]
        dists += scalar_instances(500, seed=20260814)
        failures = []
        for k, dist in enumerate(dists):
            table = decompose(dist)
            results = (
                check_member_permutation(dist, tol=TIGHT),
                check_superset_irrelevance(dist, tol=TIGHT),
                check_self_redundancy(dist, tol=TIGHT),
                check_lattice_monotonicity(dist, table, tol=TIGHT),
                check_partial_nonnegativity(dist, table, tol=TIGHT),
                check_closed_form_agreement(dist, table, tol=TIGHT),
                check_mobius_reconstruction(dist, table, tol=TIGHT),
            )
            failures += [f"instance {k}: {r}" for r in results if not r.ok]
        assert len(dists) >= 507
        assert not failures, "\n".join(failures[:10])


def test_criterion_06_target_chain_rule():
    with criterion(6, "composite-target additivity and the averaged table rows"):
        tbc = build("tbc")
        for pair in (("t1", "t2"), ("t1", "t3"), ("t2", "t3")):
            sub = tbc.compose_targets(pair)
            for order in (pair, tuple(reversed(pair))):
                report = target_chain_rule_report(sub, order)
                assert report.max_abs_residual <= TIGHT, f"{order}: {report.max_abs_residual}"

        for k, dist in enumerate(composite_instances(100, seed=9)):
            names = dist.schema.target_components
            for order in (names, tuple(reversed(names))):
                report = target_chain_rule_report(dist, order)
                assert report.max_abs_residual <= TIGHT, f"instance {k} {order}"

        towards_t3 = averaged_atoms(tbc.compose_targets(("t3",)))
        assert abs(towards_t3[3] - 1.0) <= TIGHT, f"C(->t3) = {towards_t3[3]}"
        given_t3 = averaged_atoms(tbc.compose_targets(("t1", "t3")), given=("t3",))
        assert abs(given_t3[0] - 1.0) <= TIGHT, f"R(->t1|t3) = {given_t3[0]}"
        towards_t1 = averaged_atoms(tbc.compose_targets(("t1",)))
        assert abs(towards_t1[0] - 1.0) <= TIGHT, f"R(->t1) = {towards_t1[0]}"
        assert abs(towards_t1[2] + 1.0) <= TIGHT, f"U2(->t1) = {towards_t1[2]}"
        assert abs(towards_t1[3] - 1.0) <= TIGHT, f"C(->t1) = {towards_t1[3]}"


def test_criterion_07_conditional_corollaries():
    with criterion(7, "conditional redundancy corollaries on 500 composite instances"):
        failures = []
        for k, dist in enumerate(composite_instances(500, seed=4711)):
            result = check_conditional_corollaries(dist, tol=TIGHT)
            if not result.ok:
                failures.append(f"instance {k}: {result}")
        assert not failures, "\n".join(failures[:10])


def test_criterion_08_coarsening_invariance():
    with criterion(8, "two-event target coarsening leaves node values unchanged"):
        dists = [build(name) for name in CORPUS_NAMES]
        dists += scalar_instances(150, seed=31337)
        dists += composite_instances(100, seed=31338)
        for k, dist in enumerate(dists):
            report = coarsening_invariance_report(dist)
            assert report.max_abs_residual <= TIGHT, f"instance {k}: {report.max_abs_residual}"


def test_criterion_09_kelly_markets():
    with criterion(9, "doubling rates, Monte Carlo, accumulators, wealth narratives"):
        started = time.perf_counter()
        for name in BIVARIATE_CORPUS_NAMES + ("tbep",):
            dist = build(name)
            predictors = dist.schema.predictors
            for count in range(1, dist.n + 1):
                for wire in combinations(predictors, count):
                    market = RaceMarket(dist, wire=wire)
                    gain = float(value_of_side_information(market))
                    names = wire + (dist.schema.target,)
                    info = float(mutual_information(dist.marginal(names)))
                    assert abs(gain - info) <= TIGHT, f"{name} wire {wire}"

        market = RaceMarket(build("rdnerr"), wire=("s2",))
        for seed in range(10):
            result = simulate_races(market, 100_000, seed)
            gap = abs(result.empirical_rate - result.analytic_rate)
            assert gap <= 0.05, f"seed {seed}: gap {gap}"

        for name, wire in (("tbc", ("s1",)), ("tbc", ("s1", "s2")), ("tbep", ("s1", "s3"))):
            dist = build(name)
            market = RaceMarket(dist, wire=wire)
            slots = [dist.schema.predictors.index(v) for v in wire]
            for real in dist.support:
                msg = tuple(real.predictors[i] for i in slots)
                totals = [
                    float(accumulator_log_return(market, msg, real.target, order))
                    for order in itertools.permutations(dist.schema.target_components)
                ]
                assert max(totals) - min(totals) <= TIGHT, f"{name} {msg} {real.target}"

        one_wire = simulate_races(RaceMarket(build("tbc"), wire=("s1",)), 1000, 0)
        assert abs(one_wire.analytic_rate - 1.0) <= TIGHT
        assert abs(one_wire.final_log_wealth - 1000.0) <= TIGHT
        both_wires = simulate_races(RaceMarket(build("tbc"), wire=("s1", "s2")), 1000, 0)
        assert abs(both_wires.analytic_rate - 2.0) <= TIGHT
        assert abs(both_wires.final_log_wealth - 2000.0) <= TIGHT

        elapsed = time.perf_counter() - started
        assert elapsed < 30.0, f"took {elapsed:.2f} s, budget 30 s"


def test_criterion_10_negative_unique_information():
    with criterion(10, "misinformative unique atoms come out negative"):
        rdnerr = averaged_atoms(build("rdnerr"))
        assert rdnerr[2] < 0.0, f"rdnerr U2 = {rdnerr[2]}"
        unq = averaged_atoms(build("unq"))
        assert abs(unq[2] + 1.0) <= TIGHT, f"unq U2 = {unq[2]}"
