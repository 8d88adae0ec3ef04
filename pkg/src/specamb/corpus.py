"""Canonical example distributions with frozen decomposition tables.

Each builder returns an exact :class:`JointDistribution`; the matching
fixture lists every per-realisation column of the worked bivariate tables
(pointwise specificity and ambiguity of each source event, the four node
increments of each half) as closed forms, so tests can pin the engine
against them at tight tolerance.  The fixtures are written down from the
definitions, not computed by the decomposition engine.

Available names:

``xor``     two independent fair bits, target is their parity.
``pwunq``   one predictor is always zero, the other copies the target
            (which is 1 or 2), alternating roles between rows.
``rdnerr``  both predictors nominally copy a fair bit; the second errs
            with probability ``epsilon`` (default 1/4).
``tbc``     two independent fair bits; composite target ``(t1, t2, t3)``
            with ``t1 = s1``, ``t2 = s2`` and ``t3 = s1 XOR s2``.
``tbep``    three bits of even parity; composite target copies them.
``unq``     target copies the first predictor, second is independent.
``and``     target is the logical AND of two fair bits.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Union

from specamb.distribution import JointDistribution, MassError, SchemaError

__all__ = [
    "CORPUS_NAMES",
    "BIVARIATE_CORPUS_NAMES",
    "build",
    "expected_atoms",
    "tbep_expected_partial_specificity",
    "PointwiseFixture",
    "DecompositionFixture",
    "POINTWISE_COLUMNS",
]

POINTWISE_COLUMNS = (
    "i1_plus",
    "i1_minus",
    "i2_plus",
    "i2_minus",
    "i12_plus",
    "i12_minus",
    "r_plus",
    "u1_plus",
    "u2_plus",
    "c_plus",
    "r_minus",
    "u1_minus",
    "u2_minus",
    "c_minus",
)

BIVARIATE_CORPUS_NAMES = ("xor", "pwunq", "rdnerr", "tbc", "unq", "and")
CORPUS_NAMES = ("xor", "pwunq", "rdnerr", "tbc", "tbep", "unq", "and")


@dataclass(frozen=True)
class PointwiseFixture:
    """Expected per-realisation columns for one support row."""

    predictors: tuple[str, ...]
    target: tuple[str, ...]
    p: Fraction
    columns: Mapping[str, float]


@dataclass(frozen=True)
class DecompositionFixture:
    """Expected pointwise table, column averages and named atoms."""

    name: str
    rows: tuple[PointwiseFixture, ...]
    column_averages: Mapping[str, float]
    atoms: Mapping[str, float]


def _lg(value: Union[Fraction, int]) -> float:
    return math.log2(Fraction(value))


def _epsilon(value: object) -> Fraction:
    eps = Fraction(value)  # type: ignore[arg-type]
    if not 0 <= eps <= 1:
        raise MassError(f"error probability must lie in [0, 1], got {eps}")
    return eps


def build(name: str, *, epsilon: object = Fraction(1, 4)) -> JointDistribution:
    """Construct a corpus distribution by name.

    ``epsilon`` applies to ``rdnerr`` only.  Labels follow the worked
    tables; rows are listed in table order.
    """
    key = name.lower()
    if key == "xor":
        return _bivariate(
            [("1/4", "0", "0", "0"), ("1/4", "0", "1", "1"),
             ("1/4", "1", "0", "1"), ("1/4", "1", "1", "0")]
        )
    if key == "pwunq":
        return _bivariate(
            [("1/4", "0", "1", "1"), ("1/4", "1", "0", "1"),
             ("1/4", "0", "2", "2"), ("1/4", "2", "0", "2")]
        )
    if key == "rdnerr":
        eps = _epsilon(epsilon)
        rows = [
            ((1 - eps) / 2, "0", "0", "0"),
            ((1 - eps) / 2, "1", "1", "1"),
            (eps / 2, "0", "1", "0"),
            (eps / 2, "1", "0", "1"),
        ]
        return _bivariate([r for r in rows if r[0] > 0])
    if key == "tbc":
        return JointDistribution.from_rows(
            [
                ("1/4", ("0", "0"), ("0", "0", "0")),
                ("1/4", ("0", "1"), ("0", "1", "1")),
                ("1/4", ("1", "0"), ("1", "0", "1")),
                ("1/4", ("1", "1"), ("1", "1", "0")),
            ],
            predictors=("s1", "s2"),
            target="t",
            target_components=("t1", "t2", "t3"),
        )
    if key == "tbep":
        triples = [("0", "0", "0"), ("0", "1", "1"), ("1", "0", "1"), ("1", "1", "0")]
        return JointDistribution.from_rows(
            [("1/4", triple, triple) for triple in triples],
            predictors=("s1", "s2", "s3"),
            target="t",
            target_components=("t1", "t2", "t3"),
        )
    if key == "unq":
        return _bivariate(
            [("1/4", "0", "0", "0"), ("1/4", "0", "1", "0"),
             ("1/4", "1", "0", "1"), ("1/4", "1", "1", "1")]
        )
    if key == "and":
        return _bivariate(
            [("1/4", "0", "0", "0"), ("1/4", "0", "1", "0"),
             ("1/4", "1", "0", "0"), ("1/4", "1", "1", "1")]
        )
    raise SchemaError(f"unknown corpus distribution {name!r}; have {CORPUS_NAMES}")


def _bivariate(rows) -> JointDistribution:
    return JointDistribution.from_rows(
        [(p, (s1, s2), t) for p, s1, s2, t in rows],
        predictors=("s1", "s2"),
        target="t",
    )


def _columns(**values: float) -> Mapping[str, float]:
    out = {name: 0.0 for name in POINTWISE_COLUMNS}
    for name, value in values.items():
        if name not in out:
            raise KeyError(name)
        out[name] = float(value)
    return MappingProxyType(out)


def _fixture(name: str, rows: list[PointwiseFixture]) -> DecompositionFixture:
    averages = {
        column: math.fsum(float(row.p) * row.columns[column] for row in rows)
        for column in POINTWISE_COLUMNS
    }
    atoms = {
        "R": averages["r_plus"] - averages["r_minus"],
        "U1": averages["u1_plus"] - averages["u1_minus"],
        "U2": averages["u2_plus"] - averages["u2_minus"],
        "C": averages["c_plus"] - averages["c_minus"],
    }
    return DecompositionFixture(
        name,
        tuple(rows),
        MappingProxyType(averages),
        MappingProxyType(atoms),
    )


def expected_atoms(
    name: str, *, epsilon: object = Fraction(1, 4)
) -> DecompositionFixture:
    """The frozen worked table for a bivariate corpus distribution."""
    key = name.lower()
    if key == "xor":
        cols = _columns(
            i1_plus=1, i1_minus=1, i2_plus=1, i2_minus=1, i12_plus=2, i12_minus=1,
            r_plus=1, c_plus=1, r_minus=1,
        )
        rows = [
            PointwiseFixture(("0", "0"), ("0",), Fraction(1, 4), cols),
            PointwiseFixture(("0", "1"), ("1",), Fraction(1, 4), cols),
            PointwiseFixture(("1", "0"), ("1",), Fraction(1, 4), cols),
            PointwiseFixture(("1", "1"), ("0",), Fraction(1, 4), cols),
        ]
        return _fixture(key, rows)
    if key == "pwunq":
        first = _columns(
            i1_plus=1, i1_minus=1, i2_plus=2, i2_minus=1, i12_plus=2, i12_minus=1,
            r_plus=1, u2_plus=1, r_minus=1,
        )
        second = _columns(
            i1_plus=2, i1_minus=1, i2_plus=1, i2_minus=1, i12_plus=2, i12_minus=1,
            r_plus=1, u1_plus=1, r_minus=1,
        )
        rows = [
            PointwiseFixture(("0", "1"), ("1",), Fraction(1, 4), first),
            PointwiseFixture(("1", "0"), ("1",), Fraction(1, 4), second),
            PointwiseFixture(("0", "2"), ("2",), Fraction(1, 4), first),
            PointwiseFixture(("2", "0"), ("2",), Fraction(1, 4), second),
        ]
        return _fixture(key, rows)
    if key == "rdnerr":
        eps = _epsilon(epsilon)
        rows = []
        if eps < 1:
            hit = _columns(
                i1_plus=1, i2_plus=1,
                i2_minus=-_lg(1 - eps),
                i12_plus=-_lg((1 - eps) / 2),
                i12_minus=-_lg(1 - eps),
                r_plus=1, c_plus=-_lg((1 - eps) / 2) - 1,
                u2_minus=-_lg(1 - eps),
            )
            rows += [
                PointwiseFixture(("0", "0"), ("0",), (1 - eps) / 2, hit),
                PointwiseFixture(("1", "1"), ("1",), (1 - eps) / 2, hit),
            ]
        if eps > 0:
            miss = _columns(
                i1_plus=1, i2_plus=1,
                i2_minus=-_lg(eps),
                i12_plus=-_lg(eps / 2),
                i12_minus=-_lg(eps),
                r_plus=1, c_plus=-_lg(eps / 2) - 1,
                u2_minus=-_lg(eps),
            )
            rows += [
                PointwiseFixture(("0", "1"), ("0",), eps / 2, miss),
                PointwiseFixture(("1", "0"), ("1",), eps / 2, miss),
            ]
        return _fixture(key, rows)
    if key == "tbc":
        cols = _columns(
            i1_plus=1, i2_plus=1, i12_plus=2, r_plus=1, c_plus=1,
        )
        rows = [
            PointwiseFixture(("0", "0"), ("0", "0", "0"), Fraction(1, 4), cols),
            PointwiseFixture(("0", "1"), ("0", "1", "1"), Fraction(1, 4), cols),
            PointwiseFixture(("1", "0"), ("1", "0", "1"), Fraction(1, 4), cols),
            PointwiseFixture(("1", "1"), ("1", "1", "0"), Fraction(1, 4), cols),
        ]
        return _fixture(key, rows)
    if key == "unq":
        cols = _columns(
            i1_plus=1, i2_plus=1, i2_minus=1, i12_plus=2, i12_minus=1,
            r_plus=1, c_plus=1, u2_minus=1,
        )
        rows = [
            PointwiseFixture(("0", "0"), ("0",), Fraction(1, 4), cols),
            PointwiseFixture(("0", "1"), ("0",), Fraction(1, 4), cols),
            PointwiseFixture(("1", "0"), ("1",), Fraction(1, 4), cols),
            PointwiseFixture(("1", "1"), ("1",), Fraction(1, 4), cols),
        ]
        return _fixture(key, rows)
    if key == "and":
        both_zero = _columns(
            i1_plus=1, i1_minus=_lg(Fraction(3, 2)),
            i2_plus=1, i2_minus=_lg(Fraction(3, 2)),
            i12_plus=2, i12_minus=_lg(3),
            r_plus=1, c_plus=1,
            r_minus=_lg(Fraction(3, 2)), c_minus=1,
        )
        second_one = _columns(
            i1_plus=1, i1_minus=_lg(Fraction(3, 2)),
            i2_plus=1, i2_minus=_lg(3),
            i12_plus=2, i12_minus=_lg(3),
            r_plus=1, c_plus=1,
            r_minus=_lg(Fraction(3, 2)), u2_minus=1,
        )
        first_one = _columns(
            i1_plus=1, i1_minus=_lg(3),
            i2_plus=1, i2_minus=_lg(Fraction(3, 2)),
            i12_plus=2, i12_minus=_lg(3),
            r_plus=1, c_plus=1,
            r_minus=_lg(Fraction(3, 2)), u1_minus=1,
        )
        both_one = _columns(
            i1_plus=1, i2_plus=1, i12_plus=2, r_plus=1, c_plus=1,
        )
        rows = [
            PointwiseFixture(("0", "0"), ("0",), Fraction(1, 4), both_zero),
            PointwiseFixture(("0", "1"), ("0",), Fraction(1, 4), second_one),
            PointwiseFixture(("1", "0"), ("0",), Fraction(1, 4), first_one),
            PointwiseFixture(("1", "1"), ("1",), Fraction(1, 4), both_one),
        ]
        return _fixture(key, rows)
    raise SchemaError(
        f"no frozen table for {name!r}; have {BIVARIATE_CORPUS_NAMES}"
    )


def tbep_expected_partial_specificity() -> Mapping[str, float]:
    """Nonzero partial specificity per node, identical at every realisation.

    One bit of three-way redundancy at the bottom and one bit shared by the
    three pairwise joint events; every ambiguity increment is zero.
    """
    return MappingProxyType({"{1}{2}{3}": 1.0, "{12}{13}{23}": 1.0})
