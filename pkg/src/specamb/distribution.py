"""Exact discrete joint distributions over predictors and a target.

This module is the data layer for the decomposition machinery.  A
:class:`JointDistribution` holds the joint probability mass of ``n``
predictor variables and one target variable.  Masses are stored as
:class:`fractions.Fraction`, so every marginal, conditional and coarsened
probability downstream is exact; logarithms are taken only at the point
where an information value in bits is actually reported.

Data model
----------
* Event labels are opaque strings.  Alphabets are ordered by first
  appearance in the support.
* The target may be *composite*, i.e. a tuple of named components such as
  ``(t1, t2, t3)``.  Internally a target event is always a tuple of
  component labels, of length one for a scalar target.
* Only the support is stored.  Rows with zero probability are dropped on
  ingestion (with a :class:`ZeroMassRowWarning`), duplicate rows are summed
  (with a :class:`DuplicateRowWarning`), and a negative net mass is an
  error.
* Distributions are immutable.  All transforms (:meth:`~JointDistribution.marginal`,
  :meth:`~JointDistribution.condition`, and friends) return new objects.

Two ingestion modes are tracked.  In ``rational`` mode (probability tokens
like ``1/4``) the total mass must equal one exactly.  In ``decimal`` mode
(tokens like ``0.25`` or ``2.5e-3``) tokens are read as exact decimal
fractions and the total must equal one within ``1e-9``.

File formats
------------
TSV: one row per outcome, ``probability<TAB>s1<TAB>...<TAB>sn<TAB>t``.  An
optional header line ``#p<TAB>name1<TAB>...<TAB>target`` names the
variables; commas in the target header declare a composite target and the
target column of every row is then the comma-join of the component labels.
Other lines starting with ``#`` are comments.

JSON: an object ``{"schema": {...}, "mass": [{"outcome": [...], "p": ...}]}``
where ``schema`` gives ``predictors`` (list of names), ``target`` (name) and
optionally ``target_components`` (list of names), and each ``outcome`` lists
the predictor labels followed by the target event (a string, or a list of
component labels for composite targets).
"""

from __future__ import annotations

import json
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import IO, Literal, Union

__all__ = [
    "DistributionError",
    "FormatError",
    "SchemaError",
    "MassError",
    "DuplicateRowWarning",
    "ZeroMassRowWarning",
    "SourceEvent",
    "Realisation",
    "VariableSchema",
    "JointDistribution",
    "load_distribution",
    "loads_tsv",
    "loads_json",
    "dumps_tsv",
    "dumps_json",
]

Label = str
TargetEvent = tuple[Label, ...]
Mode = Literal["rational", "decimal"]

DECIMAL_MASS_TOL = 1e-9


class DistributionError(ValueError):
    """Base class for every validation failure raised by this module."""


class FormatError(DistributionError):
    """Malformed TSV or JSON input."""


class SchemaError(DistributionError):
    """Inconsistent arity, duplicate names, or unknown variables."""


class MassError(DistributionError):
    """Nonpositive merged mass, misnormalised total, or zero-mass evidence."""


class DuplicateRowWarning(UserWarning):
    """Duplicate outcome rows were summed during ingestion."""


class ZeroMassRowWarning(UserWarning):
    """Zero-probability rows were dropped during ingestion."""


@dataclass(frozen=True, order=True)
class SourceEvent:
    """A nonempty subset of predictor positions, identifying a joint event.

    Positions are 1-based so that rendered node labels read like the usual
    ``{1}{2}`` / ``{12}{13}`` notation.

    >>> SourceEvent.of(2, 1)
    SourceEvent(indices=(1, 2))
    >>> str(SourceEvent.of(1, 3))
    '13'
    """

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.indices:
            raise SchemaError("a source event needs at least one predictor")
        if list(self.indices) != sorted(set(self.indices)):
            raise SchemaError(f"indices must be strictly increasing: {self.indices!r}")
        if self.indices[0] < 1:
            raise SchemaError(f"predictor positions are 1-based: {self.indices!r}")

    @classmethod
    def of(cls, *indices: int) -> "SourceEvent":
        return cls(tuple(sorted(set(indices))))

    def issubset(self, other: "SourceEvent") -> bool:
        return set(self.indices) <= set(other.indices)

    def __str__(self) -> str:
        if self.indices[-1] > 9:
            return ",".join(str(i) for i in self.indices)
        return "".join(str(i) for i in self.indices)


@dataclass(frozen=True)
class Realisation:
    """One support row: the realised predictor events, target event, mass."""

    predictors: tuple[Label, ...]
    target: TargetEvent
    p: Fraction

    @property
    def outcome(self) -> tuple[tuple[Label, ...], TargetEvent]:
        return (self.predictors, self.target)

    def source_labels(self, source: SourceEvent) -> tuple[Label, ...]:
        """Labels of this realisation at the positions of ``source``."""
        try:
            return tuple(self.predictors[i - 1] for i in source.indices)
        except IndexError:
            raise SchemaError(
                f"source event {source} exceeds the {len(self.predictors)} predictors"
            ) from None


def _cartesian(alphabets: Sequence[tuple[Label, ...]]) -> tuple[TargetEvent, ...]:
    events: list[TargetEvent] = [()]
    for alphabet in alphabets:
        events = [e + (label,) for e in events for label in alphabet]
    return tuple(events)


@dataclass(frozen=True)
class VariableSchema:
    """Names and alphabets of the predictors and the (optional) target."""

    predictors: tuple[str, ...]
    predictor_alphabets: tuple[tuple[Label, ...], ...]
    target: Union[str, None]
    target_alphabet: Union[tuple[TargetEvent, ...], None]
    target_components: Union[tuple[str, ...], None] = None
    target_component_alphabets: Union[tuple[tuple[Label, ...], ...], None] = None

    def __post_init__(self) -> None:
        names = list(self.predictors)
        if self.target is not None:
            names.append(self.target)
        if self.target_components is not None:
            names.extend(self.target_components)
        if len(set(names)) != len(names):
            raise SchemaError(f"variable names must be unique: {names!r}")
        if not names:
            raise SchemaError("a distribution needs at least one variable")
        if len(self.predictor_alphabets) != len(self.predictors):
            raise SchemaError("one alphabet per predictor is required")
        for name, alphabet in zip(self.predictors, self.predictor_alphabets):
            _check_alphabet(name, alphabet)
        if self.target is None:
            if self.target_alphabet is not None or self.target_components is not None:
                raise SchemaError("target alphabets given without a target")
            return
        if self.target_alphabet is None or not self.target_alphabet:
            raise SchemaError("the target needs a nonempty alphabet")
        if len(set(self.target_alphabet)) != len(self.target_alphabet):
            raise SchemaError("target events must be unique")
        if self.target_components is None:
            if any(len(event) != 1 for event in self.target_alphabet):
                raise SchemaError("scalar target events must have one component")
            if self.target_component_alphabets is not None:
                raise SchemaError("component alphabets given for a scalar target")
            return
        if not self.target_components:
            raise SchemaError("a composite target needs at least one component")
        if self.target_component_alphabets is None or len(
            self.target_component_alphabets
        ) != len(self.target_components):
            raise SchemaError("one alphabet per target component is required")
        for name, alphabet in zip(self.target_components, self.target_component_alphabets):
            _check_alphabet(name, alphabet)
        if self.target_alphabet != _cartesian(self.target_component_alphabets):
            raise SchemaError(
                "the target alphabet must be the product of the component alphabets"
            )

    @property
    def n(self) -> int:
        return len(self.predictors)

    def component_index(self, name: str) -> int:
        if self.target_components is None:
            raise SchemaError(f"no target components declared, got {name!r}")
        try:
            return self.target_components.index(name)
        except ValueError:
            raise SchemaError(
                f"unknown target component {name!r}; have {self.target_components!r}"
            ) from None

    def target_label(self) -> str:
        """Header form of the target: the name, or comma-joined components."""
        if self.target is None:
            raise SchemaError("this distribution has no target")
        if self.target_components is not None:
            return ",".join(self.target_components)
        return self.target


def _check_alphabet(name: str, alphabet: tuple[Label, ...]) -> None:
    if not alphabet:
        raise SchemaError(f"alphabet of {name!r} is empty")
    if len(set(alphabet)) != len(alphabet):
        raise SchemaError(f"alphabet of {name!r} has repeated labels: {alphabet!r}")
    if any(label == "" for label in alphabet):
        raise SchemaError(f"alphabet of {name!r} contains an empty label")


RawRow = tuple[Fraction, tuple[Label, ...], TargetEvent]
Assignment = Mapping[str, Union[Label, TargetEvent]]


def _first_appearance(labels: Iterable[Label]) -> tuple[Label, ...]:
    return tuple(dict.fromkeys(labels))


class JointDistribution:
    """An immutable joint distribution over predictors and a target.

    Build one from explicit rows::

        >>> d = JointDistribution.from_rows(
        ...     [("1/4", ("0", "0"), "0"), ("1/4", ("0", "1"), "1"),
        ...      ("1/4", ("1", "0"), "1"), ("1/4", ("1", "1"), "0")],
        ...     predictors=("s1", "s2"), target="t")
        >>> d.probability({"t": "1"})
        Fraction(1, 2)
    """

    __slots__ = ("schema", "mode", "_mass", "_support", "_query_cache")

    def __init__(
        self,
        schema: VariableSchema,
        mass: Mapping[tuple[tuple[Label, ...], TargetEvent], Fraction],
        mode: Mode = "rational",
    ) -> None:
        if mode not in ("rational", "decimal"):
            raise SchemaError(f"unknown mode {mode!r}")
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "mode", mode)
        validated: dict[tuple[tuple[Label, ...], TargetEvent], Fraction] = {}
        for (preds, target), p in mass.items():
            if len(preds) != schema.n:
                raise SchemaError(
                    f"outcome {preds!r} has {len(preds)} predictor events, "
                    f"schema expects {schema.n}"
                )
            if schema.target is None:
                if target != ():
                    raise SchemaError("target event given for a target-free distribution")
            elif schema.target_alphabet is not None and target not in schema.target_alphabet:
                raise SchemaError(f"target event {target!r} is not in the alphabet")
            if p <= 0:
                raise MassError(f"support mass must be positive, got {p} at {preds!r}")
            validated[(preds, target)] = Fraction(p)
        if not validated:
            raise MassError("the support is empty")
        total = sum(validated.values())
        if mode == "rational":
            if total != 1:
                raise MassError(f"mass sums to {total}, expected exactly 1")
        elif abs(float(total) - 1.0) > DECIMAL_MASS_TOL:
            raise MassError(f"mass sums to {float(total)!r}, expected 1 within 1e-9")
        object.__setattr__(self, "_mass", MappingProxyType(validated))
        object.__setattr__(
            self,
            "_support",
            tuple(Realisation(preds, target, p) for (preds, target), p in validated.items()),
        )
        # Partial-assignment sums are pure functions of the immutable mass,
        # so they are memoised; repeated lattice evaluations hit the same
        # few marginals thousands of times.
        object.__setattr__(self, "_query_cache", {})

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("JointDistribution is immutable")

    def __repr__(self) -> str:
        return (
            f"JointDistribution(n={self.n}, target={self.schema.target!r}, "
            f"support={len(self._support)}, mode={self.mode!r})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return (
            self.schema == other.schema
            and dict(self._mass) == dict(other._mass)
            and self.mode == other.mode
        )

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[tuple[object, Sequence[Label], Union[Label, Sequence[Label]]]],
        *,
        predictors: Union[Sequence[str], None] = None,
        target: str = "t",
        target_components: Union[Sequence[str], None] = None,
        mode: Mode = "rational",
    ) -> "JointDistribution":
        """Assemble a distribution from ``(probability, predictors, target)`` rows.

        Probabilities may be ``Fraction``, ``int`` or strings in either the
        rational or the decimal form.  The target entry is a label for a
        scalar target or a sequence of component labels when
        ``target_components`` is given.
        """
        raw: list[RawRow] = []
        for p, preds, tgt in rows:
            if isinstance(tgt, str):
                event: TargetEvent = (tgt,)
            else:
                event = tuple(tgt)
            raw.append((_as_fraction(p), tuple(preds), event))
        n_components = len(target_components) if target_components is not None else 1
        for _, _, event in raw:
            if len(event) != n_components:
                raise SchemaError(
                    f"target event {event!r} has {len(event)} components, expected {n_components}"
                )
        return _assemble(
            raw,
            predictors=tuple(predictors) if predictors is not None else None,
            target=target,
            target_components=tuple(target_components) if target_components else None,
            mode=mode,
        )

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def n(self) -> int:
        return self.schema.n

    @property
    def support(self) -> tuple[Realisation, ...]:
        return self._support

    @property
    def mass(self) -> Mapping[tuple[tuple[Label, ...], TargetEvent], Fraction]:
        return self._mass

    @property
    def total_mass(self) -> Fraction:
        return sum(self._mass.values(), Fraction(0))

    def realisation(
        self, predictors: Sequence[Label], target: Union[Label, Sequence[Label], None] = None
    ) -> Realisation:
        """The support row with the given events, or a :class:`MassError`."""
        event: TargetEvent
        if target is None:
            event = ()
        elif isinstance(target, str):
            event = (target,) if self.schema.target_components is None else _split_target(
                target, len(self.schema.target_components)
            )
        else:
            event = tuple(target)
        key = (tuple(predictors), event)
        if key not in self._mass:
            raise MassError(f"outcome {key!r} is not in the support")
        return Realisation(key[0], key[1], self._mass[key])

    # ------------------------------------------------------------------
    # probability queries

    def _resolve(self, assignment: Assignment) -> tuple[dict[int, Label], dict[int, Label]]:
        """Split a name-keyed assignment into predictor and component constraints."""
        schema = self.schema
        by_predictor: dict[int, Label] = {}
        by_component: dict[int, Label] = {}
        for name, value in assignment.items():
            if name in schema.predictors:
                if not isinstance(value, str):
                    raise SchemaError(f"predictor {name!r} takes a single label")
                by_predictor[schema.predictors.index(name)] = value
            elif schema.target is not None and name == schema.target:
                event = (
                    _split_target(value, self._target_arity())
                    if isinstance(value, str)
                    else tuple(value)
                )
                if len(event) != self._target_arity():
                    raise SchemaError(f"target event {value!r} has the wrong arity")
                for k, label in enumerate(event):
                    _merge_constraint(by_component, k, label)
            elif schema.target_components is not None and name in schema.target_components:
                if not isinstance(value, str):
                    raise SchemaError(f"component {name!r} takes a single label")
                _merge_constraint(by_component, schema.component_index(name), value)
            else:
                raise SchemaError(f"unknown variable {name!r}")
        return by_predictor, by_component

    def probability(self, assignment: Assignment) -> Fraction:
        """Exact probability of a partial assignment of variables.

        Keys are predictor names, target component names, or the target name
        itself (whose value may be the event tuple or the comma-joined
        label).
        """
        by_predictor, by_component = self._resolve(assignment)
        return self._mass_where(by_predictor, by_component)

    def _mass_where(
        self, by_predictor: Mapping[int, Label], by_component: Mapping[int, Label]
    ) -> Fraction:
        key = (
            tuple(sorted(by_predictor.items())),
            tuple(sorted(by_component.items())),
        )
        cached = self._query_cache.get(key)
        if cached is not None:
            return cached
        total = Fraction(0)
        for row in self._support:
            if all(row.predictors[i] == v for i, v in by_predictor.items()) and all(
                row.target[k] == v for k, v in by_component.items()
            ):
                total += row.p
        self._query_cache[key] = total
        return total

    def _target_arity(self) -> int:
        if self.schema.target is None:
            raise SchemaError("this distribution has no target")
        if self.schema.target_components is None:
            return 1
        return len(self.schema.target_components)

    # ------------------------------------------------------------------
    # transforms

    def marginal(self, variables: Sequence[str]) -> "JointDistribution":
        """Marginal over the named variables (schema order is kept).

        ``variables`` may name predictors, target components, or the target
        itself.  If the target (or any component) is excluded the result has
        no target and supports only plain probability queries.
        """
        schema = self.schema
        wanted = set(variables)
        for name in wanted:
            if name in schema.predictors:
                continue
            if schema.target is not None and name == schema.target:
                continue
            if schema.target_components is not None and name in schema.target_components:
                continue
            raise SchemaError(f"unknown variable {name!r}")
        keep_preds = [i for i, name in enumerate(schema.predictors) if name in wanted]
        if schema.target is not None and schema.target in wanted:
            keep_comps = list(range(self._target_arity()))
        elif schema.target_components is not None:
            keep_comps = [
                k for k, name in enumerate(schema.target_components) if name in wanted
            ]
        else:
            keep_comps = []
        if not keep_preds and not keep_comps:
            raise SchemaError("a marginal needs at least one variable")
        raw: list[RawRow] = []
        for row in self._support:
            preds = tuple(row.predictors[i] for i in keep_preds)
            target = tuple(row.target[k] for k in keep_comps)
            raw.append((row.p, preds, target))
        new_target, new_components = _reduced_target(schema, keep_comps)
        return _assemble(
            raw,
            predictors=tuple(schema.predictors[i] for i in keep_preds),
            target=new_target,
            target_components=new_components,
            mode=self.mode,
            merged_ok=True,
        )

    def condition(self, evidence: Assignment) -> "JointDistribution":
        """Normalised distribution over the remaining variables."""
        by_predictor, by_component = self._resolve(evidence)
        denom = self._mass_where(by_predictor, by_component)
        if denom == 0:
            raise MassError(f"conditioning event has zero probability: {dict(evidence)!r}")
        schema = self.schema
        keep_preds = [i for i in range(schema.n) if i not in by_predictor]
        keep_comps = [k for k in range(self._target_arity()) if k not in by_component] if (
            schema.target is not None
        ) else []
        if not keep_preds and not keep_comps:
            raise SchemaError("conditioning on every variable leaves nothing")
        raw: list[RawRow] = []
        for row in self._support:
            if any(row.predictors[i] != v for i, v in by_predictor.items()):
                continue
            if any(row.target[k] != v for k, v in by_component.items()):
                continue
            preds = tuple(row.predictors[i] for i in keep_preds)
            target = tuple(row.target[k] for k in keep_comps)
            raw.append((row.p / denom, preds, target))
        new_target, new_components = _reduced_target(schema, keep_comps)
        return _assemble(
            raw,
            predictors=tuple(schema.predictors[i] for i in keep_preds),
            target=new_target,
            target_components=new_components,
            mode=self.mode,
            merged_ok=True,
        )

    def coarsen_target_to_two_events(
        self, event: Union[Label, Sequence[Label]]
    ) -> "JointDistribution":
        """Collapse the target to ``event`` versus everything else.

        The predictor marginal is untouched; the complement event is
        labelled ``~<label>``.
        """
        arity = self._target_arity()
        if isinstance(event, str):
            kept = _split_target(event, arity)
        else:
            kept = tuple(event)
        if len(kept) != arity:
            raise SchemaError(f"target event {event!r} has the wrong arity")
        if self.probability({self.schema.target: kept}) == 0:  # type: ignore[dict-item]
            raise MassError(f"target event {kept!r} has zero probability")
        label = ",".join(kept)
        other = f"~{label}"
        raw: list[RawRow] = []
        for row in self._support:
            raw.append((row.p, row.predictors, (label if row.target == kept else other,)))
        return _assemble(
            raw,
            predictors=self.schema.predictors,
            target=self.schema.target,
            target_components=None,
            mode=self.mode,
            merged_ok=True,
        )

    def compose_targets(self, components: Sequence[str]) -> "JointDistribution":
        """Restrict and reorder the composite target to the named components."""
        if self.schema.target_components is None:
            raise SchemaError("this distribution has no target components to compose")
        order = [self.schema.component_index(name) for name in components]
        if not order:
            raise SchemaError("at least one component is required")
        if len(set(order)) != len(order):
            raise SchemaError(f"repeated components in {components!r}")
        raw: list[RawRow] = []
        for row in self._support:
            raw.append((row.p, row.predictors, tuple(row.target[k] for k in order)))
        kept = tuple(self.schema.target_components[k] for k in order)
        if len(kept) == 1:
            return _assemble(
                raw,
                predictors=self.schema.predictors,
                target=kept[0],
                target_components=None,
                mode=self.mode,
                merged_ok=True,
            )
        return _assemble(
            raw,
            predictors=self.schema.predictors,
            target=self.schema.target,
            target_components=kept,
            mode=self.mode,
            merged_ok=True,
        )


def _reduced_target(
    schema: VariableSchema, keep_comps: Sequence[int]
) -> tuple[Union[str, None], Union[tuple[str, ...], None]]:
    """Target name and components after keeping a subset of component slots.

    A single surviving component of a composite target becomes the scalar
    target under its own name, so it stays addressable in later queries.
    """
    if not keep_comps:
        return None, None
    if schema.target_components is None:
        return schema.target, None
    kept = tuple(schema.target_components[k] for k in keep_comps)
    if len(kept) == 1:
        return kept[0], None
    return schema.target, kept


def _merge_constraint(constraints: dict[int, Label], key: int, value: Label) -> None:
    if key in constraints and constraints[key] != value:
        raise SchemaError("conflicting constraints on one target component")
    constraints[key] = value


def _split_target(value: str, arity: int) -> TargetEvent:
    if arity == 1:
        return (value,)
    parts = tuple(value.split(","))
    if len(parts) != arity:
        raise SchemaError(f"target label {value!r} does not split into {arity} components")
    return parts


def _as_fraction(p: object) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, str):
        try:
            return Fraction(p)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad probability token {p!r}: {exc}") from None
    raise FormatError(f"unsupported probability type {type(p).__name__}")


def _is_decimal_token(token: str) -> bool:
    return "." in token or "e" in token or "E" in token


def _assemble(
    rows: Sequence[RawRow],
    *,
    predictors: Union[tuple[str, ...], None],
    target: Union[str, None],
    target_components: Union[tuple[str, ...], None],
    mode: Mode,
    merged_ok: bool = False,
) -> JointDistribution:
    """Merge, warn, validate, derive alphabets, and build the distribution.

    ``merged_ok`` silences the duplicate warning for internal transforms,
    where merging is the expected effect of marginalising.
    """
    if not rows:
        raise MassError("no rows given")
    n = len(rows[0][1])
    if predictors is None:
        predictors = tuple(f"s{i}" for i in range(1, n + 1))
    if len(predictors) != n:
        raise SchemaError(f"{len(predictors)} predictor names for {n} columns")
    if target is not None:
        arity = len(target_components) if target_components is not None else 1
        for _, _, event in rows:
            if len(event) != arity:
                raise SchemaError(
                    f"target event {event!r} has {len(event)} components, expected {arity}"
                )

    merged: dict[tuple[tuple[Label, ...], TargetEvent], Fraction] = {}
    duplicates = 0
    zero_rows = 0
    for p, preds, event in rows:
        if len(preds) != n:
            raise SchemaError(f"row {preds!r} has {len(preds)} predictors, expected {n}")
        if any(label == "" for label in preds) or any(label == "" for label in event):
            raise FormatError(f"empty event label in row {(preds, event)!r}")
        if p == 0:
            zero_rows += 1
            continue
        key = (preds, event)
        if key in merged:
            duplicates += 1
            merged[key] += p
        else:
            merged[key] = p
    if duplicates and not merged_ok:
        warnings.warn(
            f"summed {duplicates} duplicate outcome row(s)", DuplicateRowWarning, stacklevel=3
        )
    for key, p in list(merged.items()):
        if p < 0:
            raise MassError(f"outcome {key!r} has negative mass {p} after merging")
        if p == 0:
            zero_rows += 1
            del merged[key]
    if zero_rows and not merged_ok:
        warnings.warn(
            f"dropped {zero_rows} zero-probability row(s)", ZeroMassRowWarning, stacklevel=3
        )

    pred_alphabets = tuple(
        _first_appearance(preds[i] for preds, _ in merged) for i in range(n)
    )
    target_alphabet: Union[tuple[TargetEvent, ...], None] = None
    component_alphabets: Union[tuple[tuple[Label, ...], ...], None] = None
    if target is not None:
        if target_components is not None:
            component_alphabets = tuple(
                _first_appearance(event[k] for _, event in merged)
                for k in range(len(target_components))
            )
            target_alphabet = _cartesian(component_alphabets)
        else:
            target_alphabet = _first_appearance(event for _, event in merged)
            target_alphabet = tuple(target_alphabet)
    schema = VariableSchema(
        predictors=predictors,
        predictor_alphabets=pred_alphabets,
        target=target,
        target_alphabet=target_alphabet,
        target_components=target_components,
        target_component_alphabets=component_alphabets,
    )
    return JointDistribution(schema, merged, mode=mode)


# ----------------------------------------------------------------------
# parsing


def loads_tsv(text: str) -> JointDistribution:
    """Parse the TSV format described in the module docstring."""
    header: Union[list[str], None] = None
    data_rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            fields = line[1:].split("\t")
            if header is None and not data_rows and fields and fields[0].strip() == "p":
                header = [f.strip() for f in fields]
            continue
        data_rows.append((lineno, line.split("\t")))
    if not data_rows:
        raise FormatError("no data rows found")

    width = len(data_rows[0][1])
    if width < 3:
        raise FormatError(
            f"line {data_rows[0][0]}: need probability, predictors and target columns"
        )
    n = width - 2
    if header is not None and len(header) != width:
        raise FormatError(f"header names {len(header)} columns but rows have {width}")

    predictors = tuple(header[1:-1]) if header is not None else None
    target_name = header[-1] if header is not None else "t"
    components: Union[tuple[str, ...], None] = None
    if "," in target_name:
        components = tuple(name.strip() for name in target_name.split(","))
        target_name = "t" if "t" not in (predictors or ()) else "target"
    # With a header the target arity is settled there; headerless files
    # declare a composite target implicitly by the first row's comma count.
    if components is not None:
        arity: Union[int, None] = len(components)
    elif header is not None:
        arity = 1
    else:
        arity = None

    raw: list[RawRow] = []
    decimal = False
    for lineno, fields in data_rows:
        if len(fields) != width:
            raise FormatError(f"line {lineno}: expected {width} columns, got {len(fields)}")
        token = fields[0].strip()
        try:
            p = Fraction(token)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"line {lineno}: bad probability {token!r}") from None
        decimal = decimal or _is_decimal_token(token)
        preds = tuple(fields[1:-1])
        tgt = fields[-1]
        if arity is None:
            arity = tgt.count(",") + 1
            if arity > 1:
                components = tuple(f"t{k}" for k in range(1, arity + 1))
        event = _split_target(tgt, arity)
        raw.append((p, preds, event))
    return _assemble(
        raw,
        predictors=predictors,
        target=target_name,
        target_components=components,
        mode="decimal" if decimal else "rational",
    )


def loads_json(text: str) -> JointDistribution:
    """Parse the JSON format described in the module docstring."""
    try:
        payload = json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad JSON: {exc}") from None
    if not isinstance(payload, dict) or "mass" not in payload:
        raise FormatError('expected an object with a "mass" array')
    schema = payload.get("schema", {})
    if not isinstance(schema, dict):
        raise FormatError('"schema" must be an object')
    predictors = schema.get("predictors")
    target = schema.get("target", "t")
    components = schema.get("target_components")
    if components is not None:
        components = tuple(components)
    rows = payload["mass"]
    if not isinstance(rows, list) or not rows:
        raise FormatError('"mass" must be a nonempty array')

    raw: list[RawRow] = []
    decimal = False
    for entry in rows:
        if not isinstance(entry, dict) or "outcome" not in entry or "p" not in entry:
            raise FormatError(f'each mass entry needs "outcome" and "p": {entry!r}')
        outcome = entry["outcome"]
        if not isinstance(outcome, list) or len(outcome) < 2:
            raise FormatError(f"bad outcome {outcome!r}")
        p_token = entry["p"]
        if isinstance(p_token, str):
            decimal = decimal or _is_decimal_token(p_token)
        p = _as_fraction(p_token)
        *pred_labels, tgt = outcome
        if isinstance(tgt, list):
            event = tuple(str(label) for label in tgt)
        elif components is not None:
            event = _split_target(str(tgt), len(components))
        else:
            event = (str(tgt),)
        if components is not None and len(event) != len(components):
            raise FormatError(f"target event {tgt!r} has the wrong arity")
        raw.append((p, tuple(str(label) for label in pred_labels), event))
    if components is None and any(len(event) > 1 for _, _, event in raw):
        components = tuple(f"t{k}" for k in range(1, len(raw[0][2]) + 1))
    return _assemble(
        raw,
        predictors=tuple(predictors) if predictors is not None else None,
        target=target,
        target_components=components,
        mode="decimal" if decimal else "rational",
    )


def load_distribution(
    source: Union[str, IO[str]], format: str = "tsv"
) -> JointDistribution:
    """Load a distribution from a string or text stream, in TSV or JSON."""
    text = source if isinstance(source, str) else source.read()
    if format == "tsv":
        return loads_tsv(text)
    if format == "json":
        return loads_json(text)
    raise FormatError(f"unknown format {format!r}; use 'tsv' or 'json'")


# ----------------------------------------------------------------------
# serialisation


def dumps_tsv(dist: JointDistribution) -> str:
    """Render a distribution in the TSV format with exact rational masses."""
    schema = dist.schema
    target_header = schema.target_label() if schema.target is not None else ""
    names = list(schema.predictors) + ([target_header] if schema.target is not None else [])
    lines = ["#p\t" + "\t".join(names)]
    for row in dist.support:
        cells = [str(row.p), *row.predictors]
        if schema.target is not None:
            cells.append(",".join(row.target))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def dumps_json(dist: JointDistribution) -> str:
    """Render a distribution in the JSON format with exact rational masses."""
    schema = dist.schema
    payload: dict[str, object] = {
        "schema": {
            "predictors": list(schema.predictors),
            "target": schema.target,
        }
    }
    if schema.target_components is not None:
        payload["schema"]["target_components"] = list(schema.target_components)  # type: ignore[index]
    payload["mass"] = [
        {
            "outcome": list(row.predictors)
            + ([list(row.target) if schema.target_components is not None else row.target[0]]
               if schema.target is not None else []),
            "p": str(row.p),
        }
        for row in dist.support
    ]
    return json.dumps(payload, indent=2) + "\n"
