"""Shared helpers: seeded random rational distributions for sweep tests."""

from __future__ import annotations

import random
from itertools import product

from specamb.distribution import JointDistribution


def random_rational_distribution(
    rng: random.Random,
    n: int,
    *,
    max_alphabet: int = 3,
    composite: bool = False,
) -> JointDistribution:
    """A small random distribution with exact rational masses.

    Predictor alphabets have 1..``max_alphabet`` labels each; the target
    has 2..``max_alphabet`` events, or two binary components when
    ``composite`` is set.  Each joint cell enters the support with
    probability 0.7 and an integer weight from 1 to 9, so masses are exact
    fractions and every instance is reproducible from the generator state.
    """
    predictors = tuple(f"s{i}" for i in range(1, n + 1))
    sizes = [rng.randint(1, max_alphabet) for _ in range(n)]
    if composite:
        target_events = [tuple(pair) for pair in product("01", repeat=2)]
    else:
        target_events = [(str(k),) for k in range(rng.randint(2, max_alphabet))]
    cells = list(
        product(*[[str(v) for v in range(size)] for size in sizes], target_events)
    )
    weights = {}
    while not weights:
        weights = {
            cell: rng.randint(1, 9) for cell in cells if rng.random() < 0.7
        }
    total = sum(weights.values())
    rows = [
        (f"{w}/{total}", cell[:-1], cell[-1]) for cell, w in weights.items()
    ]
    return JointDistribution.from_rows(
        rows,
        predictors=predictors,
        target="t",
        target_components=("t1", "t2") if composite else None,
    )
