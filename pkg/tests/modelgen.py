"""Random surface models over a fixed three-symbol table."""

from __future__ import annotations

import random
from fractions import Fraction

from foliagraph import (
    SMALL,
    ExactScalar,
    Summand,
    SurfaceModel,
    SymbolTable,
    Tube,
    ribbon,
    sqrt_decl,
)


def example_table() -> SymbolTable:
    return SymbolTable((sqrt_decl("lam", 2), sqrt_decl("mu", 3), sqrt_decl("nu", 5)))


def _random_scalar(rng: random.Random, table: SymbolTable) -> ExactScalar:
    coeffs = {}
    for name in table.names:
        if rng.random() < 0.3:
            coeffs[name] = Fraction(rng.randint(-2, 2))
    return ExactScalar.make(table, Fraction(rng.randint(-2, 2)), coeffs)


def _random_disk(rng: random.Random):
    return SMALL if rng.random() < 0.6 else ribbon(rng.randint(1, 3))


def random_model(rng: random.Random, max_summands: int = 3) -> SurfaceModel:
    """A random tree of torus summands; about a third are rank-one models
    (all periods proportional to one value) so every implication fires."""
    table = example_table()
    n = rng.randint(1, max_summands)
    rank_one = rng.random() < 0.35
    base = None
    if rank_one:
        while base is None or base.is_zero():
            base = _random_scalar(rng, table)
    summands = []
    for i in range(n):
        while True:
            if rank_one:
                p = rng.randint(-3, 3) * base
                q = rng.randint(-3, 3) * base
            else:
                p = _random_scalar(rng, table)
                q = _random_scalar(rng, table)
            if not (p.is_zero() and q.is_zero()):
                break
        summands.append(Summand(f"t{i}", p, q))
    tubes = []
    for i in range(1, n):
        parent = rng.randrange(i)
        tubes.append(
            Tube(
                f"u{i - 1}",
                f"t{parent}",
                f"t{i}",
                rng.choice("AABC"),
                _random_disk(rng),
                _random_disk(rng),
            )
        )
    return SurfaceModel("random", table, tuple(summands), tuple(tubes))
