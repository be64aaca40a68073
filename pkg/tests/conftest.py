"""Shared random-instance generators for the test suites.

Everything is seeded so failures reproduce exactly.
"""

from __future__ import annotations

import random
from fractions import Fraction

from satmargin.cnf import CNF
from satmargin.reduction import BoundedInequality, InequalitySystem

EQ1_DIMACS = """\
p cnf 4 4
1 -2 -4 0
1 -3 0
2 3 0
-2 4 0
"""


def random_cnf(rng: random.Random, n: int, n_clauses: int,
               max_width: int = 3) -> CNF:
    """Random OR-only CNF with distinct variables per clause."""
    ors = []
    for _ in range(n_clauses):
        width = rng.randint(1, min(max_width, n))
        chosen = rng.sample(range(1, n + 1), width)
        ors.append([v if rng.random() < 0.5 else -v for v in chosen])
    return CNF.from_ints(n, ors=ors)


def random_horn_cnf(rng: random.Random, n: int, n_clauses: int) -> CNF:
    """Random Horn CNF (at most one positive literal per clause), with a
    bias toward positive units so both SAT and UNSAT outcomes occur."""
    ors = []
    for _ in range(n_clauses):
        width = rng.randint(1, min(4, n))
        chosen = rng.sample(range(1, n + 1), width)
        lits = [-v for v in chosen]
        if rng.random() < 0.7:
            lits[0] = -lits[0]
        ors.append(lits)
    return CNF.from_ints(n, ors=ors)


def random_2sat_cnf(rng: random.Random, n: int, n_clauses: int) -> CNF:
    return random_cnf(rng, n, n_clauses, max_width=2)


def random_xor_cnf(rng: random.Random, n: int, n_clauses: int) -> CNF:
    xors = []
    for _ in range(n_clauses):
        width = rng.randint(1, min(3, n))
        chosen = rng.sample(range(1, n + 1), width)
        xors.append([v if rng.random() < 0.5 else -v for v in chosen])
    return CNF.from_ints(n, xors=xors)


def random_system(rng: random.Random, n: int, n_rows: int) -> InequalitySystem:
    """Random boxed system with small integer coefficients and rational
    bounds (denominators 1 or 2)."""
    rows = []
    for _ in range(n_rows):
        support = rng.sample(range(1, n + 1), rng.randint(1, min(4, n)))
        coeffs = {v: rng.choice([-3, -2, -1, 1, 2, 3]) for v in support}
        lo = Fraction(rng.randint(-8, 4), rng.choice([1, 2]))
        hi = lo + Fraction(rng.randint(0, 10), rng.choice([1, 2]))
        rows.append(BoundedInequality(coeffs, lo, hi))
    return InequalitySystem(n, rows, box=True)


def random_rational_point(rng: random.Random, n: int):
    """Point with coordinates straddling the box, exact small rationals."""
    return tuple(Fraction(rng.randint(-2, 10), 8) for _ in range(n))
