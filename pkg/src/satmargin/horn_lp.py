"""Horn-SAT decision procedure driven by LP feasible-interval estimation.

The procedure: build the clause inequality system, compute every variable's
exact feasible interval over the rational relaxation, select the variables
whose interval excludes 0 (lower bound > 0), assign 1 to those and 0 to the
rest, and verify the assignment on the CNF.  Verification is unconditional,
so the answer is sound whatever the estimation step does; unit propagation
always runs alongside as a cross-check and the report records agreement.

With exact LP the selection threshold is sharp (no epsilon): a lower bound
greater than 0 is exactly membership in the minimal model.  The interval
data is kept in the report so the asymmetry between value-1 variables
(lower bound exactly 1) and value-0 variables (upper bound possibly strictly
between 0 and 1) can be inspected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cnf import CNF, HORN, SolveResult, classify, evaluate, solve_horn_unit_prop
from .reduction import cnf_to_system
from .simplex import ExactSimplex


@dataclass
class HornSolveReport:
    result: SolveResult
    intervals: dict[int, tuple[Fraction, Fraction]] | None  # None: LP infeasible
    selected: frozenset[int]
    agreed_with_unit_prop: bool
    unit_prop: SolveResult


def solve_horn_margin(cnf: CNF) -> HornSolveReport:
    """Decide a Horn CNF by LP interval estimation plus verification."""
    if cnf.clauses and HORN not in classify(cnf):
        raise ValueError("not a Horn formula")
    reference = solve_horn_unit_prop(cnf)
    system = cnf_to_system(cnf)
    tableau = ExactSimplex(system)
    if not tableau.feasible():
        result = SolveResult("UNSAT", None, "horn-lp-margin")
        return HornSolveReport(result, None, frozenset(),
                               reference.status == "UNSAT", reference)
    intervals: dict[int, tuple[Fraction, Fraction]] = {}
    for v in range(1, cnf.num_vars + 1):
        lo = tableau.minimize({v: Fraction(1)}).value
        hi = tableau.maximize({v: Fraction(1)}).value
        intervals[v] = (lo, hi)
    selected = frozenset(v for v, (lo, _) in intervals.items() if lo > 0)
    witness = tuple(1 if v in selected else 0
                    for v in range(1, cnf.num_vars + 1))
    if evaluate(cnf, witness):
        result = SolveResult("SAT", witness, "horn-lp-margin")
        agreed = reference.status == "SAT" and reference.witness == witness
    else:
        result = SolveResult("UNSAT", None, "horn-lp-margin")
        agreed = reference.status == "UNSAT"
    return HornSolveReport(result, intervals, selected, agreed, reference)
