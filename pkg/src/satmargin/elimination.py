"""Exact Fourier-Motzkin elimination with full traces, weighted chain
aggregation, and base-b digit recovery of aggregate coefficients.

All arithmetic is exact: integer coefficients, Fraction bounds, positive
rational combination multipliers.  No floating point is used anywhere in
this module; the whole point of the aggregate-coefficient analysis is that
the numbers grow beyond what floats can represent faithfully.

Working representation: one-sided rows  sum(coeffs[v] * x_v) >= bound.
A two-sided system row splits into its >= part and its negated <= part; the
0/1 box contributes the rows x_v >= 0 and -x_v >= -1 for the variable being
eliminated.  Combining a lower-bound row (positive coefficient on the pivot
variable) with an upper-bound row (negative coefficient) uses the smallest
positive integer multipliers that cancel the pivot, and the result is
normalized by the gcd of its coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .chains import SynthesizedInstance
from .reduction import (BoundedInequality, InequalitySystem,
                        clause_to_inequality)


class RowBlowupError(RuntimeError):
    """Intermediate row count exceeded the configured limit."""

    def __init__(self, limit: int, var: int, step: int):
        super().__init__(
            f"eliminating x{var} (step {step}) exceeded the row limit {limit}")
        self.limit = limit
        self.var = var
        self.step = step


class AggregationError(ValueError):
    """A variable that should cancel in the weighted clause sum did not."""


@dataclass(frozen=True)
class Combination:
    lower_id: int
    upper_id: int
    mult_lower: Fraction
    mult_upper: Fraction
    new_id: int


@dataclass
class EliminationStep:
    var: int
    combinations: list[Combination] = field(default_factory=list)


@dataclass
class EliminationTrace:
    # every one-sided row ever seen: id -> (coeffs, bound) meaning sum >= bound
    rows: dict[int, tuple[dict[int, int], Fraction]] = field(default_factory=dict)
    source_ids: list[int] = field(default_factory=list)
    steps: list[EliminationStep] = field(default_factory=list)
    final_system: InequalitySystem | None = None

    def to_text(self) -> str:
        """Line-oriented export: definitions for source/box rows, then one
        ``step`` line per combination."""
        lines = []
        derived = {c.new_id for s in self.steps for c in s.combinations}
        for rid in sorted(self.rows):
            if rid in derived:
                continue
            coeffs, bound = self.rows[rid]
            lines.append(f"row{rid} := {_terms(coeffs)} >= {bound}")
        for step in self.steps:
            for c in step.combinations:
                lines.append(
                    f"step x{step.var}: row{c.lower_id} * {c.mult_lower} + "
                    f"row{c.upper_id} * {c.mult_upper} -> row{c.new_id}")
        return "\n".join(lines) + "\n"


def _terms(coeffs: dict[int, int]) -> str:
    from .reduction import format_terms
    return format_terms(coeffs)


class _Workspace:
    """One-sided row set with id bookkeeping for a projection run."""

    def __init__(self, system: InequalitySystem, max_rows: int):
        if not system.box:
            raise ValueError("elimination operates on boxed systems")
        self.num_vars = system.num_vars
        self.max_rows = max_rows
        self.trace = EliminationTrace()
        self._next_id = 0
        self.rows: dict[int, tuple[dict[int, int], Fraction]] = {}
        for row in system.rows:
            self._add_source(dict(row.coeffs), Fraction(row.lower))
            self._add_source({v: -c for v, c in row.coeffs.items()},
                             -Fraction(row.upper))

    def _new_id(self, coeffs, bound) -> int:
        rid = self._next_id
        self._next_id += 1
        self.trace.rows[rid] = (dict(coeffs), bound)
        return rid

    def _add_source(self, coeffs, bound):
        rid = self._new_id(coeffs, bound)
        self.trace.source_ids.append(rid)
        self.rows[rid] = (coeffs, bound)

    def support(self, var: int) -> bool:
        return any(var in coeffs for coeffs, _ in self.rows.values())

    def eliminate(self, var: int, step_index: int) -> EliminationStep:
        step = EliminationStep(var)
        if not self.support(var):
            self.trace.steps.append(step)
            return step
        lowers = []   # positive coefficient on var
        uppers = []   # negative coefficient on var
        keep = {}
        for rid, (coeffs, bound) in self.rows.items():
            cv = coeffs.get(var, 0)
            if cv > 0:
                lowers.append(rid)
            elif cv < 0:
                uppers.append(rid)
            else:
                keep[rid] = (coeffs, bound)
        # the box contributes x_var >= 0 and -x_var >= -1
        box_lo = self._new_id({var: 1}, Fraction(0))
        self.rows[box_lo] = ({var: 1}, Fraction(0))
        lowers.append(box_lo)
        box_hi = self._new_id({var: -1}, Fraction(-1))
        self.rows[box_hi] = ({var: -1}, Fraction(-1))
        uppers.append(box_hi)

        merged: dict[tuple, tuple[dict, Fraction, int]] = {}
        for rid, (coeffs, bound) in keep.items():
            k = tuple(sorted(coeffs.items()))
            cur = merged.get(k)
            if cur is None or bound > cur[1]:
                merged[k] = (coeffs, bound, rid)

        for lo_id in lowers:
            lo_coeffs, lo_bound = self.rows[lo_id]
            a = lo_coeffs[var]
            for hi_id in uppers:
                hi_coeffs, hi_bound = self.rows[hi_id]
                b = -hi_coeffs[var]
                g0 = gcd(a, b)
                m_lo, m_hi = b // g0, a // g0
                coeffs: dict[int, int] = {}
                for v, c in lo_coeffs.items():
                    coeffs[v] = coeffs.get(v, 0) + m_lo * c
                for v, c in hi_coeffs.items():
                    coeffs[v] = coeffs.get(v, 0) + m_hi * c
                coeffs = {v: c for v, c in coeffs.items() if c != 0}
                assert var not in coeffs
                bound = m_lo * lo_bound + m_hi * hi_bound
                mult_lo, mult_hi = Fraction(m_lo), Fraction(m_hi)
                if coeffs:
                    g = 0
                    for c in coeffs.values():
                        g = gcd(g, abs(c))
                    if g > 1:
                        coeffs = {v: c // g for v, c in coeffs.items()}
                        bound = bound / g
                        mult_lo /= g
                        mult_hi /= g
                    # rows the box alone implies are dropped on the spot
                    box_min = sum(c for c in coeffs.values() if c < 0)
                    if bound <= box_min:
                        continue
                else:
                    if bound <= 0:
                        continue  # 0 >= nonpositive: trivially true
                k = tuple(sorted(coeffs.items()))
                cur = merged.get(k)
                if cur is not None and cur[1] >= bound:
                    continue
                rid = self._new_id(coeffs, bound)
                step.combinations.append(
                    Combination(lo_id, hi_id, mult_lo, mult_hi, rid))
                merged[k] = (coeffs, bound, rid)

        self.rows = {rid: (coeffs, bound) for coeffs, bound, rid in merged.values()}
        if len(self.rows) > self.max_rows:
            raise RowBlowupError(self.max_rows, var, step_index)
        self.trace.steps.append(step)
        return step

    def lp_prune(self):
        """Drop every row the remaining rows (plus box) already imply.

        One exact LP per row, so this is opt-in.  A row whose removal makes
        the rest infeasible is conservatively kept (the certificate must
        survive)."""
        from .simplex import ExactSimplex  # local import: simplex sits above
        for rid in sorted(self.rows):
            coeffs, bound = self.rows[rid]
            others = [self.rows[r] for r in self.rows if r != rid]
            system = rows_to_system(self.num_vars, others)
            tab = ExactSimplex(system)
            if not tab.feasible():
                continue
            res = tab.minimize({v: Fraction(c) for v, c in coeffs.items()})
            if res.status == "optimal" and res.value >= bound:
                del self.rows[rid]

    def to_system(self) -> InequalitySystem:
        return rows_to_system(self.num_vars, list(self.rows.values()))


def rows_to_system(num_vars: int,
                   rows: list[tuple[dict[int, int], Fraction]]) -> InequalitySystem:
    """Merge one-sided >= rows back into two-sided rows.  A missing side is
    completed with the bound the 0/1 box implies; a positive constant row
    with empty support becomes the infeasibility certificate [bound, 0]."""
    by_key: dict[tuple, dict[str, Fraction]] = {}
    for coeffs, bound in rows:
        if not coeffs:
            if bound > 0:
                by_key.setdefault((), {})
                cur = by_key[()].get("lower")
                if cur is None or bound > cur:
                    by_key[()]["lower"] = bound
            continue
        items = tuple(sorted(coeffs.items()))
        first_coeff = items[0][1]
        if first_coeff > 0:
            key, side, value = items, "lower", bound
        else:
            key = tuple((v, -c) for v, c in items)
            side, value = "upper", -bound
        entry = by_key.setdefault(key, {})
        if side == "lower":
            if "lower" not in entry or value > entry["lower"]:
                entry["lower"] = value
        else:
            if "upper" not in entry or value < entry["upper"]:
                entry["upper"] = value
    out = []
    for key, entry in by_key.items():
        coeffs = dict(key)
        box_min = Fraction(sum(c for c in coeffs.values() if c < 0))
        box_max = Fraction(sum(c for c in coeffs.values() if c > 0))
        lower = entry.get("lower", box_min)
        upper = entry.get("upper", box_max)
        out.append(BoundedInequality(coeffs, lower, upper))
    out.sort(key=lambda r: r.key())
    return InequalitySystem(num_vars, out, box=True)


def fm_eliminate(system: InequalitySystem, var: int,
                 max_rows: int = 100_000) -> tuple[InequalitySystem, EliminationStep]:
    """Eliminate one variable exactly; a variable absent from every row is a
    no-op step that returns the system unchanged."""
    if not 1 <= var <= system.num_vars:
        raise ValueError(f"x{var} out of range")
    if not any(var in row.coeffs for row in system.rows):
        return system, EliminationStep(var)
    ws = _Workspace(system, max_rows)
    step = ws.eliminate(var, 0)
    return ws.to_system(), step


def fm_project(system: InequalitySystem, keep, order: str = "greedy",
               max_rows: int = 100_000,
               lp_redundancy: bool = False) -> tuple[InequalitySystem, EliminationTrace]:
    """Project a boxed system onto the kept variables.

    ``order`` picks the elimination sequence: "given" eliminates in
    ascending variable index, "greedy" picks the variable minimizing the
    product of lower-bound and upper-bound row counts at each step.
    ``lp_redundancy`` switches on full LP-based redundancy elimination after
    every step (exact duplicates and single-row dominations are always
    dropped; the LP pass costs one solve per surviving row).
    The rational solution set of the result is exactly the projection of the
    input's (the kept variables' box is preserved by the output's box flag).
    """
    keep = set(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    for v in keep:
        if not 1 <= v <= system.num_vars:
            raise ValueError(f"keep variable x{v} out of range")
    remaining = [v for v in range(1, system.num_vars + 1) if v not in keep]
    if not remaining:
        trace = EliminationTrace(final_system=system)
        return system, trace
    ws = _Workspace(system, max_rows)
    step_index = 0
    while remaining:
        if order == "given":
            var = remaining.pop(0)
        elif order == "greedy":
            def cost(v):
                lo = sum(1 for coeffs, _ in ws.rows.values() if coeffs.get(v, 0) > 0)
                hi = sum(1 for coeffs, _ in ws.rows.values() if coeffs.get(v, 0) < 0)
                if lo == hi == 0:
                    return (-1, v)
                return ((lo + 1) * (hi + 1), v)
            var = min(remaining, key=cost)
            remaining.remove(var)
        else:
            raise ValueError(f"unknown order policy {order!r}")
        ws.eliminate(var, step_index)
        if lp_redundancy:
            ws.lp_prune()
        step_index += 1
    projected = ws.to_system()
    ws.trace.final_system = projected
    return projected, ws.trace


def integral_tighten(system: InequalitySystem) -> InequalitySystem:
    """Round each row's bounds toward the integers the integer coefficients
    force: after dividing by the gcd, an integral point's row value is an
    integer, so lower rounds up and upper rounds down.

    Valid over 0/1 (integral) points only; the rational relaxation shrinks.
    Never applied implicitly anywhere in this package.
    """
    import math
    out = []
    for row in system.rows:
        if not row.coeffs:
            out.append(BoundedInequality({}, row.lower, row.upper))
            continue
        g = 0
        for c in row.coeffs.values():
            g = gcd(g, abs(c))
        coeffs = {v: c // g for v, c in row.coeffs.items()}
        out.append(BoundedInequality(
            coeffs, Fraction(math.ceil(row.lower / g)),
            Fraction(math.floor(row.upper / g))))
    return InequalitySystem(system.num_vars, out, system.box)


# ---------------------------------------------------------------------------
# weighted chain aggregation and the base-b digit structure
# ---------------------------------------------------------------------------

@dataclass
class AggregateInequality:
    row: BoundedInequality            # candidate variables only
    b_min: int
    b_max: int
    multipliers: list[int]            # n_1 .. n_{2(e-1)}
    chain_weights: list[int]          # weight applied to each chain's rows


@dataclass
class NumberSystemReport:
    basis: int
    exponent: int
    digits: dict[int, tuple[int, ...]]  # candidate var -> digit row
    coefficients: dict[int, int]        # candidate var -> aggregate coefficient
    reconstruction_ok: bool


def chain_weights(multipliers: list[int]) -> list[int]:
    """Per-chain weights from coupler multiplicities n_1..n_{2(e-1)}:
    chain j is scaled by prod(odd multipliers before it) * prod(even
    multipliers from its own coupler on), which cancels every coupler."""
    e = len(multipliers) // 2 + 1
    weights = []
    for j in range(1, e + 1):
        w = 1
        for l in range(1, j):
            w *= multipliers[2 * l - 2]       # n_{2l-1}
        for l in range(j, e):
            w *= multipliers[2 * l - 1]       # n_{2l}
        weights.append(w)
    return weights


def chain_aggregate(inst: SynthesizedInstance,
                    multipliers: list[int] | None = None) -> AggregateInequality:
    """Weighted sum of all clause rows of a synthesized instance.

    Chain j's rows are scaled by the coupler-cancelling weight and added;
    everything except the candidate variables must cancel exactly.  The
    default multipliers are read off the instance (coupler j appears
    n_{2j-1} times in chain j and n_{2j} times in chain j+1, which is
    (1, b) for generator output).
    """
    if any(cl.kind != "or" for cl in inst.cnf.clauses):
        raise ValueError("aggregation needs OR clauses (no inequality form for XOR)")
    if multipliers is None:
        multipliers = []
        for m_left, m_right in inst.coupler_multiplicities():
            multipliers.extend((m_left, m_right))
    e = len(inst.chain_rows)
    if len(multipliers) != 2 * (e - 1):
        raise ValueError(f"need {2 * (e - 1)} multipliers, got {len(multipliers)}")
    if any(m < 1 for m in multipliers):
        raise ValueError("multipliers must be positive")
    weights = chain_weights(multipliers)
    coeffs: dict[int, int] = {}
    lo = hi = 0
    for j in range(1, e + 1):
        w = weights[j - 1]
        for ci in inst.chain_rows[j]:
            row = clause_to_inequality(inst.cnf.clauses[ci])
            for v, c in row.coeffs.items():
                coeffs[v] = coeffs.get(v, 0) + w * c
            lo += w * int(row.lower)
            hi += w * int(row.upper)
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    stray = [v for v in coeffs if v not in inst.candidate_vars]
    if stray:
        raise AggregationError(
            f"non-candidate variables survived the weighted sum: "
            f"{sorted(stray)} (weights {weights})")
    row = BoundedInequality(coeffs, Fraction(lo), Fraction(hi))
    return AggregateInequality(row, lo, hi, list(multipliers), weights)


def decompose_base_b(value: int, b: int, e: int) -> list[int]:
    """Canonical e-digit base-b expansion (most significant first).

    For b >= 2 this is the unique expansion and requires 0 <= value < b**e;
    for b == 1 the representation degenerates to a single bucket holding the
    whole value.
    """
    if b < 1 or e < 1:
        raise ValueError("need b >= 1 and e >= 1")
    if value < 0:
        raise ValueError("value must be nonnegative")
    if b == 1:
        return [value]
    if value >= b ** e:
        raise ValueError(f"{value} is not representable in {e} base-{b} digits")
    digits = []
    rest = value
    for j in range(e - 1, -1, -1):
        digit, rest = divmod(rest, b ** j)
        digits.append(digit)
    return digits


def digits_match(value: int, b: int, digit_row) -> bool:
    """Does value equal sum(a_j * b**(e-j)) for the given digit row?  Unlike
    the canonical expansion this works for digits >= b (generator rows)."""
    e = len(digit_row)
    return value == sum(a * b ** (e - 1 - j) for j, a in enumerate(digit_row))


def max_exponent(n: int, d: int, c: int) -> int:
    """Largest chain count supported by n variables with d candidates and c
    internals per chain: floor((n - d + 1) / (c + 1))."""
    if c < 1:
        raise ValueError("need c >= 1")
    if n <= d:
        raise ValueError("no room for chains: need n > d")
    return (n - d + 1) // (c + 1)


def number_system_report(inst: SynthesizedInstance,
                         agg: AggregateInequality | None = None) -> NumberSystemReport:
    """Compare aggregate coefficients against the generator's digit matrix
    under the positional base-b reading."""
    if inst.spec is None:
        raise ValueError("instance has no family spec to compare against")
    if agg is None:
        agg = chain_aggregate(inst)
    spec = inst.spec
    digits = {}
    coefficients = {}
    ok = True
    for i, v in enumerate(inst.candidate_vars):
        row = spec.digits[i]
        coeff = agg.row.coeffs.get(v, 0) * inst.candidate_polarity
        digits[v] = tuple(row)
        coefficients[v] = coeff
        if not digits_match(coeff, spec.b, row):
            ok = False
    return NumberSystemReport(spec.b, spec.e, digits, coefficients, ok)
