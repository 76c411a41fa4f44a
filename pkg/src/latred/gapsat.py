"""Gap-preserving reduction from width-3 CNF to width-2 CNF.

Each input clause (l1 | l2 | l3) becomes ten clauses over the original
literals plus one fresh auxiliary variable y:

    (l1) (l2) (l3) (-l1|-l2) (-l1|-l3) (-l2|-l3) (y) (l1|-y) (l2|-y) (l3|-y)

Exhaustive case check (frozen in the tests): if the input clause is satisfied
the best choice of y satisfies exactly 7 of the ten, otherwise exactly 6.
Summing over clauses, an input optimum of s* becomes an output optimum of
6m + s*, so gap (delta, epsilon) maps to ((6+delta)/10, (6+epsilon)/10).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import WidthError
from .satcore import Clause, CnfFormula, GapSatInstance, Literal

PAD_CAVEAT = (
    "padding adds satisfiable fresh literals: the padded formula's best "
    "fraction can exceed the original's, so gap parameters are not carried over"
)


@dataclass(frozen=True)
class PadReport:
    """What the width-normalization pre-pass did, and why it is not free."""

    original_num_vars: int
    fresh_vars: tuple[int, ...]
    padded_clauses: tuple[int, ...]
    caveat: str = PAD_CAVEAT

    @property
    def changed(self) -> bool:
        return bool(self.padded_clauses)


def pad_narrow_clauses(f: CnfFormula) -> tuple[CnfFormula, PadReport]:
    """Pad width-1/2 clauses up to width 3 with shared fresh positive literals.

    Setting the fresh variables false restores the original satisfaction count
    of every assignment, so the pads are always-false-able; the report's caveat
    records that the max-sat fraction may still increase. Clauses wider than 3
    raise WidthError.
    """
    if any(cl.width > 3 for cl in f.clauses):
        raise WidthError("clause wider than 3 cannot be padded down")
    need = max((3 - cl.width for cl in f.clauses), default=0)
    fresh = tuple(f.num_vars + i + 1 for i in range(need))
    padded_idx = []
    out = []
    for idx, cl in enumerate(f.clauses):
        missing = 3 - cl.width
        if missing == 0:
            out.append(cl)
            continue
        extra = tuple(Literal(v) for v in fresh[:missing])
        out.append(Clause(cl.literals + extra))
        padded_idx.append(idx)
    if not padded_idx:
        return f, PadReport(f.num_vars, (), ())
    return (CnfFormula(f.num_vars + need, tuple(out)),
            PadReport(f.num_vars, fresh, tuple(padded_idx)))


def _negate(lit: Literal) -> Literal:
    return Literal(lit.var, not lit.negated)


def _gadget(cl: Clause, aux: int) -> list[Clause]:
    l1, l2, l3 = cl.literals
    y = Literal(aux)
    ny = Literal(aux, True)
    return [
        Clause((l1,)),
        Clause((l2,)),
        Clause((l3,)),
        Clause((_negate(l1), _negate(l2))),
        Clause((_negate(l1), _negate(l3))),
        Clause((_negate(l2), _negate(l3))),
        Clause((y,)),
        Clause((l1, ny)),
        Clause((l2, ny)),
        Clause((l3, ny)),
    ]


def reduce_3sat_to_2sat(inst: GapSatInstance) -> GapSatInstance:
    """Apply the ten-clause gadget to every clause of a width-3 instance.

    Requires every clause to have exactly 3 literals over distinct variables
    (WidthError otherwise; run pad_narrow_clauses first for narrow clauses).
    Output: n+m variables (auxiliary y_i = n+i), exactly 10m clauses in gadget
    order, gap ((6+delta)/10, (6+epsilon)/10), promise tag carried over.
    """
    f = inst.formula
    for idx, cl in enumerate(f.clauses):
        if cl.width != 3:
            raise WidthError(
                f"clause {idx} has width {cl.width}, need exactly 3")
    n, m = f.num_vars, f.num_clauses
    out_clauses: list[Clause] = []
    for i, cl in enumerate(f.clauses):
        out_clauses.extend(_gadget(cl, n + i + 1))
    out_formula = CnfFormula(n + m, tuple(out_clauses))
    return GapSatInstance(
        out_formula,
        (6 + inst.delta) / 10,
        (6 + inst.epsilon) / 10,
        inst.promise,
    )
