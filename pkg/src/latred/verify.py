"""Desk-scale verification: recompute every stage and bound of a chain.

Nothing here trusts the metadata it is handed. Stages are re-derived and
compared field by field, alpha is re-justified from the CVP parameters, and
the promises are checked against exhaustive ground truth (brute-force MAX-SAT,
exact CVP, exact successive minima). Every check lands in a ChainReport with
the exact quantities involved, so a failure is a numeric trace rather than a
bare boolean.

Boundary semantics: the NO promise checks use non-strict lower bounds
(dist >= gamma*r, lambda >= gamma'*r'), since a NO instance whose optimum sits
exactly on delta yields a distance exactly on the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import promise as promise_tags
from .errors import PromiseViolation
from .exactmath import ExactVector, norm_power, scalar_to_str
from .lattice import CvpBoundedInstance, SuccessiveMinima
from .reductions import (
    ChainResult,
    cvp_to_sivp,
    reduce_3sat_to_2sat,
    sat_to_cvp,
)
from .satcore import max_sat_fraction
from .solvers import EnumBudget, decide_sivp, solve_cvp, successive_minima


@dataclass(frozen=True)
class CheckRecord:
    name: str
    ok: bool
    detail: str

    def to_json_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class ChainReport:
    checks: list[CheckRecord]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str) -> None:
        self.checks.append(CheckRecord(name, bool(ok), detail))

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.ok]

    def to_json_dict(self) -> dict:
        return {"ok": self.ok,
                "checks": [c.to_json_dict() for c in self.checks]}


@dataclass(frozen=True)
class BoundedMinimaReport:
    """Is lambda_n^p <= tau * r_pow on the CVP lattice? Exact evidence."""

    ok: bool
    lambda_n_pow: Fraction
    bound_pow: Fraction
    minima: SuccessiveMinima


def validate_bounded_minima(inst: CvpBoundedInstance,
                            budget: EnumBudget | None = None) -> BoundedMinimaReport:
    """Check the bounded-minima side promise by computing lambda_n exactly."""
    minima = successive_minima(inst.basis, inst.p, budget)
    top = minima.values_pow[-1]
    bound = inst.tau * inst.r_pow
    return BoundedMinimaReport(top <= bound, top, bound, minima)


def _fmt(x) -> str:
    return scalar_to_str(x) if isinstance(x, Fraction) else str(x)


def verify_chain(chain: ChainResult,
                 budget: EnumBudget | None = None) -> ChainReport:
    """Recompute a full chain and check every stage, bound, and promise.

    Returns the report; assert_chain raises on failure instead. Brute-force
    steps run at desk scale only (TooLarge propagates past the limits).
    """
    report = ChainReport([])
    p = chain.p
    pp = p.p
    sat3, sat2, cvp, alpha, sivp = (
        chain.sat3, chain.sat2, chain.cvp, chain.alpha, chain.sivp)
    promise = sat3.promise

    sat2_re = reduce_3sat_to_2sat(sat3)
    report.add("stage-2sat-recompute", sat2_re == sat2,
               "gadget output matches the recorded 2SAT stage"
               if sat2_re == sat2 else
               "recorded 2SAT stage differs from the recomputed gadget output")

    cvp_re = sat_to_cvp(sat2, p)
    report.add("stage-cvp-recompute", cvp_re == cvp,
               "clause-matrix encoding matches the recorded CVP stage"
               if cvp_re == cvp else
               "recorded CVP stage differs from the recomputed encoding")

    required = max(cvp.r_pow * (cvp.tau - 1),
                   cvp.gamma_pow * cvp.r_pow / (2 ** pp - 1))
    report.add("alpha-required-consistent",
               alpha.alpha_pow_required == required,
               f"recorded required alpha^{pp} = "
               f"{_fmt(alpha.alpha_pow_required)}, recomputed {_fmt(required)}")
    report.add("alpha-pow-consistent",
               alpha.alpha_rat ** pp == alpha.alpha_rat_pow,
               f"alpha = {_fmt(alpha.alpha_rat)}, "
               f"alpha^{pp} recorded as {_fmt(alpha.alpha_rat_pow)}")
    report.add("alpha-sufficient",
               alpha.alpha_rat > 0 and alpha.alpha_rat_pow >= required,
               f"alpha^{pp} = {_fmt(alpha.alpha_rat_pow)} vs required "
               f"{_fmt(required)}")

    sivp_re = cvp_to_sivp(cvp, alpha=alpha)
    report.add("stage-sivp-recompute", sivp_re == sivp,
               "appended-column construction matches the recorded SIVP stage"
               if sivp_re == sivp else
               "recorded SIVP stage differs from the recomputed construction")

    n3, m3 = sat3.formula.num_vars, sat3.formula.num_clauses
    report.add("rank-sivp", sivp.basis.n == n3 + m3 + 1,
               f"SIVP rank {sivp.basis.n}, expected n+m+1 = {n3 + m3 + 1}")

    f3, _ = max_sat_fraction(sat3.formula)
    f2, _ = max_sat_fraction(sat2.formula)
    m2 = sat2.formula.num_clauses
    report.add("gadget-count-identity", f2 * m2 == 6 * m3 + f3 * m3,
               f"2SAT optimum count {_fmt(f2 * m2)}, "
               f"expected 6m + s* = {_fmt(Fraction(6 * m3) + f3 * m3)}")

    if promise == promise_tags.YES:
        report.add("promise-consistent-input", f3 >= sat3.epsilon,
                   f"best fraction {_fmt(f3)} vs epsilon {_fmt(sat3.epsilon)}")
    elif promise == promise_tags.NO:
        report.add("promise-consistent-input", f3 <= sat3.delta,
                   f"best fraction {_fmt(f3)} vs delta {_fmt(sat3.delta)}")

    sol = solve_cvp(cvp.basis, cvp.target, p, budget)
    expected_dist = m2 * (f2 + (1 - f2) * Fraction(3) ** pp)
    report.add("cvp-dist-identity", sol.dist_pow == expected_dist,
               f"dist^{pp} = {_fmt(sol.dist_pow)}, clause-count identity "
               f"gives {_fmt(expected_dist)}")
    if promise == promise_tags.YES:
        report.add("cvp-promise-bound", sol.dist_pow <= cvp.r_pow,
                   f"dist^{pp} = {_fmt(sol.dist_pow)} vs r^{pp} = "
                   f"{_fmt(cvp.r_pow)}")
    elif promise == promise_tags.NO:
        report.add("cvp-promise-bound",
                   sol.dist_pow >= cvp.gamma_pow * cvp.r_pow,
                   f"dist^{pp} = {_fmt(sol.dist_pow)} vs gamma^{pp} r^{pp} = "
                   f"{_fmt(cvp.gamma_pow * cvp.r_pow)}")

    bm = validate_bounded_minima(cvp, budget)
    report.add("bounded-minima", bm.ok,
               f"lambda_n^{pp} = {_fmt(bm.lambda_n_pow)} vs tau r^{pp} = "
               f"{_fmt(bm.bound_pow)}")

    decision = decide_sivp(sivp, budget)
    top = decision.minima.values_pow[-1]
    if promise == promise_tags.YES:
        report.add("sivp-promise-bound", top <= sivp.r_pow,
                   f"lambda_(n+1)^{pp} = {_fmt(top)} vs r'^{pp} = "
                   f"{_fmt(sivp.r_pow)}")
    elif promise == promise_tags.NO:
        threshold = sivp.gamma_prime_pow * sivp.r_pow
        report.add("sivp-promise-bound", top >= threshold,
                   f"lambda_(n+1)^{pp} = {_fmt(top)} vs gamma'^{pp} r'^{pp} = "
                   f"{_fmt(threshold)}")
        _check_no_witness_cases(report, chain.cvp, chain.alpha,
                                decision.minima)
    return report


def check_no_witness_cases(cvp: CvpBoundedInstance, alpha,
                           minima: SuccessiveMinima) -> ChainReport:
    """Standalone case-split report for a NO decision's witnesses."""
    report = ChainReport([])
    _check_no_witness_cases(report, cvp, alpha, minima)
    return report


def _check_no_witness_cases(report: ChainReport, cvp: CvpBoundedInstance,
                            alpha, minima: SuccessiveMinima) -> None:
    """NO case split over the appended-column coefficient of each witness.

    Any n+1 independent vectors include one with nonzero last coefficient c.
    For |c| = 1 the first d coordinates are a lattice-to-target difference, so
    their norm power carries the CVP NO bound; for |c| >= 2 the last
    coordinate alone is |c*alpha|^p >= 2^p alpha^p >= gamma^p r^p + alpha^p.
    """
    p = cvp.p
    pp = p.p
    d = cvp.basis.d
    nonzero = 0
    cases_ok = True
    details = []
    for value, witness, coeff in zip(minima.values_pow, minima.witnesses,
                                     minima.coeffs):
        c = coeff[-1]
        if c == 0:
            continue
        nonzero += 1
        if abs(c) == 1:
            head_pow = norm_power(ExactVector(witness[i] for i in range(d)), p)
            ok = head_pow >= cvp.gamma_pow * cvp.r_pow
            details.append(
                f"|c|=1 witness head^{pp} {_fmt(head_pow)} vs "
                f"{_fmt(cvp.gamma_pow * cvp.r_pow)}")
        else:
            tail_pow = (abs(Fraction(c)) * alpha.alpha_rat) ** pp
            ok = tail_pow >= cvp.gamma_pow * cvp.r_pow + alpha.alpha_rat_pow
            details.append(
                f"|c|={abs(c)} witness tail^{pp} {_fmt(tail_pow)} vs "
                f"{_fmt(cvp.gamma_pow * cvp.r_pow + alpha.alpha_rat_pow)}")
        cases_ok = cases_ok and ok
    report.add("sivp-no-witness-nonzero-coeff", nonzero >= 1,
               f"{nonzero} of {len(minima.coeffs)} witnesses use the "
               f"appended column")
    report.add("sivp-no-witness-cases", cases_ok,
               "; ".join(details) if details else "no nonzero-coefficient witnesses")


def assert_chain(chain: ChainResult, budget: EnumBudget | None = None) -> ChainReport:
    """verify_chain, raising PromiseViolation (report attached) on failure."""
    report = verify_chain(chain, budget)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures())
        raise PromiseViolation(f"chain verification failed: {names}",
                               report=report)
    return report
