"""End-to-end chain auditing: recomputation, promise bounds, witness cases."""

import dataclasses
from fractions import Fraction

from latred.errors import PromiseViolation
from latred.exactmath import PNorm
from latred.lattice import SuccessiveMinima
from latred.reductions import compute_alpha, cvp_to_sivp, full_chain, sat_to_cvp
from latred.satcore import CnfFormula, GapSatInstance
from latred.solvers import decide_sivp
from latred.verify import (
    assert_chain,
    check_no_witness_cases,
    validate_bounded_minima,
    verify_chain,
)

F = Fraction

YES_CHECKS = [
    "stage-2sat-recompute",
    "stage-cvp-recompute",
    "alpha-required-consistent",
    "alpha-pow-consistent",
    "alpha-sufficient",
    "stage-sivp-recompute",
    "rank-sivp",
    "gadget-count-identity",
    "promise-consistent-input",
    "cvp-dist-identity",
    "cvp-promise-bound",
    "bounded-minima",
    "sivp-promise-bound",
]


def _yes_chain(p):
    f3 = CnfFormula.from_json_dict({"n": 3, "clauses": [[1, 2, 3], [-1, 2, -3]]})
    return full_chain(GapSatInstance(f3, F(5, 6), F(1), "YES"), PNorm.finite(p))


def test_verify_chain_accepts_good_chains():
    for p in (1, 2):
        rep = verify_chain(_yes_chain(p))
        assert rep.ok, [c.name for c in rep.failures()]
        assert [c.name for c in rep.checks] == YES_CHECKS
        assert rep.failures() == []
        d = rep.to_json_dict()
        assert d["ok"] is True
        assert len(d["checks"]) == len(YES_CHECKS)


def test_assert_chain_raises_on_tampered_alpha():
    chain = _yes_chain(1)
    bad = dataclasses.replace(chain.alpha, alpha_rat=F(1, 100),
                              alpha_rat_pow=F(1, 10000))
    tampered = dataclasses.replace(chain, alpha=bad)
    rep = verify_chain(tampered)
    assert not rep.ok
    names = [c.name for c in rep.failures()]
    assert "alpha-sufficient" in names
    assert "alpha-pow-consistent" in names
    try:
        assert_chain(tampered)
    except PromiseViolation as e:
        assert e.report.failures()
    else:
        raise AssertionError("tampered chain passed")
    # the untouched chain still passes assert_chain
    assert assert_chain(chain).ok


def test_verify_chain_rejects_mislabeled_promise():
    # satisfiable input declared NO: the recomputed fraction exposes it
    f3 = CnfFormula.from_json_dict({"n": 3, "clauses": [[1, 2, 3], [-1, 2, -3]]})
    chain = full_chain(GapSatInstance(f3, F(5, 6), F(1), "NO"), PNorm.finite(1))
    rep = verify_chain(chain)
    assert not rep.ok
    names = [c.name for c in rep.failures()]
    assert "promise-consistent-input" in names
    assert "cvp-promise-bound" in names
    assert "sivp-promise-bound" in names


def test_validate_bounded_minima_report():
    chain = _yes_chain(1)
    rep = validate_bounded_minima(chain.cvp)
    assert rep.ok
    # the flip-everything bound: tau r^p = 2^p m
    m = chain.sat2.formula.num_clauses
    assert rep.bound_pow == chain.cvp.tau * chain.cvp.r_pow == 2 * m
    assert rep.lambda_n_pow == rep.minima.values_pow[-1]
    assert rep.lambda_n_pow <= rep.bound_pow


def _no_instance(p):
    # eps* = 3/4 falls below delta = 5/6, a genuine NO at these parameters
    f2 = CnfFormula.from_json_dict(
        {"n": 2, "clauses": [[1, 2], [-1, 2], [1, -2], [-1, -2]]})
    gi = GapSatInstance(f2, F(5, 6), F(1), "NO")
    cvp = sat_to_cvp(gi, PNorm.finite(p))
    alpha = compute_alpha(cvp.p, cvp.r_pow, cvp.tau, cvp.gamma_pow)
    return cvp, alpha, cvp_to_sivp(cvp, alpha=alpha)


def test_check_no_witness_cases_on_genuine_no():
    for p in (1, 2):
        cvp, alpha, sivp = _no_instance(p)
        decision = decide_sivp(sivp)
        assert decision.answer == "NO"
        rep = check_no_witness_cases(cvp, alpha, decision.minima)
        assert rep.ok, [c.name for c in rep.failures()]
        names = [c.name for c in rep.checks]
        assert "sivp-no-witness-nonzero-coeff" in names
        assert "sivp-no-witness-cases" in names


def test_check_no_witness_cases_rejects_zeroed_coeffs():
    cvp, alpha, sivp = _no_instance(2)
    minima = decide_sivp(sivp).minima
    # forging coefficients that never touch the appended column must fail
    forged = SuccessiveMinima(minima.values_pow, minima.witnesses,
                              tuple(z[:-1] + (0,) for z in minima.coeffs))
    rep = check_no_witness_cases(cvp, alpha, forged)
    assert not rep.ok
    assert "sivp-no-witness-nonzero-coeff" in [c.name for c in rep.failures()]
