"""CNF data model, DIMACS parsing, and the exhaustive MAX-SAT baseline."""

import random
from fractions import Fraction

from latred.errors import ParseError, TautologyError, TooLarge
from latred.satcore import (
    BRUTE_SAT_LIMIT,
    Clause,
    CnfFormula,
    GapSatInstance,
    Literal,
    count_satisfied,
    max_sat_fraction,
    parse_dimacs,
    parse_dimacs_report,
)

import oracles


def _random_cnf(rng, n, m, width=3):
    # chunked clauses first so every variable appears, then random fill
    clauses = []
    for lo in range(1, n + 1, width):
        block = list(range(lo, min(lo + width, n + 1)))
        while len(block) < width:
            extra = rng.randint(1, n)
            if extra not in block:
                block.append(extra)
        clauses.append([v * rng.choice([1, -1]) for v in block])
    while len(clauses) < m:
        block = rng.sample(range(1, n + 1), width)
        clauses.append([v * rng.choice([1, -1]) for v in block])
    return CnfFormula.from_json_dict({"n": n, "clauses": clauses})


def test_literal_round_trip_and_eval():
    lit = Literal.from_dimacs(-3)
    assert lit.var == 3 and lit.negated
    assert lit.to_dimacs() == -3
    assert lit.value_under((False, False, False))
    assert not lit.value_under((False, False, True))
    assert Literal.from_dimacs(2) == Literal(2)
    for bad in (0, -1):
        try:
            Literal(bad)
        except ParseError:
            continue
        raise AssertionError("accepted var %d" % bad)


def test_clause_rejects_duplicates_and_tautologies():
    try:
        Clause((Literal(1), Literal(1)))
    except ParseError:
        pass
    else:
        raise AssertionError("duplicate literal accepted")
    try:
        Clause((Literal(1), Literal(1, True)))
    except TautologyError:
        pass
    else:
        raise AssertionError("tautology accepted")
    c = Clause((Literal(2, True), Literal(1)))
    assert c.width == 2
    assert sorted(c.variables()) == [1, 2]
    assert c.satisfied_by((True, True))
    assert c.satisfied_by((False, False))
    assert not c.satisfied_by((False, True))


def test_formula_validation():
    try:
        CnfFormula(1, (Clause((Literal(2),)),))
    except ParseError:
        pass
    else:
        raise AssertionError("literal beyond declared count accepted")
    try:
        CnfFormula(3, (Clause((Literal(1), Literal(2))),))
    except ParseError:
        pass
    else:
        raise AssertionError("unused variable accepted")


def test_json_and_dimacs_round_trips():
    f = CnfFormula.from_json_dict({"n": 2, "clauses": [[1, 2], [1, -2]]})
    assert f.to_json_dict() == {"n": 2, "clauses": [[1, 2], [1, -2]]}
    assert parse_dimacs(f.to_dimacs()) == f
    rng = random.Random(7)
    for _ in range(25):
        g = _random_cnf(rng, rng.randint(4, 9), rng.randint(3, 12))
        assert parse_dimacs(g.to_dimacs()) == g
        assert CnfFormula.from_json_dict(g.to_json_dict()) == g


def test_parse_dimacs_rejects_malformed_input():
    bad = [
        "",
        "p cnf x 2\n1 0\n",              # non-numeric header
        "1 2 0\n",                        # missing header
        "p cnf 2 1\n1 3 0\n",             # literal beyond declared count
        "p cnf 2 2\n1 2 0\n",             # clause count mismatch
        "p cnf 2 1\n1 2\n",               # unterminated clause
        "p cnf 2 1\n1 2 0\nextra 0\n",    # trailing garbage
        "p cnf 2 1\n1 1 0\n",             # duplicate literal
    ]
    for text in bad:
        try:
            parse_dimacs(text)
        except ParseError:
            continue
        raise AssertionError("accepted %r" % text)


def test_parse_dimacs_report_renumbers_unused_vars():
    f, remap = parse_dimacs_report("c comment\np cnf 3 2\n1 2 0\n1 -2 0\n")
    assert f.num_vars == 2
    assert remap.declared_num_vars == 3
    assert remap.kept == (1, 2)
    assert remap.dropped == (3,)


def test_count_satisfied_matches_oracle():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(4, 8)
        f = _random_cnf(rng, n, rng.randint(3, 10))
        bits = tuple(rng.choice([False, True]) for _ in range(n))
        clauses = [[lit.to_dimacs() for lit in c.literals] for c in f.clauses]
        assert count_satisfied(f, bits) == oracles.count_satisfied_naive(clauses, bits)
    try:
        count_satisfied(f, bits[:-1])
    except ValueError:
        pass
    else:
        raise AssertionError("wrong assignment length accepted")


def test_max_sat_fraction_matches_brute_oracle():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(4, 8)
        m = rng.randint(3, 12)
        f = _random_cnf(rng, n, m)
        clauses = [[lit.to_dimacs() for lit in c.literals] for c in f.clauses]
        best, witness = oracles.brute_max_sat(n, clauses)
        frac, assignment = max_sat_fraction(f)
        assert frac == Fraction(best, m)
        # ties break to the lexicographically smallest assignment
        assert assignment == witness
        assert count_satisfied(f, assignment) == best


def test_max_sat_fraction_rejects_oversized_formulas():
    n = BRUTE_SAT_LIMIT + 1
    clauses = [[i, i + 1, i + 2] for i in range(1, n - 1)]
    f = CnfFormula.from_json_dict({"n": n, "clauses": clauses})
    try:
        max_sat_fraction(f)
    except TooLarge:
        pass
    else:
        raise AssertionError("brute force beyond %d vars accepted" % BRUTE_SAT_LIMIT)


def test_gap_instance_validation_and_round_trip():
    f = CnfFormula.from_json_dict({"n": 2, "clauses": [[1, 2], [1, -2]]})
    g = GapSatInstance(f, Fraction(1, 2), Fraction(3, 4), "YES")
    assert GapSatInstance.from_json_dict(g.to_json_dict()) == g
    bad = [
        (Fraction(3, 4), Fraction(1, 2), "YES"),   # delta >= epsilon
        (Fraction(1, 2), Fraction(5, 4), "YES"),   # epsilon > 1
        (Fraction(-1, 2), Fraction(3, 4), "YES"),  # delta < 0
    ]
    for delta, eps, tag in bad:
        try:
            GapSatInstance(f, delta, eps, tag)
        except ValueError:
            continue
        raise AssertionError("accepted delta=%s epsilon=%s" % (delta, eps))
    try:
        GapSatInstance(f, Fraction(1, 2), Fraction(3, 4), "MAYBE")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown promise tag accepted")
