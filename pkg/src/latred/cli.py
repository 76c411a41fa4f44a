"""Command line workbench over the reduction chain and the exact solvers.

Subcommands:
  gen     deterministic random width-3 CNF in DIMACS form
  reduce  one reduction step (sat3to2 | sat2cvp | cvp2sivp) or chain
  solve   exact solvers on instance files (cvp | sivp | minima)
  verify  recompute and check a written chain from its manifest
  chain   reduce chain + verify: stage files, manifest, and report

Exit codes: 0 ok, 2 promise or verification failure, 3 budget exceeded,
64 usage or bad parameters, 66 unreadable or unparseable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import promise as promise_tags
from .errors import (
    BudgetExceeded,
    ParseError,
    PromiseViolation,
    RankDeficient,
    RankTooLarge,
    TautologyError,
    TooLarge,
    WidthError,
)
from .exactmath import PNorm, scalar_from_str, scalar_to_str
from .gapsat import reduce_3sat_to_2sat
from .lattice import CvpBoundedInstance, CvpInstance, SivpInstance
from .reductions import (
    DEFAULT_DENOMINATOR,
    DEFAULT_SLACK,
    AlphaChoice,
    ChainResult,
    cvp_to_sivp,
    full_chain,
    sat_to_cvp,
)
from .satcore import Clause, CnfFormula, GapSatInstance, Literal, \
    max_sat_fraction, parse_dimacs
from .solvers import EnumBudget, decide_sivp, solve_cvp, successive_minima
from .verify import ChainReport, verify_chain

BUDGET_ENV = "LATRED_BUDGET_NODES"
MANIFEST_NAME = "chain_manifest.json"
_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Fixed 64-bit generator so `gen` output never drifts across versions."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_word(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        # rejection sampling keeps the draw exactly uniform
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_word()
            if x < limit:
                return x % n


def random_3cnf(seed: int, num_vars: int, num_clauses: int) -> CnfFormula:
    """Width-3 clauses over distinct variables; every variable is used.

    Purely a function of its arguments. The first ceil(n/3) clauses cover the
    variables in chunks (random signs, random fill for a short last chunk),
    the rest are uniform; a final Fisher-Yates pass mixes the order.
    """
    if num_vars < 3:
        raise ValueError("need at least 3 variables for width-3 clauses")
    cover = (num_vars + 2) // 3
    if num_clauses < cover:
        raise ValueError(
            f"{num_clauses} clauses cannot touch all {num_vars} variables")
    rng = SplitMix64(seed)

    def fill_distinct(chosen: list[int]) -> list[int]:
        while len(chosen) < 3:
            v = 1 + rng.below(num_vars)
            if v not in chosen:
                chosen.append(v)
        return sorted(chosen)

    def finish(vs: list[int]) -> Clause:
        return Clause(tuple(Literal(v, rng.below(2) == 1) for v in vs))

    clauses = [
        finish(fill_distinct(
            list(range(3 * i + 1, min(3 * i + 4, num_vars + 1)))))
        for i in range(cover)
    ]
    clauses.extend(finish(fill_distinct([]))
                   for _ in range(num_clauses - cover))
    for i in range(len(clauses) - 1, 0, -1):
        j = rng.below(i + 1)
        clauses[i], clauses[j] = clauses[j], clauses[i]
    return CnfFormula(num_vars, tuple(clauses))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is taken
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _parse_p(text: str) -> PNorm:
    if text.strip().lower() in ("inf", "infinity"):
        return PNorm.infinity()
    try:
        return PNorm.finite(int(text))
    except ValueError as exc:
        raise ValueError(f"bad p {text!r}: {exc}") from exc


def _budget(args) -> EnumBudget:
    nodes = args.budget_nodes
    if nodes is None:
        env = os.environ.get(BUDGET_ENV)
        nodes = int(env) if env else None
    kwargs = {}
    if nodes is not None:
        kwargs["max_nodes"] = nodes
    if args.max_rank is not None:
        kwargs["max_rank"] = args.max_rank
    return EnumBudget(**kwargs)


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return obj


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _default_gap(formula: CnfFormula) -> tuple[Fraction, Fraction, str]:
    # bracket the true optimum from below: a YES instance by construction
    best, _ = max_sat_fraction(formula)
    m = formula.num_clauses
    s = int(best * m)
    return Fraction(3 * s - 1, 3 * m), Fraction(s, m), promise_tags.YES


def _load_sat_instance(args) -> GapSatInstance:
    """Gap-SAT instance from JSON, or from DIMACS plus --delta/--epsilon.

    DIMACS input without explicit gap flags gets (3s*-1)/(3m) < s*/m from the
    brute-force optimum: a tight honest YES instance at desk scale.
    """
    text = Path(args.infile).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        inst = GapSatInstance.from_json_dict(json.loads(text))
        if args.delta is not None or args.epsilon is not None:
            inst = GapSatInstance(
                inst.formula,
                scalar_from_str(args.delta) if args.delta else inst.delta,
                scalar_from_str(args.epsilon) if args.epsilon else inst.epsilon,
                args.promise or inst.promise)
        elif args.promise:
            inst = GapSatInstance(inst.formula, inst.delta, inst.epsilon,
                                  args.promise)
        return inst
    formula = parse_dimacs(text)
    if args.delta is None and args.epsilon is None:
        delta, epsilon, tag = _default_gap(formula)
        return GapSatInstance(formula, delta, epsilon, args.promise or tag)
    if args.delta is None or args.epsilon is None:
        raise ValueError("give both --delta and --epsilon, or neither")
    return GapSatInstance(formula, scalar_from_str(args.delta),
                          scalar_from_str(args.epsilon),
                          args.promise or promise_tags.UNKNOWN)


def cmd_gen(args) -> int:
    formula = random_3cnf(args.seed, args.vars, args.clauses)
    header = (f"c latred gen seed={args.seed} vars={args.vars} "
              f"clauses={args.clauses}\n")
    _emit(args, header + formula.to_dimacs())
    return 0


def cmd_reduce(args) -> int:
    if args.step == "sat3to2":
        out = reduce_3sat_to_2sat(_load_sat_instance(args))
        _emit(args, json.dumps(out.to_json_dict(), indent=2) + "\n")
        return 0
    if args.step == "sat2cvp":
        inst = GapSatInstance.from_json_dict(_read_json(args.infile))
        out = sat_to_cvp(inst, _parse_p(args.p))
        _emit(args, json.dumps(out.to_json_dict(), indent=2) + "\n")
        return 0
    if args.step == "cvp2sivp":
        inst = CvpInstance.from_json_dict(_read_json(args.infile))
        if not isinstance(inst, CvpBoundedInstance):
            raise ParseError(
                f"{args.infile}: cvp2sivp needs a bounded instance (tau field)")
        out = cvp_to_sivp(inst, args.denominator,
                          scalar_from_str(args.slack))
        _emit(args, json.dumps(out.to_json_dict(), indent=2) + "\n")
        return 0
    # chain: all stages plus manifest, no verification pass
    result = full_chain(_load_sat_instance(args), _parse_p(args.p),
                        args.denominator, scalar_from_str(args.slack))
    _write_chain_files(result, Path(args.out_dir))
    print(f"wrote 4 stage files and {MANIFEST_NAME} to {args.out_dir}")
    return 0


STAGE_FILES = {"sat3": "sat3.json", "sat2": "sat2.json",
               "cvp": "cvp.json", "sivp": "sivp.json"}


def _write_chain_files(result: ChainResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / STAGE_FILES["sat3"], result.sat3.to_json_dict())
    _write_json(out_dir / STAGE_FILES["sat2"], result.sat2.to_json_dict())
    _write_json(out_dir / STAGE_FILES["cvp"], result.cvp.to_json_dict())
    _write_json(out_dir / STAGE_FILES["sivp"], result.sivp.to_json_dict())
    _write_json(out_dir / MANIFEST_NAME, result.manifest_dict(STAGE_FILES))


def load_chain(manifest_path: str) -> tuple[ChainResult, dict]:
    """Rebuild a ChainResult from a manifest and its stage files."""
    manifest = _read_json(manifest_path)
    if manifest.get("format") != "latred-chain/1":
        raise ParseError(f"{manifest_path}: not a latred-chain/1 manifest")
    base = Path(manifest_path).parent
    files = manifest["files"]

    def stage(key: str) -> dict:
        return _read_json(str(base / files[key]))

    sat3 = GapSatInstance.from_json_dict(stage("sat3"))
    sat2 = GapSatInstance.from_json_dict(stage("sat2"))
    cvp = CvpInstance.from_json_dict(stage("cvp"))
    if not isinstance(cvp, CvpBoundedInstance):
        raise ParseError(f"{files['cvp']}: missing tau field")
    sivp = SivpInstance.from_json_dict(stage("sivp"))
    alpha = AlphaChoice.from_json_dict(manifest["alpha"])
    p = PNorm.from_json(manifest["p"])
    return ChainResult(p, sat3, sat2, cvp, alpha, sivp), manifest


def _scalar_or_none(value) -> Fraction | None:
    try:
        return scalar_from_str(str(value))
    except ParseError:
        return None


def _manifest_checks(report: ChainReport, manifest: dict,
                     chain: ChainResult) -> None:
    pairs = [
        ("r_pow", chain.cvp.r_pow),
        ("gamma_pow", chain.cvp.gamma_pow),
        ("tau", chain.cvp.tau),
        ("r_prime_pow", chain.sivp.r_pow),
        ("gamma_prime_pow", chain.sivp.gamma_prime_pow),
        ("delta3", chain.sat3.delta),
        ("epsilon3", chain.sat3.epsilon),
        ("delta2", chain.sat2.delta),
        ("epsilon2", chain.sat2.epsilon),
    ]
    bad = [key for key, val in pairs
           if _scalar_or_none(manifest.get(key)) != val]
    report.add("manifest-consistent", not bad,
               "manifest parameters match the stage files" if not bad
               else f"manifest fields differ from stage files: {bad}")
    ranks_ok = (manifest.get("rank_cvp") == chain.cvp.basis.n
                and manifest.get("rank_sivp") == chain.sivp.basis.n)
    report.add("manifest-ranks", ranks_ok,
               f"recorded ranks {manifest.get('rank_cvp')}/"
               f"{manifest.get('rank_sivp')}, actual "
               f"{chain.cvp.basis.n}/{chain.sivp.basis.n}")


def _print_report(report: ChainReport) -> None:
    for check in report.checks:
        mark = "ok  " if check.ok else "FAIL"
        print(f"{mark} {check.name}: {check.detail}")
    print(f"verification {'passed' if report.ok else 'FAILED'} "
          f"({len(report.checks)} checks)")


def cmd_verify(args) -> int:
    chain, manifest = load_chain(args.chain)
    report = ChainReport([])
    _manifest_checks(report, manifest, chain)
    report.checks.extend(verify_chain(chain, _budget(args)).checks)
    _print_report(report)
    return 0 if report.ok else 2


def cmd_chain(args) -> int:
    result = full_chain(_load_sat_instance(args), _parse_p(args.p),
                        args.denominator, scalar_from_str(args.slack))
    out_dir = Path(args.out_dir)
    _write_chain_files(result, out_dir)
    report = verify_chain(result, _budget(args))
    _write_json(out_dir / "report.json", report.to_json_dict())
    print(f"wrote 4 stage files, {MANIFEST_NAME}, report.json to {out_dir}")
    _print_report(report)
    return 0 if report.ok else 2


def cmd_solve(args) -> int:
    budget = _budget(args)
    obj = _read_json(args.infile)
    if args.problem == "cvp":
        inst = CvpInstance.from_json_dict(obj)
        sol = solve_cvp(inst.basis, inst.target, inst.p, budget)
        out = sol.to_json_dict()
        out["r_pow"] = scalar_to_str(inst.r_pow)
        out["within_r_pow"] = sol.dist_pow <= inst.r_pow
    elif args.problem == "sivp":
        inst = SivpInstance.from_json_dict(obj)
        out = decide_sivp(inst, budget).to_json_dict()
    else:  # minima: accepts either instance form
        if "target" in obj:
            inst = CvpInstance.from_json_dict(obj)
        else:
            inst = SivpInstance.from_json_dict(obj)
        minima = successive_minima(inst.basis, inst.p, budget)
        out = minima.to_json_dict()
    _emit(args, json.dumps(out, indent=2) + "\n")
    return 0


def _add_budget_flags(sub) -> None:
    sub.add_argument("--budget-nodes", type=int, default=None,
                     help=f"enumeration node limit (or ${BUDGET_ENV})")
    sub.add_argument("--max-rank", type=int, default=None,
                     help="enumeration rank limit (default 10)")


def _add_gap_flags(sub) -> None:
    sub.add_argument("--delta", help="NO-side bound as a fraction, e.g. 2/3")
    sub.add_argument("--epsilon", help="YES-side bound as a fraction")
    sub.add_argument("--promise",
                     choices=[promise_tags.YES, promise_tags.NO,
                              promise_tags.UNKNOWN])


def build_parser() -> _Parser:
    parser = _Parser(prog="latred", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="deterministic random width-3 CNF")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--vars", type=int, required=True)
    gen.add_argument("--clauses", type=int, required=True)
    gen.add_argument("--out", help="output file (default stdout)")
    gen.set_defaults(func=cmd_gen)

    red = subs.add_parser("reduce", help="run one reduction step or the chain")
    red.add_argument("step",
                     choices=["sat3to2", "sat2cvp", "cvp2sivp", "chain"])
    red.add_argument("--in", dest="infile", required=True)
    red.add_argument("--out", help="output file (default stdout)")
    red.add_argument("--out-dir", help="stage directory (chain step only)")
    red.add_argument("--p", default="2", help="norm: 1..10 or inf")
    red.add_argument("--denominator", type=int, default=DEFAULT_DENOMINATOR)
    red.add_argument("--slack", default=str(DEFAULT_SLACK),
                     help="alpha overshoot tolerance as a fraction")
    _add_gap_flags(red)
    red.set_defaults(func=cmd_reduce)

    sol = subs.add_parser("solve", help="exact solvers on instance files")
    sol.add_argument("problem", choices=["cvp", "sivp", "minima"])
    sol.add_argument("--in", dest="infile", required=True)
    sol.add_argument("--out", help="output file (default stdout)")
    _add_budget_flags(sol)
    sol.set_defaults(func=cmd_solve)

    ver = subs.add_parser("verify", help="recompute and check a written chain")
    ver.add_argument("--chain", required=True, metavar="MANIFEST")
    _add_budget_flags(ver)
    ver.set_defaults(func=cmd_verify)

    cha = subs.add_parser("chain",
                          help="reduce chain + verify, writing all artifacts")
    cha.add_argument("--in", dest="infile", required=True)
    cha.add_argument("--out-dir", required=True)
    cha.add_argument("--p", default="2", help="norm: 1..10 or inf")
    cha.add_argument("--denominator", type=int, default=DEFAULT_DENOMINATOR)
    cha.add_argument("--slack", default=str(DEFAULT_SLACK))
    _add_gap_flags(cha)
    _add_budget_flags(cha)
    cha.set_defaults(func=cmd_chain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "reduce" and args.step == "chain" \
            and not args.out_dir:
        parser.error("reduce chain requires --out-dir")
    try:
        return args.func(args)
    except (BudgetExceeded, RankTooLarge, TooLarge) as exc:
        print(f"latred: budget: {exc}", file=sys.stderr)
        return 3
    except PromiseViolation as exc:
        print(f"latred: promise violation: {exc}", file=sys.stderr)
        return 2
    except (ParseError, TautologyError, WidthError, RankDeficient,
            json.JSONDecodeError, OSError) as exc:
        print(f"latred: input: {exc}", file=sys.stderr)
        return 66
    except ValueError as exc:
        print(f"latred: usage: {exc}", file=sys.stderr)
        return 64


if __name__ == "__main__":
    sys.exit(main())
