"""Gap-preserving reductions: 2SAT to CVP, CVP to SIVP, and the full chain.

The clause matrix step encodes a width-<=2 CNF as a closest-vector instance:
row i of B holds +2 for a positive literal of clause i, -2 for a negated one,
and the target entry is t_i = 3 - 2*eta_i (eta_i = number of negated
literals). For any 0/1 assignment the i-th residual is then 2*s_i - 3 with
s_i the satisfied-literal count, so each clause contributes |2*s_i - 3|^p,
which is 1 when satisfied and 3^p when not:

    ||Bx - t||_p^p = m * (f + (1 - f) * 3^p),   f = satisfied fraction.

Clamping any integer coefficient vector to 0/1 never increases a residual, so
the closest lattice vector realizes exactly the MAX-SAT optimum. Bounds:

    r_pow     = m * (eps + (1 - eps) * 3^p)
    gamma_pow = (delta + (1 - delta) * 3^p) / (eps + (1 - eps) * 3^p)
    tau       = 2^p / (eps + (1 - eps) * 3^p)   (lambda_n^p <= 2^p m = tau r_pow)

The SIVP step appends the target as one extra column with a new coordinate
alpha chosen so that (a) n+1 short independent vectors exist in the YES case
(r'_pow = r_pow + alpha^p) and (b) every candidate in the NO case is long:
coefficient 0 on the new column falls back on lambda_n <= tau r, coefficient
+-1 pays the CVP distance, and coefficient >= 2 pays |2 alpha|^p. Both needs
are covered by

    alpha^p >= max(r_pow * (tau - 1), gamma_pow * r_pow / (2^p - 1))

and alpha itself is kept rational by rounding the p-th root up to a grid
k / denominator, refining the denominator until the overshoot stays within
the requested slack so the gap is not diluted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import RankDeficient, WidthError
from .exactmath import (
    ExactMatrix,
    ExactVector,
    PNorm,
    as_scalar,
    iroot_up,
    kernel_vector,
    scalar_to_str,
)
from .gapsat import PadReport, pad_narrow_clauses, reduce_3sat_to_2sat
from .lattice import CvpBoundedInstance, LatticeBasis, SivpInstance
from .satcore import GapSatInstance

DEFAULT_DENOMINATOR = 10 ** 6
DEFAULT_SLACK = Fraction(1, 10 ** 6)


def sat_to_cvp(inst: GapSatInstance, p: PNorm) -> CvpBoundedInstance:
    """Encode a gap 2SAT instance as a bounded-minima gap CVP instance.

    Requires finite p, clause width <= 2, and a clause matrix of full column
    rank (RankDeficient with the offending variable columns otherwise; the
    ten-clause gadget output always has full rank thanks to its unit clauses).
    """
    if not p.is_finite:
        raise ValueError("the clause-matrix encoding requires finite p")
    f = inst.formula
    m, n = f.num_clauses, f.num_vars
    if m == 0:
        raise ValueError("formula has no clauses")
    for idx, cl in enumerate(f.clauses):
        if cl.width > 2:
            raise WidthError(f"clause {idx} has width {cl.width}, need <= 2")

    rows = []
    t_entries = []
    for cl in f.clauses:
        row = [Fraction(0)] * n
        eta = 0
        for lit in cl.literals:
            if lit.negated:
                row[lit.var - 1] = Fraction(-2)
                eta += 1
            else:
                row[lit.var - 1] = Fraction(2)
        rows.append(row)
        t_entries.append(Fraction(3 - 2 * eta))
    matrix = ExactMatrix.from_rows(rows)
    k = kernel_vector(matrix)
    if k is not None:
        cols = tuple(j + 1 for j, x in enumerate(k) if x != 0)
        raise RankDeficient(
            f"clause matrix lacks full column rank; dependent variable "
            f"columns {cols}", kernel_vector=k, columns=cols)

    pp = p.p
    three = Fraction(3) ** pp
    sat_yes = inst.epsilon + (1 - inst.epsilon) * three
    sat_no = inst.delta + (1 - inst.delta) * three
    r_pow = m * sat_yes
    gamma_pow = sat_no / sat_yes
    tau = Fraction(2) ** pp / sat_yes
    return CvpBoundedInstance(
        LatticeBasis(matrix), ExactVector(t_entries),
        r_pow, p, gamma_pow, inst.promise, tau=tau)


@dataclass(frozen=True)
class AlphaChoice:
    """The appended-column scale: required p-th power, rational choice, power.

    denominator is the grid actually used (the requested one, times a power of
    ten when refinement was needed to meet the slack bound).
    """

    alpha_pow_required: Fraction
    alpha_rat: Fraction
    alpha_rat_pow: Fraction
    denominator: int

    def to_json_dict(self) -> dict:
        return {
            "alpha_pow_required": scalar_to_str(self.alpha_pow_required),
            "alpha_rat": scalar_to_str(self.alpha_rat),
            "alpha_rat_pow": scalar_to_str(self.alpha_rat_pow),
            "denominator": self.denominator,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "AlphaChoice":
        return cls(as_scalar(obj["alpha_pow_required"]),
                   as_scalar(obj["alpha_rat"]),
                   as_scalar(obj["alpha_rat_pow"]),
                   int(obj["denominator"]))


def compute_alpha(p: PNorm, r_pow, tau, gamma_pow,
                  denominator: int = DEFAULT_DENOMINATOR,
                  slack: Fraction = DEFAULT_SLACK) -> AlphaChoice:
    """Pick alpha = k/denominator, the smallest grid point with alpha^p >=
    max(r_pow*(tau-1), gamma_pow*r_pow/(2^p-1)).

    If the chosen grid is too coarse (alpha^p overshoots the requirement by
    more than the slack factor), the denominator is refined by powers of ten;
    the returned AlphaChoice records the grid actually used.
    """
    if not p.is_finite:
        raise ValueError("compute_alpha requires finite p")
    r_pow = as_scalar(r_pow)
    tau = as_scalar(tau)
    gamma_pow = as_scalar(gamma_pow)
    if r_pow < 0 or tau <= 0 or gamma_pow < 1:
        raise ValueError("need r_pow >= 0, tau > 0, gamma_pow >= 1")
    pp = p.p
    required = max(r_pow * (tau - 1), gamma_pow * r_pow / (2 ** pp - 1))
    if slack < 0:
        raise ValueError(f"slack must be >= 0, got {slack}")
    if required == 0:
        # degenerate input; any positive alpha works, take one grid step
        alpha = Fraction(1, denominator)
        return AlphaChoice(required, alpha, alpha ** pp, denominator)
    den = denominator
    cap = denominator * 10 ** 32
    while den <= cap:
        # smallest k with (k/den)^p >= required, i.e. k^p >= ceil(den^p a / b)
        a, b = required.numerator, required.denominator
        k = iroot_up(-(-(den ** pp) * a // b), pp)
        k = max(k, 1)
        alpha = Fraction(k, den)
        alpha_pow = alpha ** pp
        if alpha_pow <= required * (1 + slack):
            return AlphaChoice(required, alpha, alpha_pow, den)
        den *= 10
    raise ValueError(
        f"no power-of-ten grid refinement of 1/{denominator} meets "
        f"slack {slack}; a zero slack needs alpha^{pp} = {required} to sit "
        f"exactly on such a grid")


def cvp_to_sivp(inst: CvpBoundedInstance,
                denominator: int = DEFAULT_DENOMINATOR,
                slack: Fraction = DEFAULT_SLACK,
                alpha: AlphaChoice | None = None) -> SivpInstance:
    """Append the target as a column with new coordinate alpha.

    B' = [[B, t], [0, alpha]] has rank n+1; the YES promise gives n+1
    independent vectors of norm power <= r_pow + alpha^p, while the NO
    promise forces some vector of any independent set past
    gamma_pow*r_pow + alpha^p. Dividing yields the output gap."""
    if alpha is None:
        alpha = compute_alpha(inst.p, inst.r_pow, inst.tau, inst.gamma_pow,
                              denominator, slack)
    b = inst.basis.matrix
    d, n = b.shape
    rows = [list(b.rows[i]) + [inst.target[i]] for i in range(d)]
    rows.append([Fraction(0)] * n + [alpha.alpha_rat])
    r_prime_pow = inst.r_pow + alpha.alpha_rat_pow
    gamma_prime_pow = ((inst.gamma_pow * inst.r_pow + alpha.alpha_rat_pow)
                       / r_prime_pow)
    return SivpInstance(
        LatticeBasis(ExactMatrix.from_rows(rows), allow_rational=True),
        r_prime_pow, inst.p, gamma_prime_pow, inst.promise)


@dataclass(frozen=True)
class ChainResult:
    """Every stage of the 3SAT -> 2SAT -> CVP -> SIVP pipeline, plus alpha.

    sat3 is the exact input handed to the gadget step (already padded when the
    original formula had narrow clauses; pad.changed records that, and the
    caveat in the pad report applies to the gap parameters). Chains
    reconstructed from written files carry pad=None."""

    p: PNorm
    sat3: GapSatInstance
    sat2: GapSatInstance
    cvp: CvpBoundedInstance
    alpha: AlphaChoice
    sivp: SivpInstance
    pad: PadReport | None = None

    def manifest_dict(self, files: dict[str, str]) -> dict:
        """Summary + stage-file names, as written to chain_manifest.json.

        files maps stage keys (sat3, sat2, cvp, sivp) to relative paths."""
        return {
            "format": "latred-chain/1",
            "p": self.p.to_json(),
            "promise": self.sat3.promise,
            "delta3": scalar_to_str(self.sat3.delta),
            "epsilon3": scalar_to_str(self.sat3.epsilon),
            "delta2": scalar_to_str(self.sat2.delta),
            "epsilon2": scalar_to_str(self.sat2.epsilon),
            "r_pow": scalar_to_str(self.cvp.r_pow),
            "gamma_pow": scalar_to_str(self.cvp.gamma_pow),
            "tau": scalar_to_str(self.cvp.tau),
            "alpha": self.alpha.to_json_dict(),
            "r_prime_pow": scalar_to_str(self.sivp.r_pow),
            "gamma_prime_pow": scalar_to_str(self.sivp.gamma_prime_pow),
            "rank_cvp": self.cvp.basis.n,
            "rank_sivp": self.sivp.basis.n,
            "padded": bool(self.pad and self.pad.changed),
            "pad_caveat": (self.pad.caveat
                           if self.pad and self.pad.changed else None),
            "files": dict(files),
        }


def full_chain(inst: GapSatInstance, p: PNorm,
               denominator: int = DEFAULT_DENOMINATOR,
               slack: Fraction = DEFAULT_SLACK) -> ChainResult:
    """Run 3SAT -> 2SAT -> CVP -> SIVP, padding narrow clauses first.

    Padding introduces fresh always-on escape variables, which preserves
    satisfiability but not the max-sat fraction; the result carries the pad
    report so downstream checks know the gap parameters predate padding.
    """
    padded, report = pad_narrow_clauses(inst.formula)
    sat3 = inst if not report.changed else GapSatInstance(
        padded, inst.delta, inst.epsilon, inst.promise)
    sat2 = reduce_3sat_to_2sat(sat3)
    cvp = sat_to_cvp(sat2, p)
    alpha = compute_alpha(p, cvp.r_pow, cvp.tau, cvp.gamma_pow,
                          denominator, slack)
    sivp = cvp_to_sivp(cvp, alpha=alpha)
    return ChainResult(p, sat3, sat2, cvp, alpha, sivp, report)
