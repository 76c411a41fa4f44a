"""Brute-force exact lp lattice solvers: enumeration, CVP, successive minima.

The engine triangularizes the (denominator-cleared) basis by unimodular
column operations: column i of the Hermite-style form H first becomes nonzero
at its pivot row, and pivot rows increase with i. Assigning coefficients in
column order therefore finalizes ambient coordinates block by block, so the
walk prunes on exact integer partial sums of |w_k|^p (running max for p=inf).
Nothing is ever rounded: a subtree is cut only when no completion can beat
the bound, and every surviving leaf arrives with its exact norm power.

All quantities run in a scaled integer world (one common denominator for the
basis and the center); results are divided back out at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import BudgetExceeded, RankDeficient, RankTooLarge
from .exactmath import (
    ExactVector,
    PNorm,
    as_scalar,
    gram_determinant,
    iroot_up,
    scalar_to_str,
)
from .lattice import LatticeBasis, SivpInstance, SuccessiveMinima
from . import promise as promise_tags

DEFAULT_MAX_RANK = 10
DEFAULT_MAX_NODES = 100_000_000

YES = promise_tags.YES
NO = promise_tags.NO
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class EnumBudget:
    """Hard limits for enumeration: lattice rank and visited tree nodes."""

    max_rank: int = DEFAULT_MAX_RANK
    max_nodes: int = DEFAULT_MAX_NODES


@dataclass(frozen=True)
class EnumPoint:
    """One enumerated lattice point: coefficients, the point, its norm power."""

    coeffs: tuple[int, ...]
    vector: ExactVector
    norm_pow: Fraction


@dataclass(frozen=True)
class CvpSolution:
    dist_pow: Fraction
    witness: ExactVector
    coeffs: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "dist_pow": scalar_to_str(self.dist_pow),
            "witness": [scalar_to_str(x) for x in self.witness],
            "coeffs": list(self.coeffs),
        }


@dataclass(frozen=True)
class SivpDecision:
    """decide_sivp result: the answer plus the minima used to reach it."""

    answer: str
    minima: SuccessiveMinima

    def to_json_dict(self) -> dict:
        return {"answer": self.answer, "minima": self.minima.to_json_dict()}


class _NodeCounter:
    __slots__ = ("nodes", "limit")

    def __init__(self, limit: int):
        self.nodes = 0
        self.limit = limit

    def spend(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise BudgetExceeded(
                f"enumeration exceeded {self.limit} nodes", nodes=self.nodes)


def _iroot_down(value: int, p: int) -> int:
    """Largest k >= 0 with k^p <= value (-1 when value < 0: empty)."""
    if value < 0:
        return -1
    k = iroot_up(value, p)
    return k if k ** p == value else k - 1


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _scaled_columns(basis: LatticeBasis, extra: ExactVector | None):
    """Clear denominators: integer basis columns, scaled extra vector, scale s."""
    m = basis.matrix
    dens = [x.denominator for row in m.rows for x in row]
    if extra is not None:
        dens.extend(x.denominator for x in extra)
    s = lcm(*dens)
    cols = [[int(m.rows[i][j] * s) for i in range(m.num_rows)]
            for j in range(m.num_cols)]
    vec = None if extra is None else [int(x * s) for x in extra]
    return cols, vec, s


def _row_order(cols: list[list[int]]) -> list[int]:
    """Outlier rows first, the rest in natural order.

    Coordinate order never changes an lp norm, but rows with unusually
    large entries make big early pivots that cage their coefficients near
    the root of the search tree. Rows of ordinary magnitude stay in input
    order: block-structured bases prune best when their blocks stay
    contiguous.
    """
    d = len(cols[0])
    mags = [max(abs(c[r]) for c in cols) for r in range(d)]
    med = sorted(mags)[d // 2]
    big = sorted((r for r in range(d) if mags[r] > 4 * med),
                 key=lambda r: -mags[r])
    if not big:
        return list(range(d))
    rest = [r for r in range(d) if mags[r] <= 4 * med]
    return big + rest


def _pow_scale(q: Fraction, s: int, p: PNorm) -> Fraction:
    return q * s ** p.p if p.is_finite else q * s


def _pow_unscale(q, s: int, p: PNorm) -> Fraction:
    return Fraction(q, s ** p.p) if p.is_finite else Fraction(q, s)


def _triangularize(cols: list[list[int]]):
    """Unimodular column reduction to increasing-pivot triangular form.

    Returns (hcols, vcols, pivot_rows): hcols[i] is zero above pivot_rows[i]
    and positive there, pivot_rows strictly increase, and the original
    coefficient vector of hcols[i] is vcols[i], so B @ vcols[i] = hcols[i].
    Raises RankDeficient if fewer pivots than columns exist.
    """
    n = len(cols)
    d = len(cols[0])
    work = [list(c) for c in cols]
    vcols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    pivots: list[int] = []
    pcol = 0
    for row in range(d):
        if pcol == n:
            break
        for j in range(pcol + 1, n):
            if work[j][row] == 0:
                continue
            a, b = work[pcol][row], work[j][row]
            g, x, y = _ext_gcd(a, b)
            am, bm = a // g, b // g
            wp, wj = work[pcol], work[j]
            work[pcol] = [x * u + y * v for u, v in zip(wp, wj)]
            work[j] = [-bm * u + am * v for u, v in zip(wp, wj)]
            vp, vj = vcols[pcol], vcols[j]
            vcols[pcol] = [x * u + y * v for u, v in zip(vp, vj)]
            vcols[j] = [-bm * u + am * v for u, v in zip(vp, vj)]
        if work[pcol][row] == 0:
            continue
        if work[pcol][row] < 0:
            work[pcol] = [-u for u in work[pcol]]
            vcols[pcol] = [-u for u in vcols[pcol]]
        pivots.append(row)
        pcol += 1
    if pcol < n:
        raise RankDeficient(
            f"columns span only rank {pcol} of {n}")
    return work, vcols, pivots


class _Walker:
    """Depth-first walk over coefficient space with exact lp pruning.

    Levels follow the triangular columns; entering level i fixes z_i and
    finalizes ambient rows [pivot_i, pivot_{i+1}), whose exact costs join the
    running total (sum of |w_k|^p, or max |w_k| for p=inf). bound may shrink
    while running; it never grows. on_leaf receives (z, cost, w) with w the
    full scaled difference vector.
    """

    __slots__ = ("hcols", "nz", "pivots", "pivot_vals", "next_pivot", "t",
                 "pp", "bound", "counter", "acc", "z", "on_leaf", "d", "n")

    def __init__(self, hcols, pivots, t, p: PNorm, bound: int,
                 counter: _NodeCounter, on_leaf):
        self.d = len(t)
        self.n = len(hcols)
        self.hcols = hcols
        self.pivots = pivots
        self.pivot_vals = [hcols[i][pivots[i]] for i in range(self.n)]
        self.next_pivot = [pivots[i + 1] if i + 1 < self.n else self.d
                           for i in range(self.n)]
        self.nz = [[(k, col[k]) for k in range(pivots[i], self.d) if col[k]]
                   for i, col in enumerate(hcols)]
        self.t = t
        self.pp = p.p if p.is_finite else None
        self.bound = bound
        self.counter = counter
        self.acc = [-x for x in t]
        self.z = [0] * self.n
        self.on_leaf = on_leaf

    def _cost(self, lo: int, hi: int, base: int) -> int:
        pp = self.pp
        if pp == 1:
            return base + sum(abs(v) for v in self.acc[lo:hi])
        if pp is None:
            block = self.acc[lo:hi]
            return max(base, max(abs(v) for v in block)) if block else base
        return base + sum(abs(v) ** pp for v in self.acc[lo:hi])

    def run(self) -> None:
        if self.bound < 0:
            return
        base = self._cost(0, self.pivots[0], 0)
        if base <= self.bound:
            self._descend(0, base)

    def _descend(self, i: int, cost: int) -> None:
        if i == self.n:
            self.on_leaf(tuple(self.z), cost, self.acc)
            return
        e = self.pivot_vals[i]
        r = self.pivots[i]
        c = self.acc[r]
        # necessary condition on the pivot coordinate alone
        if self.pp is None:
            umax = self.bound
        else:
            umax = _iroot_down(self.bound - cost, self.pp)
            if umax < 0:
                return
        lo = -(-(-umax - c) // e)
        hi = (umax - c) // e
        if lo > hi:
            return
        nz = self.nz[i]
        acc = self.acc
        for k, val in nz:
            acc[k] += val * lo
        zi = lo
        while True:
            self.counter.spend()
            child = self._cost(r, self.next_pivot[i], cost)
            if child <= self.bound:
                self.z[i] = zi
                self._descend(i + 1, child)
            if zi == hi:
                break
            zi += 1
            for k, val in nz:
                acc[k] += val
        for k, val in nz:
            acc[k] -= val * hi

    def greedy_leaf(self) -> tuple[tuple[int, ...], int]:
        """Nearest-plane style start: per level, the locally cheapest step.

        Block cost is convex in z_i, so walking downhill from the pivot
        minimizer finds the level's best choice; the result seeds solve_cvp's
        shrinking bound."""
        acc = self.acc
        total = self._cost(0, self.pivots[0], 0)
        zs = []
        for i in range(self.n):
            e = self.pivot_vals[i]
            r = self.pivots[i]
            nz = self.nz[i]
            hi = self.next_pivot[i]

            def block(zi: int) -> int:
                for k, val in nz:
                    acc[k] += val * zi
                out = self._cost(r, hi, 0)
                for k, val in nz:
                    acc[k] -= val * zi
                return out

            zi = (-2 * acc[r] + e) // (2 * e)
            best = block(zi)
            for step in (1, -1):
                while True:
                    cand = block(zi + step)
                    if cand < best:
                        best, zi = cand, zi + step
                    else:
                        break
            for k, val in nz:
                acc[k] += val * zi
            zs.append(zi)
            if self.pp is None:
                total = max(total, best)
            else:
                total += best
        for i in reversed(range(self.n)):
            for k, val in self.nz[i]:
                acc[k] -= val * zs[i]
        return tuple(zs), total


def _matvec_int(cols: list[list[int]], z) -> list[int]:
    return [sum(col[k] * zi for col, zi in zip(cols, z))
            for k in range(len(cols[0]))]


def _check_rank(basis: LatticeBasis, budget: EnumBudget) -> None:
    if basis.n > budget.max_rank:
        raise RankTooLarge(
            f"rank {basis.n} exceeds budget max_rank {budget.max_rank}")


def _norm_pow_int(vec: list[int], p: PNorm) -> int:
    if p.is_finite:
        pp = p.p
        return sum(abs(x) ** pp for x in vec)
    return max(abs(x) for x in vec) if vec else 0


def _int_bound(q_scaled: Fraction) -> int:
    # integer costs never exceed a rational bound beyond its floor
    return q_scaled.numerator // q_scaled.denominator


def enumerate_within(basis: LatticeBasis, center: ExactVector,
                     radius_pow, p: PNorm,
                     budget: EnumBudget | None = None) -> list[EnumPoint]:
    """All lattice points v with ||v - center||_p^p <= radius_pow, exactly.

    Returns EnumPoints sorted by coefficient vector. Raises RankTooLarge or
    BudgetExceeded per the budget.
    """
    budget = budget or EnumBudget()
    _check_rank(basis, budget)
    if center.dim != basis.d:
        raise ValueError(
            f"center dimension {center.dim} != basis rows {basis.d}")
    radius_pow = as_scalar(radius_pow)
    if radius_pow < 0:
        return []
    cols, t, s = _scaled_columns(basis, center)
    order = _row_order(cols)
    pcols = [[c[r] for r in order] for c in cols]
    pt = [t[r] for r in order]
    hcols, vcols, pivots = _triangularize(pcols)
    counter = _NodeCounter(budget.max_nodes)
    d = basis.d
    found: list[tuple[tuple[int, ...], list[int], int]] = []

    def on_leaf(zh: tuple[int, ...], cost: int, w: list[int]) -> None:
        z = tuple(sum(vcols[j][a] * zh[j] for j in range(len(zh)))
                  for a in range(len(zh)))
        v = [0] * d
        for k, r in enumerate(order):
            v[r] = w[k] + pt[k]
        found.append((z, v, cost))

    _Walker(hcols, pivots, pt, p, _int_bound(_pow_scale(radius_pow, s, p)),
            counter, on_leaf).run()
    found.sort(key=lambda item: item[0])
    return [
        EnumPoint(z, ExactVector(Fraction(x, s) for x in v),
                  _pow_unscale(q, s, p))
        for z, v, q in found
    ]


def solve_cvp(basis: LatticeBasis, target: ExactVector, p: PNorm,
              budget: EnumBudget | None = None) -> CvpSolution:
    """Exact closest lattice vector in the lp norm.

    The search bound starts at a nearest-plane style greedy leaf and shrinks
    as better leaves appear; ties break to the lexicographically smallest
    coefficient vector.
    """
    budget = budget or EnumBudget()
    _check_rank(basis, budget)
    if target.dim != basis.d:
        raise ValueError(
            f"target dimension {target.dim} != basis rows {basis.d}")
    cols, t, s = _scaled_columns(basis, target)
    order = _row_order(cols)
    pcols = [[c[r] for r in order] for c in cols]
    pt = [t[r] for r in order]
    hcols, vcols, pivots = _triangularize(pcols)
    counter = _NodeCounter(budget.max_nodes)
    n = basis.n

    def to_orig(zh: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sum(vcols[j][a] * zh[j] for j in range(n))
                     for a in range(n))

    walker = _Walker(hcols, pivots, pt, p, 0, counter, None)
    seed_zh, seed_cost = walker.greedy_leaf()
    state = {"cost": seed_cost, "z": to_orig(seed_zh)}
    if seed_cost > 0:
        walker.bound = seed_cost

        def on_leaf(zh: tuple[int, ...], cost: int, _w: list[int]) -> None:
            if cost > state["cost"]:
                return
            z = to_orig(zh)
            if cost < state["cost"]:
                state["cost"] = cost
                state["z"] = z
                walker.bound = cost
            elif z < state["z"]:
                state["z"] = z

        walker.on_leaf = on_leaf
        walker.run()
    best_z = state["z"]
    witness = ExactVector(
        Fraction(x, s) for x in _matvec_int(cols, best_z))
    return CvpSolution(_pow_unscale(state["cost"], s, p), witness,
                       tuple(best_z))


def _independent_insert(echelon: dict[int, list[Fraction]], vec) -> bool:
    """Add vec to the echelon set if independent; report whether it was."""
    r = [Fraction(x) for x in vec]
    while True:
        lead = next((k for k, x in enumerate(r) if x != 0), None)
        if lead is None:
            return False
        row = echelon.get(lead)
        if row is None:
            echelon[lead] = r
            return True
        f = r[lead] / row[lead]
        r = [a - f * b for a, b in zip(r, row)]


def _int_independent_insert(echelon: dict[int, list[int]], vec: list[int]) -> bool:
    """Fraction-free variant of _independent_insert for streaming rank checks."""
    r = list(vec)
    while True:
        lead = next((k for k, x in enumerate(r) if x), None)
        if lead is None:
            return False
        row = echelon.get(lead)
        if row is None:
            echelon[lead] = r
            return True
        a, b = r[lead], row[lead]
        r = [x * b - y * a for x, y in zip(r, row)]


def successive_minima(basis: LatticeBasis, p: PNorm,
                      budget: EnumBudget | None = None) -> SuccessiveMinima:
    """lambda_1^p .. lambda_n^p with independent witnesses, by enumeration.

    The search radius starts at 1 (no nonzero point of the scaled integer
    lattice is shorter) and grows geometrically until the enumerated
    nonzero points span the full rank; the columns are themselves n
    independent vectors, so the radius is capped at the longest column's
    norm power, which always suffices. Starting small keeps badly reduced
    bases cheap: their column norms can exceed lambda_n by orders of
    magnitude, and a ball that large is unaffordable. The greedy pick over
    (norm power, coeff lex) order then realizes each minimum in turn.
    """
    budget = budget or EnumBudget()
    _check_rank(basis, budget)
    cols, _, s = _scaled_columns(basis, None)
    order = _row_order(cols)
    pcols = [[c[r] for r in order] for c in cols]
    hcols, vcols, pivots = _triangularize(pcols)
    counter = _NodeCounter(budget.max_nodes)
    n = basis.n
    d = basis.d
    t = [0] * d
    cap = max(_norm_pow_int(col, p) for col in cols)
    radius = 1

    def collect(bound: int):
        pts: list[tuple[int, tuple[int, ...]]] = []
        echelon: dict[int, list[int]] = {}
        rank_seen = 0

        def on_leaf(zh: tuple[int, ...], cost: int, w: list[int]) -> None:
            nonlocal rank_seen
            if not any(zh):
                return
            pts.append((cost, zh))
            if rank_seen < n and _int_independent_insert(echelon, w):
                rank_seen += 1

        _Walker(hcols, pivots, t, p, bound, counter, on_leaf).run()
        return pts, rank_seen

    while True:
        nodes_before = counter.nodes
        points, rank_seen = collect(radius)
        if rank_seen == n:
            break
        # double while rounds are cheap, then creep up on the spanning
        # radius so the last ball stays close to the lambda_n ball
        if counter.nodes - nodes_before < 50_000:
            step = radius * 2
        else:
            step = radius + (radius + 3) // 4
        radius = min(step, cap) if radius < cap else step

    def original(zh: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sum(vcols[j][a] * zh[j] for j in range(n))
                     for a in range(n))

    # sort by cost alone, then settle lex ties group by group so that
    # original-basis coefficients are only computed for points actually
    # inspected by the greedy pass
    points.sort(key=lambda item: item[0])
    echelon: dict[int, list[Fraction]] = {}
    values: list[Fraction] = []
    witnesses: list[ExactVector] = []
    coeff_rows: list[tuple[int, ...]] = []
    i = 0
    while len(values) < n:
        q = points[i][0]
        j = i
        while j < len(points) and points[j][0] == q:
            j += 1
        for z, zh in sorted((original(zh), zh) for _, zh in points[i:j]):
            w = _matvec_int(cols, z)
            if _independent_insert(echelon, w):
                values.append(_pow_unscale(q, s, p))
                witnesses.append(ExactVector(Fraction(x, s) for x in w))
                coeff_rows.append(z)
                if len(values) == n:
                    break
        i = j
    return SuccessiveMinima(tuple(values), tuple(witnesses), tuple(coeff_rows))


def decide_sivp(inst: SivpInstance,
                budget: EnumBudget | None = None) -> SivpDecision:
    """Classify a gap SIVP instance by computing lambda_n^p exactly.

    YES when lambda_n^p <= r_pow; NO when lambda_n^p > gamma_prime_pow*r_pow;
    INCONCLUSIVE in between (including exactly on the upper threshold, where
    the strict NO definition is not met). INCONCLUSIVE is a first-class
    answer, not an error.
    """
    minima = successive_minima(inst.basis, inst.p, budget)
    top = minima.values_pow[-1]
    if top <= inst.r_pow:
        answer = YES
    elif top > inst.gamma_prime_pow * inst.r_pow:
        answer = NO
    else:
        answer = INCONCLUSIVE
    return SivpDecision(answer, minima)


def check_minkowski(basis: LatticeBasis, p: PNorm,
                    budget: EnumBudget | None = None) -> bool:
    """Verify (prod_i lambda_i^p)^2 <= n^(2n) * det(B^T B)^p on a square basis.

    This is the squared p-th power form of the second-moment product bound,
    arranged so both sides are rational. Finite p only.
    """
    if not p.is_finite:
        raise ValueError("check_minkowski requires finite p")
    if basis.d != basis.n:
        raise ValueError("check_minkowski requires a full-rank square basis")
    minima = successive_minima(basis, p, budget)
    prod = Fraction(1)
    for v in minima.values_pow:
        prod *= v
    n = basis.n
    return prod * prod <= n ** (2 * n) * gram_determinant(basis.matrix) ** p.p
