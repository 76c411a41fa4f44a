"""Exact rational arithmetic: scalars, vectors, matrices, lp norm powers.

Every quantity is an arbitrary-precision rational (fractions.Fraction); no
floats anywhere. Lengths are always handled as p-th powers of norms so that
finite-p comparisons stay rational. All types are immutable and safe to share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Union

from .errors import ParseError

# Largest finite exponent accepted for lp norms. Beyond this the powers are
# numerically pointless at desk scale and blow up the integer sizes.
P_MAX = 10

# ExactScalar is the package-wide name for the exact rational scalar type.
ExactScalar = Fraction

ScalarLike = Union[int, str, Fraction]

_SCALAR_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def as_scalar(value: ScalarLike) -> Fraction:
    """Coerce an int, Fraction, or strict "num"/"num/den" string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):  # bool is an int subclass; reject it
        raise ParseError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return scalar_from_str(value)
    raise ParseError(f"not a scalar: {value!r}")


def scalar_from_str(text: str) -> Fraction:
    """Parse "num" or "num/den". Rejects floats, decimals, whitespace."""
    if not isinstance(text, str) or not _SCALAR_RE.match(text):
        raise ParseError(f"malformed scalar string: {text!r}")
    num, _, den = text.partition("/")
    if den == "":
        return Fraction(int(num))
    if int(den) == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den))


def scalar_to_str(value: Fraction) -> str:
    """Serialize as "num/den", or "num" when the denominator is 1."""
    return str(as_scalar(value))


@dataclass(frozen=True)
class PNorm:
    """An lp norm index: a finite integer p in [1, P_MAX], or infinity.

    Finite p is stored in .p; infinity is encoded as p=None. JSON form is the
    bare integer or the string "inf".
    """

    p: int | None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or isinstance(self.p, bool):
                raise ValueError(f"p must be an int or None, got {self.p!r}")
            if not 1 <= self.p <= P_MAX:
                raise ValueError(f"p must be in [1, {P_MAX}], got {self.p}")

    @classmethod
    def finite(cls, p: int) -> "PNorm":
        if p is None:
            raise ValueError("finite() requires an integer p")
        return cls(p)

    @classmethod
    def infinity(cls) -> "PNorm":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def to_json(self) -> int | str:
        return self.p if self.p is not None else "inf"

    @classmethod
    def from_json(cls, value) -> "PNorm":
        if value == "inf":
            return cls(None)
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(value)
        raise ParseError(f"malformed p value: {value!r}")

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


class ExactVector:
    """Immutable vector of exact rationals."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[ScalarLike]):
        self._entries = tuple(as_scalar(x) for x in entries)

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return self._entries

    @property
    def dim(self) -> int:
        return len(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactVector) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __add__(self, other: "ExactVector") -> "ExactVector":
        self._check_dim(other)
        return ExactVector(a + b for a, b in zip(self._entries, other._entries))

    def __sub__(self, other: "ExactVector") -> "ExactVector":
        self._check_dim(other)
        return ExactVector(a - b for a, b in zip(self._entries, other._entries))

    def __neg__(self) -> "ExactVector":
        return ExactVector(-a for a in self._entries)

    def scaled(self, c: ScalarLike) -> "ExactVector":
        c = as_scalar(c)
        return ExactVector(c * a for a in self._entries)

    def dot(self, other: "ExactVector") -> Fraction:
        self._check_dim(other)
        return sum((a * b for a, b in zip(self._entries, other._entries)),
                   Fraction(0))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self._entries)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self._entries)

    def _check_dim(self, other: "ExactVector") -> None:
        if len(self._entries) != len(other._entries):
            raise ValueError(
                f"dimension mismatch: {len(self._entries)} vs {len(other._entries)}")

    def __repr__(self) -> str:
        return f"ExactVector([{', '.join(str(a) for a in self._entries)}])"


class ExactMatrix:
    """Immutable d x n matrix of exact rationals, stored row-major.

    When used as a lattice basis the n columns are the basis vectors.
    """

    __slots__ = ("_rows", "_shape")

    def __init__(self, rows: Iterable[Iterable[ScalarLike]]):
        rs = tuple(tuple(as_scalar(x) for x in row) for row in rows)
        if rs:
            width = len(rs[0])
            if any(len(r) != width for r in rs):
                raise ValueError("ragged rows")
        else:
            width = 0
        self._rows = rs
        self._shape = (len(rs), width)

    @classmethod
    def from_rows(cls, rows) -> "ExactMatrix":
        return cls(rows)

    @classmethod
    def from_cols(cls, cols) -> "ExactMatrix":
        cols = [tuple(as_scalar(x) for x in c) for c in cols]
        if not cols:
            return cls([])
        if any(len(c) != len(cols[0]) for c in cols):
            raise ValueError("ragged columns")
        return cls(zip(*cols))

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def num_rows(self) -> int:
        return self._shape[0]

    @property
    def num_cols(self) -> int:
        return self._shape[1]

    def row(self, i: int) -> ExactVector:
        return ExactVector(self._rows[i])

    def col(self, j: int) -> ExactVector:
        return ExactVector(r[j] for r in self._rows)

    def columns(self) -> list[ExactVector]:
        return [self.col(j) for j in range(self._shape[1])]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self._rows)) if self._rows else ExactMatrix([])

    def matvec(self, coeffs: Sequence[ScalarLike]) -> ExactVector:
        """Matrix times column vector: with basis columns, B @ z."""
        zs = [as_scalar(c) for c in coeffs]
        if len(zs) != self._shape[1]:
            raise ValueError(
                f"coefficient length {len(zs)} != column count {self._shape[1]}")
        return ExactVector(
            sum((r[j] * zs[j] for j in range(len(zs))), Fraction(0))
            for r in self._rows)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self._rows for a in r)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        body = "; ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self._rows)
        return f"ExactMatrix({self._shape[0]}x{self._shape[1]}: {body})"


def norm_power(v: ExactVector | Sequence[ScalarLike], p: PNorm) -> Fraction:
    """The p-th power of the lp norm for finite p; the linf norm itself for p=inf.

    Keeping powers (never roots) is what makes every comparison in the
    workbench exact.
    """
    entries = [as_scalar(x) for x in v]
    if not entries:
        return Fraction(0)
    if p.is_finite:
        return sum((abs(x) ** p.p for x in entries), Fraction(0))
    return max(abs(x) for x in entries)


def iroot_up(value: int, p: int) -> int:
    """Smallest k >= 0 with k^p >= value, by exact integer binary search.

    The building block for rational upper bounds on p-th roots: for x = a/b,
    x^(1/p) <= iroot_up(a * b^(p-1), p) / b.
    """
    if value <= 0:
        return 0
    if p == 1:
        return value
    hi = 1 << ((value.bit_length() + p - 1) // p)
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** p >= value:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _cleared_int_rows(M: ExactMatrix) -> list[list[int]]:
    # Denominators cleared row by row; scaling a row never changes the rank.
    out = []
    for row in M.rows:
        scale = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * scale) for x in row])
    return out


def rank(M: ExactMatrix) -> int:
    """Exact rank via fraction-free (Bareiss) elimination on cleared integers."""
    rows = _cleared_int_rows(M)
    d, n = M.shape
    r = 0
    prev = 1
    for c in range(n):
        if r == d:
            break
        piv = next((i for i in range(r, d) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pivot_row = rows[r]
        pivot = pivot_row[c]
        for i in range(r + 1, d):
            ri = rows[i]
            fi = ri[c]
            # One-step Bareiss update; the division by the previous pivot is
            # exact (entries stay minors of the original matrix).
            rows[i] = [0] * (c + 1) + [
                (pivot * ri[j] - fi * pivot_row[j]) // prev
                for j in range(c + 1, n)
            ]
        prev = pivot
        r += 1
    return r


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    rows = [list(r) for r in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        pivot = rows[c][c]
        det *= pivot
        for i in range(c + 1, n):
            f = rows[i][c] / pivot
            if f:
                rows[i] = [rows[i][j] - f * rows[c][j] for j in range(n)]
    return det


def gram_determinant(B: ExactMatrix) -> Fraction:
    """det(B^T B), exact. Zero if and only if the columns are dependent.

    Equals the squared covolume of the lattice the columns generate, which is
    why it shows up squared-free on the right of the Minkowski product bound.
    """
    d, n = B.shape
    cols = [[B.rows[i][j] for i in range(d)] for j in range(n)]
    gram = [[sum((cols[a][i] * cols[b][i] for i in range(d)), Fraction(0))
             for b in range(n)] for a in range(n)]
    return _det(gram)


def kernel_vector(M: ExactMatrix) -> ExactVector | None:
    """A nonzero rational vector k with M @ k = 0, or None if columns are
    independent. Used as the certificate attached to RankDeficient."""
    d, n = M.shape
    rows = [list(r) for r in M.rows]
    pivots: list[int] = []  # pivot column per eliminated row
    r = 0
    for c in range(n):
        if r == d:
            break
        piv = next((i for i in range(r, d) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(d):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [rows[i][j] - f * rows[r][j] for j in range(n)]
        pivots.append(c)
        r += 1
    free = next((c for c in range(n) if c not in pivots), None)
    if free is None:
        return None
    k = [Fraction(0)] * n
    k[free] = Fraction(1)
    for i, c in enumerate(pivots):
        k[c] = -rows[i][free]
    return ExactVector(k)
