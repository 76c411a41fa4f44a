"""Lattice bases and gap lattice problem instances (CVP, bounded CVP, SIVP).

A basis is a d x n exact matrix whose n columns generate the lattice; full
column rank is validated at construction with a kernel-vector certificate on
failure. Entries are integral by default; the rational-entry mode exists for
the appended alpha column produced by the CVP-to-SIVP step.

All radii and approximation factors are carried as p-th powers of lengths
(r_pow, gamma_pow, gamma_prime_pow); tau is a plain rational. For p = inf the
"power" is the norm itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import promise as promise_tags
from .errors import ParseError, RankDeficient
from .exactmath import (
    ExactMatrix,
    ExactVector,
    PNorm,
    as_scalar,
    kernel_vector,
    scalar_to_str,
)


def validate_basis(matrix: ExactMatrix, *, allow_rational: bool = False) -> ExactMatrix:
    """Check full column rank (and integrality unless allow_rational).

    Raises RankDeficient carrying a nonzero kernel vector k with B @ k = 0
    when the columns are dependent.
    """
    d, n = matrix.shape
    if n == 0 or d == 0:
        raise ValueError("empty basis")
    if not allow_rational and not matrix.is_integral():
        raise ValueError(
            "non-integral basis entries; pass allow_rational=True if intended")
    k = kernel_vector(matrix)
    if k is not None:
        raise RankDeficient(
            f"columns are dependent: B @ {k!r} = 0", kernel_vector=k)
    return matrix


@dataclass(frozen=True)
class LatticeBasis:
    """A validated full-column-rank basis."""

    matrix: ExactMatrix
    allow_rational: bool = False

    def __post_init__(self):
        validate_basis(self.matrix, allow_rational=self.allow_rational)

    @property
    def d(self) -> int:
        return self.matrix.num_rows

    @property
    def n(self) -> int:
        return self.matrix.num_cols

    def column(self, j: int) -> ExactVector:
        return self.matrix.col(j)

    def generate(self, coeffs) -> ExactVector:
        """The lattice vector B @ coeffs."""
        return self.matrix.matvec(coeffs)

    def is_integral(self) -> bool:
        return self.matrix.is_integral()


def _basis_json_fields(basis: LatticeBasis) -> dict:
    m = basis.matrix
    return {
        "d": m.num_rows,
        "n": m.num_cols,
        "basis": [[scalar_to_str(m.rows[i][j]) for i in range(m.num_rows)]
                  for j in range(m.num_cols)],
    }


def _basis_from_json_fields(obj: dict, *, allow_rational: bool) -> LatticeBasis:
    try:
        d, n, cols = obj["d"], obj["n"], obj["basis"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed basis object: missing {exc}") from exc
    if not (isinstance(d, int) and isinstance(n, int)):
        raise ParseError("basis dimensions must be integers")
    if len(cols) != n or any(len(c) != d for c in cols):
        raise ParseError(
            f"basis shape mismatch: declared {d}x{n}, "
            f"got {len(cols)} columns of lengths {[len(c) for c in cols]}")
    matrix = ExactMatrix.from_cols([[as_scalar(x) for x in col] for col in cols])
    return LatticeBasis(matrix, allow_rational=allow_rational)


def _vector_to_json(v: ExactVector) -> list[str]:
    return [scalar_to_str(x) for x in v]


@dataclass(frozen=True)
class CvpInstance:
    """Gap closest-vector instance: is dist(t, L)^p <= r_pow, or > gamma_pow*r_pow?

    YES means some lattice vector v has ||v - t||^p <= r_pow; NO means every v
    has ||v - t||^p > gamma_pow * r_pow.
    """

    basis: LatticeBasis
    target: ExactVector
    r_pow: Fraction
    p: PNorm
    gamma_pow: Fraction
    promise: str = promise_tags.UNKNOWN

    def __post_init__(self):
        object.__setattr__(self, "r_pow", as_scalar(self.r_pow))
        object.__setattr__(self, "gamma_pow", as_scalar(self.gamma_pow))
        promise_tags.check_promise(self.promise)
        if not self.basis.is_integral():
            raise ValueError("CVP instances require an integral basis")
        if not self.target.is_integral():
            raise ValueError("CVP instances require an integral target")
        if self.target.dim != self.basis.d:
            raise ValueError(
                f"target dimension {self.target.dim} != basis rows {self.basis.d}")
        if self.r_pow < 0:
            raise ValueError(f"r_pow must be >= 0, got {self.r_pow}")
        if self.gamma_pow < 1:
            raise ValueError(f"gamma_pow must be >= 1, got {self.gamma_pow}")

    def to_json_dict(self) -> dict:
        out = _basis_json_fields(self.basis)
        out.update({
            "target": _vector_to_json(self.target),
            "r_pow": scalar_to_str(self.r_pow),
            "p": self.p.to_json(),
            "gamma_pow": scalar_to_str(self.gamma_pow),
            "promise": self.promise,
        })
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CvpInstance":
        basis = _basis_from_json_fields(obj, allow_rational=False)
        try:
            target = ExactVector(as_scalar(x) for x in obj["target"])
            r_pow = as_scalar(obj["r_pow"])
            p = PNorm.from_json(obj["p"])
            gamma_pow = as_scalar(obj["gamma_pow"])
            tag = obj["promise"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed CVP object: {exc}") from exc
        if "tau" in obj:
            return CvpBoundedInstance(basis, target, r_pow, p, gamma_pow, tag,
                                      tau=as_scalar(obj["tau"]))
        return cls(basis, target, r_pow, p, gamma_pow, tag)


@dataclass(frozen=True)
class CvpBoundedInstance(CvpInstance):
    """CVP instance additionally promising lambda_n(L)^p <= tau * r_pow.

    The bound is what keeps the appended-column SIVP construction sound; it is
    validated exactly by the solver at desk scale (verify module), not here.
    """

    tau: Fraction = Fraction(1)

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "tau", as_scalar(self.tau))
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    def to_json_dict(self) -> dict:
        out = super().to_json_dict()
        out["tau"] = scalar_to_str(self.tau)
        return out


@dataclass(frozen=True)
class SivpInstance:
    """Gap shortest-independent-vectors instance on a rank-n lattice.

    YES means some n linearly independent lattice vectors all have norm power
    <= r_pow; NO means every such set contains a vector with norm power
    > gamma_prime_pow * r_pow.
    """

    basis: LatticeBasis
    r_pow: Fraction
    p: PNorm
    gamma_prime_pow: Fraction
    promise: str = promise_tags.UNKNOWN

    def __post_init__(self):
        object.__setattr__(self, "r_pow", as_scalar(self.r_pow))
        object.__setattr__(self, "gamma_prime_pow", as_scalar(self.gamma_prime_pow))
        promise_tags.check_promise(self.promise)
        if self.r_pow < 0:
            raise ValueError(f"r_pow must be >= 0, got {self.r_pow}")
        if self.gamma_prime_pow < 1:
            raise ValueError(
                f"gamma_prime_pow must be >= 1, got {self.gamma_prime_pow}")

    def to_json_dict(self) -> dict:
        out = _basis_json_fields(self.basis)
        out.update({
            "r_pow": scalar_to_str(self.r_pow),
            "p": self.p.to_json(),
            "gamma_prime_pow": scalar_to_str(self.gamma_prime_pow),
            "promise": self.promise,
        })
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SivpInstance":
        basis = _basis_from_json_fields(obj, allow_rational=True)
        try:
            r_pow = as_scalar(obj["r_pow"])
            p = PNorm.from_json(obj["p"])
            gamma_prime_pow = as_scalar(obj["gamma_prime_pow"])
            tag = obj["promise"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed SIVP object: {exc}") from exc
        return cls(basis, r_pow, p, gamma_prime_pow, tag)


@dataclass(frozen=True)
class SuccessiveMinima:
    """lambda_1^p .. lambda_n^p with witnesses.

    witnesses[i] realizes values_pow[i]; coeffs[i] is its coefficient vector
    in the instance basis. The witnesses are linearly independent and sorted
    by nondecreasing norm power.
    """

    values_pow: tuple[Fraction, ...]
    witnesses: tuple[ExactVector, ...]
    coeffs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not (len(self.values_pow) == len(self.witnesses) == len(self.coeffs)):
            raise ValueError("values, witnesses, coeffs must align")

    def to_json_dict(self) -> dict:
        return {
            "values_pow": [scalar_to_str(v) for v in self.values_pow],
            "witnesses": [_vector_to_json(w) for w in self.witnesses],
            "coeffs": [list(c) for c in self.coeffs],
        }
