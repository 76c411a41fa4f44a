"""latred: an exact-arithmetic workbench for gap-preserving reductions.

The pipeline turns gap 3SAT into gap 2SAT (ten-clause gadget), gap 2SAT into
gap CVP with bounded minima (clause matrix), and that into gap SIVP (appended
target column). Brute-force exact lp solvers check every promise and bound at
desk scale: all arithmetic is rational, norms live as p-th powers, and every
verification is an equality or inequality between Fractions.
"""

from .errors import (
    BudgetExceeded,
    LatredError,
    ParseError,
    PromiseViolation,
    RankDeficient,
    RankTooLarge,
    TautologyError,
    TooLarge,
    WidthError,
)
from .exactmath import (
    ExactMatrix,
    ExactVector,
    PNorm,
    as_scalar,
    gram_determinant,
    iroot_up,
    kernel_vector,
    norm_power,
    rank,
    scalar_from_str,
    scalar_to_str,
)
from .gapsat import PadReport, pad_narrow_clauses, reduce_3sat_to_2sat
from .lattice import (
    CvpBoundedInstance,
    CvpInstance,
    LatticeBasis,
    SivpInstance,
    SuccessiveMinima,
    validate_basis,
)
from .promise import NO, UNKNOWN, YES
from .reductions import (
    AlphaChoice,
    ChainResult,
    compute_alpha,
    cvp_to_sivp,
    full_chain,
    sat_to_cvp,
)
from .satcore import (
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
from .solvers import (
    CvpSolution,
    EnumBudget,
    EnumPoint,
    SivpDecision,
    check_minkowski,
    decide_sivp,
    enumerate_within,
    solve_cvp,
    successive_minima,
)
from .verify import (
    BoundedMinimaReport,
    ChainReport,
    CheckRecord,
    assert_chain,
    check_no_witness_cases,
    validate_bounded_minima,
    verify_chain,
)

__version__ = "0.1.0"
