"""Alternating row/column scaling of positive matrices.

One step divides every column by its column sum (a column step) or every
row by its row sum (a row step); steps alternate, starting with either
side. Against arbitrary positive margin targets r and c with equal
totals, the dividers become col_j / c_j and row_i / r_i.

Two regimes:

* approximate (float entries): the loop stops once every row and column
  margin is within a tolerance of its target, or the step budget runs
  out. Convergence is linear for positive matrices, so the default
  budget of 10,000 steps is generous at desk scale.
* exact (Fraction entries): the loop stops only when the iterate hits
  its margins *exactly* -- the finite-termination event. Entry growth is
  unbounded by design; every trace record carries the largest
  numerator/denominator bit size so the blow-up is observable. The
  default exact budget is 64 steps.

Every run records a per-step trace of margin errors; matrix snapshots
are captured only on request since exact iterates can grow large.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional

from .matrices import (
    DiagonalScaling,
    DimensionError,
    MarginTarget,
    PositiveMatrix,
    RegimeError,
    Scalar,
    DEFAULT_TOLERANCE,
    apply_left,
    apply_right,
)

DEFAULT_MAX_STEPS_APPROX = 10_000
DEFAULT_MAX_STEPS_EXACT = 64

#: entry-size guard for the n >= 3 exact search: a non-terminating 3x3
#: iterate roughly doubles its bit size every step, so a 64-step budget
#: alone would never return. Candidates exceeding the cap are treated as
#: non-terminating within budget.
DEFAULT_SEARCH_BITS_CAP = 4096


class StartSide(enum.Enum):
    COLUMN_FIRST = "column"
    ROW_FIRST = "row"


class Status(enum.Enum):
    #: exact regime: the iterate hit its margins exactly at step L
    TERMINATED_FINITE = "terminated-finite"
    #: approximate regime: all margins within tolerance
    CONVERGED = "converged-within-tolerance"
    #: step budget (or entry-size cap) exhausted first
    MAX_STEPS_REACHED = "max-steps-reached"


@dataclass(frozen=True)
class IterationConfig:
    """Knobs for one scaling run.

    max_steps and tolerance default per regime when left as None:
    10,000 steps / 1e-12 in the approximate regime, 64 steps / exactly 0
    in the exact one. A nonzero tolerance in the exact regime is an
    error: exact termination means exact margins.
    """

    start_side: StartSide = StartSide.COLUMN_FIRST
    max_steps: int | None = None
    tolerance: float | None = None
    margin_target: MarginTarget | None = None


@dataclass(frozen=True)
class TraceRecord:
    step: int
    side: str  # "-" for the input row, else "row" or "col"
    max_row_err: Scalar
    max_col_err: Scalar
    max_entry_bits: int | None  # exact regime only
    matrix: PositiveMatrix | None  # captured on request


@dataclass(frozen=True)
class SinkhornResult:
    limit: PositiveMatrix
    left_accum: DiagonalScaling
    right_accum: DiagonalScaling
    steps_taken: int
    status: Status
    trace: tuple[TraceRecord, ...]


def _side_of_step(start_side: StartSide, step: int) -> str:
    if start_side is StartSide.COLUMN_FIRST:
        return "col" if step % 2 == 1 else "row"
    return "row" if step % 2 == 1 else "col"


def _max_entry_bits(entries) -> int:
    return max(
        max(x.numerator.bit_length(), x.denominator.bit_length())
        for row in entries
        for x in row
    )


def _resolve_targets(A: PositiveMatrix, target: MarginTarget | None):
    if target is None:
        if A.rows != A.cols:
            raise DimensionError(
                f"unit-margin scaling needs a square matrix, got {A.rows}x{A.cols};"
                " pass a MarginTarget for rectangular input"
            )
        target = MarginTarget.unit(A.rows, A.cols, A.exact)
    else:
        if target.exact != A.exact:
            raise RegimeError("matrix and margin target are in different regimes")
        if len(target.row_targets) != A.rows or len(target.col_targets) != A.cols:
            raise DimensionError(
                f"target of shape {len(target.row_targets)}/{len(target.col_targets)}"
                f" does not fit a {A.rows}x{A.cols} matrix"
            )
    return target


def _iterate(
    A: PositiveMatrix,
    target: MarginTarget,
    cfg: IterationConfig,
    capture_matrices: bool,
    entry_bits_cap: int | None,
) -> SinkhornResult:
    exact = A.exact
    tolerance = cfg.tolerance
    if tolerance is None:
        tolerance = 0 if exact else DEFAULT_TOLERANCE
    if tolerance < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tolerance}")
    if exact and tolerance != 0:
        raise ValueError("exact regime requires tolerance 0")
    max_steps = cfg.max_steps
    if max_steps is None:
        max_steps = DEFAULT_MAX_STEPS_EXACT if exact else DEFAULT_MAX_STEPS_APPROX
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")

    m, n = A.rows, A.cols
    r_t, c_t = target.row_targets, target.col_targets
    cur = [list(row) for row in A.entries]
    one = Fraction(1) if exact else 1.0
    left = [one] * m
    right = [one] * n

    records: list[TraceRecord] = []
    status = Status.MAX_STEPS_REACHED
    steps_taken = 0

    for step in itertools.count():
        rsums = [sum(row) for row in cur]
        csums = [sum(col) for col in zip(*cur)]
        row_err = max(abs(s - t) for s, t in zip(rsums, r_t))
        col_err = max(abs(s - t) for s, t in zip(csums, c_t))
        bits = _max_entry_bits(cur) if exact else None
        records.append(
            TraceRecord(
                step=step,
                side="-" if step == 0 else _side_of_step(cfg.start_side, step),
                max_row_err=row_err,
                max_col_err=col_err,
                max_entry_bits=bits,
                matrix=PositiveMatrix(cur) if capture_matrices else None,
            )
        )
        stochastic = (
            row_err == 0 and col_err == 0
            if exact
            else row_err <= tolerance and col_err <= tolerance
        )
        if stochastic:
            status = Status.TERMINATED_FINITE if exact else Status.CONVERGED
            steps_taken = step
            break
        if step == max_steps or (
            entry_bits_cap is not None and bits is not None and bits > entry_bits_cap
        ):
            status = Status.MAX_STEPS_REACHED
            steps_taken = step
            break
        if _side_of_step(cfg.start_side, step + 1) == "col":
            factors = [c_t[j] / csums[j] for j in range(n)]
            for row in cur:
                for j in range(n):
                    row[j] *= factors[j]
            right = [r * f for r, f in zip(right, factors)]
        else:
            factors = [r_t[i] / rsums[i] for i in range(m)]
            for i in range(m):
                fi = factors[i]
                cur[i] = [x * fi for x in cur[i]]
            left = [l * f for l, f in zip(left, factors)]

    return SinkhornResult(
        limit=PositiveMatrix(cur),
        left_accum=DiagonalScaling(left),
        right_accum=DiagonalScaling(right),
        steps_taken=steps_taken,
        status=status,
        trace=tuple(records),
    )


def sinkhorn(
    A: PositiveMatrix,
    cfg: IterationConfig | None = None,
    *,
    capture_matrices: bool = False,
    entry_bits_cap: int | None = None,
) -> SinkhornResult:
    """Run the alternating scaling iteration on A.

    Stops at the first step whose iterate meets every margin (exactly in
    the exact regime, within cfg.tolerance otherwise), else after
    cfg.max_steps scalings. Margins default to all ones; set
    cfg.margin_target for (r, c) scaling. The accumulated left/right
    diagonals satisfy left @ A @ right == limit (exactly for Fraction
    entries, to rounding for floats).

    entry_bits_cap, when set, aborts an exact run whose entries exceed
    that bit size, reporting MAX_STEPS_REACHED; see the search command.
    """
    cfg = cfg or IterationConfig()
    target = _resolve_targets(A, cfg.margin_target)
    return _iterate(A, target, cfg, capture_matrices, entry_bits_cap)


def rc_sinkhorn(
    A: PositiveMatrix,
    target: MarginTarget,
    cfg: IterationConfig | None = None,
    *,
    capture_matrices: bool = False,
    entry_bits_cap: int | None = None,
) -> SinkhornResult:
    """Alternating scaling toward row sums r and column sums c.

    With all-ones targets and a square matrix this is step-for-step
    identical to :func:`sinkhorn`.
    """
    cfg = cfg or IterationConfig()
    if cfg.margin_target is not None and cfg.margin_target != target:
        raise ValueError("config carries a different margin_target than the one passed")
    target = _resolve_targets(A, target)
    return _iterate(A, target, cfg, capture_matrices, entry_bits_cap)


def scaling_invariance_check(
    A: PositiveMatrix,
    P: DiagonalScaling,
    Q: DiagonalScaling,
    cfg: IterationConfig | None = None,
) -> float:
    """Max-norm gap between the limits of A and of P @ A @ Q.

    The two limits agree in theory for any positive diagonals P and Q;
    two independent runs measure how closely the engine reproduces that.
    Expected <= 2 * tolerance for converged approximate runs.
    """
    first = sinkhorn(A, cfg)
    second = sinkhorn(apply_right(apply_left(P, A), Q), cfg)
    return float(
        max(
            abs(x - y)
            for xr, yr in zip(first.limit.entries, second.limit.entries)
            for x, y in zip(xr, yr)
        )
    )


# --- 2x2 fast path -----------------------------------------------------------

def _require_exact_2x2(A: PositiveMatrix):
    if (A.rows, A.cols) != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got {A.rows}x{A.cols}")
    if not A.exact:
        raise RegimeError("exact rational entries required")
    return A.entries[0] + A.entries[1]


@lru_cache(maxsize=1 << 18)
def _steps_until_doubly_stochastic(pn: int, pd: int, qn: int, qd: int, budget: int):
    """Additional half-steps until the scaled 2x2 iterate is doubly stochastic.

    After any scaling step a positive 2x2 matrix is margin-normalized on
    one side, so it is exactly [[p, q], [1-p, 1-q]] up to transposition,
    with p, q in (0, 1) held here in lowest terms. One half-step maps
    (p, q) -> (p*qd'/(...), ...) identically for both orientations, and
    the iterate is doubly stochastic iff p + q = 1. Returns the number
    of further steps needed (0 if already doubly stochastic), or None if
    more than `budget` would be required.
    """
    if pn * qd + qn * pd == pd * qd:
        return 0
    for taken in range(1, budget + 1):
        a = pn * qd
        b = (pd - pn) * qd
        npd = a + qn * pd
        nqd = b + (qd - qn) * pd
        g = gcd(a, npd)
        pn, pd = a // g, npd // g
        g = gcd(b, nqd)
        qn, qd = b // g, nqd // g
        if pn * qd + qn * pd == pd * qd:
            return taken
    return None


def termination_length_2x2(
    A: PositiveMatrix,
    start_side: StartSide = StartSide.COLUMN_FIRST,
    max_steps: int = DEFAULT_MAX_STEPS_EXACT,
) -> Optional[int]:
    """Steps after which the exact 2x2 iteration is doubly stochastic.

    Returns None when that does not happen within max_steps. Integer
    fast path equivalent to sinkhorn() in the exact regime (the tests
    pin the two against each other); it exists because exhaustive sweeps
    call this hundreds of thousands of times.
    """
    a, b, c, d = _require_exact_2x2(A)
    if a + b == 1 and c + d == 1 and a + c == 1:
        return 0
    if max_steps < 1:
        return None
    if start_side is StartSide.COLUMN_FIRST:
        p, q = a / (a + c), b / (b + d)
    else:
        p, q = a / (a + b), c / (c + d)
    rest = _steps_until_doubly_stochastic(
        p.numerator, p.denominator, q.numerator, q.denominator, max_steps - 1
    )
    return None if rest is None else 1 + rest


# --- exhaustive search for finite termination --------------------------------

@dataclass(frozen=True)
class SearchHit:
    matrix: PositiveMatrix
    length: int
    limit: PositiveMatrix


def finite_termination_search(
    n: int,
    bound: int,
    *,
    start_side: StartSide = StartSide.COLUMN_FIRST,
    max_steps: int = DEFAULT_MAX_STEPS_EXACT,
    normalize_rows: bool = False,
    entry_bits_cap: int | None = DEFAULT_SEARCH_BITS_CAP,
    candidate_cap: int = 10_000_000,
) -> list[SearchHit]:
    """Catalog the n x n integer matrices (entries 1..bound) whose exact
    scaling iteration terminates within max_steps.

    With normalize_rows each candidate's rows are first divided by their
    sums, making it row stochastic. Candidates whose entries outgrow
    entry_bits_cap are dropped as non-terminating within budget (exact
    iterates of non-terminating matrices with n >= 3 double their bit
    size every step). Raises ValueError when the enumeration would
    exceed candidate_cap matrices.
    """
    if n < 2:
        raise ValueError(f"search needs n >= 2, got {n}")
    if bound < 1:
        raise ValueError(f"search needs bound >= 1, got {bound}")
    total = bound ** (n * n)
    if total > candidate_cap:
        raise ValueError(
            f"enumeration of {total} candidates exceeds the cap of {candidate_cap}"
        )
    cfg = IterationConfig(start_side=start_side, max_steps=max_steps)
    hits: list[SearchHit] = []
    for combo in itertools.product(range(1, bound + 1), repeat=n * n):
        rows = [
            [Fraction(v) for v in combo[i * n:(i + 1) * n]] for i in range(n)
        ]
        if normalize_rows:
            rows = [[x / s for x in row] for row, s in ((r, sum(r)) for r in rows)]
        A = PositiveMatrix(rows)
        if n == 2:
            length = termination_length_2x2(A, start_side, max_steps)
            if length is None:
                continue
            result = sinkhorn(A, cfg)
            assert result.status is Status.TERMINATED_FINITE
            assert result.steps_taken == length
            hits.append(SearchHit(A, length, result.limit))
        else:
            result = sinkhorn(A, cfg, entry_bits_cap=entry_bits_cap)
            if result.status is Status.TERMINATED_FINITE:
                hits.append(SearchHit(A, result.steps_taken, result.limit))
    return hits


# --- trace serialization ------------------------------------------------------

def trace_csv(trace, exact: bool) -> str:
    """Render trace records as CSV, one row per step, step 0 first.

    Columns: step, side, max_row_err, max_col_err, and (exact regime
    only) max_entry_bits. Approximate errors print in scientific
    notation with 17 significant digits; exact errors print as reduced
    rationals.
    """
    header = "step,side,max_row_err,max_col_err"
    if exact:
        header += ",max_entry_bits"
    lines = [header]
    for rec in trace:
        if exact:
            lines.append(
                f"{rec.step},{rec.side},{rec.max_row_err},{rec.max_col_err},{rec.max_entry_bits}"
            )
        else:
            lines.append(
                f"{rec.step},{rec.side},{rec.max_row_err:.16e},{rec.max_col_err:.16e}"
            )
    return "\n".join(lines) + "\n"
