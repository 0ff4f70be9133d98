"""Positive matrices, diagonal scalings, margin targets, and the
stochasticity predicates built on them.

Two numeric regimes share one representation: exact (Fraction entries,
ints are promoted) and approximate (float entries). A matrix is pinned to
a single regime at construction and operations never mix regimes. All
values are immutable once built, so everything here is safe to share
across threads.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Union

from .numerics import format_rational, parse_rational

Scalar = Union[float, Fraction]

#: margin tolerance for approximate-regime stochasticity checks
DEFAULT_TOLERANCE = 1e-12

#: relative slack allowed between float target totals
_TARGET_TOTAL_RTOL = 1e-9


class NonPositiveEntryError(ValueError):
    """A matrix, scaling, or target entry was zero or negative."""


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class RegimeError(ValueError):
    """Exact (Fraction) and approximate (float) scalars were mixed."""


def _coerce(values, what: str) -> tuple[tuple[Scalar, ...], bool]:
    """Validate a flat sequence of scalars; return (entries, exact)."""
    out = list(values)
    has_float = any(isinstance(x, float) for x in out)
    has_exact = any(isinstance(x, Fraction) for x in out)
    if has_float and has_exact:
        raise RegimeError(f"{what} mixes float and Fraction entries")
    exact = not has_float
    conv = Fraction if exact else float
    coerced = []
    for k, x in enumerate(out):
        if isinstance(x, bool) or not isinstance(x, (int, float, Fraction)):
            raise TypeError(f"{what} entry {k + 1} is not a scalar: {x!r}")
        coerced.append(conv(x))
    return tuple(coerced), exact


class PositiveMatrix:
    """Dense m x n matrix with strictly positive entries.

    Entries are all Fraction (exact regime; ints are promoted) or all
    float (approximate regime). Zero or negative entries are rejected
    with :class:`NonPositiveEntryError` naming the offending position.
    """

    __slots__ = ("entries", "exact")

    def __init__(self, rows: Iterable[Iterable[Scalar]]):
        entries = tuple(tuple(row) for row in rows)
        if not entries or not entries[0]:
            raise DimensionError("matrix needs at least one row and one column")
        n = len(entries[0])
        if any(len(row) != n for row in entries):
            raise DimensionError("matrix rows have unequal lengths")
        flat, exact = _coerce(
            (x for row in entries for x in row), "matrix"
        )
        for k, v in enumerate(flat):
            if v <= 0:
                i, j = divmod(k, n)
                raise NonPositiveEntryError(
                    f"entry ({i + 1},{j + 1}) is not positive: {entries[i][j]}"
                )
        self.entries = tuple(flat[i * n:(i + 1) * n] for i in range(len(entries)))
        self.exact = exact

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PositiveMatrix):
            return NotImplemented
        return self.exact == other.exact and self.entries == other.entries

    def __hash__(self):
        return hash((self.exact, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(
            ", ".join(_render(x, self.exact) for x in row) for row in self.entries
        )
        return f"PositiveMatrix[{body}]"

    # --- JSON wire format: {"rows": [[...]]}, numbers = approximate,
    # --- "p/q" strings = exact; mixing the two is an input error.

    def to_json_obj(self) -> dict:
        if self.exact:
            rows = [[format_rational(x) for x in row] for row in self.entries]
        else:
            rows = [list(row) for row in self.entries]
        return {"rows": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "PositiveMatrix":
        if not isinstance(obj, dict) or "rows" not in obj:
            raise ValueError('matrix JSON must be an object with a "rows" field')
        rows = obj["rows"]
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise ValueError('"rows" must be an array of arrays')
        parsed = []
        for row in rows:
            out = []
            for x in row:
                if isinstance(x, str):
                    out.append(parse_rational(x))
                elif isinstance(x, bool):
                    raise ValueError(f"matrix entry is not a number: {x!r}")
                elif isinstance(x, (int, float)):
                    out.append(float(x))
                else:
                    raise ValueError(f"matrix entry is not a number: {x!r}")
            parsed.append(out)
        return cls(parsed)

    @classmethod
    def from_json(cls, text: str) -> "PositiveMatrix":
        return cls.from_json_obj(json.loads(text))


class DiagonalScaling:
    """Positive diagonal matrix stored as its diagonal vector."""

    __slots__ = ("diag", "exact")

    def __init__(self, diag: Iterable[Scalar]):
        flat, exact = _coerce(diag, "diagonal")
        if not flat:
            raise DimensionError("diagonal needs at least one coordinate")
        for k, v in enumerate(flat):
            if v <= 0:
                raise NonPositiveEntryError(
                    f"diagonal coordinate {k + 1} is not positive: {v}"
                )
        self.diag = flat
        self.exact = exact

    def __len__(self) -> int:
        return len(self.diag)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagonalScaling):
            return NotImplemented
        return self.exact == other.exact and self.diag == other.diag

    def __hash__(self):
        return hash((self.exact, self.diag))

    def __repr__(self) -> str:
        return f"diag({', '.join(_render(x, self.exact) for x in self.diag)})"


class MarginTarget:
    """Positive target row sums r and column sums c with equal totals."""

    __slots__ = ("row_targets", "col_targets", "exact")

    def __init__(self, row_targets: Iterable[Scalar], col_targets: Iterable[Scalar]):
        rt, r_exact = _coerce(row_targets, "row targets")
        ct, c_exact = _coerce(col_targets, "column targets")
        if r_exact != c_exact:
            raise RegimeError("row and column targets are in different regimes")
        for name, vec in (("row", rt), ("column", ct)):
            for k, v in enumerate(vec):
                if v <= 0:
                    raise NonPositiveEntryError(
                        f"{name} target {k + 1} is not positive: {v}"
                    )
        r_total, c_total = sum(rt), sum(ct)
        if r_exact:
            if r_total != c_total:
                raise ValueError(
                    f"target totals differ: sum(r) = {r_total}, sum(c) = {c_total}"
                )
        elif abs(r_total - c_total) > _TARGET_TOTAL_RTOL * max(1.0, abs(r_total)):
            raise ValueError(
                f"target totals differ: sum(r) = {r_total}, sum(c) = {c_total}"
            )
        self.row_targets = rt
        self.col_targets = ct
        self.exact = r_exact

    @classmethod
    def unit(cls, m: int, n: int, exact: bool) -> "MarginTarget":
        one = Fraction(1) if exact else 1.0
        return cls((one,) * m, (one,) * n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarginTarget):
            return NotImplemented
        return (
            self.exact == other.exact
            and self.row_targets == other.row_targets
            and self.col_targets == other.col_targets
        )

    def __repr__(self) -> str:
        return f"MarginTarget(r={list(self.row_targets)}, c={list(self.col_targets)})"


def _render(x: Scalar, exact: bool) -> str:
    return format_rational(x) if exact else repr(x)


def _check_same_regime(a_exact: bool, b_exact: bool) -> None:
    if a_exact != b_exact:
        raise RegimeError("cannot mix exact and approximate operands")


# --- margins and scalings -------------------------------------------------

def row_sums(A: PositiveMatrix) -> tuple[Scalar, ...]:
    """Vector of row sums of A."""
    return tuple(sum(row) for row in A.entries)


def col_sums(A: PositiveMatrix) -> tuple[Scalar, ...]:
    """Vector of column sums of A."""
    return tuple(sum(col) for col in zip(*A.entries))


def transpose(A: PositiveMatrix) -> PositiveMatrix:
    return PositiveMatrix(zip(*A.entries))


def _targets_for(A: PositiveMatrix, target: MarginTarget | None, axis: str):
    if target is None:
        one = Fraction(1) if A.exact else 1.0
        k = A.rows if axis == "row" else A.cols
        return (one,) * k
    _check_same_regime(A.exact, target.exact)
    vec = target.row_targets if axis == "row" else target.col_targets
    need = A.rows if axis == "row" else A.cols
    if len(vec) != need:
        raise DimensionError(
            f"{axis} target length {len(vec)} does not match matrix ({A.rows}x{A.cols})"
        )
    return vec


def row_scaling(A: PositiveMatrix, target: MarginTarget | None = None) -> DiagonalScaling:
    """Diagonal that left-multiplies A so every row sums to its target.

    Coordinate i is target_i / row_i(A); targets default to 1.
    """
    t = _targets_for(A, target, "row")
    return DiagonalScaling(ti / s for ti, s in zip(t, row_sums(A)))


def col_scaling(A: PositiveMatrix, target: MarginTarget | None = None) -> DiagonalScaling:
    """Diagonal that right-multiplies A so every column sums to its target."""
    t = _targets_for(A, target, "col")
    return DiagonalScaling(tj / s for tj, s in zip(t, col_sums(A)))


def apply_left(D: DiagonalScaling, A: PositiveMatrix) -> PositiveMatrix:
    """D @ A: multiply row i of A by D_i."""
    _check_same_regime(D.exact, A.exact)
    if len(D) != A.rows:
        raise DimensionError(f"diagonal of size {len(D)} cannot scale {A.rows} rows")
    return PositiveMatrix(
        tuple(d * x for x in row) for d, row in zip(D.diag, A.entries)
    )


def apply_right(A: PositiveMatrix, D: DiagonalScaling) -> PositiveMatrix:
    """A @ D: multiply column j of A by D_j."""
    _check_same_regime(A.exact, D.exact)
    if len(D) != A.cols:
        raise DimensionError(f"diagonal of size {len(D)} cannot scale {A.cols} columns")
    return PositiveMatrix(
        tuple(x * d for x, d in zip(row, D.diag)) for row in A.entries
    )


# --- stochasticity predicates ----------------------------------------------

def _resolve_tol(A: PositiveMatrix, tol: float | None) -> Scalar:
    if tol is None:
        return 0 if A.exact else DEFAULT_TOLERANCE
    if tol < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    if A.exact and tol != 0:
        raise ValueError("exact regime requires tolerance 0")
    return tol


def _margins_within(sums, targets, tol) -> bool:
    return all(abs(s - t) <= tol for s, t in zip(sums, targets))


def is_row_stochastic(
    A: PositiveMatrix, target: MarginTarget | None = None, tol: float | None = None
) -> bool:
    """True iff every row sum matches its target within tol.

    tol defaults to 0 in the exact regime and DEFAULT_TOLERANCE in the
    approximate one.
    """
    return _margins_within(row_sums(A), _targets_for(A, target, "row"), _resolve_tol(A, tol))


def is_col_stochastic(
    A: PositiveMatrix, target: MarginTarget | None = None, tol: float | None = None
) -> bool:
    """True iff every column sum matches its target within tol."""
    return _margins_within(col_sums(A), _targets_for(A, target, "col"), _resolve_tol(A, tol))


def is_doubly_stochastic(
    A: PositiveMatrix, target: MarginTarget | None = None, tol: float | None = None
) -> bool:
    """True iff A is both row and column stochastic (against target).

    With unit targets this requires a square matrix: an m x n matrix with
    m != n cannot have all margins equal to 1.
    """
    if target is None and A.rows != A.cols:
        raise DimensionError(
            f"doubly stochastic check with unit targets needs a square matrix, got {A.rows}x{A.cols}"
        )
    return is_row_stochastic(A, target, tol) and is_col_stochastic(A, target, tol)
