"""Exact arithmetic kernel: rationals, vectors, symmetric trilinear forms,
and small dense linear algebra over the rationals.

Everything here is immutable and pure.  No floating point enters any
verification path; distances may be ``INF`` (unreachable), which is the one
place a float sneaks in, and it is never mixed into rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

Rational = Fraction

INF = float("inf")


class DimensionMismatch(ValueError):
    """Vector or form dimensions disagree."""


def rational(value: object) -> Fraction:
    """Coerce an int, a string like ``"3/4"`` or ``"-2"``, or a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(q: Fraction | int) -> str:
    """Render as ``p/q``, or just ``p`` for integers (the wire format)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def binomial(n: int, k: int) -> int:
    """C(n, k), with C(n, k) = 0 whenever k > n."""
    if n < 0 or k < 0:
        raise ValueError("binomial expects natural numbers")
    return math.comb(n, k)


@dataclass(frozen=True)
class RVector:
    """A dense rational vector of fixed dimension."""

    entries: tuple[Fraction, ...]

    @staticmethod
    def of(values: Iterable[object]) -> "RVector":
        return RVector(tuple(rational(v) for v in values))

    @staticmethod
    def zero(dim: int) -> "RVector":
        return RVector((Fraction(0),) * dim)

    @staticmethod
    def unit(dim: int, index: int) -> "RVector":
        entries = [Fraction(0)] * dim
        entries[index] = Fraction(1)
        return RVector(tuple(entries))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def _check(self, other: "RVector") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")

    def dot(self, other: "RVector") -> Fraction:
        self._check(other)
        return sum((a * b for a, b in zip(self.entries, other.entries)), Fraction(0))

    def __add__(self, other: "RVector") -> "RVector":
        self._check(other)
        return RVector(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RVector") -> "RVector":
        self._check(other)
        return RVector(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RVector":
        return RVector(tuple(-a for a in self.entries))

    def scale(self, c: object) -> "RVector":
        c = rational(c)
        return RVector(tuple(c * a for a in self.entries))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "RVector(" + ", ".join(format_rational(a) for a in self.entries) + ")"


@dataclass(frozen=True)
class TrilinearForm:
    """A symmetric trilinear form stored sparsely on sorted index triples.

    ``coeffs`` maps sorted triples (i, j, k) to nonzero rational values; the
    symmetric extension to all index orders is implied.
    """

    dim: int
    coeffs: tuple[tuple[tuple[int, int, int], Fraction], ...]

    @staticmethod
    def of(dim: int, entries: Iterable[tuple[Sequence[int], object]]) -> "TrilinearForm":
        merged: dict[tuple[int, int, int], Fraction] = {}
        for idx, value in entries:
            i, j, k = sorted(idx)
            if not (0 <= i and k < dim):
                raise DimensionMismatch(f"index {idx!r} out of range for dim {dim}")
            v = rational(value)
            merged[(i, j, k)] = merged.get((i, j, k), Fraction(0)) + v
        items = tuple(sorted((key, v) for key, v in merged.items() if v != 0))
        return TrilinearForm(dim, items)

    def evaluate(self, a: RVector, b: RVector, c: RVector) -> Fraction:
        for v in (a, b, c):
            if v.dim != self.dim:
                raise DimensionMismatch(f"vector dim {v.dim} vs form dim {self.dim}")
        total = Fraction(0)
        for key, value in self.coeffs:
            for p, q, r in set(permutations(key)):
                total += value * a[p] * b[q] * c[r]
        return total

    def contract(self, a: RVector, b: RVector) -> RVector:
        """The linear functional T(a, b, -) as a coordinate vector."""
        for v in (a, b):
            if v.dim != self.dim:
                raise DimensionMismatch(f"vector dim {v.dim} vs form dim {self.dim}")
        out = [Fraction(0)] * self.dim
        for key, value in self.coeffs:
            for p, q, r in set(permutations(key)):
                out[r] += value * a[p] * b[q]
        return RVector(tuple(out))


def trilinear_eval(form: TrilinearForm, a: RVector, b: RVector, c: RVector) -> Fraction:
    return form.evaluate(a, b, c)


# ---------------------------------------------------------------------------
# Dense exact linear algebra.  Matrices are lists of row tuples of Fractions.
# ---------------------------------------------------------------------------


def _as_rows(rows: Sequence[Sequence[object]]) -> list[list[Fraction]]:
    return [[rational(x) for x in row] for row in rows]


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(rows: Sequence[Sequence[object]]) -> int:
    _, pivots = _rref(_as_rows(rows))
    return len(pivots)


def span_rank(vectors: Sequence[RVector]) -> int:
    return rank([v.entries for v in vectors])


def kernel_of_columns(vectors: Sequence[RVector]) -> list[tuple[Fraction, ...]]:
    """Basis of {a : sum_i a_i * vectors[i] = 0}.

    The vectors are the columns of the eliminated matrix, so the kernel lives
    in coefficient space (one coordinate per input vector).
    """
    if not vectors:
        return []
    dim = vectors[0].dim
    for v in vectors:
        if v.dim != dim:
            raise DimensionMismatch("mixed vector dimensions")
    k = len(vectors)
    rows = [[vectors[j][i] for j in range(k)] for i in range(dim)]
    reduced, pivots = _rref(rows)
    pivot_set = set(pivots)
    basis: list[tuple[Fraction, ...]] = []
    for free in range(k):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * k
        vec[free] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -reduced[row_idx][free]
        basis.append(tuple(vec))
    return basis


def solve_linear(
    rows: Sequence[Sequence[object]], rhs: Sequence[object]
) -> tuple[Fraction, ...] | None:
    """One exact solution of ``rows @ x = rhs``, or None if inconsistent.

    Free variables are set to zero, which keeps the output deterministic.
    """
    a = _as_rows(rows)
    b = [rational(x) for x in rhs]
    if len(a) != len(b):
        raise DimensionMismatch("rhs length does not match row count")
    if not a:
        return ()
    ncols = len(a[0])
    augmented = [row + [val] for row, val in zip(a, b)]
    reduced, pivots = _rref(augmented)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row_idx, pc in enumerate(pivots):
        x[pc] = reduced[row_idx][ncols]
    return tuple(x)


# ---------------------------------------------------------------------------
# Exact linear inequality feasibility (variable elimination with witness).
# ---------------------------------------------------------------------------

Constraint = tuple[Sequence[object], object]


def solve_inequalities(
    constraints: Iterable[Constraint], nvars: int
) -> tuple[Fraction, ...] | None:
    """Find x with coeffs . x >= rhs for every (coeffs, rhs) constraint.

    Eliminates one variable at a time, then back-substitutes a witness.
    Returns one exact solution or None when the system is infeasible.  All
    inequalities are non-strict; strict requirements must be encoded by the
    caller (e.g. positivity as ``x_i >= 1`` on a scale-invariant system).
    """
    cons: list[tuple[tuple[Fraction, ...], Fraction]] = []
    for coeffs, rhs in constraints:
        row = tuple(rational(c) for c in coeffs)
        if len(row) != nvars:
            raise DimensionMismatch("constraint arity does not match nvars")
        cons.append((row, rational(rhs)))
    return _eliminate(cons, nvars)


def _eliminate(
    cons: list[tuple[tuple[Fraction, ...], Fraction]], nvars: int
) -> tuple[Fraction, ...] | None:
    if nvars == 0:
        return () if all(rhs <= 0 for _, rhs in cons) else None
    k = nvars - 1
    # Bounds on x_k as affine functions of the remaining variables:
    # x_k >= coeffs . x' + const (lower), x_k <= ... (upper).
    lowers: list[tuple[tuple[Fraction, ...], Fraction]] = []
    uppers: list[tuple[tuple[Fraction, ...], Fraction]] = []
    rest: list[tuple[tuple[Fraction, ...], Fraction]] = []
    for coeffs, rhs in cons:
        a = coeffs[k]
        head = coeffs[:k]
        if a == 0:
            rest.append((head, rhs))
        else:
            bound = (tuple(-h / a for h in head), rhs / a)
            (lowers if a > 0 else uppers).append(bound)
    projected = list(rest)
    for lc, lconst in lowers:
        for uc, uconst in uppers:
            # upper(x') >= lower(x')
            projected.append(
                (tuple(u - l for u, l in zip(uc, lc)), lconst - uconst)
            )
    sub = _eliminate(projected, k)
    if sub is None:
        return None
    low = max((_affine(b, sub) for b in lowers), default=None)
    high = min((_affine(b, sub) for b in uppers), default=None)
    if low is not None:
        value = low
    elif high is not None:
        value = min(Fraction(0), high)
    else:
        value = Fraction(0)
    return sub + (value,)


def _affine(bound: tuple[tuple[Fraction, ...], Fraction], point: tuple[Fraction, ...]) -> Fraction:
    coeffs, const = bound
    return sum((c * x for c, x in zip(coeffs, point)), const)


def scale_primitive(values: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Scale a rational vector to the smallest integer vector with the same
    direction (positive scaling only); the zero vector is returned as-is."""
    vals = [rational(v) for v in values]
    if all(v == 0 for v in vals):
        return tuple(vals)
    denom_lcm = 1
    for v in vals:
        denom_lcm = denom_lcm * v.denominator // math.gcd(denom_lcm, v.denominator)
    ints = [v * denom_lcm for v in vals]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v.numerator))
    return tuple(v / g for v in ints)
