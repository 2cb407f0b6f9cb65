"""Exact rational and certified interval arithmetic for small dense matrices.

Two carriers are used throughout the package:

* :class:`ExactMatrix` holds :class:`fractions.Fraction` entries and every
  decision made on it is exact.
* :class:`IntervalMatrix` holds outward-rounded ``mpmath.iv`` intervals at a
  given working precision.  It remembers how to re-evaluate itself, so a
  classifier can escalate precision until an enclosure excludes zero.

Entries that are not rational (``27 ** 0.5``, ``3 * log 3`` ...) are kept as
small symbolic :class:`Entry` objects; they collapse to an exact ``Fraction``
whenever the value happens to be rational and are otherwise enclosed on
demand at any precision.
"""

from __future__ import annotations

import contextlib
import decimal
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterator, Sequence, Union

import gmpy2
from mpmath import iv
from mpmath.libmp import finf, fninf, to_rational

Interval = type(iv.mpf(0))

DEFAULT_START_PRECISION = 64
DEFAULT_PRECISION_CAP = 4096

# refuse to materialise exact powers larger than this many bits
MAX_EXACT_BITS = 1 << 22


@contextlib.contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """Temporarily set the precision of the ``mpmath.iv`` context."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def precision_schedule(cap: int = DEFAULT_PRECISION_CAP,
                       start: int = DEFAULT_START_PRECISION) -> Iterator[int]:
    """Yield ``start, 2*start, ...`` up to and including ``cap``."""
    bits = min(start, cap)
    while bits < cap:
        yield bits
        bits *= 2
    yield cap


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"num/den"`` or decimal strings exactly.

    Binary floats are rejected so that ``0.1`` can never sneak in as
    ``3602879701896397/36028797018963968``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("binary floats are ambiguous; pass a string such as '0.1'")
    return Fraction(value)


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def enclose_fraction(q: Fraction) -> Interval:
    """Outward enclosure of a rational at the current ``iv.prec``."""
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def exact_power(base: Fraction, exponent: Fraction) -> Fraction | None:
    """``base ** exponent`` if it is rational and reasonably sized, else ``None``."""
    if exponent == 0:
        return Fraction(1)
    if base == 0:
        if exponent < 0:
            raise ZeroDivisionError("zero to a negative power")
        return Fraction(0)
    if base == 1:
        return Fraction(1)
    if base < 0 and exponent.denominator != 1:
        return None
    root_degree = exponent.denominator
    size = max(base.numerator.bit_length(), base.denominator.bit_length())
    if size * abs(exponent.numerator) // root_degree > MAX_EXACT_BITS:
        return None
    if root_degree == 1:
        return base ** exponent.numerator
    num, num_exact = gmpy2.iroot(gmpy2.mpz(base.numerator), root_degree)
    den, den_exact = gmpy2.iroot(gmpy2.mpz(base.denominator), root_degree)
    if not (num_exact and den_exact):
        return None
    return Fraction(int(num), int(den)) ** exponent.numerator


# ---------------------------------------------------------------------------
# symbolic entries
# ---------------------------------------------------------------------------

class Entry:
    """A real number known either exactly or through enclosures."""

    def exact(self) -> Fraction | None:
        raise NotImplementedError

    def enclose(self) -> Interval:
        """Enclosure at the current ``iv.prec``."""
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Entry):
    value: Fraction

    def exact(self) -> Fraction:
        return self.value

    def enclose(self) -> Interval:
        return enclose_fraction(self.value)


@dataclass(frozen=True)
class Power(Entry):
    """``base ** exponent`` with a nonnegative rational base."""

    base: Fraction
    exponent: Fraction

    def __post_init__(self):
        if self.base < 0:
            raise ValueError("entrywise power undefined")

    @cached_property
    def _exact(self) -> Fraction | None:
        return exact_power(self.base, self.exponent)

    def exact(self) -> Fraction | None:
        return self._exact

    def enclose(self) -> Interval:
        if self._exact is not None:
            return enclose_fraction(self._exact)
        return iv.exp(enclose_fraction(self.exponent) * iv.log(enclose_fraction(self.base)))


@dataclass(frozen=True)
class LogPower(Entry):
    """``exponent * log(base)``, i.e. the logarithm of ``Power(base, exponent)``."""

    base: Fraction
    exponent: Fraction

    def __post_init__(self):
        if self.base <= 0:
            raise ValueError("log requires positive entries")

    def exact(self) -> Fraction | None:
        if self.exponent == 0 or self.base == 1:
            return Fraction(0)
        return None

    def enclose(self) -> Interval:
        if self.exact() is not None:
            return iv.mpf(0)
        return enclose_fraction(self.exponent) * iv.log(enclose_fraction(self.base))


@dataclass(frozen=True)
class Exp(Entry):
    arg: Entry

    def exact(self) -> Fraction | None:
        return Fraction(1) if self.arg.exact() == 0 else None

    def enclose(self) -> Interval:
        return iv.exp(self.arg.enclose())


@dataclass(frozen=True)
class Log(Entry):
    arg: Entry

    def exact(self) -> Fraction | None:
        return Fraction(0) if self.arg.exact() == 1 else None

    def enclose(self) -> Interval:
        x = self.arg.enclose()
        if not x.a > 0:
            raise ValueError("log requires positive entries")
        return iv.log(x)


@dataclass(frozen=True)
class RealPower(Entry):
    """``arg ** r`` for an entry without a closed power form."""

    arg: Entry
    r: Fraction

    def exact(self) -> Fraction | None:
        return Fraction(1) if self.arg.exact() == 1 else None

    def enclose(self) -> Interval:
        x = self.arg.enclose()
        if not x.a > 0:
            raise ValueError("entrywise power undefined")
        return iv.exp(enclose_fraction(self.r) * iv.log(x))


@dataclass(frozen=True)
class Product(Entry):
    factors: tuple[Entry, ...]

    def exact(self) -> Fraction | None:
        result = Fraction(1)
        for f in self.factors:
            v = f.exact()
            if v is None:
                return None
            result *= v
        return result

    def enclose(self) -> Interval:
        v = self.exact()
        if v is not None:
            return enclose_fraction(v)
        result = iv.mpf(1)
        for f in self.factors:
            result = result * f.enclose()
        return result


EntryLike = Union[Entry, Fraction, int, str]


def as_entry(x: EntryLike) -> Entry:
    return x if isinstance(x, Entry) else Const(as_fraction(x))


def power_of(x: EntryLike, r) -> Entry:
    x, r = as_entry(x), as_fraction(r)
    if isinstance(x, Const):
        if x.value < 0 and r.denominator != 1:
            raise ValueError("entrywise power undefined")
        if x.value < 0:
            return Const(x.value ** r.numerator)
        return Power(x.value, r)
    if isinstance(x, Power):
        return Power(x.base, x.exponent * r)
    if isinstance(x, Exp) and isinstance(x.arg, LogPower):
        return Power(x.arg.base, x.arg.exponent * r)
    return RealPower(x, r)


def log_of(x: EntryLike) -> Entry:
    x = as_entry(x)
    if isinstance(x, Const):
        return LogPower(x.value, Fraction(1))
    if isinstance(x, Power):
        return LogPower(x.base, x.exponent)
    if isinstance(x, Exp):
        return x.arg
    return Log(x)


def exp_of(x: EntryLike) -> Entry:
    x = as_entry(x)
    if isinstance(x, LogPower):
        return Power(x.base, x.exponent)
    if isinstance(x, Log):
        return x.arg
    if x.exact() == 0:
        return Const(Fraction(1))
    return Exp(x)


def product_of(*factors: EntryLike) -> Entry:
    """Product with constants folded and powers of a common base merged."""
    const = Fraction(1)
    powers: dict[Fraction, Fraction] = {}
    others: list[Entry] = []
    for f in map(as_entry, factors):
        parts = f.factors if isinstance(f, Product) else (f,)
        for part in parts:
            if isinstance(part, Const):
                const *= part.value
            elif isinstance(part, Power):
                powers[part.base] = powers.get(part.base, Fraction(0)) + part.exponent
            else:
                others.append(part)
    items: list[Entry] = []
    for base, exponent in powers.items():
        p = Power(base, exponent)
        if p.exact() is not None:
            const *= p.exact()
        else:
            items.append(p)
    items.extend(others)
    if not items:
        return Const(const)
    if const != 1:
        items.insert(0, Const(const))
    if len(items) == 1:
        return items[0]
    return Product(tuple(items))


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

Grid = tuple[tuple, ...]


def _square(rows) -> int:
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("square matrix required")
    return n


@dataclass(frozen=True)
class ExactMatrix:
    """Square matrix of exact rationals."""

    entries: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> ExactMatrix:
        _square(rows)
        return cls(tuple(tuple(as_fraction(x) for x in row) for row in rows))

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int, int], object]) -> ExactMatrix:
        return cls.from_rows([[fn(i, j) for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[Fraction]]:
        return [list(row) for row in self.entries]

    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i]
                   for i in range(self.n) for j in range(i))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> ExactMatrix:
        return ExactMatrix(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def as_entries(self) -> tuple[tuple[Entry, ...], ...]:
        return tuple(tuple(Const(x) for x in row) for row in self.entries)

    def __neg__(self) -> ExactMatrix:
        return ExactMatrix(tuple(tuple(-x for x in row) for row in self.entries))

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        return ExactMatrix(tuple(tuple(a + b for a, b in zip(r, s))
                                 for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def scale(self, c) -> ExactMatrix:
        c = as_fraction(c)
        return ExactMatrix(tuple(tuple(c * x for x in row) for row in self.entries))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(map(format_fraction, row)) + "]" for row in self.entries)
        return f"ExactMatrix([{body}])"


@dataclass(frozen=True, eq=False)
class IntervalMatrix:
    """Square matrix of interval enclosures at ``precision`` bits.

    ``entries`` keeps the symbolic form when the matrix came from a
    generator; ``rebuild`` re-derives the matrix at another precision.  A
    matrix with neither (e.g. read from a file) is frozen at its precision.
    """

    values: tuple[tuple[Interval, ...], ...]
    precision: int
    entries: tuple[tuple[Entry, ...], ...] | None = None
    rebuild: Callable[[int], IntervalMatrix] | None = field(default=None, repr=False)

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[EntryLike]],
                     precision: int = DEFAULT_START_PRECISION) -> IntervalMatrix:
        _square(entries)
        grid = tuple(tuple(as_entry(e) for e in row) for row in entries)
        with working_precision(precision):
            values = tuple(tuple(e.enclose() for e in row) for row in grid)
        return cls(values, precision, entries=grid)

    @classmethod
    def from_bounds(cls, bounds: Sequence[Sequence[tuple]], precision: int) -> IntervalMatrix:
        """Frozen matrix from ``(lo, hi)`` pairs (numbers or decimal strings)."""
        _square(bounds)
        with working_precision(precision):
            values = tuple(tuple(iv.mpf([lo, hi]) for lo, hi in row) for row in bounds)
        return cls(values, precision)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def refinable(self) -> bool:
        return self.entries is not None or self.rebuild is not None

    def __getitem__(self, ij: tuple[int, int]) -> Interval:
        i, j = ij
        return self.values[i][j]

    def at(self, precision: int) -> IntervalMatrix:
        """The same matrix re-evaluated at ``precision`` bits."""
        if precision == self.precision or not self.refinable:
            return self
        if self.entries is not None:
            return IntervalMatrix.from_entries(self.entries, precision)
        return self.rebuild(precision)

    def derive(self, fn: Callable[[IntervalMatrix], Sequence[Sequence[Interval]]]) -> IntervalMatrix:
        """Apply an interval-level transform that is replayed on refinement."""
        with working_precision(self.precision):
            values = tuple(tuple(row) for row in fn(self))
        rebuild = None
        if self.refinable:
            rebuild = lambda bits: self.at(bits).derive(fn)  # noqa: E731
        return IntervalMatrix(values, self.precision, rebuild=rebuild)

    def __neg__(self) -> IntervalMatrix:
        return self.derive(lambda m: [[-x for x in row] for row in m.values])

    def is_symmetric(self) -> bool:
        """Symmetric by construction: equal symbolic entries or equal enclosures."""
        n = self.n
        if self.entries is not None:
            return all(self.entries[i][j] == self.entries[j][i]
                       for i in range(n) for j in range(i))
        return all(self.values[i][j].a == self.values[j][i].a
                   and self.values[i][j].b == self.values[j][i].b
                   for i in range(n) for j in range(i))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntervalMatrix:
        if self.entries is not None:
            return IntervalMatrix.from_entries(
                [[self.entries[i][j] for j in cols] for i in rows], self.precision)
        return self.derive(lambda m: [[m.values[i][j] for j in cols] for i in rows])

    def widths(self) -> list[list]:
        return [[x.delta for x in row] for row in self.values]


Matrix = Union[ExactMatrix, IntervalMatrix]


def matrix_from_entries(entries: Sequence[Sequence[EntryLike]],
                        precision: int = DEFAULT_START_PRECISION) -> Matrix:
    """``ExactMatrix`` when every entry is rational, else ``IntervalMatrix``."""
    grid = [[as_entry(e) for e in row] for row in entries]
    exact = [[e.exact() for e in row] for row in grid]
    if all(v is not None for row in exact for v in row):
        return ExactMatrix.from_rows(exact)
    return IntervalMatrix.from_entries(grid, precision)


def entries_of(m: Matrix) -> tuple[tuple[Entry, ...], ...]:
    if isinstance(m, ExactMatrix):
        return m.as_entries()
    if m.entries is None:
        raise ValueError("matrix has no symbolic entries; regenerate it from a KernelSpec")
    return m.entries


def lift(m: Matrix, precision: int = DEFAULT_START_PRECISION) -> IntervalMatrix:
    if isinstance(m, IntervalMatrix):
        return m.at(precision)
    return IntervalMatrix.from_entries(m.as_entries(), precision)


# ---------------------------------------------------------------------------
# determinants and factorizations
# ---------------------------------------------------------------------------

def bareiss_det(m: ExactMatrix | Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rows are first scaled to integers, so every intermediate quantity is an
    integer and each division in the recurrence is exact.
    """
    rows = m.rows() if isinstance(m, ExactMatrix) else [[as_fraction(x) for x in r] for r in m]
    n = _square(rows)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    a: list[list[int]] = []
    for row in rows:
        d = math.lcm(*(x.denominator for x in row))
        scale *= d
        a.append([int(x * d) for x in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return Fraction(sign * a[n - 1][n - 1]) / scale


@dataclass(frozen=True)
class LDLResult:
    """Outcome of :func:`exact_ldlt`.

    ``pivots`` are the diagonal of D for the steps completed; ``factor`` is
    the unit lower-triangular L (columns past ``stopped_at`` are trivial).
    ``witness`` is a vector x with ``x^T M x < 0`` (indefinite) and
    ``null_witness`` a nonzero x with ``x^T M x = 0`` (PSD but singular).
    ``minor`` names a principal index set whose minor is the offending value.
    """

    pivots: tuple[Fraction, ...]
    factor: tuple[tuple[Fraction, ...], ...]
    is_psd: bool
    is_pd: bool
    witness: tuple[Fraction, ...] | None = None
    null_witness: tuple[Fraction, ...] | None = None
    minor: tuple[tuple[int, ...], Fraction] | None = None

    @property
    def pivot_signs(self) -> tuple[int, ...]:
        return tuple((p > 0) - (p < 0) for p in self.pivots)


def _normalise(vec: list[Fraction]) -> tuple[Fraction, ...]:
    """Scale to coprime integers with a positive leading coordinate."""
    d = math.lcm(*(x.denominator for x in vec))
    ints = [int(x * d) for x in vec]
    g = math.gcd(*ints) or 1
    lead = next(x for x in ints if x != 0)
    s = 1 if lead > 0 else -1
    return tuple(Fraction(s * x // g) for x in ints)


def _back_substitute(L: list[list[Fraction]], y: list[Fraction]) -> list[Fraction]:
    """Solve ``L^T x = y`` for unit lower-triangular L."""
    n = len(y)
    x = [Fraction(0)] * n
    for i in reversed(range(n)):
        x[i] = y[i] - sum((L[j][i] * x[j] for j in range(i + 1, n)), Fraction(0))
    return x


def quadratic_form(m: ExactMatrix, x: Sequence) -> Fraction:
    x = [as_fraction(v) for v in x]
    n = m.n
    return sum((x[i] * m[i, j] * x[j] for i in range(n) for j in range(n)), Fraction(0))


def exact_ldlt(m: ExactMatrix) -> LDLResult:
    """Exact LDL^T with a decisive PSD/PD classification.

    A zero pivot whose remaining row is zero is skipped (the matrix may
    still be PSD); a zero pivot with a nonzero remaining entry, or any
    negative pivot, proves indefiniteness and stops the factorization.
    """
    if not m.is_symmetric():
        raise ValueError("symmetry required")
    n = m.n
    a = m.rows()
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots: list[Fraction] = []
    null_witness = None
    null_minor = None

    def nonzero_pivots():
        return [i for i, p in enumerate(pivots) if p != 0]

    for k in range(n):
        d = a[k][k]
        if d < 0:
            pivots.append(d)
            y = [Fraction(int(i == k)) for i in range(n)]
            x = _normalise(_back_substitute(L, y))
            idx = tuple(sorted(nonzero_pivots()))
            return LDLResult(tuple(pivots), _freeze(L), False, False, witness=x,
                             minor=(idx, bareiss_det(m.submatrix(idx, idx))))
        if d == 0:
            partner = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
            if partner is not None:
                pivots.append(d)
                b, c = a[k][partner], a[partner][partner]
                y = [Fraction(0)] * n
                y[k] = -(c + 1) / (2 * b)
                y[partner] = Fraction(1)
                x = _normalise(_back_substitute(L, y))
                idx = tuple(sorted(nonzero_pivots() + [k, partner]))
                return LDLResult(tuple(pivots), _freeze(L), False, False, witness=x,
                                 minor=(idx, bareiss_det(m.submatrix(idx, idx))))
            if null_witness is None:
                y = [Fraction(int(i == k)) for i in range(n)]
                null_witness = _normalise(_back_substitute(L, y))
                idx = tuple(sorted(nonzero_pivots() + [k]))
                null_minor = (idx, Fraction(0))
            pivots.append(d)
            continue
        pivots.append(d)
        for i in range(k + 1, n):
            L[i][k] = a[i][k] / d
        for i in range(k + 1, n):
            if L[i][k] == 0:
                continue
            for j in range(k + 1, n):
                a[i][j] -= L[i][k] * a[k][j]
    is_pd = null_witness is None
    return LDLResult(tuple(pivots), _freeze(L), True, is_pd,
                     null_witness=null_witness, minor=null_minor)


def _freeze(rows):
    return tuple(tuple(r) for r in rows)


class Sign(enum.Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"
    UNDETERMINED = "undetermined"


def interval_sign(x: Interval) -> Sign:
    """Sign of an enclosure at its own precision."""
    if x.a > 0:
        return Sign.POSITIVE
    if x.b < 0:
        return Sign.NEGATIVE
    if x.a == 0 and x.b == 0:
        return Sign.ZERO
    return Sign.UNDETERMINED


def sign_of(x: Fraction | Interval, rebuild: Callable[[int], Interval] | None = None,
            cap: int = DEFAULT_PRECISION_CAP) -> Sign:
    """Sign of an exact value, or of an enclosure escalated through the schedule.

    ``rebuild(bits)`` must return an enclosure of the same quantity at the
    requested precision.  Exact inputs never return ``UNDETERMINED``.
    """
    if isinstance(x, (Fraction, int)):
        return Sign.POSITIVE if x > 0 else Sign.NEGATIVE if x < 0 else Sign.ZERO
    s = interval_sign(x)
    if s is not Sign.UNDETERMINED or rebuild is None:
        return s
    for bits in precision_schedule(cap):
        with working_precision(bits):
            s = interval_sign(rebuild(bits))
        if s is not Sign.UNDETERMINED:
            return s
    return Sign.UNDETERMINED


class PD(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class CholeskyResult:
    """Outcome of :func:`interval_cholesky` at one precision.

    ``pivots`` enclose the LDL^T pivots computed before stopping.  When the
    answer is NO, the leading principal minor of order ``failed_at + 1`` is
    enclosed by ``minor`` and is nonpositive (strictly negative when
    ``psd_refuted``).
    """

    outcome: PD
    pivots: tuple[Interval, ...]
    precision: int
    failed_at: int | None = None
    minor: Interval | None = None
    psd_refuted: bool = False


def interval_cholesky(m: IntervalMatrix) -> CholeskyResult:
    """Root-free interval Cholesky (LDL^T) at the matrix's own precision.

    Every completed pivot enclosure is strictly positive, so each enclosure
    of the next pivot contains the true pivot of every matrix inside the
    entrywise enclosures; the product of pivots encloses the leading minor.
    """
    n = m.n
    with working_precision(m.precision):
        a = [list(row) for row in m.values]
        pivots: list[Interval] = []
        for k in range(n):
            d = a[k][k]
            pivots.append(d)
            if not d.a > 0:
                minor = iv.mpf(1)
                for p in pivots:
                    minor = minor * p
                if d.b < 0:
                    return CholeskyResult(PD.NO, tuple(pivots), m.precision, k, minor, True)
                if d.b <= 0:
                    return CholeskyResult(PD.NO, tuple(pivots), m.precision, k, minor, False)
                return CholeskyResult(PD.UNDETERMINED, tuple(pivots), m.precision, k, minor)
            for i in range(k + 1, n):
                lik = a[i][k] / d
                for j in range(k + 1, i + 1):
                    a[i][j] = a[i][j] - lik * a[k][j]
                    a[j][i] = a[i][j]
    return CholeskyResult(PD.YES, tuple(pivots), m.precision)


def interval_det(values: Sequence[Sequence[Interval]]) -> Interval:
    """Enclosure of a determinant by Gaussian elimination at the current precision.

    Partial pivoting picks the candidate with the largest magnitude lower
    bound (a float heuristic only; the enclosure stays rigorous).
    """
    n = len(values)
    a = [list(row) for row in values]
    det = iv.mpf(1)
    for k in range(n):
        best = max(range(k, n), key=lambda i: _mignitude(a[i][k]))
        if _mignitude(a[best][k]) == 0:
            col = [a[i][k] for i in range(k, n)]
            if all(x.a == 0 and x.b == 0 for x in col):
                return iv.mpf(0)
            return iv.mpf([-math.inf, math.inf])
        if best != k:
            a[k], a[best] = a[best], a[k]
            det = -det
        piv = a[k][k]
        det = det * piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return det


def _mignitude(x: Interval) -> float:
    if x.a > 0:
        return float(x.a)
    if x.b < 0:
        return float(-x.b)
    return 0.0


def interval_quadratic_form(values: Sequence[Sequence[Interval]], x: Sequence[Fraction]) -> Interval:
    n = len(values)
    xs = [enclose_fraction(as_fraction(v)) for v in x]
    total = iv.mpf(0)
    for i in range(n):
        for j in range(n):
            total = total + xs[i] * values[i][j] * xs[j]
    return total


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def interval_endpoints(x: Interval) -> tuple[Fraction | None, Fraction | None]:
    """Exact endpoints; ``None`` marks an infinite end."""
    out = []
    for end in x._mpi_:
        if end in (finf, fninf):
            out.append(None)
        else:
            p, q = to_rational(end)
            out.append(Fraction(int(p), int(q)))
    return out[0], out[1]


def _decimal(q: Fraction, digits: int, rounding: str) -> str:
    if q == 0:
        return "0"
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        return str(decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator))


def format_interval(x: Interval, digits: int = 20) -> list[str]:
    """``[lo, hi]`` as decimal strings, rounded outward so they still enclose."""
    lo, hi = interval_endpoints(x)
    return [
        "-inf" if lo is None else _decimal(lo, digits, decimal.ROUND_FLOOR),
        "inf" if hi is None else _decimal(hi, digits, decimal.ROUND_CEILING),
    ]


def encode(value):
    """JSON-ready form: Fractions as ``"num/den"``, intervals as ``[lo, hi]``."""
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, Interval):
        return format_interval(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {k: encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value
