"""Matrix families and the entrywise transforms applied to them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import iv

from .numerics import (
    DEFAULT_START_PRECISION,
    Const,
    Entry,
    ExactMatrix,
    IntervalMatrix,
    LogPower,
    Matrix,
    Power,
    as_entry,
    as_fraction,
    entries_of,
    exp_of,
    format_fraction,
    log_of,
    matrix_from_entries,
    power_of,
    product_of,
)


class Family(str, enum.Enum):
    POWER = "power"          # (p_i + p_j) ** (p_i + p_j)
    MATRIX_A = "matrix-a"    # (i + j - 1) ** (i + j - 1), 1-based
    LOG = "log"              # (p_i + p_j) * log(p_i + p_j)
    CAUCHY = "cauchy"        # 1 / (p_i + p_j + lambda)
    SUM = "sum"              # p_i + p_j
    ONES = "ones"
    HILBERT = "hilbert"      # 1 / (i + j - 1), 1-based
    MIN = "min"              # min(i, j), 1-based
    PASCAL = "pascal"        # binomial(i + j, i), 0-based


POINT_FAMILIES = frozenset({Family.POWER, Family.LOG, Family.CAUCHY, Family.SUM})


def parse_points(points) -> tuple[Fraction, ...]:
    """Accept ``"1/2,3/2"`` or a sequence of ints/strings/Fractions."""
    if isinstance(points, str):
        points = [p for p in points.split(",") if p.strip()]
    return tuple(as_fraction(p) for p in points)


def check_points(points: Sequence[Fraction]) -> None:
    if not points or points[0] <= 0 or any(a >= b for a, b in zip(points, points[1:])):
        raise ValueError("points must be positive strictly increasing")


@dataclass(frozen=True)
class KernelSpec:
    """Which matrix to build: a family plus its parameters.

    ``r`` is an optional Hadamard exponent applied after generation.
    """

    family: Family
    points: tuple[Fraction, ...] = ()
    n: int | None = None
    lam: Fraction = Fraction(0)
    r: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "points", parse_points(self.points))
        object.__setattr__(self, "lam", as_fraction(self.lam))
        if self.r is not None:
            object.__setattr__(self, "r", as_fraction(self.r))
        if self.family in POINT_FAMILIES:
            check_points(self.points)
            if self.n is not None and self.n != len(self.points):
                raise ValueError("n disagrees with the number of points")
            object.__setattr__(self, "n", len(self.points))
        elif self.n is None or self.n < 1:
            raise ValueError(f"family {self.family.value} needs n >= 1")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.r is not None and self.r <= 0:
            raise ValueError("r must be positive")

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "points": [format_fraction(p) for p in self.points],
            "n": self.n,
            "lambda": format_fraction(self.lam),
            "r": None if self.r is None else format_fraction(self.r),
        }

    @classmethod
    def from_json(cls, data: dict) -> KernelSpec:
        return cls(
            family=Family(data["family"]),
            points=tuple(data.get("points") or ()),
            n=data.get("n"),
            lam=data.get("lambda") or 0,
            r=data.get("r"),
        )


def _base_entries(spec: KernelSpec) -> list[list[Entry]]:
    n, p, fam = spec.n, spec.points, spec.family
    idx = range(n)
    if fam is Family.POWER:
        return [[Power(p[i] + p[j], p[i] + p[j]) for j in idx] for i in idx]
    if fam is Family.MATRIX_A:
        return [[Power(Fraction(i + j + 1), Fraction(i + j + 1)) for j in idx] for i in idx]
    if fam is Family.LOG:
        return [[LogPower(p[i] + p[j], p[i] + p[j]) for j in idx] for i in idx]
    if fam is Family.CAUCHY:
        return [[Const(1 / (p[i] + p[j] + spec.lam)) for j in idx] for i in idx]
    if fam is Family.SUM:
        return [[Const(p[i] + p[j]) for j in idx] for i in idx]
    if fam is Family.ONES:
        return [[Const(Fraction(1)) for _ in idx] for _ in idx]
    if fam is Family.HILBERT:
        return [[Const(Fraction(1, i + j + 1)) for j in idx] for i in idx]
    if fam is Family.MIN:
        return [[Const(Fraction(min(i, j) + 1)) for j in idx] for i in idx]
    if fam is Family.PASCAL:
        return [[Const(Fraction(math.comb(i + j, i))) for j in idx] for i in idx]
    raise ValueError(f"unknown family {fam}")


def generate(spec: KernelSpec, precision: int = DEFAULT_START_PRECISION) -> Matrix:
    """Build the matrix described by ``spec``.

    The result is an :class:`ExactMatrix` whenever every entry is rational
    (integer exponents, Cauchy, Hilbert, ...), otherwise an
    :class:`IntervalMatrix` at ``precision`` bits.
    """
    entries = _base_entries(spec)
    if spec.r is not None:
        entries = [[power_of(e, spec.r) for e in row] for row in entries]
    return matrix_from_entries(entries, precision)


def matrix_a(n: int) -> ExactMatrix:
    return generate(KernelSpec(Family.MATRIX_A, n=n))


def power_kernel(points, precision: int = DEFAULT_START_PRECISION) -> Matrix:
    return generate(KernelSpec(Family.POWER, points=points), precision)


def log_kernel(points, precision: int = DEFAULT_START_PRECISION) -> Matrix:
    return generate(KernelSpec(Family.LOG, points=points), precision)


def cauchy(points, lam=0) -> ExactMatrix:
    return generate(KernelSpec(Family.CAUCHY, points=points, lam=lam))


def sum_matrix(points) -> ExactMatrix:
    return generate(KernelSpec(Family.SUM, points=points))


def ones(n: int) -> ExactMatrix:
    return generate(KernelSpec(Family.ONES, n=n))


def hilbert(n: int) -> ExactMatrix:
    return generate(KernelSpec(Family.HILBERT, n=n))


def min_matrix(n: int) -> ExactMatrix:
    return generate(KernelSpec(Family.MIN, n=n))


def pascal(n: int) -> ExactMatrix:
    return generate(KernelSpec(Family.PASCAL, n=n))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def _map_entries(m: Matrix, fn) -> Matrix:
    precision = m.precision if isinstance(m, IntervalMatrix) else DEFAULT_START_PRECISION
    return matrix_from_entries([[fn(e) for e in row] for row in entries_of(m)], precision)


def hadamard_power(m: Matrix, r) -> Matrix:
    """Entrywise ``r``-th power; exact whenever every power is rational."""
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    if isinstance(m, IntervalMatrix) and m.entries is None:
        def fn(mat):
            out = []
            for row in mat.values:
                if any(not x.a > 0 for x in row):
                    raise ValueError("entrywise power undefined")
                out.append([iv.exp(iv.mpf(r.numerator) / r.denominator * iv.log(x)) for x in row])
            return out
        return m.derive(fn)
    return _map_entries(m, lambda e: power_of(e, r))


def _same_entry(a, b) -> bool:
    if a == b:
        return True
    if isinstance(a, Entry) and isinstance(b, Entry):
        va, vb = a.exact(), b.exact()
        return va is not None and va == vb
    return False


def is_hankel(m: Matrix) -> bool:
    n = m.n
    if isinstance(m, ExactMatrix):
        grid = m.entries
    elif m.entries is not None:
        grid = m.entries
    else:
        grid = [[(x.a, x.b) for x in row] for row in m.values]
    return all(_same_entry(grid[i][j], grid[i + 1][j - 1])
               for i in range(n - 1) for j in range(1, n))


def hankel_shift(m: Matrix) -> Matrix:
    """Delete the first column and the last row of a Hankel matrix."""
    if m.n < 2:
        raise ValueError("Hankel shift needs n >= 2")
    if not is_hankel(m):
        raise ValueError("Hankel structure required")
    rows, cols = range(m.n - 1), range(1, m.n)
    return m.submatrix(rows, cols)


def entrywise_log(m: Matrix) -> Matrix:
    """Entrywise natural log; power-kernel entries keep the closed form ``s log s``."""
    if isinstance(m, ExactMatrix):
        if any(x <= 0 for row in m.entries for x in row):
            raise ValueError("log requires positive entries")
    else:
        if any(not x.a > 0 for row in m.values for x in row):
            raise ValueError("log requires positive entries")
        if m.entries is None:
            return m.derive(lambda mat: [[iv.log(x) for x in row] for row in mat.values])
    return _map_entries(m, log_of)


def entrywise_exp(m: Matrix) -> Matrix:
    if isinstance(m, IntervalMatrix) and m.entries is None:
        return m.derive(lambda mat: [[iv.exp(x) for x in row] for row in mat.values])
    return _map_entries(m, exp_of)


def diagonal_congruence(m: Matrix, diagonal: Sequence) -> Matrix:
    """``X M X`` for the diagonal matrix ``X = diag(diagonal)``."""
    d = [as_entry(x) for x in diagonal]
    if len(d) != m.n:
        raise ValueError("diagonal length must match the matrix")
    grid = entries_of(m)
    precision = m.precision if isinstance(m, IntervalMatrix) else DEFAULT_START_PRECISION
    return matrix_from_entries(
        [[product_of(d[i], grid[i][j], d[j]) for j in range(m.n)] for i in range(m.n)],
        precision)


# ---------------------------------------------------------------------------
# rational-exponent reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionData:
    """Rewrite of ``[(q_i+q_j)^((q_i+q_j) r)]`` through an integer-point kernel.

    With ``m`` the lcm of the denominators of ``q`` and ``k = m q``,
    the Hadamard power equals ``X K^(r/m) X`` where
    ``K = [(k_i+k_j)^(k_i+k_j)]`` and ``X = diag(m^(-q_j r))``.
    """

    m: int
    k: tuple[int, ...]
    X: tuple[Entry, ...]
    K: ExactMatrix
    r: Fraction

    def product(self, precision: int = DEFAULT_START_PRECISION) -> Matrix:
        """Evaluate ``X K^(r/m) X``."""
        powered = [[power_of(x, self.r / self.m) for x in row] for row in self.K.entries]
        n = len(self.k)
        return matrix_from_entries(
            [[product_of(self.X[i], powered[i][j], self.X[j]) for j in range(n)] for i in range(n)],
            precision)


def rational_reduction(q, r=1) -> ReductionData:
    q, r = parse_points(q), as_fraction(r)
    check_points(q)
    if r <= 0:
        raise ValueError("r must be positive")
    m = math.lcm(*(x.denominator for x in q))
    k = tuple(int(x * m) for x in q)
    K = ExactMatrix.from_function(len(k), lambda i, j: (k[i] + k[j]) ** (k[i] + k[j]))
    X = tuple(Power(Fraction(m), -x * r) for x in q)
    return ReductionData(m, k, X, K, r)


# ---------------------------------------------------------------------------
# log integral diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogIntegralCheck:
    x: Fraction
    truncation: float
    integral: float
    tail_bound: float
    deviation: float


def verify_log_integral(x, truncation=None, tol: float = 1e-10, ratio: int = 10,
                        dps: int = 30) -> LogIntegralCheck:
    """Integrate ``1/(1+t) - 1/(x+t)`` over ``[0, truncation]`` and compare with ``log x``.

    The integrand equals ``(x-1)/((1+t)(x+t))`` and is bounded by
    ``|x-1|/t**2``, so the discarded tail is at most ``|x-1|/truncation``.
    By default the truncation is chosen so that this bound is ``tol``.
    Quadrature runs on geometric panels ``[0, 1, ratio, ratio**2, ...]``.
    """
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    gap = abs(x - 1)
    if truncation is None:
        truncation = float(gap / Fraction(tol)) if gap else 1.0
    with mpmath.workdps(dps):
        xm = mpmath.mpf(x.numerator) / x.denominator
        cuts = [mpmath.mpf(0), mpmath.mpf(1)]
        while cuts[-1] * ratio < truncation:
            cuts.append(cuts[-1] * ratio)
        if cuts[-1] < truncation:
            cuts.append(mpmath.mpf(truncation))
        integral = mpmath.quad(lambda t: 1 / (1 + t) - 1 / (xm + t), cuts)
        deviation = abs(integral - mpmath.log(xm))
    return LogIntegralCheck(x, float(truncation), float(integral),
                            float(gap) / float(truncation), float(deviation))


def random_points(rng, n: int, denominator: int = 64, numerator_max: int = 1280) -> tuple[Fraction, ...]:
    """``n`` distinct points ``a/denominator`` with ``a`` uniform in ``[1, numerator_max]``, sorted."""
    return tuple(sorted(Fraction(a, denominator) for a in rng.sample(range(1, numerator_max + 1), n)))
