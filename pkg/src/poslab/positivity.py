"""Classifiers for the positivity classes, with certificates and witnesses.

Every check returns a :class:`Verdict`.  Exact matrices always get a
definite answer; interval matrices are re-evaluated along the precision
schedule and may end ``UNDETERMINED`` at the cap.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import iv

from . import kernels
from .numerics import (
    DEFAULT_PRECISION_CAP,
    PD,
    ExactMatrix,
    IntervalMatrix,
    Matrix,
    as_fraction,
    bareiss_det,
    enclose_fraction,
    encode,
    exact_ldlt,
    format_fraction,
    interval_cholesky,
    interval_det,
    precision_schedule,
    quadratic_form,
    working_precision,
)

DEFAULT_R_GRID = tuple(Fraction(x) for x in ("0.1", "0.5", "1", "2", "3"))
DEFAULT_BRUTEFORCE_CAP = 6
# principal-minor search for interval PSD refutation stays below this size
_PRINCIPAL_SEARCH_MAX = 8


class PositivityClass(str, enum.Enum):
    PSD = "psd"
    PD = "pd"
    CPD = "cpd"
    CND = "cnd"
    CPD_NONSINGULAR = "cpd-nonsingular"
    INFDIV = "infdiv"
    TP = "tp"
    STP = "stp"
    HANKEL_STP = "hankel-stp"


class Outcome(str, enum.Enum):
    YES = "certified-yes"
    NO = "certified-no"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Verdict:
    """Three-valued classification result.

    ``certificate`` accompanies YES, ``witness`` accompanies NO; both are
    JSON-ready dicts.  ``precision`` is the working precision in bits that
    settled the question, or ``None`` when the exact path was used.
    """

    tested: PositivityClass
    outcome: Outcome
    certificate: dict | None = None
    witness: dict | None = None
    precision: int | None = None

    @property
    def yes(self) -> bool:
        return self.outcome is Outcome.YES

    @property
    def no(self) -> bool:
        return self.outcome is Outcome.NO

    @property
    def undetermined(self) -> bool:
        return self.outcome is Outcome.UNDETERMINED

    def relabel(self, tested: PositivityClass) -> Verdict:
        return Verdict(tested, self.outcome, self.certificate, self.witness, self.precision)

    def to_json(self) -> dict:
        return {
            "class": self.tested.value,
            "outcome": self.outcome.value,
            "certificate": self.certificate,
            "witness": self.witness,
            "precision": "exact" if self.precision is None else str(self.precision),
        }


def _max_precision(*verdicts: Verdict) -> int | None:
    bits = [v.precision for v in verdicts if v.precision is not None]
    return max(bits) if bits else None


def _require_symmetric(m: Matrix) -> None:
    if not m.is_symmetric():
        raise ValueError("symmetry required")


# ---------------------------------------------------------------------------
# PSD / PD
# ---------------------------------------------------------------------------

def _ldlt_witness(m: ExactMatrix, res) -> dict:
    vec = res.witness if res.witness is not None else res.null_witness
    rows, value = res.minor
    return {
        "kind": "vector",
        "vector": encode(vec),
        "value": encode(quadratic_form(m, vec)),
        "minor": {"rows": list(rows), "cols": list(rows), "value": encode(value)},
    }


def _negative_principal_minor(m: IntervalMatrix):
    """Search principal minors for one whose enclosure is strictly negative."""
    n = m.n
    if n > _PRINCIPAL_SEARCH_MAX:
        return None
    with working_precision(m.precision):
        for k in range(1, n + 1):
            for idx in itertools.combinations(range(n), k):
                d = interval_det([[m.values[i][j] for j in idx] for i in idx])
                if d.b < 0:
                    return list(idx), d
    return None


def _minor_witness(rows, cols, value) -> dict:
    return {"kind": "minor", "rows": list(rows), "cols": list(cols), "value": encode(value)}


def check_pd(m: Matrix, precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    _require_symmetric(m)
    cls = PositivityClass.PD
    if m.n == 0:
        return Verdict(cls, Outcome.YES, {"kind": "empty"})
    if isinstance(m, ExactMatrix):
        res = exact_ldlt(m)
        if res.is_pd:
            return Verdict(cls, Outcome.YES, {"kind": "ldlt", "pivots": encode(res.pivots)})
        return Verdict(cls, Outcome.NO, witness=_ldlt_witness(m, res))
    bits = m.precision
    failed_at = None
    for bits in precision_schedule(precision_max):
        res = interval_cholesky(m.at(bits))
        if res.outcome is PD.YES:
            return Verdict(cls, Outcome.YES, {"kind": "ldlt", "pivots": encode(res.pivots)}, precision=bits)
        if res.outcome is PD.NO:
            lead = range(res.failed_at + 1)
            return Verdict(cls, Outcome.NO, witness=_minor_witness(lead, lead, res.minor), precision=bits)
        # not PSD implies not PD, even when an earlier pivot straddles zero
        found = _negative_principal_minor(m.at(bits))
        if found is not None:
            idx, value = found
            return Verdict(cls, Outcome.NO, witness=_minor_witness(idx, idx, value), precision=bits)
        failed_at = res.failed_at
        if not m.refinable:
            bits = m.precision
            break
    return Verdict(cls, Outcome.UNDETERMINED, {"kind": "undetermined", "pivot": failed_at}, precision=bits)


def check_psd(m: Matrix, precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """PSD test.

    On the interval path a PD certificate also certifies PSD; otherwise the
    answer is NO only when some principal minor is certified negative.
    """
    _require_symmetric(m)
    cls = PositivityClass.PSD
    if m.n == 0:
        return Verdict(cls, Outcome.YES, {"kind": "empty"})
    if isinstance(m, ExactMatrix):
        res = exact_ldlt(m)
        if res.is_psd:
            return Verdict(cls, Outcome.YES, {"kind": "ldlt", "pivots": encode(res.pivots)})
        return Verdict(cls, Outcome.NO, witness=_ldlt_witness(m, res))
    bits = m.precision
    for bits in precision_schedule(precision_max):
        mb = m.at(bits)
        res = interval_cholesky(mb)
        if res.outcome is PD.YES:
            return Verdict(cls, Outcome.YES, {"kind": "pd", "pivots": encode(res.pivots)}, precision=bits)
        if res.psd_refuted:
            lead = range(res.failed_at + 1)
            return Verdict(cls, Outcome.NO, witness=_minor_witness(lead, lead, res.minor), precision=bits)
        found = _negative_principal_minor(mb)
        if found is not None:
            idx, value = found
            return Verdict(cls, Outcome.NO, witness=_minor_witness(idx, idx, value), precision=bits)
        if not m.refinable:
            bits = m.precision
            break
    return Verdict(cls, Outcome.UNDETERMINED, {"kind": "undetermined"}, precision=bits)


# ---------------------------------------------------------------------------
# conditional positivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompressionBasis:
    """A basis of the zero-sum hyperplane, stored as rational row vectors."""

    n: int
    vectors: tuple[tuple[Fraction, ...], ...] = field(default=())

    def __post_init__(self):
        if not self.vectors:
            vecs = tuple(
                tuple(Fraction(1 if i == a else -1 if i == a + 1 else 0) for i in range(self.n))
                for a in range(self.n - 1))
            object.__setattr__(self, "vectors", vecs)
        else:
            vecs = tuple(tuple(as_fraction(x) for x in v) for v in self.vectors)
            object.__setattr__(self, "vectors", vecs)
        if len(self.vectors) != max(self.n - 1, 0) or any(len(v) != self.n for v in self.vectors):
            raise ValueError("a basis of H1 needs n-1 vectors of length n")
        if any(sum(v) != 0 for v in self.vectors):
            raise ValueError("basis vectors must have zero coordinate sum")
        if _rank(self.vectors) != len(self.vectors):
            raise ValueError("basis vectors must be linearly independent")

    def to_json(self) -> list:
        return [encode(v) for v in self.vectors]

    def lift(self, y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Coordinates ``y`` in this basis to a vector of R^n."""
        return tuple(sum((c * v[i] for c, v in zip(y, self.vectors)), Fraction(0))
                     for i in range(self.n))


def _rank(rows) -> int:
    a = [list(r) for r in rows]
    rank = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def compress_to_H1(m: Matrix, basis: CompressionBasis | None = None) -> Matrix:
    """Gram matrix ``G[a][b] = u_a^T M u_b`` of the form restricted to H1."""
    _require_symmetric(m)
    n = m.n
    basis = basis or CompressionBasis(n)
    if basis.n != n:
        raise ValueError("basis dimension must match the matrix")
    u = basis.vectors
    k = len(u)
    if k == 0:
        return ExactMatrix(())
    if isinstance(m, ExactMatrix):
        mu = [[sum((m[i, j] * u[b][j] for j in range(n)), Fraction(0)) for b in range(k)]
              for i in range(n)]
        return ExactMatrix(tuple(
            tuple(sum((u[a][i] * mu[i][b] for i in range(n)), Fraction(0)) for b in range(k))
            for a in range(k)))

    def fn(mat: IntervalMatrix):
        ue = [[enclose_fraction(x) for x in v] for v in u]
        zero = iv.mpf(0)
        mu = [[sum((mat.values[i][j] * ue[b][j] for j in range(n) if u[b][j]), zero)
               for b in range(k)] for i in range(n)]
        g = [[None] * k for _ in range(k)]
        for a in range(k):
            for b in range(a, k):
                g[a][b] = g[b][a] = sum((ue[a][i] * mu[i][b] for i in range(n) if u[a][i]), zero)
        return g

    return m.derive(fn)


def _lift_through_basis(v: Verdict, basis: CompressionBasis, cls: PositivityClass) -> Verdict:
    """Re-express a verdict on the compressed matrix as one on M."""
    if v.yes:
        cert = {"kind": "compressed", "basis": basis.to_json(), "inner": v.certificate}
        return Verdict(cls, Outcome.YES, cert, precision=v.precision)
    if v.no:
        w = dict(v.witness)
        out = {"kind": "compressed", "basis": basis.to_json(), "inner": w}
        if w["kind"] == "vector":
            y = [as_fraction(x) for x in w["vector"]]
            out["vector"] = encode(basis.lift(y))
            out["value"] = w["value"]
        return Verdict(cls, Outcome.NO, witness=out, precision=v.precision)
    return Verdict(cls, Outcome.UNDETERMINED, v.certificate, precision=v.precision)


def check_cpd(m: Matrix, basis: CompressionBasis | None = None,
              precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    basis = basis or CompressionBasis(m.n)
    g = compress_to_H1(m, basis)
    return _lift_through_basis(check_psd(g, precision_max), basis, PositivityClass.CPD)


def check_cnd(m: Matrix, basis: CompressionBasis | None = None,
              precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    return check_cpd(-m, basis, precision_max).relabel(PositivityClass.CND)


def check_cpd_nonsingular(m: Matrix, basis: CompressionBasis | None = None,
                          precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """CPD with the form strictly positive on nonzero zero-sum vectors.

    For a CPD matrix this is exactly the condition for nonsingularity, so a
    PD compression settles both at once.
    """
    basis = basis or CompressionBasis(m.n)
    g = compress_to_H1(m, basis)
    return _lift_through_basis(check_pd(g, precision_max), basis, PositivityClass.CPD_NONSINGULAR)


# ---------------------------------------------------------------------------
# infinite divisibility
# ---------------------------------------------------------------------------

def _require_positive(m: Matrix) -> None:
    if isinstance(m, ExactMatrix):
        ok = all(x > 0 for row in m.entries for x in row)
    else:
        ok = all(x.a > 0 for row in m.values for x in row)
    if not ok:
        raise ValueError("infinite divisibility needs strictly positive entries")


def check_infdiv(m: Matrix, r_grid: Iterable = DEFAULT_R_GRID,
                 precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """Infinite divisibility via CPD of the entrywise log.

    Hadamard powers on ``r_grid`` are tested for PSD first; any refuted
    power is returned as the witness.
    """
    _require_symmetric(m)
    _require_positive(m)
    cls = PositivityClass.INFDIV
    sampled = {}
    used = []
    for r in map(as_fraction, r_grid):
        v = check_psd(kernels.hadamard_power(m, r), precision_max)
        used.append(v)
        sampled[format_fraction(r)] = v.outcome.value
        if v.no:
            witness = {"kind": "hadamard-power", "r": format_fraction(r), "inner": v.witness}
            return Verdict(cls, Outcome.NO, witness=witness, precision=_max_precision(*used))
    c = check_cpd(kernels.entrywise_log(m), precision_max=precision_max)
    bits = _max_precision(c, *used)
    if c.yes:
        return Verdict(cls, Outcome.YES, {"kind": "log-cpd", "inner": c.certificate,
                                          "sampled": sampled}, precision=bits)
    if c.no:
        return Verdict(cls, Outcome.NO, witness={"kind": "log-cpd", "inner": c.witness}, precision=bits)
    return Verdict(cls, Outcome.UNDETERMINED, {"kind": "log-cpd", "sampled": sampled}, precision=bits)


# ---------------------------------------------------------------------------
# total positivity
# ---------------------------------------------------------------------------

def all_minors(n: int):
    for k in range(1, n + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                yield rows, cols


def contiguous_minors(n: int):
    for k in range(1, n + 1):
        for i in range(n - k + 1):
            for j in range(n - k + 1):
                yield tuple(range(i, i + k)), tuple(range(j, j + k))


def _scan_minors(m: Matrix, minors, strict: bool, cls: PositivityClass,
                 precision_max: int) -> Verdict:
    minors = list(minors)
    if isinstance(m, ExactMatrix):
        checked = []
        for rows, cols in minors:
            d = bareiss_det(m.submatrix(rows, cols))
            if d < 0 or (strict and d == 0):
                return Verdict(cls, Outcome.NO, witness=_minor_witness(rows, cols, d))
            checked.append([list(rows), list(cols), encode(d)])
        return Verdict(cls, Outcome.YES, {"kind": "minors", "count": len(checked), "minors": checked})
    pending = list(range(len(minors)))
    values: dict[int, object] = {}
    bits = m.precision
    for bits in precision_schedule(precision_max):
        mb = m.at(bits)
        still = []
        with working_precision(bits):
            for idx in pending:
                rows, cols = minors[idx]
                d = interval_det([[mb.values[i][j] for j in cols] for i in rows])
                if d.b < 0 or (strict and d.b <= 0):
                    return Verdict(cls, Outcome.NO, witness=_minor_witness(rows, cols, d), precision=bits)
                if d.a > 0 or (not strict and d.a >= 0):
                    values[idx] = d
                else:
                    still.append(idx)
        pending = still
        if not pending:
            checked = [[list(minors[i][0]), list(minors[i][1]), encode(values[i])]
                       for i in range(len(minors))]
            return Verdict(cls, Outcome.YES, {"kind": "minors", "count": len(checked),
                                              "minors": checked}, precision=bits)
        if not m.refinable:
            bits = m.precision
            break
    rows, cols = minors[pending[0]]
    info = {"kind": "undetermined", "first_undetermined": {"rows": list(rows), "cols": list(cols)},
            "pending": len(pending)}
    return Verdict(cls, Outcome.UNDETERMINED, info, precision=bits)


def _bruteforce(m: Matrix, strict: bool, cls, cap: int, precision_max: int) -> Verdict:
    if m.n > cap:
        raise ValueError("brute force capped")
    return _scan_minors(m, all_minors(m.n), strict, cls, precision_max)


def check_tp_bruteforce(m: Matrix, cap: int = DEFAULT_BRUTEFORCE_CAP,
                        precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    return _bruteforce(m, False, PositivityClass.TP, cap, precision_max)


def check_stp_bruteforce(m: Matrix, cap: int = DEFAULT_BRUTEFORCE_CAP,
                         precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    return _bruteforce(m, True, PositivityClass.STP, cap, precision_max)


def check_stp_fekete(m: Matrix, precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """STP from the minors on consecutive rows and consecutive columns only.

    Positivity of these O(n^4) minors already forces every minor positive.
    A nonpositive one refutes STP; it says nothing about plain TP.
    """
    return _scan_minors(m, contiguous_minors(m.n), True, PositivityClass.STP, precision_max)


def check_hankel_stp(m: Matrix, precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """A Hankel matrix is STP iff it and its shifted matrix are both PD."""
    if not kernels.is_hankel(m):
        raise ValueError("Hankel structure required")
    cls = PositivityClass.HANKEL_STP
    outer = check_pd(m, precision_max)
    if outer.no:
        return Verdict(cls, Outcome.NO, witness={"kind": "hankel", "matrix": "full",
                                                 "inner": outer.witness}, precision=outer.precision)
    if m.n == 1:
        return outer.relabel(cls)
    inner = check_pd(kernels.hankel_shift(m), precision_max)
    bits = _max_precision(outer, inner)
    if inner.no:
        return Verdict(cls, Outcome.NO, witness={"kind": "hankel", "matrix": "shifted",
                                                 "inner": inner.witness}, precision=bits)
    if outer.yes and inner.yes:
        return Verdict(cls, Outcome.YES, {"kind": "hankel", "full": outer.certificate,
                                          "shifted": inner.certificate}, precision=bits)
    return Verdict(cls, Outcome.UNDETERMINED, {"kind": "hankel", "full": outer.outcome.value,
                                               "shifted": inner.outcome.value}, precision=bits)


# ---------------------------------------------------------------------------
# the main statements
# ---------------------------------------------------------------------------

def verify_proposition2(c: Matrix, precision_max: int = DEFAULT_PRECISION_CAP) -> Verdict:
    """PD test of ``[exp c_ij]`` for a certified nonsingular CPD matrix ``c``."""
    pre = check_cpd_nonsingular(c, precision_max=precision_max)
    if not pre.yes:
        raise ValueError("precondition unverified: matrix is not certified nonsingular cpd")
    return check_pd(kernels.entrywise_exp(c), precision_max)


def is_arithmetic(points: Sequence[Fraction]) -> bool:
    return len({b - a for a, b in zip(points, points[1:])}) <= 1


THEOREM_CLAIMS = ("infdiv", "pd", "tp")


@dataclass(frozen=True)
class TheoremReport:
    """Per-check verdicts for the power kernel on one point set.

    ``checks`` maps a check name to its verdict.  The theorem's claims are
    ``infdiv``, ``pd``, ``tp`` and every ``pd-power:<r>``; ``stp`` and
    ``hankel-stp`` record strict total positivity (empirical for points
    that are not equally spaced).
    """

    points: tuple[Fraction, ...]
    r_grid: tuple[Fraction, ...]
    checks: dict[str, Verdict]

    def claims(self) -> list[Verdict]:
        return [v for name, v in self.checks.items()
                if name in THEOREM_CLAIMS or name.startswith("pd-power:")]

    @property
    def falsified(self) -> bool:
        return any(v.no for v in self.claims())

    @property
    def certified(self) -> bool:
        return all(v.yes for v in self.claims())

    @property
    def status(self) -> str:
        if self.falsified:
            return "falsified"
        return "certified" if self.certified else "undetermined"

    @property
    def stp_refuted(self) -> bool:
        return any(self.checks[k].no for k in ("stp", "hankel-stp") if k in self.checks)

    def to_json(self) -> dict:
        return {
            "points": encode(self.points),
            "r_grid": encode(self.r_grid),
            "status": self.status,
            "stp_refuted": self.stp_refuted,
            "checks": {name: v.to_json() for name, v in self.checks.items()},
        }


def verify_theorem1(points, r_grid: Iterable = (Fraction(1, 2), 1, 2),
                    infdiv_grid: Iterable = DEFAULT_R_GRID,
                    bruteforce_cap: int = DEFAULT_BRUTEFORCE_CAP,
                    precision_max: int = DEFAULT_PRECISION_CAP) -> TheoremReport:
    """Run every claim about ``[(p_i+p_j)^(p_i+p_j)]`` on one point set."""
    p = kernels.parse_points(points)
    kernels.check_points(p)
    r_grid = tuple(as_fraction(r) for r in r_grid)
    b = kernels.power_kernel(p)
    checks: dict[str, Verdict] = {}
    checks["infdiv"] = check_infdiv(b, infdiv_grid, precision_max)
    checks["pd"] = check_pd(b, precision_max)
    if b.n <= bruteforce_cap:
        checks["stp"] = check_stp_bruteforce(b, bruteforce_cap, precision_max)
    else:
        checks["stp"] = check_stp_fekete(b, precision_max)
    if is_arithmetic(p):
        checks["hankel-stp"] = check_hankel_stp(b, precision_max)
    strict = [checks[k] for k in ("stp", "hankel-stp") if k in checks]
    proof = next((v for v in strict if v.yes), None)
    if proof is not None:
        checks["tp"] = Verdict(PositivityClass.TP, Outcome.YES,
                               {"kind": "implied", "by": proof.tested.value}, precision=proof.precision)
    elif b.n <= bruteforce_cap:
        checks["tp"] = check_tp_bruteforce(b, bruteforce_cap, precision_max)
    else:
        # STP refutations do not refute TP; without brute force TP stays open
        checks["tp"] = Verdict(PositivityClass.TP, Outcome.UNDETERMINED,
                               {"kind": "above-bruteforce-cap", "n": b.n})
    for r in r_grid:
        checks[f"pd-power:{format_fraction(r)}"] = check_pd(kernels.hadamard_power(b, r), precision_max)
    return TheoremReport(p, r_grid, checks)
