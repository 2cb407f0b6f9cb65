import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from oracles import all_minor_values, cofactor_det
from poslab import kernels
from poslab.kernels import hadamard_power
from poslab.numerics import ExactMatrix, IntervalMatrix, Power
from poslab.positivity import (
    CompressionBasis,
    Outcome,
    check_cnd,
    check_cpd,
    check_cpd_nonsingular,
    check_hankel_stp,
    check_infdiv,
    check_pd,
    check_psd,
    check_stp_bruteforce,
    check_stp_fekete,
    check_tp_bruteforce,
    compress_to_H1,
    verify_proposition2,
    verify_theorem1,
)
from support import assert_valid_witness, random_h1_basis

YES, NO, UNDETERMINED = Outcome.YES, Outcome.NO, Outcome.UNDETERMINED


# -- PSD / PD ---------------------------------------------------------------

def test_cauchy_is_pd():
    assert check_pd(kernels.cauchy([1, 2], 0)).outcome is YES


def test_ones_psd_not_pd():
    m = kernels.ones(3)
    assert check_psd(m).outcome is YES
    v = check_pd(m)
    assert v.outcome is NO
    assert v.witness["vector"] == ["1", "-1", "0"]
    assert_valid_witness(m, v)


def test_indefinite_2x2_psd_witness():
    m = ExactMatrix.from_rows([[1, 2], [2, 1]])
    v = check_psd(m)
    assert v.outcome is NO
    assert v.witness["minor"]["value"] == "-3"
    assert_valid_witness(m, v)


def test_pd_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetry required"):
        check_pd(ExactMatrix.from_rows([[1, 2], [0, 1]]))


def test_interval_psd_refutation_and_certificate():
    sqrt_m = hadamard_power(ExactMatrix.from_rows([[1, 1, 0], [1, 2, 1], [0, 1, 1]]), "1/2")
    v = check_psd(sqrt_m)
    assert v.outcome is NO and v.precision == 64
    assert_valid_witness(sqrt_m, v)
    b = kernels.power_kernel(["0.3", "1.7", "2.9"])
    assert check_psd(b).outcome is YES


def test_interval_pd_stays_open_on_singular_transcendental():
    # exp(3 log 3) is exactly 27, but no enclosure can tell
    from poslab.numerics import Exp, LogPower
    m = IntervalMatrix.from_entries([[1, 3], [3, Exp(LogPower(Fraction(3), Fraction(2)))]])
    assert m.entries[1][1] != 9
    frozen = IntervalMatrix(m.values, m.precision, entries=None, rebuild=lambda bits: IntervalMatrix.from_entries(
        [[1, 3], [3, _opaque_nine()]], bits))
    v = check_pd(frozen, precision_max=512)
    assert v.outcome is UNDETERMINED and v.precision == 512


class _Opaque(Power):
    """9 written as exp(2 log 3) without the symbolic shortcut."""

    def exact(self):
        return None

    def enclose(self):
        from mpmath import iv
        return iv.exp(2 * iv.log(iv.mpf(3)))


def _opaque_nine():
    return _Opaque(Fraction(3), Fraction(2))


# -- conditional positivity -------------------------------------------------

def test_compress_sum_matrix_is_zero():
    assert compress_to_H1(kernels.sum_matrix([1, 2, 3])) == ExactMatrix.from_rows([[0, 0], [0, 0]])


def test_compress_ones_is_zero():
    assert compress_to_H1(kernels.ones(3)) == ExactMatrix.from_rows([[0, 0], [0, 0]])


def test_compress_log_kernel():
    g = compress_to_H1(kernels.log_kernel(["1/2", "3/2"]))
    with mpmath.workprec(300):
        expected = 3 * mp.log(3) - 4 * mp.log(2)
        assert g[0, 0].a <= expected <= g[0, 0].b
    assert abs(float(g[0, 0].mid) - 0.5232) < 1e-4
    assert check_pd(g).outcome is YES


def test_compress_single_point_is_empty():
    g = compress_to_H1(kernels.sum_matrix([3]))
    assert g.n == 0
    assert check_cpd(kernels.sum_matrix([3])).outcome is YES


def test_e_minus_lambda_cauchy_is_cnd():
    m = kernels.ones(2) - kernels.cauchy([1, 2], 1).scale(1)
    assert check_cnd(m).outcome is YES


@pytest.mark.parametrize("points", [[1, 2, 3], ["1/3", "2.5", 7, 11], ["0.1"]])
def test_sum_matrix_cpd(points):
    v = check_cpd(kernels.sum_matrix(points))
    assert v.outcome is YES and v.precision is None


def test_log_kernel_cpd_nonsingular():
    assert check_cpd_nonsingular(kernels.log_kernel(["1/2", "3/2"])).outcome is YES


def test_sum_matrix_cpd_but_singular_on_h1():
    m = kernels.sum_matrix([1, 2, 3])
    v = check_cpd_nonsingular(m)
    assert v.outcome is NO
    assert_valid_witness(m, v)


def test_cnd_refutation_witness():
    m = kernels.cauchy([1, 2, 5], 0)
    v = check_cnd(m)
    assert v.outcome is NO
    assert_valid_witness(m, v)


def test_basis_rejects_bad_vectors():
    with pytest.raises(ValueError):
        CompressionBasis(3, ((1, 0, 0), (0, 1, -1)))
    with pytest.raises(ValueError):
        CompressionBasis(3, ((1, -1, 0), (2, -2, 0)))


@pytest.mark.parametrize("seed", range(5))
def test_cpd_verdict_is_basis_invariant(seed):
    rng = random.Random(seed)
    pts = kernels.random_points(rng, 4)
    cases = [
        kernels.sum_matrix(pts),
        kernels.log_kernel(pts),
        -kernels.cauchy(pts, 1),
        kernels.cauchy(pts, 0),
        ExactMatrix.from_rows([[1, 2, 0, 1], [2, 1, 3, 0], [0, 3, 1, 1], [1, 0, 1, 2]]),
    ]
    for m in cases:
        basis = random_h1_basis(rng, m.n)
        for check in (check_cpd, check_cpd_nonsingular):
            a, b = check(m), check(m, basis)
            assert a.outcome is b.outcome, (check.__name__, m)
            if b.no:
                assert_valid_witness(m, b)


# -- infinite divisibility --------------------------------------------------

def test_small_b_is_infinitely_divisible():
    assert check_infdiv(kernels.power_kernel(["1/2", "3/2"])).outcome is YES


def test_ones_infinitely_divisible():
    v = check_infdiv(kernels.ones(3))
    assert v.outcome is YES and v.precision is None


PERTURBED = ExactMatrix.from_rows([[1, 1, "1/100"], [1, 2, 1], ["1/100", 1, 1]])


def test_perturbed_matrix_sqrt_determinant_negative():
    # direct expansion: det = 0.99*sqrt(2) - 1.8
    with mpmath.workdps(40):
        a = mp.matrix([[1, 1, mp.mpf("0.1")], [1, mp.sqrt(2), 1], [mp.mpf("0.1"), 1, 1]])
        assert mp.almosteq(mp.det(a), mp.mpf("0.99") * mp.sqrt(2) - mp.mpf("1.8"))
        assert mp.det(a) < -0.39


def test_perturbed_matrix_is_pd_but_not_infdiv():
    assert check_pd(PERTURBED).outcome is YES
    v = check_infdiv(PERTURBED, r_grid=["1/2"])
    assert v.outcome is NO and v.witness["r"] == "1/2"
    assert_valid_witness(PERTURBED, v)
    assert check_infdiv(PERTURBED).outcome is NO


def test_infdiv_rejects_nonpositive():
    with pytest.raises(ValueError):
        check_infdiv(ExactMatrix.from_rows([[1, 0], [0, 1]]))


def test_infdiv_log_refutation_without_sampled_power():
    # PSD at every sampled power in the grid {1} but the log matrix is not cpd
    v = check_infdiv(PERTURBED, r_grid=[1])
    assert v.outcome is NO and v.witness["kind"] == "log-cpd"
    assert_valid_witness(PERTURBED, v)


# -- total positivity -------------------------------------------------------

def test_a2_stp_minor_list():
    v = check_stp_bruteforce(kernels.matrix_a(2))
    assert v.outcome is YES
    assert sorted(int(x[2]) for x in v.certificate["minors"]) == [1, 4, 4, 11, 27]


def test_indefinite_not_tp():
    m = ExactMatrix.from_rows([[1, 2], [2, 1]])
    v = check_tp_bruteforce(m)
    assert v.outcome is NO and v.witness["value"] == "-3"


def test_min_matrix_tp_not_stp():
    m = kernels.min_matrix(3)
    assert check_tp_bruteforce(m).outcome is YES
    v = check_stp_bruteforce(m)
    assert v.outcome is NO
    assert_valid_witness(m, v)


def test_bruteforce_cap():
    with pytest.raises(ValueError, match="brute force capped"):
        check_tp_bruteforce(kernels.matrix_a(7))
    assert check_tp_bruteforce(kernels.matrix_a(7), cap=7).outcome is YES


def test_fekete_examples():
    assert check_stp_fekete(kernels.matrix_a(3)).outcome is YES
    assert check_stp_bruteforce(kernels.matrix_a(3)).outcome is YES
    v = check_stp_fekete(kernels.ones(2))
    assert v.outcome is NO and v.witness["value"] == "0"
    assert check_stp_fekete(ExactMatrix.from_rows([[1, 1], [1, 2]])).outcome is YES


def test_interval_stp_bruteforce():
    b = kernels.power_kernel(["0.3", "1.7", "2.9", "3.1"])
    v = check_stp_bruteforce(b)
    assert v.outcome is YES and v.certificate["count"] == 69


@st.composite
def positive_symmetric(draw):
    n = draw(st.integers(1, 4))
    kind = draw(st.sampled_from(["random", "cauchy", "power"]))
    if kind == "cauchy":
        pts = sorted(draw(st.sets(st.integers(1, 30), min_size=n, max_size=n)))
        return kernels.cauchy(pts, draw(st.integers(0, 3)))
    if kind == "power":
        pts = sorted(draw(st.sets(st.integers(1, 12), min_size=n, max_size=n)))
        return kernels.power_kernel([Fraction(p, 2) for p in pts])
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = Fraction(draw(st.integers(1, 20)), draw(st.integers(1, 5)))
    return ExactMatrix.from_rows(m)


@settings(max_examples=100, deadline=None)
@given(positive_symmetric())
def test_fekete_agrees_with_bruteforce(m):
    fek, brute = check_stp_fekete(m), check_stp_bruteforce(m)
    assert fek.outcome is brute.outcome
    if isinstance(m, ExactMatrix):
        assert brute.yes == all(v > 0 for _, _, v in all_minor_values(m.rows()))


def test_hankel_stp_examples():
    v = check_hankel_stp(kernels.matrix_a(3))
    assert v.outcome is YES
    assert cofactor_det([[4, 27], [27, 256]]) == 295
    assert check_hankel_stp(kernels.hilbert(4)).outcome is YES
    ones2 = kernels.ones(2)
    v = check_hankel_stp(ones2)
    assert v.outcome is NO
    assert_valid_witness(ones2, v)


def test_hankel_stp_rejects_non_hankel():
    with pytest.raises(ValueError, match="Hankel structure required"):
        check_hankel_stp(kernels.min_matrix(3))


def test_hankel_stp_shifted_failure():
    # the moment matrix of the point mass at 0: PD fails only after the shift
    m = ExactMatrix.from_rows([[1, 0], [0, 1]])
    v = check_hankel_stp(m)
    assert v.outcome is NO and v.witness["matrix"] == "shifted"
    assert_valid_witness(m, v)


# -- proposition and theorem -------------------------------------------------

def test_proposition2_examples():
    v = verify_proposition2(kernels.log_kernel(["1/2", "3/2"]))
    assert v.outcome is YES
    assert verify_proposition2(ExactMatrix.from_rows([[1, 0], [0, 1]])).outcome is YES
    assert verify_proposition2(ExactMatrix.from_rows([[0]])).outcome is YES


def test_proposition2_precondition():
    with pytest.raises(ValueError, match="precondition"):
        verify_proposition2(kernels.sum_matrix([1, 2, 3]))


@pytest.mark.parametrize("points,grid", [
    (["1/2", "3/2", "5/2"], ["1/2", 1, 2]),
    ([1], [1, "1/3"]),
    (["0.3", "1.7", "2.9"], [1]),
])
def test_theorem_instances(points, grid):
    rep = verify_theorem1(points, grid)
    assert rep.status == "certified"
    assert not rep.falsified and not rep.stp_refuted
    for name, v in rep.checks.items():
        assert v.outcome is YES, name


def test_theorem_above_bruteforce_cap_uses_fekete():
    rep = verify_theorem1(["0.3", "1.7", "2.9", "3.1"], [1], bruteforce_cap=3)
    assert rep.checks["stp"].outcome is YES
    assert rep.checks["tp"].certificate == {"kind": "implied", "by": "stp"}


# -- lattice and congruence --------------------------------------------------

LATTICE_CASES = [
    kernels.matrix_a(4), kernels.hilbert(4), kernels.min_matrix(4), kernels.pascal(4),
    kernels.ones(3), kernels.sum_matrix([1, 2, 3]), kernels.cauchy([1, 2, 4], 1),
    ExactMatrix.from_rows([[1, 2], [2, 1]]), ExactMatrix.from_rows([[2, 1, 0], [1, 2, 1], [0, 1, 2]]),
    kernels.power_kernel(["0.3", "1.7", "2.9"]), kernels.log_kernel(["0.3", "1.7", "2.9"]),
    PERTURBED,
]


@pytest.mark.parametrize("m", LATTICE_CASES, ids=range(len(LATTICE_CASES)))
def test_class_lattice(m):
    pd, psd, cpd = check_pd(m), check_psd(m), check_cpd(m)
    if pd.yes:
        assert not psd.no
    if psd.yes:
        assert not cpd.no
    stp, tp = check_stp_bruteforce(m), check_tp_bruteforce(m)
    if stp.yes:
        assert tp.yes
    for v in (pd, psd, cpd, stp, tp):
        if v.no:
            assert_valid_witness(m, v)


@pytest.mark.parametrize("seed", range(4))
def test_diagonal_congruence_invariance(seed):
    rng = random.Random(seed)
    for m in LATTICE_CASES:
        d = [Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(m.n)]
        xmx = kernels.diagonal_congruence(m, d)
        assert check_pd(xmx).outcome is check_pd(m).outcome
        assert check_stp_bruteforce(xmx).outcome is check_stp_bruteforce(m).outcome
