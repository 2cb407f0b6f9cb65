"""Shared assertions for the positivity and acceptance tests."""

from fractions import Fraction

import mpmath
from mpmath import mp

from oracles import mp_matrix, witness_value
from poslab.positivity import CompressionBasis, PositivityClass

# witness values for these classes must be strictly negative; the others only nonpositive
STRICT_WITNESS = {PositivityClass.PSD, PositivityClass.CPD, PositivityClass.CND,
                  PositivityClass.TP, PositivityClass.INFDIV}


def assert_valid_witness(m, verdict):
    assert verdict.no and verdict.witness
    with mpmath.workdps(80):
        a = mp_matrix(m)
        if verdict.tested is PositivityClass.CND:
            a = -a
        value = witness_value(a, verdict.witness)
        scale = max(abs(x) for x in a) or 1
        if verdict.tested in STRICT_WITNESS:
            assert value < 0
        else:
            assert value <= scale * mp.mpf(10) ** -60


def random_h1_basis(rng, n):
    while True:
        vecs = []
        for _ in range(n - 1):
            v = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n - 1)]
            v.append(-sum(v))
            vecs.append(v)
        try:
            return CompressionBasis(n, tuple(map(tuple, vecs)))
        except ValueError:
            continue
