import random

import pytest

from cyclelift.errors import DegenerateVectorError, PrecisionExhaustedError
from cyclelift.padic import (
    LocalContext,
    epsilon,
    herm,
    ord_qform,
    qform,
    required_precision,
)

CTX = LocalContext(p=5, delta_sq=-2, precision=20)
CTX3 = LocalContext(p=3, delta_sq=-10, precision=20)


def random_vector(ctx, rng, span=4):
    while True:
        a0 = (rng.randrange(ctx.p**span), rng.randrange(ctx.p**span))
        a1 = (rng.randrange(ctx.p**span), rng.randrange(ctx.p**span))
        if any(x % ctx.p for x in a0 + a1):
            return ctx.vector_from_ints(a0, a1, rng.randrange(-2, 3))


class TestContext:
    def test_rejects_split_prime(self):
        with pytest.raises(ValueError):
            LocalContext(p=3, delta_sq=-2, precision=20)  # -2 is a square mod 3

    def test_rejects_even_prime_and_low_precision(self):
        with pytest.raises(ValueError):
            LocalContext(p=2, delta_sq=-2, precision=20)
        with pytest.raises(ValueError):
            LocalContext(p=5, delta_sq=-2, precision=4)

    def test_required_precision_policy(self):
        assert required_precision(3, 6) == 2 * 9 + 8
        assert required_precision(0, 0) == 8


class TestElem:
    def test_arithmetic_and_conjugation(self):
        d = CTX.delta()
        assert d.mul(d) == CTX.elem(-2)
        assert d.conj() == d.neg()
        e = CTX.elem(3, 4)
        assert e.mul(e.conj()) == CTX.elem(3 * 3 - (-2) * 4 * 4)

    def test_valuation(self):
        assert CTX.elem(25, 50).valuation() == 2
        assert CTX.elem(25, 1).valuation() == 0
        with pytest.raises(PrecisionExhaustedError):
            CTX.elem(0, 0).valuation()

    def test_unit_inverse(self):
        e = CTX.elem(3, 4)
        assert e.mul(e.unit_inverse()) == CTX.one()
        with pytest.raises(ValueError):
            CTX.elem(5, 10).unit_inverse()

    def test_divide_p_power_tracks_precision(self):
        e = CTX.elem(50, 25)
        q = e.divide_p_power(2)
        assert q.prec == CTX.precision - 2
        assert q == CTX.elem(2, 1, prec=q.prec)
        with pytest.raises(ValueError):
            CTX.elem(5, 1).divide_p_power(1)

    def test_vector_normalization_guards_starved_zero(self):
        # One coordinate vanishes at a tiny precision while the other
        # forces a large shift: the divisibility of the zero coordinate
        # is uncertifiable, so normalization must refuse.
        low_zero = CTX.elem(0, 0, prec=3)
        high = CTX.elem(5**6, 0)
        with pytest.raises(PrecisionExhaustedError):
            CTX.vector(low_zero, high)


class TestHerm:
    def test_gram_convention(self):
        v0 = CTX.vector_from_ints((1, 0), (0, 0))
        v1 = CTX.vector_from_ints((0, 0), (1, 0))
        val, exp = herm(v0, v1)
        assert (val, exp) == (CTX.delta(), 0)
        val, _ = herm(v1, v0)
        assert val == CTX.delta().neg()
        val, _ = herm(v0, v0)
        assert val.is_zero()

    def test_norm_of_delta_one(self):
        b = CTX.vector_from_ints((0, 1), (1, 0))
        val, exp = herm(b, b)
        assert exp == 0
        assert val == CTX.elem(-4)  # 2 * Delta

    def test_hermitian_symmetry_random(self):
        rng = random.Random(11)
        for ctx in (CTX, CTX3):
            for _ in range(500):
                u = random_vector(ctx, rng)
                w = random_vector(ctx, rng)
                vu, eu = herm(u, w)
                vw, ew = herm(w, u)
                assert eu == ew
                assert vw == vu.conj()


class TestQForm:
    def test_isotropic_basis_vector(self):
        b = CTX.vector_from_ints((1, 0), (0, 0))
        assert qform(b).is_isotropic
        with pytest.raises(DegenerateVectorError):
            ord_qform(b)

    def test_unit_norm_example(self):
        b = CTX.vector_from_ints((0, 1), (1, 0))
        q = qform(b)
        assert q.valuation == 0
        assert q.unit_residue == (-4) % 5

    def test_scaling_shifts_by_two(self):
        b = CTX.vector_from_ints((0, 1), (1, 0))
        assert qform(b.scale_p_power(1)).valuation == 2
        assert qform(b.scale_p_power(-1)).valuation == -2
        b2 = CTX.vector_from_ints((0, 5), (5, 0))
        assert qform(b2).valuation == 2

    def test_values_are_rational_always(self):
        rng = random.Random(23)
        for ctx in (CTX, CTX3):
            for _ in range(300):
                b = random_vector(ctx, rng)
                val, _ = herm(b, b)
                assert val.y % ctx.p ** val.prec == 0


class TestEpsilon:
    def test_fixes_rational_flips_delta(self):
        v0 = CTX.vector_from_ints((1, 0), (0, 0))
        assert epsilon(v0).a0 == v0.a0 and epsilon(v0).a1 == v0.a1
        b = CTX.vector_from_ints((0, 1), (1, 0))
        eb = epsilon(b)
        assert eb.a0 == CTX.elem(0, -1)
        assert eb.a1 == CTX.one()

    def test_negates_qform(self):
        b = CTX.vector_from_ints((0, 1), (1, 0))
        v1, e1 = herm(b, b)
        v2, e2 = herm(epsilon(b), epsilon(b))
        assert e1 == e2 and v2 == v1.neg()
        assert v2 == CTX.elem(4)

    def test_involution_and_semilinearity(self):
        rng = random.Random(31)
        for _ in range(100):
            b = random_vector(CTX, rng)
            bb = epsilon(epsilon(b))
            assert bb.a0 == b.a0 and bb.a1 == b.a1 and bb.denom_exp == b.denom_exp
            a = CTX.elem(rng.randrange(1, 100), rng.randrange(100))
            scaled = epsilon(b.scale_unit(a))
            direct = epsilon(b).scale_unit(a.conj())
            assert scaled.a0 == direct.a0 and scaled.a1 == direct.a1
            q1 = qform(b)
            q2 = qform(epsilon(b))
            assert q1.valuation == q2.valuation
