from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import ctx_of, polynomials, to_sympy
from slicegm.deriv import (
    Derivation,
    apply,
    check_semisimple_on,
    eigenvalue,
    is_lnd,
    is_nice,
    iterate,
    nilpotency_index,
    verify_slice,
)
from slicegm.errors import ContextMismatch

C3 = ctx_of(3)
x, y, z = C3.gens()
NICE = Derivation(C3, (C3.zero(), x, C3.one()))  # x d/dy + d/dz


def derivations(ctx, max_degree=2):
    return st.tuples(*[polynomials(ctx, max_degree, 3) for _ in range(ctx.n)]).map(lambda imgs: Derivation(ctx, imgs))


@settings(max_examples=60, deadline=None)
@given(derivations(C3), polynomials(C3), polynomials(C3))
def test_leibniz_rule(D, a, b):
    assert apply(D, a * b) == apply(D, a) * b + a * apply(D, b)
    assert apply(D, a + b) == apply(D, a) + apply(D, b)


@settings(max_examples=40, deadline=None)
@given(derivations(C3), polynomials(C3))
def test_apply_matches_sympy_chain_rule(D, p):
    syms = sympy.symbols(C3.names)
    expected = sum(to_sympy(img) * sympy.diff(to_sympy(p), s) for img, s in zip(D.images, syms))
    assert to_sympy(apply(D, p)) == sympy.expand(expected)


def test_arity_and_context_checked():
    with pytest.raises(ContextMismatch):
        Derivation(C3, (x, y))
    with pytest.raises(ContextMismatch):
        apply(NICE, ctx_of(2).var(0))


class TestNilpotency:
    def test_running_example(self):
        check = is_lnd(NICE)
        assert check.confirmed
        assert check.degrees == (1, 2, 2)
        assert nilpotency_index(NICE, y * z, 10) == 3  # D(yz) = xz + y, D^2 = 2x

    def test_euler_is_unknown(self):
        D = Derivation(ctx_of(1), (ctx_of(1).var(0),))
        check = is_lnd(D, bound=20)
        assert not check.confirmed and check.exceeded_bound and check.degrees is None

    def test_iterate(self):
        assert iterate(NICE, y, 1) == x
        assert iterate(NICE, z**3, 3) == C3.const(6)
        with pytest.raises(ValueError):
            iterate(NICE, y, -1)

    def test_bound_too_small_gives_unknown(self):
        D = Derivation(C3, (C3.zero(), x, y))  # D^3(z) = 0
        assert is_lnd(D, bound=3).confirmed
        assert not is_lnd(D, bound=2).confirmed


class TestNiceAndSlice:
    def test_nice(self):
        assert is_nice(NICE)

    def test_not_nice(self):
        D = Derivation(C3, (C3.zero(), x, y))
        check = is_nice(D)
        assert not check
        assert check.index == 2 and check.value == x

    def test_slice(self):
        assert verify_slice(NICE, z)
        assert verify_slice(NICE, z + x**5)
        bad = verify_slice(NICE, y)
        assert not bad and bad.residual == x - 1


class TestEigenvalues:
    def test_eigenvalues_of_s_times_d(self):
        # z * (x d/dy + d/dz): x is a zero-eigenvector, z^m has eigenvalue m
        sD = NICE.times(z)
        assert eigenvalue(sD, x) == 0
        assert eigenvalue(sD, z**3) == 3
        assert eigenvalue(sD, y) is None
        assert check_semisimple_on(sD, [x * z**2, y - x * z]) == [Fraction(2), Fraction(0)]

    def test_lift_kills_new_variables(self):
        big = C3.extend("w")
        L = NICE.lift(big)
        assert L.images[3].is_zero()
        assert apply(L, big.var(1) * big.var(3)) == big.var(0) * big.var(3)
