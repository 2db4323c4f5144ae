from itertools import product
from math import comb

import pytest
import sympy

from gen import ctx_of, to_sympy
from slicegm.deriv import Derivation, apply
from slicegm.errors import ContextMismatch, EmptyFamily
from slicegm.kernel import (
    ML_CAVEAT,
    in_span,
    kernel_basis,
    kernel_intersection,
    kernel_system,
    ml_obstruction_report,
    span_rank,
)
from slicegm.linearize import wang_normal_form
from slicegm.ring import monomials_up_to

C3 = ctx_of(3)
x, y, z = C3.gens()


def sympy_kernel_dim(D, d):
    """Dimension of the degree <= d kernel via a generic polynomial and sympy.linsolve."""
    syms = sympy.symbols(D.ctx.names)
    mons = monomials_up_to(D.ctx.n, d)
    cs = sympy.symbols(f"c0:{len(mons)}")
    generic = sum(c * sympy.prod([s**e for s, e in zip(syms, m)]) for c, m in zip(cs, mons))
    image = sympy.expand(sum(to_sympy(img) * sympy.diff(generic, s) for img, s in zip(D.images, syms)))
    eqs = sympy.Poly(image, *syms).coeffs() if image != 0 else []
    if not eqs:
        return len(mons)
    M, _ = sympy.linear_eq_to_matrix(eqs, cs)
    return len(mons) - M.rank()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("d", [0, 1, 3, 6])
def test_partial_kernel_dimension(n, d):
    ctx = ctx_of(n)
    basis = kernel_basis(Derivation.partial(ctx, n - 1), d)
    assert len(basis) == comb(n - 1 + d, d)
    assert all(not p.involves(n - 1) for p in basis)


@pytest.mark.parametrize(
    "images",
    [("0", "x", "1"), ("0", "x^2", "2*y"), ("y", "z", "0"), ("x", "y", "z")],
)
def test_dimension_against_sympy(images):
    from slicegm.parse import parse_polynomial

    D = Derivation(C3, tuple(parse_polynomial(t, C3) for t in images))
    for d in (1, 2, 3):
        assert len(kernel_basis(D, d)) == sympy_kernel_dim(D, d)


def test_wang_x_1_degree_four_span():
    w = wang_normal_form(x, C3.one())
    u = y - x * z
    enumerated = [x**i * u**j for i, j in product(range(5), range(3)) if i + 2 * j <= 4]
    basis = kernel_basis(w.derivation, 4)
    assert len(basis) == span_rank(enumerated) == len(enumerated)
    assert all(in_span(enumerated, b) for b in basis)
    assert all(in_span(basis, e) for e in enumerated)


def test_wang_x_1_degree_two():
    basis = kernel_basis(wang_normal_form(x, C3.one()).derivation, 2)
    expected = [C3.one(), x, x**2, y - x * z]
    assert span_rank(basis + expected) == len(basis) == 4


def test_all_partials_intersect_in_constants():
    for n in (1, 2, 3, 4):
        ctx = ctx_of(n)
        basis = kernel_intersection([Derivation.partial(ctx, i) for i in range(n)], 4)
        assert basis == [ctx.one()]


def test_ml_report():
    rep = ml_obstruction_report([Derivation.partial(C3, i) for i in range(3)], 3)
    assert rep.witness is None and not rep.has_witness
    assert rep.caveat == ML_CAVEAT and "never a proof" in rep.caveat
    rep = ml_obstruction_report([Derivation.partial(C3, 1), Derivation.partial(C3, 2)], 2)
    assert rep.witness == x


def test_basis_elements_are_annihilated():
    D = Derivation(C3, (C3.zero(), x**2, 2 * y))
    for p in kernel_basis(D, 4):
        assert apply(D, p).is_zero()


def test_system_shape_and_errors():
    sys_ = kernel_system([Derivation.partial(C3, 0)], 2)
    assert sys_.shape[1] == 10
    with pytest.raises(EmptyFamily):
        kernel_system([], 2)
    with pytest.raises(ContextMismatch):
        kernel_system([Derivation.partial(C3, 0), Derivation.partial(ctx_of(2), 0)], 2)
    with pytest.raises(ValueError):
        kernel_system([Derivation.partial(C3, 0)], -1)


def test_in_span():
    assert in_span([x, y], x.scale(3) - y)
    assert not in_span([x, y], z)
    assert in_span([], C3.zero())
