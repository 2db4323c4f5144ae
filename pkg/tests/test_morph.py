import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import ctx_of, polynomials
from slicegm.deriv import Derivation, apply
from slicegm.errors import NotInverse, NotTriangular
from slicegm.morph import (
    AutomorphismPair,
    Endomorphism,
    apply_endo,
    compose,
    compose_pairs,
    conjugate_derivation,
    invert_triangular,
)

C3 = ctx_of(3)
x, y, z = C3.gens()


def triangular_maps(ctx):
    """x_i -> c_i x_i + h_i(x_0..x_{i-1}) with nonzero c_i."""

    @st.composite
    def build(draw):
        images = []
        for i in range(ctx.n):
            c = draw(st.sampled_from([1, -1, 2, 3]))
            h = draw(polynomials(ctx, 3, 3))
            # keep only terms in earlier variables
            h = type(h)(ctx, {e: v for e, v in h.terms.items() if all(e[j] == 0 for j in range(i, ctx.n))})
            images.append(ctx.var(i).scale(c) + h)
        return Endomorphism(ctx, tuple(images))

    return build()


@settings(max_examples=50, deadline=None)
@given(triangular_maps(C3), polynomials(C3), polynomials(C3))
def test_endomorphism_is_ring_map(f, a, b):
    assert apply_endo(f, a * b) == apply_endo(f, a) * apply_endo(f, b)
    assert apply_endo(f, a + b) == apply_endo(f, a) + apply_endo(f, b)


@settings(max_examples=50, deadline=None)
@given(triangular_maps(C3), triangular_maps(C3), polynomials(C3))
def test_composition_is_functorial(f, g, p):
    assert apply_endo(compose(f, g), p) == apply_endo(f, apply_endo(g, p))


@settings(max_examples=50, deadline=None)
@given(triangular_maps(C3))
def test_triangular_inverse(f):
    pair = invert_triangular(f)  # raises NotInverse if wrong
    assert compose(pair.forward, pair.inverse).is_identity()


def test_reverse_triangular_order_detected():
    # h_i depending on later variables
    f = Endomorphism(C3, (x + y**2 * z, y + z**3, z))
    pair = invert_triangular(f)
    assert apply_endo(pair.inverse, apply_endo(f, x * y)) == x * y


def test_non_triangular_rejected():
    with pytest.raises(NotTriangular):
        invert_triangular(Endomorphism(C3, (x + y, y + x, z)))
    with pytest.raises(NotTriangular):
        invert_triangular(Endomorphism(C3, (x**2, y, z)))
    with pytest.raises(NotTriangular):
        invert_triangular(Endomorphism(C3, (x * y, y, z)))


def test_pair_checks_both_sides():
    with pytest.raises(NotInverse) as info:
        AutomorphismPair(Endomorphism(C3, (x, y + x, z)), Endomorphism.identity(C3))
    assert info.value.residual == x


def test_compose_pairs_and_inverted():
    f = invert_triangular(Endomorphism(C3, (x, y + x**2, z - x * y)))
    g = invert_triangular(Endomorphism(C3, (x + 1, y, 2 * z)))
    fg = compose_pairs(f, g)
    assert fg.inverted().inverted().forward == fg.forward
    p = x * y + z
    assert apply_endo(fg.inverse, apply_endo(fg.forward, p)) == p


def test_conjugation_of_running_example():
    # phi: y -> y + x z sends x d/dy + d/dz to d/dz
    D = Derivation(C3, (C3.zero(), x, C3.one()))
    phi = invert_triangular(Endomorphism(C3, (x, y + x * z, z)))
    assert conjugate_derivation(phi, D).images == (C3.zero(), C3.zero(), C3.one())


@settings(max_examples=30, deadline=None)
@given(triangular_maps(C3), polynomials(C3))
def test_conjugation_intertwines(f, p):
    D = Derivation(C3, (C3.zero(), x, y))
    phi = invert_triangular(f)
    E = conjugate_derivation(phi, D)
    # phi(D(p)) = E(phi(p))
    assert apply_endo(phi.forward, apply(D, p)) == apply(E, apply_endo(phi.forward, p))
