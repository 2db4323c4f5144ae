"""A small Buchberger engine for working in quotients k[x]/I.

Plain Buchberger with first-in-first-out pair selection. Desk-scale ideals
only (a few generators of low degree); determinism beats speed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .deriv import Derivation, apply
from .errors import InternalVerificationError, SliceGmError
from .ring import Polynomial, VarContext, monomials_up_to, nullspace_sparse


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grlex"
    priority: tuple[int, ...] | None = None
    """variable indices from most to least significant; None means natural order"""

    def __post_init__(self):
        if self.kind not in ("grlex", "lex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, exps):
        perm = exps if self.priority is None else tuple(exps[i] for i in self.priority)
        if self.kind == "grlex":
            return (sum(exps), perm)
        return perm


GRLEX = MonomialOrder("grlex")


def leading(p: Polynomial, order: MonomialOrder) -> tuple[tuple, Fraction]:
    exps = max(p.terms, key=order.key)
    return exps, p.coeff(exps)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono(ctx, exps, c) -> Polynomial:
    return Polynomial(ctx, {tuple(exps): c})


@dataclass(frozen=True)
class GroebnerBasis:
    order: MonomialOrder
    generators: tuple[Polynomial, ...]
    ctx: VarContext

    def leading_monomials(self) -> list[tuple]:
        return [leading(g, self.order)[0] for g in self.generators]

    def is_unit(self) -> bool:
        return any(g.is_constant() and g for g in self.generators)


def _reduce(p: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder) -> Polynomial:
    ctx = p.ctx
    leads = [leading(g, order) for g in basis]
    remainder = {}
    while p:
        exps, c = leading(p, order)
        for g, (gexps, gc) in zip(basis, leads):
            if _divides(gexps, exps):
                shift = tuple(a - b for a, b in zip(exps, gexps))
                p = p - g * _mono(ctx, shift, c / gc)
                break
        else:
            remainder[exps] = c
            p = p - _mono(ctx, exps, c)
    return Polynomial(ctx, remainder)


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    (fe, fc), (ge, gc) = leading(f, order), leading(g, order)
    lcm = tuple(max(a, b) for a, b in zip(fe, ge))
    fm = _mono(f.ctx, tuple(a - b for a, b in zip(lcm, fe)), 1 / fc)
    gm = _mono(f.ctx, tuple(a - b for a, b in zip(lcm, ge)), 1 / gc)
    return f * fm - g * gm


def _monic(p: Polynomial, order: MonomialOrder) -> Polynomial:
    return p.scale(1 / leading(p, order)[1])


def buchberger(gens: Sequence[Polynomial], order: MonomialOrder = GRLEX) -> GroebnerBasis:
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    ctx = gens[0].ctx
    basis = [_monic(g, order) for g in gens if g]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        i, j = pairs.pop(0)
        ei, ej = leading(basis[i], order)[0], leading(basis[j], order)[0]
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue  # coprime leading monomials: S-polynomial reduces to 0
        r = _reduce(s_polynomial(basis[i], basis[j], order), basis, order)
        if r:
            basis.append(_monic(r, order))
            k = len(basis) - 1
            pairs.extend((m, k) for m in range(k))
    return GroebnerBasis(order, tuple(_autoreduce(basis, order)), ctx)


def _autoreduce(basis: list[Polynomial], order: MonomialOrder) -> list[Polynomial]:
    # drop elements whose leading monomial is divisible by another's
    leads = [leading(g, order)[0] for g in basis]
    keep = []
    for i, g in enumerate(basis):
        redundant = any(
            j != i and _divides(leads[j], leads[i]) and (leads[j] != leads[i] or j < i) for j in range(len(basis))
        )
        if not redundant:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1 :]
        out.append(_monic(_reduce(g, others, order), order) if others else g)
    return sorted(out, key=lambda g: order.key(leading(g, order)[0]))


def normal_form(p: Polynomial, G: GroebnerBasis) -> Polynomial:
    if not G.generators:
        return p
    return _reduce(p, G.generators, G.order)


def s_pairs_reduce_to_zero(G: GroebnerBasis) -> bool:
    gs = G.generators
    return all(
        not normal_form(s_polynomial(gs[i], gs[j], G.order), G) for j in range(len(gs)) for i in range(j)
    )


def ideal_from(gens: Sequence[Polynomial], order: MonomialOrder = GRLEX, ctx: VarContext | None = None) -> GroebnerBasis:
    """Like :func:`buchberger` but accepts an all-zero (or empty) generating set."""
    nonzero = [g for g in gens if g]
    if not nonzero:
        if ctx is None:
            if not gens:
                raise ValueError("context needed for an empty ideal")
            ctx = gens[0].ctx
        return GroebnerBasis(order, (), ctx)
    return buchberger(nonzero, order)


@dataclass(frozen=True)
class DescendCheck:
    ok: bool
    index: int | None = None
    residual: Polynomial | None = None

    def __bool__(self):
        return self.ok


def derivation_descends(D: Derivation, G: GroebnerBasis) -> DescendCheck:
    """D(I) ⊆ I, tested on the generators of I."""
    for i, g in enumerate(G.generators):
        r = normal_form(apply(D, g), G)
        if r:
            return DescendCheck(False, i, r)
    return DescendCheck(True)


class DoesNotDescend(SliceGmError):
    def __init__(self, check: DescendCheck):
        self.check = check
        super().__init__(f"derivation does not preserve the ideal: residual {check.residual}")


def standard_monomials(G: GroebnerBasis, d: int) -> list[tuple]:
    leads = G.leading_monomials()
    return [e for e in monomials_up_to(G.ctx.n, d) if not any(_divides(l, e) for l in leads)]


def quotient_kernel_basis(D: Derivation, G: GroebnerBasis, d: int) -> list[Polynomial]:
    """Basis of {p in span(standard monomials of degree <= d) : NF(D(p)) = 0}."""
    check = derivation_descends(D, G)
    if not check:
        raise DoesNotDescend(check)
    ctx = D.ctx
    cols = standard_monomials(G, d)
    rows: dict[tuple, dict[int, Fraction]] = {}
    for j, exps in enumerate(cols):
        image = normal_form(apply(D, Polynomial.monomial(ctx, exps)), G)
        for out, c in image.items():
            rows.setdefault(out, {})[j] = c
    basis = []
    for vec in nullspace_sparse([rows[k] for k in sorted(rows)], len(cols)):
        basis.append(Polynomial(ctx, {e: c for e, c in zip(cols, vec) if c}))
    for p in basis:
        r = normal_form(apply(D, p), G)
        if r:
            raise InternalVerificationError(f"quotient kernel element {p} not annihilated", r)
    return basis


def quotient_kernel_intersection(Ds: Sequence[Derivation], G: GroebnerBasis, d: int) -> list[Polynomial]:
    """Common kernel of several descending derivations on k[x]/I, degree <= d."""
    for D in Ds:
        check = derivation_descends(D, G)
        if not check:
            raise DoesNotDescend(check)
    ctx = G.ctx
    cols = standard_monomials(G, d)
    rows: dict[tuple, dict[int, Fraction]] = {}
    for k, D in enumerate(Ds):
        for j, exps in enumerate(cols):
            image = normal_form(apply(D, Polynomial.monomial(ctx, exps)), G)
            for out, c in image.items():
                rows.setdefault((k, out), {})[j] = c
    basis = [
        Polynomial(ctx, {e: c for e, c in zip(cols, vec) if c})
        for vec in nullspace_sparse([rows[k] for k in sorted(rows)], len(cols))
    ]
    for p in basis:
        for D in Ds:
            r = normal_form(apply(D, p), G)
            if r:
                raise InternalVerificationError(f"quotient kernel element {p} not annihilated", r)
    return basis
