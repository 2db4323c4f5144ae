"""Ring endomorphisms, certified automorphisms, and conjugation of derivations.

Inverting a general polynomial map is out of reach here, so automorphisms
always travel with an inverse that has been checked by composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import Sequence

from .deriv import Derivation, apply
from .errors import ContextMismatch, NotInverse, NotTriangular
from .ring import Polynomial, VarContext


@dataclass(frozen=True)
class Endomorphism:
    ctx: VarContext
    images: tuple[Polynomial, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.ctx.n:
            raise ContextMismatch(f"endomorphism needs {self.ctx.n} images, got {len(images)}")
        for img in images:
            if img.ctx != self.ctx:
                raise ContextMismatch(f"image in {img.ctx}, expected {self.ctx}")

    @classmethod
    def identity(cls, ctx: VarContext) -> "Endomorphism":
        return cls(ctx, ctx.gens())

    @classmethod
    def replacing(cls, ctx: VarContext, changes: dict[int, Polynomial]) -> "Endomorphism":
        """Identity except on the listed generators."""
        return cls(ctx, tuple(changes.get(i, x) for i, x in enumerate(ctx.gens())))

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_endo(self, p)

    def is_identity(self) -> bool:
        return self.images == self.ctx.gens()

    def __str__(self):
        return "(" + ", ".join(f"{v} -> {img}" for v, img in zip(self.ctx.names, self.images)) + ")"


def apply_endo(f: Endomorphism, p: Polynomial) -> Polynomial:
    if p.ctx != f.ctx:
        raise ContextMismatch(f"polynomial in {p.ctx}, map on {f.ctx}")
    return p.substitute(f.images, f.ctx)


def compose(f: Endomorphism, g: Endomorphism) -> Endomorphism:
    """f∘g, i.e. x_i -> f(g(x_i))."""
    if f.ctx != g.ctx:
        raise ContextMismatch(f"{f.ctx} vs {g.ctx}")
    return Endomorphism(f.ctx, tuple(apply_endo(f, img) for img in g.images))


@dataclass(frozen=True)
class AutomorphismPair:
    forward: Endomorphism
    inverse: Endomorphism

    def __post_init__(self):
        _check_inverse(self.forward, self.inverse)

    @property
    def ctx(self) -> VarContext:
        return self.forward.ctx

    @classmethod
    def identity(cls, ctx: VarContext) -> "AutomorphismPair":
        ident = Endomorphism.identity(ctx)
        return cls(ident, ident)

    def inverted(self) -> "AutomorphismPair":
        return AutomorphismPair(self.inverse, self.forward)

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_endo(self.forward, p)


def _check_inverse(f: Endomorphism, finv: Endomorphism) -> None:
    if f.ctx != finv.ctx:
        raise ContextMismatch(f"{f.ctx} vs {finv.ctx}")
    gens = f.ctx.gens()
    for side, comp in (("forward∘inverse", compose(f, finv)), ("inverse∘forward", compose(finv, f))):
        for i, (img, x) in enumerate(zip(comp.images, gens)):
            if img != x:
                raise NotInverse(i, img - x, side)


def verify_automorphism(f: Endomorphism, finv: Endomorphism) -> AutomorphismPair:
    return AutomorphismPair(f, finv)


def compose_pairs(f: AutomorphismPair, g: AutomorphismPair) -> AutomorphismPair:
    return AutomorphismPair(compose(f.forward, g.forward), compose(g.inverse, f.inverse))


def _triangular_parts(f: Endomorphism) -> list[tuple[Fraction, Polynomial, set[int]]]:
    parts = []
    for i, img in enumerate(f.images):
        x = f.ctx.var(i)
        by_power = img.coefficients_in(i)
        if set(by_power) - {0, 1} or 1 not in by_power:
            raise NotTriangular(i, f"image must be c*{f.ctx.names[i]} + (terms free of it)")
        lin = by_power[1]
        if not lin.is_constant():
            raise NotTriangular(i, f"coefficient of {f.ctx.names[i]} is not a constant")
        c = lin.constant_value()
        h = img - x.scale(c)
        parts.append((c, h, h.variables()))
    return parts


def invert_triangular(f: Endomorphism) -> AutomorphismPair:
    """Invert x_i -> c_i x_i + h_i by back-substitution.

    Works for any variable order in which each h_i depends only on
    variables processed before x_i, so both the x_n-last and the
    x_1-first conventions are detected automatically.
    """
    parts = _triangular_parts(f)
    graph = {i: deps for i, (_, _, deps) in enumerate(parts)}
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise NotTriangular(exc.args[1][0], "dependency cycle between generators") from None
    ctx = f.ctx
    inv: list[Polynomial | None] = [None] * ctx.n
    for i in order:
        c, h, deps = parts[i]
        partial_images = [inv[j] if inv[j] is not None else ctx.var(j) for j in range(ctx.n)]
        inv[i] = (ctx.var(i) - h.substitute(partial_images, ctx)).scale(1 / c)
    return AutomorphismPair(f, Endomorphism(ctx, tuple(inv)))


def conjugate_derivation(phi: AutomorphismPair, D: Derivation) -> Derivation:
    """φ∘D∘φ⁻¹, computed on generators."""
    if phi.ctx != D.ctx:
        raise ContextMismatch(f"{phi.ctx} vs {D.ctx}")
    return Derivation(D.ctx, tuple(apply_endo(phi.forward, apply(D, img)) for img in phi.inverse.images))
