"""Derivations of a polynomial ring, given by their values on the generators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ContextMismatch
from .ring import Polynomial, VarContext

DEFAULT_NILPOTENCY_BOUND = 64


@dataclass(frozen=True)
class Derivation:
    ctx: VarContext
    images: tuple[Polynomial, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.ctx.n:
            raise ContextMismatch(f"derivation needs {self.ctx.n} images, got {len(images)}")
        for img in images:
            if img.ctx != self.ctx:
                raise ContextMismatch(f"image in {img.ctx}, expected {self.ctx}")

    @classmethod
    def partial(cls, ctx: VarContext, i: int) -> "Derivation":
        """d/dx_i."""
        return cls(ctx, tuple(ctx.one() if j == i else ctx.zero() for j in range(ctx.n)))

    @classmethod
    def zero(cls, ctx: VarContext) -> "Derivation":
        return cls(ctx, (ctx.zero(),) * ctx.n)

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply(self, p)

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.ctx, tuple(a + b for a, b in zip(self.images, other.images)))

    def __sub__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.ctx, tuple(a - b for a, b in zip(self.images, other.images)))

    def times(self, g) -> "Derivation":
        """The derivation g*D, for a polynomial or scalar g."""
        return Derivation(self.ctx, tuple(g * img for img in self.images))

    def lift(self, target: VarContext) -> "Derivation":
        """Extend to a larger context, killing the new variables."""
        extra = (target.zero(),) * (target.n - self.ctx.n)
        return Derivation(target, tuple(img.lift(target) for img in self.images) + extra)

    def __str__(self):
        parts = []
        for name, img in zip(self.ctx.names, self.images):
            if img:
                parts.append(f"({img})*d/d{name}")
        return " + ".join(parts) if parts else "0"


def apply(D: Derivation, p: Polynomial) -> Polynomial:
    """D(p) = sum_i D(x_i) * dp/dx_i."""
    if p.ctx != D.ctx:
        raise ContextMismatch(f"polynomial in {p.ctx}, derivation on {D.ctx}")
    out = D.ctx.zero()
    for i in p.variables():
        img = D.images[i]
        if img:
            out = out + img * p.partial(i)
    return out


def iterate(D: Derivation, p: Polynomial, j: int) -> Polynomial:
    if j < 0:
        raise ValueError("j must be non-negative")
    for _ in range(j):
        if p.is_zero():
            break
        p = apply(D, p)
    return p


def nilpotency_index(D: Derivation, p: Polynomial, bound: int) -> int | None:
    """Smallest j <= bound with D^j(p) = 0 (j >= 1), or None."""
    q = p
    for j in range(1, bound + 1):
        q = apply(D, q)
        if q.is_zero():
            return j
    return None


@dataclass(frozen=True)
class LndCheck:
    confirmed: bool
    degrees: tuple[int, ...] | None
    bound: int

    @property
    def exceeded_bound(self) -> bool:
        return not self.confirmed


def is_lnd(D: Derivation, bound: int = DEFAULT_NILPOTENCY_BOUND) -> LndCheck:
    """Check local nilpotency on the generators.

    Locally nilpotent elements form a subalgebra, so nilpotency on each
    generator proves it on the whole ring. Failing to find an index within
    ``bound`` proves nothing, hence the result is not a plain boolean.
    """
    degrees = []
    for x in D.ctx.gens():
        j = nilpotency_index(D, x, bound)
        if j is None:
            return LndCheck(False, None, bound)
        degrees.append(j)
    return LndCheck(True, tuple(degrees), bound)


@dataclass(frozen=True)
class NiceCheck:
    nice: bool
    index: int | None = None
    value: Polynomial | None = None

    def __bool__(self):
        return self.nice


def is_nice(D: Derivation) -> NiceCheck:
    for i, x in enumerate(D.ctx.gens()):
        v = iterate(D, x, 2)
        if v:
            return NiceCheck(False, i, v)
    return NiceCheck(True)


@dataclass(frozen=True)
class SliceCheck:
    ok: bool
    residual: Polynomial

    def __bool__(self):
        return self.ok


def verify_slice(D: Derivation, s: Polynomial) -> SliceCheck:
    residual = apply(D, s) - 1
    return SliceCheck(residual.is_zero(), residual)


def eigenvalue(D: Derivation, e: Polynomial) -> Fraction | None:
    """The scalar c with D(e) = c*e, or None if e is not an eigenvector."""
    De = apply(D, e)
    if De.is_zero():
        return Fraction(0)
    if e.is_zero():
        return None
    # compare against the leading coefficient
    exps, c = next(e.items())
    ratio = De.coeff(exps) / c
    if ratio and De == e.scale(ratio):
        return ratio
    return None


def check_semisimple_on(D: Derivation, elems: Sequence[Polynomial]) -> list[Fraction | None]:
    """Per-element eigenvalues; None marks an element that is not an eigenvector."""
    return [eigenvalue(D, e) for e in elems]
