"""The multiplicative action attached to an LND with slice.

For D locally nilpotent with slice s and a nonzero integer N, the
derivation NsD has eigenvalue N*m on a*s^m (a in ker D), which integrates
to the action alpha_t(sum a_m s^m) = sum a_m t^(N m) s^m. Three
independent routes to the action live here:

* ``alpha_via_expansion`` goes through the slice expansion;
* ``alpha_nice`` uses the closed formula x_i - (1 - t^N) s D(x_i), valid
  when D^2 kills every generator;
* ``beta_freudenburg`` substitutes lam := (1 - t^N) s into exp(-lam D).

Their agreement is checked by ``compare_actions``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .deriv import DEFAULT_NILPOTENCY_BOUND, Derivation, apply, eigenvalue, is_nice, verify_slice
from .errors import InternalVerificationError, NotAnActionAtOne, NotInKernel, NotNice, SliceInvalid
from .flow import exp_formal, slice_expansion
from .ring import LaurentPoly, Polynomial, VarContext, laurent_substitute


@dataclass(frozen=True)
class ActionImages:
    ctx: VarContext
    images: tuple[LaurentPoly, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.ctx.n:
            raise ValueError(f"action needs {self.ctx.n} images")

    def __call__(self, p: Polynomial) -> LaurentPoly:
        return apply_action(self, p)

    def at_one(self) -> tuple[Polynomial, ...]:
        return tuple(img.eval_at_one() for img in self.images)


def apply_action(a: ActionImages, p: Polynomial) -> LaurentPoly:
    return laurent_substitute(p, a.images)


def _check_slice(D: Derivation, s: Polynomial) -> None:
    check = verify_slice(D, s)
    if not check.ok:
        raise SliceInvalid(check.residual)


def build_partial(D: Derivation, s: Polynomial, N: int) -> Derivation:
    """The semisimple derivation N*s*D."""
    if N == 0:
        raise ValueError("N must be nonzero")
    _check_slice(D, s)
    return D.times(s.scale(N))


def alpha_via_expansion(
    D: Derivation, s: Polynomial, N: int, b: Polynomial, bound: int = DEFAULT_NILPOTENCY_BOUND
) -> LaurentPoly:
    ctx = D.ctx
    out = LaurentPoly(ctx)
    spow = ctx.one()
    for i, a in enumerate(slice_expansion(D, s, b, bound)):
        if a:
            out = out + LaurentPoly(ctx, {N * i: a * spow})
        spow = spow * s
    return out


def alpha_action(D: Derivation, s: Polynomial, N: int, bound: int = DEFAULT_NILPOTENCY_BOUND) -> ActionImages:
    """Images of all generators under alpha_t, through the slice expansion."""
    return ActionImages(D.ctx, tuple(alpha_via_expansion(D, s, N, x, bound) for x in D.ctx.gens()))


def alpha_nice(D: Derivation, s: Polynomial, N: int) -> ActionImages:
    nice = is_nice(D)
    if not nice:
        raise NotNice(nice.index, nice.value)
    _check_slice(D, s)
    ctx = D.ctx
    images = []
    for x, Dx in zip(ctx.gens(), D.images):
        sDx = s * Dx
        images.append(LaurentPoly(ctx, {0: x - sDx}) + LaurentPoly(ctx, {N: sDx}))
    return ActionImages(ctx, tuple(images))


def freudenburg_parameter(s: Polynomial, N: int) -> LaurentPoly:
    """The value (1 - t^N) s substituted for lam."""
    return LaurentPoly(s.ctx, {0: s}) - LaurentPoly(s.ctx, {N: s})


def beta_freudenburg(
    D: Derivation, s: Polynomial, N: int, bound: int = DEFAULT_NILPOTENCY_BOUND
) -> ActionImages:
    """exp(-lam D) with lam := (1 - t^N) s."""
    if N == 0:
        raise ValueError("N must be nonzero")
    _check_slice(D, s)
    ctx = D.ctx
    phi = exp_formal(D, bound)
    lam_index = phi.ctx.n - 1
    lam_value = freudenburg_parameter(s, N)
    images = []
    for img in phi.images[: ctx.n]:
        out = LaurentPoly(ctx)
        for k, c in img.coefficients_in(lam_index).items():
            out = out + lam_value**k * LaurentPoly(ctx, {0: c.restrict(ctx)})
        images.append(out)
    return ActionImages(ctx, tuple(images))


@dataclass(frozen=True)
class ActionComparison:
    equal: bool
    index: int | None = None
    difference: LaurentPoly | None = None

    def __bool__(self):
        return self.equal


def compare_actions(a: ActionImages, b: ActionImages) -> ActionComparison:
    if a.ctx != b.ctx:
        raise ValueError(f"actions on different rings: {a.ctx} vs {b.ctx}")
    for i, (u, v) in enumerate(zip(a.images, b.images)):
        if u != v:
            return ActionComparison(False, i, u - v)
    return ActionComparison(True)


def infinitesimal_generator(a: ActionImages) -> Derivation:
    """ev_1 ∘ d/dt applied to each generator's image."""
    for i, (x, img) in enumerate(zip(a.ctx.gens(), a.images)):
        residual = img.eval_at_one() - x
        if residual:
            raise NotAnActionAtOne(i, residual)
    return Derivation(a.ctx, tuple(img.derivative().eval_at_one() for img in a.images))


@dataclass(frozen=True)
class GroupLawCheck:
    ok: bool
    index: int | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def verify_group_law(
    D: Derivation, s: Polynomial, N: int, bound: int = DEFAULT_NILPOTENCY_BOUND
) -> GroupLawCheck:
    """alpha_t ∘ alpha_u = alpha_{tu} as a formal identity in t and u, and alpha_1 = id.

    Two-parameter elements are kept as {u-exponent: Laurent polynomial in t}.
    """
    act = alpha_action(D, s, N, bound)
    for i, (x, img) in enumerate(zip(D.ctx.gens(), act.images)):
        if img.eval_at_one() != x:
            return GroupLawCheck(False, i, f"alpha_1({x}) = {img.eval_at_one()}")
        composed = {m: apply_action(act, c) for m, c in img.coeffs.items()}
        composed = {m: v for m, v in composed.items() if v}
        product = {m: LaurentPoly(D.ctx, {m: c}) for m, c in img.coeffs.items()}
        if composed != product:
            for m in sorted(set(composed) | set(product)):
                left = composed.get(m, LaurentPoly(D.ctx))
                right = product.get(m, LaurentPoly(D.ctx))
                if left != right:
                    return GroupLawCheck(False, i, f"u^{m}: residual {left - right}")
    return GroupLawCheck(True)


@dataclass(frozen=True)
class EigenRow:
    element: Polynomial
    m: int
    eigenvalue: Fraction


def semisimplicity_witness(
    D: Derivation,
    s: Polynomial,
    N: int,
    kernel_elems: Sequence[Polynomial],
    m_max: int = 5,
) -> list[EigenRow]:
    """Eigenvalues of N s D on a*s^m; each must equal N*m."""
    for idx, a in enumerate(kernel_elems):
        Da = apply(D, a)
        if Da:
            raise NotInKernel(Da, idx)
    partial = build_partial(D, s, N)
    rows = []
    for a in kernel_elems:
        if a.is_zero():
            continue
        spow = D.ctx.one()
        for m in range(m_max + 1):
            elem = a * spow
            lam = eigenvalue(partial, elem)
            if lam != N * m:
                got = apply(partial, elem) - elem.scale(N * m)
                raise InternalVerificationError(f"eigenvalue of ({a})*s^{m} is not {N * m}", got)
            rows.append(EigenRow(a, m, lam))
            spow = spow * s
    return rows
