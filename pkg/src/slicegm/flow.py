"""Exponentials of locally nilpotent derivations and the slice expansion.

Given D with slice s, every b decomposes uniquely as b = sum_i a_i s^i with
D(a_i) = 0. The coefficients are computed with the projection onto ker D

    pi(b) = sum_j (-s)^j D^j(b) / j!

as a_i = pi(D^i(b) / i!).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

from .deriv import DEFAULT_NILPOTENCY_BOUND, Derivation, apply, is_lnd, verify_slice
from .errors import InternalVerificationError, NilpotencyUnconfirmed, NotInKernel, SliceInvalid
from .morph import AutomorphismPair, Endomorphism, apply_endo
from .ring import FORMAL, Polynomial, VarContext


def _require_lnd(D: Derivation, bound: int) -> None:
    if not is_lnd(D, bound).confirmed:
        raise NilpotencyUnconfirmed(bound)


def _require_slice(D: Derivation, s: Polynomial) -> None:
    check = verify_slice(D, s)
    if not check.ok:
        raise SliceInvalid(check.residual)


def _require_kernel(D: Derivation, a: Polynomial, index: int | None = None) -> None:
    Da = apply(D, a)
    if Da:
        raise NotInKernel(Da, index)


def _series(D: Derivation, p: Polynomial, weight: Polynomial, bound: int) -> Polynomial:
    """sum_j weight^j D^j(p) / j!, stopping when D^j(p) vanishes."""
    out = p.ctx.zero()
    term = p
    wpow = p.ctx.one()
    for j in range(bound + 1):
        if term.is_zero():
            return out
        out = out + (wpow * term).scale(Fraction(1, factorial(j)))
        term = apply(D, term)
        wpow = wpow * weight
    if term:
        raise NilpotencyUnconfirmed(bound)
    return out


def exp_derivation(D: Derivation, f: Polynomial, bound: int = DEFAULT_NILPOTENCY_BOUND) -> Endomorphism:
    """exp(fD) for f in ker D; an automorphism with inverse exp(-fD)."""
    _require_lnd(D, bound)
    _require_kernel(D, f)
    return Endomorphism(D.ctx, tuple(_series(D, x, f, bound) for x in D.ctx.gens()))


def exp_automorphism(D: Derivation, f: Polynomial, bound: int = DEFAULT_NILPOTENCY_BOUND) -> AutomorphismPair:
    return AutomorphismPair(exp_derivation(D, f, bound), exp_derivation(D, -f, bound))


def formal_context(ctx: VarContext) -> VarContext:
    return ctx.extend(FORMAL)


def exp_formal(D: Derivation, bound: int = DEFAULT_NILPOTENCY_BOUND) -> Endomorphism:
    """exp(-lam*D) over the context extended by lam, with D(lam) = 0."""
    _require_lnd(D, bound)
    ext = formal_context(D.ctx)
    De = D.lift(ext)
    lam = ext.var(ext.n - 1)
    return Endomorphism(ext, tuple(_series(De, x, -lam, bound) for x in ext.gens()))


def translation_identity_residual(
    D: Derivation,
    s: Polynomial,
    coeffs: Sequence[Polynomial],
    bound: int = DEFAULT_NILPOTENCY_BOUND,
) -> Polynomial:
    """exp(-lam D)(P(s)) - P(s - lam) for P(T) = sum coeffs[j] T^j, in k[x, lam]."""
    _require_slice(D, s)
    for i, c in enumerate(coeffs):
        _require_kernel(D, c, i)
    phi = exp_formal(D, bound)
    ext = phi.ctx
    lam = ext.var(ext.n - 1)
    s_ext = s.lift(ext)
    lhs_arg = ext.zero()
    rhs = ext.zero()
    shifted = s_ext - lam
    for j, c in enumerate(coeffs):
        c_ext = c.lift(ext)
        lhs_arg = lhs_arg + c_ext * s_ext**j
        rhs = rhs + c_ext * shifted**j
    return apply_endo(phi, lhs_arg) - rhs


def translation_identity_check(
    D: Derivation,
    s: Polynomial,
    coeffs: Sequence[Polynomial],
    bound: int = DEFAULT_NILPOTENCY_BOUND,
) -> bool:
    """Check exp(-lam D)(P(s)) = P(s - lam) for P(T) = sum coeffs[j] T^j."""
    return not translation_identity_residual(D, s, coeffs, bound)


def kernel_projection(
    D: Derivation, s: Polynomial, b: Polynomial, bound: int = DEFAULT_NILPOTENCY_BOUND
) -> Polynomial:
    _require_slice(D, s)
    _require_lnd(D, bound)
    return _projection(D, s, b, bound)


def _projection(D: Derivation, s: Polynomial, b: Polynomial, bound: int) -> Polynomial:
    result = _series(D, b, -s, bound)
    residual = apply(D, result)
    if residual:
        raise InternalVerificationError("projection left ker D", residual)
    return result


def slice_expansion(
    D: Derivation, s: Polynomial, b: Polynomial, bound: int = DEFAULT_NILPOTENCY_BOUND
) -> list[Polynomial]:
    """Coefficients [a_0, ..., a_m] in ker D with b = sum a_i s^i, m minimal."""
    _require_slice(D, s)
    _require_lnd(D, bound)
    coeffs = []
    term = b
    i = 0
    while term:
        if i > bound:
            raise NilpotencyUnconfirmed(bound)
        coeffs.append(_projection(D, s, term.scale(Fraction(1, factorial(i))), bound))
        term = apply(D, term)
        i += 1
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    recon = b.ctx.zero()
    for a in reversed(coeffs):
        recon = recon * s + a
    if recon != b:
        raise InternalVerificationError("slice expansion does not reconstruct b", recon - b)
    return coeffs
