"""Linearization of the torus action attached to (D, s, N) on k[x_1..x_n].

Given an automorphism phi with phi D phi^-1 = d/dx_n and
phi(s) = x_n + p where p is free of x_n, the composite psi = tau∘phi with
tau: x_n -> x_n - p conjugates N s D to the diagonal derivation
N x_n d/dx_n. Everything returned here carries its own verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .action import build_partial
from .deriv import DEFAULT_NILPOTENCY_BOUND, Derivation, apply, is_lnd, is_nice, verify_slice
from .errors import (
    ConditionFailed,
    EigenvalueMismatch,
    GcdNotOne,
    HypothesesFail,
    InternalVerificationError,
    NotInKernel,
    NotUnivariate,
    SliceInvalid,
    TwoNonzeroEigenvalues,
)
from .flow import exp_automorphism
from .morph import (
    AutomorphismPair,
    Endomorphism,
    apply_endo,
    compose_pairs,
    conjugate_derivation,
    invert_triangular,
)
from .ring import Polynomial, VarContext

SIGN_NOTE = (
    "phi_a = exp(-aD) sends s to s - a, so it conjugates N s D to N (s - a) D; "
    "the shifted slice is s - a (the same statement holds for s + a with a replaced by -a)."
)


def _require_slice(D: Derivation, s: Polynomial) -> None:
    check = verify_slice(D, s)
    if not check.ok:
        raise SliceInvalid(check.residual)


def _derivation_residuals(actual: Derivation, target: Derivation) -> tuple[Polynomial, ...]:
    return tuple(a - b for a, b in zip(actual.images, target.images))


def last_partial(ctx: VarContext) -> Derivation:
    return Derivation.partial(ctx, ctx.n - 1)


def diagonal_target(ctx: VarContext, N: int) -> Derivation:
    """N x_n d/dx_n."""
    xn = ctx.var(ctx.n - 1)
    return Derivation(ctx, tuple(ctx.zero() for _ in range(ctx.n - 1)) + (xn.scale(N),))


@dataclass(frozen=True)
class ConditionTwo:
    ok: bool
    derivation_residuals: tuple[Polynomial, ...]
    slice_residual: Polynomial

    def __bool__(self):
        return self.ok


def check_condition_two(D: Derivation, s: Polynomial, phi: AutomorphismPair) -> ConditionTwo:
    """phi D phi^-1 = d/dx_n and phi(s) = x_n."""
    _require_slice(D, s)
    conj = conjugate_derivation(phi, D)
    residuals = _derivation_residuals(conj, last_partial(D.ctx))
    slice_residual = apply_endo(phi.forward, s) - D.ctx.var(D.ctx.n - 1)
    ok = not any(residuals) and slice_residual.is_zero()
    return ConditionTwo(ok, residuals, slice_residual)


@dataclass(frozen=True)
class ConditionThree:
    ok: bool
    p: Polynomial | None
    reason: str = ""
    derivation_residuals: tuple[Polynomial, ...] = ()

    def __bool__(self):
        return self.ok


def check_condition_three(D: Derivation, s: Polynomial, phi: AutomorphismPair) -> ConditionThree:
    """phi D phi^-1 = d/dx_n and phi(s) - x_n is free of x_n.

    The offset may have any degree in x_1..x_{n-1}.
    """
    _require_slice(D, s)
    ctx = D.ctx
    conj = conjugate_derivation(phi, D)
    residuals = _derivation_residuals(conj, last_partial(ctx))
    if any(residuals):
        i = next(i for i, r in enumerate(residuals) if r)
        return ConditionThree(
            False, None, f"phi D phi^-1 differs from d/d{ctx.names[-1]} on {ctx.names[i]}", residuals
        )
    p = apply_endo(phi.forward, s) - ctx.var(ctx.n - 1)
    if p.involves(ctx.n - 1):
        return ConditionThree(False, p, f"offset phi(s) - {ctx.names[-1]} = {p} involves {ctx.names[-1]}", residuals)
    return ConditionThree(True, p, "", residuals)


@dataclass(frozen=True)
class LinearizationCertificate:
    psi: AutomorphismPair
    diagonal_derivation: Derivation
    p: Polynomial
    provenance: str
    N: int


def offset_translation(ctx: VarContext, p: Polynomial) -> Endomorphism:
    """tau: x_n -> x_n - p, other generators fixed."""
    n = ctx.n - 1
    return Endomorphism.replacing(ctx, {n: ctx.var(n) - p})


def build_linearizer(
    D: Derivation, s: Polynomial, N: int, phi: AutomorphismPair
) -> LinearizationCertificate:
    cond = check_condition_three(D, s, phi)
    if not cond.ok:
        raise ConditionFailed(f"condition three fails: {cond.reason}")
    ctx = D.ctx
    provenance = "condition 2" if cond.p.is_zero() else "condition 3"
    tau = invert_triangular(offset_translation(ctx, cond.p))
    psi = compose_pairs(tau, phi)
    target = diagonal_target(ctx, N)
    conj = conjugate_derivation(psi, build_partial(D, s, N))
    residuals = _derivation_residuals(conj, target)
    if any(residuals):
        i = next(i for i, r in enumerate(residuals) if r)
        raise InternalVerificationError(
            f"psi ∂ psi^-1 differs from {N}*{ctx.names[-1]}*d/d{ctx.names[-1]} on {ctx.names[i]}", residuals[i]
        )
    return LinearizationCertificate(psi, conj, cond.p, provenance, N)


def verify_certificate(
    cert: LinearizationCertificate, D: Derivation, s: Polynomial, probes: Sequence[Polynomial] = ()
) -> Polynomial | None:
    """Re-check a certificate without reusing its construction.

    Rebuilds the automorphism pair (which re-verifies the inverse) and checks
    the intertwining identity psi(∂(b)) = E(psi(b)) on the generators and on
    any extra probe polynomials. Returns the first nonzero residual, or None.
    """
    psi = AutomorphismPair(cert.psi.forward, cert.psi.inverse)
    partial = build_partial(D, s, cert.N)
    target = diagonal_target(D.ctx, cert.N)
    for r in _derivation_residuals(cert.diagonal_derivation, target):
        if r:
            return r
    for b in tuple(D.ctx.gens()) + tuple(probes):
        lhs = apply_endo(psi.forward, apply(partial, b))
        rhs = apply(target, apply_endo(psi.forward, b))
        if lhs != rhs:
            return lhs - rhs
    return None


# ---------------------------------------------------------------------------
# Diagonal factorization E = N sigma delta
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalNormalForm:
    pivot_index: int
    scaling: Fraction
    permutation: tuple[int, ...]
    """position j of the new coordinates holds old variable permutation[j]"""


def diagonal_derivation(ctx: VarContext, eigenvalues: Sequence) -> Derivation:
    return Derivation(ctx, tuple(x.scale(Fraction(l)) for x, l in zip(ctx.gens(), eigenvalues)))


def factor_diagonal(
    eigenvalues: Sequence,
    sigma: Polynomial,
    delta: Derivation,
    N: int,
    bound: int = DEFAULT_NILPOTENCY_BOUND,
) -> DiagonalNormalForm:
    ctx = delta.ctx
    lams = [Fraction(l) for l in eigenvalues]
    if len(lams) != ctx.n:
        raise ValueError(f"need {ctx.n} eigenvalues")
    nonzero = [i for i, l in enumerate(lams) if l]
    if len(nonzero) >= 2:
        raise TwoNonzeroEigenvalues(nonzero[0], nonzero[1])

    E = diagonal_derivation(ctx, lams)
    Nsd = delta.times(sigma.scale(N))
    for i, (a, b) in enumerate(zip(E.images, Nsd.images)):
        if a != b:
            raise HypothesesFail(f"E = N*sigma*delta on {ctx.names[i]}", a - b)
    ds = apply(delta, sigma) - 1
    if ds:
        raise HypothesesFail("delta(sigma) = 1", ds)
    if not is_lnd(delta, bound).confirmed:
        raise HypothesesFail("delta locally nilpotent")
    if not nonzero:
        # E = 0 forces sigma*delta = 0, impossible with delta(sigma) = 1
        raise HypothesesFail("some eigenvalue nonzero")

    i = nonzero[0]
    if lams[i] != N:
        raise EigenvalueMismatch(lams[i], N)
    coeffs = sigma.coefficients_in(i)
    xi = ctx.var(i)
    if set(coeffs) != {1} or not coeffs[1].is_constant():
        raise HypothesesFail(f"sigma = c*{ctx.names[i]}", sigma)
    c = coeffs[1].constant_value()
    dxi = apply(delta, xi) - Fraction(1) / c
    if dxi:
        raise HypothesesFail(f"delta({ctx.names[i]}) = 1/c", dxi)
    last = ctx.n - 1
    perm = list(range(ctx.n))
    perm[i], perm[last] = perm[last], perm[i]
    return DiagonalNormalForm(i, c, tuple(perm))


def normal_form_change(ctx: VarContext, form: DiagonalNormalForm) -> AutomorphismPair:
    """The linear automorphism: permute coordinates, then x_n -> x_n / c."""
    last = ctx.n - 1
    scale = Endomorphism.replacing(ctx, {last: ctx.var(last).scale(1 / form.scaling)})
    return compose_pairs(invert_triangular(scale), _perm_pair(ctx, form.permutation))


def _perm_pair(ctx: VarContext, perm) -> AutomorphismPair:
    fwd = [None] * ctx.n
    inv = [None] * ctx.n
    for j, old in enumerate(perm):
        fwd[old] = ctx.var(j)
        inv[j] = ctx.var(old)
    return AutomorphismPair(Endomorphism(ctx, tuple(fwd)), Endomorphism(ctx, tuple(inv)))


def apply_normal_form(
    eigenvalues: Sequence, sigma: Polynomial, delta: Derivation, form: DiagonalNormalForm
) -> tuple[tuple[Fraction, ...], Polynomial, Derivation]:
    """Transport (E, sigma, delta) through the coordinate change of ``form``."""
    ctx = delta.ctx
    theta = normal_form_change(ctx, form)
    E = diagonal_derivation(ctx, eigenvalues)
    E2 = conjugate_derivation(theta, E)
    new_eigs = []
    for j, (x, img) in enumerate(zip(ctx.gens(), E2.images)):
        lam = img.coeff(tuple(int(k == j) for k in range(ctx.n)))
        if img != x.scale(lam):
            raise InternalVerificationError("coordinate change broke diagonal form", img - x.scale(lam))
        new_eigs.append(lam)
    return tuple(new_eigs), apply_endo(theta.forward, sigma), conjugate_derivation(theta, delta)


# ---------------------------------------------------------------------------
# Slice independence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SliceConjugation:
    phi_a: AutomorphismPair
    conjugated: Derivation
    new_slice: Polynomial
    note: str = SIGN_NOTE


def slice_conjugate(
    D: Derivation, s: Polynomial, a: Polynomial, N: int, bound: int = DEFAULT_NILPOTENCY_BOUND
) -> SliceConjugation:
    """phi_a = exp(-aD) and the conjugate of N s D by it.

    Asserts phi_a(s) = s - a, phi_a D phi_a^-1 = D and
    phi_a (N s D) phi_a^-1 = N (s - a) D.
    """
    Da = apply(D, a)
    if Da:
        raise NotInKernel(Da)
    _require_slice(D, s)
    phi_a = exp_automorphism(D, -a, bound)
    shifted = s - a
    moved = apply_endo(phi_a.forward, s)
    if moved != shifted:
        raise InternalVerificationError("phi_a(s) != s - a", moved - shifted)
    conjD = conjugate_derivation(phi_a, D)
    for r in _derivation_residuals(conjD, D):
        if r:
            raise InternalVerificationError("phi_a D phi_a^-1 != D", r)
    conjugated = conjugate_derivation(phi_a, build_partial(D, s, N))
    expected = D.times(shifted.scale(N))
    for r in _derivation_residuals(conjugated, expected):
        if r:
            raise InternalVerificationError("phi_a (NsD) phi_a^-1 != N(s-a)D", r)
    return SliceConjugation(phi_a, conjugated, shifted)


# ---------------------------------------------------------------------------
# Kernel criterion (sufficient direction)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelCriterionReport:
    generators_free_of_last: tuple[tuple[Polynomial, bool], ...]
    slice_offset: Polynomial
    slice_ok: bool
    conjugation_residuals: tuple[Polynomial, ...]
    conjugation_ok: bool

    @property
    def clause_a(self) -> bool:
        return all(ok for _, ok in self.generators_free_of_last)

    @property
    def passed(self) -> bool:
        return self.clause_a and self.slice_ok and self.conjugation_ok


def kernel_criterion_check(
    D: Derivation, s: Polynomial, phi: AutomorphismPair, kernel_gens: Sequence[Polynomial]
) -> KernelCriterionReport:
    """Sufficient-direction check that phi(ker D) = k[x_1..x_{n-1}] and phi(s) in x_n + k[x_1..x_{n-1}].

    Clause (a) only shows phi(ker D) lies inside k[x_1..x_{n-1}] on the given
    generators; clause (c), phi D phi^-1 = d/dx_n, upgrades that to equality.
    """
    for i, g in enumerate(kernel_gens):
        Dg = apply(D, g)
        if Dg:
            raise NotInKernel(Dg, i)
    last = D.ctx.n - 1
    images = tuple((apply_endo(phi.forward, g), not apply_endo(phi.forward, g).involves(last)) for g in kernel_gens)
    offset = apply_endo(phi.forward, s) - D.ctx.var(last)
    residuals = _derivation_residuals(conjugate_derivation(phi, D), last_partial(D.ctx))
    return KernelCriterionReport(images, offset, not offset.involves(last), residuals, not any(residuals))


# ---------------------------------------------------------------------------
# Wang normal forms f(x) d/dy + g(x) d/dz
# ---------------------------------------------------------------------------


def _dense(p: Polynomial) -> list[Fraction]:
    if p.variables() - {0}:
        raise NotUnivariate(f"{p} involves variables other than {p.ctx.names[0]}")
    deg = p.degree_in(0)
    if p.is_zero():
        return []
    out = [Fraction(0)] * (deg + 1)
    for exps, c in p.items():
        out[exps[0]] = c
    return out


def _trim(a: list[Fraction]) -> list[Fraction]:
    while a and not a[-1]:
        a = a[:-1]
    return a


def _sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _divmod(a, b):
    a = _trim(list(a))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        a = _sub(a, [Fraction(0)] * shift + [c * v for v in b])
    return _trim(q), a


def univariate_xgcd(f: Polynomial, g: Polynomial) -> tuple[Polynomial, Polynomial, Polynomial]:
    """(h, u, v) with u f + v g = h = monic gcd(f, g); h = 0 when f = g = 0."""
    ctx = f.ctx
    r0, r1 = _dense(f), _dense(g)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = _divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _sub(s0, _mul(q, s1))
        t0, t1 = t1, _sub(t0, _mul(q, t1))
    if r0:
        lead = r0[-1]
        r0 = [c / lead for c in r0]
        s0 = [c / lead for c in s0]
        t0 = [c / lead for c in t0]

    def back(a):
        return sum((ctx.var(0) ** k * c for k, c in enumerate(a)), ctx.zero())

    return back(r0), back(s0), back(t0)


@dataclass(frozen=True)
class WangForm:
    derivation: Derivation
    slice: Polynomial
    bezout: tuple[Polynomial, Polynomial]
    kernel_generators: tuple[Polynomial, Polynomial]
    conjugator: AutomorphismPair
    metadata: dict = field(default_factory=dict)


def wang_normal_form(f: Polynomial, g: Polynomial) -> WangForm:
    """D = f(x) d/dy + g(x) d/dz with gcd(f, g) = 1, plus slice and conjugator.

    f and g live in a three-variable context (x, y, z) or a one-variable
    context, which is then extended by y and z. The slice u y + v z comes
    from u f + v g = 1, and phi: y -> v y + f z, z -> -u y + g z sends
    the kernel generator g y - f z to y and the slice to z.
    """
    if f.ctx != g.ctx:
        raise ValueError("f and g must share a context")
    ctx = f.ctx
    if ctx.n == 1:
        ctx = ctx.extend("y", "z")
        f, g = f.lift(ctx), g.lift(ctx)
    elif ctx.n != 3:
        raise NotUnivariate("expected a context with 1 or 3 variables")
    h, u, v = univariate_xgcd(f, g)
    if h != 1:
        raise GcdNotOne(h)
    x, y, z = ctx.gens()
    D = Derivation(ctx, (ctx.zero(), f, g))
    s = u * y + v * z
    w = g * y - f * z
    theta = Endomorphism(ctx, (x, w, s))
    phi = Endomorphism(ctx, (x, v * y + f * z, -u * y + g * z))
    pair = AutomorphismPair(phi, theta)
    if not is_nice(D):
        raise InternalVerificationError("Wang form is not nice")
    for k in (x, w):
        if apply(D, k):
            raise InternalVerificationError("kernel generator not annihilated", apply(D, k))
    if not verify_slice(D, s):
        raise InternalVerificationError("Bezout slice failed", apply(D, s) - 1)
    return WangForm(D, s, (u, v), (x, w), pair, {"rank": 1, "nice": True})
