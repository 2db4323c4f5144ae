"""Degree-bounded kernels of derivations via exact linear algebra.

ker D is infinite dimensional, so everything here works in the finite
space of polynomials of total degree <= d. D may raise degree; the matrix
rows run over whatever monomials appear in the images.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .deriv import Derivation, apply
from .errors import ContextMismatch, EmptyFamily, InternalVerificationError
from .ring import Polynomial, VarContext, monomials_up_to, nullspace_sparse, rref_sparse

ML_CAVEAT = (
    "CAVEAT: the intersection of kernels over a finite family of derivations contains ML(B) "
    "and may be strictly larger. A witness is only a candidate obstruction: it must still be "
    "shown to be killed by every locally nilpotent derivation. Absence of a witness up to the "
    "degree bound is evidence toward ML(B) = k, never a proof."
)


@dataclass(frozen=True)
class KernelSystem:
    columns: list[tuple]
    rows: list[dict[int, Fraction]]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)


def _assemble(Ds: Sequence[Derivation], d: int) -> KernelSystem:
    ctx = Ds[0].ctx
    cols = monomials_up_to(ctx.n, d)
    rows: dict[tuple, dict[int, Fraction]] = {}
    for k, D in enumerate(Ds):
        for j, exps in enumerate(cols):
            image = apply(D, Polynomial.monomial(ctx, exps))
            for out_exps, c in image.items():
                rows.setdefault((k, out_exps), {})[j] = c
    return KernelSystem(cols, [rows[key] for key in sorted(rows)])


def _basis(ctx: VarContext, system: KernelSystem) -> list[Polynomial]:
    out = []
    for vec in nullspace_sparse(system.rows, len(system.columns)):
        out.append(Polynomial(ctx, {exps: c for exps, c in zip(system.columns, vec) if c}))
    return out


def kernel_system(Ds: Sequence[Derivation], d: int) -> KernelSystem:
    if not Ds:
        raise EmptyFamily("need at least one derivation")
    ctx = Ds[0].ctx
    if any(D.ctx != ctx for D in Ds):
        raise ContextMismatch("derivations on different rings")
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    return _assemble(Ds, d)


def _checked(Ds: Sequence[Derivation], basis: list[Polynomial]) -> list[Polynomial]:
    for p in basis:
        for D in Ds:
            r = apply(D, p)
            if r:
                raise InternalVerificationError(f"kernel element {p} not annihilated", r)
    return basis


def kernel_basis(D: Derivation, d: int) -> list[Polynomial]:
    """Basis of {p : deg p <= d, D(p) = 0}."""
    system = kernel_system([D], d)
    return _checked([D], _basis(D.ctx, system))


def kernel_intersection(Ds: Sequence[Derivation], d: int) -> list[Polynomial]:
    """Basis of the common kernel of a finite family in degree <= d."""
    system = kernel_system(Ds, d)
    return _checked(Ds, _basis(Ds[0].ctx, system))


@dataclass(frozen=True)
class MLReport:
    witness: Polynomial | None
    degree: int
    basis: tuple[Polynomial, ...]
    matrix_shape: tuple[int, int]
    caveat: str = ML_CAVEAT

    @property
    def has_witness(self) -> bool:
        return self.witness is not None


def pick_witness(basis: Sequence[Polynomial]) -> Polynomial | None:
    candidates = [p for p in basis if not p.is_constant()]
    if not candidates:
        return None
    return min(candidates, key=lambda p: (p.degree(), len(p), str(p)))


def ml_obstruction_report(Ds: Sequence[Derivation], d: int) -> MLReport:
    system = kernel_system(Ds, d)
    basis = _checked(Ds, _basis(Ds[0].ctx, system))
    return MLReport(pick_witness(basis), d, tuple(basis), system.shape)


def in_span(basis: Sequence[Polynomial], p: Polynomial) -> bool:
    """Is p a rational linear combination of ``basis``?"""
    mons = sorted({e for q in list(basis) + [p] for e in q.terms})
    index = {e: i for i, e in enumerate(mons)}

    def vec(q):
        return {index[e]: c for e, c in q.terms.items()}

    rank_basis = len(rref_sparse([vec(q) for q in basis], len(mons))[1])
    rank_all = len(rref_sparse([vec(q) for q in basis] + [vec(p)], len(mons))[1])
    return rank_basis == rank_all


def span_rank(polys: Sequence[Polynomial]) -> int:
    mons = sorted({e for q in polys for e in q.terms})
    index = {e: i for i, e in enumerate(mons)}
    return len(rref_sparse([{index[e]: c for e, c in q.terms.items()} for q in polys], len(mons))[1])
