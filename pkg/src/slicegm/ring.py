"""Exact arithmetic core.

Coefficients are :class:`fractions.Fraction` (always reduced, positive
denominator). Polynomials are sparse maps from exponent tuples to nonzero
coefficients over a named :class:`VarContext`. Everything is immutable.

The ground field is realised as the rationals. All constructions in this
library are defined over the coefficients of their input, so nothing is
lost for the computations performed here; statements that need an
algebraically closed field are existence claims and are never computed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import ContextMismatch

Rational = Fraction
Monomial = tuple  # tuple[int, ...] of length ctx.n

TORUS = "t"
FORMAL = "lam"
RESERVED = frozenset({TORUS, FORMAL})

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@total_ordering
class _MinusInfinity:
    """Degree of the zero polynomial. Compares below every integer, supports no arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "-inf"

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("slicegm.-inf")


NEG_INF = _MinusInfinity()


@dataclass(frozen=True)
class VarContext:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("a variable context needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not _IDENT.match(name):
                raise ValueError(f"invalid variable name {name!r}")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def extend(self, *names: str) -> "VarContext":
        """Return a new context with ``names`` appended; ``self`` is untouched."""
        return VarContext(self.names + tuple(names))

    def is_prefix_of(self, other: "VarContext") -> bool:
        return other.names[: self.n] == self.names

    # polynomial constructors
    def var(self, which: int | str) -> "Polynomial":
        i = which if isinstance(which, int) else self.index(which)
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for {self.n} variables")
        exps = [0] * self.n
        exps[i] = 1
        return Polynomial(self, {tuple(exps): Fraction(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(i) for i in range(self.n))

    def const(self, c) -> "Polynomial":
        return Polynomial.constant(self, c)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial.constant(self, 1)

    def __str__(self):
        return "k[" + ", ".join(self.names) + "]"


Scalar = Union[int, Fraction]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


def grlex_key(exps: Monomial):
    return (sum(exps), exps)


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[Monomial, Scalar] | None = None):
        self.ctx = ctx
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != ctx.n:
                    raise ValueError(f"monomial {exps} has wrong length for {ctx}")
                c = _as_fraction(c)
                if c:
                    clean[tuple(exps)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx: VarContext, terms: dict) -> "Polynomial":
        # terms already clean: tuple keys, nonzero Fraction values
        p = object.__new__(cls)
        p.ctx = ctx
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, ctx: VarContext, c) -> "Polynomial":
        return cls(ctx, {(0,) * ctx.n: _as_fraction(c)})

    @classmethod
    def monomial(cls, ctx: VarContext, exps: Sequence[int], c=1) -> "Polynomial":
        return cls(ctx, {tuple(exps): c})

    # ------------------------------------------------------------------ access
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        """Terms in canonical (graded-lex, descending) order."""
        for exps in sorted(self._terms, key=grlex_key, reverse=True):
            yield exps, self._terms[exps]

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((0,) * self.ctx.n, Fraction(0))

    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def degree_in(self, i: int):
        if not self._terms:
            return NEG_INF
        return max(e[i] for e in self._terms)

    def variables(self) -> set[int]:
        used = set()
        for exps in self._terms:
            used.update(i for i, e in enumerate(exps) if e)
        return used

    def involves(self, i: int) -> bool:
        return any(e[i] for e in self._terms)

    # -------------------------------------------------------------- arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for exps, c in other._terms.items():
            v = out.get(exps, 0) + c
            if v:
                out[exps] = v
            else:
                out.pop(exps, None)
        return Polynomial._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ctx, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return self.ctx.zero()
        return Polynomial._raw(self.ctx, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.ctx, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by a nonzero scalar
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # --------------------------------------------------------------- equality
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        from .parse import format_polynomial

        return format_polynomial(self)

    # ------------------------------------------------------------- calculus
    def partial(self, i: int) -> "Polynomial":
        if not 0 <= i < self.ctx.n:
            raise IndexError(f"variable index {i} out of range for {self.ctx.n} variables")
        out = {}
        for exps, c in self._terms.items():
            k = exps[i]
            if k:
                e = exps[:i] + (k - 1,) + exps[i + 1 :]
                out[e] = c * k
        return Polynomial._raw(self.ctx, out)

    def substitute(self, images: Sequence["Polynomial"], target: VarContext | None = None) -> "Polynomial":
        """Ring homomorphism x_i -> images[i]; images live in ``target``."""
        if len(images) != self.ctx.n:
            raise ContextMismatch(f"need {self.ctx.n} images, got {len(images)}")
        if target is None:
            target = images[0].ctx if images else self.ctx
        for img in images:
            if img.ctx != target:
                raise ContextMismatch(f"image in {img.ctx}, expected {target}")
        powers: list[dict[int, Polynomial]] = [{0: target.one(), 1: img} for img in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        out: dict = {}
        for exps, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, k in enumerate(exps):
                if k:
                    term = term * power(i, k)
            for e, v in term._terms.items():
                s = out.get(e, 0) + v
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(target, out)

    # ------------------------------------------------------- context changes
    def lift(self, target: VarContext) -> "Polynomial":
        """Embed into a context whose leading names are this context's names."""
        if target == self.ctx:
            return self
        if not self.ctx.is_prefix_of(target):
            raise ContextMismatch(f"{self.ctx} is not a prefix of {target}")
        pad = (0,) * (target.n - self.ctx.n)
        return Polynomial._raw(target, {e + pad: c for e, c in self._terms.items()})

    def restrict(self, target: VarContext) -> "Polynomial":
        """Inverse of :meth:`lift`; fails if a dropped variable occurs."""
        if target == self.ctx:
            return self
        if not target.is_prefix_of(self.ctx):
            raise ContextMismatch(f"{target} is not a prefix of {self.ctx}")
        m = target.n
        out = {}
        for e, c in self._terms.items():
            if any(e[m:]):
                raise ContextMismatch(f"{self} involves variables outside {target}")
            out[e[:m]] = c
        return Polynomial._raw(target, out)

    def coefficients_in(self, i: int) -> dict[int, "Polynomial"]:
        """Collect by powers of variable i: {k: c_k} with c_k free of x_i."""
        out: dict[int, dict] = {}
        for exps, c in self._terms.items():
            k = exps[i]
            out.setdefault(k, {})[exps[:i] + (0,) + exps[i + 1 :]] = c
        return {k: Polynomial._raw(self.ctx, t) for k, t in out.items()}


def poly_arith(op: str, lhs: Polynomial, rhs) -> Polynomial:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "scale":
        return lhs.scale(rhs)
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    return p.partial(i)


def substitute(p: Polynomial, images: Sequence[Polynomial], target: VarContext | None = None) -> Polynomial:
    return p.substitute(images, target)


def monomials_up_to(n: int, d: int) -> list[Monomial]:
    """All exponent tuples of length n and total degree <= d, ascending graded-lex."""
    out: list[Monomial] = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for k in range(remaining + 1):
            prefix.append(k)
            rec(prefix, remaining - k, slots - 1)
            prefix.pop()

    rec([], d, n)
    out.sort(key=grlex_key)
    return out


# ---------------------------------------------------------------------------
# Laurent polynomials in the torus parameter t
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Finite sum of t^m * c_m with m in Z and c_m polynomials over ``ctx``."""

    __slots__ = ("ctx", "_coeffs")

    def __init__(self, ctx: VarContext, coeffs: Mapping[int, Polynomial] | None = None):
        self.ctx = ctx
        clean = {}
        for m, c in (coeffs or {}).items():
            if c.ctx != ctx:
                raise ContextMismatch(f"coefficient in {c.ctx}, expected {ctx}")
            if c:
                clean[int(m)] = c
        self._coeffs = clean

    @classmethod
    def from_poly(cls, p: Polynomial, m: int = 0) -> "LaurentPoly":
        return cls(p.ctx, {m: p})

    @classmethod
    def t_power(cls, ctx: VarContext, m: int) -> "LaurentPoly":
        return cls(ctx, {m: ctx.one()})

    @property
    def coeffs(self) -> dict[int, Polynomial]:
        return dict(sorted(self._coeffs.items()))

    def coeff(self, m: int) -> Polynomial:
        return self._coeffs.get(m, self.ctx.zero())

    def exponents(self) -> list[int]:
        return sorted(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self):
        return bool(self._coeffs)

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, Polynomial):
            return LaurentPoly.from_poly(self.ctx.zero() + other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPoly.from_poly(self.ctx.const(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._coeffs)
        for m, c in other._coeffs.items():
            out[m] = out[m] + c if m in out else c
        return LaurentPoly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ctx, {m: -c for m, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, Polynomial] = {}
        for m1, c1 in self._coeffs.items():
            for m2, c2 in other._coeffs.items():
                prod = c1 * c2
                m = m1 + m2
                out[m] = out[m] + prod if m in out else prod
        return LaurentPoly(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = LaurentPoly.from_poly(self.ctx.one())
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.ctx == other.ctx and self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, frozenset(self._coeffs.items())))

    def eval_at_one(self) -> Polynomial:
        out = self.ctx.zero()
        for c in self._coeffs.values():
            out = out + c
        return out

    def derivative(self) -> "LaurentPoly":
        return LaurentPoly(self.ctx, {m - 1: c.scale(m) for m, c in self._coeffs.items() if m})

    def map_coeffs(self, fn) -> "LaurentPoly":
        return LaurentPoly(self.ctx, {m: fn(c) for m, c in self._coeffs.items()})

    def __str__(self):
        if not self._coeffs:
            return "0"
        parts = []
        for m, c in sorted(self._coeffs.items(), reverse=True):
            tp = "" if m == 0 else ("t" if m == 1 else f"t^{m}" if m > 0 else f"t^({m})")
            body = str(c)
            if not tp:
                parts.append(f"({body})")
            elif body == "1":
                parts.append(tp)
            else:
                parts.append(f"{tp}*({body})")
        return " + ".join(parts)

    __repr__ = __str__


def laurent_eval_at_one(L: LaurentPoly) -> Polynomial:
    return L.eval_at_one()


def laurent_formal_derivative(L: LaurentPoly) -> LaurentPoly:
    return L.derivative()


def laurent_substitute(p: Polynomial, images: Sequence[LaurentPoly]) -> LaurentPoly:
    """Apply the homomorphism x_i -> images[i] (Laurent in t) to p."""
    if len(images) != p.ctx.n:
        raise ContextMismatch(f"need {p.ctx.n} images, got {len(images)}")
    ctx = images[0].ctx if images else p.ctx
    cache: dict[tuple[int, int], LaurentPoly] = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            cache[key] = LaurentPoly.from_poly(ctx.one()) if k == 0 else power(i, k - 1) * images[i]
        return cache[key]

    out = LaurentPoly(ctx)
    for exps, c in p.items():
        term = LaurentPoly.from_poly(ctx.const(c))
        for i, k in enumerate(exps):
            if k:
                term = term * power(i, k)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Exact dense linear algebra
# ---------------------------------------------------------------------------


class RationalMatrix:
    """Exact rational matrix. Row reduction works on a sparse copy."""

    def __init__(self, rows: Iterable[Iterable], cols: int | None = None):
        self.rows = tuple(tuple(_as_fraction(v) for v in row) for row in rows)
        if cols is None:
            if not self.rows:
                raise ValueError("cols required for an empty matrix")
            cols = len(self.rows[0])
        self.ncols = cols
        for row in self.rows:
            if len(row) != cols:
                raise ValueError("ragged matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    @classmethod
    def from_sparse(cls, sparse_rows: Iterable[Mapping[int, Fraction]], cols: int) -> "RationalMatrix":
        dense = []
        for r in sparse_rows:
            row = [Fraction(0)] * cols
            for j, v in r.items():
                row[j] = v
            dense.append(row)
        return cls(dense, cols)

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.rows)

    def rref(self) -> tuple[list[dict[int, Fraction]], list[int]]:
        return rref_sparse([{j: v for j, v in enumerate(row) if v} for row in self.rows], self.ncols)

    def rank(self) -> int:
        return len(self.rref()[1])


def rref_sparse(rows: list[dict[int, Fraction]], ncols: int) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form of sparse rows. Returns (pivot rows, pivot columns)."""
    work = [dict(r) for r in rows if r]
    pivots: list[int] = []
    reduced: list[dict[int, Fraction]] = []
    for col in range(ncols):
        pick = None
        for idx, r in enumerate(work):
            if col in r:
                if pick is None or len(r) < len(work[pick]):
                    pick = idx
        if pick is None:
            continue
        prow = work.pop(pick)
        inv = 1 / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        for r in work + reduced:
            f = r.get(col)
            if f:
                for j, v in prow.items():
                    nv = r.get(j, 0) - f * v
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
        work = [r for r in work if r]
        reduced.append(prow)
        pivots.append(col)
    return reduced, pivots


def nullspace_sparse(rows: list[dict[int, Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    reduced, pivots = rref_sparse(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for prow, pc in zip(reduced, pivots):
            c = prow.get(free)
            if c:
                v[pc] = -c
        basis.append(tuple(v))
    return basis


def solve_nullspace(M: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Exact basis of {v : M v = 0}."""
    return nullspace_sparse([{j: v for j, v in enumerate(row) if v} for row in M.rows], M.ncols)
