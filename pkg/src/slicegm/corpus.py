"""Built-in example problems.

Families:

* dimension 1: d/dx with slices x and x + c;
* dimension 2: d/dy-type derivations with slices of the form y + p(x)
  (and rescaled / linearly mixed variants), each with a conjugating map;
* dimension 3: Wang normal forms f(x) d/dy + g(x) d/dz with gcd(f, g) = 1,
  Bezout slices and explicit conjugators;
* slice shifts s + a for a kernel generator a;
* a dimension-4 nice derivation;
* a Danielewski-type surface x^2 z = y^2 as a quotient-ring entry.

Ranks are recorded as metadata; they are never computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

from .deriv import Derivation
from .ideal import GRLEX, MonomialOrder
from .linearize import wang_normal_form
from .morph import AutomorphismPair, Endomorphism, invert_triangular
from .parse import parse_polynomial
from .ring import Polynomial, VarContext


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    provenance: str
    ctx: VarContext
    D: Derivation | None = None
    s: Polynomial | None = None
    N: int = 1
    phi: AutomorphismPair | None = None
    kernel_generators: tuple[Polynomial, ...] = ()
    rank: int | None = None
    ideal: tuple[Polynomial, ...] = ()
    order: MonomialOrder = GRLEX
    non_descending: tuple[Derivation, ...] = field(default=())

    @property
    def is_quotient(self) -> bool:
        return bool(self.ideal)


def _ctx(*names: str) -> VarContext:
    return VarContext(names)


def _polys(ctx: VarContext, *texts: str) -> tuple[Polynomial, ...]:
    return tuple(parse_polynomial(t, ctx) for t in texts)


def _der(ctx: VarContext, *texts: str) -> Derivation:
    return Derivation(ctx, _polys(ctx, *texts))


def _triangular(ctx: VarContext, *texts: str) -> AutomorphismPair:
    return invert_triangular(Endomorphism(ctx, _polys(ctx, *texts)))


def _pair(ctx: VarContext, fwd: tuple[str, ...], inv: tuple[str, ...]) -> AutomorphismPair:
    return AutomorphismPair(Endomorphism(ctx, _polys(ctx, *fwd)), Endomorphism(ctx, _polys(ctx, *inv)))


WANG_PAIRS = (("1", "0", 1), ("x", "1", 1), ("x^2", "1", 2), ("x", "1 + x", -1))


def _base_entries() -> list[CorpusEntry]:
    out = []

    c1 = _ctx("x")
    out.append(
        CorpusEntry("n1-ddx", "n=1: d/dx, slice x", c1, _der(c1, "1"), c1.var(0), 1, AutomorphismPair.identity(c1), (), 1)
    )
    out.append(
        CorpusEntry(
            "n1-ddx-shifted", "n=1: d/dx, slice x + 3, N = -1", c1, _der(c1, "1"), _polys(c1, "x + 3")[0], -1,
            AutomorphismPair.identity(c1), (), 1,
        )
    )

    c2 = _ctx("x", "y")
    ddy = _der(c2, "0", "1")
    out.append(
        CorpusEntry("n2-ddy", "n=2: d/dy, slice y", c2, ddy, c2.var(1), 2, AutomorphismPair.identity(c2), (c2.var(0),), 1)
    )
    out.append(
        CorpusEntry(
            "n2-ddy-offset", "n=2: d/dy, slice y + x^2 (affine in y, quadratic offset)", c2, ddy,
            _polys(c2, "y + x^2")[0], 1, AutomorphismPair.identity(c2), (c2.var(0),), 1,
        )
    )
    out.append(
        CorpusEntry(
            "n2-scaled", "n=2: 3 d/dy, slice y/3 + x^3", c2, _der(c2, "0", "3"), _polys(c2, "1/3*y + x^3")[0], 3,
            _triangular(c2, "x", "3*y"), (c2.var(0),), 1,
        )
    )
    out.append(
        CorpusEntry(
            "n2-mixed", "n=2: d/dx + d/dy, slice x", c2, _der(c2, "1", "1"), c2.var(0), -2,
            _pair(c2, ("y", "y - x"), ("x - y", "x")), _polys(c2, "x - y"), 1,
        )
    )

    c3 = _ctx("x", "y", "z")
    for f, g, N in WANG_PAIRS:
        w = wang_normal_form(*_polys(c3, f, g))
        out.append(
            CorpusEntry(
                f"n3-wang-{f}-{g}".replace(" ", "").replace("^", ""),
                f"n=3 Wang normal form (f, g) = ({f}, {g}), Bezout slice",
                c3, w.derivation, w.slice, N, w.conjugator, w.kernel_generators, 1,
            )
        )

    c4 = _ctx("x1", "x2", "x3", "x4")
    out.append(
        CorpusEntry(
            "n4-nice", "n=4: x1 d/dx2 + x1^2 d/dx3 + d/dx4, slice x4", c4,
            _der(c4, "0", "x1", "x1^2", "1"), c4.var(3), 2,
            _triangular(c4, "x1", "x2 + x1*x4", "x3 + x1^2*x4", "x4"),
            _polys(c4, "x1", "x2 - x1*x4", "x3 - x1^2*x4"), 1,
        )
    )

    out.append(
        CorpusEntry(
            "danielewski", "quotient k[x,y,z]/(x^2 z - y^2) with D: x -> 0, y -> x^2, z -> 2y", c3,
            _der(c3, "0", "x^2", "2*y"), None, 1, None, (c3.var(0),), None,
            ideal=_polys(c3, "x^2*z - y^2"), non_descending=(_der(c3, "1", "0", "0"),),
        )
    )
    return out


def _shifted(entries: list[CorpusEntry]) -> list[CorpusEntry]:
    out = []
    for e in entries:
        if e.ctx.n != 3 or e.is_quotient:
            continue
        for k, a in enumerate(e.kernel_generators):
            out.append(
                replace(
                    e,
                    name=f"{e.name}-shift{k + 1}",
                    provenance=f"{e.provenance}; slice shifted by kernel generator {a}",
                    s=e.s + a,
                )
            )
    return out


@lru_cache(maxsize=1)
def entries() -> tuple[CorpusEntry, ...]:
    base = _base_entries()
    return tuple(base + _shifted(base))


def lnd_entries() -> tuple[CorpusEntry, ...]:
    return tuple(e for e in entries() if not e.is_quotient)


def get(name: str) -> CorpusEntry:
    for e in entries():
        if e.name == name:
            return e
    raise KeyError(name)
