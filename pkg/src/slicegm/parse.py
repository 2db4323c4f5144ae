"""Polynomial expressions and problem files.

Expression grammar (explicit ``*`` required between factors)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | NAME | "(" expr ")"

Division is only allowed by a nonzero constant, which is how rational
literals such as ``1/2*x`` are written. Problem files are TOML; see the
README for a complete example.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ParseError, ProblemError
from .ring import RESERVED, Polynomial, VarContext

MAX_EXPONENT = 1000
MAX_DEPTH = 100
MAX_LITERAL_DIGITS = 4000

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<num>[0-9]+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            chunk = m.group()
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = pos + chunk.rfind("\n") + 1
        else:
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: VarContext):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx
        self.depth = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def parse(self) -> Polynomial:
        if self.peek().kind == "eof":
            self.fail("empty expression")
        p = self.expr()
        if self.peek().kind != "eof":
            self.fail(f"unexpected {self.peek().text!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.next()
            q = self.unary()
            if op.text == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.fail("division is only allowed by a nonzero constant", op)
                p = p / q.constant_value()
        return p

    def unary(self) -> Polynomial:
        tok = self.peek()
        if tok.text in ("+", "-"):
            self.next()
            self._enter(tok)
            try:
                p = self.unary()
            finally:
                self.depth -= 1
            return -p if tok.text == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek().text == "^":
            self.next()
            tok = self.peek()
            if tok.text == "-":
                self.fail("negative exponent", tok)
            if tok.text == "(":
                self.fail("exponent must be an integer literal", tok)
            if tok.kind != "num":
                self.fail("expected integer exponent", tok)
            self.next()
            k = self._int(tok)
            if k > MAX_EXPONENT:
                self.fail(f"exponent larger than {MAX_EXPONENT}", tok)
            if self.peek().text == "^":
                self.fail("chained exponents need parentheses")
            return base**k
        return base

    def atom(self) -> Polynomial:
        tok = self.next()
        if tok.kind == "num":
            return self.ctx.const(self._int(tok))
        if tok.kind == "name":
            return self._variable(tok)
        if tok.text == "(":
            self._enter(tok)
            try:
                p = self.expr()
            finally:
                self.depth -= 1
            if self.peek().text != ")":
                self.fail("expected ')'")
            self.next()
            return p
        if tok.kind == "eof":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected {tok.text!r}", tok)

    def _enter(self, tok: _Tok):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail("expression nested too deeply", tok)

    def _int(self, tok: _Tok) -> int:
        if len(tok.text) > MAX_LITERAL_DIGITS:
            self.fail("integer literal too long", tok)
        return int(tok.text)

    def _variable(self, tok: _Tok) -> Polynomial:
        names = self.ctx.names
        if tok.text in names:
            return self.ctx.var(tok.text)
        if tok.text == "x_n":
            # the distinguished last variable
            return self.ctx.var(self.ctx.n - 1)
        self.fail(f"unknown variable {tok.text!r}", tok)


def parse_polynomial(text: str, ctx: VarContext) -> Polynomial:
    if not isinstance(text, str):
        raise ParseError(f"expected a string expression, got {type(text).__name__}")
    return _Parser(text, ctx).parse()


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(exps, names) -> str:
    parts = []
    for name, k in zip(names, exps):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Canonical text: graded-lex descending terms, ``a/b*x^2*y`` style."""
    if p.is_zero():
        return "0"
    out = []
    for idx, (exps, c) in enumerate(p.items()):
        mono = _format_monomial(exps, p.ctx.names)
        mag = abs(c)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if idx == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------

DEFAULT_DEGREE_BOUND = 8
DEFAULT_NILPOTENCY_BOUND = 64

_TOP_LEVEL = {"name", "ring", "derivation", "slice", "action", "phi", "phi_inv", "kernel", "ideal", "bounds", "family"}


@dataclass(frozen=True)
class ProblemSpec:
    context: VarContext
    derivation_images: tuple[Polynomial, ...]
    slice: Polynomial | None = None
    N: int = 1
    phi_images: tuple[Polynomial, ...] | None = None
    phi_inverse_images: tuple[Polynomial, ...] | None = None
    kernel_generators: tuple[Polynomial, ...] = ()
    degree_bound: int = DEFAULT_DEGREE_BOUND
    nilpotency_bound: int = DEFAULT_NILPOTENCY_BOUND
    ideal_generators: tuple[Polynomial, ...] = ()
    family: tuple[tuple[Polynomial, ...], ...] = field(default=())
    name: str | None = None


_TOML_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def _poly(value, ctx: VarContext, path: str) -> Polynomial:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ProblemError(f"{path}: expected a polynomial string")
    try:
        return parse_polynomial(str(value), ctx)
    except ParseError as exc:
        raise ParseError(exc.message, exc.line, exc.column, path=path) from None


def _images(table, ctx: VarContext, path: str) -> tuple[Polynomial, ...]:
    if not isinstance(table, dict):
        raise ProblemError(f"[{path}] must be a table with one key per variable")
    missing = [v for v in ctx.names if v not in table]
    extra = [k for k in table if k not in ctx.names]
    if missing or extra:
        detail = []
        if missing:
            detail.append("missing " + ", ".join(missing))
        if extra:
            detail.append("unknown " + ", ".join(extra))
        raise ProblemError(
            f"[{path}]: arity mismatch, expected images for {list(ctx.names)} ({'; '.join(detail)})"
        )
    return tuple(_poly(table[v], ctx, f"{path}.{v}") for v in ctx.names)


def _poly_list(value, ctx, path) -> tuple[Polynomial, ...]:
    if not isinstance(value, list):
        raise ProblemError(f"{path}: expected a list of polynomial strings")
    return tuple(_poly(v, ctx, f"{path}[{i}]") for i, v in enumerate(value))


def _table(doc, key) -> dict:
    value = doc[key]
    if not isinstance(value, dict):
        raise ProblemError(f"[{key}] must be a table")
    return value


def _positive_int(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ProblemError(f"{path}: expected a positive integer")
    return value


def parse_problem(text: str) -> ProblemSpec:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _TOML_POS.search(str(exc))
        if m:
            line, col = int(m.group(1)), int(m.group(2))
        else:
            # tomli reports "(at end of document)" without coordinates
            lines = text.split("\n")
            line, col = len(lines), len(lines[-1]) + 1
        message = re.sub(r"\s*\(at [^)]*\)", "", str(exc)).strip()
        raise ParseError(f"invalid TOML: {message}", line, col) from None

    unknown = sorted(set(doc) - _TOP_LEVEL)
    if unknown:
        raise ProblemError(f"unknown top-level keys: {', '.join(unknown)}")
    if "ring" not in doc:
        raise ProblemError("missing mandatory table [ring]")
    if "derivation" not in doc:
        raise ProblemError("missing mandatory table [derivation]")

    names = _table(doc, "ring").get("vars")
    if not isinstance(names, list) or not names or not all(isinstance(v, str) for v in names):
        raise ProblemError("[ring].vars must be a nonempty list of variable names")
    reserved = [v for v in names if v in RESERVED]
    if reserved:
        raise ProblemError(f"[ring].vars: {', '.join(reserved)} reserved for the torus/formal parameters")
    try:
        ctx = VarContext(tuple(names))
    except ValueError as exc:
        raise ProblemError(f"[ring].vars: {exc}") from None

    images = _images(doc["derivation"], ctx, "derivation")

    s = None
    if "slice" in doc:
        raw = doc["slice"]
        if isinstance(raw, dict):
            if "s" not in raw:
                raise ProblemError("[slice] needs key s")
            raw = raw["s"]
            path = "slice.s"
        else:
            path = "slice"
        s = _poly(raw, ctx, path)

    N = 1
    if "action" in doc:
        act = doc["action"]
        if not isinstance(act, dict):
            raise ProblemError("[action] must be a table")
        N = act.get("N", 1)
        if isinstance(N, bool) or not isinstance(N, int):
            raise ProblemError("action.N: expected an integer")
        if N == 0:
            raise ProblemError("action.N must be nonzero")

    phi = phi_inv = None
    if ("phi" in doc) != ("phi_inv" in doc):
        raise ProblemError("[phi] and [phi_inv] must be given together")
    if "phi" in doc:
        phi = _images(doc["phi"], ctx, "phi")
        phi_inv = _images(doc["phi_inv"], ctx, "phi_inv")

    kernel = ()
    if "kernel" in doc:
        kernel = _poly_list(_table(doc, "kernel").get("generators", []), ctx, "kernel.generators")
    ideal = ()
    if "ideal" in doc:
        ideal = _poly_list(_table(doc, "ideal").get("generators", []), ctx, "ideal.generators")

    degree, nil = DEFAULT_DEGREE_BOUND, DEFAULT_NILPOTENCY_BOUND
    if "bounds" in doc:
        b = _table(doc, "bounds")
        if "degree" in b:
            degree = _positive_int(b["degree"], "bounds.degree")
        if "nilpotency" in b:
            nil = _positive_int(b["nilpotency"], "bounds.nilpotency")

    family = ()
    if "family" in doc:
        fam = doc["family"]
        if not isinstance(fam, list):
            raise ProblemError("family must be an array of tables ([[family]])")
        family = tuple(_images(t, ctx, f"family[{i}]") for i, t in enumerate(fam))

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ProblemError("name must be a string")

    return ProblemSpec(
        context=ctx,
        derivation_images=images,
        slice=s,
        N=N,
        phi_images=phi,
        phi_inverse_images=phi_inv,
        kernel_generators=kernel,
        degree_bound=degree,
        nilpotency_bound=nil,
        ideal_generators=ideal,
        family=family,
        name=name,
    )
