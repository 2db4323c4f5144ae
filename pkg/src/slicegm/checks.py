"""Verification suites that turn library calls into report lines."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import action, flow, ideal, kernel, linearize
from .deriv import Derivation, apply, is_lnd, is_nice, verify_slice
from .errors import InternalVerificationError, SliceGmError
from .morph import AutomorphismPair, compose_pairs, conjugate_derivation
from .ring import Polynomial

PASS, FAIL, SKIPPED, UNKNOWN = "pass", "fail", "skipped", "unknown"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    residual: str | None = None

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail, "residual": self.residual}


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    internal_error: bool = False
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, status: str, detail: str = "", residual=None) -> Check:
        if status == FAIL and residual is None:
            raise ValueError(f"fail line {name!r} needs a residual")
        check = Check(name, status, detail, None if residual is None else str(residual))
        self.checks.append(check)
        return check

    def run(self, name: str, fn: Callable[[], tuple]) -> Check:
        """Run fn -> (status, detail[, residual]); library errors become fail lines."""
        try:
            result = fn()
        except InternalVerificationError as exc:
            self.internal_error = True
            return self.add(name, FAIL, f"internal verification failed: {exc}", _residual_of(exc))
        except SliceGmError as exc:
            return self.add(name, FAIL, str(exc), _residual_of(exc))
        status, detail, *rest = result
        residual = rest[0] if rest else None
        return self.add(name, status, detail, residual)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.detail, c.residual))
        self.internal_error |= other.internal_error
        if other.data:
            self.data[prefix.rstrip(": ") or other.title] = other.data

    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, SKIPPED: 0, UNKNOWN: 0}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    @property
    def exit_code(self) -> int:
        if self.internal_error:
            return 3
        counts = self.summary()
        return 1 if counts[FAIL] or counts[UNKNOWN] else 0

    def to_json(self) -> str:
        doc = {
            "title": self.title,
            "checks": [c.as_dict() for c in self.checks],
            "summary": self.summary(),
            "exit_code": self.exit_code,
            "data": self.data,
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)

    def render(self, quiet: bool = False, json_only: bool = False) -> str:
        fenced = "```json\n" + self.to_json() + "\n```"
        if json_only:
            return fenced
        lines = [self.title] + [f"  {n}" for n in self.notes]
        for c in self.checks:
            if quiet and c.status in (PASS, SKIPPED):
                continue
            line = f"[{c.status.upper():7}] {c.name}"
            if c.detail:
                line += f": {c.detail}"
            lines.append(line)
            if c.residual is not None and c.status != PASS:
                lines.append(f"          residual: {c.residual}")
        s = self.summary()
        lines.append(
            f"summary: {s[PASS]} pass, {s[FAIL]} fail, {s[UNKNOWN]} unknown, {s[SKIPPED]} skipped; exit {self.exit_code}"
        )
        return "\n".join(lines) + "\n\n" + fenced


def _residual_of(exc: Exception):
    for attr in ("residual", "difference", "value"):
        r = getattr(exc, attr, None)
        if r is not None:
            return r
    return "n/a"


def _first_nonzero(polys: Sequence[Polynomial], names: Sequence[str]) -> tuple[str, Polynomial] | None:
    for name, p in zip(names, polys):
        if p:
            return name, p
    return None


def _deriv_diff(a: Derivation, b: Derivation):
    return _first_nonzero([x - y for x, y in zip(a.images, b.images)], a.ctx.names)


# ---------------------------------------------------------------------------
# verify: LND, slice, action identities
# ---------------------------------------------------------------------------


def verify_suite(
    D: Derivation,
    s: Polynomial | None,
    N: int,
    kernel_gens: Sequence[Polynomial] = (),
    bound: int = 64,
    title: str = "verify",
) -> Report:
    rep = Report(title)
    names = D.ctx.names

    lnd = is_lnd(D, bound)
    if lnd.confirmed:
        degs = ", ".join(f"{v}:{d}" for v, d in zip(names, lnd.degrees))
        rep.add("locally nilpotent", PASS, f"D^j kills each generator ({degs})")
    else:
        rep.add("locally nilpotent", UNKNOWN, f"no D^j(x_i) = 0 found for j <= {bound}")

    nice = is_nice(D)
    nice_detail = "nice" if nice else f"not nice: D^2({names[nice.index]}) = {nice.value}"

    if s is None:
        rep.add("slice", SKIPPED, "no slice given")
    else:
        sl = verify_slice(D, s)
        if sl:
            rep.add("slice", PASS, f"D({s}) = 1")
        else:
            rep.add("slice", FAIL, f"D({s}) != 1", sl.residual)

    rep.add("niceness", PASS, nice_detail)

    ready = lnd.confirmed and s is not None and verify_slice(D, s).ok
    dependent = [
        "translation identity",
        "alpha = beta",
        "infinitesimal generator",
        "group law",
        "semisimplicity witness",
    ]
    if not ready:
        reason = "nilpotency not confirmed" if not lnd.confirmed else "no valid slice"
        for name in dependent:
            rep.add(name, SKIPPED, reason)
        return rep

    def translation():
        cases = [("T^2", [D.ctx.zero(), D.ctx.zero(), D.ctx.one()])]
        if kernel_gens:
            cases.append(("sum a_j T^j", list(kernel_gens)))
        for label, coeffs in cases:
            r = flow.translation_identity_residual(D, s, coeffs, bound)
            if r:
                return FAIL, f"fails for P = {label}", r
        return PASS, "exp(-lam D)(P(s)) = P(s - lam) for " + ", ".join(l for l, _ in cases)

    rep.run("translation identity", translation)

    beta_holder = {}

    def alpha_beta():
        beta = action.beta_freudenburg(D, s, N, bound)
        beta_holder["beta"] = beta
        routes = [("expansion", action.alpha_action(D, s, N, bound))]
        if nice:
            routes.append(("nice formula", action.alpha_nice(D, s, N)))
        for label, alpha in routes:
            cmp = action.compare_actions(alpha, beta)
            if not cmp:
                return FAIL, f"alpha ({label}) != beta on {names[cmp.index]}", cmp.difference
        return PASS, "beta agrees with alpha via " + " and ".join(l for l, _ in routes)

    rep.run("alpha = beta", alpha_beta)

    def generator():
        beta = beta_holder.get("beta") or action.beta_freudenburg(D, s, N, bound)
        gen = action.infinitesimal_generator(beta)
        diff = _deriv_diff(gen, action.build_partial(D, s, N))
        if diff:
            return FAIL, f"generator differs from N s D on {diff[0]}", diff[1]
        return PASS, f"ev_1 d/dt beta* = {N}*s*D"

    rep.run("infinitesimal generator", generator)

    def group_law():
        res = action.verify_group_law(D, s, N, bound)
        if not res:
            return FAIL, f"fails on {names[res.index]}", res.detail
        return PASS, "alpha_t alpha_u = alpha_tu and alpha_1 = id"

    rep.run("group law", group_law)

    def witness():
        elems = [D.ctx.one()] + list(kernel_gens)
        rows = action.semisimplicity_witness(D, s, N, elems, 5)
        return PASS, f"eigenvalue N*m on a*s^m for {len(elems)} kernel elements, m <= 5 ({len(rows)} rows)"

    rep.run("semisimplicity witness", witness)
    return rep


# ---------------------------------------------------------------------------
# linearize
# ---------------------------------------------------------------------------


def _cert_data(cert: linearize.LinearizationCertificate) -> dict:
    names = cert.psi.ctx.names
    return {
        "psi": {v: str(img) for v, img in zip(names, cert.psi.forward.images)},
        "psi_inverse": {v: str(img) for v, img in zip(names, cert.psi.inverse.images)},
        "p": str(cert.p),
        "diagonal": {v: str(img) for v, img in zip(names, cert.diagonal_derivation.images)},
        "provenance": cert.provenance,
        "N": cert.N,
    }


def linearize_suite(
    D: Derivation,
    s: Polynomial,
    N: int,
    phi: AutomorphismPair,
    kernel_gens: Sequence[Polynomial] = (),
    title: str = "linearize",
) -> Report:
    rep = Report(title)
    names = D.ctx.names
    last = names[-1]
    holder = {}

    def cond3():
        c3 = linearize.check_condition_three(D, s, phi)
        holder["c3"] = c3
        if not c3:
            bad = _first_nonzero(c3.derivation_residuals, names)
            residual = bad[1] if bad else c3.p
            return FAIL, c3.reason, residual
        return PASS, f"phi D phi^-1 = d/d{last}, phi(s) = {last} + ({c3.p})"

    def cond2():
        c2 = linearize.check_condition_two(D, s, phi)
        if c2:
            return PASS, f"phi D phi^-1 = d/d{last} and phi(s) = {last}"
        c3 = holder.get("c3")
        if c3 is not None and c3.ok:
            return SKIPPED, f"phi(s) = {last} + ({c3.p}); not needed since condition (3) holds"
        bad = _first_nonzero(c2.derivation_residuals, names)
        if bad:
            return FAIL, f"phi D phi^-1 differs from d/d{last} on {bad[0]}", bad[1]
        return FAIL, f"phi(s) != {last}", c2.slice_residual

    rep.run("condition (3)", cond3)
    rep.run("condition (2)", cond2)

    def certificate():
        if not holder["c3"]:
            return SKIPPED, "condition (3) fails"
        cert = linearize.build_linearizer(D, s, N, phi)
        holder["cert"] = cert
        rep.data["certificate"] = _cert_data(cert)
        return PASS, f"psi = tau∘phi conjugates N s D to {N}*{last}*d/d{last} ({cert.provenance})"

    rep.run("linearizing certificate", certificate)

    def reverify():
        cert = holder.get("cert")
        if cert is None:
            return SKIPPED, "no certificate"
        probes = [x * y for x in D.ctx.gens() for y in D.ctx.gens()] + [s, s * s]
        r = linearize.verify_certificate(cert, D, s, probes)
        if r is not None:
            return FAIL, "intertwining identity psi∘∂ = E∘psi fails", r
        return PASS, "psi(∂ b) = E(psi b) on generators and probes"

    rep.run("certificate re-verification", reverify)

    if kernel_gens:

        def criterion():
            kc = linearize.kernel_criterion_check(D, s, phi, kernel_gens)
            if kc.passed:
                return PASS, "phi(kernel gens) free of " + last + ", phi(s) - " + last + " free of " + last + ", phi D phi^-1 = d/d" + last
            if not kc.clause_a:
                bad = next(img for img, ok in kc.generators_free_of_last if not ok)
                return FAIL, f"clause (a): phi(g) involves {last}", bad
            if not kc.slice_ok:
                return FAIL, f"clause (b): phi(s) - {last} involves {last}", kc.slice_offset
            bad = _first_nonzero(kc.conjugation_residuals, names)
            return FAIL, "clause (c): phi D phi^-1 != d/d" + last, bad[1]

        rep.run("kernel criterion (sufficient direction)", criterion)
    return rep


def slice_independence_suite(
    D: Derivation, s: Polynomial, N: int, phi: AutomorphismPair | None, kernel_gens: Sequence[Polynomial], bound: int = 64
) -> Report:
    rep = Report("slice independence")
    for k, a in enumerate(kernel_gens):

        def one(a=a):
            sc = linearize.slice_conjugate(D, s, a, N, bound)
            if phi is None:
                return PASS, f"phi_a(s) = s - a, phi_a D phi_a^-1 = D, conjugate = N(s - a)D"
            original = linearize.build_linearizer(D, s, N, phi)
            shifted = linearize.build_linearizer(D, sc.new_slice, N, phi)
            # psi∘phi_a^-1 also linearizes N (s - a) D
            moved = compose_pairs(original.psi, sc.phi_a.inverted())
            target = linearize.diagonal_target(D.ctx, N)
            diff = _deriv_diff(conjugate_derivation(moved, sc.conjugated), target)
            if diff:
                return FAIL, f"psi∘phi_a^-1 fails to linearize on {diff[0]}", diff[1]
            r = linearize.verify_certificate(shifted, D, sc.new_slice)
            if r is not None:
                return FAIL, "shifted certificate fails re-verification", r
            return PASS, "assertion chain holds; certificates exist for s and s - a"

        rep.run(f"slice shift by a = {a}", one)
    return rep


# ---------------------------------------------------------------------------
# kernels and quotients
# ---------------------------------------------------------------------------


def kernel_suite(Ds: Sequence[Derivation], d: int, title: str = "kernel") -> Report:
    rep = Report(title)
    if len(Ds) == 1:

        def single():
            system = kernel.kernel_system(Ds, d)
            basis = kernel.kernel_basis(Ds[0], d)
            rep.data["kernel_basis"] = [str(p) for p in basis]
            rep.data["matrix_shape"] = list(system.shape)
            rows, cols = system.shape
            return PASS, f"dimension {len(basis)} in degree <= {d} (matrix {rows}x{cols})"

        rep.run("kernel basis", single)
        return rep

    def family():
        ml = kernel.ml_obstruction_report(Ds, d)
        rep.data["intersection_basis"] = [str(p) for p in ml.basis]
        rep.data["matrix_shape"] = list(ml.matrix_shape)
        rep.data["caveat"] = ml.caveat
        rows, cols = ml.matrix_shape
        rep.data["witness"] = None if ml.witness is None else str(ml.witness)
        return PASS, f"intersection of {len(Ds)} kernels has dimension {len(ml.basis)} in degree <= {d} (matrix {rows}x{cols})"

    rep.run("kernel intersection", family)

    def ml():
        w = rep.data.get("witness")
        if w is None:
            return PASS, f"no_witness_up_to({d}). {kernel.ML_CAVEAT}"
        return PASS, f"candidate witness {w}. {kernel.ML_CAVEAT}"

    rep.run("ML obstruction report", ml)
    return rep


def quotient_suite(
    Ds: Sequence[Derivation],
    gens: Sequence[Polynomial],
    d: int,
    order: ideal.MonomialOrder = ideal.GRLEX,
    title: str = "quotient kernel",
) -> Report:
    rep = Report(title)
    G = ideal.ideal_from(gens, order, Ds[0].ctx)
    rep.data["groebner_basis"] = [str(g) for g in G.generators]
    rep.add("Groebner basis", PASS if ideal.s_pairs_reduce_to_zero(G) else FAIL,
            f"{len(G.generators)} generators, S-pairs reduce to 0", None if ideal.s_pairs_reduce_to_zero(G) else "S-pair residual")
    descending = []
    for k, D in enumerate(Ds):
        chk = ideal.derivation_descends(D, G)
        if chk:
            rep.add(f"derivation {k + 1} descends", PASS, "D(I) ⊆ I")
            descending.append(D)
        else:
            rep.add(f"derivation {k + 1} descends", FAIL, f"D(g_{chk.index + 1}) not in I", chk.residual)
    if not descending or len(descending) != len(Ds):
        rep.add("quotient kernel", SKIPPED, "some derivation does not descend")
        return rep

    def qk():
        bases = [ideal.quotient_kernel_basis(D, G, d) for D in Ds]
        common = ideal.quotient_kernel_intersection(Ds, G, d) if len(Ds) > 1 else bases[0]
        rep.data["quotient_kernel_basis"] = [str(p) for p in common]
        w = kernel.pick_witness(common)
        rep.data["witness"] = None if w is None else str(w)
        rep.data["caveat"] = kernel.ML_CAVEAT
        head = f"dimension {len(common)} over standard monomials of degree <= {d} (degree of a class = degree of its normal form)"
        if w is None:
            return PASS, f"{head}; no_witness_up_to({d})"
        return PASS, f"{head}; candidate witness {w}. {kernel.ML_CAVEAT}"

    rep.run("quotient kernel", qk)
    return rep


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------


def _expansion_probes(e) -> list[Polynomial]:
    gens = e.ctx.gens()
    probes = [g * g for g in gens] + [gens[0] * gens[-1] * gens[-1]]
    if e.s is not None:
        probes.append(e.s**3 + gens[0])
    return probes


def expansion_suite(D: Derivation, s: Polynomial, probes: Sequence[Polynomial], bound: int = 64) -> Report:
    rep = Report("slice expansion")

    def run():
        for b in probes:
            coeffs = flow.slice_expansion(D, s, b, bound)
            total = D.ctx.zero()
            for i, a in enumerate(coeffs):
                Da = apply(D, a)
                if Da:
                    return FAIL, f"coefficient a_{i} of {b} not in ker D", Da
                total = total + a * s**i
            if total != b:
                return FAIL, f"sum a_i s^i != {b}", total - b
        return PASS, f"b = sum a_i s^i with a_i in ker D for {len(probes)} probes"

    rep.run("slice expansion", run)
    return rep


def kernel_span_suite(D: Derivation, kernel_gens: Sequence[Polynomial]) -> Report:
    rep = Report("kernel span")

    def run():
        d = max(g.degree() for g in kernel_gens)
        basis = kernel.kernel_basis(D, d)
        for g in kernel_gens:
            if not kernel.in_span(basis, g):
                return FAIL, f"{g} outside the degree-{d} kernel basis", g
        return PASS, f"kernel generators lie in the degree <= {d} kernel basis (dimension {len(basis)})"

    rep.run("kernel generators in kernel basis", run)
    return rep


def corpus_entry_report(e, bound: int = 64) -> Report:
    """Everything the corpus checks for one entry, as a single report."""
    rep = Report(e.name)
    if e.is_quotient:
        rep.extend(quotient_suite([e.D], list(e.ideal), 1, e.order), "quotient: ")
        G = ideal.ideal_from(list(e.ideal), e.order, e.ctx)
        for k, bad in enumerate(e.non_descending):
            chk = ideal.derivation_descends(bad, G)
            if chk:
                rep.add(f"non-descending derivation {k + 1} rejected", FAIL, "derivation unexpectedly preserves the ideal", "0")
            else:
                rep.add(
                    f"non-descending derivation {k + 1} rejected",
                    PASS,
                    f"residual NF(D(g_{chk.index + 1})) = {chk.residual}",
                )
        basis = [ideal.normal_form(p, G) for p in ideal.quotient_kernel_basis(e.D, G, 1)]
        x = e.ctx.var(0)
        if kernel.in_span(basis, x):
            rep.add("quotient kernel contains x at degree 1", PASS, ", ".join(str(p) for p in basis))
        else:
            rep.add("quotient kernel contains x at degree 1", FAIL, "x not in the degree-1 quotient kernel", x)
        return rep

    rep.extend(verify_suite(e.D, e.s, e.N, e.kernel_generators, bound), "verify: ")
    rep.extend(expansion_suite(e.D, e.s, _expansion_probes(e), bound), "")
    if e.kernel_generators:
        rep.extend(kernel_span_suite(e.D, e.kernel_generators), "")
    if e.phi is not None:
        rep.extend(linearize_suite(e.D, e.s, e.N, e.phi, e.kernel_generators), "linearize: ")
    if e.kernel_generators:
        rep.extend(slice_independence_suite(e.D, e.s, e.N, e.phi, e.kernel_generators, bound), "")
    return rep


def corpus_suite(entries, bound: int = 64, workers: int | None = None) -> Report:
    """Entries are checked concurrently; lines are merged in entry order."""
    from concurrent.futures import ThreadPoolExecutor

    rep = Report("corpus run")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda e: corpus_entry_report(e, bound), entries))
    for e, sub in zip(entries, results):
        rep.extend(sub, f"{e.name}: ")
    rep.data = {"entries": [e.name for e in entries]}
    return rep
