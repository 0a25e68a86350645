"""Push-forward of first-order systems through point transformations, and classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .canonical import PointTransformation, canonical_for_translation_scaling
from .errors import QuasiReduceError, SingularJetMap, SingularSystem, UnsupportedShape
from .expr.field import ONE_RF, ZERO_RF, RationalFunction, as_rf
from .expr.linear import adjugate, determinant, laplace_determinant, solve_linear
from .expr.ops import total_derivative
from .expr.symbols import Independent, Jet, Signature
from .liegeom import AlgebraReport, JetReduction, VectorField, check_symmetry, check_theorem1_structure
from .pdesystem import PDESystem, jet_degree

__all__ = [
    "ClassificationReport", "PDESystem", "ReductionResult", "classify", "jet_exchange",
    "push_forward", "reduce", "same_system", "primitive_in_jets",
]


# ---------------------------------------------------------------------------
# helpers


def _jet_rename(src: Signature, dst: Signature) -> dict:
    return {src.jet(a, i): as_rf(dst.jet(a, i)) for a in range(1, src.m + 1) for i in range(1, src.n + 1)}


def primitive_in_jets(e: RationalFunction, jets) -> tuple:
    """Split ``numerator(e)`` as ``content * primitive`` where the content is jet-free.

    Returns ``(primitive, content)``; the primitive part has a jet-free gcd
    of coefficients equal to 1.
    """
    e = as_rf(e).numerator()
    if e.is_zero():
        return e, ONE_RF
    parts = list(e.split(jets).values())
    g = parts[0].num
    for p in parts[1:]:
        if g.is_constant():
            break
        g = g.gcd(p.num)
    if g.is_constant():
        return e, ONE_RF
    content = RationalFunction.poly(e.space, g)
    return e / content, content


# ---------------------------------------------------------------------------
# jet exchange and push-forward


def jet_exchange(t: PointTransformation) -> dict:
    """Old jets ``u_{A,i}`` as rational functions of ``(z, w, w-jets)``.

    Solves ``D_i W_B = sum_j w_{B,j} D_i Z_j`` for the old jets, then
    rewrites ``(x, u)`` through the inverse map.
    """
    t = t.with_inverse()
    sig, tgt = t.signature, t.target
    xs, us = sig.independents(), sig.dependents()
    unknowns = sig.jets()
    eqs = []
    for i in range(1, sig.n + 1):
        for b in range(sig.m):
            W = t.W[b]
            lhs = total_derivative(W, i, sig)
            rhs = ZERO_RF
            for j in range(sig.n):
                rhs = rhs + as_rf(tgt.jet(b + 1, j + 1)) * total_derivative(t.Z[j], i, sig)
            eqs.append(lhs - rhs)
    try:
        sol = solve_linear(eqs, unknowns)
    except SingularSystem as exc:
        # the block for i = 1 carries the generic determinant
        block = []
        for b in range(sig.m):
            row = []
            for a in range(sig.m):
                e = eqs[b]
                row.append(e.diff(sig.jet(a + 1, 1)))
            block.append(row)
        raise SingularJetMap("jet map is singular", determinant(block)) from exc
    inv = t.inverse_bindings()
    return {j: sol[j].subs(inv) for j in unknowns}


def _pullback_bindings(t: PointTransformation) -> tuple:
    """Target jets as ``(numerator polynomial, common denominator det J)`` in source jets."""
    sig, tgt = t.signature, t.target
    J = [[total_derivative(t.Z[j], i, sig) for i in range(1, sig.n + 1)] for j in range(sig.n)]
    M = [[total_derivative(t.W[b], i, sig) for i in range(1, sig.n + 1)] for b in range(sig.m)]
    adj = adjugate(J)
    det = laplace_determinant(J)
    nums = {}
    for b in range(sig.m):
        for j in range(sig.n):
            v = ZERO_RF
            for i in range(sig.n):
                if not M[b][i].is_zero() and not adj[i][j].is_zero():
                    v = v + M[b][i] * adj[i][j]
            nums[tgt.jet(b + 1, j + 1)] = v
    point = t.forward_bindings()
    return nums, det, point


def _homogeneous_pullback(T: RationalFunction, t: PointTransformation, nums, point) -> RationalFunction:
    """``T`` (homogeneous of degree k in target jets) times ``det J^k`` pulled back."""
    binds = dict(point)
    binds.update(nums)
    return T.subs(binds)


def _is_jet_linear(e: RationalFunction, jets) -> bool:
    return e.degree_in(jets) == 1 and not e.denominator().depends_on(lambda s: isinstance(s, Jet))


def _is_homogeneous(e: RationalFunction, jets) -> bool:
    return e.low_degree_in(jets) == e.degree_in(jets)


def _jet_free_ratio(a: RationalFunction, b: RationalFunction, jets):
    """``s`` with ``a = s * b`` and ``s`` jet-free, or ``None``."""
    if b.is_zero():
        return None if not a.is_zero() else ONE_RF
    lo = b.low_degree_in(jets)
    if a.low_degree_in(jets) != lo:
        return None
    pa = a.homogeneous_part(jets, lo).split(jets)
    pb = b.homogeneous_part(jets, lo).split(jets)
    mono = next(iter(pb))
    if mono not in pa:
        return None
    s = pa[mono] / pb[mono]
    if s.depends_on(lambda v: isinstance(v, Jet)):
        return None
    if not (a - s * b).is_zero():
        return None
    return s


def _fast_push_forward(system: PDESystem, t: PointTransformation):
    """Candidate-and-verify route for ``W = u``.

    Each equation's lowest homogeneous jet part is transplanted to the target
    variables; the candidate is accepted only if its pull-back equals a
    jet-free multiple of the original equation modulo the linear subsystem,
    and the linear subsystems correspond in both directions.
    """
    sig, tgt = t.signature, t.target
    if any(not (w - as_rf(u)).is_zero() for w, u in zip(t.W, sig.dependents())):
        return None
    t = t.with_inverse()
    inv = t.inverse_bindings()
    src_jets, dst_jets = sig.jets(), tgt.jets()
    rename = _jet_rename(sig, tgt)
    eqs = [as_rf(e).numerator() for e in system.equations]
    red = JetReduction(eqs, sig)
    cands = []
    for e in eqs:
        lo = e.low_degree_in(src_jets)
        if lo < 1:
            return None
        part = e.homogeneous_part(src_jets, lo)
        binds = dict(inv)
        binds.update(rename)
        cands.append(part.subs(binds))
    nums, det, point = _pullback_bindings(t)
    factors = []
    for e, T in zip(eqs, cands):
        pulled = red.reduce(_homogeneous_pullback(T, t, nums, point))
        target = red.reduce(e)
        s = _jet_free_ratio(pulled, target, src_jets)
        if s is None:
            return None
        factors.append(s)
    # converse for the linear part: pulling the source linear equations back
    # through the inverse must vanish modulo the candidate linear equations
    tinv = t.inverted()
    lin = [T for e, T in zip(eqs, cands) if _is_jet_linear(e, src_jets)]
    red_t = JetReduction(lin, tgt)
    if red_t.rank != red.rank:
        return None
    nums_i, _, point_i = _pullback_bindings(tinv)
    back = {tinv.target.jet(a, i): nums_i[tinv.target.jet(a, i)] for a in range(1, sig.m + 1) for i in range(1, sig.n + 1)}
    for e in red.equations:
        binds = dict(point_i)
        binds.update(back)
        if not red_t.reduce(e.subs(binds)).is_zero():
            return None
    out = []
    cleared = [det]
    for T in cands:
        p, c = primitive_in_jets(T, dst_jets)
        out.append(p)
        if not c.is_constant():
            cleared.append(c)
    return out, cleared + [s for s in factors if not s.is_constant()]


def _factors(e: RationalFunction) -> list:
    """Irreducible non-constant factors of the numerator, as rational functions."""
    _, fl = e.num.factor()
    return [RationalFunction.poly(e.space, f) for f, _ in fl]


def _strip_factors(e: RationalFunction, bad: list, jets):
    """Remove jet-free content and any power of a factor in ``bad``."""
    e, content = primitive_in_jets(e, jets)
    cleared = [] if content.is_constant() else [content]
    for b in bad:
        while True:
            q = e / b
            if not q.is_polynomial():
                break
            e = q
            cleared.append(b)
    return e, cleared


def _recover_linear(raw: list, system: PDESystem, t: PointTransformation) -> list:
    """Swap pushed source-linear equations for their linear jet parts when certified.

    Candidates are pruned until every kept equation vanishes modulo the kept
    linear parts; the swap then needs the linear parts, pulled back to the
    source, to vanish modulo the corresponding source equations.
    """
    src_jets, dst_jets = t.signature.jets(), t.target.jets()
    eqs = [as_rf(e).numerator() for e in system.equations]
    cands = {}
    for k, e in enumerate(eqs):
        v = raw[k]
        if not _is_jet_linear(e, src_jets) or v.is_zero():
            continue
        if _is_jet_linear(v, dst_jets):
            cands[k] = v
        elif v.low_degree_in(dst_jets) == 1:
            cands[k] = v.homogeneous_part(dst_jets, 1)
    while True:
        red_t = JetReduction(list(cands.values()), t.target)
        keep = {k: c for k, c in cands.items() if red_t.reduce(raw[k]).numerator().is_zero()}
        if len(keep) == len(cands):
            break
        cands = keep
    swap = {k: c for k, c in cands.items() if c is not raw[k]}
    if not swap:
        return raw
    red_s = JetReduction([eqs[k] for k in cands], t.signature)
    if red_s.rank != red_t.rank:
        return raw
    back = dict(t.forward_bindings())
    back.update(jet_exchange(t.inverted()))
    for c in swap.values():
        if not red_s.reduce(c.subs(back).numerator()).numerator().is_zero():
            return raw
    return [swap.get(k, v) for k, v in enumerate(raw)]


def _generic_push_forward(system: PDESystem, t: PointTransformation):
    """Jet exchange and substitution; the target's linear equations are used
    to reduce the rest, then factors of the jet-map denominators (nonzero
    wherever the transformation is valid) are removed."""
    t = t.with_inverse()
    jm = jet_exchange(t)
    binds = dict(t.inverse_bindings())
    binds.update(jm)
    dst_jets = t.target.jets()
    raw, cleared = [], []
    for e in system.equations:
        v = as_rf(e).subs(binds)
        if not v.denominator().is_constant():
            cleared.append(v.denominator())
        raw.append(v.numerator())
    raw = _recover_linear(raw, system, t)
    red = JetReduction([v for v in raw if _is_jet_linear(v, dst_jets)], t.target)
    bad: list = []
    for v in jm.values():
        d = v.denominator()
        if d.is_constant():
            continue
        for g in (d, red.reduce(d).numerator()):
            for f in _factors(g):
                if all(not (f - b).is_zero() for b in bad):
                    bad.append(f)
    out = []
    for v in raw:
        if not _is_jet_linear(v, dst_jets):
            v = red.reduce(v).numerator()
        v, c = _strip_factors(v, bad, dst_jets)
        cleared.extend(c)
        out.append(v)
    return out, cleared


def push_forward(system: PDESystem, t: PointTransformation, method: str = "auto") -> PDESystem:
    """The system in the target variables, denominators and jet-free contents cleared.

    ``method`` is ``"auto"`` (verified fast route, generic fallback),
    ``"fast"`` or ``"generic"``.  Cleared factors are recorded in
    ``metadata["cleared_factors"]``.
    """
    result = None
    used = "generic"
    if method in ("auto", "fast"):
        result = _fast_push_forward(system, t)
        if result is not None:
            used = "fast"
        elif method == "fast":
            raise UnsupportedShape("fast push-forward not applicable or not verified")
    if result is None:
        result = _generic_push_forward(system, t)
    eqs, cleared = result
    return PDESystem(t.target, tuple(eqs), system.name, {"cleared_factors": cleared, "method": used})


# ---------------------------------------------------------------------------
# classification


@dataclass
class ClassificationReport:
    autonomous: bool
    jet_degree: list
    homogeneous_in_jets: list
    quasilinear: bool
    matrices: list | None = None
    residual_source: list | None = None


def classify(system: PDESystem) -> ClassificationReport:
    sig = system.signature
    jets = sig.jets()
    xs = set(sig.independents())
    eqs = [as_rf(e).numerator() for e in system.equations]
    autonomous = not any(e.depends_on(xs.__contains__) for e in eqs)
    degs = [e.degree_in(jets) for e in eqs]
    homog = [e.is_zero() or _is_homogeneous(e, jets) for e in eqs]
    sources = [e.homogeneous_part(jets, 0) for e in eqs]
    quasi = autonomous and all(d == 1 for d in degs) and all(homog)
    matrices = None
    if all(d <= 1 for d in degs) and all(homog):
        matrices = []
        for i in range(1, sig.n + 1):
            A = []
            for e in eqs:
                A.append([e.diff(sig.jet(b, i)) for b in range(1, sig.m + 1)])
            matrices.append(A)
    residual = [s for s in sources if not s.is_zero()] or None
    return ClassificationReport(autonomous, degs, homog, quasi, matrices, residual)


# ---------------------------------------------------------------------------
# comparison


def same_system(a: Sequence, b: Sequence, signature: Signature) -> bool:
    """Unordered match up to a nonzero jet-free factor per equation.

    Equations that do not match directly are compared modulo the equations
    that did, so ``u[1,2]`` and ``u[2,1]`` are interchangeable once the
    exchange relation is common to both systems.
    """
    jets = signature.jets()
    A = [as_rf(e).numerator() for e in a]
    B = [as_rf(e).numerator() for e in b]
    if len(A) != len(B):
        return False
    matched_a, used_b = [], set()
    rest_a = []
    for e in A:
        hit = None
        for k, f in enumerate(B):
            if k not in used_b and _jet_free_ratio(e, f, jets) is not None:
                hit = k
                break
        if hit is None:
            rest_a.append(e)
        else:
            used_b.add(hit)
            matched_a.append(e)
    rest_b = [f for k, f in enumerate(B) if k not in used_b]
    if not rest_a:
        return True
    red = JetReduction(matched_a, signature)
    rest_b = [red.reduce(f) for f in rest_b]
    for e in rest_a:
        e = red.reduce(e)
        hit = None
        for k, f in enumerate(rest_b):
            if f is not None and _jet_free_ratio(e, f, jets) is not None:
                hit = k
                break
        if hit is None:
            return False
        rest_b[hit] = None
    return True


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class ReductionResult:
    ok: bool
    stage: str
    algebra: AlgebraReport | None = None
    symmetry: list = field(default_factory=list)
    transformation: PointTransformation | None = None
    system: PDESystem | None = None
    classification: ClassificationReport | None = None
    message: str = ""


def reduce(system: PDESystem, fields: Sequence[VectorField], mult_degree: int | None = None, method: str = "auto") -> ReductionResult:
    """Structure check, symmetry checks, canonical variables, push-forward, classification."""
    fields = list(fields)
    res = ReductionResult(False, "algebra")
    res.algebra = check_theorem1_structure(fields)
    if not res.algebra.structure_ok:
        res.message = "; ".join(res.algebra.failures)
        return res
    res.stage = "symmetry"
    for k, X in enumerate(fields, 1):
        cert = check_symmetry(system, X, mult_degree)
        res.symmetry.append(cert)
        if not cert.holds:
            res.message = f"field {k} is not a symmetry: {len(cert.residuals)} residual condition(s)"
            return res
    res.stage = "canonical"
    try:
        res.transformation = canonical_for_translation_scaling(fields)
    except QuasiReduceError as exc:
        res.message = str(exc)
        return res
    res.stage = "push_forward"
    try:
        res.system = push_forward(system, res.transformation, method)
    except QuasiReduceError as exc:
        res.message = str(exc)
        return res
    res.stage = "classify"
    res.classification = classify(res.system)
    if not res.classification.quasilinear:
        res.message = "target system is not autonomous homogeneous quasilinear"
        return res
    res.ok = True
    res.stage = "done"
    return res
