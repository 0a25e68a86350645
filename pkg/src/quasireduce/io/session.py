"""Session files: plain-text sections declaring symbols, fields, systems and specs.

Example::

    [signature]
    n = 2
    m = 2
    target = z w

    [parameters]
    names = a1 a2 a3

    [functions]
    f = 2
    k1 = 2

    [expressions]
    k5 = -((a1*a3 - a2^2)*k1 + a1*k2 + a2*k3 + a3*k4)

    [field:X3]
    xi = x1 - f;1, x2 - f;2
    eta = 0, 0

    [system:S]
    eq1 = u[2,1] - u[1,2]
    eq2 = k1*(u[1,1]*u[2,2] - u[1,2]^2) + k2*u[1,1] + k3*u[1,2] + k4*u[2,2] + k5

    [transformation:T]
    z = x1 - f;1, x2 - f;2
    w = u1, u2

    [ma_spec:generic]
    dimension = 1p1

Named expressions may be used inside later bodies.  Section and key names
are case-sensitive; duplicates are rejected.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..canonical import PointTransformation
from ..errors import ExprSyntaxError, SessionError
from ..expr.field import as_rf
from ..expr.symbols import Signature
from ..liegeom import VectorField
from ..monge_ampere import DIMENSIONS, MASpec, homogeneous_system, reduction_input
from ..pdesystem import PDESystem
from .parser import SymbolTable, parse_expr

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "sessions"
PATH_ENV = "QUASIREDUCE_PATH"

_KINDS = ("field", "system", "transformation", "ma_spec")


def split_top(text: str, sep: str = ",") -> list:
    """Split on ``sep`` outside parentheses and brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return out


@dataclass
class Session:
    signature: Signature
    target: Signature
    table: SymbolTable
    expressions: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    systems: dict = field(default_factory=dict)
    transformations: dict = field(default_factory=dict)
    specs: dict = field(default_factory=dict)
    source: str = "<string>"

    def get(self, kind: str, name: str):
        store = {"field": self.fields, "system": self.systems, "transformation": self.transformations, "ma_spec": self.specs}[kind]
        if name not in store:
            known = ", ".join(store) or "none"
            raise SessionError(f"no {kind} named {name!r} in {self.source} (known: {known})")
        value = store[name]
        if callable(value):
            # systems declared from a spec are built on first use
            value = store[name] = value()
        return value


def _parse(text: str, table: SymbolTable, where: str):
    try:
        return as_rf(parse_expr(text, table))
    except ExprSyntaxError as exc:
        raise type(exc)(f"{where}: {exc.message}", exc.line, exc.column) from None


def _int(cp, sec, key, default=None):
    try:
        return cp.getint(sec, key) if cp.has_option(sec, key) else default
    except ValueError:
        raise SessionError(f"[{sec}] {key} must be an integer") from None


def loads(text: str, source: str = "<string>") -> Session:
    cp = configparser.ConfigParser(interpolation=None, strict=True, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise SessionError(str(exc)) from None
    if not cp.has_section("signature"):
        raise SessionError(f"{source}: missing [signature] section")
    n = _int(cp, "signature", "n")
    m = _int(cp, "signature", "m")
    if not n or not m or n < 1 or m < 1:
        raise SessionError(f"{source}: [signature] needs positive n and m")
    xf = cp.get("signature", "independent", fallback="x").strip()
    uf = cp.get("signature", "dependent", fallback="u").strip()
    tf = cp.get("signature", "target", fallback="z w").split()
    if len(tf) != 2:
        raise SessionError(f"{source}: target must name two families, e.g. 'z w'")
    sig = Signature(n, m, xf, uf)
    tgt = Signature(n, m, tf[0], tf[1])
    params = cp.get("parameters", "names", fallback="").replace(",", " ").split() if cp.has_section("parameters") else []
    funcs = {}
    if cp.has_section("functions"):
        for k, v in cp.items("functions"):
            try:
                funcs[k] = int(v)
            except ValueError:
                raise SessionError(f"{source}: arity of {k!r} must be an integer") from None
    names = {}
    for kind, group in (("parameter", params), ("function", funcs)):
        for nm in group:
            if nm in names:
                raise SessionError(f"{source}: {nm!r} declared as both {names[nm]} and {kind}")
            names[nm] = kind
    table = SymbolTable([sig, tgt], set(params), funcs, {})
    sess = Session(sig, tgt, table, source=source)
    if cp.has_section("expressions"):
        for k, v in cp.items("expressions"):
            if k in names:
                raise SessionError(f"{source}: expression {k!r} shadows a declared {names[k]}")
            names[k] = "expression"
            rf = _parse(v, table, f"[expressions] {k}")
            sess.expressions[k] = rf
            table.macros[k] = rf.to_expr()
    seen = set()
    deferred = []
    for sec in cp.sections():
        if sec in ("signature", "parameters", "functions", "expressions"):
            continue
        if ":" not in sec:
            raise SessionError(f"{source}: unknown section [{sec}]")
        kind, name = (p.strip() for p in sec.split(":", 1))
        if kind not in _KINDS:
            raise SessionError(f"{source}: unknown section kind {kind!r}")
        if name in seen:
            raise SessionError(f"{source}: duplicate name {name!r}")
        seen.add(name)
        body = dict(cp.items(sec))
        if kind == "system" and "ma_spec" in body:
            deferred.append((name, body, sec))
        elif kind == "field":
            sess.fields[name] = _field(body, sig, table, sec)
        elif kind == "system":
            sess.systems[name] = _system(body, sig, table, sec, name)
        elif kind == "transformation":
            sess.transformations[name] = _transformation(body, sig, tgt, table, sec)
        else:
            sess.specs[name] = _spec(body, table, sec)
    for name, body, sec in deferred:
        sess.systems[name] = _spec_system(body, sess, sec, name)
    return sess


def _spec_system(body, sess, sec, name):
    """``ma_spec = NAME`` with ``impose = conditions`` (default) or ``homogenization``."""
    extra = set(body) - {"ma_spec", "impose"}
    if extra:
        raise SessionError(f"[{sec}] unknown keys {sorted(extra)}")
    spec = sess.get("ma_spec", body["ma_spec"].strip())
    mode = body.get("impose", "conditions").strip()
    if mode not in ("conditions", "homogenization"):
        raise SessionError(f"[{sec}] impose must be 'conditions' or 'homogenization'")

    def build():
        if mode == "conditions":
            system = reduction_input(spec)[0]
        else:
            system = homogeneous_system(spec)
        return PDESystem(system.signature, system.equations, name, dict(system.metadata))

    return build


def _vector(body, key, size, table, sec, default="0"):
    raw = body.get(key)
    parts = split_top(raw) if raw is not None else [default] * size
    if len(parts) != size:
        raise SessionError(f"[{sec}] {key} needs {size} entries, got {len(parts)}")
    return [_parse(p, table, f"[{sec}] {key}") for p in parts]


def _field(body, sig, table, sec) -> VectorField:
    extra = set(body) - {"xi", "eta"}
    if extra:
        raise SessionError(f"[{sec}] unknown keys {sorted(extra)}")
    return VectorField(sig, tuple(_vector(body, "xi", sig.n, table, sec)), tuple(_vector(body, "eta", sig.m, table, sec)), name=sec.split(":", 1)[1].strip())


def _system(body, sig, table, sec, name) -> PDESystem:
    eqs = [_parse(v, table, f"[{sec}] {k}") for k, v in body.items()]
    if not eqs:
        raise SessionError(f"[{sec}] has no equations")
    return PDESystem(sig, tuple(eqs), name)


def _transformation(body, sig, tgt, table, sec) -> PointTransformation:
    Z = _vector(body, "z", sig.n, table, sec, default=None) if "z" in body else None
    W = _vector(body, "w", sig.m, table, sec, default=None) if "w" in body else None
    if Z is None or W is None:
        raise SessionError(f"[{sec}] needs both z and w")
    inverse = None
    if "inverse_x" in body or "inverse_u" in body:
        inverse = (tuple(_vector(body, "inverse_x", sig.n, table, sec)), tuple(_vector(body, "inverse_u", sig.m, table, sec)))
    return PointTransformation(sig, tuple(Z), tuple(W), tgt, inverse)


def _spec(body, table, sec) -> MASpec:
    dim = body.get("dimension", "").strip()
    if dim not in DIMENSIONS:
        raise SessionError(f"[{sec}] dimension must be one of {sorted(DIMENSIONS)}")
    n, nk, na = DIMENSIONS[dim]
    funcs = dict(table.functions)
    funcs.setdefault("f", n)
    for i in range(1, nk + 1):
        funcs.setdefault(f"k{i}", n)
    local = SymbolTable([Signature(n, n)], set(table.parameters) | {f"a{i}" for i in range(1, na + 1)}, funcs, dict(table.macros))
    spec = MASpec(dim)
    kappas = list(spec.kappas)
    for i in range(1, nk + 1):
        key = f"kappa{i}"
        if key in body:
            kappas[i - 1] = _parse(body[key], local, f"[{sec}] {key}")
    alphas = None
    if "alphas" in body:
        alphas = [_parse(p, local, f"[{sec}] alphas") for p in split_top(body["alphas"])]
    f = body.get("f", "f").strip()
    if f not in funcs or funcs[f] != n:
        f = _parse(f, local, f"[{sec}] f")
    unknown = set(body) - {"dimension", "alphas", "f"} - {f"kappa{i}" for i in range(1, nk + 1)}
    if unknown:
        raise SessionError(f"[{sec}] unknown keys {sorted(unknown)}")
    try:
        return MASpec(dim, kappas, alphas, f)
    except ValueError as exc:
        raise SessionError(f"[{sec}] {exc}") from None


def search_path() -> list:
    dirs = [Path(p) for p in os.environ.get(PATH_ENV, "").split(os.pathsep) if p]
    return dirs + [DATA_DIR]


def find_session(name: str) -> Path:
    """Resolve a session path directly, then in ``$QUASIREDUCE_PATH``, then among bundled fixtures."""
    p = Path(name)
    if p.is_file():
        return p
    for d in search_path():
        for cand in (d / name, d / f"{name}.ini"):
            if cand.is_file():
                return cand
    raise SessionError(f"session {name!r} not found (searched {', '.join(str(d) for d in search_path())})")


def load(name: str) -> Session:
    path = find_session(name)
    return loads(path.read_text(encoding="utf-8"), str(path))
