"""Command-line interface.

Exit status: 0 on success, 2 when a check completes with a negative
verdict, 1 on errors (diagnostics go to stderr).
"""

from __future__ import annotations

import argparse
import sys
import time

from .canonical import canonical_for_translation_scaling, verify_canonical
from .errors import QuasiReduceError
from .io import report as R
from .io.session import load
from .liegeom import check_symmetry, check_theorem1_structure, lie_bracket
from .monge_ampere import (
    DIMENSIONS,
    MASpec,
    build_system,
    derive_conditions,
    homogeneous_system,
    homogenization_condition,
    reduction_input,
    kappa24_condition,
    symmetry_fields,
    von_karman_example,
)
from .transform import classify, reduce, same_system

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


def _session(args):
    if not args.session:
        raise QuasiReduceError(f"'{args.command}' needs --session")
    return load(args.session)


def cmd_bracket(args):
    s = _session(args)
    F, G = s.get("field", args.F), s.get("field", args.G)
    return R.bracket_report(F, G, lie_bracket(F, G))


def cmd_check_algebra(args):
    s = _session(args)
    return R.algebra_report(check_theorem1_structure([s.get("field", f) for f in args.fields]))


def cmd_check_symmetry(args):
    s = _session(args)
    sys_ = s.get("system", args.SYS)
    X = s.get("field", args.F)
    return R.symmetry_report(sys_, X, check_symmetry(sys_, X, args.mult_degree))


def cmd_canonical(args):
    s = _session(args)
    fields = [s.get("field", f) for f in args.fields]
    t = canonical_for_translation_scaling(fields)
    return R.canonical_report(t, verify_canonical(t, fields))


def cmd_reduce(args):
    s = _session(args)
    sys_ = s.get("system", args.SYS)
    fields = [s.get("field", f) for f in args.fields]
    return R.reduction_report(reduce(sys_, fields, args.mult_degree, args.method))


def cmd_classify(args):
    s = _session(args)
    sys_ = s.get("system", args.SYS)
    return R.classification_report(sys_, classify(sys_))


def _spec(args) -> MASpec:
    spec = _session(args).get("ma_spec", args.SPEC)
    if spec.dimension != args.dimension:
        raise QuasiReduceError(f"spec {args.SPEC!r} is {spec.dimension}, not {args.dimension}")
    return spec


def cmd_ma_build(args):
    spec = _spec(args)
    raw = build_system(spec)
    hom = homogeneous_system(spec)
    doc = R.system_report(raw, "ma_system")
    doc["data"]["homogeneous"] = R.system_report(hom)["data"]["system"]
    doc["data"]["homogenization"] = str(homogenization_condition(spec))
    return doc


def cmd_ma_conditions(args):
    spec = _spec(args)
    cs = derive_conditions(spec, args.mult_degree)
    conds = list(cs.conditions)
    if spec.dimension == "3p1":
        conds.append(kappa24_condition())
    return R.condition_set_report(spec.dimension, cs, conds)


def cmd_ma_von_karman(args):
    vk = von_karman_example()
    hom = homogeneous_system(vk.reduced_spec)
    red = reduce(hom, symmetry_fields(vk.reduced_spec))
    data = {
        "system": R.system_report(vk.system)["data"]["system"],
        "conditions": [{"name": n, "expression": str(c)} for n, c in zip(vk.names, vk.conditions)],
        "reduction": R.reduction_report(red)["data"],
    }
    return R.document("von_karman", "ok" if red.ok else "negative", data)


def _selftest_checks(full: bool):
    from .expr.field import as_rf
    from .expr.symbols import Dependent, Opaque

    def one_plus_one():
        spec = MASpec("1p1")
        sys_, fields, _ = reduction_input(spec)
        r = reduce(sys_, fields)
        k = spec.kappas
        a1, a2, a3 = spec.alphas
        want = [as_rf(Jet_(2, 1)) - as_rf(Jet_(1, 2)), (a3 * k[0] + k[1]) * w(1, 1) + (-2 * a2 * k[0] + k[2]) * w(1, 2) + (a1 * k[0] + k[3]) * w(2, 2)]
        kappa1 = (-k[1] * f(2, 2) + k[2] * f(1, 2) - k[3] * f(1, 1)) / (1 + a3 * f(2, 2) + 2 * a2 * f(1, 2) + a1 * f(1, 1))
        want = [e.subs({Opaque("k1", (), U): kappa1}, rename_opaque=False).subs(rename) for e in want]
        return r.ok and same_system(r.system.equations, want, r.system.signature)

    def witness():
        u1, u2 = Dependent(1), Dependent(2)
        spec = MASpec("1p1", [Opaque("k1", (), (u1, u2)), 1, 0, 1, 0], [0, 0, 0], (as_rf(u1) ** 2 + as_rf(u2) ** 2) / 2)
        sys_, fields, cs = reduction_input(spec)
        r = reduce(sys_, fields)
        return cs.solved == {1: as_rf(-2)} and r.ok and same_system(r.system.equations, [w(2, 1) - w(1, 2), w(1, 1) + w(2, 2)], r.system.signature)

    def von_karman():
        vk = von_karman_example()
        return reduce(homogeneous_system(vk.reduced_spec), symmetry_fields(vk.reduced_spec)).ok

    def two_plus_one():
        spec = MASpec("2p1", alphas=[0] * 6)
        sys_, fields, cs = reduction_input(spec)
        return len(cs.conditions) == 7 and reduce(sys_, fields).ok

    def three_plus_one():
        spec = MASpec("3p1", alphas=[0] * 10)
        sys_, fields, cs = reduction_input(spec)
        return len(cs.conditions) == 31 and reduce(sys_, fields).ok

    from .expr.symbols import Jet as Jet_, Signature

    U = (Dependent(1), Dependent(2))
    tgt = Signature(2, 2, "z", "w")
    rename = {Dependent(1): as_rf(Dependent(1, "w")), Dependent(2): as_rf(Dependent(2, "w"))}
    rename.update({Jet_(a, i): as_rf(Jet_(a, i, "w")) for a in (1, 2) for i in (1, 2)})

    def w(a, i):
        return as_rf(tgt.jet(a, i))

    def f(i, j):
        return as_rf(Opaque("f", (i, j), U))

    checks = [("1+1 reduction", one_plus_one), ("concrete witness", witness), ("Von Karman reduction", von_karman), ("2+1 conditions and reduction", two_plus_one)]
    if full:
        checks.append(("3+1 conditions and reduction", three_plus_one))
    return checks


def cmd_selftest(args):
    results = []
    ok = True
    for name, fn in _selftest_checks(args.full):
        t0 = time.perf_counter()
        try:
            good = bool(fn())
            msg = ""
        except QuasiReduceError as exc:
            good, msg = False, str(exc)
        results.append({"name": name, "ok": good, "seconds": round(time.perf_counter() - t0, 1) if args.timings else None, "message": msg})
        ok = ok and good
    for r in results:
        if r["seconds"] is None:
            del r["seconds"]
    return R.document("selftest", "ok" if ok else "negative", {"checks": results})


def build_parser() -> argparse.ArgumentParser:
    def options(defaults: bool):
        # subcommands repeat the options without defaults so a value given
        # before the subcommand is not overwritten
        g = argparse.ArgumentParser(add_help=False)
        kw = {} if defaults else {"default": argparse.SUPPRESS}
        g.add_argument("--session", help="session file (path, or name looked up in $QUASIREDUCE_PATH and the bundled fixtures)", **({"default": None} if defaults else kw))
        g.add_argument("--format", choices=("json", "text"), **({"default": "json"} if defaults else kw))
        return g

    common = options(False)
    p = argparse.ArgumentParser(prog="quasireduce", description="Reduce first-order nonlinear PDE systems to quasilinear form.", parents=[options(True)])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bracket", parents=[common], help="Lie bracket of two fields")
    s.add_argument("F")
    s.add_argument("G")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("check-algebra", parents=[common], help="commutator table and structure check")
    s.add_argument("fields", nargs="+")
    s.set_defaults(func=cmd_check_algebra)

    s = sub.add_parser("check-symmetry", parents=[common], help="multiplier certificate for one field")
    s.add_argument("SYS")
    s.add_argument("F")
    s.add_argument("--mult-degree", type=int, default=None)
    s.set_defaults(func=cmd_check_symmetry)

    s = sub.add_parser("canonical", parents=[common], help="canonical variables for translations plus scaling")
    s.add_argument("fields", nargs="+")
    s.set_defaults(func=cmd_canonical)

    s = sub.add_parser("reduce", parents=[common], help="full pipeline")
    s.add_argument("SYS")
    s.add_argument("fields", nargs="+")
    s.add_argument("--mult-degree", type=int, default=None)
    s.add_argument("--method", choices=("auto", "fast", "generic"), default="auto")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("classify", parents=[common], help="autonomy, jet degrees, quasilinear matrices")
    s.add_argument("SYS")
    s.set_defaults(func=cmd_classify)

    ma = sub.add_parser("ma", parents=[common], help="Monge-Ampere builders")
    msub = ma.add_subparsers(dest="ma_command", required=True)
    for name, fn in (("build", cmd_ma_build), ("conditions", cmd_ma_conditions)):
        s = msub.add_parser(name, parents=[common])
        s.add_argument("dimension", choices=sorted(DIMENSIONS))
        s.add_argument("SPEC")
        if name == "conditions":
            s.add_argument("--mult-degree", type=int, default=None)
        s.set_defaults(func=fn)
    s = msub.add_parser("von-karman", parents=[common])
    s.set_defaults(func=cmd_ma_von_karman)

    s = sub.add_parser("selftest", parents=[common], help="regression checks on the bundled Monge-Ampere cases")
    s.add_argument("--full", action="store_true", help="include the (3+1) case")
    s.add_argument("--timings", action="store_true", help="record wall-clock seconds (makes output non-deterministic)")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.func(args)
    except (QuasiReduceError, ValueError, OSError) as exc:
        print(f"quasireduce: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = R.render_json(doc) if args.format == "json" else R.render_text(doc)
    sys.stdout.write(out)
    return {"ok": EXIT_OK, "negative": EXIT_NEGATIVE}.get(doc["verdict"], EXIT_ERROR)


if __name__ == "__main__":
    sys.exit(main())
