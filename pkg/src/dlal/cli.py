"""Command-line driver: ``dlal check | dump | normalize | corpus | scaling``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import constraints as C
from . import decor as D
from . import encodings as E
from . import fterm as F
from . import solver as S
from . import verify as V

EXIT_TYPABLE, EXIT_UNTYPABLE, EXIT_ILL_TYPED, EXIT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    """Parse or System F typing failure of the user input."""


@dataclass
class Report:
    status: str
    size: Optional[int] = None
    type: Optional[str] = None
    depth: Optional[int] = None
    pi1: Optional[bool] = None
    bound_exponent: Optional[int] = None
    claim: Optional[str] = None
    decoration: Optional[str] = None
    context: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    linear_system: Optional[int] = None
    violations: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    verify: Optional[str] = None
    steps: Optional[int] = None
    search: Optional[dict] = None
    dump: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return {"typable": EXIT_TYPABLE, "untypable": EXIT_UNTYPABLE,
                "ill-typed": EXIT_ILL_TYPED}.get(self.status, EXIT_ERROR)

    def as_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if v is not None}
        d.pop("dump", None)
        return d


# ---------------------------------------------------------------- input


def read_source(spec: str) -> str:
    """A file path, ``-`` for stdin, or ``@name`` for a corpus entry."""
    if spec == "-":
        return sys.stdin.read()
    if spec.startswith("@"):
        try:
            return E.lookup(spec[1:])
        except (KeyError, ValueError) as e:
            raise InputError(str(e)) from None
    try:
        return Path(spec).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {spec}: {e.strerror}") from None


def parse_context(items) -> dict:
    env = {}
    for item in items or ():
        name, sep, ty = item.partition(":")
        if not sep:
            raise InputError(f"free variable declaration {item!r} is not NAME:TYPE")
        try:
            env[name.strip()] = F.parse_type(ty)
        except F.FParseError as e:
            raise InputError(f"in declaration of {name}: {e}") from None
    return env


def load_term(text: str, env: dict) -> F.FTerm:
    try:
        t = F.alpha_normalize(F.parse_term(text))
        F.typecheck(t, env)
    except (F.FParseError, F.FTypeError) as e:
        raise InputError(str(e)) from None
    return F.annotate(t, env)


# ---------------------------------------------------------------- pipeline


def run_check(text: str, env: Optional[dict] = None, *, verify: bool = False,
              goal: Optional[str] = None, minimize: bool = False,
              normalize_args: Optional[list] = None, fuel: int = 100_000,
              bound: Optional[int] = None, cap: int = 2_000_000,
              dump: bool = False) -> Report:
    env = env or {}
    clock = time.perf_counter
    timings = {}
    t0 = clock()
    try:
        m = load_term(text, env)
        goal_type = D.parse_dtype(goal) if goal else None
    except (InputError, F.FParseError) as e:
        return Report("ill-typed", violations=[{"phase": "input", "message": str(e)}])
    timings["parse"] = clock() - t0
    report = Report("untypable", size=F.term_size(m))

    t0 = clock()
    try:
        gen = C.gen_all(m, goal_type)
    except C.UnificationError as e:
        if goal_type is None:
            raise
        return Report("ill-typed", size=report.size,
                      violations=[{"phase": "goal", "message": str(e)}])
    timings["generate"] = clock() - t0
    store = gen.store
    report.counts = store.counts()
    report.params = {"integer": len(gen.decoration.int_params()),
                     "boolean": len(gen.decoration.bool_params())}
    if dump:
        report.dump = store.dump()

    t0 = clock()
    try:
        sol = S.solve_all(store, minimize=minimize)
    except S.Unsatisfiable as e:
        timings["solve"] = clock() - t0
        report.timings = _ms(timings)
        report.violations = [e.as_dict()]
        _search(report, m, bound, cap)
        return report
    timings["solve"] = clock() - t0
    report.linear_system = len(sol.linear_atoms)

    pseudo = D.instantiate(gen.decoration.term, sol.phi)
    if not F.term_alpha_eq(D.erase(pseudo), m):
        raise RuntimeError("decoration does not erase to the input term")
    concl = D.star_inverse(D.instantiate_type(gen.conclusion, sol.phi))
    d = D.depth(concl)
    report.status = "typable"
    report.type = D.show_dtype(concl)
    report.depth = d
    report.pi1 = D.is_pi1(concl)
    report.bound_exponent = 2 ** d
    report.claim = (f"normalizes in O(|M|^{2 ** d}) steps" if report.pi1 else
                    "typable; step bound theorem not applicable (non-Π1 type)")
    report.decoration = D.show_term(pseudo)
    report.context = V.free_context(pseudo)

    if verify:
        t0 = clock()
        star_env = {x: D.star(D.parse_dtype(c["type"])) if not c["nonlinear"]
                    else D.DBang(D.star(D.parse_dtype(c["type"])))
                    for x, c in report.context.items()}
        v = V.verify_all(pseudo, star_env)
        timings["verify"] = clock() - t0
        report.verify = "pass" if v is None else f"fail: {v}"
        if v is not None:
            report.violations.append(v.as_dict())
            report.status = "error"
    if normalize_args is not None:
        t0 = clock()
        report.steps = _normalize(text, normalize_args, env, fuel)
        timings["normalize"] = clock() - t0
    _search(report, m, bound, cap)
    report.timings = _ms(timings)
    return report


def _search(report: Report, m, bound, cap):
    if bound is None:
        return
    t0 = time.perf_counter()
    try:
        found = V.bounded_search(m, bound, cap=cap, limit=1)
        mode = "exhaustive"
    except V.CapExceeded:
        found = V.bounded_search(m, bound, cap=cap, prune=True, limit=1)
        mode = "pruned"
    report.search = {"bound": bound, "mode": mode, "found": bool(found),
                     "seconds": round(time.perf_counter() - t0, 4)}


def _normalize(text: str, args: list, env: dict, fuel: int) -> int:
    src = E.apply_source(text, *[read_source(a) for a in args])
    m = load_term(src, env)
    _, steps = F.beta_normalize(m, fuel)
    return steps


def _ms(timings: dict) -> dict:
    return {k: round(v * 1000, 3) for k, v in timings.items()}


# ---------------------------------------------------------------- output


def emit_report(r: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(r.as_dict(), ensure_ascii=False, indent=2)
    lines = [f"status: {r.status}"]
    if r.size is not None:
        lines.append(f"term size: {r.size}")
    if r.counts:
        total = sum(r.counts.values())
        lines.append(
            f"constraints: {total} atoms (boolean {r.counts['boolean']}, linear "
            f"{r.counts['linear']}, mixed {r.counts['mixed']}) on "
            f"{r.params['integer']} integer and {r.params['boolean']} boolean parameters")
    if r.linear_system is not None:
        lines.append(f"linear system after the boolean phase: {r.linear_system} (in)equations")
    if r.status == "typable" or r.decoration:
        lines.append("decoration:")
        lines.append(f"  {r.decoration}")
        for x, c in r.context.items():
            kind = "non-linear" if c["nonlinear"] else "linear"
            lines.append(f"  free {x} : {c['type']} ({kind})")
        lines.append(f"conclusion: {r.type}")
        lines.append(f"depth: {r.depth}")
        lines.append(r.claim)
    if r.verify is not None:
        lines.append(f"verify: {r.verify}")
    if r.steps is not None:
        lines.append(f"beta steps: {r.steps}")
    if r.search is not None:
        s = r.search
        lines.append(f"bounded search [-{s['bound']}..{s['bound']}] ({s['mode']}): "
                     f"{'found a valid decoration' if s['found'] else 'none found'}")
    for v in r.violations:
        if "phase" in v and "atoms" in v:
            lines.append(f"unsatisfiable ({v['phase']} phase): {v['message']}")
            lines.extend(f"  {step}" for step in v["trace"])
            lines.extend(f"  {a['atom']}  [{a['rule']} at {a['path']}]" for a in v["atoms"])
        elif "phase" in v:
            lines.append(f"error ({v['phase']}): {v['message']}")
        else:
            lines.append(f"violation: {v['condition']} ({v['clause']}) at {v['path']}: "
                         f"{v['message']}")
    if r.timings:
        lines.append("timings (ms): " + ", ".join(f"{k} {v}" for k, v in r.timings.items()))
    return "\n".join(lines)


# ---------------------------------------------------------------- commands


def _cmd_check(a) -> int:
    text = read_source(a.source)
    r = run_check(text, parse_context(a.free), verify=a.verify, goal=a.goal,
                  minimize=a.minimize, normalize_args=a.normalize, fuel=a.fuel,
                  bound=a.bound, cap=a.cap, dump=a.dump_constraints)
    if r.dump is not None:
        print(r.dump)
        print()
    print(emit_report(r, a.emit))
    return r.exit_code


def _cmd_dump(a) -> int:
    env = parse_context(a.free)
    m = load_term(read_source(a.source), env)
    try:
        goal = D.parse_dtype(a.goal) if a.goal else None
        store = C.gen_all(m, goal).store
    except (F.FParseError, C.UnificationError) as e:
        raise InputError(str(e)) from None
    print(store.dump())
    return EXIT_TYPABLE


def _cmd_normalize(a) -> int:
    env = parse_context(a.free)
    text = read_source(a.source)
    src = E.apply_source(text, *[read_source(x) for x in a.args]) if a.args else text
    m = load_term(src, env)
    try:
        nf, steps = F.beta_normalize(m, a.fuel)
    except F.FuelExhausted as e:
        print(f"fuel exhausted after {e.steps} beta steps", file=sys.stderr)
        return EXIT_ERROR
    if a.emit == "json":
        print(json.dumps({"normal_form": F.show_term(nf), "steps": steps,
                          "size": F.term_size(m)}, ensure_ascii=False))
    else:
        print(F.show_term(nf))
        print(f"beta steps: {steps}")
    return EXIT_TYPABLE


def _cmd_corpus(a) -> int:
    if a.name:
        print(E.lookup(a.name).strip())
        return EXIT_TYPABLE
    for name, src in E.encodings().items():
        print(f"{name:12} size {F.term_size(E.load(name))}")
    print("also: word:<bits>, numeral:<k>, rev:<bits>")
    return EXIT_TYPABLE


def _cmd_scaling(a) -> int:
    from . import plots

    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = plots.measure(a.lengths, a.fuel)
    plots.write_csv(rows, out / "scaling.csv")
    figs = plots.plot(rows, out)
    for key, xk in (("word_atoms", "word_size"), ("rev_steps", "rev_size")):
        xs = [getattr(r, xk) for r in rows]
        ys = [getattr(r, key) for r in rows]
        print(f"{key}: log-log slope {plots.loglog_slope(xs, ys):.3f}, "
              f"c = {plots.quadratic_constant(xs, ys):.4f} (y <= c*size^2)")
    print(f"wrote {out / 'scaling.csv'}")
    for f in figs:
        print(f"wrote {f}")
    return EXIT_TYPABLE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dlal", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("source", help="term file, '-' for stdin, or @name for a corpus entry")
        sp.add_argument("--free", action="append", metavar="X:T",
                        help="declare a free variable (repeatable)")

    c = sub.add_parser("check", help="decide DLAL typability and report")
    source(c)
    c.add_argument("--verify", action="store_true", help="re-check the decoration directly")
    c.add_argument("--goal", metavar="T", help="DLAL type the conclusion must have")
    c.add_argument("--minimize", action="store_true",
                   help="minimize the sum of type parameters after feasibility")
    c.add_argument("--emit", choices=("text", "json"), default="text")
    c.add_argument("--dump-constraints", action="store_true")
    c.add_argument("--bound", type=int, metavar="N",
                   help="cross-check with a bounded search over [-N..N]")
    c.add_argument("--cap", type=int, default=2_000_000,
                   help="enumeration cap for the bounded search")
    c.add_argument("--normalize", nargs="*", metavar="ARG",
                   help="apply the term to ARGs and count beta steps")
    c.add_argument("--fuel", type=int, default=100_000)
    c.set_defaults(func=_cmd_check)

    d = sub.add_parser("dump", help="print the constraint store")
    source(d)
    d.add_argument("--goal", metavar="T")
    d.set_defaults(func=_cmd_dump)

    n = sub.add_parser("normalize", help="beta-normalize and count steps")
    source(n)
    n.add_argument("args", nargs="*", help="arguments to apply the term to")
    n.add_argument("--fuel", type=int, default=100_000)
    n.add_argument("--emit", choices=("text", "json"), default="text")
    n.set_defaults(func=_cmd_normalize)

    k = sub.add_parser("corpus", help="list built-in encodings")
    k.add_argument("name", nargs="?")
    k.set_defaults(func=_cmd_corpus)

    s = sub.add_parser("scaling", help="CSV and figures of growth over Church words")
    s.add_argument("--out", default="scaling-report")
    s.add_argument("--lengths", type=int, nargs="+", default=[2, 4, 8, 16, 32])
    s.add_argument("--fuel", type=int, default=1_000_000)
    s.set_defaults(func=_cmd_scaling)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ILL_TYPED
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_ILL_TYPED
    except Exception as e:  # noqa: BLE001 - last-resort mapping to the internal-error code
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
