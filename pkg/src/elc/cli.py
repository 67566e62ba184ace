"""Command-line interface: ``elc check|models|inject|orth|bridge``.

Exit codes: 0 verdict true, 1 verdict false, 2 usage or input error, 3 search
budget exceeded (including disjunctions that need more than ``--max-n``
disjuncts).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from fractions import Fraction

from . import __version__
from . import vbase as vb
from .classes import (BridgeError, checks_for_cone, checks_for_morphism, checks_for_sequent, cone_injectivity,
                      describe_structure, orth_morphism_from_limit_sequent, orthogonality, paired_check, run_bridge)
from .dsl import DSLError, Module, load
from .logic import syntax as S
from .logic.schema import check_axiom
from .logic.semantics import Options, SchemaTruncated, interpret
from .search import SearchStats, SearchTruncated, find_models
from .signature import BudgetExceeded, HomUnavailable, canonical_key

SCHEMA_VERSION = 1
EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs


def _split(spec: str) -> tuple[str, str | None]:
    """``path#name`` selects a named item from a file holding several."""
    if "#" in spec:
        path, name = spec.rsplit("#", 1)
        return path, name or None
    return spec, None


def file_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class Inputs:
    def __init__(self):
        self.seen: list[dict] = []
        self._modules: dict = {}

    def module(self, spec: str) -> tuple[Module, str | None]:
        path, name = _split(spec)
        if not os.path.exists(path):
            raise UsageError(f"no such file: {path}")
        if path not in self._modules:
            self._modules[path] = load(path)
            self.seen.append({"path": path, "sha256": file_digest(path)})
        return self._modules[path], name

    def get(self, spec: str, kind: str):
        m, name = self.module(spec)
        try:
            return m.only(kind, name)
        except DSLError as exc:
            raise UsageError(exc.render()) from None


# ---------------------------------------------------------------------------
# plain-data rendering


def _num(x):
    if x == math.inf:
        return "inf"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def _points(sub) -> list[str]:
    return sorted(repr(p) for p in sub.points)


def _check_report(T, A, opts: Options, explain: bool) -> dict:
    axioms = []
    truncated = False
    for ax in T.axioms:
        try:
            v = check_axiom(A, ax, opts)
        except SchemaTruncated as exc:
            truncated = True
            axioms.append({"axiom": ax.name, "kind": getattr(ax, "kind", "basic"), "verdict": "truncated",
                           "needed_n": exc.needed})
            continue
        entry = {"axiom": v.name, "kind": v.kind, "verdict": v.verdict}
        if v.instance is not None:
            entry["failing_instance"] = str(_num(v.instance))
        if isinstance(ax, S.Schema):
            entry["instances_checked"] = v.checked_instances
        shown = ax
        if isinstance(ax, S.Schema):
            # explain the first failing instance; a satisfied schema has nothing single to show
            shown = ax.instance(v.instance) if v.instance is not None else None
        if explain and isinstance(shown, S.Sequent):
            entry["lhs"] = _points(interpret(shown.lhs, A, opts))
            if shown.kind == S.BASIC:
                entry["rhs"] = _points(interpret(shown.rhs, A, opts))
            else:
                entry["rhs_body"] = _points(interpret(shown.rhs.body, A, opts))
        axioms.append(entry)
    schemas = []
    for param, text, st in opts.schema_log:
        item = {"param": param, "disjunct": text, "n_stab": st.n_stab, "bound": st.bound,
                "status": "stabilized" if st.exact else "truncated"}
        if item not in schemas:
            schemas.append(item)
    model = None if truncated else all(a["verdict"] == "satisfied" for a in axioms)
    if truncated and any(a["verdict"] not in ("satisfied", "truncated") for a in axioms):
        model = False
    return {"model": model, "axioms": axioms, "disjunctions": schemas}


# ---------------------------------------------------------------------------
# commands


def cmd_check(args, inputs: Inputs) -> tuple[dict, int]:
    T = inputs.get(args.theory, "theories")
    A = inputs.get(args.structure, "structures")
    if A.language != T.language:
        raise UsageError("the structure and the theory use different languages")
    opts = Options(args.max_n)
    body = _check_report(T, A, opts, args.explain)
    body.update({"theory": T.name, "structure": A.name})
    if body["model"] is None:
        return body, EXIT_BUDGET
    return body, EXIT_TRUE if body["model"] else EXIT_FALSE


def cmd_models(args, inputs: Inputs) -> tuple[dict, int]:
    T = inputs.get(args.theory, "theories")
    opts = Options(args.max_n)
    stats = SearchStats()
    models = []
    for A in find_models(T, args.max_size, allow_empty=args.allow_empty, opts=opts, budget=args.budget,
                         grid=args.grid, stats=stats):
        d = describe_structure(A)
        d["canonical_key"] = repr(canonical_key(A))
        models.append(d)
    counts = {}
    for d in models:
        counts[str(d["size"])] = counts.get(str(d["size"]), 0) + 1
    body = {"theory": T.name, "count": len(models), "counts_by_size": counts, "models": models,
            "search": {"carriers": stats.carriers, "function_tables": stats.function_tables,
                       "candidates": stats.candidates, "rejected": stats.rejected}}
    return body, EXIT_TRUE


def _hom_body(test) -> dict:
    return {"verdict": test.verdict, "source_hom_sizes": list(test.source_sizes),
            "target_hom_size": test.target_size, "image_size": test.image_size}


def cmd_inject(args, inputs: Inputs) -> tuple[dict, int]:
    cone = inputs.get(args.cone, "cones")
    K = inputs.get(args.structure, "structures")
    if K.language != cone.apex.language:
        raise UsageError("the structure and the cone use different languages")
    test = cone_injectivity(K, cone)
    body = {"cone": cone.name, "structure": K.name, "legs": len(cone.legs), "test": "in_E", **_hom_body(test)}
    return body, EXIT_TRUE if test.verdict else EXIT_FALSE


def cmd_orth(args, inputs: Inputs) -> tuple[dict, int]:
    K = inputs.get(args.structure, "structures")
    if args.morphism:
        h = inputs.get(args.morphism, "morphisms")
        label = _split(args.morphism)[1] or next(n for n, v in inputs.module(args.morphism)[0].morphisms.items()
                                                  if v is h)
    elif args.theory and args.axiom:
        T = inputs.get(args.theory, "theories")
        seq = next((a for a in T.axioms if getattr(a, "name", None) == args.axiom), None)
        if seq is None or not isinstance(seq, S.Sequent):
            raise UsageError(f"theory {T.name} has no axiom {args.axiom!r}")
        h = orth_morphism_from_limit_sequent(seq, T.language)
        label = f"orth({args.axiom})"
    else:
        raise UsageError("orth needs --morphism, or --theory with --axiom naming a limit axiom")
    if K.language != h.dom.language:
        raise UsageError("the structure and the morphism use different languages")
    test = orthogonality(K, h)
    body = {"morphism": label, "structure": K.name, "test": "iso", **_hom_body(test)}
    return body, EXIT_TRUE if test.verdict else EXIT_FALSE


def cmd_bridge(args, inputs: Inputs) -> tuple[dict, int]:
    m, name = inputs.module(args.input)
    L = m.lang()
    opts = Options(args.max_n)
    checks = []
    theories = [m.only("theories", name)] if name and name in m.theories else list(m.theories.values())
    cones = list(m.cones.values())
    morphisms = list(m.morphisms.items())
    if theories and (cones or morphisms):
        for T in theories:
            checks.append(paired_check(T, cones, [h for _, h in morphisms], opts))
    else:
        for T in theories:
            for ax in T.axioms:
                if not isinstance(ax, S.Sequent):
                    raise UsageError(f"axiom family {ax.name} has no single cone; bridge it per instance")
                checks.extend(checks_for_sequent(ax, L, opts))
        for c in cones:
            checks.extend(checks_for_cone(c, opts))
        for label, h in morphisms:
            checks.extend(checks_for_morphism(h, label, opts))
    if not checks:
        raise UsageError("nothing to bridge: the input has no theory, cone or morphism")
    report = run_bridge(checks, L, args.max_size, allow_empty=True, budget=args.budget, grid=args.grid)
    instances = []
    for i in report.instances:
        instances.append({"check": i.check, "structure": i.structure, "sequent": i.sequent_verdict,
                          "class": i.class_verdict, "agree": i.agree})
    bad = report.disagreements
    body = {"checks": report.checks, "structures": report.structures, "instances": len(instances),
            "disagreements": [{"check": i.check, "structure": i.structure, "sequent": i.sequent_verdict,
                               "class": i.class_verdict, "witness": report.witnesses[i.structure]} for i in bad],
            "agree": report.ok}
    if args.instances:
        body["instance_list"] = instances
    return body, EXIT_TRUE if report.ok else EXIT_FALSE


COMMANDS = {"check": cmd_check, "models": cmd_models, "inject": cmd_inject, "orth": cmd_orth, "bridge": cmd_bridge}


# ---------------------------------------------------------------------------
# output


def render_human(command: str, body: dict, code: int) -> str:
    lines = []
    if command == "check":
        verdict = {True: "is", False: "is not", None: "is undecided (truncated) as"}[body["model"]]
        lines.append(f"{body['structure']} {verdict} a model of {body['theory']}")
        for a in body["axioms"]:
            extra = f" (failing instance {a['failing_instance']})" if "failing_instance" in a else ""
            if "needed_n" in a:
                extra = f" (needs n up to {a['needed_n']}, raise --max-n)"
            lines.append(f"  {a['axiom']:<24} {a['kind']:<6} {a['verdict']}{extra}")
            for side in ("lhs", "rhs", "rhs_body"):
                if side in a:
                    lines.append(f"      {side}: {{{', '.join(a[side])}}}")
        for s in body["disjunctions"]:
            lines.append(f"  disjunction over {s['param']}: {s['status']} (n_stab={s['n_stab']}, bound={s['bound']})")
    elif command == "models":
        lines.append(f"{body['count']} models of {body['theory']} up to isomorphism")
        for size, n in body["counts_by_size"].items():
            lines.append(f"  size {size}: {n}")
        for k, d in enumerate(body["models"]):
            rel = "; ".join(f"{n}={{{', '.join(v)}}}" for n, v in d["relations"].items())
            fun = "; ".join(f"{n}=[{', '.join(v)}]" for n, v in d["functions"].items())
            lines.append(f"  #{k}: points {', '.join(d['points'])}" + (f" | {fun}" if fun else "")
                         + (f" | {rel}" if rel else ""))
    elif command in ("inject", "orth"):
        what = "injective to cone " + str(body.get("cone")) if command == "inject" else \
            "orthogonal to " + str(body.get("morphism"))
        lines.append(f"{body['structure']} {'is' if body['verdict'] else 'is not'} {what}")
        lines.append(f"  hom sizes: sources {body['source_hom_sizes']}, target {body['target_hom_size']}, "
                     f"image {body['image_size']} ({body['test']} test)")
    elif command == "bridge":
        lines.append(f"bridge: {body['instances']} instances over {body['structures']} structures, "
                     f"{len(body['disagreements'])} disagreements")
        for c in body["checks"]:
            lines.append(f"  check: {c}")
        for d in body["disagreements"]:
            w = d["witness"]
            rel = "; ".join(f"{n}={{{', '.join(v)}}}" for n, v in w["relations"].items())
            lines.append(f"  DISAGREE {d['check']} on {d['structure']} (points {', '.join(w['points'])}"
                         f"{' | ' + rel if rel else ''}): sequent={d['sequent']} class={d['class']}")
    return "\n".join(lines)


def emit_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# argument parsing


def _grid(text: str):
    out = []
    for part in text.split(","):
        part = part.strip()
        out.append(vb.INF if part in ("inf", "∞") else Fraction(part))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elc", description="Enriched positive logic over finite bases.")
    p.add_argument("--version", action="version", version=f"elc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable, byte-deterministic output")
        sp.add_argument("--max-n", type=int, default=64, help="cap on disjuncts per indexed disjunction")
        sp.add_argument("--budget", type=int, default=None, help="search budget (default: $ELC_BUDGET or 2000000)")
        sp.add_argument("--grid", type=_grid, default=(1, 2, vb.INF),
                        help="distances for enumerated metric carriers, e.g. 1,2,inf")
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks determinism)")

    c = sub.add_parser("check", help="decide whether a structure is a model of a theory")
    c.add_argument("--theory", required=True)
    c.add_argument("--structure", required=True)
    c.add_argument("--explain", action="store_true", help="show interpreted subobjects")
    common(c)

    m = sub.add_parser("models", help="list the models of a theory up to isomorphism")
    m.add_argument("--theory", required=True)
    m.add_argument("--max-size", type=int, required=True)
    m.add_argument("--allow-empty", action="store_true")
    common(m)

    i = sub.add_parser("inject", help="cone-injectivity of a structure")
    i.add_argument("--cone", required=True)
    i.add_argument("--structure", required=True)
    common(i)

    o = sub.add_parser("orth", help="orthogonality of a structure to a morphism")
    o.add_argument("--morphism")
    o.add_argument("--theory")
    o.add_argument("--axiom", help="limit axiom of --theory whose orthogonality morphism to use")
    o.add_argument("--structure", required=True)
    common(o)

    b = sub.add_parser("bridge", help="cross-validate sequents against cones and morphisms")
    b.add_argument("input")
    b.add_argument("--max-size", type=int, default=2)
    b.add_argument("--instances", action="store_true", help="list every instance, not just disagreements")
    common(b)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_TRUE
    inputs = Inputs()
    start = time.perf_counter()
    try:
        body, code = COMMANDS[args.command](args, inputs)
    except (UsageError, DSLError, BridgeError, HomUnavailable) as exc:
        msg = exc.render() if isinstance(exc, DSLError) else str(exc)
        return _fail(args, inputs, f"error: {msg}", EXIT_USAGE)
    except (BudgetExceeded, SchemaTruncated, SearchTruncated) as exc:
        return _fail(args, inputs, f"budget exceeded: {exc}", EXIT_BUDGET)
    elapsed = time.perf_counter() - start
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "inputs": inputs.seen,
              "bounds": _bounds(args), "exit_code": code, "result": body}
    if args.timings:
        report["timings"] = {"total_seconds": round(elapsed, 3)}
    if args.json:
        print(emit_json(report))
    else:
        print(render_human(args.command, body, code))
        if args.timings:
            print(f"  ({elapsed:.2f}s)")
    return code


def _bounds(args) -> dict:
    out = {"max_n": args.max_n}
    for key in ("max_size", "allow_empty"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    if args.command in ("models", "bridge"):
        out["grid"] = [str(_num(g)) for g in args.grid]
    return out


def _fail(args, inputs: Inputs, message: str, code: int) -> int:
    if getattr(args, "json", False):
        print(emit_json({"schema_version": SCHEMA_VERSION, "command": args.command, "inputs": inputs.seen,
                         "bounds": _bounds(args), "exit_code": code, "error": message}))
    else:
        print(message, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
