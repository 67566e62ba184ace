"""Normalized source text for surface trees.

``print_document(parse(text))`` is a fixed point of ``parse`` followed by
``print_document``; that is the round-trip property the tests check.
"""
from __future__ import annotations

from fractions import Fraction

from . import ast as A

INDENT = "  "


def fmt_point(p) -> str:
    if isinstance(p, A.Bracket):
        return "[" + ", ".join(fmt_point(q) for q in p.items) + "]"
    if isinstance(p, A.Tup):
        return "(" + ", ".join(fmt_point(q) for q in p.items) + ")"
    if isinstance(p, tuple):
        return "(" + ", ".join(fmt_point(q) for q in p) + ")"
    return str(p)


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_dist(d: A.Dist) -> str:
    if d.inf:
        return "inf"
    parts = []
    if d.param is not None and d.a != 0:
        a = abs(d.a)
        if a == 1:
            parts.append(("-" if d.a < 0 else "", d.param))
        elif a.denominator != 1 and a.numerator == 1:
            parts.append(("-" if d.a < 0 else "", f"{d.param}/{a.denominator}"))
        else:
            parts.append(("-" if d.a < 0 else "", f"{_frac(a)}*{d.param}"))
    if d.b != 0 or not parts:
        parts.append(("-" if d.b < 0 else "", _frac(abs(d.b))))
    out = parts[0][0] + parts[0][1]
    for sign, text in parts[1:]:
        out += f" {sign or '+'} {text}"
    return out


def fmt_obj(o: A.Obj, nested: bool = False) -> str:
    if isinstance(o, A.OUnit):
        return "I"
    if isinstance(o, A.OZero):
        return "0"
    if isinstance(o, A.ORef):
        return o.name
    if isinstance(o, A.OFinset):
        if o.names is None:
            return f"finset {o.size}"
        return "finset {" + ", ".join(fmt_point(p) for p in o.names) + "}"
    if isinstance(o, A.OPoset):
        body = ", ".join(fmt_point(p) for p in o.points)
        if o.less:
            body += " | " + ", ".join(f"{fmt_point(x)} < {fmt_point(y)}" for x, y in o.less)
        return "poset {" + body + "}"
    if isinstance(o, A.OMetric):
        body = ", ".join(fmt_point(p) for p in o.points)
        if o.dists:
            body += " | " + ", ".join(f"d({fmt_point(x)}, {fmt_point(y)}) = {fmt_dist(d)}" for x, y, d in o.dists)
        return "metric {" + body + "}"
    if isinstance(o, A.OAb):
        return "abgroup(" + ", ".join(str(m) for m in o.moduli) + ")"
    if isinstance(o, A.OSum):
        text = " + ".join(fmt_obj(p, True) for p in o.parts)
        return f"({text})" if nested else text
    if isinstance(o, A.OTensor):
        text = " (*) ".join(fmt_obj(p, True) for p in o.parts)
        return f"({text})" if nested else text
    raise TypeError(o)


def fmt_term(t: A.RTerm) -> str:
    if isinstance(t, A.TVar):
        return t.name
    if isinstance(t, A.TProj):
        return f"{t.name}.{fmt_point(t.point)}"
    if isinstance(t, A.TApp):
        return f"{t.fun}(" + ", ".join(fmt_term(a) for a in t.args) + ")"
    if isinstance(t, A.TTuple):
        return "(" + ", ".join(fmt_term(a) for a in t.items) + ")"
    raise TypeError(t)


def fmt_binders(binders) -> str:
    return ", ".join(name if typ is None else f"{name} : {fmt_obj(typ)}" for name, typ in binders)


# precedence: or < and < unary
def fmt_formula(phi: A.RFormula, level: int = 0) -> str:
    if isinstance(phi, A.FTrue):
        return "true"
    if isinstance(phi, A.FFalse):
        return "false"
    if isinstance(phi, A.FEq):
        return f"{fmt_term(phi.lhs)} = {fmt_term(phi.rhs)}"
    if isinstance(phi, A.FRel):
        head = phi.name if phi.power is None else f"{phi.name}^{fmt_obj(phi.power, True)}"
        return head + "(" + ", ".join(fmt_term(a) for a in phi.args) + ")"
    if isinstance(phi, A.FOr):
        text = " \\/ ".join(fmt_formula(p, 1) for p in phi.parts)
        return f"({text})" if level > 0 else text
    if isinstance(phi, A.FAnd):
        text = " /\\ ".join(fmt_formula(p, 2) for p in phi.parts)
        return f"({text})" if level > 1 else text
    if isinstance(phi, A.FExists):
        text = f"{phi.quantifier} {fmt_binders(phi.binders)} . {fmt_formula(phi.body)}"
        return f"({text})" if level > 0 else text
    if isinstance(phi, A.FIndexed):
        text = f"\\/ {phi.param} in {phi.start}.. . {fmt_formula(phi.body)}"
        return f"({text})" if level > 0 else text
    raise TypeError(phi)


def fmt_sequent(s: A.RSequent) -> str:
    head = f"forall {fmt_binders(s.binders)} . " if s.binders else ""
    # binder bodies extend to the right, so a quantified lhs needs brackets before |-
    lhs = fmt_formula(s.lhs, 1 if isinstance(s.lhs, (A.FExists, A.FIndexed)) else 0)
    return f"{head}{lhs} |- {fmt_formula(s.rhs)}"


def fmt_mapping(pairs) -> str:
    return "{" + ", ".join(f"{fmt_point(a)} -> {fmt_point(b)}" for a, b in pairs) + "}"


def fmt_item(it) -> str:
    if isinstance(it, A.IBase):
        return f"base {it.name}"
    if isinstance(it, A.IImport):
        return f'import "{it.path}"'
    if isinstance(it, A.IArity):
        return f"arity {it.name} = {fmt_obj(it.obj)}"
    if isinstance(it, A.ILanguage):
        lines = ["language {"]
        for d in it.decls:
            if isinstance(d, A.DFun):
                lines.append(f"{INDENT}fun {d.name} : {fmt_obj(d.dom)} -> {fmt_obj(d.cod)};")
            else:
                lines.append(f"{INDENT}rel {d.name} : {fmt_obj(d.arity)};")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(it, A.ITheory):
        lines = [f"theory {it.name} {{"]
        for ax in it.axioms:
            if isinstance(ax, A.AAxiom):
                lines.append(f"{INDENT}axiom {ax.name}: {fmt_sequent(ax.sequent)};")
            else:
                dom = "Q+" if ax.domain == "Q+" else f"{ax.start}.."
                lines.append(f"{INDENT}schema {ax.name}({ax.param} in {dom}): {fmt_sequent(ax.sequent)};")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(it, A.IStructure):
        lines = [f"structure {it.name} {{", f"{INDENT}carrier {fmt_obj(it.carrier)};"]
        for name, pairs in it.funs:
            lines.append(f"{INDENT}fun {name} = {fmt_mapping(pairs)};")
        for name, pts in it.rels:
            lines.append(f"{INDENT}rel {name} = {{" + ", ".join(fmt_point(p) for p in pts) + "};")
        lines.append("}")
        return "\n".join(lines)
    if isinstance(it, A.IMorphism):
        return f"morphism {it.name} : {it.src} -> {it.tgt} = {fmt_mapping(it.mapping)}"
    if isinstance(it, A.ICone):
        lines = [f"cone {it.name} {{", f"{INDENT}apex {it.apex};"]
        for tgt, pairs in it.legs:
            lines.append(f"{INDENT}leg {tgt} = {fmt_mapping(pairs)};")
        lines.append("}")
        return "\n".join(lines)
    raise TypeError(it)


def print_document(doc: A.Document) -> str:
    return "\n\n".join(fmt_item(it) for it in doc.items) + ("\n" if doc.items else "")
