"""Recursive-descent parser producing :mod:`elc.dsl.ast` trees.

The grammar is documented in ``docs/grammar.md``.  Every syntax error carries
the offending position and the set of tokens that would have been accepted.
"""
from __future__ import annotations

from fractions import Fraction

from . import ast as A
from .lexer import DSLError, Token, tokenize


class ParseError(DSLError):
    pass


BASE_NAMES = ("finset", "poset", "metric", "abgroup")
QUANTIFIERS = ("exists", "exists!", "exists!!")


class Parser:
    def __init__(self, text: str, path: str | None = None):
        self.path = path
        self.toks: list[Token] = tokenize(text, path)
        self.i = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str, kind: str | None = None) -> bool:
        t = self.tok
        return t.value == value and (t.kind == kind if kind else t.kind in ("sym", "kw"))

    def error(self, message: str, expected=(), tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(message, t.line, t.col, self.path, expected)

    def unexpected(self, *expected):
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.value)
        self.error(f"unexpected {what}", tuple(f"'{e}'" if not e.startswith("<") else e for e in expected))

    def expect(self, value: str) -> Token:
        t = self.tok
        if t.value != value or t.kind not in ("sym", "kw"):
            self.unexpected(value)
        self.i += 1
        return t

    def accept(self, value: str) -> bool:
        if self.at(value) and self.tok.kind in ("sym", "kw"):
            self.i += 1
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.unexpected("<identifier>")
        v = self.tok.value
        self.i += 1
        return v

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.unexpected("<integer>")
        v = int(self.tok.value)
        self.i += 1
        return v

    def pos(self):
        return (self.tok.line, self.tok.col)

    # -- document ------------------------------------------------------------

    def document(self) -> A.Document:
        items = []
        while self.tok.kind != "eof":
            items.append(self.item())
        return A.Document(tuple(items))

    def item(self):
        p = self.pos()
        if self.accept("base"):
            if self.tok.value not in BASE_NAMES or self.tok.kind != "kw":
                self.unexpected(*BASE_NAMES)
            name = self.tok.value
            self.i += 1
            self.accept(";")
            return A.IBase(name, p)
        if self.accept("import"):
            if self.tok.kind != "string":
                self.unexpected("<string>")
            path = self.tok.value
            self.i += 1
            self.accept(";")
            return A.IImport(path, p)
        if self.accept("arity"):
            name = self.ident()
            self.expect("=")
            obj = self.obj()
            self.accept(";")
            return A.IArity(name, obj, p)
        if self.accept("language"):
            return self.language(p)
        if self.accept("theory"):
            return self.theory(p)
        if self.accept("structure"):
            return self.structure(p)
        if self.accept("morphism"):
            name = self.ident()
            self.expect(":")
            src = self.ident()
            self.expect("->")
            tgt = self.ident()
            self.expect("=")
            mapping = self.mapping()
            self.accept(";")
            return A.IMorphism(name, src, tgt, mapping, p)
        if self.accept("cone"):
            return self.cone(p)
        self.unexpected("base", "import", "arity", "language", "theory", "structure", "morphism", "cone")

    def language(self, p):
        self.expect("{")
        decls = []
        while not self.accept("}"):
            q = self.pos()
            if self.accept("fun"):
                name = self.ident()
                self.expect(":")
                dom = self.obj()
                self.expect("->")
                cod = self.obj()
                decls.append(A.DFun(name, dom, cod, q))
            elif self.accept("rel"):
                name = self.ident()
                self.expect(":")
                decls.append(A.DRel(name, self.obj(), q))
            else:
                self.unexpected("fun", "rel", "}")
            self.accept(";")
        return A.ILanguage(tuple(decls), p)

    def theory(self, p):
        name = self.ident()
        self.expect("{")
        axioms = []
        while not self.accept("}"):
            q = self.pos()
            if self.accept("axiom"):
                ax = self.ident()
                self.expect(":")
                axioms.append(A.AAxiom(ax, self.sequent(), q))
            elif self.accept("schema"):
                ax = self.ident()
                self.expect("(")
                param = self.ident()
                self.expect("in")
                if self.accept("Q+"):
                    domain, start = "Q+", 0
                else:
                    start = self.integer()
                    self.expect("..")
                    domain = "N"
                self.expect(")")
                self.expect(":")
                axioms.append(A.ASchema(ax, param, domain, start, self.sequent(), q))
            else:
                self.unexpected("axiom", "schema", "}")
            self.expect(";")
        return A.ITheory(name, tuple(axioms), p)

    def structure(self, p):
        name = self.ident()
        self.expect("{")
        self.expect("carrier")
        carrier = self.obj()
        self.accept(";")
        funs, rels = [], []
        while not self.accept("}"):
            if self.accept("fun"):
                fname = self.ident()
                self.expect("=")
                funs.append((fname, self.mapping()))
            elif self.accept("rel"):
                rname = self.ident()
                self.expect("=")
                rels.append((rname, self.point_set()))
            else:
                self.unexpected("fun", "rel", "}")
            self.accept(";")
        return A.IStructure(name, carrier, tuple(funs), tuple(rels), p)

    def cone(self, p):
        name = self.ident()
        self.expect("{")
        self.expect("apex")
        apex = self.ident()
        self.accept(";")
        legs = []
        while not self.accept("}"):
            self.expect("leg")
            tgt = self.ident()
            self.expect("=")
            legs.append((tgt, self.mapping()))
            self.accept(";")
        return A.ICone(name, apex, tuple(legs), p)

    # -- points and tables ---------------------------------------------------

    def point(self):
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return t.value
        if t.kind == "int":
            self.i += 1
            return int(t.value)
        if t.kind == "sym" and t.value == "-" and self.peek().kind == "int":
            self.i += 2
            return -int(self.toks[self.i - 1].value)
        if self.accept("["):
            items = self.point_list("]")
            return A.Bracket(items)
        if self.accept("("):
            items = self.point_list(")")
            return A.Tup(items)
        self.unexpected("<point>")

    def point_list(self, close: str) -> tuple:
        items = []
        if self.accept(close):
            return ()
        items.append(self.point())
        while self.accept(","):
            items.append(self.point())
        self.expect(close)
        return tuple(items)

    def mapping(self) -> tuple:
        self.expect("{")
        pairs = []
        if not self.accept("}"):
            while True:
                src = self.point()
                self.expect("->")
                pairs.append((src, self.point()))
                if self.accept("}"):
                    break
                self.expect(",")
        return tuple(pairs)

    def point_set(self) -> tuple:
        self.expect("{")
        return self.point_list("}")

    # -- objects -------------------------------------------------------------

    def obj(self) -> A.Obj:
        p = self.pos()
        parts = [self.tensor_obj()]
        while self.accept("+"):
            parts.append(self.tensor_obj())
        return parts[0] if len(parts) == 1 else A.OSum(tuple(parts), p)

    def tensor_obj(self) -> A.Obj:
        p = self.pos()
        parts = [self.atom_obj()]
        while self.accept("(*)"):
            parts.append(self.atom_obj())
        return parts[0] if len(parts) == 1 else A.OTensor(tuple(parts), p)

    def atom_obj(self) -> A.Obj:
        p = self.pos()
        t = self.tok
        if t.kind == "ident" and t.value == "I":
            self.i += 1
            return A.OUnit(p)
        if t.kind == "int" and t.value == "0":
            self.i += 1
            return A.OZero(p)
        if self.accept("finset"):
            if self.tok.kind == "int":
                return A.OFinset(self.integer(), None, p)
            self.expect("{")
            return A.OFinset(None, self.point_list("}"), p)
        if self.accept("poset"):
            self.expect("{")
            points, less = self.names_then("|"), []
            if self.accept("|"):
                while True:
                    chain = [self.point()]
                    self.expect("<")
                    chain.append(self.point())
                    while self.accept("<"):
                        chain.append(self.point())
                    less.extend(zip(chain, chain[1:]))
                    if not self.accept(","):
                        break
            self.expect("}")
            return A.OPoset(points, tuple(less), p)
        if self.accept("metric"):
            self.expect("{")
            points, dists = self.names_then("|"), []
            if self.accept("|"):
                while True:
                    if not (self.tok.kind == "ident" and self.tok.value == "d"):
                        self.unexpected("d")
                    self.i += 1
                    self.expect("(")
                    x = self.point()
                    self.expect(",")
                    y = self.point()
                    self.expect(")")
                    self.expect("=")
                    dists.append((x, y, self.distance()))
                    if not self.accept(","):
                        break
            self.expect("}")
            return A.OMetric(points, tuple(dists), p)
        if self.accept("abgroup"):
            self.expect("(")
            moduli = []
            if not self.accept(")"):
                moduli.append(self.integer())
                while self.accept(","):
                    moduli.append(self.integer())
                self.expect(")")
            return A.OAb(tuple(moduli), p)
        if t.kind == "ident":
            self.i += 1
            return A.ORef(t.value, p)
        if self.accept("("):
            inner = self.obj()
            self.expect(")")
            return inner
        self.unexpected("I", "0", "finset", "poset", "metric", "abgroup", "(", "<arity name>")

    def names_then(self, stop: str) -> tuple:
        names = []
        if self.at(stop) or self.at("}"):
            return ()
        names.append(self.point())
        while self.accept(","):
            names.append(self.point())
        return tuple(names)

    def distance(self) -> A.Dist:
        if self.accept("inf"):
            return A.Dist(inf=True)
        a, b, param = Fraction(0), Fraction(0), None
        sign = -1 if self.accept("-") else 1
        while True:
            coeff, name = self.dist_term()
            if name is None:
                b += sign * coeff
            else:
                if param is not None and name != param:
                    self.error("distance mixes two parameters")
                param = name
                a += sign * coeff
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        if a == 0:
            param = None
        return A.Dist(a, b, param)

    def dist_term(self):
        """``q``, ``q*p``, ``p``, ``p/k`` or ``q*p/k`` with ``q`` rational and ``p`` a parameter."""
        if self.tok.kind == "ident":
            name = self.ident()
            coeff = Fraction(1)
            if self.accept("/"):
                coeff /= self.integer()
            return coeff, name
        coeff = Fraction(self.integer())
        if self.accept("/"):
            coeff /= self.integer()
        if self.accept("*"):
            name = self.ident()
            if self.accept("/"):
                coeff /= self.integer()
            return coeff, name
        return coeff, None

    # -- formulas ------------------------------------------------------------

    def binders(self) -> tuple:
        out = [self.binder()]
        while self.accept(","):
            out.append(self.binder())
        return tuple(out)

    def binder(self):
        name = self.ident()
        typ = None
        if self.accept(":"):
            typ = self.obj()
        return (name, typ)

    def sequent(self) -> A.RSequent:
        p = self.pos()
        binders = ()
        if self.accept("forall"):
            binders = self.binders()
            self.expect(".")
        first = self.formula()
        if self.accept("|-"):
            return A.RSequent(binders, first, self.formula(), p)
        return A.RSequent(binders, A.FTrue(p), first, p)

    def formula(self) -> A.RFormula:
        p = self.pos()
        parts = [self.conjunction()]
        while self.accept("\\/"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else A.FOr(tuple(parts), p)

    def conjunction(self) -> A.RFormula:
        p = self.pos()
        parts = [self.unary()]
        while self.accept("/\\"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else A.FAnd(tuple(parts), p)

    def unary(self) -> A.RFormula:
        p = self.pos()
        if self.accept("true"):
            return A.FTrue(p)
        if self.accept("false"):
            return A.FFalse(p)
        if self.tok.kind == "kw" and self.tok.value in QUANTIFIERS:
            q = self.tok.value
            self.i += 1
            binders = self.binders()
            self.expect(".")
            return A.FExists(q, binders, self.formula(), p)
        if self.accept("\\/"):
            param = self.ident()
            self.expect("in")
            start = self.integer()
            self.expect("..")
            self.expect(".")
            return A.FIndexed(param, start, self.formula(), p)
        if self.at("(", "sym"):
            # parenthesised formula, unless it turns out to be a tuple term in an equation
            save = self.i
            self.i += 1
            first = None
            try:
                inner = self.formula()
                self.expect(")")
                if not self.at("="):
                    return inner
            except ParseError as exc:
                first = exc
            self.i = save
            try:
                return self.atom()
            except ParseError as exc:
                # report whichever reading got further into the input
                if first is not None and (first.line, first.col) > (exc.line, exc.col):
                    raise first from None
                raise
        return self.atom()

    def atom(self) -> A.RFormula:
        p = self.pos()
        if self.tok.kind == "ident" and self.peek().value == "^" and self.peek().kind == "sym":
            name = self.ident()
            self.expect("^")
            power = self.atom_obj()
            self.expect("(")
            return A.FRel(name, self.term_list(")"), power, p)
        lhs = self.term()
        if self.accept("="):
            return A.FEq(lhs, self.term(), p)
        if isinstance(lhs, A.TApp):
            return A.FRel(lhs.fun, lhs.args, None, p)
        self.unexpected("=", "(")

    def term_list(self, close: str) -> tuple:
        if self.accept(close):
            return ()
        items = [self.term()]
        while self.accept(","):
            items.append(self.term())
        self.expect(close)
        return tuple(items)

    def term(self) -> A.RTerm:
        p = self.pos()
        if self.accept("("):
            items = self.term_list(")")
            if len(items) == 1:
                return items[0]
            return A.TTuple(items, p)
        name = self.ident()
        if self.accept("("):
            return A.TApp(name, self.term_list(")"), p)
        if self.at(".", "sym") and self.peek().kind in ("ident", "int"):
            self.i += 1
            return A.TProj(name, self.point(), p)
        return A.TVar(name, p)


def parse(text: str, path: str | None = None) -> A.Document:
    return Parser(text, path).document()


def parse_formula(text: str) -> A.RFormula:
    p = Parser(text)
    phi = p.formula()
    if p.tok.kind != "eof":
        p.unexpected("<end of input>")
    return phi


def parse_sequent(text: str) -> A.RSequent:
    p = Parser(text)
    seq = p.sequent()
    if p.tok.kind != "eof":
        p.unexpected("<end of input>")
    return seq
