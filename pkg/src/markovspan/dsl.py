"""Text format for alphabets, automata, and composition expressions.

A model file (extension .mkv) declares named alphabets, automata, and
systems::

    alphabet A = { eps, t, r };

    automaton Phil [A, A] {
      states: 1 2 3 4;
      1 -(eps|eps)-> 1 : 1/2;
      1 -(t|eps)->   2 : 1/2;
      ...
    }

    system DF2 = unit(A) . ((Phil . Fork . Phil . Fork) x id(A)) . counit(A);

Expression operators, loosest to tightest: `.` (series), `x` (parallel),
`^ INT` (word power); all left-associative.  `eps` is reserved as the
null symbol of every alphabet, and `x` is reserved as the parallel
operator.  Constants: id, copy, merge, swap, unit, counit, and inline
`rel(A, B) { (a, b), ... }` literals.  Comments run from `#` to the end
of the line.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .algebra import (CompositionTypeError, Relation, relation_automaton,
                      series_markov, series_weighted, parallel,
                      standard_constant)
from .automata import Alphabet, WeightedAutomaton
from .matrix import Matrix, scalar_str


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    col: int
    severity: str
    message: str

    def __str__(self):
        return "%s:%d:%d: %s: %s" % (self.file, self.line, self.col,
                                     self.severity, self.message)


class ModelSyntaxError(ValueError):
    """Parse or semantic failure; carries positioned diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ElaborationError(ValueError):
    """Failure while evaluating a system expression."""

    def __init__(self, diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

Span = tuple  # (line, col)


@dataclass(frozen=True)
class Transition:
    src: str
    a: str
    b: str
    dst: str
    weight: Fraction
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class AlphabetDecl:
    name: str
    symbols: tuple  # eps first
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class AutomatonDecl:
    name: str
    left: str
    right: str
    states: tuple
    transitions: tuple  # sorted by (src, a, b, dst)
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class SystemDecl:
    name: str
    expr: "Expr"
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Ref:
    name: str
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Series:
    lhs: "Expr"
    rhs: "Expr"
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Parallel:
    lhs: "Expr"
    rhs: "Expr"
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: int
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class Constant:
    kind: str  # identity, copy, merge, swap, unit, counit
    alphabet: str
    alphabet2: str = None
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class RelLiteral:
    left: str
    right: str
    pairs: tuple  # sorted (a, b) symbol pairs
    span: Span = field(compare=False, default=(0, 0))


@dataclass(frozen=True)
class ModelDocument:
    items: tuple  # declarations in source order
    source_file: str = field(compare=False, default="<input>")

    @property
    def alphabets(self):
        return {d.name: d for d in self.items if isinstance(d, AlphabetDecl)}

    @property
    def automata(self):
        return {d.name: d for d in self.items if isinstance(d, AutomatonDecl)}

    @property
    def systems(self):
        return {d.name: d for d in self.items if isinstance(d, SystemDecl)}


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = ("-(", ")->", "=", "{", "}", ";", ",", "[", "]", "(", ")", ":",
          ".", "^", "/", "|")

KEYWORDS = {"alphabet", "automaton", "system", "states",
            "id", "copy", "merge", "swap", "unit", "counit", "rel"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, DECIMAL, or the punctuation text, or EOF
    text: str
    line: int
    col: int


def _lex(text, filename):
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(Token("DECIMAL", text[i:j], line, col))
            else:
                tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise ModelSyntaxError([Diagnostic(filename, line, col, "error",
                                               "unexpected character %r" % c)])
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens, filename):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename

    @property
    def current(self):
        return self.tokens[self.pos]

    def error(self, message, token=None):
        tok = token or self.current
        raise ModelSyntaxError([Diagnostic(self.filename, tok.line, tok.col,
                                           "error", message)])

    def accept(self, kind, text=None):
        tok = self.current
        if tok.kind == kind and (text is None or tok.text == text):
            self.pos += 1
            return tok
        return None

    def expect(self, kind, text=None, what=None):
        tok = self.accept(kind, text)
        if tok is None:
            self.error("expected %s, found %r" % (what or text or kind, self.current.text))
        return tok

    def span(self, tok):
        return (tok.line, tok.col)

    # -- items ----------------------------------------------------------

    def parse_document(self):
        items = []
        while self.current.kind != "EOF":
            tok = self.current
            if tok.kind == "IDENT" and tok.text == "alphabet":
                items.append(self.parse_alphabet())
            elif tok.kind == "IDENT" and tok.text == "automaton":
                items.append(self.parse_automaton())
            elif tok.kind == "IDENT" and tok.text == "system":
                items.append(self.parse_system())
            else:
                self.error("expected alphabet, automaton, or system declaration")
        return ModelDocument(tuple(items), self.filename)

    def name(self, what):
        tok = self.expect("IDENT", what=what)
        if tok.text in KEYWORDS or tok.text in ("eps", "x"):
            self.error("%r is reserved and cannot name a %s" % (tok.text, what), tok)
        return tok

    def parse_alphabet(self):
        kw = self.expect("IDENT", "alphabet")
        name = self.name("alphabet")
        self.expect("=")
        self.expect("{")
        first = self.expect("IDENT", what="eps")
        if first.text != "eps":
            self.error("alphabet must list eps as its first symbol", first)
        symbols = ["eps"]
        while self.accept(","):
            sym = self.expect("IDENT", what="symbol")
            if sym.text == "eps":
                self.error("duplicate eps symbol", sym)
            if sym.text in symbols:
                self.error("duplicate symbol %r" % sym.text, sym)
            symbols.append(sym.text)
        self.expect("}")
        self.expect(";")
        return AlphabetDecl(name.text, tuple(symbols), self.span(kw))

    def state_name(self):
        tok = self.current
        if tok.kind in ("IDENT", "INT"):
            self.pos += 1
            return tok
        self.error("expected a state name")

    def parse_automaton(self):
        kw = self.expect("IDENT", "automaton")
        name = self.name("automaton")
        self.expect("[")
        left = self.expect("IDENT", what="alphabet name")
        self.expect(",")
        right = self.expect("IDENT", what="alphabet name")
        self.expect("]")
        self.expect("{")
        self.expect("IDENT", "states")
        self.expect(":")
        states = []
        while self.current.kind in ("IDENT", "INT"):
            tok = self.state_name()
            if tok.text in states:
                self.error("duplicate state %r" % tok.text, tok)
            states.append(tok.text)
        if not states:
            self.error("automaton needs at least one state")
        self.expect(";")
        transitions = []
        seen = set()
        while self.current.kind != "}":
            transitions.append(self.parse_transition(seen))
        self.expect("}")
        transitions.sort(key=lambda t: (t.src, t.a, t.b, t.dst))
        return AutomatonDecl(name.text, left.text, right.text,
                             tuple(states), tuple(transitions), self.span(kw))

    def parse_transition(self, seen):
        src = self.state_name()
        self.expect("-(")
        a = self.expect("IDENT", what="left symbol")
        self.expect("|")
        b = self.expect("IDENT", what="right symbol")
        self.expect(")->")
        dst = self.state_name()
        self.expect(":")
        weight = self.parse_weight()
        self.expect(";")
        quad = (src.text, a.text, b.text, dst.text)
        if quad in seen:
            self.error("duplicate transition %s -(%s|%s)-> %s"
                       % quad, src)
        seen.add(quad)
        return Transition(src.text, a.text, b.text, dst.text, weight,
                          self.span(src))

    def parse_weight(self):
        tok = self.current
        if tok.kind == "DECIMAL":
            self.pos += 1
            # literal decimal expansion, kept exact
            whole, frac = tok.text.split(".")
            return Fraction(int(whole + frac), 10 ** len(frac))
        if tok.kind == "INT":
            self.pos += 1
            if self.accept("/"):
                den = self.expect("INT", what="denominator")
                if int(den.text) == 0:
                    self.error("zero denominator", den)
                return Fraction(int(tok.text), int(den.text))
            return Fraction(int(tok.text))
        self.error("expected a weight")

    def parse_system(self):
        kw = self.expect("IDENT", "system")
        name = self.name("system")
        self.expect("=")
        expr = self.parse_expr()
        self.expect(";")
        return SystemDecl(name.text, expr, self.span(kw))

    # -- expressions: . < x < ^ -----------------------------------------

    def parse_expr(self):
        expr = self.parse_term()
        while True:
            tok = self.accept(".")
            if tok is None:
                return expr
            expr = Series(expr, self.parse_term(), self.span(tok))

    def parse_term(self):
        term = self.parse_factor()
        while True:
            tok = self.current
            if tok.kind == "IDENT" and tok.text == "x":
                self.pos += 1
                term = Parallel(term, self.parse_factor(), self.span(tok))
            else:
                return term

    def parse_factor(self):
        factor = self.parse_primary()
        while True:
            tok = self.accept("^")
            if tok is None:
                return factor
            k = self.expect("INT", what="exponent")
            factor = Power(factor, int(k.text), self.span(tok))

    _CONSTANT_KINDS = {"id": "identity", "copy": "copy", "merge": "merge",
                       "swap": "swap", "unit": "unit", "counit": "counit"}

    def parse_primary(self):
        tok = self.current
        if self.accept("("):
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind != "IDENT":
            self.error("expected an expression")
        if tok.text in self._CONSTANT_KINDS:
            self.pos += 1
            kind = self._CONSTANT_KINDS[tok.text]
            self.expect("(")
            first = self.expect("IDENT", what="alphabet name")
            second = None
            if kind == "swap":
                self.expect(",")
                second = self.expect("IDENT", what="alphabet name").text
            self.expect(")")
            return Constant(kind, first.text, second, self.span(tok))
        if tok.text == "rel":
            return self.parse_rel_literal()
        if tok.text in KEYWORDS or tok.text in ("eps", "x"):
            self.error("%r is reserved" % tok.text)
        self.pos += 1
        return Ref(tok.text, self.span(tok))

    def parse_rel_literal(self):
        kw = self.expect("IDENT", "rel")
        self.expect("(")
        left = self.expect("IDENT", what="alphabet name")
        self.expect(",")
        right = self.expect("IDENT", what="alphabet name")
        self.expect(")")
        self.expect("{")
        pairs = [self.parse_rel_pair()]
        while self.accept(","):
            pairs.append(self.parse_rel_pair())
        self.expect("}")
        return RelLiteral(left.text, right.text, tuple(sorted(set(pairs))),
                          self.span(kw))

    def parse_rel_pair(self):
        self.expect("(")
        a = self.expect("IDENT", what="symbol")
        self.expect(",")
        b = self.expect("IDENT", what="symbol")
        self.expect(")")
        return (a.text, b.text)


def _check_document(doc):
    """Name resolution and symbol checks; all diagnostics collected."""
    diags = []

    def err(span, message):
        diags.append(Diagnostic(doc.source_file, span[0], span[1], "error", message))

    seen = {}
    for item in doc.items:
        kind = type(item).__name__
        key = (kind, item.name)
        if key in seen:
            err(item.span, "duplicate %s %r" % (kind.replace("Decl", "").lower(), item.name))
        seen[key] = item

    alphabets = doc.alphabets
    automata = doc.automata

    def check_alpha_ref(name, span):
        if name not in alphabets:
            err(span, "unknown alphabet %r" % name)
            return None
        return alphabets[name]

    for auto in automata.values():
        left = check_alpha_ref(auto.left, auto.span)
        right = check_alpha_ref(auto.right, auto.span)
        states = set(auto.states)
        for t in auto.transitions:
            if t.src not in states:
                err(t.span, "unknown state %r" % t.src)
            if t.dst not in states:
                err(t.span, "unknown state %r" % t.dst)
            if left and t.a not in left.symbols:
                err(t.span, "symbol %r not in alphabet %s" % (t.a, auto.left))
            if right and t.b not in right.symbols:
                err(t.span, "symbol %r not in alphabet %s" % (t.b, auto.right))

    def walk(expr):
        if isinstance(expr, Ref):
            if expr.name not in automata:
                err(expr.span, "unknown automaton %r" % expr.name)
        elif isinstance(expr, (Series, Parallel)):
            walk(expr.lhs)
            walk(expr.rhs)
        elif isinstance(expr, Power):
            walk(expr.base)
        elif isinstance(expr, Constant):
            check_alpha_ref(expr.alphabet, expr.span)
            if expr.alphabet2 is not None:
                check_alpha_ref(expr.alphabet2, expr.span)
        elif isinstance(expr, RelLiteral):
            left = check_alpha_ref(expr.left, expr.span)
            right = check_alpha_ref(expr.right, expr.span)
            for a, b in expr.pairs:
                if left and a not in left.symbols:
                    err(expr.span, "symbol %r not in alphabet %s" % (a, expr.left))
                if right and b not in right.symbols:
                    err(expr.span, "symbol %r not in alphabet %s" % (b, expr.right))

    for system in doc.systems.values():
        walk(system.expr)
    if diags:
        raise ModelSyntaxError(diags)


def parse_model(text, filename="<input>"):
    """Parse model text into a checked document; raises ModelSyntaxError."""
    doc = _Parser(_lex(text, filename), filename).parse_document()
    _check_document(doc)
    return doc


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

def _weight_str(w):
    return str(w.numerator) if w.denominator == 1 else scalar_str(w)


def _expr_str(expr, parent_level=0):
    # precedence levels: series 1, parallel 2, power 3, primary 4
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Constant):
        short = {"identity": "id"}.get(expr.kind, expr.kind)
        args = expr.alphabet if expr.alphabet2 is None \
            else "%s, %s" % (expr.alphabet, expr.alphabet2)
        return "%s(%s)" % (short, args)
    if isinstance(expr, RelLiteral):
        pairs = ", ".join("(%s, %s)" % p for p in expr.pairs)
        return "rel(%s, %s) { %s }" % (expr.left, expr.right, pairs)
    if isinstance(expr, Series):
        text = "%s . %s" % (_expr_str(expr.lhs, 1), _expr_str(expr.rhs, 2))
        level = 1
    elif isinstance(expr, Parallel):
        text = "%s x %s" % (_expr_str(expr.lhs, 2), _expr_str(expr.rhs, 3))
        level = 2
    elif isinstance(expr, Power):
        text = "%s^%d" % (_expr_str(expr.base, 4), expr.exponent)
        level = 3
    else:
        raise TypeError("unknown expression node %r" % (expr,))
    return "(%s)" % text if level < parent_level else text


def print_model(doc):
    """Canonical text form: parse(print_model(parse(text))) == parse(text)."""
    chunks = []
    for item in doc.items:
        if isinstance(item, AlphabetDecl):
            chunks.append("alphabet %s = { %s };" % (item.name, ", ".join(item.symbols)))
        elif isinstance(item, AutomatonDecl):
            lines = ["automaton %s [%s, %s] {" % (item.name, item.left, item.right),
                     "  states: %s;" % " ".join(item.states)]
            for t in item.transitions:
                lines.append("  %s -(%s|%s)-> %s : %s;"
                             % (t.src, t.a, t.b, t.dst, _weight_str(t.weight)))
            lines.append("}")
            chunks.append("\n".join(lines))
        elif isinstance(item, SystemDecl):
            chunks.append("system %s = %s;" % (item.name, _expr_str(item.expr)))
    return "\n\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# Elaboration
# ---------------------------------------------------------------------------

#: largest materialized power alphabet
MAX_POWER_SYMBOLS = 64


class Elaborator:
    """Evaluates system expressions into Markov automata.

    Series chains compose weighted left-to-right with a single final
    normalization; with ``debug=True`` every chain is recomputed stepwise
    through the normalized series operation and the two results asserted
    exactly equal.
    """

    def __init__(self, doc, mode="exact", debug=False):
        self.doc = doc
        self.mode = mode
        self.debug = debug
        self._alphabets = {}
        self._automata = {}

    def fail(self, span, message):
        raise ElaborationError(Diagnostic(self.doc.source_file, span[0],
                                          span[1], "error", message))

    def alphabet(self, name):
        if name not in self._alphabets:
            decl = self.doc.alphabets[name]
            self._alphabets[name] = Alphabet(decl.name, decl.symbols)
        return self._alphabets[name]

    def automaton(self, name, span=(0, 0)):
        if name not in self._automata:
            decl = self.doc.automata[name]
            left = self.alphabet(decl.left)
            right = self.alphabet(decl.right)
            n = len(decl.states)
            index = {s: i for i, s in enumerate(decl.states)}
            entries = {}
            for t in decl.transitions:
                entries.setdefault((t.a, t.b), {})[index[t.src], index[t.dst]] = t.weight
            family = {lab: Matrix(n, n, e) for lab, e in entries.items()}
            auto = WeightedAutomaton(left, right, decl.states, family)
            report = auto.validate()
            if not report:
                self.fail(decl.span, "automaton %s is invalid: %s"
                          % (name, "; ".join(report.violations)))
            if not auto.is_markov():
                self.fail(decl.span, "automaton %s is not Markov "
                          "(total row sums differ from 1)" % name)
            auto = auto.normalize()  # same values; gives it the Markov type
            if self.mode == "float":
                auto = auto.to_float()
            self._automata[name] = auto
        return self._automata[name]

    def elaborate(self, system_name):
        if system_name not in self.doc.systems:
            raise ElaborationError(Diagnostic(self.doc.source_file, 0, 0, "error",
                                              "unknown system %r" % system_name))
        return self.eval(self.doc.systems[system_name].expr)

    def eval(self, expr):
        if isinstance(expr, Series):
            return self.eval_chain(expr)
        if isinstance(expr, Parallel):
            return parallel(self.eval(expr.lhs), self.eval(expr.rhs))
        if isinstance(expr, Power):
            base = self.eval(expr.base)
            if len(base.left) ** expr.exponent > MAX_POWER_SYMBOLS or \
                    len(base.right) ** expr.exponent > MAX_POWER_SYMBOLS:
                self.fail(expr.span, "power alphabet exceeds %d symbols" % MAX_POWER_SYMBOLS)
            return base.power(expr.exponent)
        if isinstance(expr, Constant):
            b = self.alphabet(expr.alphabet2) if expr.alphabet2 else None
            return standard_constant(expr.kind, self.alphabet(expr.alphabet),
                                     b, mode=self.mode)
        if isinstance(expr, RelLiteral):
            rel = Relation(self.alphabet(expr.left), self.alphabet(expr.right),
                           expr.pairs)
            return relation_automaton(rel, self.mode)
        if isinstance(expr, Ref):
            return self.automaton(expr.name, expr.span)
        raise TypeError("unknown expression node %r" % (expr,))

    def eval_chain(self, expr):
        parts = []

        def flatten(e):
            if isinstance(e, Series):
                flatten(e.lhs)
                flatten(e.rhs)
            else:
                parts.append((self.eval(e), e.span if hasattr(e, "span") else (0, 0)))

        flatten(expr)
        weighted = parts[0][0]
        for nxt, span in parts[1:]:
            if weighted.right != nxt.left:
                self.fail(span, "series interface mismatch: %r vs %r"
                          % (list(weighted.right.symbols), list(nxt.left.symbols)))
            weighted = series_weighted(weighted, nxt)
        result = weighted.normalize()
        if self.debug:
            stepwise = reduce(series_markov, [p for p, _ in parts])
            assert result.equals(stepwise), "chain normalization mismatch"
        return result


def elaborate(doc, system_name, mode="exact", debug=False):
    """Evaluate the named system of a parsed document into a Markov automaton."""
    return Elaborator(doc, mode=mode, debug=debug).elaborate(system_name)
