"""Line-oriented model files.

Example::

    # three 0/1 variables, at most one of them set
    var x1, x2, x3 : int 0..1
    constraint x1 + x2 + x3 <= 1
    cost sum(x1, x2, x3)
    order gt
    solver epsilon 0.0
    solver filter check

Statements, one per line (``#`` starts a comment):

``var NAMES : DOMAIN``
    DOMAIN is ``bool``, ``int A..B``, ``enum {v, ...}``, ``set of {u, ...}``
    or ``real [a, b]``.
``constraint EXPR``
    linear ``2*x - y <= 3`` (relations ``<= >= = != ==``),
    ``table (x, y) {(0, 1), (1, 1)}``, ``formula x | (y & !z)``,
    ``3 in s``, ``3 notin s``, ``s subset t``, ``card s <= 2``.
``cost EXPR``
    ``constant K``, ``sum(x, ...)`` or ``pair(E1, E2)``.
``order ORD``
    ``eq``, ``lt``, ``gt``, ``lex(max, min)``, ``comp(min, max)``.
``delta V`` or ``delta (V1, V2)``
    initial bound; ``inf`` and ``-inf`` allowed.
``solver KEY VALUE``
    ``epsilon``, ``filter`` (check|fixpoint), ``select`` (naive|ff),
    ``stack`` (full|top), ``max_rounds``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

from .constraints import (
    BAnd,
    BConst,
    BNot,
    BOr,
    BVar,
    Cardinality,
    CSPInstance,
    Formula,
    Linear,
    Member,
    Subset,
    Table,
    Variable,
)
from .costs import Compound, Constant, CostOrdering, CostSpec, Sum
from .domains import BoolDomain, EnumDomain, IntDomain, RealDomain, SetDomain
from .engine import SolverConfig
from .filtering import FilteringKind


class ModelError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<model>"):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {message}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.|<=|>=|!=|==|[=<>+\-*(){}\[\],:&|!~])
    """,
    re.VERBOSE,
)


@dataclass
class Tok:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int, source: str) -> list[Tok]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ModelError(f"unexpected character {text[pos]!r}", line, pos + 1, source)
        if m.lastgroup != "ws":
            toks.append(Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Line:
    """Cursor over one line's tokens."""

    def __init__(self, toks: list[Tok], line: int, source: str, width: int):
        self.toks = toks
        self.i = 0
        self.line = line
        self.source = source
        self.width = width

    def error(self, message: str, tok: Optional[Tok] = None) -> ModelError:
        if tok is None:
            tok = self.peek()
        col = tok.col if tok else self.width + 1
        return ModelError(message, self.line, col, self.source)

    def peek(self, k: int = 0) -> Optional[Tok]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def next(self) -> Tok:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return tok

    def expect(self, text: str) -> Tok:
        tok = self.peek()
        if tok is None or tok.text != text:
            found = "end of line" if tok is None else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return self.next()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def name(self) -> Tok:
        tok = self.next()
        if tok.kind != "name":
            raise self.error(f"expected a name, found {tok.text!r}", tok)
        return tok

    def number(self):
        neg = self.accept("-")
        tok = self.next()
        if tok.kind == "name" and tok.text == "inf":
            value = math.inf
        elif tok.kind == "num":
            value = float(tok.text) if re.search(r"[.eE]", tok.text) else int(tok.text)
        else:
            raise self.error(f"expected a number, found {tok.text!r}", tok)
        return -value if neg else value

    def integer(self) -> int:
        tok = self.peek()
        value = self.number()
        if not isinstance(value, int):
            raise self.error(f"expected an integer, found {value!r}", tok)
        return value

    def done(self):
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")


def _is_boolean(domain) -> bool:
    if isinstance(domain, BoolDomain):
        return True
    if isinstance(domain, EnumDomain):
        return set(domain.values) <= {0, 1}
    if isinstance(domain, IntDomain):
        return 0 <= domain.lo and domain.hi <= 1
    return False


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.variables: list[Variable] = []
        self.index: dict[str, int] = {}
        self.constraints: list = []
        self.cost_expr = None
        self.ordering: Optional[CostOrdering] = None
        self.delta = None
        self.cost_line = 0
        self.solver: dict = {}

    # -- variables -------------------------------------------------------

    def var_ref(self, cur: _Line, kinds=None, what="variable") -> int:
        tok = cur.name()
        if tok.text not in self.index:
            raise cur.error(f"unknown variable {tok.text!r}", tok)
        i = self.index[tok.text]
        if kinds is not None and not kinds(self.variables[i].domain):
            raise cur.error(f"variable {tok.text!r} is not a {what}", tok)
        return i

    def stmt_var(self, cur: _Line):
        names = [cur.name()]
        while cur.accept(","):
            names.append(cur.name())
        cur.expect(":")
        domain = self.domain(cur)
        cur.done()
        for tok in names:
            if tok.text in self.index:
                raise cur.error(f"variable {tok.text!r} declared twice", tok)
            self.index[tok.text] = len(self.variables)
            self.variables.append(Variable(tok.text, domain))

    def domain(self, cur: _Line):
        tok = cur.name()
        try:
            if tok.text == "bool":
                return BoolDomain()
            if tok.text == "int":
                lo = cur.integer()
                cur.expect("..")
                hi = cur.integer()
                return IntDomain(lo, hi)
            if tok.text == "enum":
                return EnumDomain(tuple(self.int_set(cur)))
            if tok.text == "set":
                of = cur.name()
                if of.text != "of":
                    raise cur.error("expected 'of'", of)
                return SetDomain(frozenset(self.int_set(cur)))
            if tok.text == "real":
                cur.expect("[")
                lo = cur.number()
                cur.expect(",")
                hi = cur.number()
                cur.expect("]")
                return RealDomain(lo, hi)
        except ValueError as e:
            if isinstance(e, ModelError):
                raise
            raise cur.error(str(e), tok) from None
        raise cur.error(f"unknown domain {tok.text!r}", tok)

    def int_set(self, cur: _Line) -> list[int]:
        cur.expect("{")
        values = []
        if not cur.at("}"):
            values.append(cur.integer())
            while cur.accept(","):
                values.append(cur.integer())
        cur.expect("}")
        return values

    # -- constraints -----------------------------------------------------

    def stmt_constraint(self, cur: _Line):
        first = cur.peek()
        if first is None:
            raise cur.error("empty constraint")
        texts = [t.text for t in cur.toks[cur.i :]]
        if first.text == "table":
            cur.next()
            c = self.table(cur)
        elif first.text == "formula":
            cur.next()
            c = Formula(self.bool_or(cur))
        elif first.text == "card":
            cur.next()
            var = self.var_ref(cur, lambda d: isinstance(d, SetDomain), "set variable")
            op = self.relation(cur)
            c = Cardinality(var, op, cur.integer())
        elif "in" in texts or "notin" in texts:
            elem = cur.integer()
            kw = cur.name()
            if kw.text not in ("in", "notin"):
                raise cur.error("expected 'in' or 'notin'", kw)
            var = self.var_ref(cur, lambda d: isinstance(d, SetDomain), "set variable")
            c = Member(elem, var, kw.text == "notin")
        elif "subset" in texts:
            is_set = lambda d: isinstance(d, SetDomain)  # noqa: E731
            left = self.var_ref(cur, is_set, "set variable")
            kw = cur.name()
            if kw.text != "subset":
                raise cur.error("expected 'subset'", kw)
            c = Subset(left, self.var_ref(cur, is_set, "set variable"))
        else:
            c = self.linear(cur)
        cur.done()
        self.constraints.append(c)

    def relation(self, cur: _Line) -> str:
        tok = cur.next()
        if tok.text == "==":
            return "="
        if tok.text not in ("<=", ">=", "=", "!="):
            raise cur.error(f"expected a relation, found {tok.text!r}", tok)
        return tok.text

    def linear_side(self, cur: _Line):
        """Parse ``[-]term {(+|-) term}``; returns (coefficients, constant)."""
        coeffs: dict[int, object] = {}
        const = 0
        sign = -1 if cur.accept("-") else 1
        while True:
            tok = cur.peek()
            if tok is None:
                raise cur.error("expected a term")
            if tok.kind == "name" and tok.text != "inf":
                var = self.var_ref(cur, lambda d: not isinstance(d, SetDomain), "numeric variable")
                coeffs[var] = coeffs.get(var, 0) + sign
            else:
                value = cur.number()
                if cur.accept("*"):
                    var = self.var_ref(
                        cur, lambda d: not isinstance(d, SetDomain), "numeric variable"
                    )
                    coeffs[var] = coeffs.get(var, 0) + sign * value
                else:
                    const += sign * value
            if cur.accept("+"):
                sign = 1
            elif cur.accept("-"):
                sign = -1
            else:
                return coeffs, const

    def linear(self, cur: _Line) -> Linear:
        lhs, lconst = self.linear_side(cur)
        op = self.relation(cur)
        rhs, rconst = self.linear_side(cur)
        terms = dict(lhs)
        for var, c in rhs.items():
            terms[var] = terms.get(var, 0) - c
        return Linear(tuple(terms.items()), op, rconst - lconst)

    def table(self, cur: _Line) -> Table:
        cur.expect("(")
        vars_ = [self.var_ref(cur, lambda d: not isinstance(d, SetDomain), "numeric variable")]
        while cur.accept(","):
            vars_.append(
                self.var_ref(cur, lambda d: not isinstance(d, SetDomain), "numeric variable")
            )
        cur.expect(")")
        cur.expect("{")
        tuples = []
        if not cur.at("}"):
            tuples.append(self.tuple_(cur, len(vars_)))
            while cur.accept(","):
                tuples.append(self.tuple_(cur, len(vars_)))
        cur.expect("}")
        return Table(tuple(vars_), frozenset(tuples))

    def tuple_(self, cur: _Line, arity: int) -> tuple:
        start = cur.expect("(")
        values = [cur.number()]
        while cur.accept(","):
            values.append(cur.number())
        cur.expect(")")
        if len(values) != arity:
            raise cur.error(f"tuple has {len(values)} values, scope has {arity}", start)
        return tuple(values)

    def bool_or(self, cur: _Line):
        args = [self.bool_and(cur)]
        while cur.accept("|"):
            args.append(self.bool_and(cur))
        return args[0] if len(args) == 1 else BOr(tuple(args))

    def bool_and(self, cur: _Line):
        args = [self.bool_not(cur)]
        while cur.accept("&"):
            args.append(self.bool_not(cur))
        return args[0] if len(args) == 1 else BAnd(tuple(args))

    def bool_not(self, cur: _Line):
        if cur.accept("!") or cur.accept("~"):
            return BNot(self.bool_not(cur))
        if cur.accept("("):
            inner = self.bool_or(cur)
            cur.expect(")")
            return inner
        tok = cur.peek()
        if tok is not None and tok.text in ("true", "false"):
            cur.next()
            return BConst(tok.text == "true")
        return BVar(self.var_ref(cur, _is_boolean, "Boolean variable"))

    # -- cost and solver -------------------------------------------------

    def cost_term(self, cur: _Line):
        tok = cur.name()
        if tok.text == "constant":
            return Constant(float(cur.number()))
        if tok.text == "sum":
            cur.expect("(")
            numeric = lambda d: not isinstance(d, SetDomain)  # noqa: E731
            idx = [self.var_ref(cur, numeric, "numeric variable")]
            while cur.accept(","):
                idx.append(self.var_ref(cur, numeric, "numeric variable"))
            cur.expect(")")
            return Sum(tuple(idx))
        if tok.text == "pair":
            cur.expect("(")
            first = self.cost_term(cur)
            cur.expect(",")
            second = self.cost_term(cur)
            cur.expect(")")
            if isinstance(first, Compound) or isinstance(second, Compound):
                raise cur.error("pair components must be scalar", tok)
            return Compound((first, second))
        raise cur.error(f"unknown cost expression {tok.text!r}", tok)

    def stmt_cost(self, cur: _Line):
        self.cost_expr = self.cost_term(cur)
        self.cost_line = cur.line
        cur.done()

    def stmt_order(self, cur: _Line):
        tok = cur.name()
        if tok.text in ("eq", "lt", "gt"):
            self.ordering = CostOrdering(tok.text)
        elif tok.text in ("lex", "comp"):
            cur.expect("(")
            dirs = [cur.name().text]
            while cur.accept(","):
                dirs.append(cur.name().text)
            cur.expect(")")
            try:
                self.ordering = CostOrdering(tok.text, tuple(dirs))
            except ValueError as e:
                raise cur.error(str(e), tok) from None
        else:
            raise cur.error(f"unknown ordering {tok.text!r}", tok)
        cur.done()

    def stmt_delta(self, cur: _Line):
        if cur.accept("("):
            values = [cur.number()]
            while cur.accept(","):
                values.append(cur.number())
            cur.expect(")")
        else:
            values = [cur.number()]
        cur.done()
        self.delta = tuple(float(v) for v in values)

    def stmt_solver(self, cur: _Line):
        key = cur.name()
        if key.text == "epsilon":
            value = cur.number()
        elif key.text == "max_rounds":
            value = cur.integer()
        elif key.text in ("filter", "select", "stack"):
            value = cur.name().text
            allowed = {
                "filter": ("check", "fixpoint"),
                "select": ("naive", "ff"),
                "stack": ("full", "top"),
            }[key.text]
            if value not in allowed:
                raise cur.error(f"{key.text} must be one of {', '.join(allowed)}")
        else:
            raise cur.error(f"unknown solver setting {key.text!r}", key)
        cur.done()
        self.solver[key.text] = value

    # -- driver ----------------------------------------------------------

    def parse(self, text: str):
        handlers = {
            "var": self.stmt_var,
            "constraint": self.stmt_constraint,
            "cost": self.stmt_cost,
            "order": self.stmt_order,
            "delta": self.stmt_delta,
            "solver": self.stmt_solver,
        }
        for lineno, raw in enumerate(text.splitlines(), 1):
            body = raw.split("#", 1)[0]
            toks = tokenize(body, lineno, self.source)
            if not toks:
                continue
            cur = _Line(toks, lineno, self.source, len(body.rstrip()))
            head = cur.next()
            if head.text not in handlers:
                raise cur.error(f"unknown statement {head.text!r}", head)
            handlers[head.text](cur)
        return self.build()

    def build(self):
        if not self.variables:
            raise ModelError("model declares no variables", 1, 1, self.source)
        instance = CSPInstance(tuple(self.variables), tuple(self.constraints))
        cost = None
        if self.cost_expr is not None or self.ordering is not None:
            if self.cost_expr is None or self.ordering is None:
                raise ModelError("a cost needs both 'cost' and 'order'", self.cost_line, 1, self.source)
            try:
                cost = CostSpec(self.cost_expr, self.ordering, self.delta)
            except ValueError as e:
                raise ModelError(str(e), self.cost_line, 1, self.source) from None
        elif self.delta is not None:
            raise ModelError("'delta' given without a cost", 0, 1, self.source)
        s = self.solver
        config = SolverConfig(
            epsilon=float(s.get("epsilon", 0.0)),
            filtering=FilteringKind(s.get("filter", "check"), s.get("max_rounds", 10_000)),
            selector=s.get("select", "naive"),
            cost=cost,
            keep_full_stack=s.get("stack", "full") == "full",
        )
        return instance, config


def parse_model(text: str, source: str = "<model>"):
    """Parse model text into ``(CSPInstance, SolverConfig)``."""
    return _Parser(source).parse(text)


def parse_cost(text: str, instance: CSPInstance):
    """Parse a standalone cost expression (``sum``, ``constant`` or ``pair``)."""
    p = _Parser("<cost>")
    p.variables = list(instance.variables)
    p.index = {v.name: i for i, v in enumerate(instance.variables)}
    cur = _Line(tokenize(text, 1, "<cost>"), 1, "<cost>", len(text))
    expr = p.cost_term(cur)
    cur.done()
    return expr


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), str(path))


# -- printing -----------------------------------------------------------------


def _num(v) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _domain_text(d) -> str:
    if isinstance(d, BoolDomain):
        return "bool"
    if isinstance(d, IntDomain):
        return f"int {d.lo}..{d.hi}"
    if isinstance(d, EnumDomain):
        return "enum {" + ", ".join(map(str, d.values)) + "}"
    if isinstance(d, SetDomain):
        return "set of {" + ", ".join(map(str, sorted(d.universe))) + "}"
    if isinstance(d, RealDomain):
        return f"real [{d.lo!r}, {d.hi!r}]"
    raise TypeError(f"domain {d!r} has no model syntax")


def _linear_text(c: Linear, names) -> str:
    parts = []
    for k, (i, coef) in enumerate(c.terms):
        neg = coef < 0
        mag = -coef if neg else coef
        if isinstance(mag, int) and mag == 1:
            term = names[i]
        else:
            term = f"{mag!r}*{names[i]}"
        if k == 0:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append(("- " if neg else "+ ") + term)
    lhs = " ".join(parts) if parts else "0"
    return f"{lhs} {c.op} {_num(c.rhs)}"


def _bool_text(e, names) -> str:
    if isinstance(e, BVar):
        return names[e.index]
    if isinstance(e, BConst):
        return "true" if e.value else "false"
    if isinstance(e, BNot):
        return "!" + _bool_text(e.arg, names)
    sep = " & " if isinstance(e, BAnd) else " | "
    return "(" + sep.join(_bool_text(a, names) for a in e.args) + ")"


def _constraint_text(c, names) -> str:
    if isinstance(c, Linear):
        return _linear_text(c, names)
    if isinstance(c, Table):
        scope = ", ".join(names[i] for i in c.vars)
        rows = ", ".join("(" + ", ".join(map(_num, t)) + ")" for t in sorted(c.tuples))
        return f"table ({scope}) {{{rows}}}"
    if isinstance(c, Formula):
        return "formula " + _bool_text(c.expr, names)
    if isinstance(c, Member):
        return f"{c.element} {'notin' if c.negated else 'in'} {names[c.var]}"
    if isinstance(c, Subset):
        return f"{names[c.left]} subset {names[c.right]}"
    if isinstance(c, Cardinality):
        return f"card {names[c.var]} {c.op} {c.n}"
    raise TypeError(f"constraint {c!r} has no model syntax")


def cost_text(e, names) -> str:
    if isinstance(e, Constant):
        return f"constant {_num(e.value)}"
    if isinstance(e, Sum):
        return "sum(" + ", ".join(names[i] for i in e.indices) + ")"
    return "pair(" + ", ".join(cost_text(p, names) for p in e.parts) + ")"


def ordering_text(o: CostOrdering) -> str:
    if o.directions:
        return f"{o.kind}({', '.join(o.directions)})"
    return o.kind


def format_model(instance: CSPInstance, config: Optional[SolverConfig] = None) -> str:
    """Render a model that parses back to the same instance and config."""
    names = instance.names
    lines = [f"var {v.name} : {_domain_text(v.domain)}" for v in instance.variables]
    lines += [f"constraint {_constraint_text(c, names)}" for c in instance.constraints]
    if config is not None:
        if config.cost is not None:
            lines.append(f"cost {cost_text(config.cost.expr, names)}")
            lines.append(f"order {ordering_text(config.cost.ordering)}")
            if config.cost.delta0 is not None:
                vals = [_num(v) for v in config.cost.delta0]
                lines.append(
                    f"delta {vals[0]}" if len(vals) == 1 else f"delta ({', '.join(vals)})"
                )
        lines.append(f"solver epsilon {config.epsilon!r}")
        lines.append(f"solver filter {config.filtering.name}")
        lines.append(f"solver max_rounds {config.filtering.max_rounds}")
        lines.append(f"solver select {config.selector}")
        lines.append(f"solver stack {'full' if config.keep_full_stack else 'top'}")
    return "\n".join(lines) + "\n"
