"""Scalar coefficient functions on R^4.

Expressions are written in a small infix language over the coordinates
``x1 .. x4``::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' expon)?
    expon  := '-' expon | power
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

Identifiers are the coordinates, the functions ``exp ln sinh cosh sqrt``
and any named constants supplied at parse time.  Unary minus binds looser
than ``^`` so ``-x1^2`` means ``-(x1^2)``; ``^`` is right-associative.

>>> f = parse("x1^2 + 3*x2")
>>> eval_expr(f, (2, 1, 0, 0))
7.0
>>> eval_jet(f, (2, 1, 0, 0)).grad
(4.0, 3.0, 0.0, 0.0)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from . import jets
from .errors import (DomainError, ExprSyntaxError, UnknownIdentifierError,
                     VariableIndexError)
from .jets import Jet

Point4 = tuple[float, float, float, float]

FUNCTIONS = ("exp", "ln", "sinh", "cosh", "sqrt")


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Const, Neg, Add, Sub, Mul, Div, Pow, Call]


@dataclass(frozen=True)
class ScalarField:
    """A parsed coefficient function.  Equality is structural on ``ast``."""

    ast: Node
    text: str = field(default="", compare=False)

    def __str__(self) -> str:
        return to_text(self.ast)

    def __call__(self, p: Sequence[float]) -> float:
        return eval_expr(self, p)

    def jet(self, p: Sequence[float]) -> Jet:
        return eval_jet(self, p)


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)

_VAR = re.compile(r"x(\d+)\Z")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, constants: Mapping[str, float]):
        self.text = text
        self.constants = constants
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str) -> ExprSyntaxError:
        kind, value, pos = self.tok
        what = "end of input" if kind == "end" else repr(value)
        return ExprSyntaxError(f"{message}, got {what}", pos, self.text)

    def expect(self, op: str) -> None:
        if self.tok[1] != op or self.tok[0] != "op":
            raise self.error(f"expected {op!r}")
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok[0] != "end":
            raise self.error("unexpected token")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.advance()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Node:
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            return Pow(base, self.expon())
        return base

    def expon(self) -> Node:
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.expon())
        return self.power()

    def atom(self) -> Node:
        kind, value, pos = self.tok
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "ident":
            self.advance()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            m = _VAR.match(value)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= 4:
                    raise VariableIndexError(
                        f"variable index {index} outside 1..4", pos, self.text)
                return Var(index)
            if value in self.constants:
                return Const(value, float(self.constants[value]))
            raise UnknownIdentifierError(f"unknown identifier {value!r}", pos, self.text)
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise self.error("expected a number, identifier or '('")


def parse(text: str, constants: Mapping[str, float] | None = None) -> ScalarField:
    """Parse ``text`` into a :class:`ScalarField`.

    Named constants are resolved against ``constants`` at parse time; any
    other identifier is an error.
    """
    consts = dict(constants or {})
    for name in consts:
        if name in FUNCTIONS or _VAR.match(name):
            raise ValueError(f"constant name {name!r} shadows a builtin")
    return ScalarField(_Parser(text, consts).parse(), text)


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _atomic(node: Node) -> bool:
    # negative literals print parenthesised, so every Num is atomic
    return isinstance(node, (Num, Var, Const, Call))


def _wrap(node: Node, min_prec: int) -> str:
    s = to_text(node)
    return s if _PREC.get(type(node), 5) >= min_prec else f"({s})"


def _expon_text(node: Node) -> str:
    if isinstance(node, Neg):
        return "-" + _expon_text(node.arg)
    if isinstance(node, Pow) or _atomic(node):
        return to_text(node)
    return f"({to_text(node)})"


def to_text(node: Node) -> str:
    """Canonical text; ``parse(to_text(n)).ast == n`` for parser output."""
    if isinstance(node, ScalarField):
        node = node.ast
    if isinstance(node, Num):
        s = _fmt_number(node.value)
        return s if node.value >= 0 else f"({s})"
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, 3)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, 5)}^{_expon_text(node.exponent)}"
    sym = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(node)]
    prec = _PREC[type(node)]
    return f"{_wrap(node.left, prec)} {sym} {_wrap(node.right, prec + 1)}"


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def as_point(p: Iterable[float]) -> Point4:
    pt = tuple(float(x) for x in p)
    if len(pt) != 4:
        raise ValueError(f"expected 4 coordinates, got {len(pt)}")
    if not all(math.isfinite(x) for x in pt):
        raise ValueError(f"non-finite coordinate in {pt}")
    return pt  # type: ignore[return-value]


def is_constant(node: Node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, (Num, Const)):
        return True
    if isinstance(node, (Neg, Call)):
        return is_constant(node.arg)
    if isinstance(node, Pow):
        return is_constant(node.base) and is_constant(node.exponent)
    return is_constant(node.left) and is_constant(node.right)


def _integer_exponent(node: Pow, value: float) -> int | None:
    if is_constant(node.exponent) and value.is_integer():
        return int(value)
    return None


_FLOAT_FUNCS = {
    "exp": math.exp, "sinh": math.sinh, "cosh": math.cosh,
    "ln": math.log, "sqrt": math.sqrt,
}


def _ipow(b: float, n: int) -> float:
    if n < 0:
        d = _ipow(b, -n)
        if d == 0.0:
            raise DomainError("division by zero in negative power")
        return 1.0 / d
    result = 1.0
    while n:
        if n & 1:
            result *= b
        n >>= 1
        if n:
            b *= b
    return result


def _eval(node: Node, p: Point4) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return p[node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.arg, p)
    if isinstance(node, Add):
        return _eval(node.left, p) + _eval(node.right, p)
    if isinstance(node, Sub):
        return _eval(node.left, p) - _eval(node.right, p)
    if isinstance(node, Mul):
        return _eval(node.left, p) * _eval(node.right, p)
    if isinstance(node, Div):
        d = _eval(node.right, p)
        if d == 0.0:
            raise DomainError("division by zero")
        return _eval(node.left, p) / d
    if isinstance(node, Pow):
        b = _eval(node.base, p)
        e = _eval(node.exponent, p)
        n = _integer_exponent(node, e)
        if n is not None:
            return _ipow(b, n)
        if b <= 0.0:
            raise DomainError(f"non-integer power of non-positive base {b!r}")
        return _FLOAT_FUNCS["exp"](e * math.log(b))
    if isinstance(node, Call):
        x = _eval(node.arg, p)
        if node.func == "ln" and x <= 0.0:
            raise DomainError(f"ln of non-positive value {x!r}")
        if node.func == "sqrt" and x < 0.0:
            raise DomainError(f"sqrt of negative value {x!r}")
        try:
            return _FLOAT_FUNCS[node.func](x)
        except OverflowError:
            raise DomainError(f"{node.func} overflow at {x!r}") from None
    raise TypeError(f"not an expression node: {node!r}")


def eval_expr(f: ScalarField | Node, p: Sequence[float]) -> float:
    """Evaluate ``f`` at ``p``; domain problems raise :class:`DomainError`."""
    node = f.ast if isinstance(f, ScalarField) else f
    try:
        value = _eval(node, as_point(p))
    except OverflowError:
        raise DomainError("overflow") from None
    if not math.isfinite(value):
        raise DomainError(f"non-finite value {value!r}")
    return value


_JET_FUNCS = {"exp": jets.exp, "ln": jets.ln, "sinh": jets.sinh,
              "cosh": jets.cosh, "sqrt": jets.sqrt}


def _jet(node: Node, p: Point4) -> Jet:
    if isinstance(node, (Num, Const)):
        return Jet.constant(node.value)
    if isinstance(node, Var):
        return Jet.variable(node.index, p[node.index - 1])
    if isinstance(node, Neg):
        return -_jet(node.arg, p)
    if isinstance(node, Add):
        return _jet(node.left, p) + _jet(node.right, p)
    if isinstance(node, Sub):
        return _jet(node.left, p) - _jet(node.right, p)
    if isinstance(node, Mul):
        return _jet(node.left, p) * _jet(node.right, p)
    if isinstance(node, Div):
        return _jet(node.left, p) / _jet(node.right, p)
    if isinstance(node, Pow):
        b = _jet(node.base, p)
        e = _jet(node.exponent, p)
        n = _integer_exponent(node, e.value)
        if n is not None:
            return b.ipow(n)
        if b.value <= 0.0:
            raise DomainError(f"non-integer power of non-positive base {b.value!r}")
        return jets.exp(e * jets.ln(b))
    if isinstance(node, Call):
        return _JET_FUNCS[node.func](_jet(node.arg, p))
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet(f: ScalarField | Node, p: Sequence[float]) -> Jet:
    """Value and exact first partials of ``f`` at ``p``."""
    node = f.ast if isinstance(f, ScalarField) else f
    return _jet(node, as_point(p))


# --------------------------------------------------------------------------
# Constraints
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """Strict inequality ``lhs < rhs``."""

    lhs: ScalarField
    rhs: ScalarField

    def __str__(self) -> str:
        return f"{to_text(self.lhs.ast)} < {to_text(self.rhs.ast)}"

    def holds(self, p: Sequence[float]) -> bool:
        return eval_expr(self.lhs, p) < eval_expr(self.rhs, p)


@dataclass(frozen=True)
class ConstraintSet:
    constraints: tuple[Constraint, ...] = ()

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def violated(self, p: Sequence[float]) -> list[Constraint]:
        return [c for c in self.constraints if not c.holds(p)]

    def __add__(self, other: "ConstraintSet") -> "ConstraintSet":
        return ConstraintSet(self.constraints + other.constraints)


_RELATION = re.compile(r"(<|>)")


def parse_constraints(text: str, constants: Mapping[str, float] | None = None) -> ConstraintSet:
    """Parse a chain such as ``0 < x1 + x2 < ln(sqrt(3))`` or ``x1 > 1``."""
    parts = _RELATION.split(text)
    if len(parts) < 3:
        raise ExprSyntaxError("expected '<' or '>' in constraint", len(text), text)
    exprs = [parse(part.strip(), constants) for part in parts[0::2]]
    out = []
    for k, rel in enumerate(parts[1::2]):
        lo, hi = exprs[k], exprs[k + 1]
        out.append(Constraint(lo, hi) if rel == "<" else Constraint(hi, lo))
    return ConstraintSet(tuple(out))


def satisfies(c: ConstraintSet, p: Sequence[float]) -> bool:
    """True iff every strict inequality of ``c`` holds at ``p``."""
    return all(con.holds(p) for con in c)
