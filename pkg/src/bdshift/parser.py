"""Expression parser and evaluator for the command-line front end.

Grammar (precedence ^ > * > + -, left associative sums and products):

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" nonneg-int)*
    atom   := "U" | "Us" | "V" | "Vi" | "id" | "i"
            | number ["/" number] ["i"]
            | "diag" "(" name ")"
            | "comm" "(" expr "," expr ")"
            | "adj" "(" expr ")"
            | "(" expr ")" | "-" atom

Negative powers are spelled Us / Vi, never "^-1".
"""

from fractions import Fraction

from .scalars import Scalar, ZERO, ONE
from .errors import ExprSyntaxError, SideMismatch, UnknownName
from .profinite import LocallyConstantFunction
from .sequences import EPSequence
from . import algebra

_KEYWORDS = {"U", "Us", "V", "Vi", "id", "i", "diag", "comm", "adj"}
_PUNCT = "+-*^(),/"

MAX_INPUT = 1 << 20


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos

    def __repr__(self):
        return f"_Token({self.kind}, {self.text!r}, {self.pos})"


def _lex(text):
    if len(text) > MAX_INPUT:
        raise ExprSyntaxError("input exceeds 1 MB", 0)
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise ExprSyntaxError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.pos,
            )
        return self.advance()

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.parse_term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek().kind == "*":
            self.advance()
            node = ("mul", node, self.parse_factor())
        return node

    def parse_factor(self):
        node = self.parse_atom()
        while self.peek().kind == "^":
            caret = self.advance()
            tok = self.peek()
            if tok.kind != "int":
                raise ExprSyntaxError(
                    "exponent must be a nonnegative integer "
                    "(negative powers are spelled Us or Vi)",
                    tok.pos if tok.kind != "end" else caret.pos,
                )
            self.advance()
            node = ("pow", node, int(tok.text))
        return node

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "-":
            self.advance()
            return ("neg", self.parse_atom())
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "int":
            return ("num", self._number())
        if tok.kind == "name":
            return self._named()
        raise ExprSyntaxError(
            f"expected an operand, found {tok.text or 'end of input'!r}",
            tok.pos,
        )

    def _number(self):
        num = int(self.advance().text)
        den = 1
        if self.peek().kind == "/":
            self.advance()
            den = int(self.expect("int").text)
            if den == 0:
                raise ExprSyntaxError("zero denominator", self.tokens[self.k - 1].pos)
        value = Scalar(Fraction(num, den))
        nxt = self.peek()
        if nxt.kind == "name" and nxt.text == "i":
            self.advance()
            value = value * Scalar(0, 1)
        return value

    def _named(self):
        tok = self.advance()
        name = tok.text
        if name == "U":
            return ("u",)
        if name == "Us":
            return ("us",)
        if name == "V":
            return ("v",)
        if name == "Vi":
            return ("vi",)
        if name == "id":
            return ("id",)
        if name == "i":
            return ("num", Scalar(0, 1))
        if name == "diag":
            self.expect("(")
            inner = self.expect("name")
            if inner.text in _KEYWORDS:
                raise ExprSyntaxError(
                    f"{inner.text!r} is reserved", inner.pos
                )
            self.expect(")")
            return ("diag", inner.text)
        if name == "comm":
            self.expect("(")
            a = self.parse_expr()
            self.expect(",")
            b = self.parse_expr()
            self.expect(")")
            return ("comm", a, b)
        if name == "adj":
            self.expect("(")
            a = self.parse_expr()
            self.expect(")")
            return ("adj", a)
        raise ExprSyntaxError(f"unknown token {name!r}", tok.pos)


def parse(text):
    """Parse to an AST of nested tuples."""
    parser = _Parser(_lex(text))
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ExprSyntaxError(f"trailing input {tok.text!r}", tok.pos)
    return node


# ---------------------------------------------------------------------------
# evaluation


def _diag_unilateral(value, N):
    if isinstance(value, EPSequence):
        return algebra.diag_element(value)
    if isinstance(value, LocallyConstantFunction):
        return algebra.diag_element(EPSequence({}, list(value.values), N))
    raise UnknownName(f"cannot use {type(value).__name__} as a diagonal")


def _diag_bilateral(value, N):
    if isinstance(value, LocallyConstantFunction):
        return algebra.bilateral_diag(value)
    if isinstance(value, EPSequence):
        if value.correction:
            raise SideMismatch(
                "sequence with c00 corrections has no bilateral diagonal"
            )
        return algebra.bilateral_diag(
            LocallyConstantFunction(list(value.table), N)
        )
    raise UnknownName(f"cannot use {type(value).__name__} as a diagonal")


def eval_ast(node, env, side):
    """Evaluate to a canonical element of the requested side."""
    if side not in ("unilateral", "bilateral"):
        raise ValueError(f"unknown side {side!r}")
    uni = side == "unilateral"
    N = env.N

    def identity():
        return algebra.identity_element(N) if uni \
            else algebra.bilateral_identity(N)

    kind = node[0]
    if kind == "u":
        if not uni:
            raise SideMismatch("U lives on the unilateral side")
        return algebra.u_element(N)
    if kind == "us":
        if not uni:
            raise SideMismatch("Us lives on the unilateral side")
        return algebra.ustar_element(N)
    if kind == "v":
        if uni:
            raise SideMismatch("V lives on the bilateral side")
        return algebra.v_element(N)
    if kind == "vi":
        if uni:
            raise SideMismatch("Vi lives on the bilateral side")
        return algebra.v_element(N, -1)
    if kind == "id":
        return identity()
    if kind == "num":
        return identity() * node[1]
    if kind == "diag":
        value = env.sequences.get(node[1])
        if value is None:
            raise UnknownName(f"no sequence named {node[1]!r}")
        return _diag_unilateral(value, N) if uni \
            else _diag_bilateral(value, N)
    if kind == "add":
        return eval_ast(node[1], env, side) + eval_ast(node[2], env, side)
    if kind == "sub":
        return eval_ast(node[1], env, side) - eval_ast(node[2], env, side)
    if kind == "mul":
        return eval_ast(node[1], env, side) * eval_ast(node[2], env, side)
    if kind == "neg":
        return -eval_ast(node[1], env, side)
    if kind == "pow":
        base = eval_ast(node[1], env, side)
        out = identity()
        for _ in range(node[2]):
            out = out * base
        return out
    if kind == "comm":
        a = eval_ast(node[1], env, side)
        b = eval_ast(node[2], env, side)
        return a * b - b * a
    if kind == "adj":
        inner = eval_ast(node[1], env, side)
        return algebra.adjoint(inner) if uni \
            else algebra.bilateral_adjoint(inner)
    raise ValueError(f"unknown node {kind!r}")


def parse_gaussian(text):
    """Exact scalar from an arithmetic expression over literals only."""
    node = parse(text)

    def fold(nd):
        kind = nd[0]
        if kind == "num":
            return nd[1]
        if kind == "add":
            return fold(nd[1]) + fold(nd[2])
        if kind == "sub":
            return fold(nd[1]) - fold(nd[2])
        if kind == "mul":
            return fold(nd[1]) * fold(nd[2])
        if kind == "neg":
            return -fold(nd[1])
        if kind == "pow":
            out = ONE
            for _ in range(nd[2]):
                out = out * fold(nd[1])
            return out
        raise ExprSyntaxError("expected a scalar expression", 0)

    return fold(node)


# ---------------------------------------------------------------------------
# canonical formatting


def format_element(x, prefix="c"):
    """Parseable canonical text plus the diagonal bindings it references.

    Returns (text, names) where names maps synthetic diag names to the
    coefficient sequences.  Reparsing the text in an environment holding
    those names reproduces x.
    """
    names = {}
    parts = []
    if isinstance(x, algebra.UnilateralElement):
        for n in x.degrees():
            name = f"{prefix}{'m' if n < 0 else ''}{abs(n)}"
            names[name] = x.terms[n]
            if n > 0:
                parts.append(f"U^{n}*diag({name})")
            elif n == 0:
                parts.append(f"diag({name})")
            else:
                parts.append(f"diag({name})*Us^{-n}")
    elif isinstance(x, algebra.BilateralElement):
        for n in x.degrees():
            name = f"{prefix}{'m' if n < 0 else ''}{abs(n)}"
            names[name] = x.terms[n]
            if n > 0:
                parts.append(f"V^{n}*diag({name})")
            elif n == 0:
                parts.append(f"diag({name})")
            else:
                parts.append(f"Vi^{-n}*diag({name})")
    else:
        raise TypeError(f"cannot format {type(x).__name__}")
    return (" + ".join(parts) if parts else "0"), names
