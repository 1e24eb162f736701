"""Safe evaluation of polynomial text such as ``z^3 - 1/2*z``.

The grammar is ASCII arithmetic over named symbols with integer literals,
``+ - * /`` and ``^`` (or ``**``) with non-negative integer exponents.
Division is only allowed by numeric literals, which yields rational
coefficients.  Evaluation happens directly in whatever algebra the symbols
belong to, so the same parser serves the defining polynomial, ring elements
and vector-field expressions.
"""

import ast

import gmpy2

from danielewski.errors import ParseError

QQ = gmpy2.mpq

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _is_number(v):
    return isinstance(v, (int, type(QQ(0))))


def parse_expression(text, namespace):
    """Evaluate ``text`` with names resolved from ``namespace``."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression")
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval(tree.body, namespace, text)


def _eval(node, ns, text):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ParseError(f"only integer literals are allowed in {text!r}")
        return QQ(node.value)
    if isinstance(node, ast.Name):
        if node.id not in ns:
            raise ParseError(f"unknown symbol {node.id!r} in {text!r}")
        return ns[node.id]
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, ns, text)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise ParseError(f"unsupported unary operator in {text!r}")
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        left = _eval(node.left, ns, text)
        right = _eval(node.right, ns, text)
        op = node.op
        if isinstance(op, ast.Add):
            return left + right
        if isinstance(op, ast.Sub):
            return left - right
        if isinstance(op, ast.Mult):
            return left * right
        if isinstance(op, ast.Div):
            if not _is_number(right):
                raise ParseError(f"division only by numbers in {text!r}")
            if right == 0:
                raise ParseError(f"division by zero in {text!r}")
            return left * (QQ(1) / right)
        if not _is_number(right) or right.denominator != 1 or right < 0:
            raise ParseError(f"exponents must be non-negative integers in {text!r}")
        return left ** int(right)
    raise ParseError(f"unsupported syntax in {text!r}")


def symbol_names(text):
    """Names referenced in ``text`` (used to infer the number of z-variables)."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)}
