"""Built-in deterministic API handlers.

Every handler is a pure function of (args, world_state): identical inputs
yield identical payload strings. A handler signals a caller-visible failure
by raising :class:`HandlerError`; the session turns that into an observation
with status ``api_error`` instead of aborting, so malformed calls stay a
learnable error mode.
"""

from __future__ import annotations

import ast
import operator


class HandlerError(Exception):
    """Raised by a handler for an invalid call; rendered as an api_error."""


def format_number(value: float) -> str:
    """Render a numeric result: integers without a decimal point."""
    if abs(value - round(value)) < 1e-9:
        return str(int(round(value)))
    return repr(float(value))


_BIN_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_UNARY_OPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _eval_node(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        raise HandlerError(f"non-numeric literal {node.value!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
        left = _eval_node(node.left)
        right = _eval_node(node.right)
        try:
            return _BIN_OPS[type(node.op)](left, right)
        except ZeroDivisionError:
            raise HandlerError("division by zero") from None
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY_OPS:
        return _UNARY_OPS[type(node.op)](_eval_node(node.operand))
    raise HandlerError(f"unsupported syntax in expression: {type(node).__name__}")


def calculator(args: dict, world_state: dict) -> str:
    expr = args["expr"]
    if not expr.strip():
        raise HandlerError("empty expression")
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise HandlerError(f"cannot parse expression: {exc.msg}") from None
    return format_number(_eval_node(tree))


_WEATHER = {
    "paris": "sunny, 22C",
    "london": "rainy, 14C",
    "tokyo": "cloudy, 18C",
    "sydney": "windy, 20C",
    "oslo": "snowy, -3C",
    "cairo": "clear, 31C",
    "lima": "foggy, 17C",
    "dublin": "drizzly, 11C",
}


def weather_lookup(args: dict, world_state: dict) -> str:
    city = args["city"].strip().lower()
    if city not in _WEATHER:
        known = ", ".join(sorted(_WEATHER))
        raise HandlerError(f"no weather data for '{city}' (known cities: {known})")
    return _WEATHER[city]


_LINEAR_FACTORS = {
    ("km", "mi"): 0.621371,
    ("mi", "km"): 1 / 0.621371,
    ("kg", "lb"): 2.20462,
    ("lb", "kg"): 1 / 2.20462,
}


def unit_convert(args: dict, world_state: dict) -> str:
    value = args["value"]
    src = args["from_unit"].strip().lower()
    dst = args["to_unit"].strip().lower()
    if (src, dst) in _LINEAR_FACTORS:
        return format_number(value * _LINEAR_FACTORS[(src, dst)])
    if (src, dst) == ("c", "f"):
        return format_number(value * 9 / 5 + 32)
    if (src, dst) == ("f", "c"):
        return format_number((value - 32) * 5 / 9)
    supported = sorted(set(_LINEAR_FACTORS) | {("c", "f"), ("f", "c")})
    pairs = ", ".join(f"{a}->{b}" for a, b in supported)
    raise HandlerError(f"unsupported conversion {src}->{dst} (supported: {pairs})")


_DICTIONARY = {
    "ephemeral": "lasting for a very short time",
    "ubiquitous": "present or found everywhere",
    "laconic": "using very few words",
    "pragmatic": "dealing with things in a practical way",
    "obstinate": "stubbornly refusing to change one's mind",
    "candid": "truthful and straightforward in speech",
    "frugal": "sparing or economical with money or resources",
    "zealous": "showing great energy or enthusiasm for a cause",
}


def dictionary(args: dict, world_state: dict) -> str:
    word = args["word"].strip().lower()
    if word not in _DICTIONARY:
        raise HandlerError(f"no entry for '{word}'")
    return f"{word}: {_DICTIONARY[word]}"


def todo_add(args: dict, world_state: dict) -> str:
    item = args["item"].strip()
    if not item:
        raise HandlerError("cannot add an empty item")
    items = world_state.setdefault("todo", [])
    items.append(item)
    return f"added '{item}'; the todo list now has {len(items)} items"


def todo_list(args: dict, world_state: dict) -> str:
    items = world_state.get("todo", [])
    if not items:
        return "the todo list is empty"
    listing = "; ".join(f"{i + 1}. {item}" for i, item in enumerate(items))
    return f"todo list: {listing}"


HANDLERS = {
    "calculator": calculator,
    "weather_lookup": weather_lookup,
    "unit_convert": unit_convert,
    "dictionary": dictionary,
    "todo_add": todo_add,
    "todo_list": todo_list,
}
