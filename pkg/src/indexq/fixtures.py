"""Named problem instances used by the CLI, the report and the tests."""
from __future__ import annotations

from .groups import Group, make_group
from .oracles import HidingFunction, function_from_table

KLEIN = make_group([2, 2])

# bits (b1, b2) of the domain are the coordinates of Z_2 x Z_2
KLEIN_FUNCTIONS = {
    "f0": lambda b1, b2: 0,
    "f1": lambda b1, b2: 1,
    "left": lambda b1, b2: b1,
    "nleft": lambda b1, b2: 1 - b1,
    "right": lambda b1, b2: b2,
    "nright": lambda b1, b2: 1 - b2,
    "xor": lambda b1, b2: b1 ^ b2,
    "nxor": lambda b1, b2: 1 - (b1 ^ b2),
}


def klein_function(name: str) -> HidingFunction:
    rule = KLEIN_FUNCTIONS[name]
    table = [rule(*g) for g in KLEIN.elements]
    return function_from_table(KLEIN, table, 2)


def klein_functions() -> dict[str, HidingFunction]:
    return {name: klein_function(name) for name in KLEIN_FUNCTIONS}


def binary_group(n: int) -> Group:
    return make_group([2] * n)
