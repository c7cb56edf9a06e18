"""Mirror Laurent polynomials of toric models (data only)."""

from typing import List

import sympy

from src.geometry.families import ToricModel


def mirror_laurent(model: ToricModel) -> List[str]:
    """P_{E_i}(X) = 1 - sum_{j in E_i} u_j X^{v_j}, one string per index set."""
    xs = sympy.symbols(f"X1:{len(model.generators[0]) + 1}")
    us = sympy.symbols(f"u1:{len(model.generators) + 1}")
    out = []
    for part in model.partition:
        total = sympy.Integer(1)
        for j in part:
            monomial = sympy.Mul(*[x**e for x, e in zip(xs, model.generators[j])])
            total -= us[j] * monomial
        out.append(sympy.sstr(total, order="lex"))
    return out
