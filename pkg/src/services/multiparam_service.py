"""Two-parameter systems of products of two projective spaces.

The coefficients a_l of Phi_0 obey one first-order rule per factor,

    (l_j + 1)^{n_j + 1} a_{l + e_j} = R_j(l) a_l,
    R_j(l) = prod_i prod_{k=1}^{M_ij} (<M_i, l> + k),

which is the coefficient form of the operator Theta_j^{n_j+1} - z_j R_j(Theta).
Psi_1 and Psi_2 are solved by total degree from both operators at once.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import structlog
import sympy
from sympy import Poly, QQ
from sympy.polys.subresultants_qq_zz import sylvester

from src.algebra.rational import to_rat
from src.algebra.series import Exponent, Series1, SeriesM, compositions, diagonal_restrict
from src.geometry.families import ProductProjModel
from src.utils.errors import DomainError, InconsistentSystem, ModelError

logger = structlog.get_logger(__name__)

L1, L2 = sympy.symbols("l1 l2")
X, YV = sympy.symbols("x y")

PRINTED_DISCRIMINANT = "1 - (x + y) + 3*(x**2 - 7*x*y + y**2) - (x**3 + 3*x**2*y + 3*x*y**2 + y**3)"

_Terms = Tuple[Tuple[Exponent, Fraction], ...]


def _terms(p: Poly) -> _Terms:
    return tuple((monom, to_rat(c)) for monom, c in p.terms())


def _evaluate(terms: _Terms, l: Exponent) -> Fraction:
    acc = Fraction(0)
    for monom, c in terms:
        value = c
        for e, x in zip(monom, l):
            value *= x**e
        acc += value
    return acc


@dataclass(frozen=True)
class BiRecurrence:
    """Commuting first-order rules on a_{l1,l2}, one per projective factor."""

    factor_dims: Tuple[int, int]
    rules: Tuple[Poly, Poly]

    def __post_init__(self):
        object.__setattr__(self, "_rule_terms", tuple(_terms(r) for r in self.rules))
        derivs = tuple(
            tuple(_terms(r.diff(gen)) for gen in (L1, L2)) for r in self.rules
        )
        object.__setattr__(self, "_deriv_terms", derivs)

    @classmethod
    def from_product_model(cls, model: ProductProjModel) -> "BiRecurrence":
        if model.nvars != 2:
            raise ModelError(
                f"factor_dims: bivariate systems need two factors, got {model.nvars}"
            )
        rules = []
        for j in range(2):
            expr = sympy.Integer(1)
            for row in model.multidegrees:
                pairing = row[0] * L1 + row[1] * L2
                for k in range(1, row[j] + 1):
                    expr *= pairing + k
            rules.append(Poly(expr, L1, L2, domain=QQ))
        return cls(factor_dims=tuple(model.factor_dims), rules=tuple(rules))

    def rule(self, k: int, l: Exponent) -> Fraction:
        """R_k(l)."""
        return _evaluate(self._rule_terms[k], l)

    def rule_partial(self, k: int, j: int, l: Exponent) -> Fraction:
        """(d R_k / d l_j)(l)."""
        return _evaluate(self._deriv_terms[k][j], l)

    def power(self, k: int) -> int:
        return self.factor_dims[k] + 1


def _back(l: Exponent, k: int) -> Exponent:
    return tuple(x - (i == k) for i, x in enumerate(l))


def _get(values: Dict[Exponent, Fraction], l: Exponent) -> Fraction:
    if min(l) < 0:
        return Fraction(0)
    return values.get(l, Fraction(0))


def _phi0_residual(rec: BiRecurrence, a: Dict[Exponent, Fraction], k: int, l: Exponent) -> Fraction:
    back = _back(l, k)
    return l[k] ** rec.power(k) * _get(a, l) - rec.rule(k, back) * _get(a, back)


def _psi_inhomogeneous(
    rec: BiRecurrence, a: Dict[Exponent, Fraction], j: int, k: int, l: Exponent
) -> Fraction:
    """Contribution of the Theta_j-partial of operator k applied to Phi_0."""
    back = _back(l, k)
    acc = -rec.rule_partial(k, j, back) * _get(a, back)
    if j == k:
        n = rec.power(k) - 1
        acc += rec.power(k) * l[k] ** n * _get(a, l)
    return acc


def _psi_residual(
    rec: BiRecurrence,
    a: Dict[Exponent, Fraction],
    b: Dict[Exponent, Fraction],
    j: int,
    k: int,
    l: Exponent,
) -> Fraction:
    back = _back(l, k)
    homogeneous = l[k] ** rec.power(k) * _get(b, l) - rec.rule(k, back) * _get(b, back)
    return homogeneous + _psi_inhomogeneous(rec, a, j, k, l)


@dataclass(frozen=True)
class BivariateSolution:
    phi0: SeriesM
    psi1: SeriesM
    psi2: SeriesM


def biv_solve(rec: BiRecurrence, D: int) -> BivariateSolution:
    """Phi_0, Psi_1, Psi_2 to total degree D."""
    zero = (0, 0)
    a: Dict[Exponent, Fraction] = {zero: Fraction(1)}
    psis: List[Dict[Exponent, Fraction]] = [{zero: Fraction(0)}, {zero: Fraction(0)}]
    for degree in range(1, D + 1):
        for l in compositions(degree, 2):
            active = [k for k in range(2) if l[k] >= 1]
            k = active[0]
            back = _back(l, k)
            a[l] = rec.rule(k, back) * _get(a, back) / l[k] ** rec.power(k)
            for other in active[1:]:
                residual = _phi0_residual(rec, a, other, l)
                if residual:
                    raise InconsistentSystem(
                        f"rules disagree on a{l}",
                        index=l,
                        value=a[l],
                        residual=residual,
                    )
            for j, b in enumerate(psis):
                rhs = rec.rule(k, back) * _get(b, back) - _psi_inhomogeneous(rec, a, j, k, l)
                b[l] = rhs / l[k] ** rec.power(k)
                for other in active[1:]:
                    residual = _psi_residual(rec, a, b, j, other, l)
                    if residual:
                        raise InconsistentSystem(
                            f"operators disagree on psi{j + 1} coefficient {l}",
                            index=l,
                            value=b[l],
                            residual=residual,
                        )
    logger.debug("bivariate system solved", degree=D)
    return BivariateSolution(
        phi0=SeriesM(2, D, a),
        psi1=SeriesM(2, D, psis[0]),
        psi2=SeriesM(2, D, psis[1]),
    )


def operator_residual(rec: BiRecurrence, F: SeriesM) -> Tuple[SeriesM, SeriesM]:
    """Coefficients of (Theta_k^{n_k+1} - z_k R_k(Theta)) F for k = 1, 2."""
    if F.nvars != 2:
        raise DomainError("operator_residual needs a bivariate series")
    values = dict(F.terms)
    out = []
    for k in range(2):
        terms = {l: _phi0_residual(rec, values, k, l) for l in F.exponents()}
        out.append(SeriesM(2, F.total_degree_bound, terms))
    return out[0], out[1]


def psi_residual(rec: BiRecurrence, solution: BivariateSolution, j: int) -> Tuple[SeriesM, SeriesM]:
    """Residuals of (log z_j) Phi_0 + Psi_j under both operators."""
    a = dict(solution.phi0.terms)
    b = dict((solution.psi1, solution.psi2)[j].terms)
    bound = solution.phi0.total_degree_bound
    out = []
    for k in range(2):
        terms = {
            l: _psi_residual(rec, a, b, j, k, l) for l in solution.phi0.exponents()
        }
        out.append(SeriesM(2, bound, terms))
    return out[0], out[1]


@dataclass(frozen=True)
class BivariateQ:
    q1: SeriesM
    q2: SeriesM
    all_integral: bool
    failures: Tuple[Tuple[int, Exponent, Fraction], ...]


def biv_q(phi0: SeriesM, psi1: SeriesM, psi2: SeriesM) -> BivariateQ:
    """
    Canonical coordinates q_j = z_j exp(Psi_j / Phi_0) of a two-parameter family.

    Args:
        phi0: bivariate fundamental period
        psi1: log-solution part paired with log z_1
        psi2: log-solution part paired with log z_2

    Returns:
        BivariateQ with both coordinates and every non-integral coefficient found
    """
    qs = []
    failures = []
    for j, psi in enumerate((psi1, psi2)):
        unit = tuple(int(i == j) for i in range(2))
        q = (psi / phi0).exp().shift(unit)
        if not q.is_integral():
            failures.extend((j + 1, e, v) for e, v in q.items() if v.denominator != 1)
        qs.append(q)
    if failures:
        logger.warning("non-integral q coefficients", count=len(failures))
    return BivariateQ(q1=qs[0], q2=qs[1], all_integral=not failures, failures=tuple(failures))


def diagonal_psi(solution: BivariateSolution) -> Series1:
    """Univariate Psi of the diagonal: (Psi_1 + Psi_2)|diag / 2."""
    total = diagonal_restrict(solution.psi1 + solution.psi2, (1, 1))
    return total * Fraction(1, 2)


def discriminant_p2p2() -> Poly:
    """Resultant of x(A+1)^3 - A^3 and y(A+1)^3 - 1 in A, constant term 1."""
    A = sympy.Symbol("A")
    f = X * (A + 1) ** 3 - A**3
    g = YV * (A + 1) ** 3 - 1
    det = sylvester(f, g, A).det()
    poly = Poly(sympy.expand(det), X, YV, domain=QQ)
    constant = poly.coeff_monomial(1)
    if constant == 0:
        raise DomainError("resultant has no constant term")
    return poly.quo_ground(constant)


def printed_discriminant() -> Poly:
    return Poly(sympy.sympify(PRINTED_DISCRIMINANT, locals={"x": X, "y": YV}), X, YV, domain=QQ)


def diagonal_discriminant(disc: Optional[Poly] = None) -> Poly:
    """Disc(t, t) as a polynomial in t."""
    t = sympy.Symbol("t")
    disc = disc if disc is not None else discriminant_p2p2()
    return Poly(disc.as_expr().subs({X: t, YV: t}), t, domain=QQ)


def singular_diagonal_points(disc: Optional[Poly] = None) -> List[Fraction]:
    """Roots z = t/27 of the diagonal discriminant, sorted."""
    roots = sympy.roots(diagonal_discriminant(disc))
    return sorted(to_rat(r) / 27 for r in roots if r.is_Rational)
