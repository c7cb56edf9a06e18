"""Holonomic recurrences and the logarithmic differential operators they define.

One operator D has three interchangeable views:

* ``RecurrenceSpec`` -- polynomials P_0..P_m with
  sum_j P_j(n+j) a_{n+j} = 0 for every integer n (a_n = 0 for n < 0);
* ``ThetaOperator`` -- D = z^m P_0(Theta) + z^{m-1} P_1(Theta) + ... + P_m(Theta);
* ``ZForm`` -- D = sum_i A_i(z) Theta^i.

Conventions: z is always written to the left of Theta, and an operator is
MU when P_m(y) = y^{d+1}.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ
from sympy.polys.matrices import DomainMatrix

from src.algebra.rational import (
    derivative_coeffs,
    eval_coeffs,
    poly_coeffs,
    poly_from_coeffs,
    to_rat,
)
from src.algebra.series import Series1
from src.utils.errors import AmbiguousFit, DomainError, ModelError, NoFit, NonsolvableRecurrence

logger = logging.getLogger(__name__)

Y = sympy.Symbol("y")
Z = sympy.Symbol("z")
THETA = sympy.Symbol("Theta")

DEFAULT_FIT_MARGIN = 10


def _as_poly(p, gen: sympy.Symbol) -> Poly:
    if isinstance(p, Poly):
        if p.gens != (gen,):
            p = Poly(p.as_expr().subs(p.gens[0], gen), gen, domain=QQ)
        return p.set_domain(QQ)
    if isinstance(p, (list, tuple)):
        return poly_from_coeffs(p, gen)
    return Poly(sympy.sympify(p), gen, domain=QQ)


def _degree(p: Poly) -> int:
    return -1 if p.is_zero else p.degree()


@dataclass(frozen=True)
class ThetaOperator:
    """D = sum_j z^{m-j} P_j(Theta); P_j are polynomials in y."""

    polys: Tuple[Poly, ...]

    def __post_init__(self):
        if not self.polys:
            raise ModelError("an operator needs at least one polynomial")
        polys = tuple(_as_poly(p, Y) for p in self.polys)
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "_coeffs", tuple(poly_coeffs(p) for p in polys))

    @classmethod
    def from_coeffs(cls, coeff_lists: Sequence[Sequence]) -> "ThetaOperator":
        """Polynomials given as coefficient lists, degree 0 first."""
        return cls(tuple(poly_from_coeffs(c, Y) for c in coeff_lists))

    @classmethod
    def from_expr(cls, expr: Union[str, sympy.Expr]) -> "ThetaOperator":
        """Parse an operator printed in z and Theta, z written to the left."""
        if isinstance(expr, str):
            expr = sympy.sympify(expr, locals={"z": Z, "Theta": THETA})
        poly = Poly(sympy.expand(expr), Z, THETA, domain=QQ)
        m = poly.degree(Z)
        order = poly.degree(THETA)
        table = [[Fraction(0)] * (order + 1) for _ in range(m + 1)]
        for (iz, it), c in poly.terms():
            table[m - iz][it] = to_rat(c)
        return cls.from_coeffs(table)

    @classmethod
    def from_theta_left(cls, terms: Sequence[Tuple[int, Poly]]) -> "ThetaOperator":
        """Operator sum P(Theta) o z^j, rewritten with P(Theta) o z^j = z^j P(Theta + j)."""
        m = max(j for j, _ in terms)
        polys = [Poly(0, Y, domain=QQ)] * (m + 1)
        for j, p in terms:
            polys[m - j] = polys[m - j] + _as_poly(p, Y).shift(j)
        return cls(tuple(polys))

    @property
    def m(self) -> int:
        return len(self.polys) - 1

    @property
    def order(self) -> int:
        return max(_degree(p) for p in self.polys)

    @property
    def dim(self) -> int:
        return self.order - 1

    def coeffs(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(self._coeffs[j])

    def evaluate(self, j: int, n: Union[int, Fraction]) -> Fraction:
        return eval_coeffs(self._coeffs[j], n)

    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.polys)

    def normalized(self) -> "ThetaOperator":
        """Scale so that P_m is monic."""
        lead = self.polys[-1]
        if lead.is_zero:
            raise DomainError("cannot normalize an operator with P_m = 0")
        c = lead.LC()
        return type(self)(tuple(p.quo_ground(c) for p in self.polys))

    def theta_partial(self) -> "ThetaOperator":
        return ThetaOperator(tuple(p.diff(Y) for p in self.polys))

    def to_recurrence(self) -> "RecurrenceSpec":
        return RecurrenceSpec(self.polys)

    def to_theta(self) -> "ThetaOperator":
        return ThetaOperator(self.polys)

    def to_zform(self) -> "ZForm":
        order = max(self.order, 0)
        a_lists = [[Fraction(0)] * (self.m + 1) for _ in range(order + 1)]
        for j, coeffs in enumerate(self._coeffs):
            for i, c in enumerate(coeffs):
                a_lists[i][self.m - j] += c
        return ZForm(tuple(poly_from_coeffs(a, Z) for a in a_lists), self.m)

    def as_expr(self, factored: bool = True) -> sympy.Expr:
        total = sympy.Integer(0)
        for j, p in enumerate(self.polys):
            body = p.as_expr().subs(Y, THETA)
            if factored:
                body = sympy.factor(body)
            total += Z ** (self.m - j) * body
        return total

    def text(self) -> str:
        return sympy.sstr(self.as_expr())

    def same_operator(self, other: "ThetaOperator") -> bool:
        """Equality up to a global scale."""
        if other.m != self.m:
            return False
        return self.normalized().polys == other.normalized().polys


@dataclass(frozen=True)
class RecurrenceSpec(ThetaOperator):
    """Recurrence view: sum_j P_j(n+j) a_{n+j} = 0."""

    def __post_init__(self):
        super().__post_init__()
        if self.polys[0].is_zero and self.polys[-1].is_zero:
            raise ModelError("at least one of P_0, P_m must be nonzero")

    def is_mu(self) -> bool:
        return self.polys[-1] == Poly(Y ** self.order, Y, domain=QQ)


@dataclass(frozen=True)
class ZForm:
    """D = sum_i A_i(z) Theta^i, with A_i polynomials in z."""

    a_polys: Tuple[Poly, ...]
    m: Optional[int] = None

    def __post_init__(self):
        polys = tuple(_as_poly(p, Z) for p in self.a_polys)
        object.__setattr__(self, "a_polys", polys)
        if self.m is None:
            object.__setattr__(self, "m", max(max(_degree(p) for p in polys), 0))

    @property
    def order(self) -> int:
        return len(self.a_polys) - 1

    def leading(self) -> Poly:
        return self.a_polys[-1]

    def ratio(self, i: int) -> Tuple[Poly, Poly]:
        """C_i = A_i / A_{d+1} as a reduced (numerator, denominator) pair."""
        num, den = self.a_polys[i], self.a_polys[-1]
        if den.is_zero:
            raise DomainError("leading coefficient A_{d+1} is zero")
        g = num.gcd(den)
        if not g.is_zero and g.degree() > 0:
            num, den = num.quo(g), den.quo(g)
        c = den.eval(0) if den.eval(0) != 0 else den.LC()
        return num.quo_ground(c), den.quo_ground(c)

    def to_theta(self) -> ThetaOperator:
        table = [[Fraction(0)] * (self.order + 1) for _ in range(self.m + 1)]
        for i, a in enumerate(self.a_polys):
            for k, c in enumerate(poly_coeffs(a)):
                table[self.m - k][i] = c
        return ThetaOperator.from_coeffs(table)

    def to_recurrence(self) -> RecurrenceSpec:
        return self.to_theta().to_recurrence()

    def to_zform(self) -> "ZForm":
        return self


AnyForm = Union[RecurrenceSpec, ThetaOperator, ZForm]


def convert(x: AnyForm, target: str) -> AnyForm:
    """Convert between the recurrence, theta and zform views."""
    if target == "recurrence":
        return x.to_recurrence()
    if target == "theta":
        return x.to_theta()
    if target == "zform":
        return x.to_zform()
    raise ValueError(f"unknown operator form: {target}")


@dataclass(frozen=True)
class Classification:
    is_picard_fuchs: bool
    is_mu: bool


def classify(op: AnyForm) -> Classification:
    theta = op.to_theta()
    order = theta.order
    top = theta.coeffs(theta.m)
    is_pf = order >= 0 and len(top) > order and top[order] != 0
    is_mu = theta.polys[-1] == Poly(Y ** max(order, 0), Y, domain=QQ) and order >= 0
    return Classification(is_picard_fuchs=is_pf, is_mu=is_mu)


def _coefficient(op: ThetaOperator, f: Series1, n: int) -> Fraction:
    """Coefficient of z^n in D f; needs f valid to n."""
    acc = Fraction(0)
    for j in range(op.m + 1):
        k = n - op.m + j
        if k < 0:
            continue
        a = f[k]
        if a:
            acc += op.evaluate(j, k) * a
    return acc


def apply(op: AnyForm, f: Series1) -> Series1:
    """Exact truncated application; the result is valid to order(f) - m."""
    op = op.to_theta()
    order = f.order - op.m
    if order < 0:
        raise DomainError(f"series of order {f.order} too short for an operator with m = {op.m}")
    return Series1(tuple(_coefficient(op, f, n) for n in range(order + 1)))


def residual_index(op: AnyForm, f: Series1) -> Optional[int]:
    """First n at which D f has a nonzero z^n coefficient, None if D f = 0."""
    op = op.to_theta()
    for n in range(f.order + 1):
        if _coefficient(op, f, n):
            return n
    return None


def _leading_value(spec: ThetaOperator, n: int) -> Fraction:
    value = spec.evaluate(spec.m, n)
    if value == 0:
        raise NonsolvableRecurrence(f"P_m vanishes at n = {n}", index=n)
    return value


def socle(spec: AnyForm, a0, N: int) -> Series1:
    """Forward solve a_n = -(1/P_m(n)) sum_{j<m} P_j(n-m+j) a_{n-m+j}."""
    spec = spec.to_theta()
    m = spec.m
    out = [to_rat(a0)]
    for n in range(1, N + 1):
        lead = _leading_value(spec, n)
        acc = Fraction(0)
        for j in range(m):
            k = n - m + j
            if k >= 0 and out[k]:
                acc += spec.evaluate(j, k) * out[k]
        out.append(-acc / lead)
    return Series1(tuple(out))


def theta_partial(op: AnyForm) -> ThetaOperator:
    """Formal derivative of the operator with respect to Theta."""
    return op.to_theta().theta_partial()


def log_psi(spec: AnyForm, phi0: Series1, N: int) -> Series1:
    """Regular part Psi of the log solution (log z) Phi_0 + Psi, with Psi(0) = 0."""
    spec = spec.to_theta()
    if phi0.order < N:
        raise DomainError(f"phi0 valid to {phi0.order}, need {N}")
    m = spec.m
    deriv = [derivative_coeffs(spec.coeffs(j)) for j in range(m + 1)]
    out = [Fraction(0)]
    for n in range(1, N + 1):
        lead = _leading_value(spec, n)
        acc = Fraction(0)
        for j in range(m + 1):
            k = n - m + j
            if k < 0:
                continue
            if j < m and out[k]:
                acc += spec.evaluate(j, k) * out[k]
            if phi0[k]:
                acc += eval_coeffs(deriv[j], k) * phi0[k]
        out.append(-acc / lead)
    return Series1(tuple(out))


@dataclass(frozen=True)
class QParam:
    q_of_z: Series1
    z_of_q: Series1


def q_param(phi0: Series1, psi: Series1) -> QParam:
    """q = z exp(Psi/Phi_0) and its compositional inverse z(q)."""
    if phi0[0] != 1:
        raise DomainError("q_param needs phi0(0) = 1")
    if psi[0] != 0:
        raise DomainError("q_param needs psi(0) = 0")
    q_of_z = (psi / phi0).exp().shift(1)
    return QParam(q_of_z=q_of_z, z_of_q=q_of_z.revert())


def fit_terms_required(m: int, order: int, margin: int = DEFAULT_FIT_MARGIN) -> int:
    """Truncation order the data must reach before a fit is attempted."""
    return (m + 1) * (order + 1) + m + margin


def fit_recurrence(
    coeffs: Series1, m: int, order: int, margin: int = DEFAULT_FIT_MARGIN
) -> RecurrenceSpec:
    """Recover an MU recurrence with m+1 terms of degree ``order`` from data.

    Unknowns are the coefficients of P_0..P_{m-1} and the leading
    coefficient of P_m; the lower coefficients of P_m are pinned to zero so
    that only MU-shaped relations survive. The relation
    sum_j P_j(n+j) a_{n+j} = 0 is imposed for every n = -m..N-m, so the
    equations with n < 0 encode a_n = 0 for n < 0.
    """
    required = fit_terms_required(m, order, margin)
    if coeffs.order < required:
        raise NoFit(
            f"fit with m={m}, order={order} needs coefficients to order {required}, "
            f"got {coeffs.order}",
            minimum_terms=required,
        )
    columns = [(j, i) for j in range(m) for i in range(order + 1)] + [(m, order)]
    rows = []
    for n in range(-m, coeffs.order - m + 1):
        row = []
        for j, i in columns:
            k = n + j
            row.append(Fraction(0) if k < 0 else Fraction(k) ** i * coeffs[k])
        if any(row):
            rows.append([QQ(x.numerator, x.denominator) for x in row])
    if not rows:
        raise AmbiguousFit("every recurrence annihilates the zero series", dimension=len(columns))
    matrix = DomainMatrix(rows, (len(rows), len(columns)), QQ)
    basis = matrix.nullspace()
    dimension = basis.shape[0]
    logger.debug(f"fit m={m} order={order}: {len(rows)} equations, nullspace dim {dimension}")
    if dimension == 0:
        raise NoFit(f"no recurrence with m={m}, order={order} annihilates the data")
    if dimension > 1:
        raise AmbiguousFit(
            f"{dimension} independent recurrences with m={m}, order={order}",
            dimension=dimension,
        )
    vector = [to_rat(c) for c in basis.to_Matrix().row(0)]
    lead = vector[-1]
    if lead == 0:
        raise NoFit(f"only non-MU recurrences with m={m}, order={order} fit the data")
    vector = [c / lead for c in vector]
    table = [[Fraction(0)] * (order + 1) for _ in range(m + 1)]
    for (j, i), c in zip(columns, vector):
        table[j][i] = c
    spec = RecurrenceSpec(tuple(poly_from_coeffs(t, Y) for t in table))
    bad = residual_index(spec, coeffs)
    if bad is not None:
        raise NoFit(f"fitted recurrence fails verification at n = {bad}")
    return spec


def fit_recurrence_auto(
    coeffs: Series1,
    order: int = 4,
    max_m: int = 5,
    margin: int = DEFAULT_FIT_MARGIN,
) -> RecurrenceSpec:
    """Smallest m in 1..max_m with a unique MU fit at the given order."""
    attempted = False
    for m in range(1, max_m + 1):
        if coeffs.order < fit_terms_required(m, order, margin):
            break
        attempted = True
        try:
            spec = fit_recurrence(coeffs, m, order, margin)
        except NoFit:
            continue
        logger.info(f"fitted recurrence with m={m}, order={order}")
        return spec
    if not attempted:
        required = fit_terms_required(1, order, margin)
        raise NoFit(
            f"auto fit needs coefficients to order {required}, got {coeffs.order}",
            minimum_terms=required,
        )
    raise NoFit(f"no MU recurrence of order {order} with m <= {max_m} fits the data")


def recurrence_from_coeffs(coeff_lists: Sequence[Sequence]) -> RecurrenceSpec:
    return RecurrenceSpec(tuple(poly_from_coeffs(c, Y) for c in coeff_lists))
