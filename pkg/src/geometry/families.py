"""Coefficient generators and recurrence constructors for the model families.

Families:

* ``CIModel`` -- complete intersections in (weighted) projective space,
  a_n = prod (d_i n)! / prod (w_j n)!.
* ``ProductProjModel`` -- complete intersections in products of projective
  spaces, indexed by a multidegree matrix.
* ``ToricModel`` -- generator data of a toric variety split into the index
  sets E_1..E_r, with a user-supplied Mori basis.
* ``HypergeomParams`` -- raw two-term data (alpha, mu).

Every family exposes ``series_coefficient(n)``, the n-th coefficient of the
univariate series the one-parameter pipeline runs on (the weighted diagonal
for the multi-parameter families).
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ

from src.algebra.operator import RecurrenceSpec, Y
from src.algebra.rational import poly_coeffs, to_rat
from src.algebra.series import Exponent, Series1, SeriesM, compositions
from src.utils.errors import DomainError, ModelError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def _fact(n: int) -> int:
    return factorial(n)


def weighted_compositions(total: int, weights: Sequence[int]) -> Iterator[Exponent]:
    """Nonnegative vectors e with sum_i weights[i] * e_i == total."""
    if len(weights) == 1:
        if total % weights[0] == 0:
            yield (total // weights[0],)
        return
    w = weights[0]
    for first in range(total // w, -1, -1):
        for rest in weighted_compositions(total - w * first, weights[1:]):
            yield (first,) + rest


def _positive_w0(value, field: str) -> Fraction:
    w0 = to_rat(value)
    if w0 <= 0:
        raise ModelError(f"{field}: normalization W0 must be positive, got {w0}")
    return w0


@dataclass(frozen=True)
class CIModel:
    """Complete intersection of degrees d_1..d_r in P(w_1, ..., w_{d+r+1})."""

    degrees: Tuple[int, ...]
    dim: int = 3
    weights: Optional[Tuple[int, ...]] = None
    W0: Optional[Fraction] = None

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        if not degrees or min(degrees) < 1:
            raise ModelError(f"degrees: need positive integers, got {list(degrees)}")
        ambient = self.dim + len(degrees) + 1
        weights = tuple(int(w) for w in self.weights) if self.weights else (1,) * ambient
        if min(weights) < 1:
            raise ModelError(f"weights: need positive integers, got {list(weights)}")
        if len(weights) != ambient:
            raise ModelError(
                f"weights: a {self.dim}-fold cut out by {len(degrees)} equations needs "
                f"{ambient} weights, got {len(weights)}"
            )
        if sum(degrees) != sum(weights):
            raise ModelError(
                f"degrees: Calabi-Yau condition violated, sum of degrees {sum(degrees)} "
                f"!= sum of weights {sum(weights)}"
            )
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "weights", weights)
        default_w0 = Fraction(prod(degrees), prod(weights))
        w0 = default_w0 if self.W0 is None else _positive_w0(self.W0, "normalization_W0")
        object.__setattr__(self, "W0", w0)

    @property
    def mu(self) -> Fraction:
        return Fraction(prod(d**d for d in self.degrees), prod(w**w for w in self.weights))

    def coefficient(self, n: int) -> Fraction:
        num = prod(_fact(d * n) for d in self.degrees)
        den = prod(_fact(w * n) for w in self.weights)
        return Fraction(num, den)

    series_coefficient = coefficient


def ci_series(model: CIModel, N: int) -> Series1:
    return Series1.from_function(model.coefficient, N)


def _shift_multiset(model: CIModel) -> Tuple[Counter, Counter]:
    """Numerator and denominator shifts k/d of a_{n+1}/a_n after cancellation."""
    top = Counter(Fraction(k, d) for d in model.degrees for k in range(1, d + 1))
    bottom = Counter(Fraction(k, w) for w in model.weights for k in range(1, w + 1))
    common = top & bottom
    return top - common, bottom - common


def ci_recurrence(model: CIModel) -> RecurrenceSpec:
    """The two-term MU recurrence (n+1)^{d+1} a_{n+1} = mu prod(n + alpha_i) a_n."""
    top, bottom = _shift_multiset(model)
    if bottom != Counter({Fraction(1): model.dim + 1}):
        raise ModelError(
            f"weights: series of {model.degrees} over {model.weights} is not a two-term MU "
            f"series (denominator shifts {sorted(bottom.elements())})"
        )
    alpha = tuple(sorted(top.elements()))
    return two_term_ops(HypergeomParams(alpha=alpha, mu=model.mu, W0=model.W0))


@dataclass(frozen=True)
class HypergeomParams:
    """Theta^{d+1} - mu z prod(Theta + alpha_i)."""

    alpha: Tuple[Fraction, ...]
    mu: Fraction
    W0: Optional[Fraction] = None

    def __post_init__(self):
        alpha = tuple(sorted(to_rat(a) for a in self.alpha))
        if not alpha:
            raise ModelError("alpha: need at least one exponent")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu", to_rat(self.mu))
        if self.mu == 0:
            raise ModelError("mu: must be nonzero")
        if self.W0 is not None:
            object.__setattr__(self, "W0", _positive_w0(self.W0, "normalization_W0"))

    @property
    def dim(self) -> int:
        return len(self.alpha) - 1

    def is_paired(self) -> bool:
        """alpha_i + alpha_{d+2-i} = 1 for the sorted exponents."""
        a = self.alpha
        return all(a[i] + a[-1 - i] == 1 for i in range(len(a)))

    def series_coefficient(self, n: int) -> Fraction:
        value = self.mu**n
        for a in self.alpha:
            value *= prod((a + k for k in range(n)), start=Fraction(1))
        return value / Fraction(_fact(n)) ** len(self.alpha)


def hypergeometric_series(params: HypergeomParams, N: int) -> Series1:
    """G_{d+1}(alpha; mu z) = sum mu^n prod (alpha_i)_n / (n!)^{d+1} z^n."""
    out = [Fraction(1)]
    for n in range(N):
        step = params.mu * prod((n + a for a in params.alpha), start=Fraction(1))
        out.append(out[-1] * step / Fraction(n + 1) ** len(params.alpha))
    return Series1(tuple(out))


def two_term_ops(params: HypergeomParams) -> RecurrenceSpec:
    d1 = len(params.alpha)
    p0 = Poly(-sympy.Rational(params.mu.numerator, params.mu.denominator), Y, domain=QQ)
    for a in params.alpha:
        p0 = p0 * Poly(Y + sympy.Rational(a.numerator, a.denominator), Y, domain=QQ)
    return RecurrenceSpec((p0, Poly(Y**d1, Y, domain=QQ)))


@dataclass(frozen=True)
class Unfactorable:
    """P_0 has no complete factorization into rational linear factors."""

    alpha: Tuple[Fraction, ...]
    mu: Fraction
    remainder: str


def extract_params(
    spec: RecurrenceSpec, W0: Optional[Fraction] = None
) -> Union[HypergeomParams, Unfactorable]:
    """Read (alpha, mu) back from a two-term MU recurrence."""
    if spec.m != 1 or not spec.to_recurrence().is_mu():
        raise DomainError("extract_params needs a two-term MU recurrence")
    p0 = spec.polys[0]
    mu = -to_rat(p0.LC())
    _, factors = p0.factor_list()
    alpha: List[Fraction] = []
    remainder = Poly(1, Y, domain=QQ)
    for factor, multiplicity in factors:
        if factor.degree() == 1:
            a, b = poly_coeffs(factor)[::-1]
            alpha.extend([b / a] * multiplicity)
        else:
            remainder = remainder * factor**multiplicity
    if remainder.degree() > 0:
        return Unfactorable(
            alpha=tuple(sorted(alpha)), mu=mu, remainder=sympy.sstr(remainder.as_expr())
        )
    return HypergeomParams(alpha=tuple(alpha), mu=mu, W0=W0)


@dataclass(frozen=True)
class ProductProjModel:
    """Complete intersection in P^{n_1} x ... x P^{n_s} with multidegree rows."""

    factor_dims: Tuple[int, ...]
    multidegrees: Tuple[Tuple[int, ...], ...]
    diagonal_weights: Optional[Tuple[int, ...]] = None
    W0: Optional[Fraction] = None

    def __post_init__(self):
        dims = tuple(int(n) for n in self.factor_dims)
        rows = tuple(tuple(int(x) for x in row) for row in self.multidegrees)
        s = len(dims)
        if not dims or min(dims) < 1:
            raise ModelError(f"factor_dims: need positive integers, got {list(dims)}")
        if not rows:
            raise ModelError("multidegrees: need at least one hypersurface")
        for i, row in enumerate(rows):
            if len(row) != s:
                raise ModelError(f"multidegrees: row {i} has {len(row)} entries, expected {s}")
            if min(row) < 0 or not any(row):
                raise ModelError(f"multidegrees: row {i} must be nonnegative and nonzero")
        for j in range(s):
            column = sum(row[j] for row in rows)
            if column != dims[j] + 1:
                raise ModelError(
                    f"multidegrees: Calabi-Yau condition violated in factor {j}, "
                    f"column sum {column} != {dims[j] + 1}"
                )
        weights = tuple(int(w) for w in self.diagonal_weights) if self.diagonal_weights else (1,) * s
        if len(weights) != s or min(weights) < 1:
            raise ModelError(f"diagonal_weights: need {s} positive integers, got {list(weights)}")
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "multidegrees", rows)
        object.__setattr__(self, "diagonal_weights", weights)
        w0 = classical_w0(self) if self.W0 is None else _positive_w0(self.W0, "normalization_W0")
        object.__setattr__(self, "W0", w0)

    @property
    def nvars(self) -> int:
        return len(self.factor_dims)

    @property
    def dim(self) -> int:
        return sum(self.factor_dims) - len(self.multidegrees)

    def coefficient(self, l: Exponent) -> Fraction:
        num = prod(_fact(sum(m * x for m, x in zip(row, l))) for row in self.multidegrees)
        den = prod(_fact(x) ** (n + 1) for x, n in zip(l, self.factor_dims))
        return Fraction(num, den)

    def series_coefficient(self, n: int) -> Fraction:
        return sum(
            (self.coefficient(l) for l in weighted_compositions(n, self.diagonal_weights)),
            Fraction(0),
        )


def classical_w0(model: ProductProjModel, weights: Optional[Sequence[int]] = None) -> Fraction:
    """(sum w_j H_j)^d . prod_i (sum_j M_ij H_j) in Z[H]/(H_j^{n_j+1})."""
    weights = weights if weights is not None else model.diagonal_weights
    hs = sympy.symbols(f"H1:{model.nvars + 1}")
    dim = sum(model.factor_dims) - len(model.multidegrees)
    if dim < 0:
        raise ModelError("multidegrees: more hypersurfaces than ambient dimensions")
    expr = sum(w * h for w, h in zip(weights, hs)) ** dim
    for row in model.multidegrees:
        expr *= sum(m * h for m, h in zip(row, hs))
    poly = Poly(sympy.expand(expr), *hs)
    return to_rat(poly.coeff_monomial(tuple(model.factor_dims)))


def product_series(model: ProductProjModel, degree_bound: int) -> SeriesM:
    terms = {}
    for degree in range(degree_bound + 1):
        for l in compositions(degree, model.nvars):
            terms[l] = model.coefficient(l)
    return SeriesM(model.nvars, degree_bound, terms)


def mori_check_bound(basis: Sequence[Sequence[int]]) -> int:
    return max(sum(abs(x) for x in lam) for lam in basis)


def _check_mori_basis(gens: Sequence[Exponent], basis: Sequence[Exponent]) -> None:
    """Every nonnegative relation up to the bound must be a nonnegative integral basis combination.

    Raises:
        ModelError: dependent basis, or a relation outside the basis monoid
    """
    k, rank = len(gens), len(gens[0])
    columns = sympy.Matrix(basis).T
    if columns.rank() != len(basis):
        raise ModelError("mori_basis: relations are linearly dependent")
    bound = mori_check_bound(basis)
    for total in range(1, bound + 1):
        for lam in compositions(total, k):
            if any(sum(lam[j] * gens[j][c] for j in range(k)) for c in range(rank)):
                continue
            try:
                solution, _ = columns.gauss_jordan_solve(sympy.Matrix(lam))
            except ValueError:
                raise ModelError(f"mori_basis: relation {lam} is not spanned by the basis")
            coords = [sympy.Rational(x) for x in solution]
            if any(not x.is_integer or x < 0 for x in coords):
                raise ModelError(
                    f"mori_basis: relation {lam} has coordinates {[str(x) for x in coords]}, "
                    "expected nonnegative integers"
                )


@dataclass(frozen=True)
class ToricModel:
    """Toric generators v_1..v_k split into E_1..E_r, with a Mori basis."""

    generators: Tuple[Tuple[int, ...], ...]
    partition: Tuple[Tuple[int, ...], ...]
    mori_basis: Tuple[Tuple[int, ...], ...]
    W0: Fraction
    diagonal_weights: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in v) for v in self.generators)
        parts = tuple(tuple(int(j) for j in part) for part in self.partition)
        basis = tuple(tuple(int(x) for x in lam) for lam in self.mori_basis)
        if not gens:
            raise ModelError("generators: need at least one generator")
        rank = len(gens[0])
        if any(len(v) != rank for v in gens):
            raise ModelError("generators: all generators must have the same length")
        k = len(gens)
        flat = sorted(j for part in parts for j in part)
        if flat != list(range(k)):
            raise ModelError(f"partition: must split generator indices 0..{k - 1} exactly once")
        if not basis:
            raise ModelError("mori_basis: need at least one relation")
        for s, lam in enumerate(basis):
            if len(lam) != k:
                raise ModelError(f"mori_basis: relation {s} has {len(lam)} entries, expected {k}")
            total = [sum(lam[j] * gens[j][c] for j in range(k)) for c in range(rank)]
            if any(total):
                raise ModelError(
                    f"mori_basis: relation {s} is not in R(E), sum lambda_j v_j = {total}"
                )
        if rank - len(parts) < 0:
            raise ModelError("partition: more index sets than the lattice rank")
        weights = (
            tuple(int(w) for w in self.diagonal_weights) if self.diagonal_weights else (1,) * len(basis)
        )
        if len(weights) != len(basis) or min(weights) < 1:
            raise ModelError(f"diagonal_weights: need {len(basis)} positive integers")
        _check_mori_basis(gens, basis)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "partition", parts)
        object.__setattr__(self, "mori_basis", basis)
        object.__setattr__(self, "diagonal_weights", weights)
        object.__setattr__(self, "W0", _positive_w0(self.W0, "normalization_W0"))

    @property
    def nvars(self) -> int:
        return len(self.mori_basis)

    @property
    def dim(self) -> int:
        return len(self.generators[0]) - len(self.partition)

    def relation(self, c: Exponent) -> Tuple[int, ...]:
        return tuple(
            sum(cs * lam[j] for cs, lam in zip(c, self.mori_basis))
            for j in range(len(self.generators))
        )

    def coefficient(self, c: Exponent) -> Fraction:
        lam = self.relation(c)
        if min(lam) < 0:
            return Fraction(0)
        num = prod(_fact(sum(lam[j] for j in part)) for part in self.partition)
        den = prod(_fact(x) for x in lam)
        return Fraction(num, den)

    def series_coefficient(self, n: int) -> Fraction:
        return sum(
            (self.coefficient(c) for c in weighted_compositions(n, self.diagonal_weights)),
            Fraction(0),
        )


def toric_series(model: ToricModel, degree_bound: int) -> SeriesM:
    terms = {}
    for degree in range(degree_bound + 1):
        for c in compositions(degree, model.nvars):
            value = model.coefficient(c)
            if value:
                terms[c] = value
    return SeriesM(model.nvars, degree_bound, terms)


Family = Union[CIModel, ProductProjModel, ToricModel, HypergeomParams]


def coefficient_series(model: Family, N: int, prefix: Optional[Series1] = None) -> Series1:
    """Univariate pipeline series to order N, reusing a known prefix."""
    known = list(prefix.coeffs[: N + 1]) if prefix is not None else []
    if known and known[0] != 1:
        raise DomainError("cached prefix does not start with a_0 = 1")
    start = len(known)
    if start <= N:
        logger.debug(f"computing coefficients {start}..{N}")
    known.extend(model.series_coefficient(n) for n in range(start, N + 1))
    return Series1(tuple(known))
