"""Truncated formal power series over exact rationals.

Two representations are provided:

* ``Series1`` -- dense univariate series, coefficients of z^0..z^N.
* ``SeriesM`` -- sparse series in t variables truncated by total degree.

Every value carries its own truncation order and binary operations keep the
minimum of their operands' orders; nothing here ever reports a coefficient
beyond the order it is known to.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Mapping, Sequence, Tuple, Union

from sympy import Poly

from src.algebra.rational import RatLike, poly_coeffs, to_rat
from src.utils.errors import DomainError, NotAUnit

Scalar = Union[int, Fraction]
Exponent = Tuple[int, ...]


def compositions(total: int, parts: int) -> Iterator[Exponent]:
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Series1:
    """Univariate series a_0 + a_1 z + ... + a_N z^N + O(z^{N+1})."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least its constant term")
        object.__setattr__(self, "coeffs", tuple(to_rat(c) for c in self.coeffs))

    # construction

    @classmethod
    def of(cls, values: Sequence[RatLike], order: int = None) -> "Series1":
        """Series from leading coefficients, zero-padded up to ``order``."""
        values = [to_rat(v) for v in values]
        if order is None:
            order = len(values) - 1
        values = values[: order + 1]
        values += [Fraction(0)] * (order + 1 - len(values))
        return cls(tuple(values))

    @classmethod
    def from_poly(cls, poly: Poly, order: int) -> "Series1":
        """Polynomial in one variable as a series valid to ``order``."""
        return cls.of(poly_coeffs(poly), order)

    @classmethod
    def zero(cls, order: int) -> "Series1":
        return cls.of([], order)

    @classmethod
    def constant(cls, value: RatLike, order: int) -> "Series1":
        return cls.of([value], order)

    @classmethod
    def variable(cls, order: int) -> "Series1":
        """The series z."""
        return cls.of([0, 1], order)

    @classmethod
    def from_function(cls, coefficient: Callable[[int], RatLike], order: int) -> "Series1":
        return cls(tuple(to_rat(coefficient(n)) for n in range(order + 1)))

    # basic accessors

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        if n > self.order:
            raise IndexError(f"coefficient {n} beyond truncation order {self.order}")
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    @property
    def valuation(self) -> int:
        """Index of the first nonzero coefficient (order + 1 for zero)."""
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return self.order + 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def truncate(self, order: int) -> "Series1":
        if order > self.order:
            raise DomainError(f"cannot extend validity from {self.order} to {order}")
        return Series1(self.coeffs[: order + 1])

    def head(self, count: int = None) -> List[Fraction]:
        return list(self.coeffs if count is None else self.coeffs[:count])

    # arithmetic

    def _coerce(self, other) -> "Series1":
        if isinstance(other, Series1):
            return other
        if isinstance(other, (int, Fraction)):
            return Series1.constant(other, self.order)
        return NotImplemented

    def __neg__(self) -> "Series1":
        return Series1(tuple(-c for c in self.coeffs))

    def __add__(self, other) -> "Series1":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        return Series1(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)))

    __radd__ = __add__

    def __sub__(self, other) -> "Series1":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Series1":
        return (-self) + other

    def __mul__(self, other) -> "Series1":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Series1):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if not ai:
                continue
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return Series1(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Series1":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise NotAUnit("division by the zero scalar")
            return self.scale(Fraction(1) / Fraction(other))
        if not isinstance(other, Series1):
            return NotImplemented
        b = other.coeffs
        if b[0] == 0:
            raise NotAUnit("divisor has zero constant term")
        n = min(self.order, other.order)
        inv_b0 = 1 / b[0]
        out: List[Fraction] = []
        for k in range(n + 1):
            acc = self.coeffs[k]
            for j in range(1, k + 1):
                if b[j]:
                    acc -= b[j] * out[k - j]
            out.append(acc * inv_b0)
        return Series1(tuple(out))

    def __rtruediv__(self, other) -> "Series1":
        return Series1.constant(other, self.order) / self

    def __pow__(self, exponent: int) -> "Series1":
        if exponent < 0:
            return (1 / self) ** (-exponent)
        result = Series1.constant(1, self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, c: Scalar) -> "Series1":
        c = to_rat(c)
        return Series1(tuple(c * x for x in self.coeffs))

    def shift(self, k: int) -> "Series1":
        """Multiply by z^k; validity grows by k."""
        return Series1((Fraction(0),) * k + self.coeffs)

    def div_z(self, k: int = 1) -> "Series1":
        """Divide by z^k; the first k coefficients must vanish."""
        if any(self.coeffs[:k]):
            raise DomainError(f"series is not divisible by z^{k}")
        if k > self.order:
            raise DomainError("no coefficients left after division")
        return Series1(self.coeffs[k:])

    # analytic primitives

    def theta(self) -> "Series1":
        """z d/dz."""
        return Series1(tuple(n * c for n, c in enumerate(self.coeffs)))

    def integrate_dlog(self) -> "Series1":
        """Integral of f(v) dv/v from 0, for f(0) = 0."""
        if self.coeffs[0] != 0:
            raise DomainError("integrate_dlog needs a vanishing constant term")
        return Series1((Fraction(0),) + tuple(c / n for n, c in enumerate(self.coeffs) if n))

    def exp(self) -> "Series1":
        if self.coeffs[0] != 0:
            raise DomainError("exp needs f(0) = 0")
        f = self.coeffs
        out = [Fraction(1)]
        for n in range(1, self.order + 1):
            acc = Fraction(0)
            for k in range(1, n + 1):
                if f[k]:
                    acc += k * f[k] * out[n - k]
            out.append(acc / n)
        return Series1(tuple(out))

    def log(self) -> "Series1":
        if self.coeffs[0] != 1:
            raise DomainError("log needs f(0) = 1")
        f = self.coeffs
        out = [Fraction(0)]
        for n in range(1, self.order + 1):
            acc = n * f[n]
            for k in range(1, n):
                if out[k] and f[n - k]:
                    acc -= k * out[k] * f[n - k]
            out.append(acc / n)
        return Series1(tuple(out))

    def compose(self, g: "Series1") -> "Series1":
        """f(g(z)) for g(0) = 0, by Horner's scheme."""
        if g.coeffs[0] != 0:
            raise DomainError("compose needs g(0) = 0")
        n = min(self.order, g.order)
        g = g.truncate(n)
        result = Series1.constant(self.coeffs[n], n)
        for k in range(n - 1, -1, -1):
            result = result * g + self.coeffs[k]
        return result

    def revert(self) -> "Series1":
        """Compositional inverse by Lagrange inversion."""
        if self.coeffs[0] != 0:
            raise DomainError("revert needs f(0) = 0")
        if self.order < 1 or self.coeffs[1] == 0:
            raise DomainError("revert needs f'(0) != 0")
        n = self.order
        phi = 1 / self.div_z(1)
        power = phi
        out = [Fraction(0)]
        for k in range(1, n + 1):
            out.append(power.coeffs[k - 1] / k)
            if k < n:
                power = power * phi
        return Series1(tuple(out))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})z^{n}" for n, c in enumerate(self.coeffs) if c) or "0"
        return f"Series1({body} + O(z^{self.order + 1}))"


@dataclass(frozen=True)
class SeriesM:
    """Series in ``nvars`` variables, valid for total degree <= ``bound``."""

    nvars: int
    bound: int
    terms: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Exponent, Fraction] = {}
        for exponent, value in self.terms.items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != self.nvars or min(exponent) < 0:
                raise ValueError(f"bad exponent {exponent} for {self.nvars} variables")
            if sum(exponent) > self.bound:
                continue
            value = to_rat(value)
            if value:
                clean[exponent] = value
        object.__setattr__(self, "terms", clean)

    @property
    def total_degree_bound(self) -> int:
        return self.bound

    @classmethod
    def constant(cls, value: RatLike, nvars: int, bound: int) -> "SeriesM":
        return cls(nvars, bound, {(0,) * nvars: to_rat(value)})

    @classmethod
    def monomial(cls, exponent: Exponent, nvars: int, bound: int, value: RatLike = 1) -> "SeriesM":
        return cls(nvars, bound, {tuple(exponent): to_rat(value)})

    def __getitem__(self, exponent: Exponent) -> Fraction:
        exponent = tuple(exponent)
        if sum(exponent) > self.bound:
            raise IndexError(f"{exponent} beyond total degree bound {self.bound}")
        return self.terms.get(exponent, Fraction(0))

    def items(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in canonical order: total degree, then reverse lexicographic."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), [-e for e in kv[0]]))

    def exponents(self) -> Iterator[Exponent]:
        for degree in range(self.bound + 1):
            yield from compositions(degree, self.nvars)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.terms.values())

    def truncate(self, bound: int) -> "SeriesM":
        if bound > self.bound:
            raise DomainError(f"cannot extend validity from {self.bound} to {bound}")
        return SeriesM(self.nvars, bound, self.terms)

    def _check(self, other: "SeriesM"):
        if not isinstance(other, SeriesM):
            raise DomainError("cannot mix univariate and multivariate series")
        if other.nvars != self.nvars:
            raise DomainError(f"variable counts differ: {self.nvars} vs {other.nvars}")

    def __neg__(self) -> "SeriesM":
        return SeriesM(self.nvars, self.bound, {e: -v for e, v in self.terms.items()})

    def __add__(self, other: "SeriesM") -> "SeriesM":
        self._check(other)
        bound = min(self.bound, other.bound)
        out = dict(self.terms)
        for e, v in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + v
        return SeriesM(self.nvars, bound, out)

    def __sub__(self, other: "SeriesM") -> "SeriesM":
        return self + (-other)

    def __mul__(self, other) -> "SeriesM":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        bound = min(self.bound, other.bound)
        out: Dict[Exponent, Fraction] = {}
        right = list(other.terms.items())
        for e1, v1 in self.terms.items():
            d1 = sum(e1)
            if d1 > bound:
                continue
            for e2, v2 in right:
                if d1 + sum(e2) > bound:
                    continue
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, Fraction(0)) + v1 * v2
        return SeriesM(self.nvars, bound, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SeriesM":
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * other.inverse()

    def scale(self, c: Scalar) -> "SeriesM":
        c = to_rat(c)
        return SeriesM(self.nvars, self.bound, {e: c * v for e, v in self.terms.items()})

    def shift(self, exponent: Exponent) -> "SeriesM":
        """Multiply by a monomial; the bound grows by its degree."""
        k = sum(exponent)
        shifted = {tuple(a + b for a, b in zip(e, exponent)): v for e, v in self.terms.items()}
        return SeriesM(self.nvars, self.bound + k, shifted)

    def theta(self, i: int) -> "SeriesM":
        """Partial Euler operator z_i d/dz_i."""
        return SeriesM(self.nvars, self.bound, {e: e[i] * v for e, v in self.terms.items()})

    def inverse(self) -> "SeriesM":
        zero = (0,) * self.nvars
        f0 = self.terms.get(zero, Fraction(0))
        if not f0:
            raise NotAUnit("multivariate divisor has zero constant term")
        support = [(e, v) for e, v in self.terms.items() if e != zero]
        out: Dict[Exponent, Fraction] = {zero: 1 / f0}
        for e in self.exponents():
            if e == zero:
                continue
            acc = Fraction(0)
            for e1, v1 in support:
                rest = tuple(a - b for a, b in zip(e, e1))
                if min(rest) < 0:
                    continue
                g = out.get(rest)
                if g:
                    acc += v1 * g
            if acc:
                out[e] = -acc / f0
        return SeriesM(self.nvars, self.bound, out)

    def exp(self) -> "SeriesM":
        """exp(f) via the total Euler operator: deg(e) g_e = sum (Ef)_{e'} g_{e-e'}."""
        zero = (0,) * self.nvars
        if self.terms.get(zero):
            raise DomainError("exp needs f(0) = 0")
        support = [(e, sum(e) * v) for e, v in self.terms.items()]
        out: Dict[Exponent, Fraction] = {zero: Fraction(1)}
        for e in self.exponents():
            if e == zero:
                continue
            acc = Fraction(0)
            for e1, v1 in support:
                rest = tuple(a - b for a, b in zip(e, e1))
                if min(rest) < 0:
                    continue
                g = out.get(rest)
                if g:
                    acc += v1 * g
            if acc:
                out[e] = acc / sum(e)
        return SeriesM(self.nvars, self.bound, out)


def _same_kind(a, b):
    if type(a) is not type(b):
        raise DomainError(f"operands differ in kind: {type(a).__name__} vs {type(b).__name__}")


def arith(a, b, kind: str):
    """Binary arithmetic on two series of the same kind."""
    _same_kind(a, b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown arithmetic kind: {kind}")


def exp_log(f: Series1, kind: str) -> Series1:
    if kind == "exp":
        return f.exp()
    if kind == "log":
        return f.log()
    raise ValueError(f"unknown kind: {kind}")


def compose_revert(f: Series1, g: Series1 = None, kind: str = "compose") -> Series1:
    if kind == "compose":
        if g is None:
            raise ValueError("compose needs an inner series")
        return f.compose(g)
    if kind == "revert":
        return f.revert()
    raise ValueError(f"unknown kind: {kind}")


def theta_and_dlog(f: Series1, kind: str) -> Series1:
    if kind == "theta":
        return f.theta()
    if kind == "integrate_dlog":
        return f.integrate_dlog()
    raise ValueError(f"unknown kind: {kind}")


def restricted_order(bound: int, weights: Sequence[int]) -> int:
    """Largest n for which every exponent of weight n lies within ``bound``."""
    return min(weights) * (bound + 1) - 1


def diagonal_restrict(F: SeriesM, weights: Sequence[int]) -> Series1:
    """Substitute z_i = z^{w_i} and collect."""
    weights = list(weights)
    if len(weights) != F.nvars or min(weights) < 1:
        raise DomainError(f"need {F.nvars} positive weights, got {weights}")
    order = restricted_order(F.bound, weights)
    out = [Fraction(0)] * (order + 1)
    for exponent, value in F.terms.items():
        n = sum(w * e for w, e in zip(weights, exponent))
        if n <= order:
            out[n] += value
    return Series1(tuple(out))
