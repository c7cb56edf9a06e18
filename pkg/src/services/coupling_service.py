"""Yukawa coupling pipeline: C_d, W, K_z, the q-frame and instanton numbers."""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import structlog
import sympy
from sympy import Poly, QQ
from sympy.ntheory import divisors, mobius

from src.algebra.operator import AnyForm, Z, log_psi, q_param, socle
from src.algebra.rational import to_rat
from src.algebra.series import Series1
from src.utils.errors import DomainError, NotPicardFuchs, UnsupportedDimension

logger = structlog.get_logger(__name__)


def cd_series(op: AnyForm, N: int) -> Series1:
    """Expansion of C_d = A_d / A_{d+1} to order N."""
    zform = op.to_zform()
    d = zform.order - 1
    if d < 0:
        raise DomainError("operator has order 0, no C_d")
    leading = zform.leading()
    if leading.is_zero or leading.eval(0) == 0:
        raise NotPicardFuchs("A_{d+1}(0) = 0, operator is not Picard-Fuchs")
    num, den = zform.ratio(d)
    return Series1.from_poly(num, N) / Series1.from_poly(den, N)


def yukawa_w(op: AnyForm, W0, N: int) -> Series1:
    """W_{d,0} = W0 exp(-(2/(d+1)) int_0^z C_d(v) dv/v)."""
    W0 = to_rat(W0)
    if W0 == 0:
        raise DomainError("normalization W0 must be nonzero")
    c = cd_series(op, N)
    if c[0] != 0:
        raise DomainError("C_d(0) != 0, operator is not MU at z = 0")
    d = op.to_zform().order - 1
    return (c.integrate_dlog() * Fraction(-2, d + 1)).exp().scale(W0)


def k_z(W: Series1, phi0: Series1) -> Series1:
    """
    Normalized coupling in the z-frame.

    Args:
        W: unnormalized coupling W_{d,0}
        phi0: fundamental period, phi0(0) = 1

    Returns:
        K_z = W / phi0^2, valid to the smaller of the two orders
    """
    if phi0[0] != 1:
        raise DomainError("k_z needs phi0(0) = 1")
    return W / (phi0 * phi0)


@dataclass(frozen=True)
class QFrame:
    K_q: Series1
    J: Series1


def to_q_frame(K_z: Series1, q_of_z: Series1, z_of_q: Series1, dim: int) -> QFrame:
    """
    Pull the coupling back to the q-frame.

    Args:
        K_z: normalized coupling in z
        q_of_z: mirror map q(z) = z + O(z^2)
        z_of_q: its compositional inverse
        dim: dimension d of the Calabi-Yau

    Returns:
        QFrame with K_q = (K_z o z(q)) J^d and J = (q dz/dq) / z(q)
    """
    for name, s in (("q_of_z", q_of_z), ("z_of_q", z_of_q)):
        if s[0] != 0 or s[1] != 1:
            raise DomainError(f"{name} must be q + O(q^2)")
    J = z_of_q.theta().div_z() / z_of_q.div_z()
    K_q = K_z.compose(z_of_q) * J**dim
    return QFrame(K_q=K_q, J=J)


@dataclass(frozen=True)
class YukawaFrame:
    dim: int
    phi0: Series1
    psi: Series1
    q_of_z: Series1
    z_of_q: Series1
    C_d: Series1
    W: Series1
    K_z: Series1
    K_q: Series1
    J: Series1


def yukawa_frame(op: AnyForm, W0, N: int, phi0: Optional[Series1] = None) -> YukawaFrame:
    """
    Run the whole chain for an MU operator.

    Args:
        op: MU operator in any form
        W0: classical normalization W_{d,0}(0)
        N: truncation order of Phi_0 and Psi
        phi0: precomputed Phi_0, e.g. from the coefficient cache

    Returns:
        YukawaFrame with Phi_0, Psi, q(z), z(q), C_d, W, K_z, K_q and J
    """
    theta = op.to_theta()
    if phi0 is None:
        phi0 = socle(theta, 1, N)
    phi0 = phi0.truncate(N)
    psi = log_psi(theta, phi0, N)
    qp = q_param(phi0, psi)
    W = yukawa_w(theta, W0, N)
    K_z = k_z(W, phi0)
    frame = to_q_frame(K_z, qp.q_of_z, qp.z_of_q, theta.dim)
    logger.debug("yukawa frame computed", terms=N, dim=theta.dim)
    return YukawaFrame(
        dim=theta.dim,
        phi0=phi0,
        psi=psi,
        q_of_z=qp.q_of_z,
        z_of_q=qp.z_of_q,
        C_d=cd_series(theta, N),
        W=W,
        K_z=K_z,
        K_q=frame.K_q,
        J=frame.J,
    )


@dataclass(frozen=True)
class InstantonReport:
    n0: Fraction
    gamma: Tuple[Fraction, ...]
    n: Tuple[Fraction, ...]
    integral: Tuple[bool, ...]
    nonnegative: Tuple[bool, ...]


def instanton(K_q: Series1, dim: int = 3, D: int = 5) -> InstantonReport:
    """n_e from k_j = sum_{e | j} n_e e^3 by Moebius inversion."""
    if dim != 3:
        raise UnsupportedDimension(f"instanton expansion is defined for 3-folds only, got dim {dim}")
    if D > K_q.order:
        raise DomainError(f"K_q valid to {K_q.order}, asked for degree {D}")
    gamma: List[Fraction] = []
    for e in range(1, D + 1):
        gamma.append(sum((int(mobius(e // f)) * K_q[f] for f in divisors(e)), Fraction(0)))
    n = [g / e**3 for e, g in enumerate(gamma, start=1)]
    return InstantonReport(
        n0=K_q[0],
        gamma=tuple(gamma),
        n=tuple(n),
        integral=tuple(x.denominator == 1 for x in n),
        nonnegative=tuple(x >= 0 for x in n),
    )


def lambert_resum(report: InstantonReport, N: int) -> Series1:
    """n0 + sum_d n_d d^3 q^d / (1 - q^d) to order N."""
    out = [Fraction(0)] * (N + 1)
    out[0] = report.n0
    for d, n_d in enumerate(report.n, start=1):
        for j in range(d, N + 1, d):
            out[j] += n_d * d**3
    return Series1(tuple(out))


def rational_series(text: str, N: int) -> Series1:
    """Expand a printed rational function of z."""
    expr = sympy.sympify(text, locals={"z": Z})
    num, den = sympy.fraction(sympy.together(expr))
    num_poly, den_poly = Poly(num, Z, domain=QQ), Poly(den, Z, domain=QQ)
    if den_poly.eval(0) == 0:
        raise DomainError(f"{text} has a pole at z = 0")
    return Series1.from_poly(num_poly, N) / Series1.from_poly(den_poly, N)


def match_up_to_sign(computed: Series1, printed: Series1) -> Optional[int]:
    """+1 or -1 if the series agree up to that global sign, None otherwise."""
    n = min(computed.order, printed.order)
    a, b = computed.truncate(n), printed.truncate(n)
    if a == b:
        return 1
    if a == -b:
        return -1
    return None
