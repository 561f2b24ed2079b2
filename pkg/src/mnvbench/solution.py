"""The blow-up solution of the modified Novikov--Veselov equation.

The equation, for a real field ``U`` and a complex field ``V``, reads::

    U_t = (d^3 U + 3 (dU) V + 3/2 U dV) + (db^3 U + 3 (db U) conj(V) + 3/2 U db conj(V))
    db V = d (U^2)

with ``d``/``db`` the Wirtinger derivatives.  Time enters only through
``s = C - t`` so ``U_t = -dU/ds``.

The solution is ``U = N / Q`` with::

    N = -3((x^2 + y^2 + 3)(x^2 - y^2) - 6 x s)
    Q = (x^2+y^2)^3 + 3(x^4+y^4) + 18 x^2 y^2 + 9(x^2+y^2) + 9 s^2 + (6x^3 - 18xy^2 - 18x) s

and, with ``gamma = i(x^2 - y^2)``,
``delta = y(1 + x^2 - y^2/3) - i(x(1 + y^2 - x^2/3) - s)`` and
``A = z(conj(gamma) - gamma) - delta z^2 - conj(delta)``::

    V = A^2/(|gamma|^2+|delta|^2)^2 + 2U/(1+|z|^2) + 2i conj(z) A/((|gamma|^2+|delta|^2)(1+|z|^2))

Note the sign of ``s`` inside ``delta`` and the ``+2i conj(z)`` in the last
term: they are what makes ``Q = 9(|gamma|^2 + |delta|^2)`` and the
``db V = d(U^2)`` constraint hold identically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product

from .algebra import (
    ONE,
    GaussRational,
    I,
    RationalFn,
    S,
    SparsePoly,
    X,
    Y,
    ZeroCertificate,
)
from .errors import (
    AuditFailure,
    ConstraintViolation,
    IdentityViolation,
    RealnessViolation,
    ResidualNonzero,
)
from .reports import VerificationReport

THIRD = Fraction(1, 3)

Z = X + I * Y
ZBAR = X - I * Y
ONE_PLUS_ABS_Z2 = ONE + X * X + Y * Y


@dataclass(frozen=True)
class SolutionBundle:
    U: RationalFn
    Q: SparsePoly
    V: RationalFn
    gamma: SparsePoly
    delta: SparsePoly


def q_polynomial() -> SparsePoly:
    r2 = X * X + Y * Y
    return (
        r2**3
        + 3 * (X**4 + Y**4)
        + 18 * X * X * Y * Y
        + 9 * r2
        + 9 * S * S
        + (6 * X**3 - 18 * X * Y * Y - 18 * X) * S
    )


def u_numerator() -> SparsePoly:
    return -3 * ((X * X + Y * Y + 3) * (X * X - Y * Y) - 6 * X * S)


def gamma_polynomial() -> SparsePoly:
    return I * (X * X - Y * Y)


def delta_polynomial(time_sign: int = -1) -> SparsePoly:
    """``time_sign`` is the sign of ``s`` inside the bracket; -1 is the solution."""
    return Y * (1 + X * X - Y * Y * THIRD) - I * (X * (1 + Y * Y - X * X * THIRD) + time_sign * S)


def assemble_v(
    U: RationalFn,
    gamma: SparsePoly,
    delta: SparsePoly,
    last_term: SparsePoly | None = None,
) -> RationalFn:
    """V from ``U``, ``gamma`` and ``delta``; ``last_term`` overrides the ``2i*conj(z)`` factor."""
    a = Z * (gamma.conj() - gamma) - delta * Z * Z - delta.conj()
    norm = gamma * gamma.conj() + delta * delta.conj()
    lead = 2 * I * ZBAR if last_term is None else last_term
    return (
        RationalFn.from_factors(a * a, [(norm, 2)])
        + U * RationalFn(2, ONE_PLUS_ABS_Z2)
        + RationalFn.from_factors(lead * a, [(norm, 1), (ONE_PLUS_ABS_Z2, 1)])
    )


def build_solution() -> SolutionBundle:
    Q = q_polynomial()
    U = RationalFn(u_numerator(), Q)
    gamma = gamma_polynomial()
    delta = delta_polynomial()
    return SolutionBundle(U=U, Q=Q, V=assemble_v(U, gamma, delta), gamma=gamma, delta=delta)


# ---------------------------------------------------------------------------
# helpers


def wirtinger(f: RationalFn) -> RationalFn:
    return f.diff("wirtinger_z")


def wirtinger_bar(f: RationalFn) -> RationalFn:
    return f.diff("wirtinger_zbar")


class _Telemetry:
    """Tracks the largest numerator seen while a certificate is assembled."""

    def __init__(self) -> None:
        self.degree = -1
        self.terms = 0

    def see(self, f: RationalFn | SparsePoly) -> None:
        p = f.num if isinstance(f, RationalFn) else f
        self.degree = max(self.degree, p.total_degree)
        self.terms = max(self.terms, len(p))


def compare(lhs: RationalFn, rhs: RationalFn, tel: _Telemetry | None = None) -> ZeroCertificate:
    """Zero test of ``lhs - rhs`` after lifting both to a common denominator."""
    tel = tel or _Telemetry()
    target = lhs.factor_map()
    for b, k in rhs.factors:
        target[b] = max(target.get(b, 0), k)
    cache: dict = {}
    a = lhs._lift(target, cache)
    c = rhs._lift(target, cache)
    tel.see(a)
    tel.see(c)
    diff = a - c
    return ZeroCertificate(diff.is_zero(), tel.terms, tel.degree)


SAMPLE_POINTS = [
    (Fraction(a), Fraction(b), Fraction(c))
    for a, b, c in product((1, -2, Fraction(1, 3)), (Fraction(1, 2), -1, 3), (1, Fraction(-2, 5)))
]


def find_nonzero_point(f: RationalFn) -> tuple[Fraction, Fraction, Fraction] | None:
    for p in SAMPLE_POINTS:
        try:
            if f.evaluate(*p):
                return p
        except ZeroDivisionError:
            continue
    return None


def _report(check: str, cert: ZeroCertificate, t0: float, **extra) -> VerificationReport:
    return VerificationReport(
        check=check,
        status="pass" if cert.is_zero else "fail",
        degree=cert.degree,
        terms=cert.terms,
        millis=round((time.perf_counter() - t0) * 1000, 3),
        extra=extra,
    )


# ---------------------------------------------------------------------------
# certificates


def verify_dbar_constraint(b: SolutionBundle) -> VerificationReport:
    """Exact check of ``db V = d(U^2)``."""
    t0 = time.perf_counter()
    lhs = wirtinger_bar(b.V)
    rhs = wirtinger(b.U * b.U)
    cert = compare(lhs, rhs)
    report = _report("dbar", cert, t0)
    if not cert.is_zero:
        diff = lhs - rhs
        mono, coef = diff.num.leading_term()
        raise ConstraintViolation(
            f"db V - d(U^2) has leading numerator term {coef}*{tuple(mono)}",
            report,
            leading_term=(tuple(mono), str(coef)),
        )
    return report


def mnv_residual(U: RationalFn, V: RationalFn, *, time_derivative: bool = True, tel=None):
    """Residual of the evolution equation as one rational function."""
    tel = tel or _Telemetry()
    Vb = V.conj()
    dU = wirtinger(U)
    dbU = wirtinger_bar(U)
    parts = [
        wirtinger(wirtinger(dU)),
        3 * dU * V,
        U * wirtinger(V) * Fraction(3, 2),
        wirtinger_bar(wirtinger_bar(dbU)),
        3 * dbU * Vb,
        U * wirtinger_bar(Vb) * Fraction(3, 2),
    ]
    residual = U.diff("t") if time_derivative else RationalFn(0)
    tel.see(residual)
    for p in parts:
        tel.see(p)
        residual = residual - p
        tel.see(residual)
    return residual


def verify_mnv(b: SolutionBundle, *, time_derivative: bool = True) -> VerificationReport:
    t0 = time.perf_counter()
    tel = _Telemetry()
    residual = mnv_residual(b.U, b.V, time_derivative=time_derivative, tel=tel)
    cert = ZeroCertificate(residual.is_zero(), tel.terms, tel.degree)
    report = _report(
        "pde",
        cert,
        t0,
        denominator_degree=sum(base.total_degree * k for base, k in residual.factors),
    )
    if not cert.is_zero:
        point = find_nonzero_point(residual)
        raise ResidualNonzero(
            f"mNV residual is nonzero, e.g. at {tuple(str(c) for c in point or ())}",
            report,
            point=point,
        )
    return report


def verify_denominator_identity(b: SolutionBundle) -> VerificationReport:
    """Exact check of ``Q = 9(|gamma|^2 + |delta|^2)``."""
    t0 = time.perf_counter()
    norm = b.gamma * b.gamma.conj() + b.delta * b.delta.conj()
    cert = compare(RationalFn(b.Q), RationalFn(9 * norm))
    report = _report("denominator", cert, t0)
    if not cert.is_zero:
        raise IdentityViolation(f"Q - 9(|gamma|^2+|delta|^2) = {b.Q - 9 * norm}", report)
    return report


def verify_realness(b: SolutionBundle) -> VerificationReport:
    t0 = time.perf_counter()
    cert = compare(b.U.conj(), b.U)
    v_real = compare(b.V.conj(), b.V).is_zero
    report = _report("realness", cert, t0, V_is_real=v_real)
    if not cert.is_zero:
        raise RealnessViolation("conj(U) differs from U", report)
    return report


def is_real_function(f: RationalFn | SparsePoly) -> bool:
    if isinstance(f, SparsePoly):
        f = RationalFn(f)
    return compare(f.conj(), f).is_zero


def _positive_definite_in_x(p: SparsePoly) -> bool:
    """Sufficient test that a polynomial in ``x`` alone is positive for all real ``x``:
    real coefficients, all positive, even exponents only, nonzero constant."""
    terms = p.terms()
    if not terms or any(m.ey or m.es for m in terms):
        return False
    const = terms.get((0, 0, 0))
    if const is None or const.re <= 0:
        return False
    return all(c.im == 0 and c.re > 0 and m.ex % 2 == 0 for m, c in terms.items())


def singular_point_audit(b: SolutionBundle, grid: int = 41) -> VerificationReport:
    """Show ``Q > 0`` away from ``(0, 0, 0)`` and record each step.

    ``Q = 9(|gamma|^2 + |delta|^2)`` vanishes only where gamma and delta both do.
    gamma = 0 forces ``y = +-x``; then Re delta = y(1 + x^2 - y^2/3) vanishes only
    for ``y = 0`` (so ``x = 0`` and, from Im delta, ``s = 0``) or for
    ``1 + 2x^2/3 = 0``, which has no real root.
    """
    t0 = time.perf_counter()
    trail: dict[str, bool] = {}
    norm = b.gamma * b.gamma.conj() + b.delta * b.delta.conj()
    trail["Q_is_sum_of_squares"] = (b.Q - 9 * norm).is_zero()

    g = b.gamma
    trail["gamma_is_i_times_x2_minus_y2"] = (g - I * (X * X - Y * Y)).is_zero()
    re_delta = b.delta.real_part()
    im_delta = b.delta.imag_part()
    # Re delta = y * cofactor
    cof_poly = _divide_by_y(re_delta)
    trail["re_delta_has_factor_y"] = cof_poly is not None
    for sign, label in ((1, "y_eq_x"), (-1, "y_eq_minus_x")):
        restricted = cof_poly.substitute("y", sign * X) if cof_poly is not None else SparsePoly()
        trail[f"cofactor_positive_on_{label}"] = _positive_definite_in_x(restricted)
    # y = 0 and y = +-x force x = 0; then Im delta = s
    trail["im_delta_at_origin_is_minus_plus_s"] = (
        im_delta.substitute("x", SparsePoly()).substitute("y", SparsePoly()) in (S, -S)
    )

    q0 = b.Q.evaluate(0, 0, 0)
    trail["Q_vanishes_at_origin"] = q0 == 0
    trail["Q_on_s_axis_is_9s2"] = (
        b.Q.substitute("x", SparsePoly()).substitute("y", SparsePoly()) - 9 * S * S
    ).is_zero()

    # witness grid on [-5, 5]^2 x {-1, 1}
    qmin = None
    for i in range(grid):
        for j in range(grid):
            xv = Fraction(-5) + Fraction(10 * i, grid - 1)
            yv = Fraction(-5) + Fraction(10 * j, grid - 1)
            for sv in (-1, 1):
                v = b.Q.evaluate(xv, yv, sv).re
                qmin = v if qmin is None else min(qmin, v)
    trail["grid_minimum_positive"] = qmin is not None and qmin > 0

    ok = all(trail.values())
    report = VerificationReport(
        check="singularity",
        status="pass" if ok else "fail",
        degree=b.Q.total_degree,
        terms=len(b.Q),
        millis=round((time.perf_counter() - t0) * 1000, 3),
        extra={"grid_min_Q": float(qmin) if qmin is not None else None, **trail},
    )
    if not ok:
        failed = [k for k, v in trail.items() if not v]
        raise AuditFailure(f"audit steps failed: {failed}", report)
    return report


def _divide_by_y(p: SparsePoly) -> SparsePoly | None:
    terms = p.terms()
    if any(m.ey == 0 for m in terms):
        return None
    return SparsePoly({(m.ex, m.ey - 1, m.es): c for m, c in terms.items()})


def scaled_bundle(b: SolutionBundle, u_factor: int, v_factor: int) -> SolutionBundle:
    return replace(b, U=b.U * u_factor, V=b.V * v_factor)


def field_by_name(b: SolutionBundle, name: str) -> RationalFn:
    table = {
        "U": b.U,
        "V": b.V,
        "Q": RationalFn(b.Q),
        "gamma": RationalFn(b.gamma),
        "delta": RationalFn(b.delta),
    }
    try:
        return table[name]
    except KeyError:
        raise KeyError(f"unknown field {name!r}; expected one of {sorted(table)}") from None


__all__ = [
    "SolutionBundle",
    "build_solution",
    "verify_dbar_constraint",
    "verify_mnv",
    "verify_denominator_identity",
    "verify_realness",
    "singular_point_audit",
    "mnv_residual",
    "field_by_name",
    "GaussRational",
]
