"""Enneper surfaces, their inversions and the induced Dirac potential.

For a conformal immersion ``r(x, y)`` with metric ``g (dx^2 + dy^2)`` the
Laplacian of the position vector is normal: ``r_xx + r_yy = 2 g H N``, where
``H`` is the mean curvature and ``N`` the unit normal.  With
``w = r_x x r_y`` one has ``|w| = g`` and so ``N = w / g``, which gives

    <r_xx + r_yy, w> = 2 g^2 H        and        H sqrt(g) / 2 = <r_xx + r_yy, w> / (4 g^(3/2)).

Squaring removes the square root: ``(H sqrt(g)/2)^2 = <Lap r, w>^2 / (16 g^3)``.
All identities here are therefore checked between rational functions, and
the sign of ``H sqrt(g)/2`` relative to ``U`` (which depends on the chosen
normal orientation) is only probed numerically.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import RationalFn, S, SparsePoly, X, Y
from .errors import ConformalityViolation, PotentialMismatch, SignInconsistency
from .reports import VerificationReport
from .solution import SolutionBundle, _Telemetry, compare, find_nonzero_point

THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class Immersion:
    c1: RationalFn
    c2: RationalFn
    c3: RationalFn

    @property
    def components(self) -> tuple[RationalFn, RationalFn, RationalFn]:
        return (self.c1, self.c2, self.c3)

    def norm2(self) -> RationalFn:
        return self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3

    def diff(self, var: str) -> "Immersion":
        return Immersion(*(c.diff(var) for c in self.components))

    def evaluate(self, x0, y0, s0):
        return tuple(c.evaluate(x0, y0, s0) for c in self.components)


@dataclass(frozen=True)
class FundamentalForm:
    E: RationalFn
    F: RationalFn
    G: RationalFn


@dataclass
class GeometryReport:
    conformal_certificate: list[VerificationReport]
    potential_certificate: VerificationReport
    sign_convention: int
    samples: int


def _dot(a: Immersion, b: Immersion) -> RationalFn:
    return a.c1 * b.c1 + a.c2 * b.c2 + a.c3 * b.c3


def _cross(a: Immersion, b: Immersion) -> Immersion:
    return Immersion(
        a.c2 * b.c3 - a.c3 * b.c2,
        a.c3 * b.c1 - a.c1 * b.c3,
        a.c1 * b.c2 - a.c2 * b.c1,
    )


def enneper_immersion(offset: tuple[SparsePoly, SparsePoly, SparsePoly] | None = None) -> Immersion:
    """Enneper surface translated by ``offset`` (default ``(0, -s, 0)``)."""
    if offset is None:
        offset = (SparsePoly(), -S, SparsePoly())
    base = (
        Y * (Y * Y * THIRD - X * X - 1),
        X * (1 + Y * Y - X * X * THIRD),
        X * X - Y * Y,
    )
    return Immersion(*(RationalFn(b + o) for b, o in zip(base, offset)))


def invert_immersion(u: Immersion) -> Immersion:
    """Inversion ``u -> -u / |u|^2`` in the unit sphere centred at the origin."""
    n2 = u.norm2()
    if n2.is_zero():
        raise ZeroDivisionError("|u|^2 vanishes identically")
    return Immersion(*(-c / n2 for c in u.components))


def fundamental_form(r: Immersion) -> FundamentalForm:
    rx = r.diff("x")
    ry = r.diff("y")
    return FundamentalForm(E=_dot(rx, rx), F=_dot(rx, ry), G=_dot(ry, ry))


_WITNESSES = [(Fraction(1, 2), Fraction(1, 3), Fraction(1)), (Fraction(-1), Fraction(2), Fraction(-1, 2))]


def verify_conformal(ff: FundamentalForm, label: str = "conformal") -> list[VerificationReport]:
    out = []
    for name, lhs, rhs in ((f"{label}:E=G", ff.E, ff.G), (f"{label}:F=0", ff.F, RationalFn(0))):
        t0 = time.perf_counter()
        cert = compare(lhs, rhs)
        report = VerificationReport(
            check=name,
            status="pass" if cert.is_zero else "fail",
            degree=cert.degree,
            terms=cert.terms,
            millis=round((time.perf_counter() - t0) * 1000, 3),
        )
        if not cert.is_zero:
            point = find_nonzero_point(lhs - rhs)
            raise ConformalityViolation(
                f"{name} fails, witness point {tuple(map(str, point or ()))}", report, point=point
            )
        out.append(report)
    return out


def laplacian(r: Immersion) -> Immersion:
    return Immersion(
        *(c.diff("x").diff("x") + c.diff("y").diff("y") for c in r.components)
    )


def potential_pairing(r: Immersion) -> RationalFn:
    """``<r_xx + r_yy, r_x x r_y>``."""
    return _dot(laplacian(r), _cross(r.diff("x"), r.diff("y")))


def weierstrass_potential_sq(r: Immersion, ff: FundamentalForm) -> RationalFn:
    """``(H sqrt(g) / 2)^2`` for a conformal immersion with conformal factor ``g = E``."""
    h = potential_pairing(r)
    return h * h / (16 * ff.E**3)


def verify_potential_matches_U(
    r: Immersion,
    ff: FundamentalForm,
    b: SolutionBundle,
    samples: int = 128,
    seed: int = 20161,
) -> GeometryReport:
    t0 = time.perf_counter()
    tel = _Telemetry()
    h = potential_pairing(r)
    lhs = 16 * b.U * b.U * ff.E**3
    rhs = h * h
    cert = compare(lhs, rhs, tel)
    report = VerificationReport(
        check="geometry:potential",
        status="pass" if cert.is_zero else "fail",
        degree=cert.degree,
        terms=cert.terms,
        millis=None,
    )
    if not cert.is_zero:
        point = find_nonzero_point(lhs - rhs)
        report.millis = round((time.perf_counter() - t0) * 1000, 3)
        raise PotentialMismatch(
            f"16 U^2 g^3 differs from <Lap r, w>^2, e.g. at {tuple(map(str, point or ()))}",
            report,
            point=point,
        )

    sign = _probe_sign(h, ff.E, b.U, samples, seed)
    report.extra["sign_convention"] = sign
    report.millis = round((time.perf_counter() - t0) * 1000, 3)
    return GeometryReport(
        conformal_certificate=verify_conformal(ff, "inverted"),
        potential_certificate=report,
        sign_convention=sign,
        samples=samples,
    )


def _probe_sign(h: RationalFn, g: RationalFn, U: RationalFn, samples: int, seed: int) -> int:
    from .numerics import compile_field

    rng = np.random.default_rng(seed)
    hf, gf, uf = compile_field(h), compile_field(g), compile_field(U)
    signs = set()
    taken = 0
    while taken < samples:
        x, y, s = rng.uniform(-3.0, 3.0, size=3)
        u = uf.scalar(x, y, s).real
        if abs(u) < 1e-6 or x * x + y * y + s * s < 1e-4:
            continue
        pot = hf.scalar(x, y, s).real / (4.0 * math.pow(gf.scalar(x, y, s).real, 1.5))
        signs.add(int(np.sign(pot) * np.sign(u)))
        taken += 1
    if len(signs) != 1:
        raise SignInconsistency(f"sampled signs disagree: {sorted(signs)}")
    return signs.pop()


def structural_certificates() -> list[VerificationReport]:
    """Conformality of both immersions, ``9|u|^2 = Q`` and the metric scaling law."""
    from .solution import q_polynomial

    u = enneper_immersion()
    inv = invert_immersion(u)
    ff0 = fundamental_form(u)
    ff1 = fundamental_form(inv)
    out = verify_conformal(ff0, "enneper") + verify_conformal(ff1, "inverted")

    checks = {
        "9|u|^2=Q": (9 * u.norm2(), RationalFn(q_polynomial())),
        "g_inverted*|u|^4=g0": (ff1.E * u.norm2() ** 2, ff0.E),
    }
    for name, (lhs, rhs) in checks.items():
        t0 = time.perf_counter()
        cert = compare(lhs, rhs)
        out.append(
            VerificationReport(
                check=name,
                status="pass" if cert.is_zero else "fail",
                degree=cert.degree,
                terms=cert.terms,
                millis=round((time.perf_counter() - t0) * 1000, 3),
            )
        )
    return out
