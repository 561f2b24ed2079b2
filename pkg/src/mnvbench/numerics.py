"""Floating-point checks of the quantitative claims about the solution.

Fields are compiled from their exact rational form into term tables that are
evaluated in a fixed (descending graded-lex) order with compensated
summation, so every number produced here is reproducible bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .algebra import GaussRational, RationalFn, SparsePoly
from .errors import SingularPoint, ToleranceNotMet
from .reports import ProbeSeries, QuadratureReport
from .solution import SolutionBundle, build_solution, field_by_name

TINY = 1e-300
MIN_TOL = 1e-8


# ---------------------------------------------------------------------------
# compiled evaluation


class _CompiledPoly:
    __slots__ = ("ex", "ey", "es", "re", "im", "maxe")

    def __init__(self, p: SparsePoly):
        terms = p.terms()
        self.ex = [m.ex for m in terms]
        self.ey = [m.ey for m in terms]
        self.es = [m.es for m in terms]
        # Fraction -> float is correctly rounded
        self.re = [float(c.re) for c in terms.values()]
        self.im = [float(c.im) for c in terms.values()]
        self.maxe = max([0, *self.ex, *self.ey, *self.es])

    def scalar(self, x: float, y: float, s: float) -> complex:
        px, py, ps = _pow_table(x, self.maxe), _pow_table(y, self.maxe), _pow_table(s, self.maxe)
        mono = [px[a] * py[b] * ps[c] for a, b, c in zip(self.ex, self.ey, self.es)]
        re = math.fsum(c * m for c, m in zip(self.re, mono) if c)
        im = math.fsum(c * m for c, m in zip(self.im, mono) if c)
        return complex(re, im)

    def vector(self, x: np.ndarray, y: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
        px, py = _pow_table(x, self.maxe), _pow_table(y, self.maxe)
        ps = _pow_table(s, self.maxe)
        re = _Neumaier(x.shape)
        im = _Neumaier(x.shape)
        for a, b, c, cr, ci in zip(self.ex, self.ey, self.es, self.re, self.im):
            mono = px[a] * py[b] * ps[c]
            if cr:
                re.add(cr * mono)
            if ci:
                im.add(ci * mono)
        return re.value(), im.value()


def _pow_table(v, n: int) -> list:
    out = [v * 0 + 1.0]
    for _ in range(n):
        out.append(out[-1] * v)
    return out


class _Neumaier:
    def __init__(self, shape):
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)

    def add(self, v: np.ndarray) -> None:
        t = self.total + v
        big = np.abs(self.total) >= np.abs(v)
        self.comp += np.where(big, (self.total - t) + v, (v - t) + self.total)
        self.total = t

    def value(self) -> np.ndarray:
        return self.total + self.comp


class CompiledField:
    """Double-precision evaluator for a :class:`RationalFn`."""

    def __init__(self, f: RationalFn):
        self.source = f
        self.num = _CompiledPoly(f.num)
        self.bases = [(_CompiledPoly(b), k) for b, k in f.factors]

    def denominator(self, x: float, y: float, s: float) -> complex:
        d = complex(1.0)
        for base, k in self.bases:
            v = base.scalar(x, y, s)
            for _ in range(k):
                d *= v
        return d

    def scalar(self, x: float, y: float, s: float) -> complex:
        d = self.denominator(x, y, s)
        if abs(d) < TINY:
            raise SingularPoint(f"denominator vanishes at ({x!r}, {y!r}, {s!r})")
        return self.num.scalar(x, y, s) / d

    def vector(self, x: np.ndarray, y: np.ndarray, s: float) -> np.ndarray:
        """Complex values; NaN where the denominator is numerically zero."""
        nr, ni = self.num.vector(x, y, s)
        dr = np.ones_like(x)
        di = np.zeros_like(x)
        for base, k in self.bases:
            br, bi = base.vector(x, y, s)
            for _ in range(k):
                dr, di = dr * br - di * bi, dr * bi + di * br
        mag = np.hypot(dr, di)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (nr + 1j * ni) / (dr + 1j * di)
        out[mag < TINY] = np.nan
        return out


def compile_field(f: RationalFn) -> CompiledField:
    return CompiledField(f)


@lru_cache(maxsize=1)
def default_bundle() -> SolutionBundle:
    return build_solution()


@lru_cache(maxsize=16)
def compiled(name: str) -> CompiledField:
    return CompiledField(field_by_name(default_bundle(), name))


def eval_field(f: RationalFn | CompiledField, x: float, y: float, s: float, exact: bool = False) -> complex:
    """Value of ``f`` at a point; ``exact`` evaluates in rational arithmetic first."""
    if exact:
        src = f.source if isinstance(f, CompiledField) else f
        try:
            return complex(src.evaluate(Fraction(x), Fraction(y), Fraction(s)))
        except ZeroDivisionError:
            raise SingularPoint(f"denominator vanishes at ({x!r}, {y!r}, {s!r})") from None
    cf = f if isinstance(f, CompiledField) else CompiledField(f)
    return cf.scalar(float(x), float(y), float(s))


# ---------------------------------------------------------------------------
# adaptive cubature of U^2 over the plane

# 15-point Kronrod rule and its embedded 7-point Gauss rule on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes
G_WEIGHTS[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True, order=True)
class _Cell:
    r0: float
    r1: float
    p0: float
    p1: float


def _tail_radius(tol: float) -> float:
    # analytic tail 9*pi/(2 R^2) kept below tol/2
    return math.sqrt(9.0 * math.pi / tol)


def _initial_cells(radius: float, n_phi: int = 8) -> list[_Cell]:
    edges = [0.0, 0.25, 0.5]
    while edges[-1] * 2 < radius:
        edges.append(edges[-1] * 2)
    edges.append(radius)
    phis = [2 * math.pi * k / n_phi for k in range(n_phi + 1)]
    return [
        _Cell(a, b, c, d)
        for a, b in zip(edges[:-1], edges[1:])
        for c, d in zip(phis[:-1], phis[1:])
    ]


def _rule_cells(field: CompiledField, s: float, cells: Sequence[_Cell]) -> list[tuple[float, float]]:
    """Kronrod estimate and |Kronrod - Gauss| for each cell (integrand U^2 r)."""
    if not cells:
        return []
    arr = np.array([(c.r0, c.r1, c.p0, c.p1) for c in cells])
    rh = 0.5 * (arr[:, 1] - arr[:, 0])
    rm = 0.5 * (arr[:, 1] + arr[:, 0])
    ph = 0.5 * (arr[:, 3] - arr[:, 2])
    pm = 0.5 * (arr[:, 3] + arr[:, 2])
    r = rm[:, None, None] + rh[:, None, None] * NODES[None, :, None]
    p = pm[:, None, None] + ph[:, None, None] * NODES[None, None, :]
    r, p = np.broadcast_arrays(r, p)
    x = r * np.cos(p)
    y = r * np.sin(p)
    u = field.vector(x.ravel(), y.ravel(), s).reshape(r.shape)
    vals = (u.real * u.real + u.imag * u.imag) * r
    jac = rh * ph
    out = []
    for i in range(len(cells)):
        v = vals[i]
        k = math.fsum((K_WEIGHTS[:, None] * K_WEIGHTS[None, :] * v).ravel()) * jac[i]
        g = math.fsum((G_WEIGHTS[:, None] * G_WEIGHTS[None, :] * v).ravel()) * jac[i]
        out.append((k, abs(k - g)))
    return out


def _evaluate(field, s, cells, workers):
    if workers <= 1 or len(cells) < 2 * workers:
        return _rule_cells(field, s, cells)
    size = -(-len(cells) // workers)
    chunks = [cells[i : i + size] for i in range(0, len(cells), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _rule_cells(field, s, c), chunks))
    return [item for part in parts for item in part]


def _split(c: _Cell) -> list[_Cell]:
    rm = 0.5 * (c.r0 + c.r1)
    pm = 0.5 * (c.p0 + c.p1)
    return [
        _Cell(c.r0, rm, c.p0, pm),
        _Cell(c.r0, rm, pm, c.p1),
        _Cell(rm, c.r1, c.p0, pm),
        _Cell(rm, c.r1, pm, c.p1),
    ]


def integrate_U2(
    s: float,
    tol: float = 1e-6,
    *,
    field: RationalFn | CompiledField | None = None,
    workers: int = 1,
    max_cells: int = 400_000,
) -> QuadratureReport:
    """Integral of ``U^2`` over the plane at fixed ``s``.

    Polar cells on the disk ``r <= R`` are refined globally until the summed
    Kronrod-Gauss error falls below ``tol/2``; the rest of the plane is
    covered by the leading-order tail ``9 pi / (2 R^2)`` that follows from
    ``U ~ -3 cos(2 phi) / r^2``.  Gauss points are interior, so the origin is
    never sampled.
    """
    if not tol >= MIN_TOL:
        raise ToleranceNotMet(f"tolerance {tol!r} is below the supported floor {MIN_TOL}")
    cf = compiled("U") if field is None else (
        field if isinstance(field, CompiledField) else CompiledField(field)
    )
    radius = _tail_radius(tol)
    budget = 0.5 * tol
    cells = _initial_cells(radius)
    results = dict(zip(cells, _evaluate(cf, s, cells, workers)))
    while True:
        total_err = math.fsum(e for _, e in results.values())
        if total_err <= budget:
            break
        if len(results) > max_cells:
            raise ToleranceNotMet(
                f"refinement stalled at error {total_err:.3e} with {len(results)} cells"
            )
        # refine the largest contributors, deterministic order
        ranked = sorted(results.items(), key=lambda kv: (-kv[1][1], kv[0]))
        chosen, acc = [], 0.0
        for cell, (_, err) in ranked:
            chosen.append(cell)
            acc += err
            if total_err - acc <= 0.5 * budget:
                break
        children = [child for cell in chosen for child in _split(cell)]
        for cell in chosen:
            del results[cell]
        results.update(zip(children, _evaluate(cf, s, children, workers)))
    ordered = sorted(results)
    inner = math.fsum(results[c][0] for c in ordered)
    err = math.fsum(results[c][1] for c in ordered)
    tail = 9.0 * math.pi / (2.0 * radius * radius)
    if not math.isfinite(inner):
        raise ToleranceNotMet("integrand produced non-finite values")
    return QuadratureReport(
        s=float(s),
        tol=float(tol),
        value=inner + tail,
        tail_correction=tail,
        inner_estimate_error=err,
        radius_used=radius,
        cells=len(results),
    )


# ---------------------------------------------------------------------------
# probes


def neville_at_zero(h: Sequence[float], v: Sequence[float]) -> float:
    """Value at ``h = 0`` of the polynomial interpolating ``(h_i, v_i)``."""
    p = list(map(float, v))
    h = list(map(float, h))
    n = len(p)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (h[i + k] * p[i] - h[i] * p[i + 1]) / (h[i + k] - h[i])
    return p[0]


RAY_RADII = tuple(10.0 ** (-1 - 0.5 * k) for k in range(7))
DECAY_RADII = tuple(10.0 ** (2 + 0.5 * k) for k in range(7))
SUP_STABILITY = 1e-2


def sup_is_stable(values: Sequence[float], rel: float = SUP_STABILITY) -> bool:
    """A sampled sup is stable when it is finite and the outer half of the
    samples (largest radii) spread by at most ``rel`` relative to their maximum."""
    mags = [abs(v) for v in values]
    if not mags or not all(math.isfinite(m) for m in mags):
        return False
    tail = mags[len(mags) // 2 :]
    return max(tail) - min(tail) <= rel * max(tail)


def ray_limit_probe(phi: float, s: float = 0.0) -> ProbeSeries:
    """``U`` along the ray at angle ``phi`` into the origin, extrapolated in ``r^2``."""
    cf = compiled("U")
    c, sn = math.cos(phi), math.sin(phi)
    values = [cf.scalar(r * c, r * sn, s).real for r in RAY_RADII]
    limit = neville_at_zero([r * r for r in RAY_RADII], values)
    return ProbeSeries(
        kind_name="ray",
        field="U",
        phi=float(phi),
        s=float(s),
        abscissae=list(RAY_RADII),
        values=values,
        extrapolated_limit=limit,
        method="neville-richardson in r^2",
        reference=-math.cos(2 * phi),
    )


def decay_probe(phi: float, s: float, field: str = "U") -> ProbeSeries:
    """``r^2 * field`` along a ray for large ``r``, extrapolated in ``1/r``.

    For ``U`` the real value is used and the reference limit is
    ``-3 cos(2 phi)``.  For the complex ``V`` the modulus is recorded.
    """
    if field not in ("U", "V"):
        raise ValueError(f"decay probe supports U and V, not {field!r}")
    cf = compiled(field)
    c, sn = math.cos(phi), math.sin(phi)
    raw = [r * r * cf.scalar(r * c, r * sn, s) for r in DECAY_RADII]
    values = [v.real for v in raw] if field == "U" else [abs(v) for v in raw]
    limit = neville_at_zero([1.0 / r for r in DECAY_RADII], values)
    return ProbeSeries(
        kind_name="decay",
        field=field,
        phi=float(phi),
        s=float(s),
        abscissae=list(DECAY_RADII),
        values=values,
        extrapolated_limit=limit,
        method="neville-richardson in 1/r",
        reference=-3 * math.cos(2 * phi) if field == "U" else None,
        sup=max(abs(v) for v in values),
        sup_stable=sup_is_stable(values),
    )


# ---------------------------------------------------------------------------
# finite-difference oracle for the evolution equation


def _conj(v):
    return v.conj() if isinstance(v, GaussRational) else v.conjugate()


def fd_residual_check(
    x: float,
    y: float,
    s: float,
    h: float,
    *,
    bundle: SolutionBundle | None = None,
    exact: bool = True,
) -> float:
    """Normalized residual of the evolution equation from central differences.

    All derivatives come from second-order central-difference stencils on
    point samples of ``U`` and ``V``; nothing from the symbolic kernel except
    evaluation is used.  With ``exact`` the samples (and the differences) are
    taken in rational arithmetic at the exactly representable stencil points,
    leaving only truncation error; otherwise double-precision samples from
    :class:`CompiledField` are used.
    """
    if not (1e-4 <= h <= 1e-2):
        raise ValueError("h must lie in [1e-4, 1e-2]")
    if math.sqrt(x * x + y * y + s * s) <= 10 * h:
        raise ValueError("point is too close to the singular point")
    b = bundle or default_bundle()

    if exact:
        X0, Y0, S0, H = (Fraction(v) for v in (x, y, s, h))
        iu = GaussRational(0, 1)

        def sampler(f: RationalFn) -> Callable:
            def at(i, j, k=0):
                try:
                    return f.evaluate(X0 + i * H, Y0 + j * H, S0 + k * H)
                except ZeroDivisionError:
                    raise SingularPoint("stencil hits the singular point") from None

            return at

        finish = complex
    else:
        X0, Y0, S0, H = x, y, s, h
        iu = 1j

        def sampler(f: RationalFn) -> Callable:
            cf = CompiledField(f)
            return lambda i, j, k=0: cf.scalar(X0 + i * H, Y0 + j * H, S0 + k * H)

        finish = complex

    U = sampler(b.U)
    V = sampler(b.V)

    def vb(i, j):
        return _conj(V(i, j))

    two_h = 2 * H
    h3 = 2 * H * H * H
    Ux = (U(1, 0) - U(-1, 0)) / two_h
    Uy = (U(0, 1) - U(0, -1)) / two_h
    Uxxx = (U(2, 0) - 2 * U(1, 0) + 2 * U(-1, 0) - U(-2, 0)) / h3
    Uyyy = (U(0, 2) - 2 * U(0, 1) + 2 * U(0, -1) - U(0, -2)) / h3
    Uxxy = (U(1, 1) - 2 * U(0, 1) + U(-1, 1) - U(1, -1) + 2 * U(0, -1) - U(-1, -1)) / h3
    Uxyy = (U(1, 1) - 2 * U(1, 0) + U(1, -1) - U(-1, 1) + 2 * U(-1, 0) - U(-1, -1)) / h3
    Ut = -(U(0, 0, 1) - U(0, 0, -1)) / two_h
    Vx = (V(1, 0) - V(-1, 0)) / two_h
    Vy = (V(0, 1) - V(0, -1)) / two_h
    Vbx = (vb(1, 0) - vb(-1, 0)) / two_h
    Vby = (vb(0, 1) - vb(0, -1)) / two_h

    u0, v0 = U(0, 0), V(0, 0)
    dU = (Ux - iu * Uy) / 2
    dbU = (Ux + iu * Uy) / 2
    d3U = (Uxxx - 3 * iu * Uxxy - 3 * Uxyy + iu * Uyyy) / 8
    db3U = (Uxxx + 3 * iu * Uxxy - 3 * Uxyy - iu * Uyyy) / 8
    dV = (Vx - iu * Vy) / 2
    dbVb = (Vbx + iu * Vby) / 2

    terms = [
        d3U,
        3 * dU * v0,
        u0 * dV * Fraction(3, 2) if exact else 1.5 * u0 * dV,
        db3U,
        3 * dbU * _conj(v0),
        u0 * dbVb * Fraction(3, 2) if exact else 1.5 * u0 * dbVb,
    ]
    residual = Ut
    for t in terms:
        residual = residual - t
    scale = max(abs(finish(t)) for t in [Ut, *terms])
    return abs(finish(residual)) / scale
