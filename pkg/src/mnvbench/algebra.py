"""Exact sparse polynomial and rational-function arithmetic over Q(i).

Polynomials live in the real variables ``x``, ``y`` and ``s`` and carry
Gaussian-rational coefficients.  Internally a :class:`SparsePoly` stores two
integer term maps (real and imaginary parts) over one common positive
denominator, with monomials packed into a single integer so that monomial
multiplication is integer addition.  Monomials are ordered graded
lexicographically with ``x > y > s``.

A :class:`RationalFn` keeps its denominator as a product of powers of
normalized base polynomials.  Sums use the exponent-wise maximum of the two
factorizations and derivatives only raise the exponent of bases whose
derivative is nonzero, which keeps the degree of nested quotient-rule results
linear in the derivative order.  No polynomial GCD is ever computed; equality
and zero-testing work by cross-multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Union

__all__ = [
    "GaussRational",
    "Monomial",
    "SparsePoly",
    "RationalFn",
    "ZeroCertificate",
    "DivisionByZeroFunction",
    "VARIABLES",
    "DIFF_VARIABLES",
    "poly_binary",
    "poly_diff",
    "poly_conj",
    "poly_eval",
    "rf_binary",
    "rf_diff",
    "rf_is_zero",
    "X",
    "Y",
    "S",
    "I",
    "ONE",
    "ZERO",
]

VARIABLES = ("x", "y", "s")
DIFF_VARIABLES = ("x", "y", "s", "wirtinger_z", "wirtinger_zbar", "t")

_SHIFT = 21
_MASK = (1 << _SHIFT) - 1
_UNIT = {"x": 1 << (2 * _SHIFT), "y": 1 << _SHIFT, "s": 1}


class DivisionByZeroFunction(ZeroDivisionError):
    """Raised when dividing by the zero rational function."""


# ---------------------------------------------------------------------------
# Gaussian rationals


@dataclass(frozen=True, slots=True)
class GaussRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: "Scalar") -> "GaussRational":
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value), Fraction(0))

    def __add__(self, other: "Scalar") -> "GaussRational":
        o = GaussRational.coerce(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: "Scalar") -> "GaussRational":
        o = GaussRational.coerce(other)
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: "Scalar") -> "GaussRational":
        return GaussRational.coerce(other) - self

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other: "Scalar") -> "GaussRational":
        o = GaussRational.coerce(other)
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: "Scalar") -> "GaussRational":
        o = GaussRational.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRational(
            (self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n
        )

    def __rtruediv__(self, other: "Scalar") -> "GaussRational":
        return GaussRational.coerce(other) / self

    def __pow__(self, n: int) -> "GaussRational":
        if n < 0:
            return GaussRational(1) / self**-n
        out = GaussRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (GaussRational, int, Fraction, complex)):
            o = GaussRational.coerce(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conj(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return format_gauss(self)

    def __repr__(self) -> str:
        return f"GaussRational({format_gauss(self)})"


Scalar = Union[GaussRational, int, Fraction, complex]


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_gauss(c: GaussRational) -> str:
    """``a/b``, ``a/b*i`` or ``a/b + c/d*i``; parseable by the expression parser."""
    if c.im == 0:
        return _frac_str(c.re)
    im = _frac_str(abs(c.im))
    im_part = "i" if abs(c.im) == 1 else f"{im}*i"
    if c.re == 0:
        return im_part if c.im > 0 else f"-{im_part}"
    sign = "+" if c.im > 0 else "-"
    return f"{_frac_str(c.re)} {sign} {im_part}"


# ---------------------------------------------------------------------------
# Monomials


class Monomial(NamedTuple):
    """Exponents of ``x``, ``y`` and ``s``."""

    ex: int = 0
    ey: int = 0
    es: int = 0

    @property
    def degree(self) -> int:
        return self.ex + self.ey + self.es

    def pack(self) -> int:
        return (self.ex << (2 * _SHIFT)) | (self.ey << _SHIFT) | self.es

    @classmethod
    def unpack(cls, m: int) -> "Monomial":
        return cls(m >> (2 * _SHIFT), (m >> _SHIFT) & _MASK, m & _MASK)


def _exps(m: int) -> tuple[int, int, int]:
    return m >> (2 * _SHIFT), (m >> _SHIFT) & _MASK, m & _MASK


def _grlex_key(m: int) -> tuple[int, int]:
    # same total degree: packed integer comparison is lex with x > y > s
    ex, ey, es = _exps(m)
    return (ex + ey + es, m)


def _mul_maps(a: Mapping[int, int], b: Mapping[int, int]) -> dict[int, int]:
    if len(a) < len(b):
        a, b = b, a
    out: dict[int, int] = {}
    get = out.get
    bitems = list(b.items())
    for m1, c1 in a.items():
        for m2, c2 in bitems:
            m = m1 + m2
            out[m] = get(m, 0) + c1 * c2
    return out


def _axpy(out: dict[int, int], a: Mapping[int, int], k: int) -> None:
    get = out.get
    for m, c in a.items():
        out[m] = get(m, 0) + k * c


# ---------------------------------------------------------------------------
# Sparse polynomials


class SparsePoly:
    """Immutable sparse polynomial in ``x, y, s`` over the Gaussian rationals.

    The value is ``(sum re[m]*m + i*sum im[m]*m) / scale`` with integer
    ``re``/``im`` maps free of zeros, ``scale > 0`` and the gcd of ``scale``
    with every stored integer equal to one, so equal polynomials have
    identical internal state.
    """

    __slots__ = ("_re", "_im", "_scale", "_hash")

    def __init__(self, terms: Mapping[Monomial | tuple[int, int, int], Scalar] | None = None):
        re: dict[int, Fraction] = {}
        im: dict[int, Fraction] = {}
        for mono, coef in (terms or {}).items():
            c = GaussRational.coerce(coef)
            m = Monomial(*mono).pack()
            if c.re:
                re[m] = re.get(m, Fraction(0)) + c.re
            if c.im:
                im[m] = im.get(m, Fraction(0)) + c.im
        scale = 1
        for v in (*re.values(), *im.values()):
            scale = scale * v.denominator // math.gcd(scale, v.denominator)
        self._set(
            {m: int(v * scale) for m, v in re.items()},
            {m: int(v * scale) for m, v in im.items()},
            scale,
        )

    def _set(self, re: dict[int, int], im: dict[int, int], scale: int) -> None:
        re = {m: c for m, c in re.items() if c}
        im = {m: c for m, c in im.items() if c}
        if not re and not im:
            scale = 1
        elif scale != 1:
            g = math.gcd(scale, *re.values(), *im.values())
            if g != 1:
                re = {m: c // g for m, c in re.items()}
                im = {m: c // g for m, c in im.items()}
                scale //= g
        self._re = re
        self._im = im
        self._scale = scale
        self._hash = None

    @classmethod
    def _raw(cls, re: dict[int, int], im: dict[int, int], scale: int = 1) -> "SparsePoly":
        p = cls.__new__(cls)
        p._set(re, im, scale)
        return p

    @classmethod
    def const(cls, c: Scalar) -> "SparsePoly":
        return cls({Monomial(): c})

    @classmethod
    def var(cls, name: str) -> "SparsePoly":
        if name not in _UNIT:
            raise ValueError(f"unknown variable {name!r}")
        return cls._raw({_UNIT[name]: 1}, {}, 1)

    # -- inspection ---------------------------------------------------------

    def terms(self) -> dict[Monomial, GaussRational]:
        """Term map in descending graded-lex order."""
        out = {}
        for m in self._sorted_monos():
            out[Monomial.unpack(m)] = self._coef(m)
        return out

    def _coef(self, m: int) -> GaussRational:
        return GaussRational(
            Fraction(self._re.get(m, 0), self._scale), Fraction(self._im.get(m, 0), self._scale)
        )

    def _sorted_monos(self) -> list[int]:
        return sorted(set(self._re) | set(self._im), key=_grlex_key, reverse=True)

    def __len__(self) -> int:
        if not self._im:
            return len(self._re)
        return len(set(self._re) | set(self._im))

    def __iter__(self) -> Iterator[tuple[Monomial, GaussRational]]:
        return iter(self.terms().items())

    def is_zero(self) -> bool:
        return not self._re and not self._im

    def is_real(self) -> bool:
        return not self._im

    def is_constant(self) -> bool:
        return all(m == 0 for m in self._re) and all(m == 0 for m in self._im)

    @property
    def total_degree(self) -> int:
        """Maximal total degree; -1 for the zero polynomial."""
        monos = set(self._re) | set(self._im)
        if not monos:
            return -1
        return max(sum(_exps(m)) for m in monos)

    def degree_in(self, var: str) -> int:
        idx = VARIABLES.index(var)
        monos = set(self._re) | set(self._im)
        return max((_exps(m)[idx] for m in monos), default=-1)

    def leading_term(self) -> tuple[Monomial, GaussRational]:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        m = max(set(self._re) | set(self._im), key=_grlex_key)
        return Monomial.unpack(m), self._coef(m)

    def sort_key(self) -> tuple:
        monos = self._sorted_monos()
        return (
            len(monos),
            tuple((_grlex_key(m), self._re.get(m, 0), self._im.get(m, 0)) for m in monos),
            self._scale,
        )

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussRational)):
            other = SparsePoly.const(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self._scale == other._scale and self._re == other._re and self._im == other._im

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(
                (self._scale, frozenset(self._re.items()), frozenset(self._im.items()))
            )
        return self._hash

    def __reduce__(self):
        return (SparsePoly._raw, (self._re, self._im, self._scale))

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other: object) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return other
        if isinstance(other, (int, Fraction, GaussRational, complex)):
            return SparsePoly.const(other)
        return NotImplemented  # type: ignore[return-value]

    def _lincomb(self, other: "SparsePoly", sign: int) -> "SparsePoly":
        l = self._scale * other._scale // math.gcd(self._scale, other._scale)
        a, b = l // self._scale, l // other._scale
        re = {m: a * c for m, c in self._re.items()}
        im = {m: a * c for m, c in self._im.items()}
        _axpy(re, other._re, sign * b)
        _axpy(im, other._im, sign * b)
        return SparsePoly._raw(re, im, l)

    def __add__(self, other: object) -> "SparsePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._lincomb(o, 1)

    __radd__ = __add__

    def __sub__(self, other: object) -> "SparsePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._lincomb(o, -1)

    def __rsub__(self, other: object) -> "SparsePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o._lincomb(self, -1)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly._raw(
            {m: -c for m, c in self._re.items()}, {m: -c for m, c in self._im.items()}, self._scale
        )

    def __mul__(self, other: object) -> "SparsePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_constant() or self.is_constant():
            p, c = (self, o) if o.is_constant() else (o, self)
            return p.scale_by(c._coef(0))
        re = _mul_maps(self._re, o._re)
        im: dict[int, int] = {}
        if self._im and o._im:
            _axpy(re, _mul_maps(self._im, o._im), -1)
        if self._im:
            im = _mul_maps(self._im, o._re)
        if o._im:
            _axpy(im, _mul_maps(self._re, o._im), 1)
        return SparsePoly._raw(re, im, self._scale * o._scale)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SparsePoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def scale_by(self, c: Scalar) -> "SparsePoly":
        c = GaussRational.coerce(c)
        if not c:
            return ZERO
        # (a + bi)/d * (p + qi)/scale with a, b, d integers
        d = c.re.denominator * c.im.denominator // math.gcd(c.re.denominator, c.im.denominator)
        a = int(c.re * d)
        b = int(c.im * d)
        re = {m: a * v for m, v in self._re.items()} if a else {}
        im = {m: b * v for m, v in self._re.items()} if b else {}
        if b:
            _axpy(re, self._im, -b)
        if a:
            _axpy(im, self._im, a)
        return SparsePoly._raw(re, im, self._scale * d)

    def diff(self, var: str) -> "SparsePoly":
        """Formal partial derivative with respect to ``x``, ``y`` or ``s``."""
        if var not in _UNIT:
            raise ValueError(f"cannot differentiate with respect to {var!r}")
        idx = VARIABLES.index(var)
        unit = _UNIT[var]

        def d(terms: dict[int, int]) -> dict[int, int]:
            out = {}
            for m, c in terms.items():
                e = _exps(m)[idx]
                if e:
                    out[m - unit] = c * e
            return out

        return SparsePoly._raw(d(self._re), d(self._im), self._scale)

    def conj(self) -> "SparsePoly":
        return SparsePoly._raw(dict(self._re), {m: -c for m, c in self._im.items()}, self._scale)

    def real_part(self) -> "SparsePoly":
        return SparsePoly._raw(dict(self._re), {}, self._scale)

    def imag_part(self) -> "SparsePoly":
        return SparsePoly._raw(dict(self._im), {}, self._scale)

    def evaluate(self, x0: Scalar, y0: Scalar, s0: Scalar) -> GaussRational:
        """Exact value; terms are accumulated in descending graded-lex order."""
        point = [GaussRational.coerce(v) for v in (x0, y0, s0)]
        if all(p.im == 0 for p in point):
            xs, ys, ss = (p.re for p in point)
            powx, powy, pows = _powers(xs), _powers(ys), _powers(ss)
            acc_re = Fraction(0)
            acc_im = Fraction(0)
            for m in self._sorted_monos():
                ex, ey, es = _exps(m)
                v = powx(ex) * powy(ey) * pows(es)
                acc_re += self._re.get(m, 0) * v
                acc_im += self._im.get(m, 0) * v
            return GaussRational(acc_re / self._scale, acc_im / self._scale)
        powx, powy, pows = (_powers(p) for p in point)
        acc = GaussRational()
        for m in self._sorted_monos():
            ex, ey, es = _exps(m)
            acc = acc + self._coef(m) * powx(ex) * powy(ey) * pows(es)
        return acc

    def substitute(self, var: str, value: "SparsePoly") -> "SparsePoly":
        """Compose: replace ``var`` by the polynomial ``value``."""
        idx = VARIABLES.index(var)
        unit = _UNIT[var]
        powers: dict[int, SparsePoly] = {0: ONE}
        out = ZERO
        for mono, c in self.terms().items():
            e = mono[idx]
            if e not in powers:
                powers[e] = value**e
            rest = SparsePoly._raw({mono.pack() - e * unit: 1}, {}, 1)
            out = out + rest * powers[e] * SparsePoly.const(c)
        return out

    # -- display ------------------------------------------------------------

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts: list[str] = []
        for mono, c in self.terms().items():
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(VARIABLES, mono)
                if e
            ]
            neg = False
            if c.im == 0 and c.re < 0:
                neg, c = True, -c
            elif c.re == 0 and c.im < 0:
                neg, c = True, -c
            cs = format_gauss(c)
            if c.re != 0 and c.im != 0:
                cs = f"({cs})"
            if factors:
                body = "*".join(factors) if cs == "1" else "*".join([cs, *factors])
            else:
                body = cs
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"SparsePoly({self})"


def _powers(v):
    cache = [type(v)(1) if not isinstance(v, GaussRational) else GaussRational(1)]

    def pw(n: int):
        while len(cache) <= n:
            cache.append(cache[-1] * v)
        return cache[n]

    return pw


ZERO = SparsePoly._raw({}, {}, 1)
ONE = SparsePoly._raw({0: 1}, {}, 1)
X = SparsePoly.var("x")
Y = SparsePoly.var("y")
S = SparsePoly.var("s")
I = SparsePoly._raw({}, {0: 1}, 1)


def poly_binary(op: str, p: SparsePoly, q: SparsePoly) -> SparsePoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_diff(p: SparsePoly, var: str) -> SparsePoly:
    return p.diff(var)


def poly_conj(p: SparsePoly) -> SparsePoly:
    return p.conj()


def poly_eval(p: SparsePoly, x0: Rational, y0: Rational, s0: Rational) -> GaussRational:
    return p.evaluate(x0, y0, s0)


# ---------------------------------------------------------------------------
# Derivations acting on polynomials


Derivation = Callable[[SparsePoly], SparsePoly]


def derivation(var: str) -> Derivation:
    """Polynomial derivation for one of :data:`DIFF_VARIABLES`."""
    if var in ("x", "y", "s"):
        return lambda p: p.diff(var)
    if var == "t":
        # s = C - t
        return lambda p: -p.diff("s")
    if var in ("wirtinger_z", "wirtinger_zbar"):
        sign = -1 if var == "wirtinger_z" else 1
        half = GaussRational(Fraction(1, 2))
        ihalf = GaussRational(0, Fraction(sign, 2))
        return lambda p: p.diff("x").scale_by(half) + p.diff("y").scale_by(ihalf)
    raise ValueError(f"unknown differentiation variable {var!r}")


# ---------------------------------------------------------------------------
# Rational functions


def _normalize_base(p: SparsePoly) -> tuple[GaussRational, SparsePoly]:
    """Split ``p = unit * base`` with ``base`` an integer polynomial whose
    coefficients have gcd one and whose leading coefficient is a positive
    integer."""
    _, lc = p.leading_term()
    q = p.scale_by(lc.conj())
    g = math.gcd(*q._re.values(), *q._im.values())
    base = SparsePoly._raw(
        {m: c // g for m, c in q._re.items()}, {m: c // g for m, c in q._im.items()}, 1
    )
    unit = GaussRational(Fraction(g, q._scale)) / lc.conj()
    return unit, base


@dataclass(frozen=True)
class ZeroCertificate:
    """Outcome of an exact zero test on a rational function's numerator."""

    is_zero: bool
    terms: int
    degree: int

    def __bool__(self) -> bool:
        return self.is_zero


class RationalFn:
    """Quotient ``num / prod(base**k)`` with normalized, non-constant bases.

    Bases are compared by their canonical term maps, so a base reached along
    different computation paths is still recognised as the same factor.
    Common factors between numerator and denominator are never cancelled.
    """

    __slots__ = ("num", "factors", "_den")

    def __init__(self, num: SparsePoly | Scalar, den: SparsePoly | Scalar | None = None):
        if not isinstance(num, SparsePoly):
            num = SparsePoly.const(num)
        if den is None:
            self._init(num, ())
            return
        if not isinstance(den, SparsePoly):
            den = SparsePoly.const(den)
        if den.is_zero():
            raise DivisionByZeroFunction("denominator is the zero polynomial")
        if den.is_constant():
            self._init(num.scale_by(GaussRational(1) / den._coef(0)), ())
            return
        unit, base = _normalize_base(den)
        self._init(num.scale_by(GaussRational(1) / unit), ((base, 1),))

    def _init(self, num: SparsePoly, factors: tuple[tuple[SparsePoly, int], ...]) -> None:
        self.num = num
        self.factors = tuple(sorted(factors, key=lambda f: f[0].sort_key()))
        self._den: SparsePoly | None = None

    @classmethod
    def _make(cls, num: SparsePoly, factors: Mapping[SparsePoly, int]) -> "RationalFn":
        f = cls.__new__(cls)
        f._init(num, tuple((b, k) for b, k in factors.items() if k > 0))
        return f

    @classmethod
    def from_factors(
        cls, num: SparsePoly, factors: Iterable[tuple[SparsePoly, int]]
    ) -> "RationalFn":
        """Build ``num / prod(p**k)``; each ``p`` is normalized into a base."""
        merged: dict[SparsePoly, int] = {}
        for p, k in factors:
            if p.is_zero():
                raise DivisionByZeroFunction("zero denominator factor")
            if k == 0:
                continue
            if p.is_constant():
                num = num.scale_by(GaussRational(1) / p._coef(0) ** k)
                continue
            unit, base = _normalize_base(p)
            num = num.scale_by(GaussRational(1) / unit**k)
            merged[base] = merged.get(base, 0) + k
        return cls._make(num, merged)

    def __reduce__(self):
        return (RationalFn._make, (self.num, dict(self.factors)))

    # -- inspection ---------------------------------------------------------

    @property
    def den(self) -> SparsePoly:
        if self._den is None:
            d = ONE
            for b, k in self.factors:
                d = d * b**k
            self._den = d
        return self._den

    def factor_map(self) -> dict[SparsePoly, int]:
        return dict(self.factors)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.factors

    def evaluate(self, x0: Scalar, y0: Scalar, s0: Scalar) -> GaussRational:
        d = GaussRational(1)
        for b, k in self.factors:
            d = d * b.evaluate(x0, y0, s0) ** k
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(x0, y0, s0) / d

    def __str__(self) -> str:
        if not self.factors:
            return str(self.num)
        den = " * ".join(f"({b})" if k == 1 else f"({b})^{k}" for b, k in self.factors)
        if len(self.factors) > 1:
            den = f"({den})"
        return f"({self.num})/{den}"

    def __repr__(self) -> str:
        return f"RationalFn({self})"

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other: object) -> "RationalFn":
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, (SparsePoly, int, Fraction, GaussRational, complex)):
            return RationalFn(other)
        return NotImplemented  # type: ignore[return-value]

    def _lift(self, target: Mapping[SparsePoly, int], cache: dict) -> SparsePoly:
        num = self.num
        own = dict(self.factors)
        for b, k in target.items():
            e = k - own.get(b, 0)
            if e:
                key = (b, e)
                if key not in cache:
                    cache[key] = b**e
                num = num * cache[key]
        return num

    def _addsub(self, other: "RationalFn", sign: int) -> "RationalFn":
        target = dict(self.factors)
        for b, k in other.factors:
            target[b] = max(target.get(b, 0), k)
        cache: dict = {}
        a = self._lift(target, cache)
        c = other._lift(target, cache)
        return RationalFn._make(a + c if sign > 0 else a - c, target)

    def __add__(self, other: object) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._addsub(o, 1)

    __radd__ = __add__

    def __sub__(self, other: object) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._addsub(o, -1)

    def __rsub__(self, other: object) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o._addsub(self, -1)

    def __neg__(self) -> "RationalFn":
        return RationalFn._make(-self.num, dict(self.factors))

    def __mul__(self, other: object) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        target = dict(self.factors)
        for b, k in o.factors:
            target[b] = target.get(b, 0) + k
        return RationalFn._make(self.num * o.num, target)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            raise DivisionByZeroFunction("division by the zero rational function")
        num = self.num
        for b, k in o.factors:
            num = num * b**k
        return RationalFn.from_factors(num, [*self.factors, (o.num, 1)])

    def __rtruediv__(self, other: object) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "RationalFn":
        if n < 0:
            return RationalFn(1) / self**-n
        return RationalFn._make(self.num**n, {b: k * n for b, k in self.factors})

    def scale_by(self, c: Scalar) -> "RationalFn":
        return RationalFn._make(self.num.scale_by(c), dict(self.factors))

    def conj(self) -> "RationalFn":
        # conjugating a normalized base keeps its leading coefficient positive
        return RationalFn._make(self.num.conj(), {b.conj(): k for b, k in self.factors})

    def apply_derivation(self, d: Derivation) -> "RationalFn":
        """Quotient rule for ``num / prod(b_i**k_i)``.

        Only bases with a nonzero derivative gain one power:
        ``(N/B)' = (N' * P - N * sum_i k_i b_i' P/b_i) / (B * P)`` where ``P``
        is the product of those bases.
        """
        active = []
        for b, k in self.factors:
            db = d(b)
            if not db.is_zero():
                active.append((b, k, db))
        dn = d(self.num)
        if not active:
            return RationalFn._make(dn, dict(self.factors))
        prod = ONE
        for b, _, _ in active:
            prod = prod * b
        num = dn * prod
        for i, (b, k, db) in enumerate(active):
            others = ONE
            for j, (bj, _, _) in enumerate(active):
                if j != i:
                    others = others * bj
            num = num - self.num * db * others * k
        target = dict(self.factors)
        for b, _, _ in active:
            target[b] += 1
        return RationalFn._make(num, target)

    def diff(self, var: str) -> "RationalFn":
        return self.apply_derivation(derivation(var))

    def equals(self, other: object) -> bool:
        return rf_is_zero(self - self._coerce(other)).is_zero

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return rf_is_zero(self - o).is_zero

    __hash__ = None  # type: ignore[assignment]


def rf_binary(op: str, f: RationalFn, g: RationalFn) -> RationalFn:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown rational-function operation {op!r}")


def rf_diff(f: RationalFn, var: str) -> RationalFn:
    return f.diff(var)


def rf_is_zero(f: RationalFn) -> ZeroCertificate:
    return ZeroCertificate(f.num.is_zero(), len(f.num), f.num.total_degree)
