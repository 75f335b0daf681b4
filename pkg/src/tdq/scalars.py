"""Exact field scalars with two interchangeable backends.

The ``rational`` backend wraps :class:`fractions.Fraction`.  The ``ratfunc``
backend wraps elements of a rational-function field over the rationals in a
chosen tuple of indeterminates (by default ``q, a, b``), represented by
sympy's sparse polynomial fraction fields.  Both backends keep every value in
a canonical form, so two scalars are equal as field elements exactly when
their representations compare equal.

Scalars are immutable and all operations are pure, so values may be shared
freely between threads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

from sympy import QQ, factor_list, symbols
from sympy.polys.fields import field as _sympy_frac_field

__all__ = [
    "Scalar",
    "RationalField",
    "RatFuncField",
    "rational_field",
    "ratfunc_field",
    "get_field",
]


class Scalar:
    """An immutable element of an exact field.

    Arithmetic is defined between scalars of the same field; plain ``int``
    and :class:`~fractions.Fraction` operands are coerced.  Division by zero
    and inversion of zero raise :class:`ZeroDivisionError`.
    """

    __slots__ = ("field", "raw")

    def __init__(self, field, raw):
        self.field = field
        self.raw = raw

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise ValueError(
                    "cannot mix scalars from different backends: "
                    f"{self.field!r} vs {other.field!r}"
                )
            return other.raw
        if isinstance(other, int):
            return self.field.from_int(other).raw
        if isinstance(other, Fraction):
            return self.field.from_fraction(other).raw
        return None

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        raw = self._coerce(other)
        if raw is None:
            return NotImplemented
        return Scalar(self.field, self.raw + raw)

    __radd__ = __add__

    def __sub__(self, other):
        raw = self._coerce(other)
        if raw is None:
            return NotImplemented
        return Scalar(self.field, self.raw - raw)

    def __rsub__(self, other):
        raw = self._coerce(other)
        if raw is None:
            return NotImplemented
        return Scalar(self.field, raw - self.raw)

    def __mul__(self, other):
        raw = self._coerce(other)
        if raw is None:
            return NotImplemented
        return Scalar(self.field, self.raw * raw)

    __rmul__ = __mul__

    def __truediv__(self, other):
        raw = self._coerce(other)
        if raw is None:
            return NotImplemented
        if not raw:
            raise ZeroDivisionError("scalar division by zero")
        return Scalar(self.field, self.raw / raw)

    def __rtruediv__(self, other):
        raw = self._coerce(other)
        if raw is None:
            return NotImplemented
        if not self.raw:
            raise ZeroDivisionError("scalar division by zero")
        return Scalar(self.field, raw / self.raw)

    def __neg__(self):
        return Scalar(self.field, -self.raw)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0 and not self.raw:
            raise ZeroDivisionError("zero cannot be raised to a negative power")
        return Scalar(self.field, self.raw ** exponent)

    def inv(self) -> "Scalar":
        """Multiplicative inverse; raises ZeroDivisionError for zero."""
        return self ** -1

    # -- predicates and protocol methods -----------------------------------

    def is_zero(self) -> bool:
        return not self.raw

    def __bool__(self):
        return bool(self.raw)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.field == other.field and self.raw == other.raw

    def __hash__(self):
        return hash((self.field, self.raw))

    def render(self) -> str:
        """Canonical text form; parses back to an equal scalar."""
        return self.field.render(self.raw)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Scalar({self.render()!r})"


class RationalField:
    """The field of arbitrary-precision rationals."""

    backend = "rational"
    variables: tuple[str, ...] = ()

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rational")

    def __repr__(self):
        return "RationalField()"

    # -- construction -------------------------------------------------------

    def from_int(self, value: int) -> Scalar:
        return Scalar(self, Fraction(value))

    def from_fraction(self, value: Fraction) -> Scalar:
        return Scalar(self, value)

    def coerce(self, value) -> Scalar:
        if isinstance(value, Scalar):
            if value.field != self:
                raise ValueError("scalar belongs to a different backend")
            return value
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            return self.from_fraction(value)
        if isinstance(value, str):
            from .parser import parse_scalar

            return parse_scalar(value, self)
        raise TypeError(f"cannot coerce {value!r} to a rational scalar")

    @property
    def zero(self) -> Scalar:
        return Scalar(self, Fraction(0))

    @property
    def one(self) -> Scalar:
        return Scalar(self, Fraction(1))

    def generator(self, name: str) -> Scalar:
        raise ValueError(f"identifier {name!r} is not allowed in the rational backend")

    # -- rendering ----------------------------------------------------------

    def render(self, raw: Fraction) -> str:
        return str(raw)

    # -- root extraction ----------------------------------------------------

    def sqrt(self, value: Scalar) -> Optional[Scalar]:
        """Exact square root, or None when the value is not a square."""
        raw = value.raw
        if raw < 0:
            return None
        num, den = raw.numerator, raw.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn != num or rd * rd != den:
            return None
        return Scalar(self, Fraction(rn, rd))

    def poly_roots(self, coeffs: Sequence[Scalar]) -> tuple[tuple[Scalar, ...], bool]:
        """Roots in the field of sum(coeffs[i] x^i), with multiplicity.

        Returns (roots, splits) where splits is True when the polynomial
        factors completely into linear factors over the field.
        """
        lam = symbols("_lam")
        expr = sum((c.raw * lam ** i for i, c in enumerate(coeffs)), 0 * lam)
        return _roots_from_factorization(expr, lam, self)


class RatFuncField:
    """A field of rational functions over Q in named indeterminates."""

    backend = "ratfunc"

    def __init__(self, variables: Sequence[str] = ("q", "a", "b")):
        variables = tuple(variables)
        if not variables:
            raise ValueError("ratfunc backend needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        self.variables = variables
        self._field, *gens = _sympy_frac_field(",".join(variables), QQ)
        self._ring = self._field.ring
        self._gens = dict(zip(variables, gens))

    def __eq__(self, other):
        return isinstance(other, RatFuncField) and self.variables == other.variables

    def __hash__(self):
        return hash(("ratfunc", self.variables))

    def __repr__(self):
        return f"RatFuncField(variables={self.variables!r})"

    # -- construction -------------------------------------------------------

    def from_int(self, value: int) -> Scalar:
        return Scalar(self, self._field.ground_new(QQ(value)))

    def from_fraction(self, value: Fraction) -> Scalar:
        return Scalar(self, self._field.ground_new(QQ(value.numerator, value.denominator)))

    def coerce(self, value) -> Scalar:
        if isinstance(value, Scalar):
            if value.field != self:
                raise ValueError("scalar belongs to a different backend")
            return value
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            return self.from_fraction(value)
        if isinstance(value, str):
            from .parser import parse_scalar

            return parse_scalar(value, self)
        raise TypeError(f"cannot coerce {value!r} to a ratfunc scalar")

    @property
    def zero(self) -> Scalar:
        return Scalar(self, self._field.zero)

    @property
    def one(self) -> Scalar:
        return Scalar(self, self._field.one)

    def generator(self, name: str) -> Scalar:
        try:
            return Scalar(self, self._gens[name])
        except KeyError:
            raise ValueError(f"unknown identifier {name!r}") from None

    # -- rendering ----------------------------------------------------------

    def render(self, raw) -> str:
        num, den = raw.numer, raw.denom
        if not num:
            return "0"
        den_terms = _poly_terms(den)
        if len(den_terms) == 1 and den_terms[0][0] == _ZERO_MONOMIAL(len(self.variables)):
            # constant denominator: fold it into the coefficients
            const = den_terms[0][1]
            terms = [(mon, coeff / const) for mon, coeff in _poly_terms(num)]
            return _render_terms(terms, self.variables)
        num_terms, den_terms = _normalize_fraction(_poly_terms(num), den_terms)
        return "({})/({})".format(
            _render_terms(num_terms, self.variables),
            _render_terms(den_terms, self.variables),
        )

    # -- specialization -----------------------------------------------------

    def specialize(self, value: Scalar, assignment: dict) -> Scalar:
        """Evaluate at rational values of the indeterminates.

        ``assignment`` maps variable names to rational-backend scalars (or
        ints/Fractions).  Raises ZeroDivisionError when the denominator
        vanishes at the given point.
        """
        target = rational_field()
        pairs = []
        for i, name in enumerate(self.variables):
            if name not in assignment:
                raise ValueError(f"no value supplied for {name!r}")
            val = assignment[name]
            if isinstance(val, Scalar):
                val = val.raw
            pairs.append((self._ring.gens[i], QQ(Fraction(val))))
        num = value.raw.numer.evaluate(pairs)
        den = value.raw.denom.evaluate(pairs)
        if not den:
            raise ZeroDivisionError("denominator vanishes at the specialization point")
        result = Fraction(int(num.numerator), int(num.denominator)) / Fraction(
            int(den.numerator), int(den.denominator)
        )
        return target.from_fraction(result)

    # -- root extraction ----------------------------------------------------

    def sqrt(self, value: Scalar) -> Optional[Scalar]:
        """Exact square root in the field, or None."""
        raw = value.raw
        if not raw:
            return self.zero
        num, den = raw.numer, raw.denom
        # num/den = (num*den)/den^2, so it suffices to take a square root
        # of the polynomial num*den.
        prod = (num * den).as_expr()
        coeff, factors = factor_list(prod)
        root_coeff = _fraction_sqrt(Fraction(coeff.p, coeff.q))
        if root_coeff is None:
            return None
        root_expr = root_coeff
        for base, exp in factors:
            if exp % 2:
                return None
            root_expr *= base ** (exp // 2)
        try:
            candidate_num = self._field.from_expr(root_expr)
        except ValueError:
            return None
        candidate = Scalar(self, candidate_num / self._field.new(den, self._ring.one))
        if candidate * candidate == value:
            return candidate
        if candidate * candidate == -value:
            return None
        return None

    def poly_roots(self, coeffs: Sequence[Scalar]) -> tuple[tuple[Scalar, ...], bool]:
        """Roots in the field of sum(coeffs[i] x^i), with multiplicity."""
        lam = symbols("_lam")
        denom = self._ring.one
        for c in coeffs:
            denom = denom * c.raw.denom
        expr = 0 * lam
        for i, c in enumerate(coeffs):
            cleared = c.raw.numer * denom.quo((c.raw.denom))
            expr += cleared.as_expr() * lam ** i
        return _roots_from_factorization(expr, lam, self)


_RATIONAL = RationalField()
_RATFUNC_CACHE: dict[tuple[str, ...], RatFuncField] = {}


def rational_field() -> RationalField:
    return _RATIONAL


def ratfunc_field(variables: Sequence[str] = ("q", "a", "b")) -> RatFuncField:
    key = tuple(variables)
    if key not in _RATFUNC_CACHE:
        _RATFUNC_CACHE[key] = RatFuncField(key)
    return _RATFUNC_CACHE[key]


def get_field(backend: str, variables: Optional[Sequence[str]] = None):
    """Look up a field by backend tag, as used in fixture files."""
    if backend == "rational":
        return rational_field()
    if backend == "ratfunc":
        return ratfunc_field(tuple(variables) if variables else ("q", "a", "b"))
    raise ValueError(f"unknown backend {backend!r}")


# -- rendering helpers -------------------------------------------------------


def _ZERO_MONOMIAL(nvars: int) -> tuple[int, ...]:
    return (0,) * nvars


def _poly_terms(poly) -> list[tuple[tuple[int, ...], Fraction]]:
    """Terms of a sympy PolyElement as (exponent tuple, Fraction coefficient),
    sorted in descending graded-lexicographic order (first variable most
    significant)."""
    terms = [
        (tuple(int(e) for e in mon), Fraction(int(c.numerator), int(c.denominator)))
        for mon, c in poly.terms()
    ]
    terms.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
    return terms


def _normalize_fraction(num_terms, den_terms):
    """Rescale so both parts have coprime integer coefficients and the
    denominator's leading coefficient is positive."""
    denominators = [c.denominator for _, c in num_terms] + [c.denominator for _, c in den_terms]
    numerators = [c.numerator for _, c in num_terms] + [c.numerator for _, c in den_terms]
    scale = Fraction(math.lcm(*denominators), math.gcd(*numerators))
    if den_terms[0][1] * scale < 0:
        scale = -scale
    num_terms = [(m, c * scale) for m, c in num_terms]
    den_terms = [(m, c * scale) for m, c in den_terms]
    return num_terms, den_terms


def _render_terms(terms, variables) -> str:
    if not terms:
        return "0"
    parts: list[str] = []
    for mon, coeff in terms:
        factors = []
        for name, exp in zip(variables, mon):
            if exp == 1:
                factors.append(name)
            elif exp:
                factors.append(f"{name}^{exp}")
        body = "*".join(factors)
        mag = abs(coeff)
        if not body:
            piece = str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{mag}*{body}"
        if not parts:
            parts.append(piece if coeff > 0 else f"-{piece}")
        else:
            parts.append(f" + {piece}" if coeff > 0 else f" - {piece}")
    return "".join(parts)


# -- factorization helpers ----------------------------------------------------


def _fraction_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    rn, rd = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if rn * rn != value.numerator or rd * rd != value.denominator:
        return None
    return Fraction(rn, rd)


def _roots_from_factorization(expr, lam, target_field):
    """Shared root extraction: factor over Q, keep factors linear in lam."""
    from sympy import Poly

    total = Poly(expr, lam).degree()
    _, factors = factor_list(expr, lam)
    roots: list[Scalar] = []
    linear_degree = 0
    for base, exp in factors:
        fpoly = Poly(base, lam)
        if fpoly.degree() == 1:
            c1, c0 = fpoly.all_coeffs()
            root_expr = -c0 / c1
            roots.extend([_expr_to_scalar(root_expr, target_field)] * exp)
            linear_degree += exp
        elif fpoly.degree() == 0:
            continue
    return tuple(roots), linear_degree == total


def _expr_to_scalar(expr, target_field) -> Scalar:
    if isinstance(target_field, RationalField):
        from sympy import Rational

        r = Rational(expr)
        return target_field.from_fraction(Fraction(r.p, r.q))
    return Scalar(target_field, target_field._field.from_expr(expr))
