"""Exact arithmetic in truncated monoid rings.

Elements live in (A[Q]/I)[L] where A = Q(zeta_N) is a cyclotomic extension
of the rationals, Q = N^r is a free monoid with a positive grading h, L is a
lattice of Laurent exponents, and I is a monomial truncation ideal containing
every monomial of h-order > k.  Everything is exact: coefficients are tuples
of Fractions reduced modulo the N-th cyclotomic polynomial, exponents are
integer tuples.

The zero ideal radical I0 = <e_1, ..., e_r> gives the nilpotent filtration
used for unit inversion (geometric series) and a-th roots (binomial series).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Optional, Tuple

Vec = Tuple[int, ...]


class ContextMismatch(ValueError):
    """Raised when combining elements from different rings."""


class NotAUnit(ValueError):
    """Raised by invert_unit / power on non-invertible elements."""


class NotOnePlusNilpotent(ValueError):
    """Raised by nth_root when the argument is not in 1 + I0."""


# ---------------------------------------------------------------------------
# cyclotomic ground field Q(zeta_N)
# ---------------------------------------------------------------------------

def _poly_mul(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _poly_divexact(num: Tuple[int, ...], den: Tuple[int, ...]) -> Tuple[int, ...]:
    # exact division of integer polynomials, low-to-high coefficients
    num_l = list(num)
    dd = len(den) - 1
    lead = den[-1]
    q = [0] * (len(num) - dd)
    for i in range(len(q) - 1, -1, -1):
        c = num_l[i + dd]
        if c % lead:
            raise ArithmeticError("inexact polynomial division")
        c //= lead
        q[i] = c
        if c:
            for j, y in enumerate(den):
                num_l[i + j] -= c * y
    if any(num_l[: dd]):
        raise ArithmeticError("inexact polynomial division")
    return tuple(q)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> Tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    poly: Tuple[int, ...] = tuple([-1] + [0] * (n - 1) + [1])  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return poly


@lru_cache(maxsize=None)
def _phi_degree(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


class Cyclo:
    """An element of Q(zeta_N), stored modulo the N-th cyclotomic polynomial.

    For N = 1 this is a plain rational.  Coefficients are Fractions in lowest
    terms, so equality is canonical.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Fraction]):
        self.order = order
        cs = tuple(Fraction(c) for c in coeffs)
        deg = _phi_degree(order)
        if len(cs) != deg:
            raise ValueError(f"need {deg} coordinates for order {order}")
        self.coeffs = cs

    # -- constructors -----------------------------------------------------
    @staticmethod
    def rational(value, order: int = 1) -> "Cyclo":
        deg = _phi_degree(order)
        return Cyclo(order, (Fraction(value),) + (Fraction(0),) * (deg - 1))

    @staticmethod
    def zero(order: int = 1) -> "Cyclo":
        return Cyclo.rational(0, order)

    @staticmethod
    def one(order: int = 1) -> "Cyclo":
        return Cyclo.rational(1, order)

    @staticmethod
    def zeta(order: int) -> "Cyclo":
        """The chosen primitive order-th root of unity."""
        deg = _phi_degree(order)
        if deg == 1:
            # zeta_1 = 1, zeta_2 = -1
            return Cyclo.rational(1 if order == 1 else -1, order)
        coeffs = [Fraction(0)] * deg
        coeffs[1] = Fraction(1)
        return Cyclo(order, coeffs)

    # -- reduction helpers --------------------------------------------------
    @staticmethod
    def _reduce(order: int, coeffs: list) -> "Cyclo":
        phi = cyclotomic_polynomial(order)
        deg = len(phi) - 1
        # reduce modulo the monic polynomial phi
        for i in range(len(coeffs) - 1, deg - 1, -1):
            c = coeffs[i]
            if c:
                for j in range(deg + 1):
                    coeffs[i - deg + j] -= c * phi[j]
        return Cyclo(order, coeffs[:deg] + [Fraction(0)] * (deg - len(coeffs)))

    def _match(self, other: "Cyclo") -> None:
        if self.order != other.order:
            raise ContextMismatch(
                f"cyclotomic orders differ: {self.order} vs {other.order}")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "Cyclo") -> "Cyclo":
        self._match(other)
        return Cyclo(self.order,
                     tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Cyclo") -> "Cyclo":
        self._match(other)
        return Cyclo(self.order,
                     tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Cyclo":
        return Cyclo(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other: "Cyclo") -> "Cyclo":
        self._match(other)
        prod = [Fraction(0)] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return Cyclo._reduce(self.order, prod)

    def scale(self, r) -> "Cyclo":
        r = Fraction(r)
        return Cyclo(self.order, tuple(a * r for a in self.coeffs))

    def inverse(self) -> "Cyclo":
        """Multiplicative inverse via the extended Euclidean algorithm."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if _phi_degree(self.order) == 1:
            return Cyclo(self.order, (Fraction(1) / self.coeffs[0],))
        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        # extended gcd of self (as poly) and phi over Q[x]
        r0, r1 = phi, list(self.coeffs)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        t_unused = None  # we only need the cofactor of self

        def strip(p):
            while p and not p[-1]:
                p.pop()
            return p

        r0, r1 = strip(r0), strip(r1)
        while len(r1) > 1 or (r1 and r1[0]):
            if not r1:
                raise ZeroDivisionError("not invertible")
            q = [Fraction(0)] * (len(r0) - len(r1) + 1) if len(r0) >= len(r1) else []
            rr = list(r0)
            if len(r0) >= len(r1):
                for i in range(len(q) - 1, -1, -1):
                    c = rr[i + len(r1) - 1] / r1[-1]
                    q[i] = c
                    if c:
                        for j, y in enumerate(r1):
                            rr[i + j] -= c * y
            rr = strip(rr)
            new_s = list(s0)
            # new_s = s0 - q*s1
            qs = [Fraction(0)] * (len(q) + len(s1) - 1) if q and s1 else []
            for i, x in enumerate(q):
                if x:
                    for j, y in enumerate(s1):
                        qs[i + j] += x * y
            ln = max(len(new_s), len(qs))
            new_s += [Fraction(0)] * (ln - len(new_s))
            for i in range(len(qs)):
                new_s[i] -= qs[i]
            r0, r1 = r1, rr
            s0, s1 = s1, strip(new_s)
            if len(r1) == 1 and r1[0]:
                break
        if not r1:
            raise ZeroDivisionError("not invertible")
        c = r1[0]
        inv = [x / c for x in s1]
        return Cyclo._reduce(self.order, inv)

    def __pow__(self, e: int) -> "Cyclo":
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyclo.one(self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- predicates / conversions --------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational value")
        return self.coeffs[0]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cyclo) and self.order == other.order
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        return f"Cyclo({self.order}, {self.render()})"

    def render(self) -> str:
        if self.is_rational():
            return str(self.coeffs[0])
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"


# ---------------------------------------------------------------------------
# exponents and truncation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Exponent:
    """A monomial exponent: lattice (Laurent) part and monoid part."""

    lam: Vec
    q: Vec

    def __add__(self, other: "Exponent") -> "Exponent":
        return Exponent(tuple(a + b for a, b in zip(self.lam, other.lam)),
                        tuple(a + b for a, b in zip(self.q, other.q)))

    def __neg__(self) -> "Exponent":
        return Exponent(tuple(-a for a in self.lam), tuple(-a for a in self.q))

    def __sub__(self, other: "Exponent") -> "Exponent":
        return self + (-other)

    def scale(self, n: int) -> "Exponent":
        return Exponent(tuple(n * a for a in self.lam), tuple(n * a for a in self.q))

    def sort_key(self):
        return (self.q, self.lam)


@dataclass(frozen=True)
class TruncationSpec:
    """Monomial truncation data for A[Q]/I with Q = N^q_rank.

    h(q) = sum(weights[i] * q[i]) is the grading; monomials with h > order are
    dropped.  extra_generators optionally kills everything >= some generator
    componentwise, refining the default h-adic ideal.  Both choices contain
    I0^(order+1), so I0 is nilpotent in the quotient.
    """

    q_rank: int
    weights: Vec
    order: int
    extra_generators: Tuple[Vec, ...] = ()

    def __post_init__(self):
        if len(self.weights) != self.q_rank:
            raise ValueError("weights length must equal q_rank")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be strictly positive")
        if self.order < 0:
            raise ValueError("order must be >= 0")

    def h(self, q: Vec) -> int:
        return sum(w * a for w, a in zip(self.weights, q))

    def in_ideal(self, q: Vec) -> bool:
        if self.h(q) > self.order:
            return True
        for g in self.extra_generators:
            if all(a >= b for a, b in zip(q, g)):
                return True
        return False

    def zero_q(self) -> Vec:
        return (0,) * self.q_rank

    def at_order(self, k: int) -> "TruncationSpec":
        return TruncationSpec(self.q_rank, self.weights, k, self.extra_generators)


# ---------------------------------------------------------------------------
# truncated elements
# ---------------------------------------------------------------------------

class Element:
    """A finite sum of coefficient * z^exponent, reduced modulo the truncation.

    Immutable after construction.  Binary operations require matching
    truncation spec and context tag (the chart or chamber the Laurent part
    lives in).
    """

    __slots__ = ("spec", "context", "coeff_order", "terms")

    def __init__(self, spec: TruncationSpec, context: str,
                 terms: Dict[Exponent, Cyclo], coeff_order: int = 1):
        self.spec = spec
        self.context = context
        self.coeff_order = coeff_order
        clean: Dict[Exponent, Cyclo] = {}
        for e, c in terms.items():
            if c.is_zero() or spec.in_ideal(e.q):
                continue
            if c.order != coeff_order:
                raise ContextMismatch("coefficient field order mismatch")
            clean[e] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @staticmethod
    def zero(spec: TruncationSpec, context: str, coeff_order: int = 1) -> "Element":
        return Element(spec, context, {}, coeff_order)

    @staticmethod
    def monomial(spec: TruncationSpec, context: str, exponent: Exponent,
                 coeff=1, coeff_order: int = 1) -> "Element":
        c = coeff if isinstance(coeff, Cyclo) else Cyclo.rational(coeff, coeff_order)
        return Element(spec, context, {exponent: c}, coeff_order)

    @staticmethod
    def one(spec: TruncationSpec, context: str, lam_rank: int,
            coeff_order: int = 1) -> "Element":
        e = Exponent((0,) * lam_rank, spec.zero_q())
        return Element.monomial(spec, context, e, 1, coeff_order)

    # -- helpers --------------------------------------------------------------
    def _match(self, other: "Element") -> None:
        if self.spec != other.spec:
            raise ContextMismatch("truncation specs differ")
        if self.context != other.context:
            raise ContextMismatch(
                f"contexts differ: {self.context!r} vs {other.context!r}")
        if self.coeff_order != other.coeff_order:
            raise ContextMismatch("coefficient fields differ")

    def lam_rank(self) -> int:
        for e in self.terms:
            return len(e.lam)
        return -1  # unknown for the zero element

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[Tuple[Exponent, Cyclo]]:
        return iter(sorted(self.terms.items(), key=lambda t: t[0].sort_key()))

    def coefficient(self, exponent: Exponent) -> Cyclo:
        return self.terms.get(exponent, Cyclo.zero(self.coeff_order))

    def with_context(self, context: str) -> "Element":
        return Element(self.spec, context, self.terms, self.coeff_order)

    def reduce_to_order(self, k: int) -> "Element":
        return Element(self.spec.at_order(k), self.context, self.terms,
                       self.coeff_order)

    def min_order(self) -> Optional[int]:
        """Smallest h-order among the terms, None for the zero element."""
        if not self.terms:
            return None
        return min(self.spec.h(e.q) for e in self.terms)

    # -- ring operations -------------------------------------------------------
    def __add__(self, other: "Element") -> "Element":
        self._match(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return Element(self.spec, self.context, out, self.coeff_order)

    def __neg__(self) -> "Element":
        return Element(self.spec, self.context,
                       {e: -c for e, c in self.terms.items()}, self.coeff_order)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, other: "Element") -> "Element":
        self._match(other)
        out: Dict[Exponent, Cyclo] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if self.spec.in_ideal(e.q):
                    continue
                c = c1 * c2
                cur = out.get(e)
                out[e] = c if cur is None else cur + c
        return Element(self.spec, self.context, out, self.coeff_order)

    def scale(self, coeff) -> "Element":
        c0 = coeff if isinstance(coeff, Cyclo) else Cyclo.rational(coeff, self.coeff_order)
        return Element(self.spec, self.context,
                       {e: c * c0 for e, c in self.terms.items()}, self.coeff_order)

    def mul_monomial(self, exponent: Exponent, coeff=1) -> "Element":
        c0 = coeff if isinstance(coeff, Cyclo) else Cyclo.rational(coeff, self.coeff_order)
        out: Dict[Exponent, Cyclo] = {}
        for e, c in self.terms.items():
            out[e + exponent] = c * c0
        return Element(self.spec, self.context, out, self.coeff_order)

    # -- unit structure ---------------------------------------------------------
    def _split_unit(self) -> Tuple[Exponent, Cyclo, "Element"]:
        """Write self = c * z^m0 * (1 + g) with g = 0 mod I0; raise if not a unit."""
        zero_q = self.spec.zero_q()
        heads = [(e, c) for e, c in self.terms.items() if e.q == zero_q]
        if len(heads) != 1:
            raise NotAUnit("unit part is absent or non-monomial")
        m0, c = heads[0]
        for e in self.terms:
            if e is m0 or e == m0:
                continue
            if any(a < 0 for a in e.q):
                raise NotAUnit("negative monoid exponents outside the unit part")
        g = self.mul_monomial(-m0, c.inverse())
        one = Element.one(self.spec, self.context, len(m0.lam), self.coeff_order)
        return m0, c, g - one

    def is_unit(self) -> bool:
        try:
            self._split_unit()
            return True
        except NotAUnit:
            return False

    def invert_unit(self) -> "Element":
        """Inverse of c * z^m0 * (1+g) via the finite geometric series."""
        m0, c, g = self._split_unit()
        rank = len(m0.lam)
        one = Element.one(self.spec, self.context, rank, self.coeff_order)
        acc = one
        term = one
        step = g.min_order()
        if step is not None:
            bound = self.spec.order // step + 1
            for _ in range(bound):
                term = (-g) * term
                if term.is_zero():
                    break
                acc = acc + term
        return acc.mul_monomial(-m0, c.inverse())

    def power(self, e: int) -> "Element":
        if e == 0:
            rank = self.lam_rank()
            if rank < 0:
                raise NotAUnit("0^0 in a truncated ring")
            return Element.one(self.spec, self.context, rank, self.coeff_order)
        base = self if e > 0 else self.invert_unit()
        n = abs(e)
        out = None
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def nth_root(self, a: int) -> "Element":
        """The unique root g in 1 + I0 with g^a = self, for self in 1 + I0."""
        if a <= 0:
            raise ValueError("root index must be positive")
        m0, c, g = self._split_unit()
        if any(x != 0 for x in m0.lam) or c != Cyclo.one(self.coeff_order):
            raise NotOnePlusNilpotent("element is not in 1 + I0")
        if a == 1:
            return self
        rank = len(m0.lam)
        one = Element.one(self.spec, self.context, rank, self.coeff_order)
        acc = one
        term = one
        step = g.min_order()
        if step is not None:
            bound = self.spec.order // step + 1
            alpha = Fraction(1, a)
            for j in range(1, bound + 1):
                term = term * g
                if term.is_zero():
                    break
                # binomial(1/a, j)
                num = Fraction(1)
                for i in range(j):
                    num *= (alpha - i)
                num /= _factorial(j)
                acc = acc + term.scale(num)
        return acc

    # -- equality / rendering ---------------------------------------------------
    def __eq__(self, other) -> bool:
        return (isinstance(other, Element) and self.spec == other.spec
                and self.context == other.context and self.terms == other.terms)

    def __hash__(self):
        return hash((self.spec, self.context,
                     tuple(sorted(self.terms.items(),
                                  key=lambda t: t[0].sort_key()))))

    def render(self, lam_names: Optional[Tuple[str, ...]] = None,
               q_names: Optional[Tuple[str, ...]] = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items():
            factors = []
            cs = c.render()
            if q_names:
                for name, a in zip(q_names, e.q):
                    if a:
                        factors.append(name if a == 1 else f"{name}^{a}")
            else:
                if any(e.q):
                    factors.append("q" + str(list(e.q)))
            if lam_names:
                for name, a in zip(lam_names, e.lam):
                    if a:
                        factors.append(name if a == 1 else f"{name}^{a}")
            else:
                if any(e.lam):
                    factors.append("z" + str(list(e.lam)))
            if not factors:
                parts.append(cs)
            elif cs == "1":
                parts.append("*".join(factors))
            elif cs == "-1":
                parts.append("-" + "*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"<{self.render()} @{self.context}>"


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out
