"""Integer polynomials in one variable and cyclotomic recognition."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


def _strip(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = [int(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, stored low degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.leading == 1

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other):
        other = _poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-_poly(other))

    def __mul__(self, other):
        other = _poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = IntPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def divmod_monic(self, d: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        if not d.is_monic():
            raise ValueError("divisor must be monic")
        r = list(self.coeffs)
        dd = d.degree
        if len(r) - 1 < dd:
            return IntPolynomial(()), self
        q = [0] * (len(r) - dd)
        for k in range(len(r) - 1, dd - 1, -1):
            c = r[k]
            if c:
                q[k - dd] = c
                for i, b in enumerate(d.coeffs):
                    r[k - dd + i] -= c * b
        return IntPolynomial(tuple(q)), IntPolynomial(tuple(r[:dd]))

    def __floordiv__(self, d):
        q, r = self.divmod_monic(_poly(d))
        if r.coeffs:
            raise ValueError("division is not exact")
        return q

    def divides(self, other: "IntPolynomial") -> bool:
        return not other.divmod_monic(self)[1].coeffs

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPolynomial":
        g = self.content()
        if g == 0:
            return self
        if self.leading < 0:
            g = -g
        return IntPolynomial(tuple(c // g for c in self.coeffs))

    def squarefree_part(self) -> "IntPolynomial":
        """Product of the distinct irreducible factors (primitive, positive leading)."""
        if self.degree <= 0:
            return self.primitive()
        g = poly_gcd(self, self.derivative())
        return exact_quotient(self.primitive(), g)

    def is_squarefree(self) -> bool:
        return poly_gcd(self, self.derivative()).degree <= 0

    def roots(self) -> np.ndarray:
        """Complex roots, polished by a few Newton steps on the exact coefficients."""
        if self.degree <= 0:
            return np.zeros(0, dtype=complex)
        rts = np.roots([float(c) for c in reversed(self.coeffs)]).astype(complex)
        d = self.derivative()
        out = []
        for z in rts:
            for _ in range(3):
                fz, dz = self(complex(z)), d(complex(z))
                if dz == 0:
                    break
                step = fz / dz
                if not np.isfinite(step) or abs(step) > 1e-3 * max(1.0, abs(z)):
                    break
                z = z - step
            out.append(z)
        return np.array(out, dtype=complex)

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            body = str(abs(c)) if (not mono or abs(c) != 1) else ""
            body = body + ("*" if body and mono else "") + mono
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for s, b in parts[1:]:
            text += f" {s} {b}"
        return text

    def __str__(self):
        return self.format()

    def to_json(self) -> list:
        return [c if abs(c) < 2**53 else str(c) for c in self.coeffs]


def _poly(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial((x,))
    return IntPolynomial(tuple(x))


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over Q (positive leading coefficient)."""
    x = [Fraction(c) for c in a.coeffs]
    y = [Fraction(c) for c in b.coeffs]
    while y:
        # x mod y
        x = list(x)
        while len(x) >= len(y) and x:
            f = x[-1] / y[-1]
            shift = len(x) - len(y)
            for i, c in enumerate(y):
                x[shift + i] -= f * c
            while x and x[-1] == 0:
                x.pop()
        x, y = y, x
    if not x:
        return IntPolynomial(())
    den = math.lcm(*(c.denominator for c in x))
    return IntPolynomial(tuple(int(c * den) for c in x)).primitive()


def exact_quotient(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """a / b when b divides a over Z (b need not be monic)."""
    r = list(a.coeffs)
    db = b.degree
    q = [0] * max(0, len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c, rem = divmod(r[k], b.leading)
        if rem:
            raise ValueError("division is not exact")
        q[k - db] = c
        for i, bc in enumerate(b.coeffs):
            r[k - db + i] -= c * bc
    if any(r[:db]):
        raise ValueError("division is not exact")
    return IntPolynomial(tuple(q))


def totient(n: int) -> int:
    out, m, q = n, n, 2
    while q * q <= m:
        if m % q == 0:
            while m % q == 0:
                m //= q
            out -= out // q
        q += 1
    if m > 1:
        out -= out // m
    return out


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _compose_power(f: IntPolynomial, k: int) -> IntPolynomial:
    """f(t^k)."""
    out = [0] * (k * f.degree + 1)
    for i, c in enumerate(f.coeffs):
        out[i * k] = c
    return IntPolynomial(tuple(out))


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> IntPolynomial:
    """The d-th cyclotomic polynomial, via Phi_{mp}(t) = Phi_m(t^p) / Phi_m(t) on radicals."""
    if d < 1:
        raise ValueError("d must be positive")
    ps = _prime_factors(d)
    rad = math.prod(ps)
    f = IntPolynomial((-1, 1))
    for p in ps:
        f = _compose_power(f, p) // f
    return _compose_power(f, d // rad) if d != rad else f


@lru_cache(maxsize=None)
def cyclotomic_indices_up_to(degree: int) -> tuple[int, ...]:
    """Every d with totient(d) <= degree, ascending."""
    if degree < 1:
        return ()
    # totient(d) >= sqrt(d / 2), so d <= 2 * degree^2 suffices
    return tuple(d for d in range(1, 2 * degree * degree + 3) if totient(d) <= degree)


def cyclotomic_factorization(f: IntPolynomial) -> tuple[dict[int, int], IntPolynomial]:
    """Strip cyclotomic factors from a monic f.

    Returns ``({d: multiplicity}, rest)`` with f = prod Phi_d^mult * rest and
    rest free of cyclotomic factors.
    """
    if not f.is_monic():
        raise ValueError("expected a monic polynomial")
    mult: dict[int, int] = {}
    rest = f
    for d in cyclotomic_indices_up_to(f.degree):
        phi = cyclotomic(d)
        if phi.degree > rest.degree:
            continue
        while rest.degree >= phi.degree:
            q, r = rest.divmod_monic(phi)
            if r.coeffs:
                break
            rest = q
            mult[d] = mult.get(d, 0) + 1
        if rest.degree == 0:
            break
    return mult, rest


def product(polys: Sequence[IntPolynomial]) -> IntPolynomial:
    out = IntPolynomial((1,))
    for p in polys:
        out = out * p
    return out
