"""Arithmetic in prime fields F_q.

A :class:`FieldSpec` pins down the modulus once and hands out element-level
operations on canonical residues (plain ints in ``[0, q)``).  :class:`Fq`
wraps a single residue with operator overloading for code that prefers typed
values over raw ints; the matrix layer works on raw ints for speed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractError, FieldMismatchError

MAX_MODULUS = 2**31  # residues and single products must fit comfortably in int64

# Deterministic Miller-Rabin witnesses: valid for every n < 3_215_031_751,
# which covers the full supported modulus range.
_MR_WITNESSES = (2, 3, 5, 7)


def is_prime(n: int) -> bool:
    """Deterministic primality test for the supported modulus range."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def smallest_prime_above(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    candidate = max(n + 1, 2)
    while not is_prime(candidate):
        candidate += 1
    return candidate


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_q, with element operations on canonical residues.

    Raises:
        ContractError: if ``q`` is not a prime in ``[2, 2**31)``.
    """

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or not 2 <= self.q < MAX_MODULUS:
            raise ContractError(f"modulus must be an integer in [2, 2**31), got {self.q!r}")
        if not is_prime(self.q):
            raise ContractError(f"modulus must be prime, got {self.q}")

    def reduce(self, value: int) -> int:
        """Canonical residue of ``value`` in ``[0, q)``."""
        return value % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse by the extended Euclidean algorithm.

        Raises:
            ZeroDivisionError: if ``a`` is zero mod q.
        """
        a %= self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.q}")
        # Invariant: t*a == r (mod q) on the (r, t) track.
        r, new_r = self.q, a
        t, new_t = 0, 1
        while new_r != 0:
            quotient = r // new_r
            r, new_r = new_r, r - quotient * new_r
            t, new_t = new_t, t - quotient * new_t
        return t % self.q

    def element(self, value: int) -> Fq:
        return Fq(self.reduce(value), self)

    def zero(self) -> Fq:
        return Fq(0, self)

    def one(self) -> Fq:
        return Fq(1, self)


@dataclass(frozen=True)
class Fq:
    """A single element of F_q with operator overloading."""

    value: int
    spec: FieldSpec

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.spec.q:
            object.__setattr__(self, "value", self.value % self.spec.q)

    def _coerce(self, other: Fq | int) -> int:
        if isinstance(other, Fq):
            if other.spec != self.spec:
                raise FieldMismatchError(
                    f"cannot combine F_{self.spec.q} and F_{other.spec.q} elements"
                )
            return other.value
        if isinstance(other, int):
            return other % self.spec.q
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Fq | int) -> Fq:
        return Fq(self.spec.add(self.value, self._coerce(other)), self.spec)

    __radd__ = __add__

    def __sub__(self, other: Fq | int) -> Fq:
        return Fq(self.spec.sub(self.value, self._coerce(other)), self.spec)

    def __rsub__(self, other: Fq | int) -> Fq:
        return Fq(self.spec.sub(self._coerce(other), self.value), self.spec)

    def __mul__(self, other: Fq | int) -> Fq:
        return Fq(self.spec.mul(self.value, self._coerce(other)), self.spec)

    __rmul__ = __mul__

    def __neg__(self) -> Fq:
        return Fq(self.spec.neg(self.value), self.spec)

    def inv(self) -> Fq:
        return Fq(self.spec.inv(self.value), self.spec)

    def __truediv__(self, other: Fq | int) -> Fq:
        return Fq(self.spec.mul(self.value, self.spec.inv(self._coerce(other))), self.spec)

    def __repr__(self) -> str:
        return f"Fq({self.value} mod {self.spec.q})"
