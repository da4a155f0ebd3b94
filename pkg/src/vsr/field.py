"""Modular arithmetic over Z_N and Z_p with optional operation counting.

Every :class:`FieldElement` carries its :class:`Modulus`, so tiny desk-scale
moduli and production-size ones coexist in one process.  Operations can be
tallied inside a :func:`counting` block, which is how the overhead report
measures additions, multiplications and PRF calls.
"""
from __future__ import annotations

import contextlib
import contextvars
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import gmpy2

_COUNTS: contextvars.ContextVar[Counter | None] = contextvars.ContextVar("vsr_op_counts", default=None)


class ModulusMismatch(ValueError):
    """Operands belong to different moduli."""


class NotInvertible(ArithmeticError):
    """Inversion of zero or inversion over a composite modulus."""


def tally(kind: str, amount: int = 1) -> None:
    counts = _COUNTS.get()
    if counts is not None:
        counts[kind] += amount


@contextlib.contextmanager
def counting() -> Iterator[Counter]:
    """Count primitive operations (``add``, ``mul``, ``inv``, ``pow``, ``prf``,
    ``hash``, ``length_match``) performed inside the block."""
    counts: Counter = Counter()
    token = _COUNTS.set(counts)
    try:
        yield counts
    finally:
        _COUNTS.reset(token)


@dataclass(frozen=True)
class Modulus:
    value: int
    is_prime: bool = field(init=False, compare=False)
    bit_length: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.value < 2:
            raise ValueError(f"modulus must be >= 2, got {self.value}")
        object.__setattr__(self, "is_prime", bool(gmpy2.is_prime(self.value)))
        object.__setattr__(self, "bit_length", self.value.bit_length())

    @property
    def byte_length(self) -> int:
        return (self.bit_length + 7) // 8

    def __call__(self, residue: int) -> FieldElement:
        return FieldElement(residue % self.value, self)

    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def from_bytes(self, data: bytes) -> FieldElement:
        if len(data) != self.byte_length:
            raise ValueError(f"expected {self.byte_length} bytes, got {len(data)}")
        value = int.from_bytes(data, "big")
        if value >= self.value:
            raise ValueError("encoded value is not a canonical residue")
        return FieldElement(value, self)

    def random(self, rng) -> FieldElement:
        return FieldElement(rng.randrange(self.value), self)

    def random_nonzero(self, rng) -> FieldElement:
        return FieldElement(rng.randrange(1, self.value), self)

    def __repr__(self) -> str:
        return f"Modulus({self.value})"


@dataclass(frozen=True)
class FieldElement:
    residue: int
    modulus: Modulus

    def __post_init__(self) -> None:
        if not 0 <= self.residue < self.modulus.value:
            raise ValueError(f"{self.residue} is not a canonical residue mod {self.modulus.value}")

    def to_bytes(self) -> bytes:
        return self.residue.to_bytes(self.modulus.byte_length, "big")

    def __int__(self) -> int:
        return self.residue

    def __add__(self, other: FieldElement) -> FieldElement:
        return mod_add(self, other)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return mod_mul(self, other)

    def __repr__(self) -> str:
        return f"{self.residue} (mod {self.modulus.value})"


def _check(a: FieldElement, b: FieldElement) -> Modulus:
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"mod {a.modulus.value} vs mod {b.modulus.value}")
    return a.modulus


def mod_add(a: FieldElement, b: FieldElement) -> FieldElement:
    m = _check(a, b)
    tally("add")
    s = a.residue + b.residue
    if s >= m.value:
        s -= m.value
    return FieldElement(s, m)


def mod_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    m = _check(a, b)
    tally("mul")
    return FieldElement(a.residue * b.residue % m.value, m)


def mod_inv(a: FieldElement) -> FieldElement:
    m = a.modulus
    if not m.is_prime:
        raise NotInvertible(f"modulus {m.value} is not prime")
    if a.residue == 0:
        raise NotInvertible("zero has no inverse")
    tally("inv")
    # pow(x, -1, m) runs the extended Euclidean algorithm.
    return FieldElement(pow(a.residue, -1, m.value), m)


def mod_pow(base: FieldElement, exponent: int) -> FieldElement:
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    tally("pow")
    return FieldElement(pow(base.residue, exponent, base.modulus.value), base.modulus)


def field_sum(terms: Iterable[FieldElement], modulus: Modulus) -> FieldElement:
    """Left fold of :func:`mod_add`: w terms cost exactly w - 1 additions."""
    it = iter(terms)
    try:
        acc = next(it)
    except StopIteration:
        return modulus.zero()
    if acc.modulus != modulus:
        raise ModulusMismatch(f"mod {acc.modulus.value} vs mod {modulus.value}")
    for t in it:
        acc = mod_add(acc, t)
    return acc


# Field moduli used throughout: a desk-scale prime and the largest 80-bit prime.
P251 = Modulus(251)
P80 = Modulus(2**80 - 65)


def modulus_for_lambda(lam: int) -> Modulus:
    """Largest prime below 2^lam (251 for lam = 8, P80 for lam = 80)."""
    if lam < 2:
        raise ValueError("lambda must be >= 2")
    return Modulus(int(gmpy2.prev_prime(1 << lam)))


def parse_modulus(text: str) -> Modulus:
    """``"251"``, ``"p80"`` / ``"lambda80"`` or any integer >= 2."""
    t = text.strip().lower()
    for prefix in ("lambda", "p"):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            return modulus_for_lambda(int(t[len(prefix):]))
    try:
        return Modulus(int(t, 0))
    except ValueError:
        raise ValueError(f"bad modulus {text!r}") from None
