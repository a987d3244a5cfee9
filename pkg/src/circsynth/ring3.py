"""Arithmetic in R = GF(2)[y] / (y^(2*3^s) + y^(3^s) + 1).

The modulus is the 3^(s+1)-th cyclotomic polynomial over GF(2), so ``y`` has
multiplicative order ``3^(s+1)`` and ``y^(3^(s+1-m))`` is a root of unity of
order ``3^m`` that supports a ternary DFT without any scalar normalization.

Elements keep their coefficients in a Python int (bit ``i`` is the coefficient
of ``y^i``), which makes addition a single XOR and multiplication a carry-less
shift-and-add.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from circsynth.gf2core import BitVector, as_bits, mask_indices


class SynthesisPreconditionError(ValueError):
    """A synthesis parameter is outside the range where the construction exists."""


@dataclass(frozen=True)
class RingContext:
    s: int

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("ring parameter s must be non-negative")

    @cached_property
    def third(self) -> int:
        """3^s, the middle exponent of the modulus."""
        return 3 ** self.s

    @property
    def deg(self) -> int:
        return 2 * self.third

    @property
    def y_order(self) -> int:
        return 3 * self.third

    @property
    def modulus(self) -> int:
        return (1 << self.deg) | (1 << self.third) | 1

    def zero(self) -> RingElement:
        return RingElement(self, 0)

    def one(self) -> RingElement:
        return RingElement(self, 1)

    def element(self, coeffs: Sequence[int]) -> RingElement:
        """Element from a coefficient vector of length at most ``deg`` (low order first)."""
        bits = as_bits(coeffs)
        if bits.size > self.deg:
            raise ValueError(f"{bits.size} coefficients do not fit a ring of degree {self.deg}")
        value = 0
        for i in np.flatnonzero(bits).tolist():
            value |= 1 << i
        return RingElement(self, value)

    def reduce(self, value: int) -> int:
        """Reduce an arbitrary GF(2)[y] polynomial (as int) modulo the trinomial."""
        deg, third = self.deg, self.third
        # fold y^p (p >= deg) into y^(p - 3^s) + y^(p - 2*3^s), top bit first
        while value.bit_length() > deg:
            top = value.bit_length() - 1
            value ^= (1 << top) | (1 << (top - third)) | (1 << (top - deg))
        return value


@dataclass(frozen=True)
class RingElement:
    ctx: RingContext
    value: int

    @property
    def coeffs(self) -> BitVector:
        out = np.zeros(self.ctx.deg, dtype=np.uint8)
        out[mask_indices(self.value)] = 1
        return out

    def is_zero(self) -> bool:
        return self.value == 0

    def support(self) -> list[int]:
        return mask_indices(self.value)

    def __add__(self, other: RingElement) -> RingElement:
        return ring_add(self, other)

    def __mul__(self, other: RingElement) -> RingElement:
        return ring_mul(self, other)

    def __pow__(self, e: int) -> RingElement:
        return ring_pow(self, e)

    def __repr__(self):
        terms = [("1" if i == 0 else "y" if i == 1 else f"y^{i}") for i in self.support()]
        return f"R[s={self.ctx.s}]({' + '.join(terms) or '0'})"


def _same_ctx(u: RingElement, v: RingElement):
    if u.ctx != v.ctx:
        raise ValueError(f"ring context mismatch: s={u.ctx.s} vs s={v.ctx.s}")


def ring_add(u: RingElement, v: RingElement) -> RingElement:
    _same_ctx(u, v)
    return RingElement(u.ctx, u.value ^ v.value)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[y] polynomials encoded as ints."""
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    while a:
        low = a & -a
        out ^= b << (low.bit_length() - 1)
        a ^= low
    return out


def ring_mul(u: RingElement, v: RingElement) -> RingElement:
    _same_ctx(u, v)
    return RingElement(u.ctx, u.ctx.reduce(clmul(u.value, v.value)))


def ring_pow(u: RingElement, e: int) -> RingElement:
    if e < 0:
        raise ValueError("negative exponents are only defined for powers of y; use y_pow")
    result, base = u.ctx.one(), u
    while e:
        if e & 1:
            result = ring_mul(result, base)
        base = ring_mul(base, base)
        e >>= 1
    return result


def reduced_positions(ctx: RingContext, e: int) -> tuple[int, ...]:
    """Support of ``y^e`` after full reduction (``e`` taken modulo the order of ``y``)."""
    e %= ctx.y_order
    if e < ctx.deg:
        return (e,)
    return (e - 2 * ctx.third, e - ctx.third)


def y_pow(ctx: RingContext, e: int) -> RingElement:
    value = 0
    for p in reduced_positions(ctx, e):
        value |= 1 << p
    return RingElement(ctx, value)


def monomial_support(ctx: RingContext, u: int, p: int) -> set[int]:
    """Positions hit by ``y^u * y^p``; at most two since ``y^(2*3^s+r) = y^(3^s+r) + y^r``."""
    if not 0 <= u < ctx.deg:
        raise IndexError(f"coefficient index {u} outside [0, {ctx.deg})")
    return set(reduced_positions(ctx, u + p))


def zeta_exponent(ctx: RingContext, m: int) -> int:
    """Exponent ``3^(s+1-m)`` with ``zeta = y^exponent`` of order ``3^m``."""
    if not 1 <= m <= ctx.s + 1:
        raise SynthesisPreconditionError(
            f"no root of unity of order 3^{m} in the ring with s={ctx.s} (need 1 <= m <= {ctx.s + 1})")
    return 3 ** (ctx.s + 1 - m)


def zeta(ctx: RingContext, m: int) -> RingElement:
    return y_pow(ctx, zeta_exponent(ctx, m))


def poly_eval_horner(coeffs: Sequence[RingElement], point: RingElement) -> RingElement:
    if not coeffs:
        return point.ctx.zero()
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = ring_add(ring_mul(acc, point), c)
    return acc


def shift(u: RingElement, e: int) -> RingElement:
    """``u * y^e`` for any integer ``e`` (negative allowed, since ``y`` is a unit)."""
    ctx = u.ctx
    e %= ctx.y_order
    # work in GF(2)[y]/(y^(3*3^s) - 1), where multiplication by y^e is a rotation
    rotated = 0
    for p in mask_indices(u.value):
        rotated |= 1 << ((p + e) % ctx.y_order)
    return RingElement(ctx, ctx.reduce(rotated))


def dft_points(v: Sequence[RingElement], m: int, inverse: bool = False) -> list[RingElement]:
    """Ternary DFT of order ``3^m``: ``w_j = sum_i v_i zeta^(+-ij)``, unnormalized.

    The inverse needs no ``1/3^m`` factor because ``3^m`` is odd.
    """
    size = 3 ** m
    if len(v) != size:
        raise ValueError(f"DFT of order 3^{m} needs {size} values, got {len(v)}")
    ctx = v[0].ctx
    for x in v:
        _same_ctx(x, v[0])
    step = zeta_exponent(ctx, m)
    sign = -1 if inverse else 1
    out = []
    for j in range(size):
        acc = 0
        for i, x in enumerate(v):
            if x.value:
                acc ^= shift(x, sign * step * i * j).value
        out.append(RingElement(ctx, acc))
    return out


def reduction_support(ctx: RingContext, j: int) -> set[int]:
    """Where coefficient ``j`` of an unreduced product (degree <= 4*3^s - 2) lands after reduction."""
    if not 0 <= j <= 4 * ctx.third - 2:
        raise IndexError(f"raw coefficient index {j} outside [0, {4 * ctx.third - 2}]")
    return set(reduced_positions(ctx, j))
