"""Dense GF(2) vectors and matrices, the cyclic-convolution oracle and circulant kernels.

Bit vectors are 1-D ``numpy.uint8`` arrays holding 0/1, matrices are 2-D
``numpy.uint8`` arrays.  Linear forms over a set of variables are also handled
as Python ints used as bitmasks (bit ``j`` set means variable ``j`` occurs);
the helpers at the bottom convert between the two views.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BitVector = np.ndarray
GF2Matrix = np.ndarray


def as_bits(x: Iterable[int] | np.ndarray) -> BitVector:
    """Return ``x`` as a fresh 1-D uint8 array, rejecting anything but 0/1."""
    arr = np.array(x, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit vector entries must be 0 or 1")
    return arr.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class CirculantKernel:
    """Convolution kernel ``a`` of an n x n circulant: output ``C_k`` collects ``a_t * B_{k-t}``."""

    n: int
    a: BitVector

    def __post_init__(self):
        a = as_bits(self.a)
        if self.n < 1:
            raise ValueError("kernel order must be at least 1")
        if a.size != self.n:
            raise ValueError(f"kernel length {a.size} does not match n={self.n}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    def __eq__(self, other):
        if not isinstance(other, CirculantKernel):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.a, other.a))

    def __hash__(self):
        return hash((self.n, self.a.tobytes()))

    def first_row(self) -> BitVector:
        """Inverse of :func:`kernel_from_first_row`."""
        return self.a[(-np.arange(self.n)) % self.n].copy()

    @property
    def weight(self) -> int:
        return int(self.a.sum())

    def __repr__(self):
        return f"CirculantKernel(n={self.n}, a={''.join(map(str, self.a.tolist()))})"


def cyclic_convolve(a: Sequence[int], b: Sequence[int]) -> BitVector:
    """Cyclic convolution over GF(2), straight from the definition.

    ``C_k`` is the XOR of ``a_i * b_j`` over all pairs with ``i + j = k (mod n)``.
    Quadratic on purpose: this is the reference every synthesized circuit is
    checked against.
    """
    a = as_bits(a)
    b = as_bits(b)
    n = a.size
    if n != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if n == 0:
        raise ValueError("cyclic convolution needs n >= 1")
    c = np.zeros(n, dtype=np.uint8)
    for i in np.flatnonzero(a):
        # i + j = k  <=>  k runs over (i + j) mod n as j runs over 0..n-1
        c ^= np.roll(b, i)
    return c


def kernel_from_first_row(r: Sequence[int]) -> CirculantKernel:
    """Kernel ``a`` with ``a_t = r_{(-t) mod n}``, so that ``Z @ B == cyclic_convolve(a, B)``."""
    r = as_bits(r)
    n = r.size
    if n == 0:
        raise ValueError("first row must be non-empty")
    return CirculantKernel(n, r[(-np.arange(n)) % n])


def circulant_to_matrix(r: Sequence[int]) -> GF2Matrix:
    """Circulant matrix with first row ``r``: entry (i, j) is ``r_{(j - i) mod n}``."""
    r = as_bits(r)
    n = r.size
    if n == 0:
        raise ValueError("first row must be non-empty")
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return r[idx]


def mat_vec_mod2(M: GF2Matrix, x: Sequence[int]) -> BitVector:
    M = np.asarray(M, dtype=np.uint8)
    x = as_bits(x)
    if M.ndim != 2 or M.shape[1] != x.size:
        raise ValueError(f"cannot multiply {M.shape} matrix by vector of length {x.size}")
    return ((M.astype(np.int64) @ x.astype(np.int64)) & 1).astype(np.uint8)


def random_kernel(n: int, seed: int) -> CirculantKernel:
    """Deterministic uniformly random kernel of order ``n``."""
    if n < 1:
        raise ValueError("kernel order must be at least 1")
    rng = np.random.default_rng([n, seed])
    return CirculantKernel(n, rng.integers(0, 2, size=n, dtype=np.uint8))


def read_kernel_text(text: str) -> BitVector:
    """Parse the two-line kernel format: decimal ``n``, then ``n`` characters from {0,1}.

    The bits are the circulant's FIRST ROW; convert with :func:`kernel_from_first_row`.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError("kernel text must have exactly two non-empty lines")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be a decimal length, got {lines[0]!r}") from None
    bits = lines[1]
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise ValueError(f"second line must be {n} characters from {{0,1}}")
    return as_bits([int(ch) for ch in bits])


def write_kernel_text(r: Sequence[int]) -> str:
    r = as_bits(r)
    return f"{r.size}\n{''.join(map(str, r.tolist()))}\n"


# ---------- bitmask helpers

def bits_to_mask(bits: Sequence[int]) -> int:
    mask = 0
    for i in np.flatnonzero(as_bits(bits)).tolist():
        mask |= 1 << i
    return mask


def mask_to_bits(mask: int, n: int) -> BitVector:
    out = np.zeros(n, dtype=np.uint8)
    idx = mask_indices(mask)
    if idx and idx[-1] >= n:
        raise ValueError(f"mask has bit {idx[-1]} beyond length {n}")
    out[idx] = 1
    return out


def mask_indices(mask: int) -> list[int]:
    """Ascending positions of the set bits of ``mask``."""
    if mask < 0:
        raise ValueError("mask must be non-negative")
    if mask.bit_length() <= 512:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out
    raw = np.frombuffer(mask.to_bytes((mask.bit_length() + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")).tolist()
