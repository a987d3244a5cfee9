"""Checking synthesized circuits against their target circulant.

Exactness and the depth budget are hard gates.  Edge counts are only
reported relative to the asymptotic bound shapes, whose constants are not
explicit, so no pass/fail is attached to them.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from circsynth.circuit import RectifierCircuit
from circsynth.gf2core import CirculantKernel, cyclic_convolve


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    mismatch: tuple[int, int] | None = None  # first wrong (output, input) entry, exact mode
    trial: int | None = None                 # first failing trial, randomized mode

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        if self.mismatch is not None:
            i, j = self.mismatch
            return f"mismatch at entry ({i}, {j})"
        return f"randomized check failed at trial {self.trial}"


def _check_dims(c: RectifierCircuit, kernel: CirculantKernel):
    if c.n_inputs != kernel.n or c.n_outputs != kernel.n:
        raise ValueError(f"circuit is {c.n_outputs}x{c.n_inputs} but the kernel has order {kernel.n}")


def circulant_row_masks(kernel: CirculantKernel) -> list[int]:
    """Row i of the circulant as a bitmask over columns."""
    n = kernel.n
    row0 = np.flatnonzero(kernel.first_row()).tolist()
    return [sum(1 << ((i + t) % n) for t in row0) for i in range(n)]


def verify_exact(c: RectifierCircuit, kernel: CirculantKernel) -> VerifyResult:
    """Compare every entry of the realized matrix with the circulant."""
    _check_dims(c, kernel)
    for i, (got, want) in enumerate(zip(c.output_masks(), circulant_row_masks(kernel))):
        diff = got ^ want
        if diff:
            return VerifyResult(False, mismatch=(i, (diff & -diff).bit_length() - 1))
    return VerifyResult(True)


def verify_freivalds(c: RectifierCircuit, kernel: CirculantKernel, trials: int = 40,
                     seed: int = 0) -> VerifyResult:
    """Randomized check on ``trials`` uniform inputs.

    Two distinct GF(2)-linear maps disagree on at least half of all inputs, so
    a wrong circuit survives with probability at most ``2^-trials``.
    """
    _check_dims(c, kernel)
    if trials < 1:
        raise ValueError("need at least one trial")
    X = np.stack([np.random.default_rng(ss).integers(0, 2, kernel.n, dtype=np.uint8)
                  for ss in np.random.SeedSequence(seed).spawn(trials)])
    got = c.evaluate_batch(X)
    for t in range(trials):
        if not np.array_equal(got[t], cyclic_convolve(kernel.a, X[t])):
            return VerifyResult(False, trial=t)
    return VerifyResult(True)


def bound_base(n: int, d: int) -> float:
    """``n^(1+1/k)`` for odd ``d``, ``n (n/log2 n)^(1/k)`` for even ``d``, ``k = ceil(d/2)``."""
    k = (d + 1) // 2
    if d % 2:
        return float(n) ** (1 + 1 / k)
    return n * (n / max(math.log2(n), 1.0)) ** (1 / k)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    d: int
    k: int
    edges: int
    depth_measured: int
    nodes: int
    bound_base: float
    ratio: float

    @property
    def depth_ok(self) -> bool:
        return self.depth_measured <= self.d

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.d, "edges": self.edges, "depth": self.depth_measured,
                           "bound_base": self.bound_base, "ratio": self.ratio})

    def as_dict(self) -> dict:
        out = asdict(self)
        out["depth_ok"] = self.depth_ok
        return out


def audit_bounds(c: RectifierCircuit, d: int) -> BoundsReport:
    st = c.stats()
    n = c.n_inputs
    base = bound_base(n, d)
    return BoundsReport(n=n, d=d, k=(d + 1) // 2, edges=st["edges"], depth_measured=st["depth"],
                        nodes=st["nodes"], bound_base=base, ratio=st["edges"] / base)
