"""Synthesis of bounded-depth XOR circuits for circulant matrices.

Depth 1 is the matrix itself, depth 2 is Lupanov's block-pattern
construction, and every larger budget ``d`` splits the input into ``q``
blocks read as elements of R = GF(2)[y]/(y^(2*3^s) + y^(3^s) + 1):

1. one depth-1 layer evaluates the block polynomial at all powers of the
   ternary root of unity (each term is a shifted copy, so every input bit lands
   on at most two ring positions);
2. each of the ``3^m`` pointwise products by a known constant is itself a
   circulant problem of length ``4*3^s``, synthesized recursively at depth
   ``d - 2``; the modular reduction is merged into that sub-circuit's last layer;
3. a final depth-1 layer interpolates, re-assembles the blocks at their stride
   and folds the linear product cyclically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from circsynth.circuit import RectifierCircuit, restrict
from circsynth.gf2core import CirculantKernel, circulant_to_matrix, mask_indices
from circsynth.ring3 import (
    RingContext,
    RingElement,
    SynthesisPreconditionError,
    poly_eval_horner,
    reduced_positions,
    reduction_support,
    y_pow,
    zeta_exponent,
)

TRIVIAL, LUPANOV, TOOM = "trivial", "lupanov", "toom"


@dataclass(frozen=True)
class SynthPlan:
    n: int
    d: int
    kind: str
    q: int = 0
    s: int = 0
    m: int = 0
    block_len: int = 0
    wrap: bool = False
    sub_plan: SynthPlan | None = None

    @property
    def k(self) -> int:
        return (self.d + 1) // 2

    @property
    def points(self) -> int:
        return 3 ** self.m

    @property
    def sub_len(self) -> int:
        return 4 * 3 ** self.s

    @property
    def ring(self) -> RingContext:
        return RingContext(self.s)

    def describe(self) -> list[str]:
        """One line per recursion level."""
        plan, out = self, []
        while plan is not None:
            if plan.kind == TOOM:
                out.append(f"n={plan.n} d={plan.d} toom{' wrapped' if plan.wrap else ''} q={plan.q} "
                           f"block_len={plan.block_len} s={plan.s} m={plan.m} points={plan.points} "
                           f"sub_len={plan.sub_len}")
            else:
                out.append(f"n={plan.n} d={plan.d} {plan.kind}")
            plan = plan.sub_plan
        return out


@dataclass
class ToomStageData:
    eval_rows: list[list[int]]
    constants: list[RingElement]
    recomb_rows: list[list[int]] = field(default_factory=list)


def _min_pow3(x: int) -> int:
    """Smallest e >= 0 with 3^e >= x."""
    e = 0
    while 3 ** e < x:
        e += 1
    return e


def plan_parameters(n: int, d: int, wrap: bool = True) -> SynthPlan:
    """Pick block count and ring/DFT sizes for depth budget ``d``.

    The target block count is ``n^(1/k)`` for odd ``d`` and ``(n/log2 n)^(1/k)``
    for even ``d`` (``k = ceil(d/2)``).  Linear mode rounds it to ``q`` and takes
    the least ``s, m`` with ``3^s >= ceil(n/q)`` and ``3^m >= 2q``, shrinking
    ``q`` while the root of unity is missing (``m > s + 1``); ``q = 1`` always
    works.  With ``wrap``, a block count ``q = 3^m`` dividing ``n`` within a
    factor 3 of the target is preferred: the cyclic fold then equals a length-q
    cyclic product over the ring and only ``q`` DFT points are needed.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if d == 1:
        return SynthPlan(n, d, TRIVIAL)
    if d == 2:
        return SynthPlan(n, d, LUPANOV)
    k = (d + 1) // 2
    base = n if d % 2 else n / max(math.log2(n), 1.0)
    target = base ** (1.0 / k)
    if wrap:
        best = None
        m = 1
        while n % 3 ** m == 0:
            q = 3 ** m
            s = _min_pow3(n // q)
            dist = abs(math.log(q / target))
            if m <= s + 1 and dist <= math.log(3) + 1e-9 and (best is None or dist < best[0] - 1e-9):
                best = (dist, q, s, m)
            m += 1
        if best is not None:
            _, q, s, m = best
            return SynthPlan(n, d, TOOM, q=q, s=s, m=m, block_len=n // q, wrap=True,
                             sub_plan=plan_parameters(4 * 3 ** s, d - 2, wrap))
    q = min(n, max(2, math.floor(target + 0.5)))
    while True:
        block_len = -(-n // q)
        q = -(-n // block_len)  # drop blocks that would be pure padding
        s = _min_pow3(block_len)
        m = _min_pow3(2 * q)
        if m <= s + 1:
            break
        q -= 1
    return SynthPlan(n, d, TOOM, q=q, s=s, m=m, block_len=block_len,
                     sub_plan=plan_parameters(4 * 3 ** s, d - 2, wrap))


def synth(kernel: CirculantKernel, d: int, wrap: bool = True) -> RectifierCircuit:
    """Circuit of depth at most ``d`` realizing the circulant with convolution kernel ``kernel``."""
    plan = plan_parameters(kernel.n, d, wrap)
    if plan.kind == TRIVIAL:
        return synth_trivial(kernel)
    if plan.kind == LUPANOV:
        return synth_lupanov(kernel)
    return synth_toom(kernel, d, plan, wrap)


# ---------- base cases

def synth_trivial(kernel: CirculantKernel) -> RectifierCircuit:
    n = kernel.n
    row0 = np.flatnonzero(kernel.first_row()).tolist()
    c = RectifierCircuit(n)
    for i in range(n):
        c.add_node(((i + t) % n for t in row0), output=True)
    return c


def lupanov_block_width(n: int) -> int:
    """Textbook width ``floor(log2 n - 2 log2 log2 n)``, at least 1."""
    if n < 4:
        return 1
    lg = math.log2(n)
    return max(1, math.floor(lg - 2 * math.log2(lg)))


def _block_codes(M: np.ndarray, b: int) -> np.ndarray:
    """Row patterns per column block as integers, shape ``(rows, blocks)``; bit t is column ``lo + t``."""
    n_rows, n_cols = M.shape
    n_blocks = -(-n_cols // b)
    padded = np.zeros((n_rows, n_blocks * b), dtype=np.int64)
    padded[:, :n_cols] = M
    return padded.reshape(n_rows, n_blocks, b) @ (1 << np.arange(b, dtype=np.int64))


def _distinct_patterns(codes: np.ndarray, b: int) -> np.ndarray:
    """Sorted distinct nonzero ``block * 2^b + pattern`` keys."""
    keys = codes + (np.arange(codes.shape[1], dtype=np.int64) << b)
    return np.unique(keys[codes != 0])


def lupanov_edges(M: np.ndarray, b: int) -> int:
    """Exact edge count of :func:`lupanov_circuit` with block width ``b``."""
    codes = _block_codes(np.asarray(M), b)
    pats = _distinct_patterns(codes, b) & ((1 << b) - 1)
    weights = np.unpackbits(pats.astype(">u8").view(np.uint8)).sum() if pats.size else 0
    return int(weights) + int(np.count_nonzero(codes))


def best_lupanov_width(M: np.ndarray) -> int:
    n_cols = M.shape[1]
    widths = range(1, min(max(1, math.floor(math.log2(max(n_cols, 2)))) + 2, 40))
    return min(widths, key=lambda b: (lupanov_edges(M, b), b))


def lupanov_circuit(M: np.ndarray, b: int | None = None) -> RectifierCircuit:
    """Depth-2 circuit for an arbitrary Boolean matrix.

    Columns are cut into blocks of width ``b``.  Per block there is one middle
    node for every distinct nonzero row pattern that actually occurs, and each
    output reads the middle node of its own pattern in every block.  With
    ``b=None`` the width minimizing the edge count is used.
    """
    M = np.asarray(M, dtype=np.uint8)
    n_rows, n_cols = M.shape
    if b is None:
        b = best_lupanov_width(M)
    if b < 1:
        raise ValueError("block width must be at least 1")
    c = RectifierCircuit(n_cols)
    codes = _block_codes(M, b)
    keys = _distinct_patterns(codes, b)
    low = (1 << b) - 1
    middle = {}
    for key in keys.tolist():
        lo = (key >> b) * b
        middle[key] = c.add_node([lo + t for t in mask_indices(key & low)], reduced=True)
    for row in codes.tolist():
        preds = [middle[(blk << b) + pat] for blk, pat in enumerate(row) if pat]
        c.add_node(preds, output=True, reduced=True)
    return c


def synth_lupanov(kernel: CirculantKernel, b: int | None = None) -> RectifierCircuit:
    return lupanov_circuit(circulant_to_matrix(kernel.first_row()), b)


# ---------- the recursive step

def _require_toom(plan: SynthPlan):
    if plan.kind != TOOM:
        raise SynthesisPreconditionError(f"plan for n={plan.n}, d={plan.d} is {plan.kind}, not toom")


def evaluation_rows(plan: SynthPlan) -> list[list[int]]:
    """Stage-1 rows: bit ``p`` of ``B(zeta^j)`` is row ``j * 2*3^s + p`` (input indices)."""
    _require_toom(plan)
    ctx = plan.ring
    step = zeta_exponent(ctx, plan.m)
    n, blen = plan.n, plan.block_len
    rows = []
    for j in range(plan.points):
        acc = [0] * ctx.deg
        for i in range(plan.q):
            e = step * i * j
            for u in range(min(blen, n - i * blen)):
                bit = 1 << (i * blen + u)
                for p in reduced_positions(ctx, u + e):
                    acc[p] ^= bit
        rows.extend(mask_indices(a) for a in acc)
    return rows


def kernel_blocks(plan: SynthPlan, kernel: CirculantKernel) -> list[RingElement]:
    """The kernel cut into ``q`` blocks, each embedded in the low coefficients of a ring element."""
    ctx = plan.ring
    a = kernel.a
    return [ctx.element(a[i * plan.block_len:(i + 1) * plan.block_len]) for i in range(plan.q)]


def constant_points(plan: SynthPlan, kernel: CirculantKernel) -> list[RingElement]:
    _require_toom(plan)
    if kernel.n != plan.n:
        raise ValueError(f"kernel of order {kernel.n} does not match plan for n={plan.n}")
    ctx = plan.ring
    step = zeta_exponent(ctx, plan.m)
    blocks = kernel_blocks(plan, kernel)
    return [poly_eval_horner(blocks, y_pow(ctx, step * j)) for j in range(plan.points)]


def synth_constant_mult(const: RingElement, d: int, reduce: bool = False,
                        wrap: bool = True) -> RectifierCircuit:
    """Circuit multiplying a ring element (``2*3^s`` input bits) by ``const``.

    The product is embedded in a length-``4*3^s`` circulant with the constant
    as kernel, synthesized at depth ``d``; the unused upper inputs are cut
    away.  Without ``reduce`` the ``4*3^s - 1`` raw product coefficients are
    the outputs.  With ``reduce`` the outputs are the ``2*3^s`` coefficients
    of the reduced product, obtained by merging raw output nodes, which keeps
    the depth and at most doubles the edges of the last layer.
    """
    ctx = const.ctx
    L = 4 * ctx.third
    kern = CirculantKernel(L, np.concatenate([const.coeffs, np.zeros(L - ctx.deg, dtype=np.uint8)]))
    sub = synth(kern, d, wrap)
    if reduce:
        rows = [[] for _ in range(ctx.deg)]
        for r in range(L - 1):
            for w in reduction_support(ctx, r):
                rows[w].append(r)
    else:
        rows = [[r] for r in range(L - 1)]
    return restrict(sub, ctx.deg, rows)


def recombination_rows(plan: SynthPlan, reduced: bool = True) -> list[list[int]]:
    """Stage-3 rows over the concatenated stage-2 outputs, one row per final output.

    ``reduced`` says whether each point delivers the ``2*3^s`` reduced product
    coefficients or the ``4*3^s - 1`` raw ones (reduction is then fused here).
    Fused maps: inverse DFT ``C_i = sum_j C(zeta^j) zeta^(-ij)``, placement of
    coefficient ``v`` of ``C_i`` at binary position ``i*block_len + v``, and the
    cyclic fold of position ``t`` onto ``t mod n``.
    """
    _require_toom(plan)
    ctx = plan.ring
    deg = ctx.deg
    width = deg if reduced else 4 * ctx.third - 1
    step = zeta_exponent(ctx, plan.m)
    n, blen = plan.n, plan.block_len

    # per point, the linear form (over stage-2 outputs) of each ring position
    point_forms = []
    for j in range(plan.points):
        base = j * width
        if reduced:
            forms = [1 << (base + w) for w in range(deg)]
        else:
            forms = [0] * deg
            for r in range(width):
                for w in reduction_support(ctx, r):
                    forms[w] ^= 1 << (base + r)
        point_forms.append(forms)

    # a wrapped plan yields the product modulo X^q - 1 directly
    n_coeffs = plan.q if plan.wrap else 2 * plan.q - 1
    used = min(deg, 2 * blen - 1)  # C_i has degree <= 2*block_len - 2
    out = [0] * n
    for i in range(n_coeffs):
        acc = [0] * deg
        for j, forms in enumerate(point_forms):
            e = -step * i * j
            for w, f in enumerate(forms):
                for p in reduced_positions(ctx, w + e):
                    acc[p] ^= f
        for v in range(used):
            t = i * blen + v
            if t < 2 * n - 1:  # higher coefficients of a linear product of two length-n vectors vanish
                out[t % n] ^= acc[v]
    return [mask_indices(f) for f in out]


def stage_data(plan: SynthPlan, kernel: CirculantKernel) -> ToomStageData:
    return ToomStageData(evaluation_rows(plan), constant_points(plan, kernel), recombination_rows(plan))


def synth_toom(kernel: CirculantKernel, d: int, plan: SynthPlan | None = None,
               wrap: bool = True) -> RectifierCircuit:
    if d < 3:
        raise SynthesisPreconditionError(f"the recursive construction needs depth >= 3, got {d}")
    if plan is None:
        plan = plan_parameters(kernel.n, d, wrap)
    _require_toom(plan)
    n, deg = kernel.n, plan.ring.deg
    data = stage_data(plan, kernel)
    c = RectifierCircuit(n)
    prod_ids: list[int | None] = []
    for j, const in enumerate(data.constants):
        if const.is_zero():
            prod_ids.extend([None] * deg)
            continue
        point_ids = c.add_linear_layer(range(n), data.eval_rows[j * deg:(j + 1) * deg])
        sub = synth_constant_mult(const, d - 2, reduce=True, wrap=wrap)
        remap = c.splice(point_ids, sub)
        prod_ids.extend(remap[o] for o in sub.output_ids)
    # products that are identically zero (no predecessors) contribute nothing
    live = [pid is not None and bool(c.preds[pid]) for pid in prod_ids]
    rows = ([t for t in row if live[t]] for row in data.recomb_rows)
    c.add_linear_layer([pid if pid is not None else -1 for pid in prod_ids], rows, as_outputs=True)
    return c
