"""Test-only generators: random circuits and mutations that provably change the realized map."""

import random

from circsynth.circuit import INPUT, RectifierCircuit, edge_mutation
from circsynth.gf2core import random_kernel


def random_circuit(n_in, n_inner, n_out, seed, density=0.3):
    rng = random.Random(seed)
    c = RectifierCircuit(n_in)
    for _ in range(n_inner):
        c.add_node(k for k in range(len(c)) if rng.random() < density)
    for _ in range(n_out):
        c.add_node((k for k in range(len(c)) if c.kinds[k] != "output" and rng.random() < density),
                   output=True)
    return c


def downstream_parity(c):
    """Per node, bitmask over outputs of the parity of path counts node -> output.

    Computed backwards, independently of the forward propagation used by
    ``realized_matrix``.
    """
    back = [0] * len(c)
    for i, k in enumerate(c.output_ids):
        back[k] ^= 1 << i
    for k in range(len(c) - 1, -1, -1):
        if back[k]:
            for p in c.preds[k]:
                back[p] ^= back[k]
    return back


def observable_toggles(c, count, seed):
    """``count`` distinct single-edge toggles (node, pred) that change the realized matrix.

    Toggling edge p -> v adds (row mask of p) x (downstream parity of v) to the
    realized matrix; both factors nonzero means the map changes.
    """
    rng = random.Random(seed)
    fwd = c.node_masks()
    back = downstream_parity(c)
    targets = [v for v in range(len(c)) if c.kinds[v] != INPUT and back[v]]
    seen, out = set(), []
    tries = 0
    while len(out) < count and tries < 100 * count:
        tries += 1
        v = rng.choice(targets)
        if rng.random() < 0.5 and c.preds[v]:
            p = rng.choice(c.preds[v])
        else:
            p = rng.randrange(v)
        if fwd[p] and (v, p) not in seen:
            seen.add((v, p))
            out.append((v, p))
    return out


def mutate(c, toggle):
    return edge_mutation(c, *toggle)


def dense_kernel(n, seed):
    """A random kernel with weight at least n/3 (retries seeds deterministically)."""
    k = random_kernel(n, seed)
    while 3 * k.weight < n:
        seed += 10_000
        k = random_kernel(n, seed)
    return k
