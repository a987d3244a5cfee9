"""Modulo-2 rectifier circuits.

A circuit is a DAG whose nodes are numbered topologically: every predecessor
of a node has a smaller id.  Entry (i, j) of the realized matrix is the parity
of the number of directed paths from input j to output i, which is the same
as saying every non-input node computes the XOR of its predecessors.

Predecessor lists are kept as sorted tuples without repetitions; a doubled
edge would only add path pairs that cancel modulo 2.
"""

from __future__ import annotations

import json
from collections import Counter
from functools import reduce
from operator import xor
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from circsynth.gf2core import BitVector, GF2Matrix, as_bits, mask_indices

INPUT, INNER, OUTPUT = "input", "inner", "output"
JSON_VERSION = 1


class CircuitFormatError(ValueError):
    """Serialized circuit text is malformed or violates a structural invariant."""


class Node(NamedTuple):
    id: int
    kind: str
    index: int | None
    preds: tuple[int, ...]


def parity_reduce(ids: Iterable[int]) -> tuple[int, ...]:
    """Sorted ids occurring an odd number of times."""
    ids = list(ids)
    uniq = set(ids)
    if len(uniq) == len(ids):
        return tuple(sorted(uniq))
    return tuple(sorted(i for i, c in Counter(ids).items() if c & 1))


class RectifierCircuit:
    """Append-only XOR circuit with topologically numbered nodes.

    Inputs are created up front and occupy ids ``0 .. n_inputs-1``; outputs get
    their indices in creation order unless an explicit index is given.
    """

    def __init__(self, n_inputs: int = 0):
        if n_inputs < 0:
            raise ValueError("n_inputs must be non-negative")
        self.n_inputs = n_inputs
        self.preds: list[tuple[int, ...]] = [()] * n_inputs
        self.kinds: list[str] = [INPUT] * n_inputs
        self.indices: list[int | None] = list(range(n_inputs))
        self.input_ids: list[int] = list(range(n_inputs))
        self._outputs: dict[int, int] = {}

    # ---------- construction

    @property
    def n_outputs(self) -> int:
        return len(self._outputs)

    @property
    def output_ids(self) -> list[int]:
        """Node ids of outputs ordered by output index."""
        if sorted(self._outputs) != list(range(len(self._outputs))):
            raise ValueError("output indices are not contiguous from 0")
        return [self._outputs[i] for i in range(len(self._outputs))]

    def __len__(self):
        return len(self.preds)

    def add_node(self, preds: Iterable[int] = (), output_index: int | None = None,
                 *, output: bool = False, reduced: bool = False) -> int:
        """Append a node; ``reduced=True`` promises ``preds`` is already sorted and duplicate free."""
        node_id = len(self.preds)
        preds = tuple(preds) if reduced else parity_reduce(preds)
        if preds and (preds[0] < 0 or preds[-1] >= node_id):
            raise ValueError(f"node {node_id}: predecessor ids must lie in [0, {node_id})")
        if output_index is not None or output:
            if output_index is None:
                output_index = len(self._outputs)
            if output_index in self._outputs:
                raise ValueError(f"output index {output_index} already assigned")
            self._outputs[output_index] = node_id
            self.kinds.append(OUTPUT)
            self.indices.append(output_index)
        else:
            self.kinds.append(INNER)
            self.indices.append(None)
        self.preds.append(preds)
        return node_id

    def add_linear_layer(self, sources: Sequence[int], rows: Iterable[Iterable[int]],
                         as_outputs: bool = False) -> list[int]:
        """One new node per row, reading ``sources[t]`` for each ``t`` in the row."""
        sources = list(sources)
        n_src = len(sources)
        new_ids = []
        for row in rows:
            row = list(row)
            if row and (min(row) < 0 or max(row) >= n_src):
                raise IndexError(f"row index out of range for {n_src} sources")
            new_ids.append(self.add_node([sources[t] for t in row], output=as_outputs))
        return new_ids

    def splice(self, attach_ids: Sequence[int], sub: RectifierCircuit) -> list[int]:
        """Copy ``sub`` into this circuit, identifying its input i with ``attach_ids[i]``.

        Returns the map from sub's node ids to ids in this circuit.  Outputs of
        ``sub`` become inner nodes here; no edges are added beyond sub's own.
        """
        if len(attach_ids) != sub.n_inputs:
            raise ValueError(f"sub-circuit has {sub.n_inputs} inputs, got {len(attach_ids)} attach ids")
        remap = [0] * len(sub.preds)
        base = len(self.preds)
        for k, (kind, p) in enumerate(zip(sub.kinds, sub.preds)):
            if kind == INPUT:
                remap[k] = attach_ids[sub.indices[k]]
            else:
                remap[k] = base
                base += 1
        get = remap.__getitem__
        for kind, p in zip(sub.kinds, sub.preds):
            if kind == INPUT:
                continue
            mapped = tuple(map(get, p))
            # identified inputs may break sortedness or (if attach ids repeat) uniqueness
            self.preds.append(parity_reduce(mapped))
            self.kinds.append(INNER)
            self.indices.append(None)
        return remap

    # ---------- semantics

    def node_masks(self) -> list[int]:
        """Per node, the bitmask of inputs reached by an odd number of paths."""
        masks = [0] * len(self.preds)
        for k, (kind, p) in enumerate(zip(self.kinds, self.preds)):
            if kind == INPUT:
                masks[k] = 1 << self.indices[k]
            elif p:
                masks[k] = reduce(xor, map(masks.__getitem__, p))
        return masks

    def output_masks(self) -> list[int]:
        masks = self.node_masks()
        return [masks[i] for i in self.output_ids]

    def realized_matrix(self) -> GF2Matrix:
        out = np.zeros((self.n_outputs, self.n_inputs), dtype=np.uint8)
        for i, mask in enumerate(self.output_masks()):
            out[i, mask_indices(mask)] = 1
        return out

    def evaluate(self, x: Sequence[int]) -> BitVector:
        x = as_bits(x)
        if x.size != self.n_inputs:
            raise ValueError(f"circuit has {self.n_inputs} inputs, got vector of length {x.size}")
        xs = x.tolist()
        vals = [0] * len(self.preds)
        for k, (kind, p) in enumerate(zip(self.kinds, self.preds)):
            if kind == INPUT:
                vals[k] = xs[self.indices[k]]
            elif p:
                vals[k] = sum(map(vals.__getitem__, p)) & 1
        return np.array([vals[i] for i in self.output_ids], dtype=np.uint8)

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        """Evaluate many input vectors (rows of ``X``) in one bit-sliced pass."""
        X = np.asarray(X, dtype=np.uint8)
        if X.ndim != 2 or X.shape[1] != self.n_inputs:
            raise ValueError(f"expected a (T, {self.n_inputs}) array, got shape {X.shape}")
        T = X.shape[0]
        # column j packed into one int: bit t is input j of trial t
        packed = np.packbits(X.T, axis=1, bitorder="little")
        cols = [int.from_bytes(row.tobytes(), "little") for row in packed]
        vals = [0] * len(self.preds)
        for k, (kind, p) in enumerate(zip(self.kinds, self.preds)):
            if kind == INPUT:
                vals[k] = cols[self.indices[k]]
            elif p:
                vals[k] = reduce(xor, map(vals.__getitem__, p))
        nbytes = (T + 7) // 8
        out = np.zeros((T, self.n_outputs), dtype=np.uint8)
        for i, k in enumerate(self.output_ids):
            raw = np.frombuffer(vals[k].to_bytes(nbytes, "little"), dtype=np.uint8)
            out[:, i] = np.unpackbits(raw, bitorder="little")[:T]
        return out

    def levels(self) -> list[int]:
        lev = [0] * len(self.preds)
        for k, p in enumerate(self.preds):
            if p:
                lev[k] = 1 + max(map(lev.__getitem__, p))
        return lev

    def stats(self) -> dict[str, int]:
        lev = self.levels()
        return {
            "nodes": len(self.preds),
            "edges": self.n_edges,
            "depth": max(lev, default=0),
        }

    @property
    def n_edges(self) -> int:
        return sum(map(len, self.preds))

    def nodes(self) -> list[Node]:
        return [Node(k, kind, idx, p)
                for k, (kind, idx, p) in enumerate(zip(self.kinds, self.indices, self.preds))]

    def validate(self):
        """Check every structural invariant; raise :class:`CircuitFormatError` naming the node."""
        seen_in, seen_out = set(), set()
        for k, (kind, idx, p) in enumerate(zip(self.kinds, self.indices, self.preds)):
            if kind == INPUT:
                if p:
                    raise CircuitFormatError(f"node {k}: input node with predecessors")
                if idx is None or not 0 <= idx < self.n_inputs or idx in seen_in:
                    raise CircuitFormatError(f"node {k}: bad or duplicate input index {idx}")
                seen_in.add(idx)
            elif kind in (INNER, OUTPUT):
                if kind == OUTPUT:
                    if idx is None or idx < 0 or idx in seen_out:
                        raise CircuitFormatError(f"node {k}: bad or duplicate output index {idx}")
                    seen_out.add(idx)
                if any(b <= a for a, b in zip(p, p[1:])):
                    raise CircuitFormatError(f"node {k}: predecessors not strictly ascending")
                if p and (p[0] < 0 or p[-1] >= k):
                    raise CircuitFormatError(f"node {k}: predecessor id out of range [0, {k})")
            else:
                raise CircuitFormatError(f"node {k}: unknown kind {kind!r}")
        if len(seen_in) != self.n_inputs:
            raise CircuitFormatError(f"expected {self.n_inputs} input nodes, found {len(seen_in)}")
        if seen_out != set(range(len(seen_out))):
            raise CircuitFormatError("output indices are not 0..n_outputs-1")

    # ---------- serialization

    def to_dict(self) -> dict:
        nodes = []
        for k, (kind, idx, p) in enumerate(zip(self.kinds, self.indices, self.preds)):
            if kind == INPUT:
                nodes.append({"id": k, "kind": kind, "index": idx})
            elif kind == OUTPUT:
                nodes.append({"id": k, "kind": kind, "index": idx, "preds": list(p)})
            else:
                nodes.append({"id": k, "kind": kind, "preds": list(p)})
        return {"version": JSON_VERSION, "n_inputs": self.n_inputs,
                "n_outputs": self.n_outputs, "nodes": nodes}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> RectifierCircuit:
        try:
            if data.get("version") != JSON_VERSION:
                raise CircuitFormatError(f"unsupported version {data.get('version')!r}")
            n_in, n_out = int(data["n_inputs"]), int(data["n_outputs"])
            raw_nodes = data["nodes"]
        except (KeyError, TypeError, AttributeError) as exc:
            raise CircuitFormatError(f"malformed circuit header: {exc}") from None
        c = cls(0)
        c.n_inputs = n_in
        for pos, nd in enumerate(raw_nodes):
            try:
                k, kind = nd["id"], nd["kind"]
                if k != pos:
                    raise CircuitFormatError(f"node {k}: ids must be 0,1,2,... in array order")
                if kind == INPUT:
                    if "preds" in nd:
                        raise CircuitFormatError(f"node {k}: input node with predecessors")
                    preds, idx = (), int(nd["index"])
                    c.input_ids.append(k)
                else:
                    preds = tuple(int(p) for p in nd["preds"])
                    idx = int(nd["index"]) if kind == OUTPUT else None
                    if kind == OUTPUT:
                        if idx in c._outputs:
                            raise CircuitFormatError(f"node {k}: duplicate output index {idx}")
                        c._outputs[idx] = k
            except (KeyError, TypeError, ValueError) as exc:
                if isinstance(exc, CircuitFormatError):
                    raise
                raise CircuitFormatError(f"node at position {pos}: malformed entry ({exc})") from None
            c.kinds.append(kind)
            c.indices.append(idx)
            c.preds.append(preds)
        c.validate()
        if c.n_outputs != n_out:
            raise CircuitFormatError(f"header says {n_out} outputs, found {c.n_outputs}")
        c.input_ids.sort(key=lambda k: c.indices[k])
        return c

    @classmethod
    def from_json(cls, text: str) -> RectifierCircuit:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CircuitFormatError(f"not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise CircuitFormatError("top-level JSON value must be an object")
        return cls.from_dict(data)

    def to_dot(self) -> str:
        def name(k):
            if self.kinds[k] == INPUT:
                return f"in{self.indices[k]}"
            if self.kinds[k] == OUTPUT:
                return f"out{self.indices[k]}"
            return f"v{k}"

        lines = ["digraph circuit {", "  rankdir=LR;"]
        ins = [name(k) for k in self.input_ids]
        outs = [name(k) for k in self.output_ids]
        if ins:
            lines.append("  { rank=source; " + " ".join(f"{v};" for v in ins) + " }")
        if outs:
            lines.append("  { rank=sink; " + " ".join(f"{v};" for v in outs) + " }")
        for k, kind in enumerate(self.kinds):
            shape = {INPUT: "box", OUTPUT: "doublecircle"}.get(kind, "circle")
            lines.append(f"  {name(k)} [shape={shape}];")
        for k, p in enumerate(self.preds):
            for src in p:
                lines.append(f"  {name(src)} -> {name(k)};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, RectifierCircuit):
            return NotImplemented
        return (self.n_inputs == other.n_inputs and self.kinds == other.kinds
                and self.indices == other.indices and self.preds == other.preds)

    def __repr__(self):
        st = self.stats()
        return (f"RectifierCircuit(n_inputs={self.n_inputs}, n_outputs={self.n_outputs}, "
                f"nodes={st['nodes']}, edges={st['edges']}, depth={st['depth']})")


def restrict(c: RectifierCircuit, n_keep_inputs: int,
             output_rows: Sequence[Iterable[int]]) -> RectifierCircuit:
    """Keep only the first ``n_keep_inputs`` inputs and rebuild the output layer.

    Dropped inputs are constant zero: their edges vanish, and so does every
    node left without predecessors.  New output ``i`` is the XOR of old
    outputs ``output_rows[i]``, realized by merging their predecessor lists
    into one node, so depth does not grow; old outputs must therefore feed
    nothing.  Nodes that no longer reach an output are pruned.
    """
    if not 0 <= n_keep_inputs <= c.n_inputs:
        raise ValueError(f"cannot keep {n_keep_inputs} of {c.n_inputs} inputs")
    old_out = c.output_ids
    out_set = set(old_out)
    for p in c.preds:
        if out_set.intersection(p):
            raise ValueError("restrict needs output nodes that feed nothing")

    zero = [False] * len(c.preds)
    for k in c.input_ids:
        zero[k] = c.indices[k] >= n_keep_inputs
    kept: list[tuple[int, ...]] = [()] * len(c.preds)
    for k, (kind, p) in enumerate(zip(c.kinds, c.preds)):
        if kind == INNER:
            kp = tuple(q for q in p if not zero[q])
            kept[k] = kp
            zero[k] = not kp
    merged_rows = [parity_reduce(q for t in row for q in c.preds[old_out[t]] if not zero[q])
                   for row in output_rows]

    alive = [False] * len(c.preds)
    for row in merged_rows:
        for q in row:
            alive[q] = True
    for k in range(len(c.preds) - 1, -1, -1):
        if alive[k] and c.kinds[k] == INNER:
            for q in kept[k]:
                alive[q] = True

    new = RectifierCircuit(n_keep_inputs)
    remap = {c.input_ids[i]: i for i in range(n_keep_inputs)}
    for k, kind in enumerate(c.kinds):
        if kind == INNER and alive[k]:
            remap[k] = new.add_node(map(remap.__getitem__, kept[k]))
    for row in merged_rows:
        new.add_node(map(remap.__getitem__, row), output=True)
    return new


def wire_circuit(n: int) -> RectifierCircuit:
    """Depth-1 identity: output i reads input i."""
    c = RectifierCircuit(n)
    c.add_linear_layer(range(n), ([i] for i in range(n)), as_outputs=True)
    return c


def edge_mutation(c: RectifierCircuit, node_id: int, pred: int) -> RectifierCircuit:
    """Copy of ``c`` with the edge ``pred -> node_id`` toggled (removed if present, else added)."""
    if c.kinds[node_id] == INPUT:
        raise ValueError("cannot add predecessors to an input node")
    if not 0 <= pred < node_id:
        raise ValueError("mutated edge must respect topological order")
    out = RectifierCircuit.from_dict(c.to_dict())
    out.preds[node_id] = parity_reduce(list(out.preds[node_id]) + [pred])
    return out
