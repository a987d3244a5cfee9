import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circsynth.circuit import (
    CircuitFormatError,
    RectifierCircuit,
    edge_mutation,
    restrict,
    wire_circuit,
)
from circsynth.gf2core import (
    circulant_to_matrix,
    kernel_from_first_row,
    mat_vec_mod2,
    random_kernel,
)
from circsynth.synthesis import synth_trivial

from helpers import random_circuit


def test_wire_layer_is_identity():
    c = wire_circuit(5)
    assert np.array_equal(c.realized_matrix(), np.eye(5, dtype=np.uint8))
    assert c.stats() == {"nodes": 10, "edges": 5, "depth": 1}


def test_single_xor_node():
    c = RectifierCircuit(2)
    c.add_linear_layer([0, 1], [{0, 1}], as_outputs=True)
    assert c.realized_matrix().tolist() == [[1, 1]]


def test_empty_row_is_zero_row():
    c = RectifierCircuit(3)
    c.add_linear_layer([0, 1, 2], [[], [2]], as_outputs=True)
    assert c.realized_matrix().tolist() == [[0, 0, 0], [0, 0, 1]]


def test_layer_errors():
    c = RectifierCircuit(2)
    with pytest.raises(IndexError):
        c.add_linear_layer([0, 1], [[2]])
    c.add_node([0], output_index=0)
    with pytest.raises(ValueError):
        c.add_node([1], output_index=0)
    with pytest.raises(ValueError):
        c.add_node([5])


def test_layer_depth_grows_by_one():
    c = RectifierCircuit(3)
    first = c.add_linear_layer(range(3), [[0, 1], [1, 2]])
    second = c.add_linear_layer(first, [[0, 1]], as_outputs=True)
    lev = c.levels()
    assert [lev[k] for k in first] == [1, 1]
    assert lev[second[0]] == 2


def test_duplicate_preds_cancel():
    c = RectifierCircuit(2)
    c.add_node([0, 0, 1], output=True)
    assert c.preds[-1] == (1,)
    assert c.realized_matrix().tolist() == [[0, 1]]


def test_parity_cancellation_of_paths():
    c = RectifierCircuit(1)
    x = c.add_node([0])
    y = c.add_node([0])
    c.add_node([x, y], output=True)
    assert c.realized_matrix().tolist() == [[0]]
    assert c.n_edges == 4


def test_edgeless_circuit():
    c = RectifierCircuit(3)
    for _ in range(2):
        c.add_node(output=True)
    assert not c.realized_matrix().any()
    assert c.stats() == {"nodes": 5, "edges": 0, "depth": 0}


def test_trivial_circuit_realizes_circulant():
    r = np.array([1, 0, 1, 1, 0, 0, 1, 0], np.uint8)
    c = synth_trivial(kernel_from_first_row(r))
    assert np.array_equal(c.realized_matrix(), circulant_to_matrix(r))
    assert c.stats()["edges"] == int(circulant_to_matrix(r).sum()) == 8 * 4
    assert c.stats()["depth"] == 1


def test_splice_wire_copy_keeps_map():
    outer = RectifierCircuit(4)
    layer = outer.add_linear_layer(range(4), [[0, 1], [1], [2, 3], [3]])
    before = outer.n_edges
    remap = outer.splice(layer, wire_circuit(4))
    assert outer.n_edges == before + 4
    outer.add_linear_layer([remap[o] for o in wire_circuit(4).output_ids], [[i] for i in range(4)],
                           as_outputs=True)
    assert outer.realized_matrix().tolist() == [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]]


def test_splice_depth_and_edges_additive():
    outer = RectifierCircuit(6)
    attach = outer.add_linear_layer(range(6), [[0], [1, 2], [2], [3], [4, 5], [5]])
    a = random_circuit(3, 6, 3, seed=1, density=0.5)
    b = random_circuit(3, 4, 3, seed=2, density=0.5)
    e0 = outer.n_edges
    ra = outer.splice(attach[:3], a)
    rb = outer.splice(attach[3:], b)
    assert outer.n_edges == e0 + a.n_edges + b.n_edges
    outs = [ra[o] for o in a.output_ids] + [rb[o] for o in b.output_ids]
    outer.add_linear_layer(outs, [[i] for i in range(6)], as_outputs=True)
    lev = outer.levels()
    assert max(lev[ra[o]] for o in a.output_ids) <= 1 + a.stats()["depth"]
    # block-diagonal realized map: composition of the first layer and each block
    first = np.zeros((6, 6), np.uint8)
    for i, row in enumerate([[0], [1, 2], [2], [3], [4, 5], [5]]):
        first[i, row] = 1
    block = np.zeros((6, 6), np.uint8)
    block[:3, :3] = a.realized_matrix()
    block[3:, 3:] = b.realized_matrix()
    assert np.array_equal(outer.realized_matrix(), (block.astype(int) @ first) % 2)


def test_splice_length_mismatch():
    with pytest.raises(ValueError):
        RectifierCircuit(2).splice([0], wire_circuit(2))


@pytest.mark.parametrize("seed", range(5))
def test_evaluate_matches_matrix_exhaustively(seed):
    n = 4 + 2 * seed
    c = random_circuit(n, 12, 5, seed)
    M = c.realized_matrix()
    for bits in itertools.product([0, 1], repeat=n):
        assert np.array_equal(c.evaluate(bits), mat_vec_mod2(M, bits))


def test_evaluate_matches_matrix_random_large():
    c = random_circuit(40, 60, 20, seed=11, density=0.1)
    M = c.realized_matrix()
    rng = np.random.default_rng(0)
    X = rng.integers(0, 2, (100, 40), dtype=np.uint8)
    batch = c.evaluate_batch(X)
    for t, x in enumerate(X):
        assert np.array_equal(c.evaluate(x), mat_vec_mod2(M, x))
        assert np.array_equal(batch[t], mat_vec_mod2(M, x))


def test_evaluate_errors_and_zero():
    c = random_circuit(5, 5, 3, seed=3)
    assert not c.evaluate([0] * 5).any()
    with pytest.raises(ValueError):
        c.evaluate([0] * 4)
    with pytest.raises(ValueError):
        c.evaluate_batch(np.zeros((2, 4), np.uint8))


@settings(max_examples=50)
@given(st.integers(0, 10_000), st.integers(1, 12))
def test_linearity(seed, n):
    c = random_circuit(n, 10, 4, seed)
    rng = np.random.default_rng(seed)
    x, x2 = rng.integers(0, 2, (2, n), dtype=np.uint8)
    assert np.array_equal(c.evaluate(x ^ x2), c.evaluate(x) ^ c.evaluate(x2))


def test_json_roundtrip():
    c = random_circuit(7, 20, 6, seed=4)
    text = c.to_json()
    back = RectifierCircuit.from_json(text)
    assert back == c
    assert back.to_json() == text
    assert back.stats() == c.stats()
    assert np.array_equal(back.realized_matrix(), c.realized_matrix())


def test_json_schema_shape():
    c = RectifierCircuit(2)
    c.add_node([1, 0], output=True)
    data = json.loads(c.to_json())
    assert data == {"version": 1, "n_inputs": 2, "n_outputs": 1, "nodes": [
        {"id": 0, "kind": "input", "index": 0},
        {"id": 1, "kind": "input", "index": 1},
        {"id": 2, "kind": "output", "index": 0, "preds": [0, 1]},
    ]}


def _doc(nodes, n_in=1, n_out=1):
    return json.dumps({"version": 1, "n_inputs": n_in, "n_outputs": n_out, "nodes": nodes})


@pytest.mark.parametrize("text, needle", [
    (_doc([{"id": 0, "kind": "input", "index": 0},
           {"id": 1, "kind": "output", "index": 0, "preds": [1]}]), "node 1"),
    (_doc([{"id": 0, "kind": "input", "index": 0},
           {"id": 1, "kind": "output", "index": 0, "preds": [0]},
           {"id": 2, "kind": "output", "index": 0, "preds": [0]}], n_out=2), "node 2"),
    (_doc([{"id": 0, "kind": "input", "index": 0},
           {"id": 1, "kind": "input", "index": 0}]), "node 1"),
    (_doc([{"id": 0, "kind": "input", "index": 0},
           {"id": 1, "kind": "inner", "preds": [0, 0]}], n_out=0), "node 1"),
    (_doc([{"id": 0, "kind": "input", "index": 0},
           {"id": 2, "kind": "inner", "preds": [0]}], n_out=0), "node 2"),
    (_doc([{"id": 0, "kind": "input", "index": 0, "preds": []}], n_out=0), "node 0"),
    (_doc([{"id": 0, "kind": "gate", "preds": []}], n_in=0, n_out=0), "node 0"),
    ("{not json", "JSON"),
    ("[]", "object"),
    (json.dumps({"version": 2, "n_inputs": 0, "n_outputs": 0, "nodes": []}), "version"),
    (_doc([{"id": 0, "kind": "input", "index": 0}], n_out=1), "outputs"),
])
def test_from_json_rejects(text, needle):
    with pytest.raises(CircuitFormatError, match=needle):
        RectifierCircuit.from_json(text)


def _dot_counts(text):
    edges = sum(1 for ln in text.splitlines() if "->" in ln)
    nodes = sum(1 for ln in text.splitlines() if "[shape=" in ln)
    return nodes, edges


def test_dot_export():
    empty = RectifierCircuit(0)
    text = empty.to_dot()
    assert text.startswith("digraph") and _dot_counts(text) == (0, 0)
    one = RectifierCircuit(1)
    one.add_node([0], output=True)
    assert _dot_counts(one.to_dot()) == (2, 1)
    assert "in0 -> out0;" in one.to_dot()
    c = random_circuit(6, 15, 4, seed=8)
    st_ = c.stats()
    assert _dot_counts(c.to_dot()) == (st_["nodes"], st_["edges"])
    assert c.to_dot() == c.to_dot()


def test_restrict_drops_inputs_and_merges_outputs():
    c = synth_trivial(random_kernel(8, 1))
    M = c.realized_matrix()
    rows = [[0, 1], [2], [], [3, 4, 5]]
    r = restrict(c, 5, rows)
    want = np.stack([M[row].sum(axis=0) % 2 if row else np.zeros(8, int) for row in rows])[:, :5]
    assert np.array_equal(r.realized_matrix(), want.astype(np.uint8))
    assert r.stats()["depth"] <= c.stats()["depth"]


def test_restrict_requires_sink_outputs():
    c = RectifierCircuit(1)
    o = c.add_node([0], output=True)
    c.add_node([o], output=True)
    with pytest.raises(ValueError):
        restrict(c, 1, [[0]])


def test_edge_mutation_toggles():
    c = wire_circuit(3)
    out = c.output_ids[1]
    m = edge_mutation(c, out, 0)
    assert m.realized_matrix()[1].tolist() == [1, 1, 0]
    m2 = edge_mutation(m, out, 0)
    assert m2 == c
    with pytest.raises(ValueError):
        edge_mutation(c, 0, 0)
