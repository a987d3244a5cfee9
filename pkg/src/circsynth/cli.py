"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from circsynth.circuit import CircuitFormatError, RectifierCircuit
from circsynth.gf2core import (
    CirculantKernel,
    as_bits,
    cyclic_convolve,
    kernel_from_first_row,
    random_kernel,
    read_kernel_text,
)
from circsynth.synthesis import synth
from circsynth.verify import audit_bounds, verify_exact, verify_freivalds

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

BENCH_FIELDS = ["n", "d", "seed", "edges", "depth", "nodes", "bound_base", "ratio", "synth_millis"]


class UsageError(Exception):
    pass


def parse_hex_bits(digits: str, n: int) -> np.ndarray:
    """Big-endian hex: bit 0 is the most significant bit of the first digit.

    Fewer than ``ceil(n/4)`` digits are padded with zero digits on the right;
    pad bits past ``n`` must be zero.
    """
    digits = digits.strip().lower()
    if digits.startswith("0x"):
        digits = digits[2:]
    if not digits or any(ch not in "0123456789abcdef" for ch in digits):
        raise UsageError(f"bad hex kernel {digits!r}")
    need = -(-n // 4)
    if len(digits) > need:
        raise UsageError(f"hex kernel has {4 * len(digits)} bits, more than n={n} allows")
    digits = digits.ljust(need, "0")
    bits = [int(b) for ch in digits for b in format(int(ch, 16), "04b")]
    if any(bits[n:]):
        raise UsageError(f"hex kernel sets bits beyond n={n}")
    return as_bits(bits[:n])


def load_kernel(source: str, n: int, is_convolution: bool) -> CirculantKernel:
    """Resolve ``random:SEED``, ``hex:DIGITS`` or a kernel text file into a kernel of order ``n``."""
    if source.startswith("random:"):
        try:
            seed = int(source[len("random:"):])
        except ValueError:
            raise UsageError(f"bad random seed in {source!r}") from None
        bits = random_kernel(n, seed).a
    elif source.startswith("hex:"):
        bits = parse_hex_bits(source[len("hex:"):], n)
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read kernel file {source}: {exc.strerror}") from None
        try:
            bits = read_kernel_text(text)
        except ValueError as exc:
            raise UsageError(f"bad kernel file {source}: {exc}") from None
        if bits.size != n:
            raise UsageError(f"kernel file has length {bits.size} but n={n}")
    return CirculantKernel(n, bits) if is_convolution else kernel_from_first_row(bits)


def load_circuit(path: str) -> RectifierCircuit:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read circuit file {path}: {exc.strerror}") from None
    try:
        return RectifierCircuit.from_json(text)
    except CircuitFormatError as exc:
        raise UsageError(f"invalid circuit file {path}: {exc}") from None


def write_text(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_kernel_flags(p: argparse.ArgumentParser):
    p.add_argument("--kernel", required=True, help="kernel file path, hex:DIGITS or random:SEED")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--first-row", dest="is_convolution", action="store_false",
                   help="kernel bits are the circulant's first row (default)")
    g.add_argument("--kernel-is-convolution", dest="is_convolution", action="store_true",
                   help="kernel bits are the convolution kernel itself")
    p.set_defaults(is_convolution=False)


def cmd_synth(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if args.depth < 1:
        raise UsageError("--depth must be at least 1")
    kernel = load_kernel(args.kernel, args.n, args.is_convolution)
    c = synth(kernel, args.depth, wrap=not args.no_wrap)
    write_text(args.out, c.to_json())
    if args.dot:
        write_text(args.dot, c.to_dot())
    st = c.stats()
    print(json.dumps({"n": args.n, "d": args.depth, **st}))
    return EXIT_OK


def cmd_verify(args) -> int:
    c = load_circuit(args.circuit)
    if c.n_inputs != c.n_outputs:
        raise UsageError(f"circuit is {c.n_outputs}x{c.n_inputs}, not square")
    kernel = load_kernel(args.kernel, c.n_inputs, args.is_convolution)
    if args.mode == "exact":
        res = verify_exact(c, kernel)
    else:
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        res = verify_freivalds(c, kernel, args.trials, args.seed)
    print(f"{args.mode}: {res.describe()}")
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_eval(args) -> int:
    c = load_circuit(args.circuit)
    bits = args.input.strip()
    if set(bits) - {"0", "1"}:
        raise UsageError("--input must be a string of 0/1 characters")
    if len(bits) != c.n_inputs:
        raise UsageError(f"--input has length {len(bits)}, circuit expects {c.n_inputs}")
    out = c.evaluate([int(ch) for ch in bits])
    print("".join(map(str, out.tolist())))
    return EXIT_OK


def bench_rows(ns, depths, seeds, wrap=True):
    for n in ns:
        for d in depths:
            for seed in range(seeds):
                kernel = random_kernel(n, seed)
                t0 = time.perf_counter()
                c = synth(kernel, d, wrap=wrap)
                millis = (time.perf_counter() - t0) * 1000
                rep = audit_bounds(c, d)
                yield {"n": n, "d": d, "seed": seed, "edges": rep.edges, "depth": rep.depth_measured,
                       "nodes": rep.nodes, "bound_base": f"{rep.bound_base:.6f}",
                       "ratio": f"{rep.ratio:.6f}", "synth_millis": f"{millis:.1f}"}


def cmd_bench(args) -> int:
    if not args.ns or not args.depths or min(args.ns) < 1 or min(args.depths) < 1:
        raise UsageError("--ns and --depths need positive integers")
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    try:
        fh = open(args.csv, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {args.csv}: {exc.strerror}") from None
    with fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        w.writeheader()
        for row in bench_rows(args.ns, args.depths, args.seeds, wrap=not args.no_wrap):
            w.writerow(row)
            print(" ".join(f"{k}={row[k]}" for k in BENCH_FIELDS), flush=True)
    return EXIT_OK


def cmd_stats(args) -> int:
    c = load_circuit(args.circuit)
    print(json.dumps({"n_inputs": c.n_inputs, "n_outputs": c.n_outputs, **c.stats()}))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    c = load_circuit(args.circuit)
    dot = c.to_dot()
    if args.out:
        write_text(args.out, dot)
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circsynth",
        description="Bounded-depth XOR (modulo-2 rectifier) circuits for Boolean circulant matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a circuit for a circulant matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    _add_kernel_flags(p)
    p.add_argument("--out", required=True, help="circuit JSON output path")
    p.add_argument("--dot", help="also write a DOT rendering here")
    p.add_argument("--no-wrap", action="store_true", help="always use the linear (3^m >= 2q) schedule")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check a circuit against a circulant")
    p.add_argument("--circuit", required=True)
    _add_kernel_flags(p)
    p.add_argument("--mode", choices=["exact", "freivalds"], default="exact")
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="evaluate a circuit on one input vector")
    p.add_argument("--circuit", required=True)
    p.add_argument("--input", required=True, help="bit string, index 0 first")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="size/depth table over a grid of (n, d, seed)")
    p.add_argument("--ns", type=_int_list, required=True)
    p.add_argument("--depths", type=_int_list, required=True)
    p.add_argument("--seeds", type=int, default=1, help="number of seeds, 0..K-1")
    p.add_argument("--csv", required=True)
    p.add_argument("--no-wrap", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="print node/edge/depth counts of a circuit")
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-dot", help="write a circuit as Graphviz DOT")
    p.add_argument("--circuit", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"circsynth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
