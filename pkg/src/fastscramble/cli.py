"""Seeded command-line front-end, one subcommand per experiment family.

Every run echoes its full configuration into the output and derives all
randomness from --seed, so identical invocations produce byte-identical
files.  Floats are printed with 17 significant digits to round-trip.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .circuits import (
    CircuitProgram,
    apply_layer,
    build_hypercube_circuit,
    build_nn_bricklayer,
    build_random_all_to_all,
    build_random_nn,
    build_scrambling_circuit,
    execute,
    is_interaction,
    truncate_interactions,
)
from .dense import ResourceCapError
from .experiments import (
    PageStats,
    page_curve,
    rmt_deficit_moments_bits,
    rmt_mean_deficit,
    rmt_rank_prob,
)
from .gf2 import random_bitmatrix, rank_gf2
from .graphstate import graph_entropy_bits, hypercube
from .haydenpreskill import channel_state, min_r_for_saturation
from .seeding import substream
from .tableau import StabilizerTableau

N_EPS_COLUMNS = 5
SATURATION_THRESHOLD = 0.95
FULL_PAGE_SIZES = (128, 256)
FULL_MI_SIZES = (16, 32, 64, 128)
FULL_MI_ALICE = 5


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _int_list(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _float_list(text: str) -> list[float]:
    if not text:
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _config_lines(config: dict) -> list[str]:
    return [f"# {key}={_fmt(value)}" for key, value in config.items()]


def _render_csv(config: dict, tables: dict) -> dict[str, str]:
    """One CSV text per table, each repeating the config header."""
    out = {}
    for name, (fields, rows) in tables.items():
        buf = io.StringIO()
        for line in _config_lines(config):
            buf.write(line + "\n")
        buf.write(f"# table={name}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row[f]) for f in fields])
        out[name] = buf.getvalue()
    return out


def _emit(args, config: dict, tables: dict, main_table: str) -> None:
    """Writes the main table to --out (or stdout); extra tables get
    sibling files suffixed with the table name."""
    if args.format == "json":
        doc = {
            "config": {k: v for k, v in config.items()},
            "tables": {name: rows for name, (_, rows) in tables.items()},
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    rendered = _render_csv(config, tables)
    if not args.out:
        for name in tables:
            sys.stdout.write(rendered[name])
        return
    for name in tables:
        if name == main_table:
            path = args.out
        else:
            stem, dot, ext = args.out.rpartition(".")
            path = f"{stem}.{name}.{ext}" if dot else f"{args.out}.{name}"
        with open(path, "w") as fh:
            fh.write(rendered[name])


def _build_program(parser, kind: str, n: int, depth: int | None, seed: int) -> CircuitProgram:
    if n < 2:
        parser.error("--N must be at least 2")
    if kind in ("es", "qm"):
        m = n.bit_length() - 1
        if n != 1 << m:
            parser.error(f"--circuit {kind} needs N a power of two, got {n}")
        prog = build_scrambling_circuit(m) if kind == "es" else build_hypercube_circuit(m)
        if depth is not None:
            if not 0 <= depth <= prog.interaction_count:
                parser.error(f"--depth outside 0..{prog.interaction_count} for {kind}")
            prog = truncate_interactions(prog, depth)
        return prog
    if depth is None:
        parser.error(f"--circuit {kind} requires --depth")
    if depth < 1:
        parser.error("--depth must be positive")
    if kind == "nn":
        return build_random_nn(n, depth, substream(seed, "circuit-nn", 0))
    return build_random_all_to_all(n, depth, substream(seed, "circuit-a2a", 0))


def _stats_row(config: dict, t: int, st: PageStats) -> dict:
    row = {
        "experiment": config["subcommand"],
        "N": config["N"],
        "t": t,
        "size_A": st.size,
        "mean_S_bits": st.mean_entropy_bits,
        "mean_deficit_bits": st.mean_deficit_bits,
        "stderr": st.stderr_deficit_bits,
        "samples": st.samples,
        "seed": config["seed"],
    }
    for eps in range(N_EPS_COLUMNS):
        row[f"f_eps{eps}"] = st.deficit_fraction(eps)
    return row


PAGE_FIELDS = [
    "experiment", "N", "t", "size_A", "mean_S_bits", "mean_deficit_bits",
    "stderr", "f_eps0", "f_eps1", "f_eps2", "f_eps3", "f_eps4",
    "samples", "seed",
]


def _run_page_curve_once(args, parser, n: int, rows: list) -> None:
    prog = _build_program(parser, args.circuit, n, args.depth, args.seed)
    state = StabilizerTableau.new_polarized(n, args.basis)
    config_stub = {"subcommand": "page-curve", "N": n, "seed": args.seed}
    t = 0
    for st in page_curve(state, [n // 2], args.samples, args.seed, label=f"ts{t}"):
        rows.append(_stats_row(config_stub, t, st))
    for layer in prog.layers:
        apply_layer(layer, state)
        if is_interaction(layer):
            t += 1
            for st in page_curve(state, [n // 2], args.samples, args.seed, label=f"ts{t}"):
                rows.append(_stats_row(config_stub, t, st))
    for st in page_curve(state, args.sizes, args.samples, args.seed, label="page"):
        rows.append(_stats_row(config_stub, t, st))


def cmd_page_curve(args, parser) -> int:
    rows: list[dict] = []
    if args.full:
        for n in FULL_PAGE_SIZES:
            full_args = argparse.Namespace(**vars(args))
            full_args.sizes = list(range(1, n // 2 + 1))
            full_args.depth = None
            full_args.circuit = "es"
            _run_page_curve_once(full_args, parser, n, rows)
        n_report = ",".join(str(n) for n in FULL_PAGE_SIZES)
    else:
        if args.N is None:
            parser.error("--N is required without --full")
        _run_page_curve_once(args, parser, args.N, rows)
        n_report = args.N
    config = {
        "subcommand": "page-curve",
        "N": n_report,
        "circuit": "es" if args.full else args.circuit,
        "depth": "" if args.depth is None else args.depth,
        "basis": args.basis,
        "sizes": ",".join(str(s) for s in args.sizes),
        "samples": args.samples,
        "full": int(args.full),
        "seed": args.seed,
    }
    _emit(args, config, {"curve": (PAGE_FIELDS, rows)}, "curve")
    return 0


def cmd_hypercube(args, parser) -> int:
    if args.m < 1:
        parser.error("--m must be at least 1")
    n = 1 << args.m
    prog = build_hypercube_circuit(args.m)
    state = StabilizerTableau.new_polarized(n, "x")
    execute(prog, state)
    graph = hypercube(args.m)
    sizes = args.sizes or list(range(1, min(16, n // 2) + 1))
    checks = min(args.samples, 100)
    for size in sizes:
        if not 0 <= size <= n:
            parser.error(f"--sizes entry {size} outside 0..{n}")
        rng = substream(args.seed, f"hypercube-check{size}", 0)
        for _ in range(checks):
            subset = sorted(int(q) for q in rng.choice(n, size, replace=False))
            s_circuit = state.renyi2_entropy_bits(subset)
            s_graph = graph_entropy_bits(graph, subset)
            if s_circuit != s_graph:
                raise RuntimeError(
                    f"circuit/graph entropy mismatch at subset {subset}: "
                    f"{s_circuit} vs {s_graph}"
                )
    config = {
        "subcommand": "hypercube",
        "m": args.m,
        "N": n,
        "sizes": ",".join(str(s) for s in sizes),
        "samples": args.samples,
        "seed": args.seed,
    }
    config_stub = {"subcommand": "hypercube", "N": n, "seed": args.seed}
    rows = [
        _stats_row(config_stub, args.m, st)
        for st in page_curve(state, sizes, args.samples, args.seed, label="hypercube")
    ]
    _emit(args, config, {"curve": (PAGE_FIELDS, rows)}, "curve")
    return 0


MI_FIELDS = ["N", "t", "size_A", "size_R", "mean_I2_bits", "stderr", "samples", "seed"]
RMIN_FIELDS = ["N", "t", "size_A", "r_min", "threshold", "samples", "seed"]


def _run_mutual_info_once(args, parser, n: int, curve_rows: list, rmin_rows: list) -> None:
    prog = _build_program(parser, args.circuit, n, args.depth, args.seed)
    cs = channel_state(prog)
    t = prog.interaction_count
    for size_a in args.sizes:
        if not 1 <= size_a <= n:
            parser.error(f"--sizes entry {size_a} outside 1..{n}")
        r_min, curve = min_r_for_saturation(
            cs,
            size_a,
            samples=args.samples,
            seed=args.seed,
            threshold=SATURATION_THRESHOLD,
            random_alice=(args.alice == "random"),
        )
        for st in curve:
            curve_rows.append({
                "N": n, "t": t, "size_A": size_a, "size_R": st.size_r,
                "mean_I2_bits": st.mean_bits, "stderr": st.stderr_bits,
                "samples": st.samples, "seed": args.seed,
            })
        rmin_rows.append({
            "N": n, "t": t, "size_A": size_a,
            "r_min": n if r_min is None else r_min,
            "threshold": SATURATION_THRESHOLD,
            "samples": args.samples, "seed": args.seed,
        })


def cmd_mutual_info(args, parser) -> int:
    curve_rows: list[dict] = []
    rmin_rows: list[dict] = []
    if args.full:
        full_args = argparse.Namespace(**vars(args))
        full_args.sizes = [FULL_MI_ALICE]
        full_args.depth = None
        full_args.circuit = "es"
        for n in FULL_MI_SIZES:
            _run_mutual_info_once(full_args, parser, n, curve_rows, rmin_rows)
        n_report = ",".join(str(n) for n in FULL_MI_SIZES)
        sizes_report = str(FULL_MI_ALICE)
    else:
        if args.N is None:
            parser.error("--N is required without --full")
        _run_mutual_info_once(args, parser, args.N, curve_rows, rmin_rows)
        n_report = args.N
        sizes_report = ",".join(str(s) for s in args.sizes)
    config = {
        "subcommand": "mutual-info",
        "N": n_report,
        "circuit": "es" if args.full else args.circuit,
        "depth": "" if args.depth is None else args.depth,
        "sizes": sizes_report,
        "samples": args.samples,
        "alice": args.alice,
        "threshold": SATURATION_THRESHOLD,
        "full": int(args.full),
        "seed": args.seed,
    }
    _emit(
        args, config,
        {"curve": (MI_FIELDS, curve_rows), "rmin": (RMIN_FIELDS, rmin_rows)},
        "curve",
    )
    return 0


DECODER_FIELDS = [
    "N", "size_A", "size_R", "t", "p", "crosstalk", "P_EPR", "F_EPR", "delta",
    "stderr_F", "stderr_P", "trajectories", "seed",
]


def cmd_decoder(args, parser) -> int:
    from .dense import DecoderSetup, run_decoder

    if args.N is None:
        parser.error("--N is required")
    depths = args.depth if args.depth else [None]
    rows: list[dict] = []
    for depth in depths:
        prog = _build_program(parser, args.circuit, args.N, depth, args.seed)
        t = prog.interaction_count
        for p in args.p:
            if not 0.0 <= p <= 1.0:
                parser.error(f"--p entry {p} outside 0..1")
            setup = DecoderSetup(
                program=prog,
                alice_inputs=tuple(range(args.alice_size)),
                p=p,
                crosstalk=(args.crosstalk == "on"),
            )
            for size_r in args.sizes:
                if not 0 <= size_r <= args.N:
                    parser.error(f"--sizes entry {size_r} outside 0..{args.N}")
                st = run_decoder(setup, size_r, args.trajectories, args.seed)
                rows.append({
                    "N": args.N, "size_A": args.alice_size, "size_R": size_r,
                    "t": t, "p": p, "crosstalk": args.crosstalk,
                    "P_EPR": st.p_epr, "F_EPR": st.f_epr, "delta": st.delta,
                    "stderr_F": st.stderr_f, "stderr_P": st.stderr_p,
                    "trajectories": st.trajectories, "seed": args.seed,
                })
    config = {
        "subcommand": "decoder",
        "N": args.N,
        "circuit": args.circuit,
        "depth": ",".join(str(d) for d in (args.depth or [])),
        "sizes": ",".join(str(s) for s in args.sizes),
        "p": ",".join(_fmt(p) for p in args.p),
        "crosstalk": args.crosstalk,
        "alice_size": args.alice_size,
        "trajectories": args.trajectories,
        "seed": args.seed,
    }
    _emit(args, config, {"decoder": (DECODER_FIELDS, rows)}, "decoder")
    return 0


RMT_FIELDS = [
    "N", "size_A", "closed_mean_deficit_bits", "exact_mean_deficit_bits",
    "exact_std_bits", "p_eps0", "p_eps1", "p_eps2", "p_eps3", "p_eps4",
    "mc_mean_deficit_bits", "mc_stderr", "samples", "seed",
]


def cmd_rmt(args, parser) -> int:
    if args.N is None:
        parser.error("--N is required")
    n = args.N
    sizes = args.sizes or list(range(1, (n - 1) // 2 + 1))
    rows: list[dict] = []
    for a in sizes:
        if not 1 <= 2 * a < n:
            parser.error(f"--sizes entry {a} violates 2a < N for N={n}")
        mean_bits, std_bits = rmt_deficit_moments_bits(n, a)
        total = 0
        total_sq = 0
        for k in range(args.samples):
            rng = substream(args.seed, f"rmt-mc-{a}", k)
            mat = random_bitmatrix(n, 2 * a, rng)
            eps = 2 * a - rank_gf2(mat)
            total += eps
            total_sq += eps * eps
        mc_mean = total / args.samples
        var = (total_sq - args.samples * mc_mean**2) / (args.samples - 1)
        row = {
            "N": n, "size_A": a,
            "closed_mean_deficit_bits": rmt_mean_deficit(n, a) / math.log(2),
            "exact_mean_deficit_bits": mean_bits,
            "exact_std_bits": std_bits,
            "mc_mean_deficit_bits": mc_mean,
            "mc_stderr": (max(var, 0.0) / args.samples) ** 0.5,
            "samples": args.samples, "seed": args.seed,
        }
        for eps in range(N_EPS_COLUMNS):
            row[f"p_eps{eps}"] = rmt_rank_prob(n, a, eps)
        rows.append(row)
    config = {
        "subcommand": "rmt",
        "N": n,
        "sizes": ",".join(str(s) for s in sizes),
        "samples": args.samples,
        "seed": args.seed,
    }
    _emit(args, config, {"rmt": (RMT_FIELDS, rows)}, "rmt")
    return 0


def _add_common(sub, *, seed_required=True):
    sub.add_argument("--seed", type=int, required=seed_required,
                     help="master random seed (required; no wall-clock default)")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastscramble",
        description="Entropy and information-retrieval experiments on "
                    "shuffle-based scrambling circuits.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("page-curve", help="deficit time series and Page curve")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--circuit", choices=("es", "qm", "nn", "a2a"), default="es")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--sizes", type=_int_list, default=[])
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--basis", choices=("x", "y", "z"), default="z")
    p.add_argument("--full", action="store_true",
                   help="rerun the large-N curves (N=128,256); slow")
    _add_common(p)
    p.set_defaults(func=cmd_page_curve)

    p = subs.add_parser("hypercube", help="hypercube graph-state cross-check and deficits")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sizes", type=_int_list, default=[])
    p.add_argument("--samples", type=int, default=20000)
    _add_common(p)
    p.set_defaults(func=cmd_hypercube)

    p = subs.add_parser("mutual-info", help="information retrieval vs |R|")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--circuit", choices=("es", "qm", "nn", "a2a"), default="es")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--sizes", type=_int_list, default=[1, 3, 5],
                   help="Alice input sizes |A|")
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--alice", choices=("contiguous", "random"), default="contiguous")
    p.add_argument("--full", action="store_true",
                   help="rerun the |A|=5 collapse across N=16..128; slow")
    _add_common(p)
    p.set_defaults(func=cmd_mutual_info)

    p = subs.add_parser("decoder", help="noisy teleportation-decoder sweep")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--circuit", choices=("es", "qm", "nn", "a2a"), default="es")
    p.add_argument("--depth", type=_int_list, default=[],
                   help="comma list of interaction depths")
    p.add_argument("--sizes", type=_int_list, default=[1, 2, 3],
                   help="measured output sizes |R|")
    p.add_argument("--p", type=_float_list, default=[0.0],
                   help="comma list of depolarizing strengths")
    p.add_argument("--crosstalk", choices=("on", "off"), default="on")
    p.add_argument("--alice-size", type=int, default=1)
    p.add_argument("--trajectories", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_decoder)

    p = subs.add_parser("rmt", help="random-matrix rank law tables and Monte Carlo")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--sizes", type=_int_list, default=[])
    p.add_argument("--samples", type=int, default=20000)
    _add_common(p)
    p.set_defaults(func=cmd_rmt)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
