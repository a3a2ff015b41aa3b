"""Command-line runner: ``walkforge <subcommand> [options]``.

Every subcommand writes CSV (default) or JSON to ``--output`` via a
temporary file and rename, or to stdout when no output path is given.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import (
    NoiseSpec,
    load_circuit,
    parse_angle,
    postselect_onehot,
    run_noisy,
    save_circuit,
    simulate_statevector,
)
from .compilers import (
    REFERENCE_PHASES,
    TrotterPlan,
    compile_hypercube_separable,
    compile_onehot_line,
    table_s1_report,
)
from .errors import WalkforgeError
from .extract import (
    CouplingMap,
    ExtractionParams,
    SamplerConfig,
    graph_from_circuit,
    is_chiral,
    sample_perfect_transfer,
)
from .graphs import atomic_write_text, bit_labels, graph_to_dict, hamming_profile, load, parse_bits, save
from .walk import (
    StateVector,
    WalkDistribution,
    WalkParams,
    distribution,
    evolve_hypercube_product,
    line_distribution,
    total_variation,
)

PER_VERTEX_LIMIT = 10
DEFAULT_SHOTS = 8192


def _angle_list(text: str) -> list[float]:
    return [parse_angle(t) for t in text.split(",") if t.strip()]


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("WALKFORGE_SEED")
    return int(env) if env else 0


def _phases(args, default=None) -> list[float]:
    """Values of ``omega * t`` requested by --time/--theta (and list forms)."""
    if args.theta is not None:
        return [th / 2.0 for th in args.theta]
    if args.time is not None:
        return [args.omega * t for t in args.time]
    if default is None:
        raise ValueError("one of --time, --time-list, --theta or --theta-list is required")
    return list(default)


def _noise(args) -> NoiseSpec:
    return NoiseSpec(args.noise_1q, args.noise_2q, args.readout)


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _render(args, columns: list[str], rows: list[dict], meta: dict) -> str:
    if args.format == "json":
        doc = {"command": args.command, "version": __version__, "params": meta, "rows": rows}
        return json.dumps(doc, indent=1, default=float) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.output:
        atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _common_meta(args) -> dict:
    return {
        "omega": args.omega,
        "shots": args.shots,
        "seed": _seed(args),
        "noise_1q": args.noise_1q,
        "noise_2q": args.noise_2q,
        "readout": args.readout,
    }


# -- subcommands --------------------------------------------------------------


def cmd_hypercube_separable(args) -> None:
    """Per-vertex rows for n <= 10 (unless --levels), Hamming-level rows always."""
    n = args.n
    seed = _seed(args)
    per_vertex = n <= PER_VERTEX_LIMIT and not args.levels
    level_labels = tuple(str(k) for k in range(n + 1))
    rows = []
    for s in _phases(args):
        params = WalkParams.from_phase(s, args.omega)
        theta = 2.0 * s
        product = evolve_hypercube_product(n, params)
        circuit = compile_hypercube_separable(n, params)
        sampled = run_noisy(circuit, None, args.shots, seed, _noise(args)).probabilities
        tables = []
        if per_vertex:
            tables += [("exact", bit_labels(n), product.probabilities()), ("sampled", bit_labels(n), sampled)]
        tables += [
            ("exact-level", level_labels, product.profile.levels),
            ("sampled-level", level_labels, hamming_profile(sampled).levels),
        ]
        for source, labels, probs in tables:
            for label, p in zip(labels, probs):
                rows.append({"theta": theta, "time": params.time, "source": source, "label": label, "probability": float(p)})
    meta = dict(_common_meta(args), n=n, per_vertex=per_vertex)
    _emit(args, _render(args, ["theta", "time", "source", "label", "probability"], rows, meta))


def cmd_hypercube_onehot(args) -> None:
    seed = _seed(args)
    rows = []
    if args.table_s1:
        report = table_s1_report()
        for label, p in report.distribution.rows():
            rows.append({"time": "", "source": "table_s1", "label": label, "value": p})
        rows.append({"time": "", "source": "metric", "label": "discarded_fraction", "value": report.discarded_fraction})
        for s, tv in report.tv_by_phase.items():
            rows.append({"time": s / args.omega, "source": "metric", "label": "tv_table_s1_exact", "value": tv})
        rows.append({"time": report.best_phase / args.omega, "source": "metric", "label": "best_fit_time", "value": report.best_tv})
        meta = {"omega": args.omega, "table_s1": True}
        _emit(args, _render(args, ["time", "source", "label", "value"], rows, meta))
        return
    n = args.n
    plan = TrotterPlan(args.steps, args.order)
    start = StateVector.basis(1, 2 ** (n + 1))
    for s in _phases(args, default=REFERENCE_PHASES):
        params = WalkParams.from_phase(s, args.omega)
        exact = line_distribution(n, params)
        circuit = compile_onehot_line(n, params, plan)
        compiled = postselect_onehot(simulate_statevector(circuit, start))
        sampled = postselect_onehot(run_noisy(circuit, start, args.shots, seed, _noise(args)))
        for source, dist in (("exact", exact), ("compiled", compiled.distribution), ("sampled", sampled.distribution)):
            for label, p in dist.rows():
                rows.append({"time": params.time, "source": source, "label": label, "value": p})
        metrics = {
            "discarded_compiled": compiled.discarded_fraction,
            "discarded_sampled": sampled.discarded_fraction,
            "tv_exact_compiled": total_variation(exact, compiled.distribution),
            "tv_exact_sampled": total_variation(exact, sampled.distribution),
            "tv_compiled_sampled": total_variation(compiled.distribution, sampled.distribution),
        }
        for name, v in metrics.items():
            rows.append({"time": params.time, "source": "metric", "label": name, "value": v})
    meta = dict(_common_meta(args), n=n, steps=plan.steps, order=plan.order)
    _emit(args, _render(args, ["time", "source", "label", "value"], rows, meta))


def cmd_evolve(args) -> None:
    g = load(args.graph)
    d = g.num_vertices
    if args.initial is None:
        start = 0
    elif g.labels is not None and args.initial in g.labels:
        start = g.labels.index(args.initial)
    elif args.initial.isdigit() and len(args.initial) != max(1, (d - 1).bit_length()):
        start = int(args.initial)
    else:
        start = parse_bits(args.initial, (d - 1).bit_length())
    rows = []
    for s in _phases(args):
        params = WalkParams.from_phase(s, args.omega)
        dist = distribution(g, params, StateVector.basis(start, d))
        for label, p in dist.rows():
            rows.append({"time": params.time, "label": label, "probability": p})
    meta = {"omega": args.omega, "graph": str(args.graph), "initial": start}
    _emit(args, _render(args, ["time", "label", "probability"], rows, meta))


def cmd_extract(args) -> None:
    c = load_circuit(args.circuit)
    phases = _phases(args, default=[1.0])
    if len(phases) != 1:
        raise ValueError("extract takes a single --time or --theta")
    p = ExtractionParams(omega=args.omega, time=phases[0] / args.omega, k=args.k, phi=args.phi, b=args.b)
    g = graph_from_circuit(c, p)
    if args.output:
        save(g, args.output)
    else:
        sys.stdout.write(json.dumps(graph_to_dict(g), indent=1) + "\n")
    print(
        f"extracted {g.num_vertices} vertices, {len(g.edges)} edges, chiral={is_chiral(g)}, "
        f"walk omega'={p.walk_params.omega!r} time={p.walk_params.time!r}",
        file=sys.stderr,
    )


def cmd_sample_transfer(args) -> None:
    cfg = SamplerConfig(
        num_qubits=args.qubits,
        max_depth=args.depth,
        max_tries=args.tries,
        seed=_seed(args),
        fidelity_threshold=args.threshold,
        angles=args.angles,
        max_results=args.max_results,
    )
    cmap = CouplingMap.linear(args.qubits) if args.coupling == "linear" else CouplingMap.full(args.qubits)
    found = sample_perfect_transfer(cfg, cmap)
    out_dir = Path(args.circuit_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for item in found:
        path = out_dir / f"transfer_try{item.try_index:06d}.qc"
        save_circuit(item.circuit, path, comment=f"try {item.try_index} fidelity {item.fidelity!r}")
        lines.append(
            json.dumps(
                {"try": item.try_index, "depth": item.circuit.depth(), "fidelity": item.fidelity, "circuit_file": str(path)}
            )
        )
    _emit(args, "".join(line + "\n" for line in lines))
    print(f"{len(found)} circuit(s) found in {cfg.max_tries} tries", file=sys.stderr)


def cmd_simulate(args) -> None:
    c = load_circuit(args.circuit)
    initial = args.initial or "0" * c.num_qubits
    psi0 = StateVector.from_bits(initial)
    ideal = WalkDistribution.from_state(simulate_statevector(c, psi0))
    sampled = run_noisy(c, psi0, args.shots, _seed(args), _noise(args))
    rows = []
    if args.onehot:
        ideal_r, sampled_r = postselect_onehot(ideal), postselect_onehot(sampled)
        pairs = (("ideal", ideal_r.distribution), ("sampled", sampled_r.distribution))
    else:
        ideal = WalkDistribution(ideal.probabilities, bits=c.num_qubits)
        pairs = (("ideal", ideal), ("sampled", sampled))
    for source, dist in pairs:
        for label, p in dist.rows():
            rows.append({"source": source, "label": label, "probability": p})
    if args.onehot:
        rows.append({"source": "discarded", "label": "ideal", "probability": ideal_r.discarded_fraction})
        rows.append({"source": "discarded", "label": "sampled", "probability": sampled_r.discarded_fraction})
    meta = dict(_common_meta(args), circuit=str(args.circuit), initial=initial, onehot=args.onehot)
    _emit(args, _render(args, ["source", "label", "probability"], rows, meta))


# -- parser -------------------------------------------------------------------


def _add_shared(p: argparse.ArgumentParser, timing: bool = True) -> None:
    p.add_argument("--omega", type=float, default=1.0, help="hopping frequency")
    if timing:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--time", "--time-list", dest="time", type=_angle_list, help="time(s), comma separated; pi fractions allowed")
        g.add_argument("--theta", "--theta-list", dest="theta", type=_angle_list, help="U3 angle(s) theta = 2*omega*t")
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $WALKFORGE_SEED, then 0)")
    p.add_argument("--noise-1q", type=float, default=0.0, help="depolarizing probability per 1-qubit gate")
    p.add_argument("--noise-2q", type=float, default=0.0, help="depolarizing probability per CNOT")
    p.add_argument("--readout", type=float, default=0.0, help="readout bit-flip probability")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help="output path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkforge", description="Continuous-time quantum walk toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hypercube-separable", help="hypercube walk on n separable qubits")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--levels", action="store_true", help="report Hamming levels even for small n")
    _add_shared(p)
    p.set_defaults(func=cmd_hypercube_separable)

    p = sub.add_parser("hypercube-onehot", help="hypercube walk mapped to a one-hot line")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--steps", type=int, default=8, help="Trotter steps")
    p.add_argument("--order", choices=("first", "second"), default="first")
    p.add_argument("--table-s1", action="store_true", help="report the published 4-qubit circuit instead")
    _add_shared(p)
    p.set_defaults(func=cmd_hypercube_onehot)

    p = sub.add_parser("evolve", help="exact walk on a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--initial", help="initial vertex: bit string, label or index")
    _add_shared(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("extract", help="graph from a circuit file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    _add_shared(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("sample-transfer", help="random perfect-transfer circuit search")
    p.add_argument("--qubits", type=int, default=4)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--tries", type=int, default=10_000)
    p.add_argument("--threshold", type=float, default=1 - 1e-6)
    p.add_argument("--coupling", choices=("linear", "full"), default="linear")
    p.add_argument("--angles", choices=("grid", "uniform"), default="grid")
    p.add_argument("--max-results", type=int, default=None)
    p.add_argument("--circuit-dir", default="transfer_circuits")
    _add_shared(p, timing=False)
    p.set_defaults(func=cmd_sample_transfer)

    p = sub.add_parser("simulate", help="run a circuit file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--initial", help="initial bit string (default all zeros)")
    p.add_argument("--onehot", action="store_true", help="post-select one-hot outcomes")
    _add_shared(p, timing=False)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (WalkforgeError, ValueError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"walkforge {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
