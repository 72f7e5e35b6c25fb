"""Command-line interface.

Every command prints exactly one JSON document to stdout (sorted keys, compact
separators, floats via repr), so identical inputs and seeds produce
byte-identical output.  Long computations stream NDJSON progress records to
stderr.  Exit codes: 0 success, 1 I/O, 2 argument or domain error,
3 resource limit, 4 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from dataclasses import asdict, dataclass

from . import __version__
from .avgop import (
    DENSE_CUTOFF,
    _resolve_threads,
    convolution_square_gap,
    gap_at_scale,
)
from .bounds import g_t0, main_lower_bound, net_length_scale_bound, net_length_covering
from .constants import BoundParams, emit_tables
from .errors import DomainError, GapforgeError
from .gates import empirical_net, haar_random_gateset, load_gateset, save_gateset
from .weightlat import enumerate_nontrivial_weights, enumerate_weights, irrep_meta

__all__ = ["main", "RunConfig"]


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of one CLI run, echoed into the output doc."""

    command: str
    d: int | None = None
    t: int | None = None
    eps0: float | None = None
    eps: float | None = None
    gates: str | None = None
    k: int | None = None
    seed: int | None = None
    threads: int | None = None
    t_override: int | None = None
    length: int | None = None
    samples: int | None = None
    variant: str | None = None
    gap: float | None = None
    dense_cutoff: int | None = None

    def to_json_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


_STDERR_LOCK = threading.Lock()


def _progress_line(payload: dict) -> None:
    with _STDERR_LOCK:
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
        sys.stderr.flush()


def _emit(doc, args) -> None:
    if isinstance(doc, str):
        text = doc
    elif getattr(args, "format", "json") == "pretty":
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _document(config: RunConfig, payload: dict) -> dict:
    return {"version": __version__, "config": config.to_json_dict(), **payload}


def cmd_constants(args) -> int:
    if args.table:
        d_values = (args.d,) if args.d else (2, 3, 4)
        if args.format == "csv":
            _emit(emit_tables(d_values=d_values, fmt="csv"), args)
            return 0
        rows = emit_tables(d_values=d_values)
        cfg = RunConfig(command="constants", d=args.d)
        _emit(_document(cfg, {"table": rows}), args)
        return 0
    if args.d is None or args.eps0 is None:
        raise DomainError("constants needs --d and --eps0 (or --table)")
    params = BoundParams.compute(args.d, args.eps0)
    cfg = RunConfig(command="constants", d=args.d, eps0=args.eps0)
    _emit(_document(cfg, {"params": params.to_json_dict()}), args)
    return 0


def cmd_weights(args) -> int:
    ws = (
        enumerate_nontrivial_weights(args.d, args.t)
        if args.nontrivial
        else enumerate_weights(args.d, args.t)
    )
    cfg = RunConfig(command="weights", d=args.d, t=args.t)
    if args.count_only:
        _emit(_document(cfg, {"count": len(ws)}), args)
        return 0
    rows = []
    for w in ws:
        m = irrep_meta(w)
        rows.append(
            {
                "weight": list(w.entries),
                "dim": m.dim,
                "fs_indicator": m.fs_indicator,
                "one_norm": m.one_norm,
            }
        )
    _emit(_document(cfg, {"count": len(ws), "weights": rows}), args)
    return 0


def _load_gates(args):
    return load_gateset(args.gates, repair=getattr(args, "repair", False))


def cmd_gap(args) -> int:
    gs = _load_gates(args)
    threads = _resolve_threads(args.threads)

    def progress(w, norm, info):
        _progress_line(
            {
                "event": "block",
                "weight": list(w.entries),
                "norm": norm,
                "matvecs": info["matvecs"],
                "method": info["method"],
            }
        )

    rep = gap_at_scale(
        gs,
        args.t,
        auto_symmetrize=args.auto_symmetrize,
        dense_cutoff=args.dense_cutoff,
        threads=threads,
        progress=progress if not args.no_progress else None,
    )
    payload = {
        "t": rep.scale,
        "gap": rep.gap,
        "worst_weight": list(rep.worst_weight.entries),
    }
    if args.per_irrep:
        payload["per_weight_norms"] = [
            [list(w.entries), v] for w, v in rep.per_weight_norms.items()
        ]
        payload["iterations"] = [
            [list(w.entries), n] for w, n in rep.iterations.items()
        ]
    if args.convolution_square:
        gap_sq, residual = convolution_square_gap(
            gs, args.t, dense_cutoff=args.dense_cutoff, threads=threads
        )
        payload["convolution_square_gap"] = gap_sq
        payload["sandwich_residual"] = residual
    cfg = RunConfig(
        command="gap",
        t=args.t,
        gates=args.gates,
        threads=threads,
        dense_cutoff=args.dense_cutoff,
    )
    _emit(_document(cfg, payload), args)
    return 0


def cmd_gtzero(args) -> int:
    gs = _load_gates(args)
    threads = _resolve_threads(args.threads)

    def progress(m, combo, gap):
        _progress_line(
            {"event": "subset", "m": m, "removed": list(combo), "gap": gap}
        )

    g, table = g_t0(
        gs,
        eps0=args.eps0,
        t_override=args.t_override,
        check_universality=not args.no_universality_check,
        threads=threads,
        progress=progress if not args.no_progress else None,
    )
    cfg = RunConfig(
        command="gtzero",
        eps0=args.eps0,
        gates=args.gates,
        threads=threads,
        t_override=args.t_override,
    )
    _emit(_document(cfg, {"g_t0": g, "subset_gaps": table.to_json_dict()}), args)
    return 0


def cmd_bound(args) -> int:
    gs = _load_gates(args)
    threads = _resolve_threads(args.threads)
    rep = main_lower_bound(
        gs,
        args.eps0,
        t=args.t,
        t_override=args.t_override,
        check_universality=not args.no_universality_check,
        threads=threads,
    )
    cfg = RunConfig(
        command="bound",
        eps0=args.eps0,
        t=rep.t,
        gates=args.gates,
        threads=threads,
        t_override=args.t_override,
    )
    _emit(_document(cfg, rep.to_json_dict()), args)
    return 0


def cmd_net_length(args) -> int:
    cfg = RunConfig(
        command="net-length", d=args.d, eps=args.eps, gap=args.gap, variant=args.variant
    )
    if args.variant == "covering":
        ell = net_length_covering(args.d, args.gap, args.eps)
        payload = {"ell": ell, "vacuous": ell <= 0.0}
    else:
        ell, t_req = net_length_scale_bound(args.d, args.gap, args.eps)
        payload = {"ell": ell, "required_t": t_req}
    _emit(_document(cfg, payload), args)
    return 0


def cmd_net_empirical(args) -> int:
    gs = _load_gates(args)
    est = empirical_net(
        gs,
        length=args.length,
        eps=args.eps,
        samples=args.samples,
        seed=args.seed,
        word_cap=args.word_cap,
    )
    cfg = RunConfig(
        command="net-empirical",
        gates=args.gates,
        eps=args.eps,
        seed=args.seed,
        length=args.length,
        samples=args.samples,
    )
    payload = {
        "length": est.length,
        "eps": est.eps,
        "samples": est.samples,
        "covered_fraction": est.covered_fraction,
        "max_observed_distance": est.max_observed_distance,
    }
    _emit(_document(cfg, payload), args)
    return 0


def cmd_random_gates(args) -> int:
    gs = haar_random_gateset(args.d, args.k, seed=args.seed)
    if args.out:
        # --out names the gate file here; the run document goes to stdout
        save_gateset(gs, args.out)
        cfg = RunConfig(command="random-gates", d=args.d, k=args.k, seed=args.seed)
        doc = _document(cfg, {"written": args.out, "labels": gs.labels()})
        sys.stdout.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
        return 0
    # no --out: print the gate file itself so the output can be piped to disk
    doc = {
        "d": gs.d,
        "symmetric": gs.symmetric,
        "gates": [
            {
                "label": lab,
                "matrix": [[[z.real, z.imag] for z in row] for row in U],
            }
            for lab, U in gs.pairs
        ],
    }
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gapforge",
        description="Spectral gaps and calculable lower bounds for gate sets in PU(d).",
    )
    p.add_argument("--version", action="version", version=f"gapforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, gates=False, threads=False):
        sp.add_argument("--format", choices=("json", "pretty", "csv"), default="json")
        sp.add_argument("--out", help="write the document to this path instead of stdout")
        if gates:
            sp.add_argument("--gates", required=True, help="gate-set JSON file")
            sp.add_argument("--repair", action="store_true",
                            help="project nearly-unitary file input onto the unitary group")
        if threads:
            sp.add_argument("--threads", type=int, default=None,
                            help="worker threads (default: GAPFORGE_THREADS or all cores)")
            sp.add_argument("--no-progress", action="store_true",
                            help="suppress NDJSON progress records on stderr")

    sp = sub.add_parser("constants", help="bound constants and reference tables")
    sp.add_argument("--d", type=int)
    sp.add_argument("--eps0", type=float)
    sp.add_argument("--table", action="store_true", help="emit the full reference table")
    add_common(sp)
    sp.set_defaults(fn=cmd_constants)

    sp = sub.add_parser("weights", help="enumerate irrep weights at a scale")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--nontrivial", action="store_true")
    sp.add_argument("--count-only", action="store_true")
    add_common(sp)
    sp.set_defaults(fn=cmd_weights)

    sp = sub.add_parser("gap", help="spectral gap of a gate set at scale t")
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--auto-symmetrize", action="store_true")
    sp.add_argument("--per-irrep", action="store_true",
                    help="include per-weight norms and iteration counts")
    sp.add_argument("--convolution-square", action="store_true",
                    help="also report the convolution-square gap and sandwich residual")
    sp.add_argument("--dense-cutoff", type=int, default=DENSE_CUTOFF)
    add_common(sp, gates=True, threads=True)
    sp.set_defaults(fn=cmd_gap)

    sp = sub.add_parser("gtzero", help="aggregate squared subset gap g_t0")
    sp.add_argument("--eps0", type=float)
    sp.add_argument("--t-override", type=int, default=None)
    sp.add_argument("--no-universality-check", action="store_true")
    add_common(sp, gates=True, threads=True)
    sp.set_defaults(fn=cmd_gtzero)

    sp = sub.add_parser("bound", help="calculable lower bound on the gap at scale t")
    sp.add_argument("--eps0", type=float, required=True)
    sp.add_argument("--t", type=int, default=None)
    sp.add_argument("--t-override", type=int, default=None)
    sp.add_argument("--no-universality-check", action="store_true")
    add_common(sp, gates=True, threads=True)
    sp.set_defaults(fn=cmd_bound)

    sp = sub.add_parser("net-length", help="epsilon-net length laws from a gap")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--gap", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--variant", choices=("covering", "scale"), default="scale")
    add_common(sp)
    sp.set_defaults(fn=cmd_net_length)

    sp = sub.add_parser("net-empirical", help="empirical covering check by word enumeration")
    sp.add_argument("--length", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--word-cap", type=int, default=10_000_000)
    add_common(sp, gates=True)
    sp.set_defaults(fn=cmd_net_empirical)

    sp = sub.add_parser("random-gates", help="sample a Haar-random gate set")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    add_common(sp)
    sp.set_defaults(fn=cmd_random_gates)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GapforgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
