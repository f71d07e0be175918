"""Batch command-line interface.

Every command validates its inputs, computes, and writes outputs
atomically (temp file + rename) together with a run manifest carrying
the command, parameters, config digest and tool version, so repeated
runs with identical inputs produce byte-identical files.

Exit codes: 0 ok, 2 usage, 3 config, 4 resource cap, 5 verification
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

from . import __version__
from .codes import code_from_progenitor, dual_code_with_map
from .compiler import (
    CompileError,
    Mode,
    VerificationError,
    compile_generation,
    count_resources,
    verify_sequence,
)
from .fusion import FusionSpec, erasure_analysis, validate_dual_swap
from .graphs import (
    GraphState,
    ResourceCapExceeded,
    build_progenitor,
    enumerate_progenitor_records,
)
from .thresholds import (
    BiasMode,
    ConfigError,
    config_to_json_dict,
    correctable_region,
    default_bias_config,
    load_config,
    loss_threshold,
    search_best_code,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RESOURCE = 4
EXIT_VERIFY = 5


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _manifest(args, command: str, config_dict=None) -> dict:
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "out") and v is not None
    }
    digest = None
    if config_dict is not None:
        digest = hashlib.sha256(_canonical_json(config_dict).encode()).hexdigest()
    return {
        "command": command,
        "parameters": params,
        "config_digest": digest,
        "version": __version__,
        "seed": getattr(args, "seed", None),
    }


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: str, header: list[str], rows: list[list], manifest: dict) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    _write_json(path + ".manifest.json", manifest)


def _load_bias(args) -> tuple:
    """(randomized, passive, error-config, raw-config-dict) from --config or defaults."""
    if getattr(args, "config", None):
        with open(args.config) as fh:
            raw = json.load(fh)
        rand, passive, err = load_config(args.config)
        return rand, passive, err, raw
    rand = default_bias_config(BiasMode.RANDOMIZED)
    passive = default_bias_config(BiasMode.PASSIVE)
    return rand, passive, None, config_to_json_dict(rand)


def _resolve_code(sequence: str):
    try:
        g = build_progenitor(sequence)
    except ValueError as exc:
        raise ConfigError(f"bad code id {sequence!r}: {exc}") from exc
    return code_from_progenitor(g, code_id=sequence)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _parse_w(text: str, n: int) -> tuple[int, ...]:
    if len(text) != n or any(ch not in "01" for ch in text):
        raise ConfigError(f"failure basis {text!r} must be {n} bits of 0/1")
    return tuple(int(ch) for ch in text)


# -- commands ------------------------------------------------------------


def cmd_enumerate(args) -> int:
    records = enumerate_progenitor_records(args.n)
    manifest = _manifest(args, "enumerate")
    payload = {
        "manifest": manifest,
        "n_photons": args.n,
        "count": len(records),
        "graphs": [{"id": r.sequence, "graph": r.graph.to_json_dict()} for r in records],
    }
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "graphs.json"), payload)
    for r in records:
        _atomic_write(os.path.join(args.out, f"{r.sequence}.dot"), r.graph.to_dot(r.sequence))
    print(f"enumerated {len(records)} progenitors with {args.n} photons -> {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    code = _resolve_code(args.code)
    w = _parse_w(args.w, code.n_code) if args.w else (0,) * code.n_code
    grid = [float(x) for x in args.eta_grid.split(",")] if args.eta_grid else [1.0, 0.95, 0.9]
    report = erasure_analysis(code, FusionSpec(eta=grid[0], p_fail=args.p_fail, w=w))
    payload = {"manifest": _manifest(args, "analyze"), "report": report.to_json_dict(grid)}
    _write_json(args.out, payload)
    print(f"analyzed {args.code} w={''.join(map(str, w))} -> {args.out}")
    return EXIT_OK


def cmd_optimize_w(args) -> int:
    rand, passive, _, raw = _load_bias(args)
    bias = rand if args.bias == "randomized" else passive
    code = _resolve_code(args.code)
    result = loss_threshold(code, bias, p_fail=args.p_fail)
    payload = {
        "manifest": _manifest(args, "optimize-w", raw),
        "code_id": code.code_id,
        "bias_mode": bias.mode.value,
        "w_star": "".join(str(b) for b in result.w_star),
        "gamma_star": result.gamma_star,
        "diagnostics": result.diagnostics,
    }
    _write_json(args.out, payload)
    print(f"best failure basis for {args.code}: {payload['w_star']} (gamma*={result.gamma_star:.6f})")
    return EXIT_OK


def cmd_threshold(args) -> int:
    rand, passive, _, raw = _load_bias(args)
    bias = rand if args.bias == "randomized" else passive
    manifest = _manifest(args, "threshold", raw)
    rows = []
    winners = []
    for n in range(args.n_min, args.n_max + 1):
        results = search_best_code(n, bias, p_fail=args.p_fail, threads=args.threads)
        best = results[0]
        rows.append(
            [
                n,
                best.code_id,
                bias.mode.value,
                best.gamma_star,
                "".join(str(b) for b in best.w_star),
                best.diagnostics.get("p_erase_xx", 0.0),
                best.diagnostics.get("p_erase_zz", 0.0),
            ]
        )
        winners.append(
            {
                "n": n,
                "result": {
                    "code_id": best.code_id,
                    "gamma_star": best.gamma_star,
                    "w_star": list(best.w_star),
                    "diagnostics": best.diagnostics,
                },
                "code": _resolve_code(best.code_id).to_json_dict(),
            }
        )
        print(f"n={n}: best {best.code_id} gamma*={best.gamma_star:.6f}")
    header = ["n", "code_id", "bias_mode", "gamma_star", "w_star", "p_erase_xx", "p_erase_zz"]
    _write_csv(args.out, header, rows, manifest)
    _write_json(args.out + ".codes.json", {"manifest": manifest, "winners": winners})
    return EXIT_OK


def cmd_region(args) -> int:
    rand, _, err, raw = _load_bias(args)
    if err is None:
        raise ConfigError("missing key: epsilon_M (required for region computation)")
    if args.code:
        code = _resolve_code(args.code)
    else:
        results = search_best_code(args.n, rand, p_fail=args.p_fail, threads=args.threads)
        code = _resolve_code(results[0].code_id)
        print(f"using n={args.n} winner {code.code_id}")
    points = correctable_region(code, rand, err, p_fail=args.p_fail, grid_points=args.grid_points)
    manifest = _manifest(args, "region", raw)
    if not points or all(p.epsilon_boundary == 0.0 for p in points):
        print("warning: correctable region is empty for this configuration", file=sys.stderr)
    rows = [[p.gamma, p.epsilon_boundary] for p in points]
    _write_csv(args.out, ["gamma", "epsilon_boundary"], rows, manifest)
    if points:
        print(f"region boundary written ({len(points)} points, intercept {points[0].epsilon_boundary:.6f})")
    return EXIT_OK


def cmd_compile(args) -> int:
    with open(args.outer) as fh:
        outer = GraphState.from_json_dict(json.load(fh))
    inner = _resolve_code(args.inner)
    mode = Mode(args.mode)
    seq = compile_generation(outer, inner, mode)
    if args.inject_fault:
        import dataclasses

        cz_positions = [k for k, i in enumerate(seq.ops) if i.op.value == "cz"]
        if cz_positions:
            ops = list(seq.ops)
            del ops[cz_positions[-1]]
            seq = dataclasses.replace(seq, ops=tuple(ops))
    verdict = verify_sequence(seq)
    resources = count_resources(seq)
    manifest = _manifest(args, "compile")
    payload = {
        "manifest": manifest,
        "sequence": seq.to_json_dict(),
        "verified": verdict.ok,
        "verification_method": verdict.method,
    }
    _write_json(args.out + ".sequence.json", payload)
    _write_csv(
        args.out + ".resources.csv",
        ["inner_n", "spin_spin_gates", "max_emitter_depth", "photons"],
        [[inner.n_code, resources.spin_spin_gates, resources.max_emitter_depth, resources.photons]],
        manifest,
    )
    if not verdict.ok:
        print(f"verification failed: {verdict.message}", file=sys.stderr)
        return EXIT_VERIFY
    print(
        f"compiled {seq.outer_size}-vertex outer x {inner.n_code}-qubit inner "
        f"({mode.value}): {resources.spin_spin_gates} spin-spin gates, "
        f"depth {resources.max_emitter_depth}, {resources.photons} photons [verified: {verdict.method}]"
    )
    return EXIT_OK


def cmd_duals(args) -> int:
    entries = []
    for rec in enumerate_progenitor_records(args.n):
        code = code_from_progenitor(rec.graph, code_id=rec.sequence)
        dual, swapped = dual_code_with_map(code)
        ok = validate_dual_swap(code, dual, swapped)
        entries.append(
            {
                "code_id": rec.sequence,
                "dual_progenitor": dual.progenitor.to_json_dict(),
                "swapped_qubit": swapped,
                "swap_verified": ok,
            }
        )
        if not ok:
            print(f"warning: dual swap failed for {rec.sequence}", file=sys.stderr)
    payload = {"manifest": _manifest(args, "duals"), "duals": entries}
    _write_json(args.out, payload)
    print(f"wrote {len(entries)} dual codes -> {args.out}")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusioncodes",
        description="Graph codes from quantum emitters: fusion loss/error analysis and compilation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="JSON config with outer-code thresholds")
        p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
        p.add_argument("--seed", type=int, help="recorded in the manifest; no randomness is used")
        p.add_argument("--p-fail", type=float, default=0.5, help="physical fusion failure probability")

    p = sub.add_parser("enumerate", help="enumerate single-emitter progenitor graphs")
    p.add_argument("--n", type=_positive_int, required=True, help="photon count (1..8)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("analyze", help="erasure analysis of one code and failure basis")
    p.add_argument("--code", required=True, help="code id (generation sequence, e.g. LLP)")
    p.add_argument("--w", help="failure-basis bits, one per code qubit")
    p.add_argument("--eta-grid", help="comma-separated transmissions to evaluate")
    p.add_argument("--out", required=True)
    common(p, config=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize-w", help="scan failure bases for the best loss tolerance")
    p.add_argument("--code", required=True)
    p.add_argument("--bias", choices=["randomized", "passive"], default="randomized")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_optimize_w)

    p = sub.add_parser("threshold", help="best inner code per size")
    p.add_argument("--n-min", type=_positive_int, default=1)
    p.add_argument("--n-max", type=_positive_int, default=8)
    p.add_argument("--bias", choices=["randomized", "passive"], default="randomized")
    p.add_argument("--out", required=True, help="output CSV path")
    common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("region", help="correctable loss/error region boundary")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=_positive_int, help="use the loss winner of this size")
    group.add_argument("--code", help="explicit code id")
    p.add_argument("--grid-points", type=_positive_int, default=21)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("compile", help="emit a two-emitter generation sequence")
    p.add_argument("--outer", required=True, help="outer graph JSON file")
    p.add_argument("--inner", required=True, help="inner code id (generation sequence)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.TWO_EMITTER.value)
    p.add_argument("--inject-fault", action="store_true", help="testing aid: corrupt the sequence")
    p.add_argument("--out", required=True, help="output base path")
    common(p, config=False)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("duals", help="dual codes with swap validation")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_duals)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceCapExceeded as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (VerificationError,) as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (CompileError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
