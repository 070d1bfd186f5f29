"""Command-line front end: attack, bench, verify, serve.

A JSON manifest (versioned, unknown keys rejected) supplies oracle parameters
and attack settings; a handful of flags override the common knobs. Exit codes:
1 configuration, 2 oracle/transport, 3 attack, 4 failed verification.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import attack, metrics, remote, tensorio, verify
from .errors import (BindError, ConfigError, ProtocolError, RemoteError,
                     SurFreeError, TransportError)
from .oracles import BallOracle, HalfspaceOracle, LinearClassifierOracle
from .sampler import ShapingFunction
from .transforms import TransformMode

log = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_ORACLE = 2
EXIT_ATTACK = 3
EXIT_VERIFY = 4

MANIFEST_KEYS = {"version", "seed", "budget", "out", "oracle", "attack",
                 "input", "inputs", "report"}
ORACLE_KEYS = {
    "halfspace": {"kind", "normal", "offset", "inside_label", "outside_label"},
    "ball": {"kind", "center", "radius", "inside_label", "outside_label"},
    "linear": {"kind", "weights", "bias"},
    "remote": {"kind", "endpoint", "timeout"},
}
ATTACK_KEYS = {"sign_search_steps", "window_size", "theta_max_init",
               "theta_adapt_rate", "bisection_steps", "bisection_early_stop",
               "mode", "rho", "shaping", "interpolation", "window_reset"}
SHAPING_NAMES = {"const": "constant", "constant": "constant",
                 "identity": "identity", "tanh": "tanh"}


def load_manifest(path: str) -> dict:
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise ConfigError("manifest must be a JSON object")
    if manifest.get("version") != 1:
        raise ConfigError(f"unsupported manifest version {manifest.get('version')!r}")
    unknown = set(manifest) - MANIFEST_KEYS
    if unknown:
        raise ConfigError(f"unknown manifest keys: {sorted(unknown)}")
    manifest.setdefault("_dir", os.path.dirname(os.path.abspath(path)))
    return manifest


def _resolve(manifest: dict, path: str) -> str:
    base = manifest.get("_dir", os.getcwd())
    return path if os.path.isabs(path) else os.path.join(base, path)


def build_oracle(spec: dict):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("oracle spec must be an object with a 'kind'")
    kind = spec["kind"]
    if kind not in ORACLE_KEYS:
        raise ConfigError(f"unknown oracle kind {kind!r}")
    unknown = set(spec) - ORACLE_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown {kind} oracle keys: {sorted(unknown)}")
    try:
        if kind == "halfspace":
            return HalfspaceOracle(np.asarray(spec["normal"], dtype=np.float64),
                                   float(spec["offset"]),
                                   int(spec.get("inside_label", 0)),
                                   int(spec.get("outside_label", 1)))
        if kind == "ball":
            return BallOracle(np.asarray(spec["center"], dtype=np.float64),
                              float(spec["radius"]),
                              int(spec.get("inside_label", 0)),
                              int(spec.get("outside_label", 1)))
        if kind == "linear":
            return LinearClassifierOracle(np.asarray(spec["weights"], dtype=np.float64),
                                          np.asarray(spec["bias"], dtype=np.float64))
        return remote.RemoteOracle(str(spec["endpoint"]),
                                   float(spec.get("timeout", remote.DEFAULT_TIMEOUT)))
    except KeyError as exc:
        raise ConfigError(f"{kind} oracle spec misses {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind} oracle spec: {exc}") from exc


def build_config(manifest: dict, args) -> attack.SurFreeConfig:
    settings = dict(manifest.get("attack", {}))
    unknown = set(settings) - ATTACK_KEYS
    if unknown:
        raise ConfigError(f"unknown attack keys: {sorted(unknown)}")
    if args.mode is not None:
        settings["mode"] = args.mode
    if args.rho is not None:
        settings["rho"] = args.rho
    if args.shaping is not None:
        settings["shaping"] = args.shaping
    if args.interpolation is not None:
        settings["interpolation"] = args.interpolation == "on"
    seed = args.seed if args.seed is not None else manifest.get("seed", 0)
    budget = args.budget if args.budget is not None else manifest.get("budget", 1000)
    mode_kind = settings.get("mode", "dct8x8")
    rho = settings.get("rho", 0.5)
    shaping_name = SHAPING_NAMES.get(settings.get("shaping", "tanh"))
    if shaping_name is None:
        raise ConfigError(f"unknown shaping {settings.get('shaping')!r}")
    try:
        return attack.SurFreeConfig(
            sign_search_steps=int(settings.get("sign_search_steps", 3)),
            window_size=int(settings.get("window_size", 100)),
            theta_max_init=float(settings.get("theta_max_init", 30.0)),
            theta_adapt_rate=float(settings.get("theta_adapt_rate", 0.02)),
            bisection_steps=int(settings.get("bisection_steps", 10)),
            bisection_early_stop=float(settings.get("bisection_early_stop", 0.01)),
            mode=TransformMode(mode_kind, rho=float(rho)),
            shaping=ShapingFunction(shaping_name),
            with_interpolation=bool(settings.get("interpolation", False)),
            window_reset=bool(settings.get("window_reset", False)),
            seed=int(seed),
            query_budget=int(budget),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _apply_oracle_flags(manifest: dict, args) -> dict:
    spec = dict(manifest.get("oracle", {}))
    if args.endpoint is not None:
        # a remote endpoint replaces whatever oracle the manifest carries
        spec = {"kind": "remote", "endpoint": args.endpoint}
    if args.oracle is not None and args.oracle != spec.get("kind"):
        # any other kind needs its parameters, which only the manifest has
        raise ConfigError(f"--oracle {args.oracle} needs a manifest oracle of "
                          f"that kind (manifest has {spec.get('kind')!r})")
    if not spec:
        raise ConfigError("no oracle specified (manifest 'oracle' or --endpoint)")
    return spec


def _write_result(out_dir: str, result: attack.AttackResult, original_label) -> None:
    os.makedirs(out_dir, exist_ok=True)
    metrics.export_trace(result.trace, os.path.join(out_dir, "trace.csv"))
    payload = {
        "best_distortion": result.best_distortion,
        "queries_used": result.queries_used,
        "converged": result.converged,
        "original_label": original_label,
    }
    with open(os.path.join(out_dir, "result.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.best_adversarial is not None:
        tensorio.save_tensor(os.path.join(out_dir, "adversarial.f32"),
                             result.best_adversarial)


def cmd_attack(args) -> int:
    manifest = load_manifest(args.config)
    config = build_config(manifest, args)
    oracle = build_oracle(_apply_oracle_flags(manifest, args))
    input_path = manifest.get("input")
    if input_path is None:
        raise ConfigError("attack needs an 'input' tensor path in the manifest")
    try:
        x_o = tensorio.load_tensor(_resolve(manifest, input_path))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load input tensor: {exc}") from exc
    out_dir = args.out or manifest.get("out", ".")
    result = attack.run(oracle, x_o, config)
    _write_result(out_dir, result, result.trace.original_label)
    if result.best_adversarial is None:
        log.error("no adversarial example found within the budget")
        return EXIT_ATTACK
    print(f"best_distortion={result.best_distortion:.6g} "
          f"queries_used={result.queries_used}")
    return 0


def cmd_bench(args) -> int:
    manifest = load_manifest(args.config)
    config = build_config(manifest, args)
    oracle_spec = _apply_oracle_flags(manifest, args)
    inputs = manifest.get("inputs")
    if not inputs:
        raise ConfigError("bench needs a non-empty 'inputs' list in the manifest")
    report_spec = manifest.get("report", {})
    unknown = set(report_spec) - {"d_t", "K"}
    if unknown:
        raise ConfigError(f"unknown report keys: {sorted(unknown)}")
    budgets = [int(k) for k in report_spec.get("K", [config.query_budget])]
    targets = [float(d) for d in report_spec.get("d_t", [])]
    if any(k > config.query_budget for k in budgets):
        raise ConfigError("report K values cannot exceed the query budget")
    out_dir = args.out or manifest.get("out", ".")
    os.makedirs(out_dir, exist_ok=True)

    curves = []
    per_image = {}
    for index, rel_path in enumerate(inputs):
        oracle = build_oracle(oracle_spec)
        x_o = tensorio.load_tensor(_resolve(manifest, rel_path))
        # shared starting point across configs: the init stream depends only
        # on the image index, the direction stream on (seed, index)
        run_config = attack.SurFreeConfig(**{
            **_config_kwargs(config),
            "seed": int(np.random.default_rng([config.seed, index]).integers(2 ** 31))})
        result = attack.run(oracle, x_o, run_config, init_seed=index)
        name = f"img_{index:03d}"
        metrics.export_trace(result.trace,
                             os.path.join(out_dir, f"trace_{index:03d}.csv"))
        curve = metrics.best_distortion_curve(result.trace, up_to_k=config.query_budget)
        curves.append(curve)
        per_image[name] = {
            "input": rel_path,
            "best_distortion": result.best_distortion,
            "queries_used": result.queries_used,
            "curve": curve,
        }

    mean = [None if any(c[i] is None for c in curves)
            else sum(c[i] for c in curves) / len(curves)
            for i in range(config.query_budget)]
    success = [{"d_t": d_t, "K": k,
                "rate": metrics.success_rate([c[k - 1] for c in curves], d_t)}
               for d_t in targets for k in budgets]
    report = {"mean_curve": mean, "success": success, "per_image": per_image}
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"benchmarked {len(inputs)} inputs -> {out_dir}/report.json")
    return 0


def _config_kwargs(config: attack.SurFreeConfig) -> dict:
    return {f: getattr(config, f) for f in config.__dataclass_fields__}


def cmd_verify(_args) -> int:
    return 0 if verify.run_all() else EXIT_VERIFY


def cmd_serve(args) -> int:
    manifest = load_manifest(args.config)
    spec = _apply_oracle_flags(manifest, args)
    if spec.get("kind") == "remote":
        raise ConfigError("cannot serve a remote oracle")
    oracle = build_oracle(spec)
    handle = remote.serve(oracle, host=args.host, port=args.port)
    print(f"serving on {handle.url}", flush=True)
    try:
        import threading
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        handle.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surfree",
                                     description="query-efficient hard-label attack toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run manifest (JSON)")
        p.add_argument("--seed", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--oracle", choices=["halfspace", "ball", "linear", "remote"])
        p.add_argument("--endpoint")
        p.add_argument("--out")
        p.add_argument("--interpolation", choices=["on", "off"])
        p.add_argument("--mode", choices=["pixel", "dct-full", "dct8x8"])
        p.add_argument("--rho", type=float)
        p.add_argument("--shaping", choices=["const", "identity", "tanh"])

    p_attack = sub.add_parser("attack", help="attack one input")
    common(p_attack)
    p_attack.set_defaults(func=cmd_attack)

    p_bench = sub.add_parser("bench", help="attack an input set and report curves")
    common(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.set_defaults(func=cmd_verify)

    p_serve = sub.add_parser("serve", help="expose a local oracle over HTTP")
    common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=0)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SURFREE_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TransportError, RemoteError, ProtocolError, BindError) as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except SurFreeError as exc:
        print(f"attack error: {exc}", file=sys.stderr)
        return EXIT_ATTACK


if __name__ == "__main__":
    sys.exit(main())
