"""Command-line entry point: analyze, simulate, reproduce, check-assumptions.

Configuration is a JSON document; hypothesis and agent labels are 1-based
in configs and output files, 0-based inside the library.  Exit codes:
0 success, 2 validation error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .models import DiscreteLikelihood, GaussianLikelihood, HypothesisSet, InvalidModelError
from .network import (
    NetworkModel,
    PerronConvergenceError,
    TopologyError,
    build_averaging_matrix,
    preset_adjacency,
)
from .presets import PRESET_NAMES, build_preset
from .simulator import (
    ConfigError,
    ScenarioConfig,
    run_scenario,
    write_summary_json,
    write_trajectory_csv,
)
from .strategies import StrategyKind

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

STRATEGY_NAMES = {kind.value: kind for kind in StrategyKind}

# Figure-style reproduction bundles: (preset, lambda) per panel set.
REPRODUCE_TARGETS = {
    "fig5a": ("gaussian-study", 0.5),
    "fig5b": ("gaussian-study", 0.9),
    "fig8a": ("discrete-study", 0.7),
    "fig8b": ("discrete-study", 0.95),
}


def _parse_model(spec: dict, path: str):
    kind = spec.get("type")
    if kind == "gaussian":
        return GaussianLikelihood(np.asarray(spec["means"], dtype=float))
    if kind == "discrete":
        return DiscreteLikelihood(np.asarray(spec["pmf"], dtype=float))
    raise ConfigError(f"{path}.type must be 'gaussian' or 'discrete', got {kind!r}")


def _parse_network(spec: dict) -> NetworkModel:
    lam = spec.get("lambda")
    if lam is None:
        raise ConfigError("network.lambda is required")
    if "preset" in spec:
        return build_averaging_matrix(preset_adjacency(spec["preset"]), lam)
    if "edges" in spec:
        K = spec.get("agents")
        if K is None:
            raise ConfigError("network.agents is required with an edge list")
        adj = np.eye(K, dtype=bool)
        for edge in spec["edges"]:
            src, dst = edge
            if not (1 <= src <= K and 1 <= dst <= K):
                raise ConfigError(f"edge {edge} out of range for {K} agents")
            adj[src - 1, dst - 1] = True
        return build_averaging_matrix(adj, lam)
    raise ConfigError("network needs either 'preset' or 'edges'")


def _parse_strategies(names) -> list[StrategyKind]:
    kinds = []
    for name in names:
        if name not in STRATEGY_NAMES:
            raise ConfigError(
                f"unknown strategy {name!r}; choose from {sorted(STRATEGY_NAMES)}"
            )
        kinds.append(STRATEGY_NAMES[name])
    return kinds


def config_from_dict(doc: dict) -> ScenarioConfig:
    """Build a fully validated scenario from a parsed JSON document."""
    if "preset" in doc:
        return build_preset(
            doc["preset"],
            lam=doc.get("lambda"),
            theta_tx=int(doc.get("theta_tx", 1)) - 1,
            seed=int(doc.get("seed", 0)),
            horizon=int(doc.get("horizon", 3000)),
            runs=int(doc.get("runs", 1)),
            record_stride=int(doc.get("record_stride", 10)),
            strategies=(
                _parse_strategies(doc["strategies"])
                if "strategies" in doc
                else None
            ),
        )
    try:
        hyp_doc = doc["hypotheses"]
        hyp = HypothesisSet(
            count=int(hyp_doc["count"]),
            true_index=int(hyp_doc["true"]) - 1,
            tx_index=int(hyp_doc["tx"]) - 1,
        )
        models = [
            _parse_model(spec, f"models[{i}]")
            for i, spec in enumerate(doc["models"])
        ]
        net = _parse_network(doc["network"])
    except KeyError as exc:
        raise ConfigError(f"missing config field: {exc}") from exc
    init = None
    if "initial_beliefs" in doc:
        init = np.log(np.asarray(doc["initial_beliefs"], dtype=float))
    return ScenarioConfig(
        hypotheses=hyp,
        models=models,
        network=net,
        strategies=_parse_strategies(
            doc.get("strategies", [k.value for k in StrategyKind])
        ),
        horizon=int(doc.get("horizon", 3000)),
        runs=int(doc.get("runs", 1)),
        seed=int(doc.get("seed", 0)),
        record_stride=int(doc.get("record_stride", 10)),
        initial_log_beliefs=init,
        name=doc.get("name", "scenario"),
    )


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def _config_from_args(args) -> ScenarioConfig:
    if args.config:
        return load_config(args.config)
    if args.preset:
        doc = {"preset": args.preset}
        overrides = {
            "lambda": args.lam,
            "theta_tx": args.theta_tx,
            "seed": args.seed,
            "runs": args.runs,
            "horizon": args.horizon,
        }
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return config_from_dict(doc)
    raise ConfigError("either --config or --preset is required")


def analyze_scenario(cfg: ScenarioConfig) -> dict:
    """Divergence profile, assumption checks, and per-strategy verdicts."""
    hyp = cfg.hypotheses
    profile = analysis.divergence_profile(hyp, cfg.models, cfg.network)
    bound_b = analysis.likelihood_bound_B(cfg.models, hyp.tx_index)
    a3_ok, a3_witness = analysis.check_assumption_3(cfg.models, hyp.true_index)
    a4 = [
        analysis.check_assumption_4(m, hyp.true_index) for m in cfg.models
    ]
    verdict_no_sa = analysis.classify_regime_no_sa(profile)
    verdict_sa = analysis.classify_regime_sa(profile, cfg.network, bound_b)
    return {
        "scenario": cfg.name,
        "theta_true": hyp.true_index + 1,
        "theta_tx": hyp.tx_index + 1,
        "divergences": {
            "per_agent": profile.d.tolist(),
            "per_agent_mixture": profile.d_mix.tolist(),
            "mixture_ci": profile.d_mix_ci.tolist(),
            "perron": profile.perron.tolist(),
            "network_average": profile.d_ave.tolist(),
            "network_average_mixture": profile.d_mix_ave,
            "method": profile.method,
        },
        "assumptions": {
            "finite_divergences": bool(np.all(np.isfinite(profile.d))),
            "clear_sighted_no_sa": {"holds": a3_ok, "witness_agent": (
                a3_witness + 1 if a3_witness is not None else None
            )},
            "clear_sighted_sa": [
                {"agent": k + 1, "holds": ok, "tv_distance": c}
                for k, (ok, c) in enumerate(a4)
            ],
            "bounded_likelihoods_B": bound_b,
        },
        "verdicts": {
            "partial-no-sa": {
                "verdict": verdict_no_sa.verdict.value,
                "margin": verdict_no_sa.margin,
                "predicted_rate": verdict_no_sa.predicted_rate,
                "supporting": verdict_no_sa.supporting,
            },
            "partial-sa": {
                "verdict": verdict_sa.verdict.value,
                "margin": verdict_sa.margin,
                "supporting": verdict_sa.supporting,
            },
        },
    }


def _emit(payload: dict, out):
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    _emit(analyze_scenario(cfg), args.out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    result = run_scenario(cfg)
    for kind, traj in result.trajectories.items():
        for r in range(cfg.runs):
            suffix = "" if r == 0 else f"_run{r}"
            path = outdir / f"{cfg.name}_{kind.value}_{cfg.seed}{suffix}.csv"
            write_trajectory_csv(path, traj, run=r)
    write_summary_json(outdir / f"{cfg.name}_summary_{cfg.seed}.json", result)
    return 0


def cmd_reproduce(args) -> int:
    preset, lam = REPRODUCE_TARGETS[args.figure]
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    verdict_table = []
    for theta_tx in (1, 2, 3):
        cfg = config_from_dict(
            {
                "preset": preset,
                "lambda": lam,
                "theta_tx": theta_tx,
                "seed": args.seed or 0,
                "runs": args.runs or 1,
                "horizon": args.horizon or 3000,
            }
        )
        cfg.name = f"{args.figure}_tx{theta_tx}"
        report = analyze_scenario(cfg)
        result = run_scenario(cfg)
        for kind, traj in result.trajectories.items():
            path = outdir / f"{cfg.name}_{kind.value}_{cfg.seed}.csv"
            write_trajectory_csv(path, traj, run=0)
        write_summary_json(
            outdir / f"{cfg.name}_summary_{cfg.seed}.json", result
        )
        for kind, summary in result.summaries.items():
            predicted = None
            if kind is StrategyKind.PARTIAL_NO_SA:
                predicted = report["verdicts"]["partial-no-sa"]["verdict"]
            elif kind is StrategyKind.PARTIAL_SA:
                predicted = report["verdicts"]["partial-sa"]["verdict"]
            verdict_table.append(
                {
                    "figure": args.figure,
                    "theta_tx": theta_tx,
                    "strategy": kind.value,
                    "predicted": predicted,
                    "simulated_counts": summary.counts,
                }
            )
    _emit({"verdicts": verdict_table}, outdir / f"{args.figure}_verdicts.json")
    return 0


def cmd_check_assumptions(args) -> int:
    cfg = _config_from_args(args)
    report = analyze_scenario(cfg)
    _emit({"scenario": cfg.name, "assumptions": report["assumptions"]}, args.out)
    return 0


def _add_common(parser):
    parser.add_argument("--config", help="path to a scenario JSON document")
    parser.add_argument("--preset", choices=PRESET_NAMES)
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--theta-tx", dest="theta_tx", type=int, help="1-based")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--runs", type=int)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--out", help="output file or directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sociallearn",
        description="Simulate and analyze social learning with partial belief sharing",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("analyze", cmd_analyze),
        ("simulate", cmd_simulate),
        ("check-assumptions", cmd_check_assumptions),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)
    p = sub.add_parser("reproduce")
    p.add_argument("figure", choices=sorted(REPRODUCE_TARGETS))
    _add_common(p)
    p.set_defaults(fn=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, InvalidModelError, TopologyError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (analysis.NumericalError, PerronConvergenceError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
