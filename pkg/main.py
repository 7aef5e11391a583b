"""Command-line front end for the geometric multicast routing simulator.

Subcommands:
- gen-graph: place a random network and write it as a graph dump
- simulate: run one algorithm on a dumped or random network, optionally
  writing the transcript
- sweep: run a density/loss/algorithm study and write the CSV results
- ttl-sweep: vary the hop budget of MCFR-Steiner and write the CSV results

Settings come from built-in defaults, then an optional ``key = value`` config
file, then command-line flags. The seed defaults to ``$GEOROUTE_SEED``, then 0.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from src.constants import (
    ALGORITHMS,
    SEED_ENV_VAR,
    SIMULATE_ALGORITHM,
    SIMULATE_DENSITY,
    TTL_SWEEP_VALUES,
)
from src.experiments import (
    ExperimentSpec,
    emit_csv,
    instance_from_graph,
    make_instance,
    run_experiment,
    simulate_instance,
    ttl_sweep,
)
from src.netgraph import random_placement, unit_disk_graph
from src.simengine import delivery_ratio_of, latency_of, message_cost_of
from src.utils import ConfigError, dump_graph, load_graph, parse_list, parse_ttl, read_config, write_transcript

logger = logging.getLogger("georoute")

# Command-line flags and the config keys they override
FLAG_SETTINGS = {
    "density": "densities",
    "loss": "losses",
    "algorithm": "algorithms",
    "ttl": "ttl",
    "runs": "runs_per_point",
    "width": "field_width",
    "height": "field_height",
    "radius": "unit_radius",
    "ttl_values": "ttl_values",
}

# Config keys that are not part of an experiment spec
CLI_KEYS = ("graph", "out", "transcript")


@dataclass(frozen=True)
class CliConfig:
    """Fully resolved command-line invocation.

    Attributes:
        command (str): The subcommand.
        seed (int): Master seed of every random stream.
        config_path (Path | None): Config file the settings were read from.
        graph (Path | None): Graph dump to simulate on.
        output (Path | None): Graph dump or CSV destination.
        transcript (Path | None): Where ``simulate`` writes its event log.
        settings (dict[str, str]): Experiment settings after flag overrides.

    """

    command: str
    seed: int
    config_path: Path | None = None
    graph: Path | None = None
    output: Path | None = None
    transcript: Path | None = None
    settings: dict[str, str] = field(default_factory=dict)

    def spec(self, **defaults: str) -> ExperimentSpec:
        """Experiment spec from the settings, with command-specific defaults underneath."""
        settings = {**defaults, **self.settings}
        settings.pop("ttl_values", None)
        return ExperimentSpec.from_settings(settings, master_seed=self.seed)

    def single_run_spec(self, fields: Sequence[str], **defaults: str) -> ExperimentSpec:
        """Like :meth:`spec`, for commands that use one value of each of ``fields``.

        Raises:
            ConfigError: If the settings list several values for one of ``fields``.

        """
        spec = self.spec(**defaults)
        for key in fields:
            if len(values := getattr(spec, key)) > 1:
                msg = f"{self.command} runs a single value, but {key} lists {len(values)}"
                raise ConfigError(msg)
        return spec


def default_seed() -> int:
    """Seed from the environment, or 0.

    Raises:
        ConfigError: If the environment variable is not an integer.

    """
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as e:
        msg = f"{SEED_ENV_VAR}={raw!r} is not an integer"
        raise ConfigError(msg) from e


def build_parser() -> argparse.ArgumentParser:  # noqa: D103
    parser = argparse.ArgumentParser(prog="georoute", description="Geometric multicast routing simulator")
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="diagnostics verbosity (written to stderr)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value settings file")
    common.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV_VAR}, then 0)")
    common.add_argument("--width", type=float, help="field width in meters")
    common.add_argument("--height", type=float, help="field height in meters")
    common.add_argument("--radius", type=float, help="radio range in meters")

    gen = commands.add_parser("gen-graph", parents=[common], help="write a random network")
    gen.add_argument("--density", type=float, help="average nodes per unit disk")
    gen.add_argument("--out", type=Path, required=True, help="graph dump destination")

    sim = commands.add_parser("simulate", parents=[common], help="simulate one multicast")
    source = sim.add_mutually_exclusive_group()
    source.add_argument("--graph", type=Path, help="graph dump to route on")
    source.add_argument("--random", action="store_true", help="route on a fresh random network")
    sim.add_argument("--algorithm", choices=ALGORITHMS, help=f"default {SIMULATE_ALGORITHM}")
    sim.add_argument("--density", type=float, help="density of the random network")
    sim.add_argument("--loss", help="loss probability or preset name")
    sim.add_argument("--ttl", help="hop budget or 'unlimited'")
    sim.add_argument("--transcript", type=Path, help="write the event log here")

    sweep = commands.add_parser("sweep", parents=[common], help="run a simulation study")
    sweep.add_argument("--out", type=Path, required=True, help="CSV destination")
    sweep.add_argument("--runs", type=int, help="runs per point")
    sweep.add_argument("--ttl", help="hop budget or 'unlimited'")

    tune = commands.add_parser("ttl-sweep", parents=[common], help="tune the MCFR hop budget")
    tune.add_argument("--out", type=Path, required=True, help="CSV destination")
    tune.add_argument("--runs", type=int, help="runs per point")
    tune.add_argument("--ttl-values", help="comma-separated hop budgets")
    return parser


def resolve(args: argparse.Namespace) -> CliConfig:
    """Merge config file values and flags into a :class:`CliConfig`."""
    settings = read_config(args.config) if args.config else {}
    paths = {key: settings.pop(key, None) for key in CLI_KEYS}

    for flag, key in FLAG_SETTINGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = str(value)

    raw_seed = settings.pop("seed", None)
    if args.seed is not None:
        seed = args.seed
    elif raw_seed is not None:
        seed = int(raw_seed)
    else:
        seed = default_seed()

    def path(flag: str) -> Path | None:
        value = getattr(args, flag, None) or paths.get(flag)
        return Path(value) if value is not None else None

    return CliConfig(
        command=args.command,
        seed=seed,
        config_path=args.config,
        graph=None if getattr(args, "random", False) else path("graph"),
        output=path("out"),
        transcript=path("transcript"),
        settings=settings,
    )


def gen_graph(cfg: CliConfig) -> int:
    """Write a random unit-disk network."""
    spec = cfg.single_run_spec(["densities"], densities=str(SIMULATE_DENSITY))
    points = random_placement(
        spec.field_width,
        spec.field_height,
        spec.densities[0],
        cfg.seed,
        spec.unit_radius,
    )
    g = unit_disk_graph(points, spec.unit_radius)
    dump_graph(g, cfg.output)
    logger.info(
        "wrote %d nodes and %d edges (max degree %d) to %s",
        len(g.nodes),
        g.n_edges,
        g.max_degree,
        cfg.output,
    )
    return 0


def simulate(cfg: CliConfig) -> int:
    """Run one algorithm and print its metrics to stdout."""
    spec = cfg.single_run_spec(
        ["densities", "losses", "algorithms"],
        algorithms=SIMULATE_ALGORITHM,
        losses="0",
        densities=str(SIMULATE_DENSITY),
    )
    if cfg.graph is not None:
        g, tree = load_graph(cfg.graph)
        instance = instance_from_graph(g, tree, spec.target_fraction, cfg.seed)
    else:
        instance = make_instance(spec, 0, 0)
    algorithm, loss = spec.algorithms[0], spec.losses[0]
    logger.info(
        "simulating %s on %d nodes (max degree %d): source %d, %d targets, loss %g, ttl %s",
        algorithm,
        len(instance.g.nodes),
        instance.g.max_degree,
        instance.source,
        len(instance.targets),
        loss,
        "unlimited" if spec.ttl is None else spec.ttl,
    )

    transcript = simulate_instance(
        instance,
        algorithm,
        loss=loss,
        ttl=spec.ttl,
        seed=cfg.seed,
        batched=spec.batched,
    )
    if cfg.transcript is not None:
        write_transcript(transcript, cfg.transcript)
        logger.info("wrote %d events to %s", len(transcript.events), cfg.transcript)

    latency = latency_of(transcript, instance.targets, instance.g)
    cost = message_cost_of(transcript, len(instance.targets))
    summary = {
        "algorithm": algorithm,
        "delivery_ratio": f"{delivery_ratio_of(transcript, instance.targets):.6f}",
        "latency_norm": "absent" if latency is None else f"{latency:.6f}",
        "msg_cost_norm": "absent" if cost is None else f"{cost:.6f}",
        "quiescent": str(transcript.quiescent).lower(),
    }
    sys.stdout.write("".join(f"{key}={value}\n" for key, value in summary.items()))
    return 0


def sweep(cfg: CliConfig) -> int:
    """Run the configured study and write its CSV."""
    spec = cfg.spec()
    logger.info("study: %s", spec)
    emit_csv(run_experiment(spec), cfg.output)
    return 0


def tune_ttl(cfg: CliConfig) -> int:
    """Sweep MCFR-Steiner over hop budgets and write the CSV."""
    spec = cfg.spec()
    raw = cfg.settings.get("ttl_values")
    ttl_values = [parse_ttl(v) for v in parse_list(raw)] if raw else list(TTL_SWEEP_VALUES)
    logger.info("ttl study over %s: %s", ttl_values, spec)
    emit_csv(ttl_sweep(spec, ttl_values), cfg.output)
    return 0


COMMANDS: dict[str, Callable[[CliConfig], int]] = {
    "gen-graph": gen_graph,
    "simulate": simulate,
    "sweep": sweep,
    "ttl-sweep": tune_ttl,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the subcommand and return the exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        cfg = resolve(args)
        logger.info("resolved configuration: %s", cfg)
        return COMMANDS[cfg.command](cfg)
    except (ValueError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)  # noqa: TRY400
        return 2


if __name__ == "__main__":
    sys.exit(main())
