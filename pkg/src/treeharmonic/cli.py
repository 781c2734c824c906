"""Command-line harness: ``treeharmonic <experiment> [--config] [--out] [--seed]``.

Exit codes: 0 pass (or informational), 1 invalid config, 2 verdict fail,
3 internal error.
"""

from __future__ import annotations

import sys

import click

from .errors import ConfigError, DegenerateZ
from .experiments import EXPERIMENTS, ExperimentConfig, load_config, run_experiment, write_outputs

EXIT_PASS, EXIT_CONFIG, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3


def _run(name: str, config_path, out_dir, seed, quiet) -> int:
    try:
        cfg = load_config(config_path) if config_path else ExperimentConfig()
        if seed is not None:
            cfg = cfg.model_copy(update={"seed": seed})
        report = run_experiment(name, cfg)
    except (ConfigError, DegenerateZ) as exc:
        click.echo(f"invalid config: {exc}", err=True)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - mapped to the documented exit code
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_INTERNAL

    target = out_dir or cfg.output_path or "out"
    try:
        write_outputs(report, target)
    except OSError as exc:
        click.echo(f"internal error: cannot write outputs: {exc}", err=True)
        return EXIT_INTERNAL
    if not quiet:
        click.echo(f"{name}: {report.verdict} ({report.wall_time:.2f}s) -> {target}")
        for key, val in report.metrics.items():
            click.echo(f"  {key} = {val}")
    return EXIT_FAIL if report.verdict == "fail" else EXIT_PASS


@click.group()
def main():
    """Harmonic analysis experiments on homogeneous trees."""


def _make_command(name: str):
    @click.option("--config", "config_path", type=click.Path(), default=None,
                  help="JSON config file (unknown keys rejected).")
    @click.option("--out", "out_dir", type=click.Path(), default=None,
                  help="Output directory for CSV tables and report.json.")
    @click.option("--seed", type=int, default=None, help="Override the config seed.")
    @click.option("--quiet", is_flag=True, help="Suppress the metric summary.")
    def command(config_path, out_dir, seed, quiet):
        sys.exit(_run(name, config_path, out_dir, seed, quiet))

    command.__doc__ = (EXPERIMENTS[name].__doc__ or f"Run the {name} experiment.").strip()
    return main.command(name=name)(command)


for _name in EXPERIMENTS:
    _make_command(_name)


if __name__ == "__main__":
    main()
