"""Command line front end.

Every command takes a scenario file plus an output directory, recomputes
the pipeline up to its stage, writes a certificate named after the
command, and exits 0 on pass, 2 on a failed audit, 3 on a scenario the
file itself rules out.
"""

from __future__ import annotations

import sys

import click

from .scenario import scenario_run

_scenario_arg = click.argument("scenario", type=click.Path(exists=False))
_out_opt = click.option(
    "--out",
    "-o",
    default=".",
    show_default=True,
    help="directory for certificates, dumps and figures",
)


@click.group()
def main() -> None:
    """Finite coherent-tree colorings and their audits."""


def _run(command: str, scenario: str, out: str) -> None:
    sys.exit(scenario_run(scenario, command, out))


@main.command("build-family")
@_scenario_arg
@_out_opt
def build_family_cmd(scenario: str, out: str) -> None:
    """Run the filter requests and extract the thinned families."""
    _run("build-family", scenario, out)


@main.command("two-thin")
@_scenario_arg
@_out_opt
def two_thin_cmd(scenario: str, out: str) -> None:
    """Project the families into the arena and split them thin."""
    _run("two-thin", scenario, out)


@main.command("color")
@_scenario_arg
@_out_opt
def color_cmd(scenario: str, out: str) -> None:
    """Build the coherent coloring level by level."""
    _run("color", scenario, out)


@main.command("audit")
@_scenario_arg
@_out_opt
def audit_cmd(scenario: str, out: str) -> None:
    """Run every audit the scenario configures."""
    _run("audit", scenario, out)


@main.command("pr1")
@_scenario_arg
@_out_opt
def pr1_cmd(scenario: str, out: str) -> None:
    """Induce the branch coloring and search the instances."""
    _run("pr1", scenario, out)


@main.command("report")
@_scenario_arg
@_out_opt
def report_cmd(scenario: str, out: str) -> None:
    """Write every dump plus rendered figures."""
    _run("report", scenario, out)


if __name__ == "__main__":
    main()
