"""Command-line entry point.

Option precedence is flag > environment variable > default.  Every common
option has a ``PSU3MOBIUS_*`` variable, e.g. ``PSU3MOBIUS_SEED=7``.
"""

from __future__ import annotations

import logging
import sys

import click

from .pipeline import DEFAULT_PRIMES, RunConfig, UsageError, run
from .reporting import render, validate

VERB_TASKS = {
    "generate": ("geometry", "group"),
    "maximals": ("maximals",),
    "mu": ("mu", "lambda"),
    "lambda": ("lambda",),
    "chi": ("chi",),
    "verify": ("verify",),
}


def common(f):
    opts = [
        click.option("--n", "n", type=int, default=1, show_default=True, envvar="PSU3MOBIUS_N",
                     help="Field parameter: q = 2^(2^n)."),
        click.option("--threads", type=int, default=1, show_default=True, envvar="PSU3MOBIUS_THREADS",
                     help="Worker threads (accepted; computation is sequential)."),
        click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
                     envvar="PSU3MOBIUS_CACHE_DIR", help="Directory for cached artifacts."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json",
                     show_default=True, envvar="PSU3MOBIUS_FORMAT"),
        click.option("--seed", type=int, default=0, show_default=True, envvar="PSU3MOBIUS_SEED",
                     help="Seed for Monte Carlo and sampled audits."),
        click.option("--budget-nodes", type=int, default=None, envvar="PSU3MOBIUS_BUDGET_NODES",
                     help="Abort the intersection closure beyond this many nodes."),
        click.option("--trials", type=int, default=100_000, show_default=True, envvar="PSU3MOBIUS_TRIALS",
                     help="Monte Carlo sample size."),
        click.option("--timing", is_flag=True, default=False, envvar="PSU3MOBIUS_TIMING",
                     help="Include wall-clock timings (breaks byte-identical output)."),
        click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                     help="Write the report here instead of stdout."),
        click.option("-v", "--verbose", count=True),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def execute(verb: str, n, threads, cache_dir, fmt, seed, budget_nodes, trials, timing, output,
            verbose, primes=DEFAULT_PRIMES):
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    cfg = RunConfig(n=n, tasks=VERB_TASKS[verb], threads=threads, cache_dir=cache_dir,
                    output_format=fmt, rng_seed=seed, budget_nodes=budget_nodes,
                    primes=tuple(primes), mc_trials=trials, timing=timing, command=verb)
    try:
        doc = run(cfg)
    except UsageError as exc:
        raise click.UsageError(str(exc))
    validate(doc)
    text = render(doc, fmt)
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    if doc["status"] == "fail":
        sys.exit(1)
    if doc["status"] == "partial":
        sys.exit(3)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Möbius functions, subgroup posets and Euler characteristics of PSU(3, 2^(2^n))."""


@main.command()
@common
def generate(**kw):
    """Build the plane, curve and group; report counts and the element census."""
    execute("generate", **kw)


@main.command()
@common
def maximals(**kw):
    """Maximal subgroup families and the intersection closure."""
    execute("maximals", **kw)


@main.command()
@common
def mu(**kw):
    """μ(H, G) per closure class, with λ alongside, and generation probabilities."""
    execute("mu", **kw)


@main.command(name="lambda")
@common
def lambda_(**kw):
    """λ(H, G) on the poset of subgroup classes."""
    execute("lambda", **kw)


@main.command()
@click.option("--prime", "-p", "primes", type=int, multiple=True, help="Prime to evaluate (repeatable).")
@click.option("--all", "all_", is_flag=True, help="Evaluate p = 2, 3, 5, 7, 13.")
@common
def chi(primes, all_, **kw):
    """Euler characteristic of the poset of nontrivial p-subgroups."""
    if not primes and not all_:
        raise click.UsageError("give --prime P or --all")
    execute("chi", primes=DEFAULT_PRIMES if all_ else primes, **kw)


@main.command()
@click.option("--all", "all_", is_flag=True, default=True, help="Run every task (the default).")
@common
def verify(all_, **kw):
    """Run every task and check every registered claim."""
    execute("verify", **kw)


if __name__ == "__main__":
    main()
