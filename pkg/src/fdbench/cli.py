"""Command line interface: ``fdbench run | rank | extract | validate``.

Exit codes: 0 success, 1 configuration or input error, 2 partial job failure.
"""
import csv
import logging
import sys

import click
import yaml

from fdbench.bench import ConfigError, aggregate_ranks, load_config, percent_of_max, read_records, run_benchmark
from fdbench.extract import make_extractor
from fdbench.fdata import load_task

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def parse_params(text):
    """``"k=v,k2=v2"`` -> dict with YAML-typed values."""
    params = {}
    if not text:
        return params
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(f"expected key=value, got {item!r}", param_hint="--params")
        params[key.strip()] = yaml.safe_load(value)
    return params


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Functional data classification benchmark."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="YAML or JSON benchmark config.")
@click.option("--workers", type=int, default=None, help="Worker processes (overrides the config).")
@click.option("--seed", type=int, default=None, help="Seed for splits and tuning (overrides the config).")
@click.option("--resume", is_flag=True, help="Skip (dataset, pipeline) jobs already finished.")
def run(config_path, workers, seed, resume):
    """Run a benchmark and write records and aggregates."""
    try:
        config = load_config(config_path)
        if workers is not None and workers < 1:
            raise ConfigError("--workers must be at least 1")
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    result = run_benchmark(config, workers=workers, seed=seed, resume=resume)
    n_failed = len(result.failures) + sum(r["status"] != "ok" for r in result.records)
    click.echo(f"{len(result.records)} records, {result.n_executed} jobs executed, "
               f"{n_failed} failures -> {config.output_dir}")
    for f in result.failures:
        click.echo(f"failed: {f['dataset']}/{f['pipeline']}: {f['reason']}", err=True)
    sys.exit(EXIT_PARTIAL if result.partial_failure else EXIT_OK)


@main.command()
@click.option("--results", "results_dir", required=True, type=click.Path(), help="Benchmark output directory.")
def rank(results_dir):
    """Print average ranks and percent-of-max accuracy per pipeline."""
    try:
        result = read_records(results_dir)
    except (OSError, KeyError, ValueError) as exc:
        click.echo(f"cannot read records from {results_dir}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    avg, _ = aggregate_ranks(result)
    _, pom = percent_of_max(result)
    click.echo(f"{'pipeline':<32} {'avg_rank':>9} {'pct_max':>8}")
    for p in sorted(avg, key=lambda k: (avg[k], k)):
        click.echo(f"{p:<32} {avg[p]:>9.3f} {pom[p]:>8.4f}")


@main.command()
@click.option("--dataset", required=True, type=click.Path(), help="UCR file/stem or CSV with sidecar.")
@click.option("--method", required=True, help="Extraction method.")
@click.option("--params", default="", help="Extractor parameters as k=v,k2=v2.")
@click.option("--out", required=True, type=click.Path(), help="Output CSV.")
def extract(dataset, method, params, out):
    """Fit an extractor on a whole dataset and write its features."""
    try:
        task = load_task(dataset)
        kwargs = parse_params(params)
        header, columns = ["target"], []
        for feat in task.dataset.functional_features:
            block = make_extractor(method, **kwargs).fit_transform(feat.values, feat.grid, prefix=f"{feat.name}.")
            header += block.names
            columns.append(block.values)
    except (OSError, ValueError, TypeError, click.BadParameter) as exc:
        click.echo(f"extract error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    labels = [task.levels[c] for c in task.target] if task.levels else list(task.target)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, lab in enumerate(labels):
            w.writerow([lab] + [repr(float(v)) for block in columns for v in block[i]])
    click.echo(f"{len(labels)} rows x {len(header) - 1} features -> {out}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Benchmark config to check.")
def validate(config_path):
    """Check a config and that its datasets load."""
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    problems = []
    for ds in config.datasets:
        try:
            task = load_task(ds.path, name=ds.name)
            click.echo(f"dataset {ds.name}: {task.n_obs} obs, {task.n_classes} classes")
        except Exception as exc:
            problems.append(f"dataset {ds.name}: {exc}")
    for pc in config.pipelines:
        tuned = f"tuned ({pc.strategy}, budget {pc.budget}, {len(pc.space)} params)" if pc.tuned else "default"
        click.echo(f"pipeline {pc.id}: {pc.pipeline.learner.method}, {tuned}")
    for p in problems:
        click.echo(f"error: {p}", err=True)
    sys.exit(EXIT_CONFIG if problems else EXIT_OK)


if __name__ == "__main__":
    main()
