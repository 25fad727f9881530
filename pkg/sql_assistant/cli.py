"""Command-line entry point: ``sql-sense check`` and ``sql-sense serve``."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import NoReturn, Optional

import click

from sql_assistant import __version__
from sql_assistant.exception.custom_exception import ConfigError, DatasetError
from sql_assistant.logger import GLOBAL_LOGGER as log
from sql_assistant.report.reporter import FORMATS, emit_report
from sql_assistant.utils.settings_loader import SettingsLoader
from sql_assistant.workflow.pipeline import run_analysis

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

SQL_SUFFIXES = (".sql",)


def _fail(message: str) -> NoReturn:
    click.echo(f"Error: {message}", err=True)
    sys.exit(EXIT_ERROR)


def read_sources(paths: tuple[str, ...]) -> list[tuple[str, str]]:
    """Read SQL files, ``*.sql`` files of directories (sorted), or stdin for ``-``."""
    sources: list[tuple[str, str]] = []
    for raw in paths or ("-",):
        if raw == "-":
            sources.append(("<stdin>", click.get_text_stream("stdin").read()))
            continue
        path = Path(raw)
        if path.is_dir():
            files = sorted(p for p in path.rglob("*") if p.is_file() and p.suffix.lower() in SQL_SUFFIXES)
            if not files:
                _fail(f"no .sql files under {path}")
        elif path.is_file():
            files = [path]
        else:
            _fail(f"SQL source not found: {path}")
        for file in files:
            try:
                sources.append((file.as_posix(), file.read_text(encoding="utf-8")))
            except (OSError, UnicodeDecodeError) as e:
                _fail(f"cannot read {file}: {e}")
    return sources


def _write(data: bytes, output: Optional[str]) -> None:
    if output is None:
        stream = click.get_binary_stream("stdout")
        stream.write(data)
        stream.flush()
        return
    try:
        Path(output).write_bytes(data)
    except OSError as e:
        _fail(f"cannot write {output}: {e}")


@click.group()
@click.version_option(version=__version__, prog_name="sql-sense")
def cli() -> None:
    """Detect, rank and repair SQL anti-patterns."""


@cli.command("check")
@click.argument("sources", nargs=-1)
@click.option("--data", "data", default=None, help="SQLite file or directory of CSV files to profile.")
@click.option("--preset", default=None, help="Ranking preset (C1 read-heavy, C2 hybrid).")
@click.option("--weights", default=None, help="YAML file of ranking weights (w_rp ... w_a).")
@click.option("--metrics", default=None, help="YAML file overriding impact vectors per kind.")
@click.option("--thresholds", default=None, help="YAML file overriding detection thresholds.")
@click.option("--config", "config_path", default=None, help="Alternate config.yaml.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
@click.option("--seed", type=int, default=None, help="Sampling seed; omitted means first-N rows.")
@click.option("--inter-query", "inter_query_mode", type=click.Choice(["count", "score"]), default=None)
@click.option("--no-data-rules", is_flag=True, help="Skip profiling-based detection.")
@click.option("--intra-only", is_flag=True, help="Per-statement detection only, no cross-statement context.")
@click.option("--fail-on", default="", help="Comma list of categories or kinds that set exit code 1.")
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--output", "-o", default=None, help="Write the report to a file instead of stdout.")
def check_command(
    sources: tuple[str, ...],
    data: Optional[str],
    preset: Optional[str],
    weights: Optional[str],
    metrics: Optional[str],
    thresholds: Optional[str],
    config_path: Optional[str],
    fmt: str,
    seed: Optional[int],
    inter_query_mode: Optional[str],
    no_data_rules: bool,
    intra_only: bool,
    fail_on: str,
    workers: Optional[int],
    output: Optional[str],
) -> None:
    """
    Analyse SQL SOURCES (files, directories or - for stdin).

    Exit code 0 when no active finding matches --fail-on, 1 when one does,
    2 on usage, configuration or I/O errors.
    """
    try:
        settings = SettingsLoader(config_path).load(
            preset=preset,
            weights_file=weights,
            metrics_file=metrics,
            thresholds_file=thresholds,
            inter_query_mode=inter_query_mode,
            seed=seed,
            inter_query=not intra_only,
            data_rules=not no_data_rules,
            workers=workers,
        )
    except ConfigError as e:
        _fail(e.error_message)

    corpus = read_sources(sources)
    try:
        result = run_analysis(corpus, dataset=data, settings=settings)
        failing = result.failing(fail_on.split(","))
    except (ConfigError, DatasetError) as e:
        _fail(e.error_message)
    except ValueError as e:
        _fail(str(e))

    _write(emit_report(result, fmt), output)
    log.info("Report written", format=fmt, findings=len(result.active), failing=len(failing))
    sys.exit(EXIT_FINDINGS if failing else EXIT_CLEAN)


@cli.command("serve")
@click.option("--host", default=None, help="Bind address (default from config).")
@click.option("--port", type=int, default=None, help="Bind port (default from config).")
@click.option("--config", "config_path", default=None, help="Alternate config.yaml.")
def serve_command(host: Optional[str], port: Optional[int], config_path: Optional[str]) -> None:
    """Serve POST /api/check over HTTP."""
    import uvicorn

    from sql_assistant.api.service import create_app

    try:
        settings = SettingsLoader(config_path).load()
    except ConfigError as e:
        _fail(e.error_message)
    host = host or settings.server.get("host", "127.0.0.1")
    port = port or int(settings.server.get("port", 8080))
    log.info("Starting REST service", host=host, port=port)
    uvicorn.run(create_app(settings), host=host, port=port)


if __name__ == "__main__":
    cli()
