"""Command-line entry point for cy-mirror-series."""

import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import click
import structlog
from pydantic import ValidationError

from src.config.settings import settings
from src.geometry.catalog import get_model, list_models
from src.models.model_config import ModelConfig
from src.services.batch_service import batch_service, reproduce_summary
from src.services.pipeline_service import RunOptions, execute
from src.utils.errors import (
    COMPUTATION_EXIT_CODE,
    VALIDATION_EXIT_CODE,
    ConfigError,
    MirrorError,
)
from src.utils.formatting import FORMATS, render, render_json

logger = structlog.get_logger()


def configure_logging(level: Optional[str] = None, json_logs: Optional[bool] = None):
    """structlog over stdlib logging; everything goes to stderr."""
    level = (level or settings.log_level).upper()
    json_logs = settings.log_json if json_logs is None else json_logs
    renderer = structlog.processors.JSONRenderer() if json_logs else structlog.dev.ConsoleRenderer()
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level),
        force=True,
    )


def _validation_envelope(e: ValidationError) -> Dict[str, Any]:
    first = e.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "config"
    return {"error": {"code": ConfigError.code, "message": f"{field}: {first['msg']}"}}


def load_config(source: Union[ModelConfig, Dict[str, Any], str, Path, None]) -> Optional[ModelConfig]:
    """Config from a ModelConfig, a dict, or a JSON file path."""
    if source is None or isinstance(source, ModelConfig):
        return source
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            source = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}", path=str(path))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e.msg}", path=str(path))
    if not isinstance(source, dict):
        raise ConfigError("a model config must be a JSON object")
    return ModelConfig(**source)


def reproduce(options: RunOptions) -> Tuple[int, Dict[str, Any]]:
    options = options.model_copy(update={"compare_printed": True})
    results = asyncio.run(batch_service.run_many(list_models(), "report", options))
    return max(r.exit_code for r in results), reproduce_summary(results)


def run(
    config: Union[ModelConfig, Dict[str, Any], str, Path, None],
    command: str,
    options: Optional[RunOptions] = None,
) -> Tuple[int, str]:
    """Exit code and rendered output of one command."""
    options = options or RunOptions()
    output_format = options.output_format or settings.output_format
    try:
        if command == "reproduce":
            code, payload = reproduce(options)
            return code, render(payload, output_format)
        payload = execute(load_config(config), command, options)
        return 0, render(payload, output_format)
    except ValidationError as e:
        return VALIDATION_EXIT_CODE, render_json(_validation_envelope(e)) + "\n"
    except MirrorError as e:
        logger.debug("command failed", command=command, code=e.code)
        return e.exit_code, render_json(e.to_envelope()) + "\n"
    except Exception as e:
        logger.error("unhandled failure", command=command, error=str(e), exc_info=True)
        envelope = {"error": {"code": "INTERNAL_ERROR", "message": str(e)}}
        return COMPUTATION_EXIT_CODE, render_json(envelope) + "\n"


def _common_options(func):
    options = [
        click.option("--model", "model_key", help="Catalog model key."),
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Model config JSON."),
        click.option("--terms", type=int, help="Truncation order of the series."),
        click.option("--max-degree", type=int, help="Instanton depth and multivariate degree bound."),
        click.option("--format", "output_format", type=click.Choice(FORMATS), help="Output format."),
        click.option("--cache-dir", type=click.Path(file_okay=False), help="Coefficient cache directory."),
        click.option("--compare-printed", is_flag=True, help="Compare against printed reference data."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _dispatch(command: str, model_key, config_path, **flags):
    options = RunOptions(**flags)
    if model_key and config_path:
        code, output = VALIDATION_EXIT_CODE, render_json(
            ConfigError("use either --model or --config, not both").to_envelope()
        ) + "\n"
    else:
        try:
            source = get_model(model_key) if model_key else config_path
            code, output = run(source, command, options)
        except MirrorError as e:
            code, output = e.exit_code, render_json(e.to_envelope()) + "\n"
    click.echo(output, nl=False)
    sys.exit(code)


@click.group()
@click.option("--log-level", default=None, help="Log level (stderr).")
@click.option("--log-json/--log-console", default=None, help="Render logs as JSON.")
def cli(log_level, log_json):
    """Exact mirror-symmetry series for Calabi-Yau models."""
    configure_logging(log_level, log_json)


def _register(name: str, help_text: str):
    @_common_options
    def command(model_key, config_path, **flags):
        _dispatch(name, model_key, config_path, **flags)

    command.__doc__ = help_text
    cli.command(name=name)(command)


for _name, _help in (
    ("phi0", "Coefficients of the fundamental period."),
    ("operator", "Constructed and fitted MU operator."),
    ("qcoord", "Logarithmic solution, q(z) and z(q)."),
    ("yukawa", "C_d, W, K_z and K_q."),
    ("instantons", "Predicted rational-curve counts."),
    ("report", "Full pipeline report."),
    ("catalog", "List the built-in models."),
    ("bivariate", "Two-parameter solutions and q-coordinates."),
    ("discriminant", "Discriminant of the two-parameter P2 x P2 family."),
    ("reproduce", "Run every catalog model against its printed data."),
):
    _register(_name, _help)


if __name__ == "__main__":
    cli()
