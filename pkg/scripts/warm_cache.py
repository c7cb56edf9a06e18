#!/usr/bin/env python3
"""Precompute coefficient caches for the catalog."""

import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import click
from dotenv import load_dotenv

from src.geometry.catalog import catalog
from src.geometry.families import coefficient_series
from src.main import configure_logging
from src.models.model_config import ModelKind
from src.utils.cache import CoefficientCache

# Load environment variables
load_dotenv()


@click.command()
@click.argument("cache_dir", type=click.Path(file_okay=False))
@click.option("--terms", type=int, default=60, show_default=True)
def main(cache_dir: str, terms: int):
    """Precompute coefficient caches for the catalog."""
    configure_logging("INFO")
    cache = CoefficientCache(cache_dir)
    for key, config in catalog().items():
        if config.kind == ModelKind.EXPLICIT_RECURRENCE:
            continue
        family = config.to_family()
        series = cache.series(config, terms, lambda n, prefix: coefficient_series(family, n, prefix))
        click.echo(f"{key}: a_0..a_{series.order}")


if __name__ == "__main__":
    main()
