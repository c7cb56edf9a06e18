"""On-disk coefficient cache."""

import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Union

import structlog

from src.algebra.series import Series1, SeriesM
from src.models.model_config import ModelConfig

logger = structlog.get_logger(__name__)

HEADER_PREFIX = "# config-hash "


class CorruptCache(ValueError):
    """A cache file that cannot be parsed."""


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name) or "model"


class CoefficientCache:
    """Coefficient files keyed by model, invalidated by config hash."""

    def __init__(self, cache_dir: Union[str, Path]):
        self.cache_dir = Path(cache_dir)

    def path_for(self, config: ModelConfig, suffix: str = "coeffs") -> Path:
        return self.cache_dir / f"{_slug(config.name)}.{suffix}"

    # serialization

    @staticmethod
    def dumps(config_hash: str, series: Union[Series1, SeriesM]) -> str:
        lines = [f"{HEADER_PREFIX}{config_hash}"]
        if isinstance(series, Series1):
            lines.append(f"# order {series.order}")
            for n, c in enumerate(series.coeffs):
                lines.append(f"{n} {c.numerator}/{c.denominator}")
        else:
            lines.append(f"# vars {series.nvars} bound {series.bound}")
            for exponent, c in series.items():
                key = ",".join(str(e) for e in exponent)
                lines.append(f"{key} {c.numerator}/{c.denominator}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def _parse_value(text: str) -> Fraction:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den or "1"))

    @classmethod
    def loads(cls, text: str) -> tuple:
        """(config hash, series) from a cache file body."""
        lines = text.splitlines()
        if len(lines) < 2 or not lines[0].startswith(HEADER_PREFIX):
            raise CorruptCache("missing header")
        config_hash = lines[0][len(HEADER_PREFIX):].strip()
        shape = lines[1].split()
        try:
            if shape[:2] == ["#", "order"]:
                order = int(shape[2])
                coeffs = []
                for expected, line in enumerate(lines[2:]):
                    index, value = line.split()
                    if int(index) != expected:
                        raise CorruptCache(f"index {index} out of sequence")
                    coeffs.append(cls._parse_value(value))
                if len(coeffs) != order + 1:
                    raise CorruptCache(f"expected {order + 1} coefficients, found {len(coeffs)}")
                return config_hash, Series1(tuple(coeffs))
            if shape[:2] == ["#", "vars"]:
                nvars, bound = int(shape[2]), int(shape[4])
                terms = {}
                for line in lines[2:]:
                    key, value = line.split()
                    exponent = tuple(int(e) for e in key.split(","))
                    if len(exponent) != nvars:
                        raise CorruptCache(f"exponent {key} has the wrong length")
                    terms[exponent] = cls._parse_value(value)
                return config_hash, SeriesM(nvars, bound, terms)
        except (ValueError, IndexError, ZeroDivisionError) as e:
            if isinstance(e, CorruptCache):
                raise
            raise CorruptCache(str(e))
        raise CorruptCache("unknown shape line")

    # file access

    def load(self, config: ModelConfig, suffix: str = "coeffs") -> Optional[Union[Series1, SeriesM]]:
        """Cached series, or None on a miss, a stale hash or a corrupt file."""
        path = self.path_for(config, suffix)
        if not path.exists():
            logger.info("cache miss", model=config.name, path=str(path))
            return None
        try:
            config_hash, series = self.loads(path.read_text(encoding="utf-8"))
        except CorruptCache as e:
            logger.warning("corrupt cache ignored", model=config.name, path=str(path), error=str(e))
            return None
        if config_hash != config.config_hash():
            logger.info("cache invalidated by config change", model=config.name)
            return None
        logger.info("cache hit", model=config.name, path=str(path))
        return series

    def save(self, config: ModelConfig, series: Union[Series1, SeriesM], suffix: str = "coeffs") -> Path:
        """Write atomically through a temporary file."""
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(config, suffix)
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, prefix=".tmp-", suffix=".coeffs")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(self.dumps(config.config_hash(), series))
            os.replace(tmp, path)
        except Exception:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def series(
        self,
        config: ModelConfig,
        N: int,
        compute: Callable[[int, Optional[Series1]], Series1],
    ) -> Series1:
        """Coefficients to order N, extending a cached prefix when one exists."""
        cached = self.load(config)
        if isinstance(cached, Series1) and cached.order >= N:
            return cached.truncate(N)
        prefix = cached if isinstance(cached, Series1) else None
        if prefix is not None:
            logger.info("cache extended", model=config.name, cached=prefix.order, wanted=N)
        result = compute(N, prefix)
        self.save(config, result)
        return result
