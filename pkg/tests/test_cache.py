from fractions import Fraction

import pytest

from src.algebra.series import Series1, SeriesM
from src.geometry.families import ci_series, coefficient_series
from src.models.model_config import ModelConfig
from src.utils import cache as cache_module
from src.utils.cache import CoefficientCache, CorruptCache


def test_save_and_load(cache_dir, quintic_config, quintic):
    cache = CoefficientCache(cache_dir)
    series = ci_series(quintic, 30)
    path = cache.save(quintic_config, series)
    assert path.name == "quintic.coeffs"
    assert path.read_text().splitlines()[1] == "# order 30"
    assert cache.load(quintic_config) == series


def test_missing_file_is_a_miss(cache_dir, quintic_config):
    assert CoefficientCache(cache_dir).load(quintic_config) is None


def test_multivariate_round_trip():
    F = SeriesM(2, 3, {(0, 0): 1, (1, 0): Fraction(-3, 7), (1, 2): 11})
    config_hash, loaded = CoefficientCache.loads(CoefficientCache.dumps("abc", F))
    assert config_hash == "abc"
    assert loaded == F


def test_raising_terms_extends_prefix(cache_dir, quintic_config, quintic, mocker):
    cache = CoefficientCache(cache_dir)
    compute = mocker.Mock(side_effect=lambda order, prefix: coefficient_series(quintic, order, prefix))
    first = cache.series(quintic_config, 10, compute)
    assert compute.call_args.args[1] is None
    second = cache.series(quintic_config, 20, compute)
    prefix = compute.call_args.args[1]
    assert prefix == first
    assert second == ci_series(quintic, 20)
    third = cache.series(quintic_config, 15, compute)
    assert compute.call_count == 2
    assert third == ci_series(quintic, 15)


def test_corrupt_file_is_logged_and_recomputed(cache_dir, quintic_config, quintic, mocker):
    cache = CoefficientCache(cache_dir)
    cache.save(quintic_config, ci_series(quintic, 5))
    path = cache.path_for(quintic_config)
    path.write_text(path.read_text().replace("1 120/1", "1 one-twenty"))
    warning = mocker.patch.object(cache_module.logger, "warning")
    assert cache.load(quintic_config) is None
    warning.assert_called_once()
    result = cache.series(quintic_config, 5, lambda order, prefix: coefficient_series(quintic, order, prefix))
    assert result == ci_series(quintic, 5)
    assert cache.load(quintic_config) == result


def test_config_change_invalidates(cache_dir, quintic_config, quintic):
    cache = CoefficientCache(cache_dir)
    cache.save(quintic_config, ci_series(quintic, 5))
    changed = ModelConfig(name="quintic", kind="complete_intersection", degrees=[3, 3])
    assert changed.config_hash() != quintic_config.config_hash()
    assert cache.load(changed) is None


def test_terms_do_not_change_the_hash(quintic_config):
    longer = quintic_config.model_copy(update={"terms": 40})
    assert longer.config_hash() == quintic_config.config_hash()


def test_truncated_file_is_corrupt():
    text = CoefficientCache.dumps("h", Series1.of([1, 2, 3]))
    short = "\n".join(text.splitlines()[:-1])
    with pytest.raises(CorruptCache, match="expected 3"):
        CoefficientCache.loads(short)
