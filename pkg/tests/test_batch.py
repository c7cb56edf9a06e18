import pytest

from src.services.batch_service import BatchResult, BatchService, reproduce_summary
from src.services.pipeline_service import RunOptions


@pytest.mark.asyncio
async def test_run_many_keeps_order_and_isolates_failures():
    service = BatchService(concurrency=2)
    results = await service.run_many(["v33", "quintic", "nope"], "phi0", RunOptions(terms=4))
    assert [r.key for r in results] == ["v33", "quintic", "nope"]
    assert [r.exit_code for r in results] == [0, 0, 1]
    assert results[1].payload["phi0"][:3] == ["1", "120", "113400"]
    assert results[2].payload["error"]["code"] == "CONFIG_ERROR"


def test_run_one_wraps_computation_errors(mocker):
    from src.utils.errors import NoFit

    mocker.patch("src.services.batch_service.execute", side_effect=NoFit("no fit"))
    result = BatchService(concurrency=1).run_one("quintic", "operator", None)
    assert result.exit_code == 2
    assert result.payload == {"error": {"code": "NO_FIT", "message": "no fit"}}


def test_run_one_wraps_unexpected_errors(mocker):
    mocker.patch("src.services.batch_service.execute", side_effect=RuntimeError("boom"))
    result = BatchService(concurrency=1).run_one("quintic", "operator", None)
    assert result.exit_code == 2
    assert result.payload == {"error": {"code": "INTERNAL_ERROR", "message": "boom"}}


@pytest.mark.asyncio
async def test_run_many_survives_a_crashing_job(mocker):
    def fake_execute(model, command, options):
        if model.name == "quintic":
            raise ZeroDivisionError("division by zero")
        return {"model": model.name}

    mocker.patch("src.services.batch_service.execute", side_effect=fake_execute)
    results = await BatchService(concurrency=2).run_many(["v33", "quintic", "v24"], "phi0")
    assert [r.exit_code for r in results] == [0, 2, 0]
    assert results[1].payload["error"]["code"] == "INTERNAL_ERROR"
    assert results[2].payload == {"model": "v24"}


def test_concurrency_defaults_to_settings():
    assert BatchService().concurrency == 4


def test_reproduce_summary():
    results = [
        BatchResult(
            "v2222",
            0,
            {
                "diagnostics": [
                    {"check": "alpha", "status": "mismatch"},
                    {"check": "mu", "status": "match"},
                    {"check": "W0", "status": "match_up_to_sign"},
                ]
            },
        ),
        BatchResult("nope", 1, {"error": {"code": "CONFIG_ERROR", "message": "unknown"}}),
    ]
    summary = reproduce_summary(results)
    assert summary["models"][0] == {"model": "v2222", "exit_code": 0, "mismatches": ["alpha"], "error": None}
    assert summary["models"][1]["mismatches"] == []
    assert summary["models"][1]["error"]["code"] == "CONFIG_ERROR"
