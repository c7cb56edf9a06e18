"""Catalog-wide fan-out of pipeline commands."""

import asyncio
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import structlog

from src.config.settings import settings
from src.geometry.catalog import get_model
from src.services.pipeline_service import RunOptions, execute
from src.utils.errors import COMPUTATION_EXIT_CODE, MirrorError

logger = structlog.get_logger(__name__)


@dataclass
class BatchResult:
    key: str
    exit_code: int
    payload: Dict[str, Any]


class BatchService:
    """Runs one command over many catalog models on worker threads."""

    def __init__(self, concurrency: Optional[int] = None):
        self.concurrency = concurrency or settings.worker_concurrency

    def run_one(self, key: str, command: str, options: Optional[RunOptions]) -> BatchResult:
        """Run a single job; failures become error envelopes."""
        logger.info("batch job started", model=key, command=command)
        try:
            payload = execute(get_model(key), command, options)
        except MirrorError as e:
            logger.error("batch job failed", model=key, code=e.code, error=e.message)
            return BatchResult(key=key, exit_code=e.exit_code, payload=e.to_envelope())
        except Exception as e:
            logger.error("batch job crashed", model=key, error=str(e), exc_info=True)
            envelope = {"error": {"code": "INTERNAL_ERROR", "message": str(e)}}
            return BatchResult(key=key, exit_code=COMPUTATION_EXIT_CODE, payload=envelope)
        logger.info("batch job finished", model=key)
        return BatchResult(key=key, exit_code=0, payload=payload)

    async def run_many(
        self, keys: Sequence[str], command: str, options: Optional[RunOptions] = None
    ) -> List[BatchResult]:
        """Results come back in the order of ``keys``."""
        semaphore = asyncio.Semaphore(self.concurrency)

        async def job(key: str) -> BatchResult:
            async with semaphore:
                return await asyncio.to_thread(self.run_one, key, command, options)

        return list(await asyncio.gather(*(job(key) for key in keys)))


def reproduce_summary(results: Sequence[BatchResult]) -> Dict[str, Any]:
    """Per-model pass/fail over printed comparisons of a report run."""
    rows = []
    for result in results:
        mismatches = [
            d["check"]
            for d in result.payload.get("diagnostics", [])
            if d["status"] == "mismatch"
        ]
        rows.append(
            {
                "model": result.key,
                "exit_code": result.exit_code,
                "mismatches": mismatches,
                "error": result.payload.get("error"),
            }
        )
    return {"models": rows}


# Global batch service instance
batch_service = BatchService()
