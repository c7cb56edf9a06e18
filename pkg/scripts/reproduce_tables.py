#!/usr/bin/env python3
"""Rerun every catalog model against its printed tables."""

import asyncio
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dotenv import load_dotenv

from src.geometry.catalog import list_models
from src.main import configure_logging
from src.services.batch_service import batch_service
from src.services.pipeline_service import RunOptions

# Load environment variables
load_dotenv()


def main() -> int:
    configure_logging()
    options = RunOptions(compare_printed=True)
    results = asyncio.run(batch_service.run_many(list_models(), "report", options))
    failed = 0
    for result in results:
        if result.exit_code:
            failed += 1
            print(f"ERROR  {result.key}: {result.payload['error']['message']}")
            continue
        mismatches = [
            f"{d['check']} ({d['detail']})" if d.get("detail") else d["check"]
            for d in result.payload["diagnostics"]
            if d["status"] == "mismatch"
        ]
        status = "FLAG " if mismatches else "PASS "
        print(f"{status}  {result.key}" + (": " + "; ".join(mismatches) if mismatches else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
