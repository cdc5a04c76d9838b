"""
median-meta entrypoint: load .env, then run the CLI.

Usage:
  python -m median_meta.main pool median_meta/data/patient_delay_fixture.csv

Env:
  MEDIANMETA_LOG_LEVEL          - loguru level (default INFO)
  MEDIANMETA_SEED, MEDIANMETA_REPLICATIONS, MEDIANMETA_WORKERS,
  MEDIANMETA_OUTPUT_DIR, ...    - simulation defaults (see settings)
"""

from dotenv import load_dotenv

from median_meta.cli import main

load_dotenv()

if __name__ == "__main__":
    raise SystemExit(main())
