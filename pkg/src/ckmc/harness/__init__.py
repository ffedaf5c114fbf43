"""Config files, replica orchestration, summaries, and the command-line tool."""

from .config import ConfigError, RunConfig, override, parse_config, read_config, serialize_config, write_config
from .orchestrate import (
    SUMMARY_HEADER, RunResult, StoredRecord, load_records, load_replica, orchestrate, run_replica,
)
from .stats import Accumulator, SummaryStats

__all__ = [
    "ConfigError", "RunConfig", "override", "parse_config", "read_config", "serialize_config",
    "write_config", "SUMMARY_HEADER", "RunResult", "StoredRecord", "load_records", "load_replica",
    "orchestrate", "run_replica", "Accumulator", "SummaryStats",
]
