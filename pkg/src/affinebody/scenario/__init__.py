"""Declarative scenarios, orchestration and tabular export."""

from .config import ScenarioConfig, dump_config, load_config
from .runner import run_scenario
from .table import ResultTable, export_table, read_table
