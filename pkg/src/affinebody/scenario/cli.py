"""Command-line front end: ``run``, ``sweep`` and ``audit``.

Exit status: 0 success, 2 validation failure, 3 numerical failure,
4 input/output failure.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence


from ..errors import AffineBodyError, OutputError, ValidationError
from .config import ScenarioConfig, parse_yaml, canonical_json, config_from_mapping, load_config
from .runner import failure_table, run_scenario
from .table import ResultTable, export_table, read_table

OUT_DIR_ENV = "AFFINEBODY_OUT_DIR"

log = logging.getLogger("affinebody")


def default_output(cfg: ScenarioConfig, fmt: str, out: Optional[str]) -> Path:
    if out is not None:
        return Path(out)
    if cfg.output.path:
        return Path(cfg.output.path)
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    stem = cfg.name or cfg.kind
    return base / f"{stem}-{cfg.config_hash[:12]}.{fmt}"


def execute(cfg: ScenarioConfig, out: Optional[str] = None, fmt: Optional[str] = None) -> tuple[int, Path]:
    """Run one scenario and export it; failures become a one-row table plus an exit code."""
    fmt = fmt or cfg.output.format
    path = default_output(cfg, fmt, out)
    try:
        table = run_scenario(cfg)
        code = 0
        if "status" in table.names and any(str(s).startswith("Unconverged") for s in table.column("status")):
            code = 3
    except AffineBodyError as exc:
        log.error("%s failed: %s", cfg.name or cfg.kind, exc)
        table = failure_table(cfg, exc)
        code = exc.exit_code
    export_table(table, path, fmt)
    return code, path


def _apply_overrides(cfg: ScenarioConfig, seed: Optional[int]) -> ScenarioConfig:
    if seed is None:
        return cfg
    # re-validate so the seed range check applies to overrides too
    raw = cfg.to_dict()
    raw["seed"] = seed
    return config_from_mapping(raw)


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(Path(args.config)), args.seed)
    code, path = execute(cfg, args.out, args.format)
    print(path)
    return code


def load_batch(path: Path) -> list[ScenarioConfig]:
    """A batch file holds ``scenarios:``, a list of inline scenarios or paths to scenario files."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot read batch file: {exc.strerror}", str(path)) from exc
    doc = parse_yaml(text)
    if not isinstance(doc, dict) or not isinstance(doc.get("scenarios"), list):
        raise ValidationError("a batch file needs a 'scenarios' list", "scenarios")
    configs = []
    for i, item in enumerate(doc["scenarios"]):
        try:
            if isinstance(item, str):
                configs.append(load_config(path.parent / item))
            else:
                configs.append(config_from_mapping(item))
        except ValidationError as exc:
            raise ValidationError(str(exc), f"scenarios[{i}]") from exc
    return configs


def cmd_sweep(args) -> int:
    configs = [_apply_overrides(c, args.seed) for c in load_batch(Path(args.config))]
    out_dir = Path(args.out) if args.out else None

    def one(cfg):
        out = None
        if out_dir is not None:
            fmt = args.format or cfg.output.format
            out = str(out_dir / f"{cfg.name or cfg.kind}-{cfg.config_hash[:12]}.{fmt}")
        return execute(cfg, out, args.format)

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(one, configs))
    for _, path in results:
        print(path)
    return max((code for code, _ in results), default=0)


def audit_table(table: ResultTable) -> list[str]:
    """Problems found when re-deriving the hashes embedded in a table's provenance."""
    prov = table.provenance
    problems = []
    for key in ("config", "config_hash", "table_hash"):
        if key not in prov:
            problems.append(f"provenance lacks {key!r}")
    if problems:
        return problems
    digest = hashlib.sha256(canonical_json(prov["config"]).encode("utf-8")).hexdigest()
    if digest != prov["config_hash"]:
        problems.append(f"config hash mismatch: recorded {prov['config_hash']}, recomputed {digest}")
    if table.table_hash() != prov["table_hash"]:
        problems.append(f"table hash mismatch: recorded {prov['table_hash']}, recomputed {table.table_hash()}")
    return problems


def cmd_audit(args) -> int:
    table = read_table(Path(args.table))
    problems = audit_table(table)
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return 2
    print(f"ok {table.provenance['config_hash']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affinebody", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="scenario (run) or batch (sweep) YAML file")
        p.add_argument("--seed", type=int, default=None, help="override the configured seed")
        p.add_argument("--out", default=None, help=f"output file (run) or directory (sweep); default ${OUT_DIR_ENV}")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p_run = sub.add_parser("run", help="run one scenario")
    common(p_run)
    p_run.set_defaults(func=cmd_run)
    p_sweep = sub.add_parser("sweep", help="run a batch of scenarios concurrently")
    common(p_sweep)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)
    p_audit = sub.add_parser("audit", help="re-verify the hashes embedded in an exported table")
    p_audit.add_argument("table")
    p_audit.set_defaults(func=cmd_audit)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return int(args.func(args))
    except AffineBodyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
