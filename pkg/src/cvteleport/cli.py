"""Command-line entry point: ``cvteleport {fig2,check,sample}``.

Precedence for settings: command-line flags, then a ``key=value`` config file
given by ``--config``, then per-command defaults.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace

from .errors import DomainError
from .experiments import (
    SAMPLE_COLUMNS,
    RunConfig,
    fig2_sweep,
    run_checks,
    sample_rows,
    write_csv,
    write_report,
    write_sweep,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "fig2": RunConfig(beta_max=10.0, steps=201, output_path="fig2.csv"),
    "check": RunConfig(beta_max=2.0, output_path="check_report.txt"),
    "sample": RunConfig(count=1000, output_path="samples.csv"),
}

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


class ConfigError(ValueError):
    pass


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys are allowed."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "out":
            key = "output_path"
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CASTS[_FIELD_TYPES[key]](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvteleport", description="Continuous-variable teleportation of Fock states.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "fig2": "sweep output coherence of a teleported single photon over |beta| (CSV)",
        "check": "run the verification suites and write a pass/fail report",
        "sample": "draw measurement outcomes and write per-outcome coherence (CSV)",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--q", type=float)
        p.add_argument("--cutoff", type=int)
        p.add_argument("--beta-max", dest="beta_max", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tolerance", type=float)
        p.add_argument("--out", dest="output_path")
        p.add_argument("--config")
        p.add_argument("--workers", type=int)
        if name == "fig2":
            p.add_argument("--angles", type=int, help="emit a polar grid with this many angles per radius")
        if name == "sample":
            p.add_argument("--count", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = DEFAULTS[args.command]
    if args.config:
        config = replace(config, **read_config_file(args.config))
    flags = {k: v for k, v in vars(args).items() if k in _FIELD_TYPES and v is not None}
    return replace(config, **flags).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except (ConfigError, DomainError) as exc:
        print(f"cvteleport: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "fig2":
            records = fig2_sweep(config)
            write_sweep(config.output_path, records)
            flagged = sum(r.flagged for r in records)
            print(f"wrote {len(records)} rows to {config.output_path}; flagged {flagged}")
            return EXIT_FAIL if flagged else EXIT_OK
        if args.command == "check":
            results = run_checks(config)
            write_report(config.output_path, results)
            for r in results:
                print(r.line())
            failed = sum(not r.passed for r in results)
            print(f"{len(results) - failed}/{len(results)} suites passed; report in {config.output_path}")
            return EXIT_FAIL if failed else EXIT_OK
        batch, rows = sample_rows(config)
        write_csv(config.output_path, SAMPLE_COLUMNS, rows)
        print(f"wrote {len(rows)} samples to {config.output_path}; acceptance rate {batch.acceptance_rate:.4f}")
        return EXIT_OK
    except OSError as exc:
        print(f"cvteleport: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
