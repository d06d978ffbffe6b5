"""Command-line driver.

Exit status: 0 on success, 2 when the config fails validation, 1 when a
run fails. A failed run removes whatever it had already written.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, io
from .config import COMMANDS, ConfigError, load, load_and_validate
from .runs import run

OUT_ENV = "POLARITON_ENGINE_OUT"
DEFAULT_OUT = "polariton-out"

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polariton-engine",
        description="Polariton transmission, transient and fitting runs driven by a JSON config.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS + ("validate",))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config field by dotted path, e.g. qm.f_pu=0.05 (repeatable)",
    )
    parser.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    parser.add_argument("--seed", type=int, help="seed for synthetic noise (overrides the config)")
    parser.add_argument("--validate-only", action="store_true", help="check the config and exit")
    return parser


def _report(errors, stream) -> None:
    for path, message in errors:
        print(f"invalid: {path}: {message}", file=stream)


def _load(args):
    overrides = list(args.overrides)
    if args.command != "validate":
        raw_command = _config_command(args.config)
        if raw_command is not None and raw_command != args.command:
            raise ConfigError([("command", f"config is for '{raw_command}', not '{args.command}'")])
        overrides.append(("command", args.command))
    return load_and_validate(args.config, overrides, seed=args.seed)


def _config_command(path):
    return load(path).get("command")


def output_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def write_artifacts(artifacts, out: Path, config: dict, stdout) -> list[Path]:
    """Write every artifact plus its sidecar; on any failure remove what was written."""
    created_dir = not out.exists()
    written: list[Path] = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for art in artifacts:
            path = out / art.name
            io._write(path, art.text)
            written.append(path)
            if art.sidecar:
                side = io.sidecar_path(path)
                io._write(side, io.sidecar_text(config, art.name))
                written.append(side)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        if created_dir and out.exists() and not any(out.iterdir()):
            out.rmdir()
        raise
    for art in artifacts:
        print(f"{out / art.name}: {art.summary}", file=stdout)
    return written


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as exc:
        _report(exc.diagnostics, stderr)
        return EXIT_INVALID
    if args.command == "validate" or args.validate_only:
        print("OK", file=stdout)
        return EXIT_OK
    try:
        artifacts = run(cfg, Path(args.config).resolve().parent)
        write_artifacts(artifacts, output_dir(args), cfg, stdout)
    except Exception as exc:  # noqa: BLE001 - any run failure maps to exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
