"""Command-line runner for the verification suites.

    rarelab --suite waves
    rarelab --suite all --config run.cfg --out results --threads 3

Exit status: 0 all checks pass, 1 some check failed, 2 configuration error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import load_config
from .errors import ConfigError
from .suites import SUITES, emit_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rarelab", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="flat key = value run configuration (defaults if omitted)")
    ap.add_argument("--suite", default="all", choices=SUITES + ("all",))
    ap.add_argument("--out", help="output directory (overrides output_dir from the config)")
    ap.add_argument("--seed", type=int, default=0, help="corpus seed (u64)")
    ap.add_argument("--threads", type=int, default=1, help="suites run concurrently")
    ap.add_argument("--format", choices=("text", "csv"), default="text")
    ap.add_argument("--print-config", action="store_true",
                    help="print the effective configuration and exit")
    return ap


def _one(args):
    name, cfg, seed, out = args
    return run_suite(name, cfg, seed, out)


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    if not 0 <= a.seed < 2 ** 64:
        ap.error("--seed must be an unsigned 64-bit integer")
    if a.threads < 1:
        ap.error("--threads must be >= 1")
    try:
        cfg = load_config(a.config)
        cfg.wave()
    except ConfigError as exc:
        print(f"rarelab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if a.print_config:
        sys.stdout.write(cfg.echo())
        return EXIT_OK
    out = Path(a.out or cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"rarelab: output directory not writable: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    names = SUITES if a.suite == "all" else (a.suite,)
    jobs = [(n, cfg, a.seed, out) for n in names]
    if a.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(a.threads, len(jobs))) as ex:
            reports = list(ex.map(_one, jobs))
    else:
        reports = [_one(j) for j in jobs]
    ok = True
    for rep in reports:
        text = emit_report(rep, a.format)
        sys.stdout.write(text)
        for fmt, ext in (("text", "txt"), ("csv", "csv")):
            (out / rep.suite / f"report.{ext}").write_text(emit_report(rep, fmt))
        ok &= rep.passed
    return EXIT_OK if ok else EXIT_FAIL


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
