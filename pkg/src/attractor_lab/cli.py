"""Command line entry point: run, analyze, sweep, presets, validate."""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

from .runner import (PRESETS, ConfigError, ExperimentConfig, analyze_artifact, apply_overrides,
                     preset_config, run_experiment, sweep, validate_config)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3


def _load(args) -> tuple[dict, Path | None]:
    if args.preset:
        d = preset_config(args.preset, args.seed)
        base = None
    else:
        path = Path(args.config)
        try:
            d = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError([("", f"config file not found: {path}")]) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError([("", f"invalid JSON in {path}: {exc}")]) from exc
        if args.seed is not None:
            d["seed"] = args.seed
        base = path.parent
    return apply_overrides(d, args.set), base


def _add_source(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", help="experiment config (JSON)")
    g.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry, dotted path; value parsed as JSON if possible")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="attractor-lab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one experiment and write an artifact directory")
    _add_source(p)
    p.add_argument("--out", default=None, help="artifact directory (default runs/<name>)")

    p = sub.add_parser("validate", help="check a config without running it")
    _add_source(p)

    p = sub.add_parser("analyze", help="re-run an analysis on a stored artifact")
    p.add_argument("--artifact", required=True)
    p.add_argument("--analysis", required=True, help="analysis kind, or a JSON object")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("sweep", help="run many configs, write summary.csv")
    p.add_argument("--config-glob", required=True)
    p.add_argument("-j", "--jobs", type=int, default=1)
    p.add_argument("--out", default="sweep")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")

    sub.add_parser("presets", help="list built-in presets")
    return ap


def _analysis_spec(text: str) -> dict:
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    return {"kind": text}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name, (_, desc) in PRESETS.items():
                print(f"{name:20s} {desc}")
            return EXIT_OK

        if args.command == "validate":
            d, base = _load(args)
            errors = validate_config(d, base)
            if errors:
                raise ConfigError(errors)
            print("ok")
            return EXIT_OK

        if args.command == "run":
            d, base = _load(args)
            cfg = ExperimentConfig.from_dict(d, base)
            out = Path(args.out or Path("runs") / cfg.name)
            path = run_experiment(cfg, out)
            print(path)
            return EXIT_OK

        if args.command == "analyze":
            art = Path(args.artifact)
            if not (art / "run").is_dir():
                raise ConfigError([("/artifact", f"not an artifact directory: {art}")])
            rep = analyze_artifact(art, _analysis_spec(args.analysis))
            text = json.dumps(rep, indent=2, sort_keys=True, default=float)
            if args.out:
                Path(args.out).write_text(text)
            else:
                print(text)
            return EXIT_OK

        if args.command == "sweep":
            paths = sorted(glob.glob(args.config_glob))
            cfgs = []
            for p in paths:
                d = apply_overrides(json.loads(Path(p).read_text()), args.set)
                cfgs.append(ExperimentConfig.from_dict(d, Path(p).parent))
            rows = sweep(cfgs, args.out, args.jobs)
            failed = [r for r in rows if r["status"] != "ok"]
            print(f"{len(rows)} runs, {len(failed)} failed; summary in {Path(args.out) / 'summary.csv'}")
            return EXIT_RUNTIME if failed else EXIT_OK
    except ConfigError as exc:
        for ptr, msg in exc.errors:
            print(f"validation error at {ptr or '/'}: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # runtime failures
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
