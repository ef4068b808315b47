"""Command-line runner: parse a run configuration, execute suites, emit artifacts.

Usage:
    ssvortex <verify|resolvent|semigroup|spectrum|shoot|all>
             [--config FILE] [--alpha A] [--beta B] [--q Q] [--m M]
             [--kmax K] [--seed S] [--out DIR] [--workers N]

The config file is a flat list of `key = value` lines (# starts a comment).
Values are parsed as int, float, complex, or comma-separated lists thereof;
command-line flags override file values.  Exit codes: 0 all suites passed,
1 at least one check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .params import VortexParams
from .suites import SUITES, RunConfig, run

_SUBCOMMAND_SUITES = {
    "verify": ("identities",),
    "resolvent": ("resolvent",),
    "semigroup": ("semigroup",),
    "spectrum": ("spectrum",),
    "shoot": ("shooting",),
    "all": SUITES,
}

_PARAM_KEYS = {"alpha", "beta", "m", "q"}
_CONFIG_KEYS = _PARAM_KEYS | {"out"} | {
    f.name for f in fields(RunConfig) if f.name not in ("params",)
}


class ConfigError(ValueError):
    pass


def _parse_scalar(text: str):
    text = text.strip()
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            continue
    return text.strip("'\"")


def parse_config_file(path: str) -> dict:
    """Parse `key = value` lines into a config dict, with line-precise errors."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            val = val.strip()
            if val == "" or val.lower() == "none":
                out[key] = ()
            elif "," in val:
                out[key] = tuple(_parse_scalar(v) for v in val.split(",") if v.strip())
            else:
                out[key] = _parse_scalar(val)
    return out


def build_config(file_values: dict, overrides: dict, suites) -> RunConfig:
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    pkw = {}
    for key in _PARAM_KEYS:
        if key in merged:
            pkw[key] = merged.pop(key)
    if "m" in pkw:
        pkw["m"] = int(pkw["m"])
    params = VortexParams(**{"alpha": 0.5, "beta": 1.0, "m": 2, "q": 2.0, **pkw})
    if suites is not None:
        merged["suites"] = tuple(suites)
    elif "suites" in merged:
        s = merged["suites"]
        merged["suites"] = tuple(s) if isinstance(s, tuple) else (s,)
    if "lambdas" in merged:
        lams = merged["lambdas"]
        if not isinstance(lams, tuple):
            lams = (lams,)
        merged["lambdas"] = tuple(complex(z) for z in lams)
    if "out" in merged:
        merged["out_dir"] = str(merged.pop("out"))
    if "k_max" in merged:
        merged["k_max"] = int(merged["k_max"])
    return RunConfig(params=params, **merged)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ssvortex",
        description="Verification suites for the self-similar power-law vortex mode analysis.",
    )
    parser.add_argument("command", choices=sorted(_SUBCOMMAND_SUITES))
    parser.add_argument("--config", default=None, help="key = value configuration file")
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--q", type=float, default=None)
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--kmax", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory for reports")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        file_values = parse_config_file(args.config) if args.config else {}
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    overrides = {
        "alpha": args.alpha, "beta": args.beta, "q": args.q, "m": args.m,
        "k_max": args.kmax, "seed": args.seed, "out_dir": args.out,
        "workers": args.workers,
    }
    suites = None
    if args.command != "all":
        suites = _SUBCOMMAND_SUITES[args.command]
    elif "suites" not in file_values:
        suites = SUITES
    try:
        cfg = build_config(file_values, overrides, suites)
    except (ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
