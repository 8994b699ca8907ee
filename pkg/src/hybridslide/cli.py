"""Command-line front end: run a built-in model and write trace, events and plot.

Example::

    hybridslide --model stickslip2 --set k=0.88 --t-end 120 \\
        --trace cs1.csv --events cs1.json --plot cs1.svg --plot-vars v_m,v_M1,v_M2
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import InvalidArgument
from .integrator import SimConfig, SimulationFailed, simulate
from .models import MODELS, param_names, params_with
from .svgplot import trace_svg

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
DEFAULT_T_END = {"stickslip2": 120.0, "belt3": 100.0}
SIM_KEYS = tuple(f.name for f in fields(SimConfig))
RUN_KEYS = ("model", "trace", "events", "plot", "plot_vars", "seed")


class UsageError(Exception):
    """Malformed command line or configuration."""


@dataclass
class RunSpec:
    model: str
    params: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    trace: Optional[str] = None
    events: Optional[str] = None
    plot: Optional[str] = None
    plot_vars: tuple = ()
    seed: Optional[int] = None

    def config(self) -> SimConfig:
        kw = {"t_end": DEFAULT_T_END[self.model]}
        kw.update(self.sim)
        return SimConfig(**kw)

    def to_config_text(self) -> str:
        """Flat ``key = value`` text that :func:`parse_config_text` reads back."""
        lines = [f"model = {self.model}"]
        for k in ("trace", "events", "plot", "seed"):
            if getattr(self, k) is not None:
                lines.append(f"{k} = {getattr(self, k)}")
        if self.plot_vars:
            lines.append(f"plot_vars = {','.join(self.plot_vars)}")
        for k, v in self.sim.items():
            lines.append(f"{k} = {_fmt(v)}")
        for k, v in self.params.items():
            lines.append(f"{k} = {_fmt(v)}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return ",".join(repr(float(a)) for a in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _real(key, text) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{key}: expected a decimal number, got {text!r}") from None


def _convert_sim(key, text):
    kind = {f.name: f.type for f in fields(SimConfig)}[key]
    if kind in ("bool", bool):
        low = text.strip().lower()
        if low not in ("true", "false", "1", "0"):
            raise UsageError(f"{key}: expected true or false, got {text!r}")
        return low in ("true", "1")
    if kind in ("int", int):
        v = _real(key, text)
        if v != int(v):
            raise UsageError(f"{key}: expected an integer, got {text!r}")
        return int(v)
    return _real(key, text)


def _convert_param(key, text):
    if key == "x0":
        return tuple(_real(key, p) for p in text.split(","))
    return _real(key, text)


def parse_config_text(text: str) -> dict:
    """Raw ``key -> value string`` map of a config file (``#`` starts a comment)."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {n}: expected 'key = value', got {raw.strip()!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k:
            raise UsageError(f"config line {n}: missing key")
        out[k] = v
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hybridslide", description="Simulate a built-in stick-slip model with sliding modes.")
    p.add_argument("--model", help=f"model id, one of: {', '.join(MODELS)}")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VAL", help="model parameter override")
    p.add_argument("--config", metavar="PATH", help="flat 'key = value' config file")
    p.add_argument("--t-end", dest="t_end", help="final time [s]")
    p.add_argument("--dt-max", dest="dt_max", help="largest step [s]")
    p.add_argument("--atol", help="absolute error tolerance")
    p.add_argument("--rtol", help="relative error tolerance")
    p.add_argument("--trace", metavar="PATH", help="CSV trace output")
    p.add_argument("--events", metavar="PATH", help="JSON event output")
    p.add_argument("--plot", metavar="PATH", help="SVG plot output")
    p.add_argument("--plot-vars", dest="plot_vars", metavar="a,b,c", help="state names to plot")
    p.add_argument("--seed", help="reserved, unused")
    return p


def parse_run_spec(argv) -> RunSpec:
    """Merge defaults, an optional config file and the command line."""
    args = build_parser().parse_args(list(argv))
    raw = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        raw.update(parse_config_text(text))
    for k in ("model", "t_end", "dt_max", "atol", "rtol", "trace", "events", "plot", "plot_vars", "seed"):
        v = getattr(args, k)
        if v is not None:
            raw[k] = v
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VAL, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k in RUN_KEYS or k in SIM_KEYS:
            raise UsageError(f"--set is for model parameters; {k!r} is not one")
        raw[k] = v

    model = raw.pop("model", None)
    if model is None:
        raise UsageError(f"no model given; available models: {', '.join(MODELS)}")
    if model not in MODELS:
        raise UsageError(f"unknown model {model!r}; available models: {', '.join(MODELS)}")
    spec = RunSpec(model)
    known = set(param_names(model))
    for k, v in raw.items():
        if k in ("trace", "events", "plot"):
            setattr(spec, k, v)
        elif k == "plot_vars":
            spec.plot_vars = tuple(s.strip() for s in v.split(",") if s.strip())
        elif k == "seed":
            spec.seed = int(_real(k, v))
        elif k in SIM_KEYS:
            spec.sim[k] = _convert_sim(k, v)
        elif k in known:
            spec.params[k] = _convert_param(k, v)
        else:
            raise UsageError(f"unknown parameter {k!r} for model {model}")
    return spec


def _check_writable(path):
    try:
        with open(path, "a"):
            pass
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def run(spec: RunSpec, out=None) -> int:
    """Build the model, simulate and write the requested artifacts."""
    out = out or sys.stderr
    try:
        params = params_with(spec.model, spec.params)
        model = MODELS[spec.model][1](params)
        cfg = spec.config()
    except (InvalidArgument, TypeError) as exc:
        print(f"error: {exc}", file=out)
        return EXIT_USAGE
    plot_vars = spec.plot_vars or tuple(n for k, n in enumerate(model.state_names) if k != model.clock_index)
    missing = [v for v in plot_vars if v not in model.state_names]
    if missing:
        print(f"error: unknown state name(s) for --plot-vars: {', '.join(missing)}", file=out)
        return EXIT_USAGE
    try:
        for p in (spec.trace, spec.events, spec.plot):
            if p:
                _check_writable(p)
    except OSError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_USAGE

    status = EXIT_OK
    try:
        trace = simulate(model, params.initial_state(), cfg)
    except SimulationFailed as exc:
        trace = exc.trace
        print(f"numeric failure: {exc}", file=out)
        status = EXIT_NUMERIC
    try:
        if spec.trace:
            with open(spec.trace, "w", newline="") as fh:
                trace.to_csv(fh)
        if spec.events:
            Path(spec.events).write_text(trace.events_json() + "\n")
        if spec.plot:
            series = {v: trace.column(v) for v in plot_vars}
            events = [(e.t, f"{e.kind} {e.from_} -> {e.to}") for e in trace.events]
            Path(spec.plot).write_text(trace_svg(trace.t, series, events, title=f"{spec.model}"))
    except OSError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_USAGE
    logger.info("%s: %d steps, %d events", spec.model, trace.n_steps, len(trace.events))
    return status


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_run_spec(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(build_parser().format_usage(), end="", file=sys.stderr)
        return EXIT_USAGE
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
