"""Scenario runner: JSON config in, JSON report (and optional CSV sweep table) out.

Exit codes: 0 when every check is satisfied, 1 when a violation is found
(expected for mixed-source demos), 2 for invalid input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from . import core, hv, montecarlo, quantum
from .core import Kind, LeggettError, SettingPair

SCHEMA_VERSION = 1
SCENARIOS = ("check", "trace", "quantum", "sweep", "mixed", "mc")
SWEEP_PARAMS = ("a", "b", "ab")
TABLE_HEADER = ("param_rad", "mean_a", "mean_b", "corr", "upper_slack", "lower_slack")

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2


class ConfigError(LeggettError):
    pass


def _angle(value, where: str) -> float:
    # strings such as "deg:45" are rejected on purpose: radians only
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number in radians, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where} is not finite")
    return float(value)


def _probability(value, where: str):
    if isinstance(value, bool):
        raise ConfigError(f"{where} must be a number or a rational string")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}: cannot parse {value!r} as a rational") from exc
    raise ConfigError(f"{where} must be a number or a rational string, got {value!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    distribution: Optional[tuple] = None
    state: Optional[object] = None  # name, ("product", t1, t2) or 4 complex amplitudes
    kind: Kind = Kind.PHOTON
    settings: Optional[SettingPair] = None
    sweep: Optional[dict] = None
    marginal_model: Optional[tuple] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    z: float = montecarlo.DEFAULT_Z
    output: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict, scenario: Optional[str] = None) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if data.get("schema") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported or missing schema version {data.get('schema')!r}")
        known = {"schema", "scenario", "distribution", "state", "kind", "settings", "sweep",
                 "marginal_model", "samples", "seed", "z", "output"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        name = data.get("scenario", scenario)
        if scenario is not None and name != scenario:
            raise ConfigError(f"config scenario {name!r} does not match subcommand {scenario!r}")
        if name not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {name!r}")

        distribution = None
        if data.get("distribution") is not None:
            dist = data["distribution"]
            if not isinstance(dist, list) or len(dist) != 4:
                raise ConfigError("distribution must be a list of 4 probabilities")
            distribution = tuple(_probability(v, f"distribution[{i}]") for i, v in enumerate(dist))

        state = None
        if data.get("state") is not None:
            state = _parse_state(data["state"])

        try:
            kind = Kind(data.get("kind", "photon"))
        except ValueError as exc:
            raise ConfigError(f"kind must be 'photon' or 'spin', got {data.get('kind')!r}") from exc

        settings = None
        if data.get("settings") is not None:
            s = data["settings"]
            if not isinstance(s, dict) or set(s) != {"a", "b"}:
                raise ConfigError("settings must be an object with keys 'a' and 'b'")
            settings = SettingPair(_angle(s["a"], "settings.a"), _angle(s["b"], "settings.b"))

        sweep = None
        if data.get("sweep") is not None:
            sweep = _parse_sweep(data["sweep"])

        marginal_model = None
        if data.get("marginal_model") is not None:
            m = data["marginal_model"]
            if not isinstance(m, dict) or set(m) != {"u", "v"}:
                raise ConfigError("marginal_model must be an object with keys 'u' and 'v'")
            marginal_model = (_angle(m["u"], "marginal_model.u"), _angle(m["v"], "marginal_model.v"))

        samples = data.get("samples")
        if samples is not None and (isinstance(samples, bool) or not isinstance(samples, int) or samples < 1):
            raise ConfigError(f"samples must be a positive integer, got {samples!r}")
        seed = data.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        z = data.get("z", montecarlo.DEFAULT_Z)
        if isinstance(z, bool) or not isinstance(z, (int, float)) or not z > 0:
            raise ConfigError(f"z must be a positive number, got {z!r}")

        output = data.get("output", {})
        if not isinstance(output, dict) or set(output) - {"report", "table"}:
            raise ConfigError("output must be an object with optional keys 'report' and 'table'")

        cfg = cls(name, distribution, state, kind, settings, sweep, marginal_model,
                  samples, seed, float(z), dict(output))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        need = {
            "check": ("distribution",),
            "trace": ("distribution",),
            "quantum": ("state", "settings"),
            "sweep": ("state", "settings", "sweep"),
            "mixed": ("state", "settings", "marginal_model"),
            "mc": ("distribution", "samples"),
        }[self.scenario]
        missing = [k for k in need if getattr(self, k) is None]
        if missing:
            raise ConfigError(f"scenario {self.scenario!r} requires {', '.join(missing)}")

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_VERSION, "scenario": self.scenario, "kind": self.kind.value,
               "z": self.z, "output": dict(self.output)}
        if self.distribution is not None:
            out["distribution"] = [str(p) if isinstance(p, Fraction) else p for p in self.distribution]
        if self.state is not None:
            if isinstance(self.state, str):
                out["state"] = self.state
            elif self.state[0] == "product":
                out["state"] = {"product": [self.state[1], self.state[2]]}
            else:
                out["state"] = [[z.real, z.imag] for z in self.state]
        if self.settings is not None:
            out["settings"] = {"a": self.settings.a, "b": self.settings.b}
        if self.sweep is not None:
            out["sweep"] = dict(self.sweep)
        if self.marginal_model is not None:
            out["marginal_model"] = {"u": self.marginal_model[0], "v": self.marginal_model[1]}
        if self.samples is not None:
            out["samples"] = self.samples
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _parse_state(raw):
    if isinstance(raw, str):
        if raw not in ("singlet", "phi_plus"):
            raise ConfigError(f"unknown named state {raw!r}")
        return raw
    if isinstance(raw, dict) and set(raw) == {"product"}:
        t = raw["product"]
        if not isinstance(t, list) or len(t) != 2:
            raise ConfigError("product state needs two angles")
        return ("product", _angle(t[0], "state.product[0]"), _angle(t[1], "state.product[1]"))
    if isinstance(raw, list) and len(raw) == 4:
        amps = []
        for i, pair in enumerate(raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"state[{i}] must be a [re, im] pair")
            re, im = (_angle(x, f"state[{i}]") for x in pair)
            amps.append(complex(re, im))
        return tuple(amps)
    raise ConfigError("state must be a name, {'product': [t1, t2]} or 4 [re, im] pairs")


def _parse_sweep(raw) -> dict:
    if not isinstance(raw, dict) or set(raw) != {"param", "from", "to", "steps"}:
        raise ConfigError("sweep must have keys param, from, to, steps")
    if raw["param"] not in SWEEP_PARAMS:
        raise ConfigError(f"sweep.param must be one of {SWEEP_PARAMS}, got {raw['param']!r}")
    lo, hi = _angle(raw["from"], "sweep.from"), _angle(raw["to"], "sweep.to")
    steps = raw["steps"]
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise ConfigError(f"sweep.steps must be an integer >= 2, got {steps!r}")
    if not lo < hi:
        raise ConfigError("sweep.from must be less than sweep.to")
    return {"param": raw["param"], "from": lo, "to": hi, "steps": steps}


# --------------------------------------------------------------------------
# Report assembly
# --------------------------------------------------------------------------

def _num(x):
    return float(x)


def _report_fields(report: core.InequalityReport) -> dict:
    s = report.summary
    out = {
        "provenance": s.provenance,
        "mode": "exact" if s.exact else "float",
        "summary": {"mean_a": _num(s.mean_a), "mean_b": _num(s.mean_b), "corr": _num(s.corr)},
        "bounds": {"upper": _num(report.upper_bound), "lower": _num(report.lower_bound)},
        "slacks": {"upper": _num(report.upper_slack), "lower": _num(report.lower_slack)},
        "witnesses": None,
        "verdict": "satisfied" if report.satisfied else "violated",
    }
    if report.witness_upper is not None:
        out["witnesses"] = {"upper": str(report.witness_upper), "lower": str(report.witness_lower)}
    if s.exact:
        out["exact"] = {
            "mean_a": str(s.mean_a), "mean_b": str(s.mean_b), "corr": str(s.corr),
            "upper_slack": str(report.upper_slack), "lower_slack": str(report.lower_slack),
        }
    return out


def _distribution(cfg: ScenarioConfig) -> core.JointDistribution:
    return core.validate_distribution(cfg.distribution, settings=cfg.settings)


def _state(cfg: ScenarioConfig) -> quantum.TwoQubitState:
    return quantum.state_from_spec(cfg.state, cfg.kind)


def _point(cfg: ScenarioConfig, pair: SettingPair):
    """Evaluate the quantum or mixed check at one setting pair; returns (report, extra)."""
    state = _state(cfg)
    if cfg.marginal_model is not None:
        model = hv.MalusProductModel(*cfg.marginal_model, kind=cfg.kind)
        mixed = hv.mixed_triple((model, pair), (state, pair))
        return core.check_summary(mixed.summary), {
            "sources": {"marginals": mixed.marginal_source, "correlation": mixed.correlation_source}
        }
    p = quantum.born_joint(state, pair)
    return core.check_distribution(p), {"distribution": [float(x) for x in p.probabilities()]}


def run_config(cfg: ScenarioConfig) -> tuple[int, dict, Optional[list]]:
    """Run a validated config; returns (exit code, report dict, table rows or None)."""
    body = {"schema": SCHEMA_VERSION, "scenario": cfg.scenario, "config": cfg.to_dict()}
    table = None

    if cfg.scenario in ("check", "trace"):
        p = _distribution(cfg)
        report = core.check_distribution(p)
        body.update(_report_fields(report))
        body["distribution"] = [str(x) if p.exact else float(x) for x in p.probabilities()]
        if cfg.scenario == "trace":
            trace = core.derivation_trace(p)
            body["trace"] = [
                {"label": st.label, "lhs": _num(st.lhs), "rhs": _num(st.rhs), "slack": _num(st.slack),
                 "slack_witness": st.slack_witness,
                 "middle": None if st.middle is None else _num(st.middle)}
                for st in trace.steps
            ]
            body["identities"] = [
                {"name": i.name, "lhs": _num(i.lhs), "rhs": _num(i.rhs), "residual": _num(i.residual)}
                for i in trace.identities
            ]
        ok = report.satisfied

    elif cfg.scenario in ("quantum", "mixed"):
        report, extra = _point(cfg, cfg.settings)
        body.update(_report_fields(report))
        body.update(extra)
        ok = report.satisfied

    elif cfg.scenario == "mc":
        p = _distribution(cfg)
        seed = cfg.seed if cfg.seed is not None else 0
        counts = montecarlo.sample_counts(p, cfg.samples, seed)
        est = montecarlo.estimate(counts)
        emp = montecarlo.empirical_check(counts, cfg.z)
        body.update(_report_fields(emp.report))
        body["verdict"] = emp.verdict.value
        body["counts"] = dict(zip(("pp", "pm", "mp", "mm"), counts.counts()))
        body["seed"] = counts.seed
        body["standard_errors"] = {"mean_a": est.se_a, "mean_b": est.se_b, "corr": est.se_corr}
        body["tolerance"] = emp.tolerance
        ok = emp.verdict is montecarlo.Verdict.SATISFIED

    else:
        ok, table = _run_sweep(cfg, body)

    body["exit_code"] = EXIT_OK if ok else EXIT_VIOLATION
    return body["exit_code"], body, table


def _run_sweep(cfg: ScenarioConfig, body: dict) -> tuple[bool, list]:
    sw = cfg.sweep
    values = np.linspace(sw["from"], sw["to"], sw["steps"])
    rows, points = [], []
    worst = None
    for x in values.tolist():
        a = x if sw["param"] in ("a", "ab") else cfg.settings.a
        b = x if sw["param"] in ("b", "ab") else cfg.settings.b
        report, _ = _point(cfg, SettingPair(a, b))
        s = report.summary
        row = (x, _num(s.mean_a), _num(s.mean_b), _num(s.corr),
               _num(report.upper_slack), _num(report.lower_slack))
        rows.append(row)
        points.append(dict(zip(TABLE_HEADER, row)) | {"satisfied": report.satisfied})
        if worst is None or report.min_slack < worst.min_slack:
            worst = report
    body.update(_report_fields(worst))
    body["sweep"] = {
        "param": sw["param"],
        "min_upper_slack": min(r[4] for r in rows),
        "min_lower_slack": min(r[5] for r in rows),
        "points": points,
    }
    ok = all(pt["satisfied"] for pt in points)
    body["verdict"] = "satisfied" if ok else "violated"
    return ok, rows


def format_table(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    for row in rows:
        writer.writerow(["%.17g" % v for v in row])
    return buf.getvalue()


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "scenario", "config", "provenance", "mode", "summary",
                 "bounds", "slacks", "witnesses", "verdict", "exit_code"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "scenario": {"enum": list(SCENARIOS)},
        "config": {"type": "object", "required": ["schema", "scenario"]},
        "provenance": {"enum": [core.SINGLE, core.MIXED]},
        "mode": {"enum": ["exact", "float"]},
        "summary": {
            "type": "object",
            "required": ["mean_a", "mean_b", "corr"],
            "additionalProperties": {"type": "number"},
        },
        "bounds": {
            "type": "object",
            "required": ["upper", "lower"],
            "additionalProperties": {"type": "number"},
        },
        "slacks": {
            "type": "object",
            "required": ["upper", "lower"],
            "additionalProperties": {"type": "number"},
        },
        "witnesses": {
            "oneOf": [
                {"type": "null"},
                {"type": "object", "required": ["upper", "lower"],
                 "additionalProperties": {"type": "string"}},
            ]
        },
        "verdict": {"enum": ["satisfied", "violated", "inconclusive"]},
        "exit_code": {"enum": [EXIT_OK, EXIT_VIOLATION]},
    },
}


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leggett", description="Basic Leggett inequality scenario runner")
    sub = ap.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
        p.add_argument("--output", help="report path (overrides output.report; '-' for stdout)")
        p.add_argument("--table", help="CSV table path for sweeps (overrides output.table)")
    return ap


def _fail(msg: str) -> int:
    print(f"leggett: error: {msg}", file=sys.stderr)
    return EXIT_INVALID


def main(argv: Optional[list] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK

    try:
        with open(args.config, encoding="utf-8") as f:
            data = json.load(f)
        cfg = ScenarioConfig.from_dict(data, scenario=args.scenario)
        output = dict(cfg.output)
        if args.output is not None:
            output["report"] = args.output
        if args.table is not None:
            output["table"] = args.table
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
            cfg = replace(cfg, seed=args.seed)
        cfg = replace(cfg, output=output)
        code, body, table = run_config(cfg)
    except (LeggettError, OSError, json.JSONDecodeError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}")

    try:
        text = json.dumps(body, indent=2) + "\n"
        dest = output.get("report", "-")
        if dest == "-":
            sys.stdout.write(text)
        else:
            with open(dest, "w", encoding="utf-8") as f:
                f.write(text)
        if table is not None and output.get("table"):
            with open(output["table"], "w", encoding="utf-8", newline="") as f:
                f.write(format_table(table))
    except OSError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    return code


if __name__ == "__main__":
    sys.exit(main())
