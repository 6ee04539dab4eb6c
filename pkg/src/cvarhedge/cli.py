"""Command line front end.

    cvarhedge price    --config scenario.yaml
    cvarhedge optimize --config scenario.yaml --format csv
    cvarhedge dynamic  --config scenario.yaml --format json --out dyn.json
    cvarhedge verify   --config scenario.yaml --paths 1000000 --seed 7

The config is a flat YAML (or JSON) mapping; a JSON report written by this
tool can be fed back in as ``--config`` since it carries the inputs under
``params``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import yaml

from . import __version__
from ._accel import BACKEND
from .dynamic import DynamicProblem, MinimizationError, minimize_dynamic_cvar
from .errors import DomainError
from .mc_oracle import (
    GATE_SIGMAS,
    MIN_TAIL_SAMPLES,
    SimConfig,
    empirical_cvar,
    empirical_portfolio_gain,
    simulate_terminal,
    within_gate,
    z_score,
)
from .optimizer import sweep_frontier
from .pricing import MarketParams
from .riskform import quote_chain

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3


class ConfigError(DomainError):
    pass


@dataclass
class ScenarioConfig:
    s0: float
    mu: float
    sigma: float
    r: float
    t: float
    alpha: float
    strikes: list[float]
    v0: float
    c_grid: list[float] = field(default_factory=list)
    mc: SimConfig | None = None

    @property
    def market(self) -> MarketParams:
        return MarketParams(self.s0, self.mu, self.sigma, self.r, self.t, self.alpha)

    @classmethod
    def from_mapping(cls, doc: Any) -> "ScenarioConfig":
        if isinstance(doc, dict) and isinstance(doc.get("params"), dict):
            doc = doc["params"]
        if not isinstance(doc, dict):
            raise ConfigError("config must be a mapping of field names to values")
        unknown = set(doc) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")

        def number(name, required=True, default=None):
            if name not in doc:
                if required:
                    raise ConfigError(f"config field '{name}': missing")
                return default
            try:
                value = float(doc[name])
            except (TypeError, ValueError):
                raise ConfigError(f"config field '{name}': not a number ({doc[name]!r})") from None
            if not math.isfinite(value):
                raise ConfigError(f"config field '{name}': must be finite")
            return value

        def numbers(name):
            raw = doc.get(name, [])
            if not isinstance(raw, list):
                raise ConfigError(f"config field '{name}': expected a list")
            try:
                return [float(v) for v in raw]
            except (TypeError, ValueError):
                raise ConfigError(f"config field '{name}': entries must be numbers") from None

        cfg = cls(
            s0=number("s0"),
            mu=number("mu"),
            sigma=number("sigma"),
            r=number("r"),
            t=number("t"),
            alpha=number("alpha"),
            strikes=numbers("strikes"),
            v0=number("v0", required=False, default=0.0),
            c_grid=numbers("c_grid"),
        )
        try:
            cfg.market
        except DomainError as exc:
            raise ConfigError(f"market parameters: {exc}") from None
        if any(b <= a for a, b in zip(cfg.strikes, cfg.strikes[1:])):
            raise ConfigError("config field 'strikes': must be strictly increasing")
        if any(k <= 0 for k in cfg.strikes):
            raise ConfigError("config field 'strikes': must be positive")
        if any(b < a for a, b in zip(cfg.c_grid, cfg.c_grid[1:])):
            raise ConfigError("config field 'c_grid': must be sorted ascending")
        mc = doc.get("mc")
        if mc is not None:
            if not isinstance(mc, dict):
                raise ConfigError("config field 'mc': expected a mapping")
            extra = set(mc) - {"n_paths", "seed", "chunk"}
            if extra:
                raise ConfigError(f"config field 'mc': unknown keys {', '.join(sorted(extra))}")
            try:
                cfg.mc = SimConfig(**{k: _integer(v) for k, v in mc.items()})
            except (TypeError, ValueError, DomainError) as exc:
                raise ConfigError(f"config field 'mc': {exc}") from None
        return cfg

    def to_mapping(self) -> dict:
        doc = {
            "s0": self.s0,
            "mu": self.mu,
            "sigma": self.sigma,
            "r": self.r,
            "t": self.t,
            "alpha": self.alpha,
            "strikes": list(self.strikes),
            "v0": self.v0,
            "c_grid": list(self.c_grid),
        }
        if self.mc is not None:
            doc["mc"] = {"n_paths": self.mc.n_paths, "seed": self.mc.seed, "chunk": self.mc.chunk}
        return doc


def _integer(value) -> int:
    # YAML reads 1e6 as a string
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            value = float(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {value}")
    return int(value)


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return ScenarioConfig.from_mapping(doc)


@dataclass
class Column:
    key: str
    title: str
    decimals: int | None = 2


@dataclass
class Report:
    columns: list[Column]
    rows: list[dict]
    notes: list[str] = field(default_factory=list)
    seed: int | None = None


# --- commands -----------------------------------------------------------------


def cmd_price(cfg: ScenarioConfig) -> Report:
    if not cfg.strikes:
        raise ConfigError("config field 'strikes': empty")
    quotes = quote_chain(cfg.market, cfg.strikes)
    rows = [
        {"K": q.strike, "P0": q.price0, "P_alpha": q.p_alpha, "E_PT": q.expected_payoff}
        for q in quotes
    ]
    columns = [
        Column("K", "K"),
        Column("P0", "P(0)", 3),
        Column("P_alpha", "P^a", 3),
        Column("E_PT", "E(P(T))", 3),
    ]
    return Report(columns, rows)


def _z_columns(n: int) -> list[Column]:
    return [Column(f"z{i + 1}", f"z{i + 1}") for i in range(n)]


def cmd_optimize(cfg: ScenarioConfig) -> Report:
    if not cfg.strikes:
        raise ConfigError("config field 'strikes': empty")
    if not cfg.c_grid:
        raise ConfigError("config field 'c_grid': empty")
    n = len(cfg.strikes)
    rows = []
    for fr in sweep_frontier(cfg.market, cfg.strikes, cfg.v0, cfg.c_grid):
        row = {"c": fr.c, "x": fr.x}
        if fr.solution is None:
            row.update({f"z{i + 1}": None for i in range(n)})
            row.update({"cvar": None, "expected_gain": None, "status": "INFEASIBLE"})
        else:
            row.update({f"z{i + 1}": v for i, v in enumerate(fr.solution.z)})
            row.update(
                {
                    "cvar": fr.solution.cvar,
                    "expected_gain": fr.solution.expected_gain,
                    "status": "OK",
                }
            )
        rows.append(row)
    columns = (
        [Column("c", "c"), Column("x", "x")]
        + _z_columns(n)
        + [Column("cvar", "CVaR"), Column("expected_gain", "E"), Column("status", "status", None)]
    )
    return Report(columns, rows)


def cmd_dynamic(cfg: ScenarioConfig) -> Report:
    if not cfg.c_grid:
        raise ConfigError("config field 'c_grid': empty")
    static = {}
    if cfg.strikes:
        static = {row["c"]: row["cvar"] for row in cmd_optimize(cfg).rows}
    rows, notes = [], []
    for c in cfg.c_grid:
        if c <= 0:
            notes.append(f"c={c:g} skipped: dynamic hedging needs a positive budget")
            continue
        row = {"c": c, "x": (cfg.v0 - c) / cfg.s0}
        try:
            sol = minimize_dynamic_cvar(DynamicProblem(cfg.market, cfg.v0, c))
        except (DomainError, MinimizationError) as exc:
            row.update(K=None, b=None, K_star=None, cvar_dynamic=None,
                       cvar_static=static.get(c), gap=None, status=f"INFEASIBLE: {exc}")
            rows.append(row)
            continue
        s_cvar = static.get(c)
        row.update(
            K=sol.K_opt,
            b=sol.b_opt,
            K_star=sol.K_star,
            cvar_dynamic=sol.cvar,
            cvar_static=s_cvar,
            gap=None if s_cvar is None else s_cvar - sol.cvar,
            status="OK",
        )
        rows.append(row)
    columns = [
        Column("c", "c"),
        Column("x", "x"),
        Column("K", "K"),
        Column("b", "b(K)"),
        Column("cvar_dynamic", "CVaR dyn"),
        Column("cvar_static", "CVaR static"),
        Column("gap", "gap"),
        Column("status", "status", None),
    ]
    return Report(columns, rows, notes)


def cmd_verify(cfg: ScenarioConfig) -> Report:
    if cfg.mc is None:
        raise ConfigError("config field 'mc': required for verify (or pass --paths)")
    m = cfg.market
    if m.alpha * cfg.mc.n_paths < MIN_TAIL_SAMPLES:
        raise DomainError(
            f"alpha * n_paths = {m.alpha * cfg.mc.n_paths:g} tail samples; "
            f"need at least {MIN_TAIL_SAMPLES}"
        )
    samples = simulate_terminal(m, cfg.mc)
    frontier = sweep_frontier(m, cfg.strikes, cfg.v0, cfg.c_grid)
    rows = []
    for fr in frontier:
        row = {"c": fr.c, "x": fr.x}
        if fr.solution is None:
            row.update(cvar=None, cvar_mc=None, std_err=None, z=None, status="INFEASIBLE")
            rows.append(row)
            continue
        pf = fr.solution.portfolio(cfg.strikes)
        try:
            est = empirical_cvar(empirical_portfolio_gain(m, pf, samples), m.alpha)
        except DomainError as exc:
            row.update(cvar=fr.solution.cvar, cvar_mc=None, std_err=None, z=None,
                       status=f"ERROR: {exc}")
        else:
            ok = within_gate(fr.solution.cvar, est.cvar_hat, est.std_err)
            row.update(
                cvar=fr.solution.cvar,
                cvar_mc=est.cvar_hat,
                std_err=est.std_err,
                z=z_score(fr.solution.cvar, est.cvar_hat, est.std_err),
                status="PASS" if ok else "FAIL",
            )
        rows.append(row)
    checked = [r for r in rows if r["status"] != "INFEASIBLE"]
    overall = "PASS" if checked and all(r["status"] == "PASS" for r in checked) else "FAIL"
    notes = [
        f"{cfg.mc.n_paths} paths, seed {cfg.mc.seed}, gate |z| <= {GATE_SIGMAS:g}: {overall}"
    ]
    columns = [
        Column("c", "c"),
        Column("x", "x"),
        Column("cvar", "CVaR closed"),
        Column("cvar_mc", "CVaR MC"),
        Column("std_err", "SE", 4),
        Column("z", "z", 2),
        Column("status", "status", None),
    ]
    return Report(columns, rows, notes, seed=cfg.mc.seed)


COMMANDS = {
    "price": cmd_price,
    "optimize": cmd_optimize,
    "dynamic": cmd_dynamic,
    "verify": cmd_verify,
}


# --- emitters -----------------------------------------------------------------


def _fmt(value, decimals):
    if value is None:
        return "-"
    if decimals is None or isinstance(value, str):
        return str(value)
    return f"{value:.{decimals}f}"


def render_table(report: Report) -> str:
    cells = [[c.title for c in report.columns]]
    for row in report.rows:
        cells.append([_fmt(row.get(c.key), c.decimals) for c in report.columns])
    widths = [max(len(r[i]) for r in cells) for i in range(len(report.columns))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    lines.extend(report.notes)
    return "\n".join(lines) + "\n"


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([c.key for c in report.columns])
    for row in report.rows:
        writer.writerow([_csv_cell(row.get(c.key)) for c in report.columns])
    return buf.getvalue()


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def render_json(report: Report, cfg: ScenarioConfig, command: str) -> str:
    doc = {
        "params": cfg.to_mapping(),
        "rows": report.rows,
        "meta": {
            "version": __version__,
            "command": command,
            "seed": report.seed,
            "backend": BACKEND,
            "notes": report.notes,
        },
    }
    return json.dumps(doc, indent=2) + "\n"


# --- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvarhedge",
        description="CVaR of stock hedged with puts: pricing, optimal allocation, "
        "dynamic benchmark and Monte Carlo verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("price", "put prices, CVaR coefficients and expected payoffs per strike"),
        ("optimize", "CVaR-optimal put allocation for each budget in c_grid"),
        ("dynamic", "dynamic-hedging CVaR next to the static optimum"),
        ("verify", "Monte Carlo check of the closed-form CVaR on the frontier"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML or JSON scenario file")
        p.add_argument("--format", choices=["table", "csv", "json"], default="table")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--seed", type=int, help="override mc.seed (unsigned 64-bit)")
        p.add_argument("--paths", type=int, help="override mc.n_paths")
    return parser


def _apply_overrides(cfg: ScenarioConfig, args) -> None:
    if args.seed is None and args.paths is None:
        return
    base = cfg.mc or SimConfig()
    try:
        cfg.mc = SimConfig(
            n_paths=base.n_paths if args.paths is None else args.paths,
            seed=base.seed if args.seed is None else args.seed,
            chunk=base.chunk,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        _apply_overrides(cfg, args)
        report = COMMANDS[args.command](cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.format == "json":
        text = render_json(report, cfg, args.command)
    elif args.format == "csv":
        text = render_csv(report)
    else:
        text = render_table(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    statuses = [str(r.get("status", "OK")) for r in report.rows]
    if statuses and all(s.startswith("INFEASIBLE") for s in statuses):
        return EXIT_INFEASIBLE
    if args.command == "verify" and any(s not in ("PASS", "INFEASIBLE") for s in statuses):
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
