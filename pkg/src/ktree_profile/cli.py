"""Command-line entry point: ``ktree-profile <command> [options]``.

Defaults can be overridden through environment variables named
``KTREE_PROFILE_<OPTION>`` (for example ``KTREE_PROFILE_SEED=7``).
Exit codes: 0 success, 2 configuration error, 3 numeric nonconvergence,
4 resource guard.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import asymptotics as asym
from .errors import ConfigError, KTreeError, ResourceGuardError
from .exact import expected_profile_exact
from .ktree import DEFAULT_SEED, grow_random
from .limitlaw import limit_law_series, moment_from_coeff
from .profile import MAX_CELLS, monte_carlo

ENV_PREFIX = "KTREE_PROFILE_"
COMMANDS = ("generate", "stats", "exact", "asym", "alpha-plus", "limit", "compare", "plot")
DEFAULT_MAX_TRIALS = 10**6
DEFAULT_TOLERANCES = {"z": 3.0}
RATIONAL_BACKEND_LIMIT = 500


@dataclass
class ExperimentConfig:
    command: str
    k: list[int] = field(default_factory=lambda: [2])
    n: list[int] = field(default_factory=lambda: [100])
    d: list[int] = field(default_factory=list)
    j: list[int] = field(default_factory=list)
    w: list[float] = field(default_factory=list)
    trials: int = 1000
    seed: int = DEFAULT_SEED
    backend: str = "rational"
    rational_format: str = "fraction"
    export: str = "edges"
    order: int = 20
    lower: str = "coupled"
    d_max: int | None = None
    threads: int = 1
    output: str | None = None
    hist_output: str | None = None
    format: str = "csv"
    max_cells: int = MAX_CELLS
    max_trials: int = DEFAULT_MAX_TRIALS
    tolerances: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls.from_dict(json.loads(text))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if any(k < 1 for k in self.k):
            raise ConfigError("k must be >= 1")
        if any(n < 0 for n in self.n):
            raise ConfigError("n must be >= 0")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerances: {sorted(unknown)}")
        if self.trials > self.max_trials:
            raise ResourceGuardError(f"trials = {self.trials} exceeds max_trials = {self.max_trials}")


def _env_default(name: str, fallback, conv=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None


def _int_list(text: str) -> list[int]:
    """Parse ``"2,3"`` or a range ``"1-5"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(float(part)) if "e" in part.lower() else int(part))
    return out


def _tolerance(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep:
        raise ConfigError(f"tolerance must look like NAME=VALUE, got {text!r}")
    return key.strip(), float(val)


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ktree-profile", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, n=True, seed=False, trials=False):
        p.add_argument("--k", type=_int_list, default=_env_default("k", [2], _int_list))
        if n:
            p.add_argument("--n", type=_int_list, default=_env_default("n", [100], _int_list))
        if seed:
            p.add_argument("--seed", type=int, default=_env_default("seed", DEFAULT_SEED, int))
        if trials:
            p.add_argument("--trials", type=int, default=_env_default("trials", 1000, int))
            p.add_argument("--threads", type=int, default=_env_default("threads", 1, int))
            p.add_argument("--max-cells", type=int, default=_env_default("max_cells", MAX_CELLS, int))
            p.add_argument("--max-trials", type=int,
                           default=_env_default("max_trials", DEFAULT_MAX_TRIALS, int))
        p.add_argument("--output", "-o", default=None, help="write here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default=_env_default("format", "csv"))

    p = sub.add_parser("generate", help="grow one random tree and print it")
    common(p, seed=True)
    p.add_argument("--export", choices=("edges", "cliques"), default="edges")

    p = sub.add_parser("stats", help="Monte Carlo profile statistics")
    common(p, seed=True, trials=True)
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--hist-output", default=None, help="histogram CSV path")

    p = sub.add_parser("exact", help="exact expected profile")
    common(p)
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--backend", choices=("rational", "float"), default="rational")
    p.add_argument("--rational-format", choices=("fraction", "decimal"), default="fraction")

    p = sub.add_parser("asym", help="spectral data or asymptotic estimates")
    common(p)
    p.add_argument("--w", type=_float_list, default=[])
    p.add_argument("--d", type=_int_list, default=[])
    p.add_argument("--j", type=_int_list, default=[])

    p = sub.add_parser("alpha-plus", help="height constant")
    common(p, n=False)

    p = sub.add_parser("limit", help="limit-law series coefficients and moments")
    common(p, n=False)
    p.add_argument("--d", type=_int_list, default=[1])
    p.add_argument("--j", type=_int_list, default=[])
    p.add_argument("--order", type=int, default=20)
    p.add_argument("--lower", choices=("coupled", "decoupled"), default="coupled")

    p = sub.add_parser("compare", help="exact vs asymptotic vs Monte Carlo")
    common(p, seed=True, trials=True)
    p.add_argument("--d", type=_int_list, default=[1])
    p.add_argument("--j", type=_int_list, default=[1])
    p.add_argument("--tol", type=_tolerance, action="append", default=[],
                   help="override a tolerance, e.g. z=2.5 (flags |z| above it in mc_ok)")

    p = sub.add_parser("plot", help="gnuplot data: exact profile with the Gaussian overlay")
    common(p)
    p.add_argument("--j", type=_int_list, default=[])
    p.add_argument("--d-max", type=int, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = {k.replace("-", "_"): v for k, v in vars(args).items()}
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    kwargs = {k: v for k, v in values.items() if k in names and v is not None}
    kwargs["tolerances"] = dict(values.get("tol") or [])
    cfg = ExperimentConfig(**kwargs)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------


def _csv(header: str, rows: Sequence[Sequence]) -> str:
    return header + "\n" + "".join(",".join(str(x) for x in row) + "\n" for row in rows)


def _num(x: float) -> str:
    return repr(float(x))


def emit_plot_data(table: Sequence[Sequence[float]], axes: Sequence[str]) -> str:
    """Whitespace-separated columns with a ``#`` header naming the axes."""
    if not table:
        raise ConfigError("nothing to plot")
    if any(len(row) != len(axes) for row in table):
        raise ConfigError("every row needs one value per axis")
    lines = ["# " + " ".join(axes)]
    lines += [" ".join(_num(v) for v in row) for row in table]
    return "\n".join(lines) + "\n"


def _cmd_generate(cfg: ExperimentConfig) -> str:
    tree = grow_random(cfg.k[0], cfg.n[0], cfg.seed)
    if cfg.export == "cliques" or cfg.format == "json":
        return tree.to_clique_json() + "\n"
    return tree.to_edge_list()


def _guard(cfg: ExperimentConfig, k: int, n: int) -> None:
    if k * max(n, 1) * cfg.trials > cfg.max_cells:
        raise ResourceGuardError(f"k*n*trials = {k * n * cfg.trials} exceeds max_cells = {cfg.max_cells}")


def _cmd_stats(cfg: ExperimentConfig) -> str:
    chunks = []
    hist_chunks = []
    payload = []
    for k in cfg.k:
        for n in cfg.n:
            _guard(cfg, k, n)
            st = monte_carlo(k, n, cfg.trials, cfg.d_max, cfg.seed, cfg.threads, max_cells=cfg.max_cells)
            chunks.append(st.to_csv())
            hist_chunks.append(st.histogram_csv())
            payload.append(st.to_json_dict())
    if cfg.hist_output:
        text = hist_chunks[0] + "".join(h.split("\n", 1)[1] for h in hist_chunks[1:])
        Path(cfg.hist_output).write_text(text)
    if cfg.format == "json":
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2, sort_keys=True) + "\n"
    return chunks[0] + "".join(c.split("\n", 1)[1] for c in chunks[1:])


def _cmd_exact(cfg: ExperimentConfig) -> str:
    out = []
    for k in cfg.k:
        table = expected_profile_exact(k, max(cfg.n), cfg.d_max, cfg.backend, keep=cfg.n)
        text = table.to_csv(cfg.rational_format)
        out.append(text if not out else text.split("\n", 1)[1])
    return "".join(out)


def _cmd_asym(cfg: ExperimentConfig) -> str:
    if cfg.w:
        rows = []
        for k in cfg.k:
            for w in cfg.w:
                sp = asym.lambda_spectrum(k, w)
                rows.append((k, _num(w), _num(sp.lambda1), _num(sp.dlambda1), _num(sp.d2lambda1)))
        return _csv("k,w,lambda1,lambda1p,lambda1pp", rows)
    rows = []
    for k in cfg.k:
        for n in cfg.n:
            ds = cfg.d or list(range(1, math.ceil(2 * asym.llt_center(k, n)) + 1))
            for d in ds:
                for j in cfg.j or [k]:
                    fixed = asym.asym_fixed_d(k, n, d, j)
                    sol, large = asym.asym_large_d(k, n, d, j)
                    rows.append((k, n, d, j, _num(fixed), _num(large), _num(sol.rho),
                                 int(sol.limit_evaluated), _num(asym.llt_gaussian(k, n, d))))
    return _csv("k,n,d,j,fixed_d,large_d,rho,limit_evaluated,llt", rows)


def _cmd_alpha_plus(cfg: ExperimentConfig) -> str:
    rows = []
    for k in cfg.k:
        hc = asym.alpha_plus(k)
        rows.append((k, f"{hc.alpha_plus:.9f}", f"{hc.v:.9f}"))
    return _csv("k,alpha_plus,v", rows)


def _cmd_limit(cfg: ExperimentConfig) -> str:
    rows = []
    for k in cfg.k:
        for d in cfg.d:
            for j in cfg.j or range(1, k + 1):
                s = limit_law_series(k, d, j, cfg.order, cfg.lower)
                for m, c in enumerate(s.coeffs):
                    rows.append((k, d, j, m, c.numerator, c.denominator, _num(moment_from_coeff(k, m, c))))
    return _csv("k,d,j,m,c_m(numerator),c_m(denominator),moment", rows)


def _cmd_compare(cfg: ExperimentConfig) -> str:
    z_tol = cfg.tolerances.get("z", DEFAULT_TOLERANCES["z"])
    rows = []
    for k in cfg.k:
        for n in cfg.n:
            _guard(cfg, k, n)
            d_top = max(cfg.d)
            backend = "rational" if n <= RATIONAL_BACKEND_LIMIT else "float"
            table = expected_profile_exact(k, n, d_top + 1, backend, keep=[n])
            st = monte_carlo(k, n, cfg.trials, d_top + 1, cfg.seed, cfg.threads, max_cells=cfg.max_cells)
            for d in cfg.d:
                for j in cfg.j:
                    if not 1 <= j <= k:
                        raise ConfigError(f"j = {j} outside 1..{k}")
                    exact = float(table.expectation(d, j, n))
                    fixed = large = math.nan
                    if k >= 2 and n > 1:
                        fixed = asym.asym_fixed_d(k, n, d, j)
                        try:
                            large = asym.asym_large_d(k, n, d, j)[1]
                        except KTreeError:
                            large = math.nan
                    mc, se = float(st.mean[d, j]), float(st.stderr[d, j])
                    z = (mc - exact) / se if se > 0 else (0.0 if mc == exact else math.inf)
                    rows.append((k, n, d, j, f"{exact:.6f}", _num(fixed), _num(large), _num(mc), _num(se),
                                 _num(exact / fixed), _num(exact / large),
                                 _num(mc / exact) if exact else "nan", _num(z), int(abs(z) <= z_tol)))
    return _csv("k,n,d,j,exact,fixed_d,large_d,mc_mean,mc_stderr,"
                "exact_over_fixed_d,exact_over_large_d,mc_over_exact,z,mc_ok", rows)


def _cmd_plot(cfg: ExperimentConfig) -> str:
    k, n = cfg.k[0], cfg.n[0]
    j = cfg.j[0] if cfg.j else k
    d_max = cfg.d_max or max(2, math.ceil(2.5 * asym.llt_center(k, max(n, 3))))
    backend = "rational" if n <= RATIONAL_BACKEND_LIMIT else "float"
    table = expected_profile_exact(k, n, d_max, backend, keep=[n])
    prof = table.level_profile(n, j)
    rows = [(d, float(prof[d]), asym.llt_gaussian(k, n, d)) for d in range(1, d_max + 1)]
    return emit_plot_data(rows, ("d", "exact", "llt"))


HANDLERS = {
    "generate": _cmd_generate,
    "stats": _cmd_stats,
    "exact": _cmd_exact,
    "asym": _cmd_asym,
    "alpha-plus": _cmd_alpha_plus,
    "limit": _cmd_limit,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
}


def run(cfg: ExperimentConfig) -> str:
    cfg.validate()
    return HANDLERS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        text = run(cfg)
    except KTreeError as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(record), file=sys.stderr)
        return exc.exit_code
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
