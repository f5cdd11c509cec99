"""Command-line front end and sweep engine.

Every number is serialized with 17 significant digits so outputs are
byte-identical across runs and worker counts; CSV is the contract format,
JSON mirrors it and SVG is a convenience quick-look chart.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

# the package re-exports the dicke() constructor, which shadows the submodule
# attribute; bind the modules straight from sys.modules instead
from . import channels, metrics, metrology, models, states, twist

__all__ = ["run_cli", "main", "SweepConfig", "SweepConfigError", "sweep",
           "to_json_text", "csv_cell", "fmt_float"]

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


def csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def to_json_text(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return fmt_float(x)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{out}"'
    if isinstance(obj, dict):
        items = ", ".join(f"{to_json_text(str(k))}: {to_json_text(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _rows_to_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(csv_cell(row.get(col)) for col in columns))
    return "\n".join(lines) + "\n"


def _rows_to_json(columns, rows) -> str:
    items = [{col: row.get(col) for col in columns} for row in rows]
    return to_json_text(items) + "\n"


def _rows_to_svg(columns, rows, title="") -> str:
    """Minimal polyline chart: first column is x, remaining numeric ones y."""
    width, height, pad = 640, 400, 50
    xs = [row.get(columns[0]) for row in rows]
    series = []
    for col in columns[1:]:
        ys = [row.get(col) for row in rows]
        pairs = [(x, y) for x, y in zip(xs, ys)
                 if isinstance(x, (int, float)) and isinstance(y, (int, float))]
        if pairs:
            series.append((col, pairs))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if series:
        all_x = [p[0] for _, prs in series for p in prs]
        all_y = [p[1] for _, prs in series for p in prs]
        x0, x1 = min(all_x), max(all_x)
        y0, y1 = min(all_y), max(all_y)
        dx = (x1 - x0) or 1.0
        dy = (y1 - y0) or 1.0
        colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
        for i, (name, prs) in enumerate(series):
            pts = " ".join(
                f"{pad + (p[0]-x0)/dx*(width-2*pad):.2f},"
                f"{height-pad - (p[1]-y0)/dy*(height-2*pad):.2f}"
                for p in prs
            )
            color = colors[i % len(colors)]
            parts.append(f'<polyline fill="none" stroke="{color}" points="{pts}"/>')
            parts.append(
                f'<text x="{pad}" y="{pad + 14*i}" fill="{color}" font-size="12">{name}</text>'
            )
    if title:
        parts.append(f'<text x="{width/2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_rows(columns, rows, fmt, out_path, title=""):
    if fmt == "csv":
        _emit(_rows_to_csv(columns, rows), out_path)
    elif fmt == "json":
        _emit(_rows_to_json(columns, rows), out_path)
    elif fmt == "svg":
        _emit(_rows_to_svg(columns, rows, title), out_path)
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def _report_row(report: metrics.SqueezingReport) -> dict:
    return report.to_dict()


# ---------------------------------------------------------------------------
# point evaluators shared by the subcommands and the sweep engine
# ---------------------------------------------------------------------------


def _eval_oat(n: int, theta: float) -> dict:
    lm = twist.oat_closed_form(int(n), theta)
    rep = metrics.compute_report(states.collective_from_local(lm))
    row = {"n": int(n), "theta": theta}
    row.update(_report_row(rep))
    return row


def _traj_row(mset, rep) -> dict:
    return {
        "xi_S2": rep.xi_S2,
        "xi_R2": rep.xi_R2,
        "tilde_xi_E2": rep.tilde_xi_E2,
        "Jx": float(mset.mean[0]),
        "Jy": float(mset.mean[1]),
        "Jz": float(mset.mean[2]),
    }


def _eval_tat(n: int, chi_t: float) -> dict:
    psi = twist.evolve(states.dicke(int(n), -n / 2.0), twist.HamiltonianSpec(twist.TAT, 1.0), chi_t)
    mset = states.moments(psi)
    rep = metrics.compute_report(mset)
    row = {"n": int(n), "chi_t": chi_t}
    row.update(_traj_row(mset, rep))
    return row


def _eval_channel(channel: str, n: int, theta0: float, p: float) -> dict:
    lm0 = twist.oat_closed_form(int(n), theta0)
    dec = channels.decohered_squeezing(lm0, channels.ChannelSpec(channel, p))
    return {
        "p": p,
        "xi_S2": dec.xi_S2,
        "xi_R2": dec.xi_R2,
        "tilde_xi_E2": dec.tilde_xi_E2,
        "Cr": max(0.0, dec.c_r_prime),
    }


def _eval_lmg(n: int, h: float, gamma: float) -> dict:
    _, rep = models.lmg_ground(models.LMGSpec(int(n), h, gamma))
    return {
        "n": int(n),
        "h": h,
        "gamma": gamma,
        "xi_S2": rep.xi_S2,
        "xi_R2": rep.xi_R2,
        "tilde_xi_E2": rep.tilde_xi_E2,
    }


def _ramsey_state(name: str, n: int) -> states.SymmetricState:
    if name == "css":
        return states.dicke(n, -n / 2.0)
    if name == "sss":
        return metrology.sss_andre(n)
    if name == "ghz":
        return metrology.ghz_y(n)
    raise ValueError(f"unknown ramsey state {name!r}")


def _eval_ramsey(n: int, state: str, readout: str, phi: float) -> dict:
    psi = _ramsey_state(state, int(n))
    signal, dsignal = metrology.ramsey_signal(psi, phi, readout)
    row = {"phi": phi, "signal": signal, "dsignal": dsignal, "dphi": None}
    try:
        res = metrology.ramsey_sensitivity(psi, phi, readout)
        row["dphi"] = math.sqrt(res.phase_variance)
    except ValueError:
        pass  # zero slope: leave dphi empty for this operating point
    return row


SWEEP_OPS = {
    "oat": (("n", "theta"), _eval_oat),
    "tat": (("n", "chi_t"), _eval_tat),
    "channel": (("channel", "n", "theta0", "p"), _eval_channel),
    "lmg": (("n", "h", "gamma"), _eval_lmg),
    "ramsey": (("n", "state", "readout", "phi"), _eval_ramsey),
}


class SweepConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    op: str
    grids: dict  # parameter name -> list of values, in declaration order
    out_format: str = "csv"
    out_path: str | None = None
    seed: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.op not in SWEEP_OPS:
            raise SweepConfigError(f"unknown sweep operation {self.op!r}")
        if self.out_format not in ("csv", "json", "svg"):
            raise SweepConfigError(f"unknown output format {self.out_format!r}")
        params, _ = SWEEP_OPS[self.op]
        if not self.grids:
            raise SweepConfigError("sweep needs at least one grid")
        for name, values in self.grids.items():
            if name not in params:
                raise SweepConfigError(f"operation {self.op!r} has no parameter {name!r}")
            if not isinstance(values, list) or len(values) == 0:
                raise SweepConfigError(f"grid for {name!r} is empty")
        missing = [p for p in params if p not in self.grids]
        if missing:
            raise SweepConfigError(f"missing grids for parameters: {missing}")


def _parse_scalar(text: str):
    text = text.strip()
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _parse_grid(text: str) -> list:
    """Grid syntax: 'a:b:count' for a linear grid, or comma-separated values."""
    text = text.strip()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise SweepConfigError(f"bad grid spec {text!r}; want start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise SweepConfigError("grid count must be >= 1")
        if count == 1:
            return [start]
        return list(np.linspace(start, stop, count))
    return [_parse_scalar(tok) for tok in text.split(",") if tok.strip() != ""]


def parse_sweep_config(path: str) -> SweepConfig:
    """Plain key = value config; grid.<param> lines define the sweep axes."""
    if not os.path.exists(path):
        raise SweepConfigError(f"config file not found: {path}")
    op = None
    grids: dict[str, list] = {}
    kw: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SweepConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (tok.strip() for tok in line.split("=", 1))
            if key == "op":
                op = _parse_scalar(value)
            elif key.startswith("grid."):
                grids[key[5:]] = _parse_grid(value)
            elif key == "format":
                kw["out_format"] = str(_parse_scalar(value))
            elif key == "out":
                kw["out_path"] = str(_parse_scalar(value))
            elif key == "seed":
                kw["seed"] = int(_parse_scalar(value))
            elif key == "workers":
                kw["workers"] = int(_parse_scalar(value))
            else:
                raise SweepConfigError(f"{path}:{lineno}: unknown key {key!r}")
    if op is None:
        raise SweepConfigError("config is missing the 'op' key")
    return SweepConfig(op=str(op), grids=grids, **kw)


def _worker_count(requested: int | None) -> int:
    cap = os.environ.get("SQZ_THREADS")
    cap_n = max(1, int(cap)) if cap else None
    n = requested if requested and requested > 0 else (os.cpu_count() or 1)
    if cap_n is not None:
        n = min(n, cap_n)
    return max(1, n)


def sweep(cfg: SweepConfig):
    """Cartesian-product evaluation with a stable, parallelism-independent
    row order; per-point failures become flagged rows."""
    params, fn = SWEEP_OPS[cfg.op]
    names = [p for p in params if p in cfg.grids]
    import itertools

    points = list(itertools.product(*(cfg.grids[name] for name in names)))

    def run_point(values):
        kwargs = dict(zip(names, values))
        base = {name: kwargs[name] for name in names}
        try:
            row = fn(**kwargs)
            out = dict(base)
            out.update(row)
            out["status"] = "ok"
            return out
        except Exception as exc:  # per-point numeric failure, not an abort
            out = dict(base)
            msg = str(exc).replace(",", ";").replace("\n", " ")
            out["status"] = f"error: {msg}"
            return out

    workers = _worker_count(cfg.workers)
    if workers == 1:
        rows = [run_point(vals) for vals in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_point, points))
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns, rows


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="spinsqueeze", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("oat", help="one-axis twisting squeezing report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    add_common(p)

    p = sub.add_parser("tat", help="two-axis twisting trajectory")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--chi-t", type=float, required=True)
    p.add_argument("--points", type=int, default=1)
    add_common(p)

    p = sub.add_parser("kicked-top", help="kicked-top squeezing trajectory")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--spin-j", type=float, required=True)
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--phi0", type=float, required=True)
    p.add_argument("--kicks", type=int, required=True)
    add_common(p)

    p = sub.add_parser("lmg", help="collective-ferromagnet ground-state squeezing")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--h", type=float)
    g.add_argument("--h-grid", nargs=3, type=float, metavar=("START", "STOP", "COUNT"))
    add_common(p)

    p = sub.add_parser("channel", help="decoherence sweep of a twisted state")
    p.add_argument("--channel", choices=(channels.ADC, channels.PDC, channels.DPC), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--p", required=True, help="grid start:stop:count or comma list")
    add_common(p)

    p = sub.add_parser("ramsey", help="phase-estimation sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--state", choices=("css", "sss", "ghz"), default="css")
    p.add_argument("--readout", choices=("jz", "parity"), default="jz")
    p.add_argument("--phi", required=True, help="grid start:stop:count or comma list")
    add_common(p)

    p = sub.add_parser("qnd", help="conditional squeezing by probe measurement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--photons", type=int, required=True)
    p.add_argument("--chi", type=float, required=True)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    add_common(p)

    p = sub.add_parser("metrics", help="squeezing report of a named state")
    p.add_argument("--state", choices=("css", "dicke"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--m", type=float, default=None)
    add_common(p)

    p = sub.add_parser("husimi", help="Husimi distribution on a sphere grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--oat-chi-t", type=float, default=None)
    p.add_argument("--n-theta", type=int, default=60)
    p.add_argument("--n-phi", type=int, default=120)
    add_common(p)

    p = sub.add_parser("sweep", help="cartesian sweep driven by a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    return parser


def _cmd_oat(args) -> int:
    row = _eval_oat(args.n, args.theta)
    cols = list(row.keys())
    _write_rows(cols, [row], args.format, args.out, title="oat")
    return EXIT_OK


def _cmd_tat(args) -> int:
    count = max(1, args.points)
    if count == 1:
        rows = [_eval_tat(args.n, args.chi_t)]
    else:
        rows = [_eval_tat(args.n, t) for t in np.linspace(args.chi_t / count, args.chi_t, count)]
    cols = list(rows[0].keys())
    _write_rows(cols, rows, args.format, args.out, title="tat")
    return EXIT_OK


def _cmd_kicked_top(args) -> int:
    n = int(round(2 * args.spin_j))
    initial = states.css(n, args.theta0, args.phi0)
    spec = twist.KickedTopSpec(kappa=args.kappa, j=args.spin_j)
    result = twist.kicked_top_trajectory(initial, spec, args.kicks)
    rows = []
    for step, rep in enumerate(result.reports, start=1):
        row = {"step": step}
        row.update(
            {
                "xi_S2": rep.xi_S2,
                "xi_R2": rep.xi_R2,
                "tilde_xi_E2": rep.tilde_xi_E2,
                "Jx": float(result.means[step - 1][0]),
                "Jy": float(result.means[step - 1][1]),
                "Jz": float(result.means[step - 1][2]),
            }
        )
        rows.append(row)
    cols = ["step", "xi_S2", "xi_R2", "tilde_xi_E2", "Jx", "Jy", "Jz"]
    _write_rows(cols, rows, args.format, args.out, title="kicked-top")
    return EXIT_OK


def _cmd_lmg(args) -> int:
    if args.h is not None:
        hs = [args.h]
    else:
        start, stop, count = args.h_grid
        hs = list(np.linspace(start, stop, int(count)))
    rows = [_eval_lmg(args.n, h, args.gamma) for h in hs]
    cols = list(rows[0].keys())
    _write_rows(cols, rows, args.format, args.out, title="lmg")
    return EXIT_OK


def _cmd_channel(args) -> int:
    ps = _parse_grid(args.p)
    rows = [_eval_channel(args.channel, args.n, args.theta0, float(p)) for p in ps]
    cols = ["p", "xi_S2", "xi_R2", "tilde_xi_E2", "Cr"]
    _write_rows(cols, rows, args.format, args.out, title=f"channel {args.channel}")
    return EXIT_OK


def _cmd_ramsey(args) -> int:
    phis = _parse_grid(args.phi)
    rows = [_eval_ramsey(args.n, args.state, args.readout, float(phi)) for phi in phis]
    cols = ["phi", "signal", "dsignal", "dphi"]
    _write_rows(cols, rows, args.format, args.out, title="ramsey")
    return EXIT_OK


def _cmd_qnd(args) -> int:
    spec = models.QNDSpec(args.n, args.photons, args.chi, args.eta)
    res = models.qnd_conditional(spec)
    row = {
        "kappa2": res.kappa2,
        "xi_R2": res.xi_r2,
        "xi_R2_with_loss": res.xi_r2_with_loss,
        "db": 10.0 * math.log10(1.0 / res.xi_r2),
        "db_with_loss": 10.0 * math.log10(1.0 / res.xi_r2_with_loss),
        "gaussian_regime": res.gaussian_regime,
    }
    if args.trials > 0:
        ratio, stderr = models.qnd_monte_carlo(spec, args.trials, args.seed)
        row["mc_ratio"] = ratio
        row["mc_stderr"] = stderr
    _write_rows(list(row.keys()), [row], args.format, args.out, title="qnd")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    if args.state == "css":
        psi = states.css(args.n, args.theta, args.phi)
    else:
        if args.m is None:
            raise ValueError("dicke state needs --m")
        psi = states.dicke(args.n, args.m)
    rep = metrics.compute_report(states.moments(psi))
    row = _report_row(rep)
    _write_rows(list(row.keys()), [row], args.format, args.out, title="metrics")
    return EXIT_OK


def _cmd_husimi(args) -> int:
    psi = states.css(args.n, args.theta, args.phi)
    if args.oat_chi_t is not None:
        psi = twist.evolve(psi, twist.HamiltonianSpec(twist.OAT_X, 1.0), args.oat_chi_t)
    thetas = np.linspace(0.0, math.pi, args.n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, args.n_phi, endpoint=False)
    pts = [(t, p) for t in thetas for p in phis]
    q = states.husimi_q(psi, pts)
    rows = [{"theta": t, "phi": p, "q": float(v)} for (t, p), v in zip(pts, q)]
    _write_rows(["theta", "phi", "q"], rows, args.format, args.out, title="husimi")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = parse_sweep_config(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    columns, rows = sweep(cfg)
    _write_rows(columns, rows, cfg.out_format, cfg.out_path, title=f"sweep {cfg.op}")
    return EXIT_OK


_COMMANDS = {
    "oat": _cmd_oat,
    "tat": _cmd_tat,
    "kicked-top": _cmd_kicked_top,
    "lmg": _cmd_lmg,
    "channel": _cmd_channel,
    "ramsey": _cmd_ramsey,
    "qnd": _cmd_qnd,
    "metrics": _cmd_metrics,
    "husimi": _cmd_husimi,
    "sweep": _cmd_sweep,
}


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except SweepConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
