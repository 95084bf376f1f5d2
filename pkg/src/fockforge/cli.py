"""Command-line harness: ``fockforge {selftest,converge,levy,behii,example1,example3}``.

Exit codes: 0 all checks passed, 1 a property failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import functionals, levy, suites
from .config import ConfigError, ExperimentConfig, default_config_dict, load_config, parse_config
from .fock import nets
from .fock.space import GridSpec
from .functionals import Partition
from .ncalg import mono_str
from .schurmann import MINUS, PAPER_PLUS, triple_from_matrix
from .scalars import EXACT, FLOAT

log = logging.getLogger("fockforge")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

CONVERGE_COLUMNS = ["depth", "mesh", "residual", "unit_defect_left", "unit_defect_right", "evolution_defect"]
LEVY_COLUMNS = ["monomial", "t", "value_exact", "value_truncated", "abs_diff"]


def threads() -> int:
    raw = os.environ.get("FOCKFORGE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring FOCKFORGE_THREADS=%r", raw)
    return min(4, os.cpu_count() or 1)


def _num(x) -> str:
    x = float(x)
    return repr(0.0 if x == 0 else x)


def _complex_num(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return _num(z.real)
    return f"{_num(z.real)}{'+' if z.imag > 0 else '-'}{_num(abs(z.imag))}j"


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _triple(cfg: ExperimentConfig):
    return triple_from_matrix(cfg.L, cfg.psi_sign)


# ----------------------------------------------------------------------------
# commands


def cmd_selftest(names: list[str] | None = None) -> int:
    chosen = list(suites.SELFTEST_SUITES) if names is None else names
    if not chosen:
        log.warning("no suites selected; nothing to check")
        return EXIT_OK
    for name in chosen:
        result = suites.SELFTEST_SUITES[name]()
        status = "ok" if result.ok else "FAIL"
        print(f"{status:4} {name}: {result.checked} checks, {len(result.failures)} failures")
        if not result.ok:
            print(f"first failing property: {name}", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


def converge_rows(cfg: ExperimentConfig) -> tuple[list[list], dict]:
    t = _triple(cfg)
    g = cfg.grid()
    R, S = cfg.R, cfg.S
    mid = (R + S) / 2

    def row(j: int):
        th = nets.theta(g, t, Partition.dyadic(R, S, j))
        prev = nets.theta(g, t, Partition.dyadic(R, S, j - 1))
        residual = nets.op_norm(th - prev)
        left, right = nets.unitarity_defect(th)
        evo = nets.evolution_defect(g, t, R, mid, S, j - 1)
        return [j, float((S - R) / 2**j), residual, left, right, evo]

    with ThreadPoolExecutor(max_workers=threads()) as pool:
        raw = list(pool.map(row, cfg.depths))
    pairs = [(r[1], r[2]) for r in raw if r[2] > 0]
    rate = None
    if len(pairs) >= 2:
        rate = float(np.polyfit(np.log([p[0] for p in pairs]), np.log([p[1] for p in pairs]), 1)[0])
    rows = [[r[0]] + [_num(v) for v in r[1:]] for r in raw]
    report = {
        "command": "converge",
        "config": cfg.to_dict(),
        "columns": CONVERGE_COLUMNS,
        "rows": rows,
        "rate_exponent": rate,
        "provenance": "truncated",
        "notes": [
            "residual at depth j is the norm estimate of the difference with depth j-1",
            "evolution defect compares the net on the two halves at depth j-1 with the whole interval at depth j",
            "norms are power-iteration estimates on the truncated space",
        ],
    }
    return rows, report


def cmd_converge(cfg: ExperimentConfig, out: Path) -> int:
    if min(cfg.depths) < 1:
        raise ConfigError("/depths", "converge needs depths >= 1")
    rows, report = converge_rows(cfg)
    _write_atomic(out / "converge.csv", _csv_text(CONVERGE_COLUMNS, rows))
    _write_atomic(out / "converge.json", _json_text(report))
    for r in rows:
        print(",".join(str(x) for x in r))
    return EXIT_OK


def levy_config(cfg: ExperimentConfig) -> levy.LevyConfig:
    return levy.LevyConfig(_triple(cfg), cfg.grid(), cfg.levy_depths, dict(cfg.tolerances), cfg.mode)


def moment_rows(lcfg: levy.LevyConfig, cfg: ExperimentConfig) -> tuple[list[list], list[dict]]:
    monomials = [()] + levy.default_samples(cfg.d)
    rows, notes = [], []
    for t in cfg.times:
        alpha = Partition.dyadic(0, t, cfg.table_depth)
        for m in monomials:
            name = mono_str(m) if m else "1"
            if not m:
                rows.append([name, str(t), _num(1), _num(1), _num(0)])
                continue
            ex = levy.net_moment(lcfg, [(m, alpha)])
            tr, leaked = levy.truncated_marginal(lcfg, t, m, cfg.table_depth)
            rows.append([name, str(t), _complex_num(ex), _complex_num(tr), _num(abs(complex(ex) - tr))])
            notes.append({"monomial": name, "t": str(t), "exact": str(ex), "leak": leaked})
    return rows, notes


def cmd_levy(cfg: ExperimentConfig, out: Path) -> int:
    lcfg = levy_config(cfg)
    reports = levy.run_suite(lcfg, times=cfg.times, seed=cfg.seed)
    cyc = levy.cyclicity_rank(lcfg, min(2, cfg.N), [0, 1])
    rows, notes = moment_rows(lcfg, cfg)
    report = {
        "command": "levy",
        "config": cfg.to_dict(),
        "reports": [r.to_dict() for r in reports],
        "cyclicity": {"rank": cyc.rank, "reachable_dim": cyc.reachable_dim, "vectors": cyc.vectors,
                      "full": cyc.full, "note": cyc.note},
        "moment_table": {"columns": LEVY_COLUMNS, "depth": cfg.table_depth, "entries": notes,
                         "provenance": {"value_exact": "exact-net", "value_truncated": "truncated"}},
    }
    _write_atomic(out / "levy_moments.csv", _csv_text(LEVY_COLUMNS, rows))
    _write_atomic(out / "levy.json", _json_text(report))
    ok = all(r.passed for r in reports) and cyc.full
    for r in reports:
        print(f"{'ok' if r.passed else 'FAIL':4} {r.name}: max defect {r.max_defect:.3e} (tolerance {r.tolerance:.1e})")
    print(f"{'ok' if cyc.full else 'FAIL':4} cyclicity: rank {cyc.rank} of {cyc.reachable_dim}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_behii(cfg: ExperimentConfig, out: Path) -> int:
    results = [suites.product_bound_suite(seed=cfg.seed), suites.net_bound_suite(seed=cfg.seed)]
    report = {
        "command": "behii",
        "seed": cfg.seed,
        "suites": [{"name": r.name, "checked": r.checked, "violations": len(r.failures),
                    "first_failures": [list(map(str, f)) for f in r.failures[:5]]} for r in results],
    }
    _write_atomic(out / "behii.json", _json_text(report))
    for r in results:
        print(f"{'ok' if r.ok else 'FAIL':4} {r.name}: {r.checked} instances, {len(r.failures)} violations")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_example1(cfg: ExperimentConfig, out: Path) -> int:
    g = GridSpec(cfg.T_max, cfg.m, 1, cfg.N)
    alpha = Partition((cfg.R, cfg.S))
    _, rep = nets.example_one_theta(g, alpha, cfg.depths, cfg.drift_sign)
    rows = []
    for i, (p, v) in enumerate(zip(rep.schedule, rep.values)):
        residual = rep.residuals[i - 1] if i else 0.0
        rows.append([0 if i == 0 else cfg.depths[i - 1], _num(p.mesh), _num(residual), _complex_num(v)])
    columns = ["depth", "mesh", "residual", "vacuum_value"]
    decreasing = all(b < a for a, b in zip(rep.residuals[1:], rep.residuals[2:]))
    report = {"command": "example1", "config": cfg.to_dict(), "columns": columns, "rows": rows,
              "drift_sign": cfg.drift_sign, "residuals_decreasing": decreasing, "provenance": "truncated"}
    _write_atomic(out / "example1.csv", _csv_text(columns, rows))
    _write_atomic(out / "example1.json", _json_text(report))
    for r in rows:
        print(",".join(str(x) for x in r))
    return EXIT_OK


def cmd_example3(cfg: ExperimentConfig, out: Path) -> int:
    t = _triple(cfg)
    g = cfg.grid()
    top = max(cfg.depths)
    rows, defects = [], []
    for k in range(0, min(4, top + 1)):
        _, defect = nets.upsilon(g, t, Partition.dyadic(cfg.R, cfg.S, k), top - k)
        defects.append(defect)
        rows.append([k, 2**k, _num(defect)])
    columns = ["refinement", "pieces", "defect"]
    decreasing = all(b < a for a, b in zip(defects, defects[1:]))
    report = {"command": "example3", "config": cfg.to_dict(), "columns": columns, "rows": rows,
              "strictly_decreasing": decreasing, "provenance": "truncated",
              "notes": ["each U is the net over the finest dyadic mesh of the configured depths"]}
    _write_atomic(out / "example3.csv", _csv_text(columns, rows))
    _write_atomic(out / "example3.json", _json_text(report))
    for r in rows:
        print(",".join(str(x) for x in r))
    return EXIT_OK if decreasing else EXIT_FAIL


# ----------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockforge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    st = sub.add_parser("selftest", help="exact-mode property suites")
    st.add_argument("--suites", help="comma-separated suite names (default: all; empty: none)")
    st.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    for name in ("converge", "levy", "behii", "example1", "example3"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON experiment config (default: d = 1, L = 1)")
        p.add_argument("--out", type=Path, help="output directory (overrides the config)")
        p.add_argument("--depth-max", type=int, help="drop depths above this value")
        p.add_argument("--psi-sign", choices=[MINUS, PAPER_PLUS])
        p.add_argument("--mode", choices=[EXACT, FLOAT])
    return parser


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else parse_config(default_config_dict())
    if args.psi_sign:
        cfg.psi_sign = args.psi_sign
    if args.mode:
        cfg.mode = args.mode
    if args.depth_max is not None:
        cfg.depths = tuple(j for j in cfg.depths if j <= args.depth_max)
        cfg.levy_depths = tuple(j for j in cfg.levy_depths if j <= args.depth_max)
        if not cfg.depths:
            raise ConfigError("/depths", f"no depth left at or below {args.depth_max}")
        if not cfg.levy_depths and args.command == "levy":
            raise ConfigError("/levy_depths", f"no depth left at or below {args.depth_max}")
    if args.out:
        cfg.out = str(args.out)
    return cfg


COMMANDS = {
    "converge": cmd_converge,
    "levy": cmd_levy,
    "behii": cmd_behii,
    "example1": cmd_example1,
    "example3": cmd_example3,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "selftest":
        names = None
        if args.suites is not None:
            names = [n.strip() for n in args.suites.split(",") if n.strip()]
            unknown = [n for n in names if n not in suites.SELFTEST_SUITES]
            if unknown:
                print(f"unknown suite(s): {', '.join(unknown)}", file=sys.stderr)
                return EXIT_CONFIG
        if args.inject_sign_flip:
            with functionals.inject_sign_flip():
                return cmd_selftest(names)
        return cmd_selftest(names)
    try:
        cfg = _resolve_config(args)
        return COMMANDS[args.command](cfg, Path(cfg.out))
    except ConfigError as exc:
        print(f"config error at {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
