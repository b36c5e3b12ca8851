"""Command-line front end.

Every command writes ``report.json`` and ``manifest.json`` into the output
directory, plus ``certificates.json``, ``curve.csv`` or ``branches.csv`` when
it produces them.  Exit codes: 0 verdict holds, 2 verdict fails, 3 budget
exceeded, 4 bad input.  Errors are reported as one JSON object on stderr.

Config file grammar (``--config``): one ``key = value`` per line, ``#``
starts a comment, blank lines are ignored.  Values are read as int, then
float, then ``true``/``false``, else kept as text.  Keys:

    grid, max_depth, min_box_width, refine_width, inflation, workers, out,
    samples, a_min, a_max, seed, n_random, tol

Command-line flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

from . import runs

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_BAD_INPUT = 0, 2, 3, 4

CONFIG_KEYS = {
    "grid", "max_depth", "min_box_width", "refine_width", "inflation", "workers", "out",
    "samples", "a_min", "a_max", "seed", "n_random", "tol",
}

BRANCH_COLUMNS = ["m_lo", "m_hi", "branch", "q3x_lo", "q3x_hi", "q3y_lo", "q3y_hi",
                  "q4x_lo", "q4x_hi", "q4y_lo", "q4y_hi", "symmetric"]
TABLE_COLUMNS = ["label"] + BRANCH_COLUMNS + ["method", "deviation", "match"]
CURVE_COLUMNS = ["a_lo", "a_hi", "b_lo", "b_hi", "m_lo", "m_hi"]


class BadInput(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadInput(message)


def _parse_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    return text


def read_config(path) -> dict:
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadInput(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise BadInput(f"{path}:{n}: unknown key {key!r}")
        out[key] = _parse_value(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kitecc", description="Certified computations for concave kite central configurations.")
    p.add_argument("--config", help="key = value file with budgets and tolerances")
    p.add_argument("--workers", type=int, help="worker processes for campaigns")
    p.add_argument("--out", help="output directory (default: out)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify-max", help="mass maximum along the curve")
    c.add_argument("--domain", choices=["D0", "full"], default="D0")
    c.add_argument("--grid", type=int)

    c = sub.add_parser("exclusion", help="no zero of g above b = 5/2")
    c.add_argument("--grid", type=int)

    sub.add_parser("root-b1", help="root of the quintic in [2.75, 2.76]")

    c = sub.add_parser("signs", help="monotonicity and endpoint sign facts")
    c.add_argument("--grid", type=int)

    c = sub.add_parser("trace", help="certified samples of the curve g = 0")
    c.add_argument("--samples", type=int)
    c.add_argument("--a-min", dest="a_min", type=float)
    c.add_argument("--a-max", dest="a_max", type=float)

    c = sub.add_parser("extrema", help="stationary points of b_hat and the mass maximum")
    c.add_argument("--grid", type=int)

    c = sub.add_parser("solve", help="all solutions for a given mass ratio")
    c.add_argument("--m", type=float, required=True)
    c.add_argument("--full-planar", action="store_true")
    c.add_argument("--grid", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--n-random", dest="n_random", type=int)

    c = sub.add_parser("classify", help="bifurcation type at a special point")
    c.add_argument("--at", choices=["fold", "pitchfork"], required=True)
    c.add_argument("--cross-check", action="store_true", help="count solutions on both sides")

    c = sub.add_parser("table1", help="reference table of positions as CSV")
    c.add_argument("--tol", type=float)
    return p


def _settings(args) -> dict:
    cfg = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _overrides(cfg: dict) -> dict:
    out = {}
    for src, dst in (("grid", "initial_grid"), ("max_depth", "max_depth"), ("min_box_width", "min_box_width"),
                     ("refine_width", "refine_width"), ("inflation", "inflation"), ("workers", "worker_count")):
        if src in cfg:
            out[dst] = cfg[src]
    return out


def run_command(args, cfg: dict) -> runs.RunOutcome:
    ov = _overrides(cfg)
    cmd = args.command
    if cmd == "certify-max":
        return runs.certify_max(ov, args.domain)
    if cmd == "exclusion":
        return runs.exclusion(ov)
    if cmd == "root-b1":
        return runs.root_b1(ov)
    if cmd == "signs":
        return runs.signs(ov)
    if cmd == "trace":
        return runs.trace(int(cfg.get("samples", 100)), float(cfg.get("a_min", 1.001)),
                          float(cfg.get("a_max", 1.999)))
    if cmd == "extrema":
        return runs.extrema(ov)
    if cmd == "solve":
        return runs.solve(args.m, args.full_planar, ov, int(cfg.get("n_random", 48)), int(cfg.get("seed", 0)))
    if cmd == "classify":
        return runs.classify_at(args.at, args.cross_check)
    if cmd == "table1":
        return runs.table1(float(cfg.get("tol", 1e-8)))
    raise BadInput(f"unknown command {cmd!r}")


# --- writers ---------------------------------------------------------------------

def _num(x) -> str:
    return repr(float(x))


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def _branch_values(m, row) -> list:
    m_lo, m_hi = ("inf", "inf") if m == "inf" else (_num(m.lo), _num(m.hi))
    vals = [m_lo, m_hi, row.branch]
    for iv in row.state[:4]:
        vals += [_num(iv.lo), _num(iv.hi)]
    return vals + [int(row.symmetric)]


def write_outputs(outcome: runs.RunOutcome, out: Path) -> list[str]:
    out.mkdir(parents=True, exist_ok=True)
    written = ["report.json"]
    _write_json(out / "report.json", {"command": outcome.command, "ok": outcome.ok,
                                      "budget_exceeded": outcome.budget_exceeded, "report": outcome.report})
    if outcome.certificates:
        _write_json(out / "certificates.json", outcome.certificates)
        written.append("certificates.json")
    if outcome.curve:
        with open(out / "curve.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CURVE_COLUMNS)
            for p in outcome.curve:
                w.writerow([_num(x) for x in p.to_row()])
        written.append("curve.csv")
    if outcome.branches or outcome.table:
        with open(out / "branches.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if outcome.table:
                w.writerow(TABLE_COLUMNS)
                for r in outcome.table:
                    m = r["m"] if r["m"] == "inf" else _Bounds(r["m"])
                    row = _RowView(r)
                    w.writerow([r["label"]] + _branch_values(m, row)
                               + [r["method"], _num(r["deviation"]), int(r["match"])])
            else:
                w.writerow(BRANCH_COLUMNS)
                for row in outcome.branches:
                    w.writerow(_branch_values(row.m, row))
        written.append("branches.csv")
    return written


class _Bounds:
    def __init__(self, lohi):
        self.lo, self.hi = lohi


class _RowView:
    """Table entry seen through the attributes the branch writer reads."""

    def __init__(self, entry: dict):
        self.branch = entry["branch"]
        self.symmetric = entry["symmetric"]
        self.state = [_Bounds(p) for p in entry["state"]]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _source_hashes() -> dict:
    here = Path(__file__).parent
    return {p.name: _sha256(p) for p in sorted(here.glob("*.py"))}


def write_manifest(out: Path, command: str, cfg: dict, config_path, written: list[str],
                   outcome: runs.RunOutcome | None, wall: float, exit_code: int) -> None:
    inputs = {"sources": _source_hashes()}
    if config_path:
        inputs["config_file"] = _sha256(Path(config_path))
    manifest = {
        "command": command,
        "config": cfg,
        "input_hashes": inputs,
        "outputs": {name: _sha256(out / name) for name in written},
        "wall_time_s": wall,
        "exit_code": exit_code,
        "certificate_counts": outcome.counts() if outcome else {},
    }
    _write_json(out / "manifest.json", manifest)


REQUIRED_JSON_KEYS = {
    "report.json": {"command", "ok", "report"},
    "manifest.json": {"command", "config", "input_hashes", "outputs", "wall_time_s"},
}
REQUIRED_CSV_HEADERS = {"curve.csv": CURVE_COLUMNS}


def validate_outputs(out) -> list[str]:
    """Problems found in an output directory; empty when the manifest checks out."""
    out = Path(out)
    problems = []
    try:
        manifest = json.loads((out / "manifest.json").read_text())
    except (OSError, ValueError) as exc:
        return [f"manifest.json: {exc}"]
    for name, digest in manifest.get("outputs", {}).items():
        path = out / name
        if not path.exists():
            problems.append(f"{name}: missing")
            continue
        if _sha256(path) != digest:
            problems.append(f"{name}: hash mismatch")
        if name.endswith(".json"):
            data = json.loads(path.read_text())
            missing = REQUIRED_JSON_KEYS.get(name, set()) - (set(data) if isinstance(data, dict) else set())
            if missing:
                problems.append(f"{name}: missing keys {sorted(missing)}")
            if name == "certificates.json":
                for camp in data:
                    for c in camp["certificates"]:
                        if c["verdict"] not in ("UniqueZero", "NoZero", "Unknown"):
                            problems.append(f"{name}: bad verdict {c['verdict']}")
        else:
            header = path.read_text().splitlines()[0].split(",")
            want = REQUIRED_CSV_HEADERS.get(name)
            if name == "branches.csv":
                want = TABLE_COLUMNS if header[0] == "label" else BRANCH_COLUMNS
            if want and header != want:
                problems.append(f"{name}: header {header}")
    missing = REQUIRED_JSON_KEYS["manifest.json"] - set(manifest)
    if missing:
        problems.append(f"manifest.json: missing keys {sorted(missing)}")
    return problems


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        cfg = _settings(args)
        if cfg.get("workers", 1) < 1:
            raise BadInput("workers must be >= 1")
    except BadInput as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    except OSError as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    out = Path(cfg.get("out", "out"))
    try:
        outcome = run_command(args, cfg)
    except (BadInput, ValueError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    except ArithmeticError as exc:
        return _error("verdict_failed", f"{type(exc).__name__}: {exc}", EXIT_FAIL)
    if outcome.budget_exceeded:
        code = EXIT_BUDGET
    else:
        code = EXIT_OK if outcome.ok else EXIT_FAIL
    written = write_outputs(outcome, out)
    write_manifest(out, args.command, cfg, args.config, written, outcome,
                   time.perf_counter() - start, code)
    summary = {"command": args.command, "ok": outcome.ok, "exit_code": code, "out": str(out)}
    print(json.dumps(summary))
    return code


if __name__ == "__main__":
    sys.exit(main())
