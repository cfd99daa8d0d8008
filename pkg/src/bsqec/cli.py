"""Command-line driver.

Each subcommand reads an optional JSON config (``--config``), applies flag
overrides, and writes CSV with a header row to ``--output`` (stdout if not
given).  Every row carries the seed and a digest of the effective config.
Exit codes: 0 success, 1 configuration error, 2 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import ion_layout, montecarlo
from .codes import get_code
from .noise import Depolarizing, IonTrap

log = logging.getLogger("bsqec")


class ConfigError(ValueError):
    pass


# -- config ----------------------------------------------------------------------------
DEFAULTS = {
    "code": ["baconshor13"],
    "model": "depolarizing",
    "p": [1e-3],
    "rounds": 1,
    "sampler": "auto",
    "trials": 20000,
    "k_max": 4,
    "seed": 0,
    "r_heating": 0.0,
    "r_d": 0.0,
    "heating_factor": 1.0,
    "idle_dephasing": False,
    "arrangement": "MA",
    "mode": "serial",
    "order": "gauge",
    "objective": "MA",
    "steps": None,
    "bracket": [1e-4, 3e-2],
    "tolerance": 0.01,
    "max_rounds": 12,
    "param": "p",
    "start": 1e-4,
    "stop": 1e-2,
    "points": 7,
    "values": None,
}


def _listify(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def load_config(path, overrides: dict) -> dict:
    cfg = dict(DEFAULTS)
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    cfg["code"] = _listify(cfg["code"])
    cfg["p"] = [float(x) for x in _listify(cfg["p"])]
    try:
        for name in cfg["code"]:
            get_code(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg["model"] not in ("depolarizing", "iontrap"):
        raise ConfigError(f"unknown model {cfg['model']!r}")
    if cfg["sampler"] not in ("auto", "direct", "importance"):
        raise ConfigError(f"unknown sampler {cfg['sampler']!r}")
    if cfg["mode"] not in ("serial", "parallel", "both"):
        raise ConfigError(f"unknown mode {cfg['mode']!r}")
    if int(cfg["rounds"]) < 0 or int(cfg["trials"]) < 1:
        raise ConfigError("rounds must be >= 0 and trials >= 1")
    return cfg


def digest_of(cfg: dict, command: str) -> str:
    keep = {k: v for k, v in cfg.items() if k != "output"}
    keep["command"] = command
    return montecarlo.config_digest(keep)


def _model(cfg, p):
    if not 0 <= p <= 1:
        raise ConfigError(f"error rate {p} outside [0, 1]")
    if cfg["model"] == "depolarizing":
        return Depolarizing(p)
    return IonTrap(p, float(cfg["r_heating"]), float(cfg["r_d"]), float(cfg["heating_factor"]),
                   idle_dephasing=bool(cfg["idle_dephasing"]))


def _arrangement(cfg, code):
    a = cfg["arrangement"]
    if isinstance(a, (list, tuple)):
        return ion_layout.IonArrangement(tuple(a))
    a = str(a)
    if a.upper() in ("SA", "MA", "MT"):
        return ion_layout.published_arrangement(code, a)
    return ion_layout.IonArrangement.from_text(a)


# -- output --------------------------------------------------------------------------------
def write_atomic(path, text: str):
    """Write ``text`` to ``path`` via a temporary file so no partial file is left."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return x


# -- commands ------------------------------------------------------------------------------
SIM_HEADER = ["code", "model", "rounds", "p", "r_heating", "r_d", "p_logical", "stderr",
              "trials", "method", "seed", "digest"]


def _simulate_points(cfg, points, digest):
    rows = []
    for name in cfg["code"]:
        code = get_code(name)
        for pt in points:
            c = dict(cfg, **pt)
            model = _model(c, float(c["p"][0] if isinstance(c["p"], list) else c["p"]))
            arr = _arrangement(c, code) if c["model"] == "iontrap" else None
            exp = montecarlo.CircuitExperiment(code, int(c["rounds"]), model, c["order"],
                                               arrangement=arr)
            res = montecarlo.estimate(exp, int(c["trials"]), int(c["seed"]), c["sampler"],
                                      int(c["k_max"]))
            p = model.p if isinstance(model, Depolarizing) else model.p_xx
            rows.append([code.name, c["model"], int(c["rounds"]), p, float(c["r_heating"]),
                         float(c["r_d"]), res.p_logical, res.stderr, res.trials, res.method,
                         int(c["seed"]), digest])
    return rows


def cmd_simulate(cfg):
    if not cfg["p"]:
        raise ConfigError("empty sweep: no error rates given")
    digest = digest_of(cfg, "simulate")
    rows = _simulate_points(cfg, [{"p": p} for p in cfg["p"]], digest)
    write_atomic(cfg.get("output"), _csv(SIM_HEADER, rows))
    return 0


def cmd_sweep(cfg):
    param = cfg["param"]
    if param not in ("p", "rounds", "r_heating", "r_d"):
        raise ConfigError(f"cannot sweep {param!r}")
    values = cfg["values"]
    if values is None:
        n = int(cfg["points"])
        lo, hi = float(cfg["start"]), float(cfg["stop"])
        if n < 1 or lo <= 0 or hi <= 0:
            raise ConfigError("log sweep needs points >= 1 and positive bounds")
        values = list(np.geomspace(lo, hi, n)) if param != "rounds" else \
            list(range(int(lo), int(hi) + 1))
    values = _listify(values)
    if not values:
        raise ConfigError("empty sweep list")
    digest = digest_of(cfg, "sweep")
    pts = []
    for v in values:
        if param == "rounds":
            pts.append({"rounds": int(v)})
        else:
            pts.append({param: [float(v)] if param == "p" else float(v)})
    rows = _simulate_points(cfg, pts, digest)
    write_atomic(cfg.get("output"), _csv(SIM_HEADER, rows))
    return 0


def cmd_pseudothreshold(cfg):
    if cfg["model"] != "depolarizing":
        raise ConfigError("pseudothreshold bisection needs the depolarizing model")
    digest = digest_of(cfg, "pseudothreshold")
    rows = []
    lo, hi = (float(x) for x in cfg["bracket"])
    for name in cfg["code"]:
        code = get_code(name)
        r = montecarlo.pseudothreshold(code, int(cfg["rounds"]), bracket=(lo, hi),
                                       tolerance=float(cfg["tolerance"]),
                                       trials_per_stratum=int(cfg["trials"]),
                                       k_max=int(cfg["k_max"]), seed=int(cfg["seed"]))
        rows.append([code.name, int(cfg["rounds"]), r.p_star, r.low, r.high, int(cfg["seed"]),
                     digest])
    write_atomic(cfg.get("output"), _csv(["code", "rounds", "p_star", "low", "high", "seed",
                                          "digest"], rows))
    return 0


def cmd_crossover(cfg):
    digest = digest_of(cfg, "crossover")
    p = float(cfg["p"][0])
    header = ["rounds", "p", "surface17", "surface17_stderr", "baconshor13",
              "baconshor13_stderr", "seed", "digest"]
    status = 0
    try:
        res = montecarlo.crossover_rounds(p, int(cfg["max_rounds"]), int(cfg["trials"]),
                                          int(cfg["seed"]), cfg["sampler"])
        table, found = res.table, res.rounds
    except montecarlo.NoCrossingError as exc:
        table, found = exc.table, None
        status = 2
    rows = [[r, p, a.p_logical, a.stderr, b.p_logical, b.stderr, int(cfg["seed"]), digest]
            for r, a, b in table]
    write_atomic(cfg.get("output"), _csv(header, rows))
    print(f"crossover: {found if found is not None else 'none'}", file=sys.stderr)
    return status


def cmd_ftcheck(cfg):
    from .decoders import single_fault_failures

    status = 0
    out = io.StringIO()
    for name in cfg["code"]:
        code = get_code(name)
        if code.L != 3:
            raise ConfigError("ftcheck needs a distance-3 code")
        n, fails = single_fault_failures(code, int(cfg["rounds"]), cfg["order"],
                                         int(cfg["seed"]))
        out.write(f"{code.name} order={cfg['order']} runs={n} failures={len(fails)}\n")
        for loc, ch, fault in fails:
            desc = " ".join(f"{'?XZY'[c]}{q}" for q, c in fault)
            out.write(f"  location {loc} {ch} {desc}\n")
        if fails:
            status = 2
    write_atomic(cfg.get("output"), out.getvalue())
    return status


def cmd_times(cfg):
    digest = digest_of(cfg, "times")
    modes = ("serial", "parallel") if cfg["mode"] == "both" else (cfg["mode"],)
    rows = []
    for name in cfg["code"]:
        code = get_code(name)
        arr = _arrangement(cfg, code)
        for mode in modes:
            t = ion_layout.times(code, arr, mode, rounds=max(1, int(cfg["rounds"])))
            s = t.qec_step
            rows.append([code.name, arr.to_text(), mode, t.prep[0], t.prep[1], t.qec[0], t.qec[1],
                         t.measure, t.total[0], t.total[1], s.logic_time, s.shuttle_time,
                         s.meas_time, digest])
    header = ["code", "arrangement", "mode", "prep_min", "prep_max", "qec_min", "qec_max",
              "measure", "total_min", "total_max", "step_logic", "step_shuttle", "step_meas",
              "digest"]
    write_atomic(cfg.get("output"), _csv(header, rows))
    return 0


def cmd_anneal(cfg):
    if len(cfg["code"]) != 1:
        raise ConfigError("anneal takes exactly one code")
    code = get_code(cfg["code"][0])
    obj = str(cfg["objective"]).upper()
    if obj not in ("MA", "MT", "SA"):
        raise ConfigError(f"unknown objective {obj!r}")
    circ = ion_layout.qec_circuit(code)
    res = ion_layout.anneal(circ, code, obj, seed=int(cfg["seed"]), steps=cfg["steps"])
    digest = digest_of(cfg, "anneal")
    out = cfg.get("output")
    text = f"# {code.name} {obj} objective={res.objective!r} seed={cfg['seed']} digest={digest}\n"
    text += res.arrangement.to_text() + "\n"
    write_atomic(out, text)
    trace = _csv(["iteration", "best_objective", "digest"],
                 [[1000 * i, v, digest] for i, v in enumerate(res.history)])
    if out and out != "-":
        write_atomic(out + ".trace.csv", trace)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "pseudothreshold": cmd_pseudothreshold,
    "crossover": cmd_crossover,
    "ftcheck": cmd_ftcheck,
    "times": cmd_times,
    "anneal": cmd_anneal,
}


def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def build_parser():
    ap = argparse.ArgumentParser(prog="bsqec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--output", "-o", help="output path (default stdout)")
        sp.add_argument("--log", help="sidecar log file (timestamps)")
        sp.add_argument("--code", type=lambda s: s.split(","), help="comma-separated code names")
        sp.add_argument("--model", choices=("depolarizing", "iontrap"))
        sp.add_argument("--p", type=_floats, help="comma-separated error rates (p_xx for iontrap)")
        sp.add_argument("--rounds", type=int)
        sp.add_argument("--sampler", choices=("auto", "direct", "importance"))
        sp.add_argument("--trials", type=int)
        sp.add_argument("--k-max", dest="k_max", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--r-heating", dest="r_heating", type=float)
        sp.add_argument("--r-d", dest="r_d", type=float)
        sp.add_argument("--heating-factor", dest="heating_factor", type=float)
        sp.add_argument("--arrangement", help="SA, MA, MT or a label list")
        sp.add_argument("--mode", choices=("serial", "parallel", "both"))
        sp.add_argument("--order", choices=("gauge", "naive"))
        sp.add_argument("--objective", choices=("MA", "MT", "SA"))
        sp.add_argument("--steps", type=int)
        sp.add_argument("--bracket", type=_floats)
        sp.add_argument("--tolerance", type=float)
        sp.add_argument("--max-rounds", dest="max_rounds", type=int)
        sp.add_argument("--param", choices=("p", "rounds", "r_heating", "r_d"))
        sp.add_argument("--start", type=float)
        sp.add_argument("--stop", type=float)
        sp.add_argument("--points", type=int)
        sp.add_argument("--values", type=_floats)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.log:
        logging.basicConfig(filename=args.log, level=logging.INFO,
                            format="%(asctime)s %(levelname)s %(message)s")
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "log")}
    try:
        cfg = load_config(args.config, overrides)
        log.info("start %s", args.command)
        status = COMMANDS[args.command](cfg)
        log.info("done %s status=%d", args.command, status)
        return status
    except (ConfigError, ValueError, TypeError, KeyError) as exc:
        print(f"bsqec {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
