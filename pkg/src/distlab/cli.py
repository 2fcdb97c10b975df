"""Command line experiment runner.

Every run writes tabular results as CSV and one ``summary.json`` per run into
``--out``.  Data files are byte-identical for identical configuration and seed;
only the timing field of the summary varies.  Exit status is 0 on success, 2 on
usage errors and 3 when an invariant checked during the run fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__, _mc
from . import deconvolve, discern, gaussian, kraft, measures, partition, poisson
from .errors import NoSeparation

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    out: Path
    seed: int = 0
    replicas: int = 10000
    threads: int = 1
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replicas < 1:
            raise UsageError("replicas must be >= 1")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        for name, path in self.inputs.items():
            if path is None or str(path).startswith("bundled:"):
                continue
            if not Path(path).exists():
                raise UsageError(f"--{name}: file not found: {path}")


# -- formatting -------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o)!r}")


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _float_list(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _load_json(path):
    text = str(path)
    try:
        if text.startswith("bundled:"):
            name = text.split(":", 1)[1]
            raw = resources.files("distlab").joinpath("data", f"{name}.json").read_text()
        else:
            raw = Path(path).read_text()
    except FileNotFoundError as exc:
        raise UsageError(f"file not found: {path}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _family(path, probability=None):
    try:
        fam = measures.DensityFamily.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{path}: malformed family: {exc}") from exc
    if probability is not None and fam.probability != probability:
        fam = measures.DensityFamily(fam.matrix, probability=probability)
    return fam


# -- subcommands --------------------------------------------------------------------

def _cmd_kraft(cfg):
    p = cfg.params
    f0, f1 = _family(p["families0"]), _family(p["families1"])
    cc = kraft.CertifyConfig(indist_threshold=p["threshold"], tol=p["tol"],
                             max_k=p["max_k"], max_resolution=p["resolution"])
    verdict = kraft.certify(f0, f1, cc)
    pair_tv = min(measures.total_variation(a, b) for a in f0 for b in f1)
    inv = {
        "hull_below_pairwise_tv": verdict.hull.value <= pair_tv + 1e-9,
        "certificate_consistent": (verdict.kind is not kraft.VerdictKind.INDISTINGUISHABLE
                                   or verdict.hull.value <= cc.indist_threshold),
    }
    out = verdict.to_json()
    out["kraft_lower_bound"] = max(0.0, 1.0 - verdict.hull.value)
    return {"verdict.json": _json(out)}, {"kind": verdict.kind.value, "value": verdict.hull.value}, inv


def _partition_spec(f0, f1, p):
    sep = partition.find_separating_sets(f0, f1, p["max_k"], p["resolution"])
    spec = partition.build_test_from_families(f0, f1, sep.sets)
    if p.get("delta") is not None:
        spec = partition.PartitionTestSpec(spec.sets, spec.centers, p["delta"], spec.probability)
    return spec


def _report_checks(report, spec, hoeffding=True):
    inv = {
        "estimates_in_unit_interval": bool(np.all((report.alpha_hat >= 0) & (report.alpha_hat <= 1)
                                                  & (report.beta_hat >= 0) & (report.beta_hat <= 1))),
    }
    if hoeffding:
        env = [partition.hoeffding_envelope(n, spec.delta, spec.k) for n in report.n_values]
        inv["hoeffding_envelope"] = bool(np.all(report.alpha_hat <= np.array(env) + 4 * report.stderr_alpha))
    return inv


def _cmd_partition(cfg):
    p = cfg.params
    f0, f1 = _family(p["families0"]), _family(p["families1"])
    spec = _partition_spec(f0, f1, p)
    report = partition.estimate_errors(spec, f0, f1, p["n"], cfg.replicas, cfg.seed)
    csv_text = _csv(["n", "alpha_hat", "beta_hat", "stderr_a", "stderr_b"], report.rows())
    summary = report.summary()
    summary["test"] = spec.to_json()
    return {"errors.csv": csv_text}, summary, _report_checks(report, spec)


def _gaussian_fixture(p, dim):
    if p.get("families"):
        obj = _load_json(p["families"])
        f0 = [gaussian.SignalVector(x) for x in obj["F0"]]
        f1 = [gaussian.SignalVector(x) for x in obj["F1"]]
        gamma = obj.get("gamma")
    else:
        f0 = [gaussian.SignalVector(np.zeros(dim))]
        f1 = [gaussian.SignalVector.basis(0, dim), gaussian.SignalVector.basis(1, dim)]
        gamma = None
    return f0, f1, gamma


def _gaussian_model(p, dim):
    kind = p["model"]
    if kind == "white":
        return gaussian.SequenceModel.white(1.0, dim)
    scales = p.get("scales")
    if scales is None or len(scales) != dim:
        raise UsageError(f"--scales needs {dim} values for model {kind}")
    if kind == "hetero":
        return gaussian.SequenceModel.heteroscedastic(1.0, scales, min(scales), max(scales))
    r = p.get("r_diag") or [1.0] * dim
    return gaussian.SequenceModel.ill_posed(1.0, scales, r)


def _cmd_gaussian(cfg):
    p = cfg.params
    dim = len(p["scales"]) if p.get("scales") else 8
    f0, f1, gamma = _gaussian_fixture(p, dim)
    dim = f0[0].dim
    model = _gaussian_model(p, dim)
    if gamma is None:
        gamma, _ = gaussian.greedy_gamma(f0, f1, max_dims=dim, scales=model.scales)
    spec = gaussian.build_projection_test(f0, f1, gamma, model.scales)
    rows = []
    for t, eps in enumerate(p["epsilon_grid"]):
        a, b, sa, sb = gaussian.projection_errors(spec, f0, f1, model.with_epsilon(eps),
                                                  cfg.replicas, cfg.seed, (t,))
        rows.append((eps, a, b, sa, sb))
    # both errors need eps * |xi_Gamma| > rho: centers sit on F0 and the cross gap is 2 * rho
    env = [stats.chi2.sf((spec.rho / r[0]) ** 2, len(spec.gamma_dims)) for r in rows]
    inv = {
        "alpha_below_chi_envelope": all(r[1] <= e + 4 * r[3] for r, e in zip(rows, env)),
        "beta_below_chi_envelope": all(r[2] <= e + 4 * r[4] for r, e in zip(rows, env)),
    }
    text = _csv(["epsilon", "alpha_hat", "beta_hat", "stderr_a", "stderr_b"], rows)
    summary = {"gamma_dims": list(spec.gamma_dims), "rho": spec.rho, "model": p["model"]}
    return {"errors.csv": text}, summary, inv


def _intensity(freq, n_cells):
    return (measures.uniform(n_cells) if freq == 0 else poisson.sine_intensity(freq, n_cells))


def _cmd_poisson(cfg):
    p = cfg.params
    action = p["action"]
    if action == "identity":
        n_cells, n = p["n_cells"], p["n"][0]
        pairs = [(1, 1), (1, 2), (0, 0)]
        if p.get("pair"):
            pairs = [tuple(p["pair"])]
        rows, inv_ok = [], True
        for t, (j1, j2) in enumerate(pairs):
            l1, l2 = _intensity(j1, n_cells), _intensity(j2, n_cells)
            rhs = poisson.moment_identity_rhs(l1, l2, n)
            est, se = poisson.mc_moment_identity(l1, l2, n, cfg.replicas, cfg.seed + t)
            inv_ok &= abs(est - rhs) <= 4 * se + 1e-12
            rows.append((j1, j2, rhs, est, se))
        return ({"identity.csv": _csv(["freq1", "freq2", "rhs", "mc", "stderr"], rows)},
                {"n": n, "n_cells": n_cells}, {"moment_identity_bracketed": bool(inv_ok)})
    if action == "tailbound":
        rows, ok = [], True
        for mu in p["mu_grid"]:
            for d in p["delta_grid"]:
                for n in p["n"]:
                    bound = poisson.poisson_tail_bound(mu, d, n)
                    freq, se = poisson.mc_tail_frequency(mu, d, n, cfg.replicas, cfg.seed)
                    ok &= freq <= bound
                    rows.append((mu, d, n, bound, freq, se))
        return ({"tail.csv": _csv(["mu", "delta", "n", "bound", "frequency", "stderr"], rows)},
                {}, {"tail_bound_sound": bool(ok)})
    if action == "partition":
        f0 = _family(p["families0"], probability=False)
        f1 = _family(p["families1"], probability=False)
        spec = _partition_spec(f0, f1, p)
        report = poisson.poisson_partition_errors(spec, f0, f1, p["n"], cfg.replicas, cfg.seed)
        summary = report.summary()
        summary["test"] = spec.to_json()
        csv_text = _csv(["n", "alpha_hat", "beta_hat", "stderr_a", "stderr_b"], report.rows())
        return {"errors.csv": csv_text}, summary, _report_checks(report, spec, hoeffding=False)
    if action == "collapse":
        n, n_cells = p["n"][0], p["n_cells"]
        m_values = p["m_values"]
        closed = poisson.bayes_collapse_curve(n, m_values, 0.5)
        rows, ok = [], True
        for t, (m, cf) in enumerate(zip(m_values, closed)):
            ds = poisson.bayes_collapse_double_sum(n, m, n_cells)
            est, se = poisson.mc_bayes_collapse(n, m, cfg.replicas, cfg.seed + t, n_cells)
            ok &= abs(ds - cf) <= 1e-12 and abs(est - cf) <= 4 * se
            rows.append((m, cf, ds, est, se))
        dec = all(b < a for a, b in zip(closed, closed[1:])) if sorted(m_values) == list(m_values) else True
        return ({"collapse.csv": _csv(["m", "closed_form", "double_sum", "mc", "stderr"], rows)},
                {"n": n}, {"collapse_matches": bool(ok), "collapse_decreasing": bool(dec)})
    raise UsageError(f"unknown poisson action {action!r}")


def _kernel_arg(text, n_cells):
    if text.endswith(".json") or text.startswith("bundled:"):
        return deconvolve.Kernel(measures.GridMeasure.from_json(_load_json(text)))
    try:
        return deconvolve.parse_kernel(text, n_cells)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_deconv(cfg):
    p = cfg.params
    f0, f1 = _family(p["families0"]), _family(p["families1"])
    kernel = _kernel_arg(p["kernel"], f0.n_cells)
    dc = deconvolve.DeconvConfig(floor=p["floor"], band=p["band"])
    dec = deconvolve.deconv_decision(f0, f1, kernel, dc)
    inv = {"verdicts_agree_when_invertible": (not dec.invertible) or dec.agree}
    return {"decision.json": _json(dec.to_json())}, {"agree": dec.agree}, inv


def _truth_arg(text, f0, f1):
    if text.startswith(("F0:", "F1:")):
        fam = f0 if text.startswith("F0") else f1
        return fam[int(text.split(":", 1)[1])]
    return measures.GridMeasure.from_json(_load_json(text))


def _cmd_discern(cfg):
    p = cfg.params
    f0, f1 = _family(p["families0"]), _family(p["families1"])
    truth = _truth_arg(p["truth"], f0, f1)
    plan = discern.build_plan(f0, f1, p["nmax"], p["c0"], p["exponent"], max_k=p["max_k"],
                              max_resolution=p["resolution"])
    n_stop, cens = discern.stopping_times(truth, f0, f1, p["nmax"], cfg.replicas, cfg.seed, plan=plan)
    st = discern.stopping_time_stats(n_stop, p["t_grid"], censored=cens, min_replicas=1)
    files = {
        "tail.csv": _csv(["C", "tail"], zip(st.c_grid, st.tail)),
        "moments.csv": _csv(["t", "moment", "stderr", "heavy_tail"],
                            zip(st.t_grid, st.moment, st.moment_stderr, st.heavy_tail)),
    }
    summary = {"tail_rate": st.tail_rate, "tail_r2": st.tail_r2, "censored": st.censored,
               "median_N": float(np.median(n_stop)), "notes": st.notes}
    inv = {"N_within_nmax": bool(n_stop.max() <= p["nmax"]),
           "tail_nonincreasing": bool(np.all(np.diff(st.tail) <= 0))}
    return files, summary, inv


def _cmd_example21(cfg):
    p = cfg.params
    n_cells, r = p["n_cells"], p["resolution"]
    u = measures.uniform(n_cells)
    rows, tv_ok = [], True
    for i in range(1, p["max_i"] + 1):
        s = measures.sine_density(i, n_cells)
        tv = measures.total_variation(u, s)
        tv_ok &= abs(tv - 1 / math.pi) <= 1e-3
        rows.append((i, tv, measures.tau_discrepancy(u, s, r), measures.wasserstein1(u, s)))
    m = p["m"]
    f0 = measures.DensityFamily([u])
    f1 = measures.sine_family(range(1, m + 1), n_cells)
    verdict = kraft.certify(f0, f1, kraft.CertifyConfig(indist_threshold=p["threshold"], max_iter=200))
    files = {
        "dichotomy.csv": _csv(["i", "total_variation", "tau_discrepancy", "wasserstein1"], rows),
        "verdict.json": _json(verdict.to_json()),
        "h0.json": _json(f0.to_json()),
        "h1.json": _json(f1.to_json()),
    }
    summary = {"m": m, "kind": verdict.kind.value, "hull_value": verdict.hull.value,
               "l2_bound": (2 * m) ** -0.5}
    inv = {"tv_near_one_over_pi": bool(tv_ok),
           "hull_below_l2_bound": verdict.hull.value <= (2 * m) ** -0.5 + 1e-12}
    return files, summary, inv


def _cmd_acceptance(cfg):
    from . import acceptance

    results = acceptance.run_all(seed=cfg.seed, only=cfg.params.get("only"))
    lines = [r.line() for r in results]
    for line in lines:
        print(line)
    rows = [(r.number, int(r.passed)) for r in results]
    inv = {f"criterion_{r.number:02d}": r.passed for r in results}
    details = {f"criterion_{r.number:02d}": r.details for r in results}
    return {"acceptance.csv": _csv(["criterion", "passed"], rows)}, {"details": details}, inv


COMMANDS = {
    "kraft": _cmd_kraft,
    "partition": _cmd_partition,
    "gaussian": _cmd_gaussian,
    "poisson": _cmd_poisson,
    "deconv": _cmd_deconv,
    "discern": _cmd_discern,
    "example21": _cmd_example21,
    "acceptance": _cmd_acceptance,
}


def run(config: ExperimentConfig) -> int:
    """Execute one experiment and write its artifacts; returns the exit status."""
    _mc.set_threads(config.threads)
    start = time.perf_counter()
    files, summary, invariants = COMMANDS[config.command](config)
    elapsed = time.perf_counter() - start
    config.out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (config.out / name).write_text(text)
    invariants = {k: bool(v) for k, v in invariants.items()}
    full = {
        "command": config.command,
        "config": {k: v for k, v in config.params.items() if k != "config"},
        "seed": config.seed,
        "replicas": config.replicas,
        "threads": config.threads,
        "version": __version__,
        "results": summary,
        "invariants": invariants,
        "wall_clock_seconds": elapsed,
    }
    (config.out / "summary.json").write_text(_json(full))
    failed = [k for k, ok in invariants.items() if not ok]
    if failed:
        print(f"invariant check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                      help="base seed (default: $DISTLAB_SEED or 0)")
    glob.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="output directory")
    glob.add_argument("--replicas", type=_positive_int, default=argparse.SUPPRESS)
    glob.add_argument("--threads", type=_positive_int, default=argparse.SUPPRESS)
    glob.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                      help="JSON file with option values (command-line flags win)")

    parser = argparse.ArgumentParser(prog="distlab", parents=[glob],
                                     description="Distinguishability experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def fam(sp, required=True):
        sp.add_argument("--families0", required=required)
        sp.add_argument("--families1", required=required)

    sp = sub.add_parser("kraft", parents=[glob], help="hull TV and Kraft certificate")
    fam(sp)
    sp.add_argument("--threshold", type=float, default=0.05)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--resolution", type=int, default=None)

    sp = sub.add_parser("partition", parents=[glob], help="partition test error rates")
    fam(sp)
    sp.add_argument("--n", type=_int_list, default=[50, 100, 200, 400, 800])
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--resolution", type=int, default=None)

    sp = sub.add_parser("gaussian", parents=[glob], help="projection tests in sequence models")
    sp.add_argument("--model", choices=["white", "hetero", "illposed"], default="white")
    sp.add_argument("--scales", type=_float_list, default=None,
                    help="hetero: noise levels h_j; illposed: diagonal of A")
    sp.add_argument("--r-diag", type=_float_list, default=None, help="illposed: diagonal of R")
    sp.add_argument("--epsilon-grid", type=_float_list, default=[1, 0.5, 0.25, 0.1, 0.05])
    sp.add_argument("--families", default=None, help='JSON {"F0": [[...]], "F1": [[...]], "gamma": [...]}')

    sp = sub.add_parser("poisson", parents=[glob], help="Poisson process identities and tests")
    sp.add_argument("action", choices=["identity", "tailbound", "partition", "collapse"])
    fam(sp, required=False)
    sp.add_argument("--n", type=_int_list, default=[1])
    sp.add_argument("--n-cells", type=int, default=256)
    sp.add_argument("--pair", type=_int_list, default=None, help="frequencies j1,j2 (0 = constant 1)")
    sp.add_argument("--mu-grid", type=_float_list, default=[0.5, 1.0, 2.0])
    sp.add_argument("--delta-grid", type=_float_list, default=[0.25, 0.5, 1.0])
    sp.add_argument("--m-values", type=_int_list, default=[10, 100])
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--resolution", type=int, default=None)

    sp = sub.add_parser("deconv", parents=[glob], help="distinguishability before/after convolution")
    fam(sp)
    sp.add_argument("--kernel", default="gauss:0.1", help="point | uniform | gauss:SIGMA | kernel.json")
    sp.add_argument("--band", type=int, default=None)
    sp.add_argument("--floor", type=float, default=deconvolve.DEFAULT_FLOOR)

    sp = sub.add_parser("discern", parents=[glob], help="stopping times of test sequences")
    fam(sp)
    sp.add_argument("--truth", required=True, help="F0:i, F1:i, or a GridMeasure JSON file")
    sp.add_argument("--nmax", type=int, default=2000)
    sp.add_argument("--c0", type=float, default=0.2)
    sp.add_argument("--exponent", type=float, default=0.25)
    sp.add_argument("--t-grid", type=_float_list, default=[0.01, 0.02, 0.05])
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--resolution", type=int, default=None)

    sp = sub.add_parser("example21", parents=[glob], help="sine-family dichotomy table")
    sp.add_argument("--n-cells", type=int, default=4096)
    sp.add_argument("--max-i", type=int, default=64)
    sp.add_argument("--resolution", type=int, default=3)
    sp.add_argument("--m", type=int, default=64)
    sp.add_argument("--threshold", type=float, default=0.05)

    sp = sub.add_parser("acceptance", parents=[glob], help="run the acceptance suite")
    sp.add_argument("--only", type=_int_list, default=None, help="criterion numbers to run")
    return parser


GLOBAL_KEYS = ("seed", "out", "replicas", "threads", "config")
INPUT_KEYS = ("families0", "families1", "families", "truth", "kernel")


def _apply_config_file(parser, argv, args):
    cfg_obj = _load_json(args.config)
    if not isinstance(cfg_obj, dict):
        raise UsageError(f"{args.config}: top-level JSON value must be an object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(cfg_obj) - known)
    if unknown:
        raise UsageError(f"{args.config}: unknown option(s): {', '.join(unknown)}")
    converted = {}
    for a in sub._actions:
        if a.dest in cfg_obj:
            v = cfg_obj[a.dest]
            if a.type is not None and isinstance(v, str):
                v = a.type(v)
            converted[a.dest] = v
    sub.set_defaults(**converted)
    return parser.parse_args(argv)


def config_from_args(parser, argv) -> ExperimentConfig:
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is not None:
        args = _apply_config_file(parser, argv, args)
    ns = vars(args)
    seed = ns.get("seed")
    if seed is None:
        env = os.environ.get("DISTLAB_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError as exc:
            raise UsageError(f"DISTLAB_SEED must be an integer, got {env!r}") from exc
    params = {k: v for k, v in ns.items() if k not in GLOBAL_KEYS and k != "command"}
    inputs = {k: ns.get(k) for k in INPUT_KEYS if ns.get(k) and k != "kernel"
              and not (k == "truth" and str(ns.get(k)).startswith(("F0:", "F1:")))}
    if ns["command"] == "deconv" and str(ns["kernel"]).endswith(".json"):
        inputs["kernel"] = ns["kernel"]
    if ns["command"] == "poisson" and ns["action"] == "partition":
        if not (ns.get("families0") and ns.get("families1")):
            raise UsageError("poisson partition needs --families0 and --families1")
    return ExperimentConfig(
        command=ns["command"], params=params,
        out=Path(ns.get("out") or "distlab-out"), seed=int(seed),
        replicas=int(ns.get("replicas") or 10000), threads=int(ns.get("threads") or 1),
        inputs=inputs)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        config = config_from_args(parser, argv)
        return run(config)
    except UsageError as exc:
        print(f"distlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSeparation as exc:
        print(f"distlab: error: no separation: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
