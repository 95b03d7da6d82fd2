"""Command-line front end.

Subcommands
-----------
delta    covering error and its bounds over a range of M
sample   sample-complexity sandwich over several eps
verify   randomized property suites
renyi    one divergence between two states
info     one information quantity of a bipartite state
apps     protocol error bound from a bundle file

Exit codes: 0 success, 1 property failure (or unconverged solver under
``--strict``), 2 bad input, 3 dimension budget exceeded. Every flag of the
shared group can also be set through an environment variable named
``CONVEXSPLIT_<FLAG>``, e.g. ``CONVEXSPLIT_MAX_DIM=2048``; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from . import applications as apps
from . import convex_split as cs
from . import divergences as dv
from . import information as info
from . import verify as vf
from .io import (
    InstanceError,
    csv_text,
    load_bundle,
    load_convex_split,
    load_operator,
    manifest,
    to_jsonable,
    write_json,
)

ENV_PREFIX = "CONVEXSPLIT_"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

DELTA_COLUMNS = ["M", "delta_exact", "exponent_bound", "sc_bound", "converse_bound"]
DELTA_LONG_COLUMNS = ["instance_id", "M", "delta_exact", "bound", "value", "argmax_name", "argmax", "valid"]
SAMPLE_COLUMNS = ["eps", "sc_exact", "log_sc_exact", "upper_bound", "upper_delta_star", "lower_bound",
                  "lower_c_star", "lower_delta_star", "certified"]
VERIFY_COLUMNS = ["suite", "property", "passed", "trials", "worst", "tolerance", "seconds"]
APPS_COLUMNS = ["protocol", "epsilon_bound", "packing", "covering", "uhlmann", "exponent_packing",
                "exponent_covering", "exponent_uhlmann", "positivity_region", "valid"]
LN2 = math.log(2)


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


def parse_grid(text: str) -> np.ndarray:
    """Grid from ``a,b,c`` or ``min:max:points[:linear|log]``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4):
                raise UsageError(f"grid {text!r}: expected min:max:points[:scale]")
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            scale = parts[3] if len(parts) == 4 else "linear"
            if n < 1:
                raise UsageError(f"grid {text!r}: need at least one point")
            if scale in ("linear", "lin"):
                return np.linspace(lo, hi, n)
            if scale == "log":
                if lo <= 0 or hi <= 0:
                    raise UsageError(f"grid {text!r}: log scale needs positive ends")
                return np.geomspace(lo, hi, n)
            raise UsageError(f"grid {text!r}: scale must be linear or log")
        vals = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"grid {text!r}: {exc}") from exc
    if not len(vals):
        raise UsageError("grid is empty")
    return vals


def parse_int_range(text: str) -> list[int]:
    """``1:8`` (inclusive) or ``1,2,4``."""
    try:
        if ":" in text:
            lo, hi = (int(v) for v in text.split(":"))
            out = list(range(lo, hi + 1))
        else:
            out = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"integer range {text!r}: {exc}") from exc
    if not out or min(out) < 1:
        raise UsageError(f"integer range {text!r} must be nonempty and positive")
    return out


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _env_flag(name: str) -> bool:
    return str(_env(name, "")).lower() in ("1", "true", "yes", "on")


def _shared_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options (also CONVEXSPLIT_<FLAG>)")
    g.add_argument("--bits", action="store_true", default=_env_flag("bits"),
                   help="report information quantities in bits instead of nats")
    g.add_argument("--gamma", type=float, default=_env("gamma"),
                   help="evaluate delta through the weighted-norm form with this gamma")
    g.add_argument("--alpha-grid", default=_env("alpha_grid"), help="alpha grid, list or min:max:n[:log]")
    g.add_argument("--c-grid", default=_env("c_grid"), help="c grid for converse and lower bounds")
    g.add_argument("--delta-grid", default=_env("delta_grid"), help="delta grid for the sample upper bound")
    g.add_argument("--max-dim", type=int, default=int(_env("max_dim", cs.MAX_TOTAL_DIM)),
                   help="dense dimension budget (default %(default)s)")
    g.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    g.add_argument("--strict", action="store_true", default=_env_flag("strict"),
                   help="exit 1 when a solver did not converge")
    g.add_argument("--format", choices=("csv", "json"), default=_env("format", "csv"))
    g.add_argument("-o", "--output", default=_env("output"), help="write here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _shared_parser()
    p = argparse.ArgumentParser(prog="convexsplit", description="Convex-split covering errors and bounds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("delta", parents=[shared], help="covering error and bounds over M")
    d.add_argument("instance", help="convex-split instance JSON (or bundled:<name>)")
    d.add_argument("--M", dest="M", default="1:8", help="M values, 1:8 or 1,2,4 (default %(default)s)")
    d.add_argument("--layout", choices=("wide", "long"), default="wide")

    s = sub.add_parser("sample", parents=[shared], help="sample-complexity sandwich")
    s.add_argument("instance")
    s.add_argument("--eps", default="0.2,0.4")
    s.add_argument("--M-max", dest="M_max", type=int, default=12)

    v = sub.add_parser("verify", parents=[shared], help="run property suites")
    v.add_argument("suite", choices=vf.SUITE_NAMES)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dump-dir", default=".", help="directory for counterexample files")

    r = sub.add_parser("renyi", parents=[shared], help="divergence between two states")
    r.add_argument("rho")
    r.add_argument("sigma")
    r.add_argument("--kind", default="sandwiched",
                   choices=("sandwiched", "petz", "relative", "variance", "hypothesis", "spectrum"))
    r.add_argument("--alpha", type=float, default=2.0)
    r.add_argument("--eps", type=float, default=0.1)

    i = sub.add_parser("info", parents=[shared], help="information quantity of a bipartite state")
    i.add_argument("state")
    i.add_argument("--tau", help="reference state on A (default: the A-marginal)")
    i.add_argument("--kind", default="sandwiched",
                   choices=("mutual", "petz", "sandwiched", "doubly-minimized", "hypothesis"))
    i.add_argument("--doubly-minimized", action="store_true", help="shorthand for --kind doubly-minimized")
    i.add_argument("--alpha", type=float, default=2.0)
    i.add_argument("--eps", type=float, default=0.1)

    a = sub.add_parser("apps", parents=[shared], help="protocol bound from a bundle")
    a.add_argument("bundle", help="protocol bundle JSON (or bundled:<name>)")
    a.add_argument("--rate", action="append", default=[], metavar="NAME=VALUE",
                   help="override a rate in the bundle, e.g. --rate logM=0.3")
    a.add_argument("--pairing", choices=("proof", "statement"), default="proof")
    return p


# helpers ---------------------------------------------------------------


def resolve_path(name: str) -> Path:
    """``bundled:<name>`` refers to a file shipped in the package data."""
    if name.startswith("bundled:"):
        ref = resources.files("convexsplit") / "data" / (name.split(":", 1)[1] + ".json")
        return Path(str(ref))
    return Path(name)


def _grid(text, default):
    return default if text is None else parse_grid(text)


def _scale(args) -> float:
    return 1 / LN2 if args.bits else 1.0


def _emit(args, command: str, text: str, inputs: Sequence, started: float, rows: int) -> None:
    if args.output:
        out = Path(args.output)
        out.write_text(text)
        meta = manifest(command, {k: v for k, v in vars(args).items() if k != "func"}, args.seed, inputs,
                        started, rows, [out])
        write_json(str(out) + ".manifest.json", meta)
    else:
        sys.stdout.write(text)


def _render(args, columns, rows, record=None) -> str:
    if args.format == "json":
        return json.dumps(to_jsonable(record if record is not None else rows), indent=2, sort_keys=True) + "\n"
    return csv_text(columns, rows)


# commands --------------------------------------------------------------


def cmd_delta(args) -> int:
    started = time.time()
    path = resolve_path(args.instance)
    data = load_convex_split(path)
    Ms = parse_int_range(args.M)
    base = cs.ConvexSplitInstance(data["rho_AB"], data["tau_A"], 1, args.max_dim)
    for M in Ms:
        base.at(M).check_budget()
    alphas = _grid(args.alpha_grid, cs.ALPHA_EXPONENT)
    c_grid = _grid(args.c_grid, cs.C_GRID)
    curve = info.sandwiched_renyi_information_curve(base.rho_AB, base.tau_A, alphas, base.dims)
    ref = np.kron(base.tau_A, base.rho_B)
    petz = [dv.petz_renyi(base.rho_AB, ref, 2 - 1 / a) for a in cs.ALPHA_STRONG]
    rows, long_rows, valid = [], [], True
    for M in Ms:
        inst = base.at(M)
        if args.gamma is not None:
            delta = cs.covering_error_via_theta(inst, inst.rho_B, args.gamma)
        else:
            delta = cs.covering_error_exact(inst)
        up = cs.exponent_upper_bound(inst, alphas, info=curve)
        sc = cs.strong_converse_lower_bound(inst, cs.ALPHA_STRONG, petz=petz)
        lo = cs.oneshot_converse_lower_bound(inst, c_grid)
        valid &= up.valid
        rows.append({"M": M, "delta_exact": delta, "exponent_bound": up.value, "sc_bound": sc.value,
                     "converse_bound": lo.value})
        for rep, key in ((up, "alpha_star"), (sc, "alpha_star"), (lo, "c_star")):
            long_rows.append({"instance_id": data["name"], "M": M, "delta_exact": delta, "bound": rep.name,
                              "value": rep.value, "argmax_name": key, "argmax": rep.params[key],
                              "valid": rep.valid})
    if args.layout == "long":
        text = _render(args, DELTA_LONG_COLUMNS, long_rows)
    else:
        text = _render(args, DELTA_COLUMNS, rows)
    _emit(args, "delta", text, [path], started, len(rows))
    return EXIT_FAIL if args.strict and not valid else EXIT_OK


def cmd_sample(args) -> int:
    started = time.time()
    path = resolve_path(args.instance)
    data = load_convex_split(path)
    base = cs.ConvexSplitInstance(data["rho_AB"], data["tau_A"], 1, args.max_dim)
    base.check_budget()
    c_grid = _grid(args.c_grid, cs.C_GRID)
    k = _scale(args)
    rows = []
    for eps in parse_grid(args.eps):
        if not 0 < eps < 1:
            raise UsageError("eps values must lie in (0, 1)")
        dgrid = None if args.delta_grid is None else parse_grid(args.delta_grid)
        up, lo = cs.sample_complexity_bounds(base.rho_AB, base.tau_A, float(eps), dgrid, c_grid)
        m = cs.sample_complexity_exact(base.rho_AB, base.tau_A, float(eps), args.M_max, args.max_dim)
        rows.append({"eps": float(eps), "sc_exact": m, "log_sc_exact": None if m is None else k * math.log(m),
                     "upper_bound": k * up.value, "upper_delta_star": up.params.get("delta_star"),
                     "lower_bound": k * lo.value, "lower_c_star": lo.params.get("c_star"),
                     "lower_delta_star": lo.params.get("delta_star"),
                     "certified": up.params.get("certified")})
    _emit(args, "sample", _render(args, SAMPLE_COLUMNS, rows), [path], started, len(rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    started = time.time()
    results = vf.run_suite(args.suite, args.trials, args.seed)
    rows = [r.row() for r in results]
    failed = [r for r in results if not r.passed]
    width = max(len(r.name) for r in results)
    table = [f"{'suite':<13} {'property':<{width}}  result  worst / tolerance"]
    for r in results:
        table.append(f"{r.suite:<13} {r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}    "
                     f"{r.worst:.3g} / {r.tolerance:.3g}")
    table.append(f"{len(results) - len(failed)}/{len(results)} properties passed")
    print("\n".join(table), file=sys.stderr)
    dumps = []
    for r in failed:
        dump = Path(args.dump_dir) / f"counterexample_{r.suite}_{r.name}.json"
        write_json(dump, {"suite": r.suite, "property": r.name, "seed": args.seed, "trials": r.trials,
                          "worst": to_jsonable(r.worst), "tolerance": r.tolerance, "instance": r.counterexample})
        dumps.append(str(dump))
        print(f"counterexample written to {dump}", file=sys.stderr)
    record = {"suite": args.suite, "seed": args.seed, "trials": args.trials, "passed": not failed,
              "results": rows, "counterexamples": dumps}
    _emit(args, "verify", _render(args, VERIFY_COLUMNS, rows, record), [], started, len(rows))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_renyi(args) -> int:
    started = time.time()
    prho, psig = resolve_path(args.rho), resolve_path(args.sigma)
    rho, _ = load_operator(prho, "density")
    sigma, _ = load_operator(psig, "density")
    if rho.shape != sigma.shape:
        raise UsageError("rho and sigma have different dimensions")
    kind = args.kind
    if kind == "sandwiched":
        value = dv.sandwiched_renyi(rho, sigma, args.alpha)
    elif kind == "petz":
        value = dv.petz_renyi(rho, sigma, args.alpha)
    elif kind == "relative":
        value = dv.relative_entropy(rho, sigma)
    elif kind == "variance":
        value = dv.relative_entropy_variance(rho, sigma)
    elif kind == "hypothesis":
        value = dv.hypothesis_testing_divergence(rho, sigma, args.eps)
    else:
        value = dv.info_spectrum_divergence(rho, sigma, args.eps)
    k = _scale(args) ** (2 if kind == "variance" else 1)
    record = {"kind": kind, "value": k * value, "units": "bits" if args.bits else "nats"}
    if kind in ("sandwiched", "petz"):
        record["alpha"] = args.alpha
    if kind in ("hypothesis", "spectrum"):
        record["eps"] = args.eps
    _emit(args, "renyi", _render(args, list(record), [record], record), [prho, psig], started, 1)
    return EXIT_OK


def cmd_info(args) -> int:
    started = time.time()
    path = resolve_path(args.state)
    rho, dims = load_operator(path, "density")
    if len(dims) != 2:
        raise UsageError("the state must declare dims [dA, dB]")
    inputs = [path]
    tau = None
    if args.tau:
        tpath = resolve_path(args.tau)
        tau, _ = load_operator(tpath, "density")
        inputs.append(tpath)
    rho_A = info.marginals(rho, dims)[0]
    tau = rho_A if tau is None else tau
    kind = "doubly-minimized" if args.doubly_minimized else args.kind
    k = _scale(args)
    record = {"kind": kind, "dims": list(dims), "units": "bits" if args.bits else "nats"}
    converged = True
    if kind == "mutual":
        record["value"] = k * info.generalized_mutual_information(rho, tau, dims)
    elif kind == "petz":
        record["alpha"] = args.alpha
        record["value"] = k * dv.petz_renyi(rho, np.kron(tau, info.marginals(rho, dims)[1]), args.alpha)
    elif kind in ("sandwiched", "doubly-minimized"):
        record["alpha"] = args.alpha
        if kind == "sandwiched":
            res = info.sandwiched_renyi_information(rho, tau, args.alpha, dims)
        else:
            res = info.doubly_minimized_info(rho, args.alpha, dims)
            record["tau_star"] = res.tau_star
        converged = res.converged
        record.update(value=k * res.value, residual=res.residual, iterations=res.iterations,
                      converged=res.converged, perturbation=res.perturbation, sigma_star=res.sigma_star)
    else:
        h = info.hypothesis_testing_information(rho, tau, args.eps, dims)
        record.update(eps=args.eps, value=k * h.value, mode="certified" if h.certified else "upper_bound",
                      sigma_star=h.sigma)
    scalar = {key: v for key, v in record.items() if not isinstance(v, np.ndarray)}
    _emit(args, "info", _render(args, list(scalar), [scalar], record), inputs, started, 1)
    return EXIT_FAIL if args.strict and not converged else EXIT_OK


def _rates(bundle, overrides) -> dict:
    rates = dict(bundle["rates"])
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"--rate expects NAME=VALUE, got {item!r}")
        name, val = item.split("=", 1)
        try:
            rates[name] = float(val)
        except ValueError as exc:
            raise UsageError(f"--rate {item!r}: {exc}") from exc
    return rates


def run_bundle(bundle: dict, rates: dict, alphas=None, pairing: str = "proof"):
    """Evaluate a protocol bundle; returns a ProtocolBound or BoundReport."""
    proto, st = bundle["protocol"], bundle["states"]
    ae = cs.ALPHA_EXPONENT if alphas is None else alphas
    try:
        if proto in ("wiretap", "secret_key"):
            fn = apps.wiretap_bound if proto == "wiretap" else apps.secret_key_bound
            return fn(st["rho_XBE"], rates["logM"], rates.get("logK"), alphas_covering=ae)
        if proto == "meas_compression":
            theta = st.get("theta") or apps.measurement_state(st["rho_A"][0], st["povm"], st["p_x_given_u"])
            return apps.measurement_compression_bound(theta, rates["logM"], rates["logL"], ae, pairing)
        if proto == "msg_compression":
            psi, dims = st["psi_CRB"]
            dims = (dims[0], int(np.prod(dims[1:])))
            return apps.msg_compression_exponent(psi, dims, rates["r"], int(rates.get("n", 1)), ae)
        if proto == "state_info":
            theta, dims = st["theta_ARS"]
            kraus = (bundle.get("channel") or {}).get("kraus")
            if not kraus:
                raise InstanceError("state_info bundle needs channel.kraus")
            return apps.state_info_coding_bound(theta, dims, kraus, st["vartheta_S"][0], rates["logM"],
                                                rates.get("logK"), alphas_covering=ae)
    except KeyError as exc:
        raise InstanceError(f"bundle is missing {exc}") from exc
    raise InstanceError(f"unknown protocol {proto!r}")


def cmd_apps(args) -> int:
    started = time.time()
    path = resolve_path(args.bundle)
    bundle = load_bundle(path)
    rates = _rates(bundle, args.rate)
    alphas = None if args.alpha_grid is None else parse_grid(args.alpha_grid)
    res = run_bundle(bundle, rates, alphas, args.pairing)
    k = _scale(args)
    if isinstance(res, apps.ProtocolBound):
        record = {"protocol": res.protocol, "epsilon_bound": res.epsilon_bound, "components": res.components,
                  "exponents": {n: k * e for n, e in res.exponents.items()},
                  "positivity_region": res.positivity_region, "params": res.params, "valid": res.valid,
                  "notes": res.notes, "rates": rates, "units": "bits" if args.bits else "nats"}
        row = {"protocol": res.protocol, "epsilon_bound": res.epsilon_bound,
               **{c: res.components.get(c) for c in ("packing", "covering", "uhlmann")},
               **{f"exponent_{c}": (None if c not in res.exponents else k * res.exponents[c])
                  for c in ("packing", "covering", "uhlmann")},
               "positivity_region": res.positivity_region, "valid": res.valid}
    else:
        record = {"protocol": bundle["protocol"], "epsilon_bound": res.value, "components": {},
                  "exponents": {"exponent": k * res.params["exponent"]}, "params": res.params,
                  "valid": res.valid, "notes": res.notes, "rates": rates, "units": "bits" if args.bits else "nats"}
        row = {"protocol": bundle["protocol"], "epsilon_bound": res.value,
               "exponent_covering": k * res.params["exponent"], "valid": res.valid}
    _emit(args, "apps", _render(args, APPS_COLUMNS, [row], record), [path], started, 1)
    return EXIT_FAIL if args.strict and not record["valid"] else EXIT_OK


COMMANDS = {"delta": cmd_delta, "sample": cmd_sample, "verify": cmd_verify, "renyi": cmd_renyi,
            "info": cmd_info, "apps": cmd_apps}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except cs.DimensionBudgetError as exc:
        print(f"convexsplit: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, InstanceError, ValueError) as exc:
        print(f"convexsplit: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
