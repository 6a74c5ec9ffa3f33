"""Command-line front end for the solver library.

Each subcommand resolves a parameter set (flags, then an optional JSON
config file that overrides them), runs the corresponding solver, and
writes the resulting series as CSV or JSON.  Outputs are deterministic:
identical configurations produce byte-identical files.

Formats
-------
CSV: a comment block of ``# key = value`` lines carrying the schema
version, the command name and the fully resolved parameters, then a
header row and one row per grid point, 17 significant digits, LF line
endings.  JSON: an object ``{schema_version, command, params, series}``
where ``series`` is a list of ``{name, values}`` entries; parsing it
back reproduces every float bit-exactly.

Exit codes
----------
0 success; 2 validation error (the message names the offending key);
3 numerical failure surfaced from quadrature or propagation;
4 unwritable output path.

The environment variable FANO_PDC_THREADS caps the thread counts
advertised to BLAS and OpenMP runtimes.  The solvers themselves are
sequential, so this matters only for linear-algebra libraries loaded
by child processes or late imports.
"""

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import biphoton
from . import continuum
from . import coupled
from . import discrete
from . import multiphoton
from . import params as params_mod
from . import tpg
from .krylov import PropagationError
from .quadrature import QuadratureError

SCHEMA_VERSION = "1"

_THREAD_ENV_TARGETS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


class CliError(Exception):
    """Carries the exit code alongside the message."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: command, parameter map, output destination."""

    command: str
    params: dict
    out: str
    fmt: str


def _require(cond, key, why):
    if not cond:
        raise CliError(2, "%s: %s" % (key, why))


def _apply_thread_cap():
    raw = os.environ.get("FANO_PDC_THREADS")
    if raw is None:
        return
    try:
        n = int(raw)
    except ValueError:
        n = -1
    if n < 1:
        raise CliError(2, "FANO_PDC_THREADS: must be a positive integer, "
                          "got %r" % raw)
    for var in _THREAD_ENV_TARGETS:
        os.environ[var] = str(n)


# ---------------------------------------------------------------------------
# output writers


def _fmt(x):
    return "%.17g" % x


def _write_csv(fh, command, block, series):
    fh.write("# schema_version = %s\n" % json.dumps(SCHEMA_VERSION))
    fh.write("# command = %s\n" % json.dumps(command))
    for key in sorted(block):
        fh.write("# %s = %s\n" % (key, json.dumps(block[key])))
    fh.write(",".join(name for name, _ in series) + "\n")
    length = len(series[0][1])
    for name, vals in series:
        if len(vals) != length:
            raise RuntimeError("unequal series lengths in CSV output")
    for i in range(length):
        fh.write(",".join(_fmt(vals[i]) for _, vals in series) + "\n")


def _write_json(fh, command, block, series, extra):
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    if extra:
        doc.update(extra)
    doc["params"] = {k: block[k] for k in sorted(block)}
    doc["series"] = [{"name": name, "values": [float(v) for v in vals]}
                     for name, vals in series]
    json.dump(doc, fh, indent=2)
    fh.write("\n")


def _emit(cfg, series, extra=None):
    """Write atomically (temp file in the target directory, then rename)."""

    def render(fh):
        if cfg.fmt == "json":
            _write_json(fh, cfg.command, cfg.params, series, extra)
        else:
            _write_csv(fh, cfg.command, cfg.params, series)

    if cfg.out is None:
        render(sys.stdout)
        return
    target_dir = os.path.dirname(os.path.abspath(cfg.out))
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile("w", dir=target_dir, newline="",
                                         suffix=".part", delete=False) as fh:
            tmp_name = fh.name
            render(fh)
        os.replace(tmp_name, cfg.out)
    except OSError as exc:
        if tmp_name is not None and os.path.exists(tmp_name):
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
        raise CliError(4, "cannot write %s: %s" % (cfg.out, exc))


# ---------------------------------------------------------------------------
# command handlers; each takes the resolved parameter dict and returns
# (series, extra) with series a list of (name, values) pairs


def _tau_grid(p):
    _require(p["tau_max"] > 0.0, "tau_max", "must be positive")
    _require(p["tau_steps"] >= 2, "tau_steps", "must be at least 2")
    return np.linspace(0.0, p["tau_max"], p["tau_steps"])


def _run_single_evolve(p):
    taus = _tau_grid(p)
    _require(p["epsilon"] > 0.0, "epsilon", "must be positive")
    if p["p_max"] is None:
        p["p_max"] = discrete.default_p_max(p["xi"], p["epsilon"])
    _require(p["p_max"] >= 1, "p_max", "must be at least 1")
    analytic = continuum.pump_population_series(p["xi"], taus)
    ham = discrete.build_single_photon_hamiltonian(
        p["xi"], p["epsilon"], p_max=p["p_max"])
    result = discrete.evolve(ham, discrete.pump_state(ham.matrix.shape[0]),
                             taus)
    numeric = discrete.pump_population(result)
    return [("tau", taus), ("N_b_analytic", analytic),
            ("N_b_discrete", numeric)], None


def _run_single_spectrum(p):
    _require(p["lam_min"] >= 0.0, "lam_min", "must be >= 0")
    _require(p["lam_max"] > p["lam_min"], "lam_max",
             "must exceed lam_min")
    _require(p["lam_steps"] >= 2, "lam_steps", "must be at least 2")
    lams = np.linspace(p["lam_min"], p["lam_max"], p["lam_steps"])
    rows = [continuum.continuum_weight(p["xi"], lam) for lam in lams]
    return [("lam", lams),
            ("w", [r.w for r in rows]),
            ("c_lambda_sq", [r.c_lambda_sq for r in rows]),
            ("delta_phase", [r.delta_phase for r in rows])], None


def _run_biphoton(p):
    _require(p["u_min"] >= 0.0, "u_min", "must be >= 0")
    _require(p["u_max"] > p["u_min"], "u_max", "must exceed u_min")
    _require(p["u_steps"] >= 2, "u_steps", "must be at least 2")
    _require(p["zeta"] > 0.0, "zeta", "must be positive")
    us = np.linspace(p["u_min"], p["u_max"], p["u_steps"])
    field = biphoton.spatial_correlation(p["xi"], p["tau"], us,
                                         zeta=p["zeta"])
    return [("u", us),
            ("re_R", field.values.real),
            ("im_R", field.values.imag),
            ("abs_R_sq", np.abs(field.values) ** 2)], None


def _coupled_params(p):
    try:
        return coupled.CoupledParams(xi1=p["xi2"] + p["dxi"], xi2=p["xi2"],
                                     theta=p["theta"], phi=p["phi"])
    except ValueError as exc:
        raise CliError(2, str(exc))


def _run_coupled_spectrum(p):
    cp = _coupled_params(p)
    _require(p["lam_min"] > 0.0, "lam_min", "must be positive")
    _require(p["lam_max"] > p["lam_min"], "lam_max", "must exceed lam_min")
    _require(p["lam_steps"] >= 2, "lam_steps", "must be at least 2")
    lams = np.linspace(p["lam_min"], p["lam_max"], p["lam_steps"])
    spectrum = coupled.excitation_spectrum(cp, lams)
    return [("lam", spectrum.lambda_grid),
            ("F_sq", spectrum.values)], None


def _run_coupled_evolve(p):
    cp = _coupled_params(p)
    taus = _tau_grid(p)
    pops = coupled.coupled_pump_population(cp, taus)
    return [("tau", taus), ("N_plus", pops)], None


def _run_multiphoton_evolve(p):
    taus = _tau_grid(p)
    _require(p["epsilon"] > 0.0, "epsilon", "must be positive")
    _require(p["n_pump"] >= 1, "n_pump", "must be at least 1")
    if p["m_max"] is None:
        p["m_max"] = multiphoton.default_m_max(p["xi"], p["epsilon"],
                                               n_pump=p["n_pump"])
    _require(p["m_max"] >= 1, "m_max", "must be at least 1")
    basis = multiphoton.enumerate_basis(p["n_pump"], p["m_total"],
                                        p["m_max"], dc_only=p["dc_only"])
    ham = multiphoton.build_hamiltonian(basis, p["xi"], p["gamma"],
                                        p["beta"], p["epsilon"])
    result = multiphoton.evolve_sparse(ham,
                                       multiphoton.initial_pump_index(basis),
                                       taus)
    numbers = [multiphoton.pump_photon_number(vec, basis)
               for vec in result.amplitudes]
    series = [("tau", taus), ("pump_number", numbers)]
    if p["modes"]:
        per_mode = [multiphoton.pump_mode_populations(vec, basis)
                    for vec in result.amplitudes]
        for ell in sorted(per_mode[0]):
            series.append(("pump_l_%d" % ell,
                           [snap[ell] for snap in per_mode]))
    return series, None


def _run_tpg_evolve(p):
    taus = _tau_grid(p)
    try:
        tp = tpg.TpgParams(xi=p["xi"], epsilon=p["epsilon"],
                           r_max=p["r_max"])
    except ValueError as exc:
        raise CliError(2, str(exc))
    analytic = tpg.tpg_pump_population(p["xi"], p["r_max"], taus)
    series = [("tau", taus), ("N_c_analytic", analytic)]
    if not p["skip_discrete"]:
        series.append(("N_c_discrete",
                       tpg.tpg_discrete_population(tp, taus)))
    return series, None


def _run_fom(p):
    _require(p["eta_percent_per_w_cm2"] > 0.0, "eta_percent_per_w_cm2",
             "must be positive")
    _require(p["lambda_um"] > 0.0, "lambda_um", "must be positive")
    _require(p["gvd_fs2_per_mm"] > 0.0, "gvd_fs2_per_mm",
             "must be positive")
    # unit conversions: %/(W cm^2) -> 1/(W m^2) is a factor 1e2;
    # fs^2/mm -> s^2/m is 1e-30/1e-3 = 1e-27
    experiment = params_mod.ExperimentParams(
        eta=p["eta_percent_per_w_cm2"] * 1e2,
        lambda_carrier=p["lambda_um"] * 1e-6,
        gvd=p["gvd_fs2_per_mm"] * 1e-27)
    length = params_mod.l_pdc(experiment)
    return [("l_pdc_m", [length])], {"l_pdc_m": length}


_HANDLERS = {
    "single-evolve": _run_single_evolve,
    "single-spectrum": _run_single_spectrum,
    "biphoton": _run_biphoton,
    "coupled-spectrum": _run_coupled_spectrum,
    "coupled-evolve": _run_coupled_evolve,
    "multiphoton-evolve": _run_multiphoton_evolve,
    "tpg-evolve": _run_tpg_evolve,
    "fom": _run_fom,
}


# ---------------------------------------------------------------------------
# argument parsing and config merging


def _add_output_flags(sub):
    sub.add_argument("--out", default=None,
                     help="output path (stdout when omitted)")
    sub.add_argument("--format", choices=("csv", "json"), default=None,
                     help="output format; default json for .json paths, "
                          "csv otherwise")
    sub.add_argument("--config", default=None,
                     help="JSON file whose keys override the flags")


def _add_tau_flags(sub, tau_max, tau_steps):
    sub.add_argument("--tau-max", type=float, default=tau_max)
    sub.add_argument("--tau-steps", type=int, default=tau_steps)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fanopdc",
        description="Broadband downconversion and three-photon generation "
                    "solvers with CSV/JSON emitters.")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("single-evolve",
                        help="pump population, analytic vs discrete")
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--epsilon", type=float, default=1.0 / 30.0)
    s.add_argument("--p-max", type=int, default=None)
    _add_tau_flags(s, 5.0, 200)
    _add_output_flags(s)

    s = subs.add_parser("single-spectrum",
                        help="continuum lineshape and scattering phase")
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--lam-min", type=float, default=0.0)
    s.add_argument("--lam-max", type=float, default=20.0)
    s.add_argument("--lam-steps", type=int, default=400)
    _add_output_flags(s)

    s = subs.add_parser("biphoton",
                        help="spatial pair correlation at one time")
    s.add_argument("--xi", type=float, default=4.0)
    s.add_argument("--tau", type=float, default=2.0)
    s.add_argument("--zeta", type=float, default=1.0)
    s.add_argument("--u-min", type=float, default=0.0)
    s.add_argument("--u-max", type=float, default=3.0)
    s.add_argument("--u-steps", type=int, default=151)
    _add_output_flags(s)

    s = subs.add_parser("coupled-spectrum",
                        help="two-guide excitation spectrum |F_lambda|^2")
    s.add_argument("--xi2", type=float, default=2.0)
    s.add_argument("--dxi", type=float, default=0.0,
                   help="detuning split xi1 - xi2")
    s.add_argument("--theta", type=float, default=0.25 * np.pi)
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--lam-min", type=float, default=0.01)
    s.add_argument("--lam-max", type=float, default=10.0)
    s.add_argument("--lam-steps", type=int, default=400)
    _add_output_flags(s)

    s = subs.add_parser("coupled-evolve",
                        help="two-guide total pump population N_+")
    s.add_argument("--xi2", type=float, default=2.0)
    s.add_argument("--dxi", type=float, default=0.0,
                   help="detuning split xi1 - xi2")
    s.add_argument("--theta", type=float, default=0.25 * np.pi)
    s.add_argument("--phi", type=float, default=0.0)
    _add_tau_flags(s, 10.0, 201)
    _add_output_flags(s)

    s = subs.add_parser("multiphoton-evolve",
                        help="sparse many-pump evolution, pump number vs time")
    s.add_argument("--n-pump", type=int, default=2)
    s.add_argument("--m-total", type=int, default=0)
    s.add_argument("--xi", type=float, default=4.0)
    s.add_argument("--gamma", type=float, default=0.0)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--epsilon", type=float, default=1.0 / 20.0)
    s.add_argument("--m-max", type=int, default=None)
    s.add_argument("--dc-only", action=argparse.BooleanOptionalAction,
                   default=True)
    s.add_argument("--modes", action="store_true",
                   help="also emit per-mode pump populations")
    _add_tau_flags(s, 50.0, 101)
    _add_output_flags(s)

    s = subs.add_parser("tpg-evolve",
                        help="triplet-generation pump population")
    s.add_argument("--xi", type=float, default=0.0)
    s.add_argument("--epsilon", type=float, default=1.0 / 100.0)
    s.add_argument("--r-max", type=float, default=5.0)
    s.add_argument("--skip-discrete", action="store_true")
    _add_tau_flags(s, 5.0, 101)
    _add_output_flags(s)

    s = subs.add_parser("fom", help="experimental figures of merit")
    s.add_argument("--eta-percent-per-w-cm2", type=float, required=True)
    s.add_argument("--lambda-um", type=float, required=True)
    s.add_argument("--gvd-fs2-per-mm", type=float, required=True)
    _add_output_flags(s)

    parser.sub_map = dict(subs.choices)
    return parser


def _merge_config(args, parser):
    """Overlay the JSON config file onto parsed flags; config wins."""
    if args.config is None:
        return
    try:
        with open(args.config) as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise CliError(2, "config: %s" % exc)
    except json.JSONDecodeError as exc:
        raise CliError(2, "config: invalid JSON (%s)" % exc)
    if not isinstance(loaded, dict):
        raise CliError(2, "config: top level must be a JSON object")

    actions = {}
    for action in parser.sub_map[args.command]._actions:
        if action.dest not in ("help", "config", "command"):
            actions[action.dest] = action

    for key, value in loaded.items():
        if key not in actions:
            raise CliError(2, "config: unknown key %r" % key)
        action = actions[key]
        if action.nargs == 0 and isinstance(action.default, bool):
            # flag-style option, expects a bare boolean in the config
            if not isinstance(value, bool):
                raise CliError(2, "%s: expected a boolean" % key)
            setattr(args, key, value)
            continue
        if action.choices is not None and value not in action.choices:
            raise CliError(2, "%s: must be one of %s"
                           % (key, ", ".join(map(str, action.choices))))
        if action.type is not None and value is not None:
            try:
                value = action.type(value)
            except (TypeError, ValueError):
                raise CliError(2, "%s: cannot coerce %r" % (key, value))
        setattr(args, key, value)


def _resolve(args):
    reserved = ("command", "out", "format", "config")
    p = {k: v for k, v in vars(args).items() if k not in reserved}
    fmt = args.format
    if fmt is None:
        fmt = "json" if (args.out or "").endswith(".json") else "csv"
    return RunConfig(command=args.command, params=p, out=args.out, fmt=fmt)


def main(argv=None):
    try:
        _apply_thread_cap()
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        _merge_config(args, parser)
        cfg = _resolve(args)
        try:
            series, extra = _HANDLERS[cfg.command](cfg.params)
        except ValueError as exc:
            raise CliError(2, str(exc))
        except QuadratureError as exc:
            raise CliError(3, "quadrature failure: %s" % exc)
        except PropagationError as exc:
            raise CliError(3, "propagation failure: %s" % exc)
        _emit(cfg, series, extra)
        return 0
    except CliError as exc:
        print("fanopdc: error: %s" % exc, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
