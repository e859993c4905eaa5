"""Command-line front end.

``springcool <command> --config <path> [--out <path>] [--format csv|json]
[--seed <u64>] [--tol <float>]`` with commands ``eval``, ``spectrum``,
``verify``, ``sweep`` and ``thresholds``.

The configuration is a JSON object with the sections ``oscillator``,
``readout``, ``feedback`` and, depending on the command, ``spectrum``,
``sweep``, ``suite`` and ``si``. Exit codes: 0 success, 2 configuration
error, 3 closed-loop instability, 4 convergence or verification failure,
5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys as _sys
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import constants

from .closed_form import ground_state_thresholds, purity_closed_form
from .errors import (
    ConfigParseError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    InstabilityError,
)
from .model import FeedbackParams, OscillatorParams, ReadoutParams, SystemParams
from .optimizer import MODES, Plant, sweep_cooperativity
from .oracle.compare import random_configurations, verify_closed_form
from .oracle.quadrature import DEFAULT_TOL
from .quantum_noise import phonon_budget
from .spectra import FROZEN, STRUCTURAL, displacement_psd
from .stability import check_stability

COMMANDS = ("eval", "spectrum", "verify", "sweep", "thresholds")
EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4, 5
VERIFY_THRESHOLD = 1e-6

_SECTIONS = {
    "oscillator": {"q0", "nth0", "omega0"},
    "readout": {"omega_sql0", "delta", "theta", "eta", "kappa"},
    "feedback": {"omega_h", "omega_l", "gfb"},
    "spectrum": {"omega_min", "omega_max", "points_per_decade", "damping"},
    "sweep": {"cq_min", "cq_max", "points_per_decade", "n_points", "modes", "budget", "n_starts"},
    "suite": {"n", "seed"},
    "si": {
        "mass_kg",
        "frequency_hz",
        "temperature_k",
        "linewidth_hz",
        "sql_frequency_hz",
        "intracavity_photons",
        "wavelength_m",
        "cavity_length_m",
    },
}


@dataclass
class RunConfig:
    command: str
    system: SystemParams | None = None
    plant: Plant | None = None
    spectrum: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    suite: dict | None = None
    f0_hz: float | None = None


def _number(section: dict, name: str, path: str, default=None, required=False):
    if name not in section:
        if required:
            raise ConfigParseError(f"{path}.{name}: required key is missing", field=f"{path}.{name}")
        return default
    value = section[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigParseError(f"{path}.{name}: expected a finite number, got {value!r}", field=f"{path}.{name}")
    return float(value)


def _build(path: str, ctor, **kwargs):
    try:
        return ctor(**{k: v for k, v in kwargs.items() if v is not None})
    except ConfigurationError as exc:
        raise ConfigParseError(f"{path}: {exc}", field=path) from exc


def _si_groups(si: dict) -> dict:
    """Convert the SI block to dimensionless groups (omega0 = 1)."""
    f0 = _number(si, "frequency_hz", "si", required=True)
    if not f0 > 0:
        raise ConfigParseError("si.frequency_hz: must be positive", field="si.frequency_hz")
    omega0 = 2.0 * math.pi * f0
    out = {"f0_hz": f0}
    temp = _number(si, "temperature_k", "si")
    if temp is not None:
        out["nth0"] = constants.k * temp / (constants.hbar * omega0)
    linewidth = _number(si, "linewidth_hz", "si")
    if linewidth is not None:
        out["kappa"] = linewidth / f0
    sql = _number(si, "sql_frequency_hz", "si")
    photons = _number(si, "intracavity_photons", "si")
    if sql is not None and photons is not None:
        raise ConfigParseError(
            "si: give either sql_frequency_hz or intracavity_photons, not both", field="si.sql_frequency_hz"
        )
    if sql is not None:
        out["omega_sql0"] = sql / f0
    elif photons is not None:
        need = ("mass_kg", "wavelength_m", "cavity_length_m", "linewidth_hz")
        vals = {k: _number(si, k, "si", required=True) for k in need}
        g_om = 2.0 * math.pi * constants.c / (vals["wavelength_m"] * vals["cavity_length_m"])
        kappa = 2.0 * math.pi * vals["linewidth_hz"]
        wsql2 = 8.0 * constants.hbar * g_om**2 * photons / (vals["mass_kg"] * kappa)
        out["omega_sql0"] = math.sqrt(wsql2) / omega0
    return out


def parse_config(text: str, command: str = "eval") -> RunConfig:
    """Validate a JSON configuration for ``command``.

    Raises
    ------
    ConfigParseError
        With ``field`` set to the dotted path of the offending key.
    """
    if command not in COMMANDS:
        raise ConfigParseError(f"unknown command {command!r}", field="command")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigParseError("top level must be an object")
    for name, section in doc.items():
        if name not in _SECTIONS:
            raise ConfigParseError(f"{name}: unknown section", field=name)
        if not isinstance(section, dict):
            raise ConfigParseError(f"{name}: must be an object", field=name)
        for key in section:
            if key not in _SECTIONS[name]:
                raise ConfigParseError(f"{name}.{key}: unknown key", field=f"{name}.{key}")

    cfg = RunConfig(command)
    si = _si_groups(doc["si"]) if "si" in doc else {}
    cfg.f0_hz = si.get("f0_hz")
    osc_doc = doc.get("oscillator", {})
    ro_doc = doc.get("readout", {})
    for key, section, path in (("nth0", osc_doc, "oscillator"), ("kappa", ro_doc, "readout"), ("omega_sql0", ro_doc, "readout")):
        if key in si and key in section:
            raise ConfigParseError(f"{path}.{key}: also determined by the si block", field=f"{path}.{key}")

    suite_only = command == "verify" and "suite" in doc
    if not suite_only:
        osc = _build(
            "oscillator",
            OscillatorParams,
            q0=_number(osc_doc, "q0", "oscillator", required=True),
            nth0=si.get("nth0", _number(osc_doc, "nth0", "oscillator", required="nth0" not in si)),
            omega0=_number(osc_doc, "omega0", "oscillator"),
        )
        if osc.omega0 != 1.0 and si:
            raise ConfigParseError("oscillator.omega0: must be 1 when an si block is given", field="oscillator.omega0")
        needs_power = command != "sweep"
        readout = _build(
            "readout",
            ReadoutParams,
            omega_sql0=si.get(
                "omega_sql0",
                _number(ro_doc, "omega_sql0", "readout", default=1.0 if not needs_power else None,
                        required=needs_power and "omega_sql0" not in si),
            ),
            delta=_number(ro_doc, "delta", "readout"),
            theta=_number(ro_doc, "theta", "readout"),
            eta=_number(ro_doc, "eta", "readout"),
            kappa=si.get("kappa", _number(ro_doc, "kappa", "readout")),
        )
        if command == "sweep":
            cfg.plant = Plant(osc, eta=readout.eta, kappa=readout.kappa)
        elif command == "thresholds":
            cfg.system = SystemParams(osc, readout)
        else:
            fb_doc = doc.get("feedback", {})
            omega_h = _number(fb_doc, "omega_h", "feedback", required=True)
            omega_l = _number(fb_doc, "omega_l", "feedback", required=True)
            if not omega_h < omega_l:
                raise ConfigParseError(
                    f"feedback.omega_h, feedback.omega_l: need omega_h < omega_l, got {omega_h} >= {omega_l}",
                    field="feedback.omega_h,feedback.omega_l",
                )
            fb = _build(
                "feedback",
                FeedbackParams,
                omega_h=omega_h,
                omega_l=omega_l,
                gfb=_number(fb_doc, "gfb", "feedback", required=True),
            )
            cfg.system = SystemParams(osc, readout, fb)

    if command == "spectrum":
        spec = doc.get("spectrum", {})
        damping = spec.get("damping", FROZEN)
        if damping not in (FROZEN, STRUCTURAL):
            raise ConfigParseError(f"spectrum.damping: expected {FROZEN!r} or {STRUCTURAL!r}", field="spectrum.damping")
        cfg.spectrum = {
            "omega_min": _number(spec, "omega_min", "spectrum"),
            "omega_max": _number(spec, "omega_max", "spectrum"),
            "points_per_decade": int(_number(spec, "points_per_decade", "spectrum", default=200)),
            "damping": damping,
        }
    if command == "sweep":
        sw = doc.get("sweep", {})
        modes = sw.get("modes", ["free", "phase", "resonant"])
        if not isinstance(modes, list) or not modes or any(m not in MODES for m in modes):
            raise ConfigParseError(f"sweep.modes: expected a non-empty list drawn from {list(MODES)}", field="sweep.modes")
        cfg.sweep = {
            "cq_min": _number(sw, "cq_min", "sweep", default=1e-2),
            "cq_max": _number(sw, "cq_max", "sweep", default=1e2),
            "points_per_decade": _number(sw, "points_per_decade", "sweep", default=25),
            "n_points": _number(sw, "n_points", "sweep"),
            "modes": modes,
            "budget": int(_number(sw, "budget", "sweep", default=10_000)),
            "n_starts": int(_number(sw, "n_starts", "sweep", default=8)),
        }
        if not 0 < cfg.sweep["cq_min"] < cfg.sweep["cq_max"]:
            raise ConfigParseError("sweep.cq_min, sweep.cq_max: need 0 < cq_min < cq_max", field="sweep.cq_min")
    if suite_only:
        st = doc["suite"]
        cfg.suite = {
            "n": int(_number(st, "n", "suite", default=100)),
            "seed": int(_number(st, "seed", "suite", default=0)),
        }
    return cfg


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ConvergenceError(f"refusing to emit a non-finite value ({v})")
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.15e}"


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in _finite(list(row))])
    return buf.getvalue()


def render_json(payload) -> str:
    return json.dumps(_finite(payload), indent=2, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".springcool-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table(header, rows, fmt):
    if fmt == "csv":
        return render_csv(header, rows)
    return render_json([dict(zip(header, r)) for r in rows])


def _flat(prefix, mapping):
    return {f"{prefix}.{k}": v for k, v in mapping.items()}


def _eval(cfg, fmt, tol, seed):
    s = cfg.system
    stab = check_stability(s)
    if not stab.stable:
        raise InstabilityError(f"closed loop is unstable ({', '.join(stab.violated)} <= 0)", violated=stab.violated)
    res = purity_closed_form(s)
    payload = {
        "result": {k: v for k, v in asdict(res).items() if k != "terms"},
        "terms": asdict(res.terms),
        "budget": asdict(phonon_budget(s)),
        "stability": {
            "stable": stab.stable,
            "gfb_min": stab.gfb_min,
            "simplified_gain_bound": stab.simplified_gain_bound,
            "margins": stab.margins,
        },
    }
    if fmt == "json":
        return render_json(payload)
    flat = {}
    for section in ("result", "terms", "budget"):
        flat.update(_flat(section, payload[section]))
    flat.update(_flat("stability", {k: v for k, v in payload["stability"].items() if k != "margins"}))
    flat.update(_flat("stability.margins", stab.margins))
    if not math.isfinite(flat["stability.gfb_min"]):
        flat.pop("stability.gfb_min")
    return render_csv(list(flat), [list(flat.values())])


def _spectrum(cfg, fmt, tol, seed):
    s = cfg.system
    stab = check_stability(s)
    if not stab.stable:
        raise InstabilityError(f"closed loop is unstable ({', '.join(stab.violated)} <= 0)", violated=stab.violated)
    sp = cfg.spectrum
    res = purity_closed_form(s)
    lo = sp["omega_min"] or 1e-2 * min(s.fb.omega_h, res.omega_eff)
    hi = sp["omega_max"] or 1e2 * max(s.fb.omega_l, res.omega_eff)
    if not 0 < lo < hi:
        raise ConfigParseError("spectrum.omega_min, spectrum.omega_max: need 0 < omega_min < omega_max", field="spectrum.omega_min")
    n = max(2, int(round(math.log10(hi / lo) * sp["points_per_decade"])) + 1)
    w = np.logspace(math.log10(lo), math.log10(hi), n)
    pt = displacement_psd(s, w, sp["damping"])
    header = ["omega", "omega_over_sql0", "s_total", "s_thermal", "s_backaction", "s_fed_imprecision", "s_correlation"]
    cols = [w, w / s.readout.omega_sql0, pt.s_xx_total, pt.thermal, pt.backaction, pt.fed_imprecision, pt.correlation]
    return _table(header, list(zip(*cols)), fmt)


def _verify(cfg, fmt, tol, seed):
    if cfg.suite is not None:
        configs = random_configurations(cfg.suite["n"], seed if seed is not None else cfg.suite["seed"])
    else:
        configs = [cfg.system]
    header = ["index", "x_var", "p_var", "n_eff", "rel_x", "rel_p", "rel_n", "n_evals"]
    rows, worst = [], 0.0
    for i, s in enumerate(configs):
        rec = verify_closed_form(s, tol)
        worst = max(worst, rec.max_rel)
        rows.append([i, *rec.closed, rec.rel_x, rec.rel_p, rec.rel_n, rec.oracle.n_evals])
    if fmt == "json":
        text = render_json({"max_rel": worst, "threshold": VERIFY_THRESHOLD, "records": [dict(zip(header, r)) for r in rows]})
    else:
        text = render_csv(header, rows)
    return text, worst < VERIFY_THRESHOLD, worst


def _sweep(cfg, fmt, tol, seed):
    sw = cfg.sweep
    if sw["n_points"]:
        grid = np.logspace(math.log10(sw["cq_min"]), math.log10(sw["cq_max"]), int(sw["n_points"]))
    else:
        n = int(round(math.log10(sw["cq_max"] / sw["cq_min"]) * sw["points_per_decade"])) + 1
        grid = np.logspace(math.log10(sw["cq_min"]), math.log10(sw["cq_max"]), n)
    out = sweep_cooperativity(
        cfg.plant, grid, modes=tuple(sw["modes"]), budget=sw["budget"], n_starts=sw["n_starts"],
        seed=seed if seed is not None else 0,
    )
    lead = out["free"] if "free" in out else next(iter(out.values()))
    header = ["cq_sql", "omega_sql0"]
    labels = {"free": "purity_free", "phase": "purity_phase_fixed", "resonant": "purity_resonant"}
    header += [labels[m] for m in out]
    header += ["omega_h_opt", "omega_l_opt", "omega_h_opt_sql", "omega_l_opt_sql", "gamma_fb_opt",
               "omega_eff_opt_sql", "delta_opt", "theta_opt", "n_eff_opt"]
    rows = []
    for i, c in enumerate(grid):
        p = lead.points[i]
        row = [c, p.omega_sql0] + [out[m].points[i].purity for m in out]
        row += [p.omega_h, p.omega_l, p.omega_h / p.omega_sql0, p.omega_l / p.omega_sql0, p.gamma_fb,
                p.omega_eff / p.omega_sql0, p.delta, p.theta, p.n_eff]
        rows.append(row)
    return _table(header, rows, fmt)


def _thresholds(cfg, fmt, tol, seed):
    s = cfg.system
    th = ground_state_thresholds(s.osc, s.readout, f0=cfg.f0_hz)
    payload = asdict(th)
    payload["qf_min_unit"] = "Hz" if cfg.f0_hz is not None else "omega0/(2 pi)"
    if fmt == "json":
        return render_json(payload)
    return render_csv(["n_imp_max", "q0_min", "qf_min"], [[th.n_imp_max, th.q0_min, th.qf_min]])


_DEFAULT_FORMAT = {"eval": "json", "spectrum": "csv", "verify": "json", "sweep": "csv", "thresholds": "json"}
_HANDLERS = {"eval": _eval, "spectrum": _spectrum, "sweep": _sweep, "thresholds": _thresholds}


def run(cfg: RunConfig, out: str | None = None, fmt: str | None = None, seed: int | None = None,
        tol: float = DEFAULT_TOL, stdout=None) -> int:
    """Execute ``cfg`` and emit its artifact; returns the process exit code."""
    stdout = stdout or _sys.stdout
    fmt = fmt or _DEFAULT_FORMAT[cfg.command]
    ok = True
    if cfg.command == "verify":
        text, ok, worst = _verify(cfg, fmt, tol, seed)
        if not ok:
            print(f"springcool: verification failed, max relative discrepancy {worst:.3e}", file=_sys.stderr)
    else:
        text = _HANDLERS[cfg.command](cfg, fmt, tol, seed)
    if out:
        write_atomic(out, text)
    else:
        stdout.write(text)
    return EXIT_OK if ok else EXIT_CONVERGENCE


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="springcool", description="Feedback cooling with an optical spring.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--seed", type=_u64, help="seed for random suites and optimizer starts")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature relative tolerance")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"springcool: cannot read config: {exc}", file=_sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text, args.command)
        return run(cfg, out=args.out, fmt=args.format, seed=args.seed, tol=args.tol)
    except (ConfigParseError, ConfigurationError, DomainError) as exc:
        print(f"springcool: configuration error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"springcool: instability: {exc}", file=_sys.stderr)
        return EXIT_UNSTABLE
    except (ConvergenceError, InfeasibleError) as exc:
        print(f"springcool: convergence failure: {exc}", file=_sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"springcool: I/O error: {exc}", file=_sys.stderr)
        return EXIT_IO
