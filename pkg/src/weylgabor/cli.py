"""Configuration-driven command line front end.

Five subcommands (group-check, gabor, cylinder, quantize, stellar) share
one calling convention:

    weylgabor <subcommand> --out DIR [--config FILE] [--strict] [--threads N]

The optional config is a single JSON document with at most the keys
"command" (must match the subcommand when present), "seed" (integer, used
by the randomized group suites), and "parameters" (a flat object of
subcommand-specific settings; unknown keys are rejected).

Every run writes its outputs plus a manifest.json into a temporary
directory that is renamed to --out at the end, so a run either completes
or leaves nothing.  The manifest echoes the config, lists every warning
the run raised, and inventories the output files with SHA-256 hashes.
Reruns with the same config and seed produce byte-identical outputs
(the manifest differs only in its wall_time_s field).

Exit codes: 0 success; 2 validation failure (error JSON on stderr);
3 run completed but raised warnings and --strict was given.  --threads is
validated and recorded in the manifest; the computation itself is
single-threaded regardless.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import cylinder as cyl
from . import groups
from .gabor import (
    SampledSignal,
    gabor_reconstruct,
    gabor_transform,
    gaussian_probe,
    make_test_signal,
)
from .numerics import Grid1D, PhaseSpaceGrid
from .quantize import (
    Distribution,
    density_diagnostics,
    gaussian_distribution,
    gaussian_probe_signal,
    overlap_kernel,
    portrait,
    quantize_to_kernel,
)
from .stellar import (
    StellarParams,
    pentagon_zeros,
    stellar_distribution,
    stellar_experiment,
)

SCHEMA = 1
PHASE_GRID_HEADER = "omega_start,omega_step,n_omega,b_start,b_step,n_b"
GENERIC_GRID_HEADER = ("axis0_start,axis0_step,axis0_count,"
                       "axis1_start,axis1_step,axis1_count")
COMMANDS = ("group-check", "gabor", "cylinder", "quantize", "stellar")


class ValidationFailure(Exception):
    """Bad config, bad parameter, or unusable output location."""


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def _load_config(path, command: str):
    if path is None:
        return 0, {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ValidationFailure("cannot read config: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ValidationFailure("config is not valid JSON: %s" % exc)
    if not isinstance(cfg, dict):
        raise ValidationFailure("config must be a JSON object")
    unknown = sorted(set(cfg) - {"command", "seed", "parameters"})
    if unknown:
        raise ValidationFailure("unknown config key(s): %s" % ", ".join(unknown))
    if "command" in cfg and cfg["command"] != command:
        raise ValidationFailure(
            "config command %r does not match subcommand %r"
            % (cfg["command"], command))
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValidationFailure("seed must be a non-negative integer")
    params = cfg.get("parameters", {})
    if not isinstance(params, dict):
        raise ValidationFailure("parameters must be a JSON object")
    return seed, params


class _Params:
    """Typed one-shot access to the parameters object; leftovers are errors."""

    def __init__(self, raw: dict):
        self._raw = dict(raw)

    def _pop(self, key, default):
        return self._raw.pop(key, default)

    def floatval(self, key, default):
        value = self._pop(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationFailure("parameter %r must be a number" % key)
        return float(value)

    def intval(self, key, default, minimum=None):
        value = self._pop(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationFailure("parameter %r must be an integer" % key)
        if minimum is not None and value < minimum:
            raise ValidationFailure("parameter %r must be >= %d" % (key, minimum))
        return value

    def strval(self, key, default):
        value = self._pop(key, default)
        if value is not None and not isinstance(value, str):
            raise ValidationFailure("parameter %r must be a string" % key)
        return value

    def optional_int(self, key, minimum=None):
        if key not in self._raw:
            return None
        return self.intval(key, None, minimum=minimum)

    def finish(self):
        if self._raw:
            raise ValidationFailure(
                "unknown parameter(s): %s" % ", ".join(sorted(self._raw)))


# ---------------------------------------------------------------------------
# writers and readers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    return "%.17g" % float(value)

def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path: Path, obj) -> None:
    _write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _axis_meta(axis: Grid1D) -> list:
    return [_fmt(axis.start), _fmt(axis.step), "%d" % axis.count]


def _write_grid_csv(path: Path, axis0: Grid1D, axis1: Grid1D,
                    values: np.ndarray, header: str) -> None:
    lines = ["# " + header,
             "# " + ",".join(_axis_meta(axis0) + _axis_meta(axis1))]
    for row in np.asarray(values, dtype=float):
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _read_phase_grid_csv(path) -> Distribution:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ValidationFailure("cannot read grid CSV: %s" % exc)
    if len(lines) < 3 or lines[0].lstrip("# ").strip() != PHASE_GRID_HEADER:
        raise ValidationFailure(
            "grid CSV must start with '# %s'" % PHASE_GRID_HEADER)
    meta = lines[1].lstrip("# ").split(",")
    if len(meta) != 6:
        raise ValidationFailure("grid CSV metadata line must carry 6 fields")
    try:
        omega = Grid1D(float(meta[0]), float(meta[1]), int(meta[2]))
        b = Grid1D(float(meta[3]), float(meta[4]), int(meta[5]))
        values = np.array([[float(cell) for cell in line.split(",")]
                           for line in lines[2:] if line.strip()])
    except ValueError as exc:
        raise ValidationFailure("grid CSV parse error: %s" % exc)
    grid = PhaseSpaceGrid(omega, b)
    if values.shape != grid.shape:
        raise ValidationFailure(
            "grid CSV body %s does not match declared shape %s"
            % (values.shape, grid.shape))
    return Distribution(grid, values)


def _read_signal_csv(path) -> SampledSignal:
    try:
        rows = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError as exc:
        raise ValidationFailure("cannot read signal CSV: %s" % exc)
    except ValueError as exc:
        raise ValidationFailure("signal CSV parse error: %s" % exc)
    if rows.shape[1] != 3 or rows.shape[0] < 2:
        raise ValidationFailure("signal CSV needs columns t, re, im")
    t = rows[:, 0]
    steps = np.diff(t)
    step = steps[0]
    if step <= 0 or np.abs(steps - step).max() > 1e-9 * max(abs(step), 1.0):
        raise ValidationFailure("signal CSV time column must be uniform")
    grid = Grid1D(float(t[0]), float(step), len(t))
    return SampledSignal(grid, rows[:, 1] + 1j * rows[:, 2])


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# group-check
# ---------------------------------------------------------------------------

def _matrix_suite(draw, compose, to_matrix, trials) -> dict:
    worst = 0.0
    for _ in range(trials):
        g1 = draw()
        g2 = draw()
        product = to_matrix(compose(g1, g2))
        direct = to_matrix(g1) @ to_matrix(g2)
        worst = max(worst, float(np.abs(product - direct).max()))
    return {"max_error": worst, "pass": bool(worst < 1e-12)}


def _run_group_check(params: _Params, seed: int, outdir: Path) -> None:
    trials = params.intval("trials", 1000, minimum=1)
    params.finish()
    rng = np.random.default_rng(seed)

    def rnd(k):
        return [float(x) for x in rng.uniform(-3.0, 3.0, size=k)]

    suites = {}
    suites["heisenberg_line_matrix"] = _matrix_suite(
        lambda: groups.WHElement(*rnd(3)),
        groups.wh_compose, groups.wh_to_matrix, trials)
    for n in (1, 2, 3):
        suites["polarized_rank%d_matrix" % n] = _matrix_suite(
            lambda n=n: groups.PolarizedElement(tuple(rnd(n)), tuple(rnd(n)), rnd(1)[0]),
            groups.polarized_compose, groups.polarized_to_matrix, trials)
    for dim in (2, 4):
        suites["symplectic_dim%d_matrix" % dim] = _matrix_suite(
            lambda dim=dim: groups.SymplecticElement(rnd(1)[0], tuple(rnd(dim))),
            groups.symplectic_compose, groups.symplectic_to_matrix, trials)
    suites["unitriangular4_matrix"] = _matrix_suite(
        lambda: groups.Unitriangular4Element(rnd(1)[0], tuple(rnd(2)), tuple(rnd(3))),
        groups.unitriangular4_compose, groups.unitriangular4_to_matrix, trials)

    field = groups.PrimeField(5)
    elements = [groups.WHElement(c, a, b, ring=field)
                for c in range(5) for a in range(5) for b in range(5)]
    closed = all(groups.wh_compose(g, h) in set(elements)
                 for g in elements[::7] for h in elements[::11])
    inverses = all(
        groups.wh_compose(g, groups.wh_inverse(g)) == groups.wh_identity(field)
        for g in elements)
    suites["z5_order_and_closure"] = {
        "order": len(set(elements)),
        "pass": bool(len(set(elements)) == 125 and closed and inverses),
    }

    filtration = groups.nilpotency_filtration_check(4)
    suites["nilpotency_filtration"] = {
        "detail": {k: bool(v) if isinstance(v, (bool, np.bool_)) else v
                   for k, v in filtration.items()},
        "pass": bool(filtration["all_pass"]),
    }

    worst = 0.0
    order = 4
    for i in range(1, order + 1):
        for j in range(1, order + 1):
            for k in range(1, order + 1):
                for l in range(1, order + 1):
                    lhs = groups.matrix_unit(order, i, j) @ groups.matrix_unit(order, k, l)
                    rhs = (1.0 if j == k else 0.0) * groups.matrix_unit(order, i, l)
                    worst = max(worst, float(np.abs(lhs - rhs).max()))
    suites["matrix_unit_products"] = {"max_error": worst, "pass": bool(worst == 0.0)}

    report = {
        "schema": SCHEMA,
        "seed": seed,
        "trials": trials,
        "suites": suites,
        "all_pass": bool(all(s["pass"] for s in suites.values())),
    }
    _write_json(outdir / "group_check.json", report)


# ---------------------------------------------------------------------------
# gabor
# ---------------------------------------------------------------------------

def _run_gabor(params: _Params, seed: int, outdir: Path) -> None:
    name = params.strval("signal", None)
    csv_path = params.strval("signal_csv", None)
    probe_width = params.floatval("probe_width", 1.0)
    t_start = params.floatval("time_start", -20.0)
    t_stop = params.floatval("time_stop", 20.0)
    n_time = params.intval("n_time", 1024, minimum=2)
    tf_min = params.floatval("tf_min", -16.0)
    tf_max = params.floatval("tf_max", 16.0)
    n_tf = params.intval("n_tf", 256, minimum=2)
    params.finish()
    if probe_width <= 0:
        raise ValidationFailure("probe_width must be positive")
    if name is not None and csv_path is not None:
        raise ValidationFailure("give only one of 'signal' or 'signal_csv'")
    if name is None and csv_path is None:
        name = "gaussian"
    if csv_path is not None:
        signal = _read_signal_csv(csv_path)
        label = "csv:%s" % Path(csv_path).name
        grid = signal.grid
    else:
        grid = Grid1D.regular(t_start, t_stop, n_time)
        signal = make_test_signal(name, grid)
        label = name
    tf_grid = PhaseSpaceGrid.square(tf_min, tf_max, n_tf)
    probe = gaussian_probe(grid, probe_width)
    coeffs = gabor_transform(probe, signal, tf_grid)
    recon = gabor_reconstruct(probe, coeffs)
    diff = recon.values - signal.values
    roundtrip = float(np.sqrt(grid.step * np.sum(np.abs(diff) ** 2)))
    report = {
        "schema": SCHEMA,
        "signal": label,
        "probe_width": probe_width,
        "signal_energy": signal.energy,
        "coefficient_energy": coeffs.energy,
        "parseval_rel_error": abs(coeffs.energy - signal.energy) / signal.energy,
        "roundtrip_l2_error": roundtrip,
        "roundtrip_rel_error": roundtrip / signal.norm,
    }
    _write_grid_csv(outdir / "coefficients_modulus.csv",
                    tf_grid.omega_axis, tf_grid.b_axis,
                    np.abs(coeffs.values), PHASE_GRID_HEADER)
    _write_json(outdir / "report.json", report)


# ---------------------------------------------------------------------------
# cylinder
# ---------------------------------------------------------------------------

def _run_cylinder(params: _Params, seed: int, outdir: Path) -> None:
    lam = params.floatval("lam", 2.0)
    m = params.intval("m", 1)
    mprime = params.intval("mprime", 0)
    n_theta = params.intval("n_theta", 129, minimum=2)
    n_gamma = params.intval("n_gamma", 256, minimum=8)
    m_max = params.optional_int("m_max", minimum=0)
    shift_m = params.intval("shift_m", 2)
    shift_theta = params.floatval("shift_theta", 0.7)
    params.finish()

    probe = cyl.von_mises(lam, n_gamma)
    signal = cyl.displace(shift_m, shift_theta, probe)
    if m_max is None:
        m_max = cyl.adaptive_m_cutoff(probe, signal)
    coeffs = cyl.cyl_gabor_transform(probe, signal, m_max)
    recon = cyl.cyl_reconstruct(probe, coeffs)
    diff = recon.values - signal.values
    roundtrip = float(np.sqrt(signal.grid.step * np.sum(np.abs(diff) ** 2)))
    axis = Grid1D.regular(-2.0 * np.pi, 2.0 * np.pi, n_theta)
    kernel = np.empty((n_theta, n_theta), dtype=complex)
    for i, theta in enumerate(axis.points):
        for j, thetap in enumerate(axis.points):
            kernel[i, j] = cyl.reproducing_kernel(lam, m, theta, mprime, thetap)
    report = {
        "schema": SCHEMA,
        "lam": lam,
        "m": m,
        "mprime": mprime,
        "m_cutoff": int(m_max),
        "signal_energy": signal.energy,
        "coefficient_energy": coeffs.energy,
        "parseval_rel_error": abs(coeffs.energy - signal.energy) / signal.energy,
        "roundtrip_l2_error": roundtrip,
        "roundtrip_rel_error": roundtrip / signal.norm,
    }
    for suffix, block in (("real", kernel.real), ("imag", kernel.imag),
                          ("modulus", np.abs(kernel))):
        _write_grid_csv(outdir / ("kernel_%s.csv" % suffix), axis, axis,
                        block, GENERIC_GRID_HEADER)
    _write_json(outdir / "report.json", report)


# ---------------------------------------------------------------------------
# quantize
# ---------------------------------------------------------------------------

def _run_quantize(params: _Params, seed: int, outdir: Path) -> None:
    kind = params.strval("w", None)
    w_csv = params.strval("w_csv", None)
    sigma_omega = params.floatval("sigma_omega", 1.0)
    sigma_b = params.floatval("sigma_b", 1.0)
    center_omega = params.floatval("center_omega", 0.0)
    center_b = params.floatval("center_b", 0.0)
    a = params.floatval("a", 1.0)
    r = params.floatval("r", 1.0)
    tf_min = params.floatval("tf_min", -16.0)
    tf_max = params.floatval("tf_max", 16.0)
    n_tf = params.intval("n_tf", 256, minimum=2)
    probe_width = params.floatval("probe_width", 1.0)
    t_start = params.floatval("time_start", -20.0)
    t_stop = params.floatval("time_stop", 20.0)
    n_time = params.intval("n_time", 256, minimum=2)
    params.finish()
    if probe_width <= 0:
        raise ValidationFailure("probe_width must be positive")
    if kind is not None and w_csv is not None:
        raise ValidationFailure("give only one of 'w' or 'w_csv'")
    if kind is None and w_csv is None:
        kind = "gaussian"
    if w_csv is not None:
        w = _read_phase_grid_csv(w_csv)
        if abs(w.mass - 1.0) > 1e-6:
            raise ValidationFailure(
                "w grid has mass %.9g; normalize it before quantizing" % w.mass)
        label = "csv:%s" % Path(w_csv).name
    else:
        grid = PhaseSpaceGrid.square(tf_min, tf_max, n_tf)
        if kind == "gaussian":
            w = gaussian_distribution(grid, sigma_omega, sigma_b,
                                      center=(center_omega, center_b))
        elif kind == "overlap":
            w = overlap_kernel(a, r, grid)
        else:
            raise ValidationFailure("w must be 'gaussian' or 'overlap'")
        w = w.normalized()
        label = kind
    time_grid = Grid1D.regular(t_start, t_stop, n_time)
    probe = gaussian_probe_signal(probe_width, time_grid)
    kernel = quantize_to_kernel(w, probe)
    diag = density_diagnostics(kernel)
    t = time_grid.points
    lines = ["# t_i,t_j,re,im"]
    entries = kernel.entries
    for i in range(time_grid.count):
        ti = _fmt(t[i])
        row = entries[i]
        for j in range(time_grid.count):
            lines.append(",".join((ti, _fmt(t[j]),
                                   _fmt(row[j].real), _fmt(row[j].imag))))
    _write_text(outdir / "kernel.csv", "\n".join(lines) + "\n")
    report = {"schema": SCHEMA, "w": label, "probe_width": probe_width}
    report.update(diag)
    _write_json(outdir / "diagnostics.json", report)


# ---------------------------------------------------------------------------
# stellar
# ---------------------------------------------------------------------------

def _load_zeros(spec_name, zeros_path):
    if spec_name is not None and zeros_path is not None:
        raise ValidationFailure("give only one of 'zeros' or 'zeros_json'")
    if spec_name is not None:
        if spec_name != "pentagon":
            raise ValidationFailure("named zero fixtures: 'pentagon'")
        return pentagon_zeros()
    try:
        with open(zeros_path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationFailure("cannot read zeros JSON: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ValidationFailure("zeros file is not valid JSON: %s" % exc)
    if (not isinstance(data, list) or not data
            or not all(isinstance(z, dict) and set(z) == {"re", "im"}
                       and all(isinstance(z[k], (int, float))
                               and not isinstance(z[k], bool) for k in ("re", "im"))
                       for z in data)):
        raise ValidationFailure("zeros JSON must be a non-empty list of {re, im}")
    return np.array([complex(z["re"], z["im"]) for z in data])


def _run_stellar(params: _Params, seed: int, outdir: Path) -> None:
    name = params.strval("zeros", None)
    zeros_path = params.strval("zeros_json", None)
    s = params.floatval("s", 0.945)
    probe_a = params.floatval("a", 2.0)
    probe_r = params.floatval("r", 2.0)
    grid_min = params.floatval("grid_min", -4.0)
    grid_max = params.floatval("grid_max", 4.0)
    n_grid = params.intval("n_grid", 512, minimum=16)
    rel_threshold = params.floatval("rel_threshold", 1e-2)
    match_cutoff = params.floatval("match_cutoff", 0.5)
    fold = params.optional_int("symmetry_fold", minimum=2)
    params.finish()
    if name is None and zeros_path is None:
        name = "pentagon"
    zeros = _load_zeros(name, zeros_path)
    if fold is None and name == "pentagon":
        fold = 5
    pars = StellarParams(s=s, probe_a=probe_a, probe_r=probe_r,
                         grid=PhaseSpaceGrid.square(grid_min, grid_max, n_grid))
    report = stellar_experiment(zeros, pars, rel_threshold=rel_threshold,
                                match_cutoff=match_cutoff, symmetry_fold=fold)
    report["schema"] = SCHEMA
    density = stellar_distribution(zeros, s, pars.grid)
    smoothed = portrait(density.distribution, probe_a, probe_r)
    _write_grid_csv(outdir / "w.csv", pars.grid.omega_axis, pars.grid.b_axis,
                    density.distribution.values, PHASE_GRID_HEADER)
    _write_grid_csv(outdir / "portrait.csv", pars.grid.omega_axis,
                    pars.grid.b_axis, smoothed.values, PHASE_GRID_HEADER)
    _write_json(outdir / "report.json", report)


_RUNNERS = {
    "group-check": _run_group_check,
    "gabor": _run_gabor,
    "cylinder": _run_cylinder,
    "quantize": _run_quantize,
    "stellar": _run_stellar,
}


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def run(command: str, config_path, out_dir, strict: bool, threads: int) -> int:
    if command not in _RUNNERS:
        raise ValidationFailure("unknown command %r" % command)
    if threads < 1:
        raise ValidationFailure("--threads must be >= 1")
    seed, raw_params = _load_config(config_path, command)
    out = Path(out_dir)
    if out.exists():
        if not out.is_dir() or any(out.iterdir()):
            raise ValidationFailure(
                "output location %s exists and is not an empty directory" % out)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".weylgabor-", dir=out.parent))
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            _RUNNERS[command](_Params(raw_params), seed, tmp)
    except (ValidationFailure, ValueError) as exc:
        shutil.rmtree(tmp, ignore_errors=True)
        raise ValidationFailure(str(exc))
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    wall = time.perf_counter() - start
    warning_texts = ["%s: %s" % (type(w.message).__name__, w.message)
                     for w in caught]
    manifest = {
        "schema": SCHEMA,
        "command": command,
        "version": __version__,
        "config": {"command": command, "seed": seed, "parameters": raw_params},
        "threads": threads,
        "strict": bool(strict),
        "wall_time_s": wall,
        "warnings": warning_texts,
        "outputs": {f.name: _sha256(f) for f in sorted(tmp.iterdir())},
    }
    _write_json(tmp / "manifest.json", manifest)
    if out.exists():
        out.rmdir()
    tmp.rename(out)
    if strict and warning_texts:
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="weylgabor",
        description="Group checks, time-frequency transforms, quantization, "
                    "and zero-constellation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "group-check": "run the randomized group-law and matrix-oracle suites",
        "gabor": "transform a line signal and report reconstruction quality",
        "cylinder": "circle transform, reproducing kernel grids, reports",
        "quantize": "quantize a phase-space density to an operator kernel",
        "stellar": "zero-constellation density, portrait, minima report",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=descriptions[name])
        p.add_argument("--config", default=None,
                       help="JSON config file (command, seed, parameters)")
        p.add_argument("--out", required=True,
                       help="output directory (created atomically; must not "
                            "already contain files)")
        p.add_argument("--strict", action="store_true",
                       help="exit 3 when the run raises warnings")
        p.add_argument("--threads", type=int, default=1,
                       help="worker count to record; execution is "
                            "single-threaded either way")
    args = parser.parse_args(argv)
    try:
        return run(args.command, args.config, args.out, args.strict, args.threads)
    except ValidationFailure as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}),
              file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"schema": SCHEMA,
                          "error": "internal: %s" % exc}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
