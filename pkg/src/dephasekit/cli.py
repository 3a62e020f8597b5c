"""Command-line front door.

Subcommands: ``w-curve``, ``t2-scan``, ``sequence-table``, ``filter-dump``,
``trap-shift``, ``mc-compare``.  All units are SI in flags (seconds, Hz,
tesla); no implicit scaling.  Outputs are data files (CSV with ``#``
provenance headers, or JSON with a provenance object), written atomically;
identical invocations produce byte-identical files.  Exit codes: 0 ok,
1 validation flagged (mc-compare), 2 configuration error, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import __version__, coherence, oracle, sequences, spectra, trap
from .quadrature import QuadratureError

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- specs

def parse_spectrum_spec(spec: str) -> spectra.PowerSpectrum:
    """'paper-yag-1f' | 'white:s0=4,f_ir=1e-4,f_uv=1e4' | 'power_law:a=..,alpha=..,
    f_ir=..,f_uv=..' | 'lorentzian:a=..,f_c=..,f_ir=..,f_uv=..' | 'csv:PATH'."""
    spec = spec.strip()
    name, _, arg = spec.partition(":")
    name = name.lower()
    if name == spectra.PAPER_PRESET_NAME:
        if arg:
            raise ConfigError(f"preset takes no arguments: {spec!r}")
        shift = trap.differential_light_shift(trap.preset())
        return spectra.paper_intensity_spectrum(shift.e_l)
    if name == "csv":
        if not arg:
            raise ConfigError("csv spectrum needs a path: csv:PATH")
        return spectra.from_csv(arg)
    try:
        kv = dict(item.split("=", 1) for item in arg.split(",") if item)
        kv = {k.strip().lower(): float(v) for k, v in kv.items()}
    except ValueError as exc:
        raise ConfigError(f"bad spectrum parameters in {spec!r}") from exc
    try:
        if name == "white":
            return spectra.make_white(kv.pop("s0"), kv.pop("f_ir"), kv.pop("f_uv"))
        if name == "power_law":
            return spectra.make_power_law(kv.pop("a"), kv.pop("alpha"),
                                          kv.pop("f_ir"), kv.pop("f_uv"))
        if name == "lorentzian":
            return spectra.make_lorentzian(kv.pop("a"), kv.pop("f_c"),
                                           kv.pop("f_ir"), kv.pop("f_uv"))
    except KeyError as exc:
        raise ConfigError(f"spectrum spec {spec!r} missing parameter {exc}") from exc
    except spectra.SpectrumError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown spectrum spec {spec!r}")


def parse_time_grid(spec: str) -> list[float]:
    """'start:stop:step' inclusive of stop up to half a step."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"time grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"non-numeric time grid {spec!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigError(f"empty or invalid time grid {spec!r}")
    n = int(math.floor((stop - start) / step + 0.5)) + 1
    grid = [start + i * step for i in range(n)]
    if len(grid) < 2:
        raise ConfigError(f"time grid {spec!r} has fewer than 2 points")
    return grid


def parse_time_list(spec: str) -> list[float]:
    try:
        ts = [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad time list {spec!r}") from exc
    if not ts or any(b <= a for a, b in zip(ts[:-1], ts[1:])):
        raise ConfigError(f"time list must be nonempty and strictly increasing: {spec!r}")
    return ts


def parse_n_list(spec: str) -> list[int]:
    """'1:50' or '10:100:10' or '1,2,5,10'."""
    try:
        if ":" in spec:
            parts = [int(p) for p in spec.split(":")]
            if len(parts) == 2:
                lo, hi, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                lo, hi, step = parts
            else:
                raise ConfigError(f"bad n range {spec!r}")
            if step <= 0 or hi < lo:
                raise ConfigError(f"empty n range {spec!r}")
            return list(range(lo, hi + 1, step))
        return [int(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"non-integer n in {spec!r}") from exc


# ---------------------------------------------------------------- output

def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".dephasekit-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(path: str | None, text: str) -> None:
    if path:
        _atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _provenance(args: argparse.Namespace, **extra) -> dict:
    resolved = {k: v for k, v in sorted(vars(args).items())
                if k not in ("func", "_option_defaults") and v is not None}
    return {"tool": "dephasekit", "version": __version__,
            "command": args.command, "config": resolved, **extra}


def _csv_text(header_obj: dict, columns: list[str], rows) -> str:
    lines = [f"# {json.dumps(header_obj, sort_keys=True)}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def _gnuplot_script(data_path: str, xlabel: str, ylabel: str, logx: bool) -> str:
    lines = ["set datafile separator ','",
             f"set xlabel '{xlabel}'", f"set ylabel '{ylabel}'",
             "set key off", "set grid"]
    if logx:
        lines.append("set logscale x")
    lines.append(f"plot '{os.path.basename(data_path)}' using 1:2 with lines")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- subcommands

def _resolve_spectrum(args) -> spectra.PowerSpectrum:
    s = parse_spectrum_spec(args.spectrum)
    if getattr(args, "calibrate", False):
        s = coherence.calibrate_to_t2(s, t2_target=args.calibrate_t2)
    return s


def cmd_w_curve(args) -> int:
    _require(args, "spectrum", "seq", "t")
    s = _resolve_spectrum(args)
    seq = sequences.parse_sequence_spec(args.seq)
    grid = parse_time_grid(args.t)
    curve = coherence.decoherence_curve(s, seq, grid, tol=args.tol)
    prov = _provenance(args, spectrum_id=curve.spectrum_id, sequence_id=curve.sequence_id)
    if args.format == "json":
        payload = {"provenance": prov,
                   "t_s": list(curve.times), "w": list(curve.w)}
        _emit(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        _emit(args.out, _csv_text(prov, ["t_s", "w"], zip(curve.times, curve.w)))
    if args.gnuplot:
        if not args.out:
            raise ConfigError("--gnuplot requires --out")
        _atomic_write(args.out + ".gp",
                      _gnuplot_script(args.out, "t (s)", "W(t)", logx=False))
    return EXIT_OK


def cmd_t2_scan(args) -> int:
    _require(args, "spectrum", "family", "n", "t-max")
    s = _resolve_spectrum(args)
    n_list = parse_n_list(args.n)
    fid_res = coherence.coherence_time(s, sequences.FID, args.t_max, tol=args.tol)
    results = coherence.pulse_scan(s, args.family, n_list, args.t_max, tol=args.tol)
    rows = []
    for n, r in zip(n_list, results):
        ratio = r.t2 / fid_res.t2 if (r.converged and fid_res.converged) else math.nan
        rows.append((n, r.t2, ratio, r.converged, r.error or ""))
    prov = _provenance(args, spectrum_id=s.spectrum_id, fid_t2_s=fid_res.t2,
                       fid_converged=fid_res.converged)
    if args.format == "json":
        payload = {"provenance": prov,
                   "scan": [{"n": n, "t2_s": t2, "ratio_to_fid": ratio,
                             "converged": conv, "error": err or None}
                            for n, t2, ratio, conv, err in rows]}
        _emit(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        _emit(args.out, _csv_text(prov, ["n", "t2_s", "ratio_to_fid"],
                                  [(n, t2, ratio) for n, t2, ratio, _, _ in rows]))
    if args.gnuplot:
        if not args.out:
            raise ConfigError("--gnuplot requires --out")
        _atomic_write(args.out + ".gp",
                      _gnuplot_script(args.out, "n pulses", "T2 (s)", logx=True))
    return EXIT_OK


def cmd_sequence_table(args) -> int:
    _require(args, "seq")
    seq = sequences.parse_sequence_spec(args.seq)
    prov = _provenance(args, sequence_id=seq.sequence_id, n_pulses=seq.n_pulses)
    if args.format == "json":
        payload = {"provenance": prov, "family": seq.family,
                   "n_pulses": seq.n_pulses, "fractions": list(seq.fractions)}
        _emit(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        _emit(args.out, _csv_text(prov, ["k", "fraction"],
                                  list(enumerate(seq.fractions, start=1))))
    return EXIT_OK


def cmd_filter_dump(args) -> int:
    _require(args, "seq", "x")
    seq = sequences.parse_sequence_spec(args.seq)
    grid = parse_time_grid(args.x)
    vals = sequences.filter_generic(seq, grid)
    prov = _provenance(args, sequence_id=seq.sequence_id)
    if args.format == "json":
        payload = {"provenance": prov, "x": list(grid), "f": [float(v) for v in vals]}
        _emit(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        _emit(args.out, _csv_text(prov, ["x", "f"],
                                  zip(grid, (float(v) for v in vals))))
    return EXIT_OK


def cmd_trap_shift(args) -> int:
    cfg = trap.load_config(args.trap_config) if args.trap_config else trap.preset(args.preset)
    shift = trap.differential_light_shift(cfg)
    payload = {
        "provenance": _provenance(args, preset=cfg.name or None),
        "e_l_rad_s": shift.e_l,
        "e_total_rad_s": shift.e_total,
        "e_hyperfine_rad_s": cfg.e_hyperfine,
        "peak_intensity_w_m2": cfg.peak_intensity,
        "trap_depth_rad_s": cfg.trap_depth,
    }
    if args.pointing:
        try:
            gamma_m, freq_hz = (float(v) for v in args.pointing.split(":"))
        except ValueError as exc:
            raise ConfigError(f"--pointing needs METERS:HZ, got {args.pointing!r}") from exc
        payload["adiabaticity_ratio"] = trap.adiabaticity_ratio(cfg, gamma_m, freq_hz)
        payload["pointing_amplitude_m"] = gamma_m
        payload["pointing_frequency_hz"] = freq_hz
    _emit(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def cmd_mc_compare(args) -> int:
    _require(args, "spectrum", "seq", "t")
    s = _resolve_spectrum(args)
    seq = sequences.parse_sequence_spec(args.seq)
    t_grid = parse_time_list(args.t)
    try:
        report = oracle.compare_mc_spectral(s, seq, t_grid, dt=args.dt,
                                            trials=args.trials, seed=args.seed,
                                            tol=args.tol, z_threshold=args.z_threshold)
    except oracle.OracleError as exc:
        raise ConfigError(str(exc)) from exc
    payload = {"provenance": _provenance(args), **report.to_dict()}
    _emit(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return EXIT_OK if report.passed else EXIT_FLAGGED


# ---------------------------------------------------------------- wiring

def _load_config_file(path: str) -> dict:
    """JSON object or flat key=value lines; keys use the long-flag spelling."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: JSON config must be an object")
        return data
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    data = _load_config_file(args.config)
    defaults = getattr(args, "_option_defaults", {})
    for key, value in data.items():
        attr = key.replace("-", "_")
        if attr not in defaults:
            raise ConfigError(f"{args.config}: unknown option {key!r}")
        if getattr(args, attr) != defaults[attr]:
            continue  # flag explicitly given on the command line wins
        current = defaults[attr]
        if isinstance(current, bool) or isinstance(value, bool):
            value = value in (True, "1", "true", "yes")
        elif isinstance(value, str) and isinstance(current, (int, float)):
            value = type(current)(value)
        setattr(args, attr, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            raise ConfigError(f"missing required option --{name} "
                              f"(flag or config file)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dephasekit",
                                description="Qubit dephasing calculator: W(t), T2, "
                                            "filter functions, trap shifts, MC checks")
    p.add_argument("--version", action="version", version=f"dephasekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spectrum=True, fmt=True):
        sp.add_argument("--config", help="JSON or key=value config file; flags override")
        sp.add_argument("--out", help="output path (default: stdout)")
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if spectrum:
            sp.add_argument("--spectrum",
                            help="paper-yag-1f | white:s0=..,f_ir=..,f_uv=.. | "
                                 "power_law:a=..,alpha=..,f_ir=..,f_uv=.. | "
                                 "lorentzian:a=..,f_c=..,f_ir=..,f_uv=.. | csv:PATH")
            sp.add_argument("--calibrate", action="store_true",
                            help="rescale amplitude so FID T2 equals --calibrate-t2")
            sp.add_argument("--calibrate-t2", type=float, default=1.0,
                            help="target FID T2 for --calibrate (s)")

    def finalize(sp):
        defaults = {a.dest: a.default for a in sp._actions
                    if a.dest not in ("help", "==SUPPRESS==")}
        sp.set_defaults(_option_defaults=defaults)

    sp = sub.add_parser("w-curve", help="decoherence function on a time grid")
    common(sp)
    sp.add_argument("--seq",
                    help="fid | se | cpmg:N | pdd:N | udd:N | cdd:l=L | custom:F1,F2,...")
    sp.add_argument("--t", help="time grid start:stop:step (s)")
    sp.add_argument("--tol", type=float, default=coherence.DEFAULT_TOL_CURVE)
    sp.add_argument("--gnuplot", action="store_true",
                    help="also write a gnuplot script next to --out")
    sp.set_defaults(func=cmd_w_curve)
    finalize(sp)

    sp = sub.add_parser("t2-scan", help="T2 versus pulse count")
    common(sp)
    sp.add_argument("--family", choices=("cpmg", "pdd", "udd", "cdd"),
                    help="sequence family (for cdd, n values are levels)")
    sp.add_argument("--n", help="pulse counts: A:B[:STEP] or comma list")
    sp.add_argument("--t-max", type=float, help="scan ceiling (s)")
    sp.add_argument("--tol", type=float, default=coherence.DEFAULT_TOL_SCAN)
    sp.add_argument("--gnuplot", action="store_true")
    sp.set_defaults(func=cmd_t2_scan)
    finalize(sp)

    sp = sub.add_parser("sequence-table", help="pulse-time fractions of a sequence")
    common(sp, spectrum=False)
    sp.add_argument("--seq")
    sp.set_defaults(func=cmd_sequence_table)
    finalize(sp)

    sp = sub.add_parser("filter-dump", help="generic filter function on a grid")
    common(sp, spectrum=False)
    sp.add_argument("--seq")
    sp.add_argument("--x", help="dimensionless grid start:stop:step")
    sp.set_defaults(func=cmd_filter_dump)
    finalize(sp)

    sp = sub.add_parser("trap-shift", help="differential light shift for a trap config")
    common(sp, spectrum=False, fmt=False)
    sp.add_argument("--preset", default="rb87-yag-500uK")
    sp.add_argument("--trap-config", help="JSON TrapConfig or atom-data file")
    sp.add_argument("--pointing", help="METERS:HZ pointing fluctuation to diagnose")
    sp.set_defaults(func=cmd_trap_shift)
    finalize(sp)

    sp = sub.add_parser("mc-compare", help="Monte Carlo vs spectral W(t) z-report")
    common(sp, fmt=False)
    sp.add_argument("--seq")
    sp.add_argument("--t", help="comma-separated times (s)")
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--dt", type=float, default=None, help="sample step (default 1/(8 f_uv))")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=coherence.DEFAULT_TOL_CURVE)
    sp.add_argument("--z-threshold", type=float, default=3.5)
    sp.set_defaults(func=cmd_mc_compare)
    finalize(sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the config-error code
        return int(exc.code) if exc.code else 0
    try:
        _apply_config_file(args)
        return args.func(args)
    except (ConfigError, spectra.SpectrumError, sequences.SequenceError,
            trap.TrapError, oracle.OracleError, OSError, json.JSONDecodeError) as exc:
        print(f"dephasekit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ValueError, ArithmeticError) as exc:
        print(f"dephasekit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
