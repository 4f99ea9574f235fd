"""Command-line interface.

Subcommands: `wave` shoots and verifies a single traveling wave, `pde` runs
the reaction-diffusion front and measures its speed, `evans` sweeps the
spectral contour and reports the winding number, `formulas` evaluates the
closed-form predictions, and `verify` runs the acceptance battery.

Machine-readable reports go to stdout as JSON; bulk data goes to CSV files
(17 significant digits, LF line endings, header row) so values round-trip
exactly.  A flat `key = value` file passed with --config supplies defaults;
explicit flags win.  Exit statuses are stable API: 0 success, 1
verification failure, 2 invalid regime, 3 blow-up, 4 resolution failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Callable

import numpy as np

from . import acceptance, analysis, pde, spectral
from . import wave as wave_mod
from .errors import (
    BlowUpError,
    BudgetError,
    ContaminatedMeasurementError,
    ContourResolutionError,
    DomainError,
    NegativityError,
    NonConvergenceError,
    SplittingError,
)
from .model import GeneralParams, Params, general_wave_predictions

__all__ = ["main"]

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_REGIME = 2
EXIT_BLOWUP = 3
EXIT_RESOLUTION = 4
EXIT_USAGE = 64


class _UsageProblem(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    rows = zip(*columns)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _parse_bool(text: str) -> bool:
    flag = text.strip().lower()
    if flag in ("1", "true", "yes", "on"):
        return True
    if flag in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_grid(text: str) -> tuple[int, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected n:xmin:xmax, got {text!r}")
    try:
        return int(parts[0]), float(parts[1]), float(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected t1:t2, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_contour(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected rmin:rmax:n, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_general(text: str) -> GeneralParams:
    values = {}
    for item in text.split(","):
        if "=" not in item:
            raise argparse.ArgumentTypeError(
                f"expected rS=..,rA=..,rI=..,D=.., got {text!r}"
            )
        key, _, raw = item.partition("=")
        try:
            values[key.strip()] = float(raw)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    missing = {"rS", "rA", "rI", "D"} - set(values)
    if missing:
        raise argparse.ArgumentTypeError(
            f"missing general parameters: {', '.join(sorted(missing))}"
        )
    extra = set(values) - {"rS", "rA", "rI", "D"}
    if extra:
        raise argparse.ArgumentTypeError(
            f"unknown general parameters: {', '.join(sorted(extra))}"
        )
    return GeneralParams(r_S=values["rS"], r_A=values["rA"], r_I=values["rI"], D=values["D"])


def _parse_tol(text: str) -> tuple[str, float]:
    key, sep, raw = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return key.strip(), float(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_config(path: str) -> dict[str, str]:
    entries = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                key, sep, value = text.partition("=")
                if not sep:
                    raise _UsageProblem(
                        f"{path}:{lineno}: expected key = value, got {text!r}"
                    )
                entries[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise _UsageProblem(f"cannot read config {path}: {exc}") from exc
    return entries


def _merge(args: argparse.Namespace, table: dict, config: dict[str, str]):
    """Fill unset flags from the config file, then from hard defaults."""
    unknown = set(config) - set(table)
    if unknown:
        raise _UsageProblem(
            f"unknown config keys: {', '.join(sorted(unknown))} "
            f"(valid: {', '.join(sorted(table))})"
        )
    resolved = {}
    for dest, (convert, default) in table.items():
        value = getattr(args, dest)
        if value is None and dest in config:
            try:
                value = convert(config[dest])
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise _UsageProblem(f"config key {dest}: {exc}") from exc
        if value is None:
            value = default
        resolved[dest] = value
    return argparse.Namespace(**resolved)


def _report(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


# ---------------------------------------------------------------- wave

_WAVE_TABLE = {
    "c": (float, 2.0),
    "r": (float, 0.0),
    "i_minus": (float, 2.0),
    "out": (str, "wave.csv"),
}


def cmd_wave(args: argparse.Namespace, config: dict[str, str]) -> int:
    opts = _merge(args, _WAVE_TABLE, config)
    try:
        params = Params(c=opts.c, r=opts.r)
        profile = wave_mod.shoot_wave(opts.i_minus, params)
    except NegativityError as exc:
        bound = 2.0 - analysis.minimal_inactive_limit(opts.c)
        where = "" if exc.z is None else f" at z = {exc.z:.2f}"
        return _fail(
            f"invalid regime: no non-negative wave at c = {opts.c:g}, "
            f"i_minus = {opts.i_minus:g}; rear levels above {bound:g} make "
            f"the approach to the far equilibrium oscillatory, and a fell "
            f"to {exc.value:.2e}{where}",
            EXIT_REGIME,
        )
    except DomainError as exc:
        return _fail(f"invalid regime: {exc}", EXIT_REGIME)
    except (BudgetError, NonConvergenceError) as exc:
        return _fail(f"resolution failure: {exc}", EXIT_RESOLUTION)

    traj = profile.trajectory
    _write_csv(
        opts.out,
        ["z", "a", "b", "i"],
        [traj.zs, traj.states[:, 0], traj.states[:, 1], traj.states[:, 2]],
    )
    report = wave_mod.verify_profile(profile)
    _report(
        {
            "limits": {
                "i_minus_inf": profile.i_minus_inf,
                "i_plus_inf": profile.i_plus_inf,
                "sum_residual": report.limit_sum_residual,
            },
            "residuals": {
                "mass1": report.mass.res1,
                "mass2": report.mass.res2,
                "mass3": report.mass.res3,
                "total_mass": report.mass.total_mass,
            },
            "rates": {
                "mu_minus": profile.mu_minus,
                "mu_minus_rel_err": report.mu_minus_rel_err,
                "mu_plus": profile.mu_plus,
                "mu_plus_rel_err": report.mu_plus_rel_err,
                "tail_prefactor_exp": profile.tail_prefactor_exp,
            },
            "profile": {
                "a_max": profile.a_max,
                "i_at_max": profile.i_at_max,
                "z_first_max": profile.z_first_max,
                "samples": len(traj),
                "csv": opts.out,
            },
            "checks": {
                "i_monotone": report.i_monotone,
                "single_max": report.single_max,
            },
            "passed": report.passed,
        }
    )
    return EXIT_OK if report.passed else EXIT_VERIFICATION


# ----------------------------------------------------------------- pde

_PDE_TABLE = {
    "r": (float, 0.0),
    "amplitude": (float, 0.5),
    "width": (float, 1.0),
    "initial": (str, None),
    "grid": (_parse_grid, (2001, -30.0, 120.0)),
    "t_end": (float, 30.0),
    "threshold": (float, 0.1),
    "window": (_parse_window, None),
    "out": (str, "pde"),
    "save_all": (_parse_bool, False),
}


def _read_initial(path: str) -> tuple[pde.Grid, np.ndarray, np.ndarray]:
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise _UsageProblem(f"cannot read initial data {path}: {exc}") from exc
    names = data.dtype.names
    if names is None or [n.lower() for n in names[:3]] != ["x", "a", "i"]:
        raise _UsageProblem(
            f"initial data {path} must be a CSV with header x,A,I"
        )
    xs = np.asarray(data[names[0]], dtype=float)
    if xs.size < 16:
        raise _UsageProblem("initial data needs at least 16 rows")
    steps = np.diff(xs)
    if steps.min() <= 0 or steps.max() - steps.min() > 1e-9 * steps.max():
        raise _UsageProblem("initial data abscissae must be uniformly increasing")
    grid = pde.Grid(float(xs[0]), float(xs[-1]), xs.size)
    return grid, np.asarray(data[names[1]], float), np.asarray(data[names[2]], float)


def cmd_pde(args: argparse.Namespace, config: dict[str, str]) -> int:
    opts = _merge(args, _PDE_TABLE, config)
    if opts.initial is not None:
        grid, A0, I0 = _read_initial(opts.initial)
    else:
        n, x_min, x_max = opts.grid
        grid = pde.Grid(x_min, x_max, n)
        xs = grid.xs()
        A0 = opts.amplitude * np.exp(-((xs / opts.width) ** 2))
        I0 = np.zeros_like(xs)

    params = Params(c=2.0, r=opts.r)
    try:
        series = pde.simulate(A0, I0, params, grid, t_end=opts.t_end)
    except BlowUpError as exc:
        last = exc.series.times[-1] if exc.series is not None and len(exc.series) else 0.0
        return _fail(
            f"blow-up: {exc} (last finite snapshot at t = {last:g})",
            EXIT_BLOWUP,
        )
    except DomainError as exc:
        return _fail(f"invalid regime: {exc}", EXIT_REGIME)

    window = opts.window if opts.window is not None else (opts.t_end / 2.0, opts.t_end)
    try:
        speed = pde.measure_speed(series, opts.threshold, window)
    except ContaminatedMeasurementError as exc:
        return _fail(f"resolution failure: {exc}", EXIT_RESOLUTION)
    except DomainError as exc:
        return _fail(f"usage: {exc}", EXIT_USAGE)

    if opts.save_all:
        save_times = list(series.times)
    else:
        save_times = sorted({0.0, round(opts.t_end / 2.0, 6), opts.t_end} & set(series.times)) or [
            series.times[0],
            series.times[-1],
        ]
    xs = grid.xs()
    written = []
    for t in save_times:
        A, I = series.at(t)
        path = f"{opts.out}_t{t:g}.csv"
        _write_csv(path, ["x", "A", "I"], [xs, A, I])
        written.append(path)

    A_end, I_end = series.at(series.times[-1])
    x_front = pde.front_position(A_end, grid, opts.threshold)
    plateau = None
    if math.isfinite(x_front):
        sel = (xs >= xs[0] + 10.0) & (xs <= x_front - 20.0)
        if np.count_nonzero(sel) > 0:
            plateau = float(np.mean(I_end[sel]))

    _report(
        {
            "c_est": speed.c_est,
            "window": list(window),
            "residual": speed.residual,
            "plateau": plateau,
            "front_position": None if not math.isfinite(x_front) else x_front,
            "snapshots": written,
        }
    )
    return EXIT_OK


# --------------------------------------------------------------- evans

_EVANS_TABLE = {
    "c": (float, 2.0),
    "r": (float, 0.0),
    "i_minus": (float, 2.0),
    "w_exp": (float, None),
    "L": (float, None),
    "contour": (_parse_contour, (1e-3, 1000.0, 200)),
    "out": (str, "evans.csv"),
    "self_test": (_parse_bool, False),
}


def cmd_evans(args: argparse.Namespace, config: dict[str, str]) -> int:
    opts = _merge(args, _EVANS_TABLE, config)

    samples: list[tuple[complex, complex]] = []
    if opts.self_test:
        theta = np.linspace(0.0, 2.0 * math.pi, 65)
        contour = 0.5 + np.exp(1j * theta)
        contour[-1] = contour[0]

        def probe(g: complex) -> complex:
            samples.append((g, g))
            return g

        setup = None
        expected = 1
        L_used = None
    else:
        try:
            params = Params(c=opts.c, r=opts.r)
            profile = wave_mod.shoot_wave(opts.i_minus, params)
            setup = spectral.make_setup(wave=profile, w_exp=opts.w_exp, L=opts.L)
        except (NegativityError, DomainError) as exc:
            return _fail(f"invalid regime: {exc}", EXIT_REGIME)
        except (BudgetError, NonConvergenceError) as exc:
            return _fail(f"resolution failure: {exc}", EXIT_RESOLUTION)
        r_min, r_max, base_n = opts.contour
        try:
            contour = spectral.contour_of_S(r_min, r_max, base_n)
        except DomainError as exc:
            return _fail(f"usage: {exc}", EXIT_USAGE)
        bound_setup = setup

        def probe(g: complex) -> complex:
            value = spectral.evans(g, bound_setup)
            samples.append((g, value))
            return value

        expected = 0
        L_used = setup.L

    try:
        winding, max_step = spectral.winding_number(setup, contour, fn=probe)
    except ContourResolutionError as exc:
        return _fail(f"resolution failure: {exc}", EXIT_RESOLUTION)
    except (SplittingError, DomainError) as exc:
        return _fail(f"resolution failure: {exc}", EXIT_RESOLUTION)

    gammas = np.array([g for g, _ in samples])
    values = np.array([v for _, v in samples])
    _write_csv(
        opts.out,
        ["re_gamma", "im_gamma", "re_E", "im_E"],
        [gammas.real, gammas.imag, values.real, values.imag],
    )
    _report(
        {
            "winding": winding,
            "max_arg_step": max_step,
            "L": L_used,
            "self_test": bool(opts.self_test),
            "evaluations": len(samples),
            "csv": opts.out,
        }
    )
    return EXIT_OK if winding == expected else EXIT_VERIFICATION


# ------------------------------------------------------------ formulas

_FORMULAS_TABLE = {
    "c": (float, 2.0),
    "r": (float, 0.0),
    "general": (_parse_general, None),
    "json": (_parse_bool, False),
}


def cmd_formulas(args: argparse.Namespace, config: dict[str, str]) -> int:
    opts = _merge(args, _FORMULAS_TABLE, config)
    try:
        Params(c=opts.c, r=opts.r)
    except DomainError as exc:
        raise _UsageProblem(str(exc)) from exc

    c, r = opts.c, opts.r
    i_c = analysis.minimal_inactive_limit(c)
    pairs = [
        (i_minus, analysis.limit_symmetry(i_minus))
        for i_minus in (1.2, 1.5, 1.8, 2.0)
        if i_minus <= 2.0 - i_c
    ]
    rates = {
        f"{i_minus:g}": analysis.decay_rate(i_minus, c) for i_minus, _ in pairs
    }
    i0_grid = [round(i_c + f * (1.0 - i_c), 6) for f in (0.1, 0.3, 0.5, 0.7, 0.9)]
    a_stars = [(i0, analysis.a_star(i0, c, r)) for i0 in i0_grid]

    general = None
    if opts.general is not None:
        predictions = general_wave_predictions(opts.general, c)
        general = {
            "i_c": predictions.i_c,
            "limit_sum": predictions.limit_sum,
            "c_normalized": predictions.c_normalized,
        }

    payload = {
        "c": c,
        "r": r,
        "i_c": i_c,
        "c_min": 2.0,
        "at_minimal_speed": c == 2.0,
        "limit_pairs": [[a, b] for a, b in pairs],
        "decay_rates": rates,
        "a_star": [[i0, a] for i0, a in a_stars],
        "general": general,
    }
    if opts.json:
        _report(payload)
        return EXIT_OK

    print(f"c = {c:g}, r = {r:g}")
    print(f"i_c (minimal inactive level ahead) = {i_c:.6g}")
    if c == 2.0:
        print("note: c = 2 is the minimal front speed; i_c vanishes there")
    elif c > 2.0:
        print(f"note: c exceeds the minimal front speed 2; i_c = 0")
    else:
        print(f"note: below the minimal front speed 2, waves need i <= {2 - i_c:g} behind")
    print("limit pairs (rear level -> front level):")
    for i_minus, i_plus in pairs:
        print(f"  {i_minus:g} -> {i_plus:g}")
    print("rear decay rates mu(i_minus):")
    for key, value in rates.items():
        print(f"  i = {key}: {value:.6g}")
    print("largest admissible start a_star(i0):")
    for i0, a in a_stars:
        print(f"  i0 = {i0:g}: {a:.6g}")
    if general is not None:
        print("general-units predictions:")
        print(f"  i_c = {general['i_c']:.6g}")
        print(f"  limit sum = {general['limit_sum']:.6g}")
        print(f"  normalized speed = {general['c_normalized']:.6g}")
    return EXIT_OK


# -------------------------------------------------------------- verify

_VERIFY_TABLE = {
    "only": (str, None),
    "seed": (int, 2026),
}


def cmd_verify(args: argparse.Namespace, config: dict[str, str]) -> int:
    opts = _merge(args, _VERIFY_TABLE, config)
    tolerances = dict(args.tol or [])
    unknown = set(tolerances) - set(acceptance.CRITERION_NAMES)
    if unknown:
        raise _UsageProblem(
            f"unknown criteria in --tol: {', '.join(sorted(unknown))}"
        )
    results = acceptance.run_all(
        only=opts.only, seed=opts.seed, tolerances=tolerances or None
    )
    if not results:
        raise _UsageProblem(
            f"--only {opts.only!r} matches no criterion "
            f"(valid: {', '.join(acceptance.CRITERION_NAMES)})"
        )
    for result in results:
        print(result.line())
    failures = [result.name for result in results if not result.passed]
    if failures:
        print(f"FAILED: {', '.join(failures)}", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


# ---------------------------------------------------------------- main


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value file with flag defaults")


def _build_parser() -> _Parser:
    parser = _Parser(prog="branchwaves", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_wave = sub.add_parser("wave", help="shoot one traveling wave and verify it")
    p_wave.add_argument("--c", type=float, help="wave speed (default 2)")
    p_wave.add_argument("--r", type=float, help="production rate (default 0)")
    p_wave.add_argument("--i-minus", dest="i_minus", type=float,
                        help="rear inactive limit in (1, 2] (default 2)")
    p_wave.add_argument("--out", help="profile CSV path (default wave.csv)")
    p_wave.set_defaults(handler=cmd_wave)

    p_pde = sub.add_parser("pde", help="run the planar front and measure its speed")
    p_pde.add_argument("--r", type=float, help="production rate (default 0)")
    p_pde.add_argument("--amplitude", type=float, help="bump height (default 0.5)")
    p_pde.add_argument("--width", type=float, help="bump width (default 1)")
    p_pde.add_argument("--initial", help="CSV x,A,I initial data (overrides the bump)")
    p_pde.add_argument("--grid", type=_parse_grid, help="n:xmin:xmax (default 2001:-30:120)")
    p_pde.add_argument("--t-end", dest="t_end", type=float, help="final time (default 30)")
    p_pde.add_argument("--threshold", type=float, help="front tracking level (default 0.1)")
    p_pde.add_argument("--window", type=_parse_window,
                       help="speed-fit window t1:t2 (default second half)")
    p_pde.add_argument("--out", help="snapshot CSV prefix (default pde)")
    p_pde.add_argument("--save-all", dest="save_all", action="store_const", const=True,
                       help="write every snapshot instead of start/middle/end")
    p_pde.set_defaults(handler=cmd_pde)

    p_evans = sub.add_parser("evans", help="sweep the spectral contour and report winding")
    p_evans.add_argument("--c", type=float, help="wave speed (default 2)")
    p_evans.add_argument("--r", type=float, help="production rate (default 0)")
    p_evans.add_argument("--i-minus", dest="i_minus", type=float,
                         help="rear inactive limit (default 2)")
    p_evans.add_argument("--w-exp", dest="w_exp", type=float,
                         help="exponential weight (default c/2)")
    p_evans.add_argument("--L", type=float, help="domain half-length (default auto)")
    p_evans.add_argument("--contour", type=_parse_contour,
                         help="rmin:rmax:n (default 0.001:1000:200)")
    p_evans.add_argument("--out", help="samples CSV path (default evans.csv)")
    p_evans.add_argument("--self-test", dest="self_test", action="store_const", const=True,
                         help="wind the identity map around a circle about 0.5 (expects 1)")
    p_evans.set_defaults(handler=cmd_evans)

    p_formulas = sub.add_parser("formulas", help="evaluate the closed-form predictions")
    p_formulas.add_argument("--c", type=float, help="wave speed (default 2)")
    p_formulas.add_argument("--r", type=float, help="production rate (default 0)")
    p_formulas.add_argument("--general", type=_parse_general,
                            help="general rates rS=..,rA=..,rI=..,D=..")
    p_formulas.add_argument("--json", action="store_const", const=True,
                            help="machine-readable output")
    p_formulas.set_defaults(handler=cmd_formulas)

    p_verify = sub.add_parser("verify", help="run the acceptance battery")
    p_verify.add_argument("--only", help="substring filter on criterion names")
    p_verify.add_argument("--seed", type=int, help="randomized-check seed (default 2026)")
    p_verify.add_argument("--tol", type=_parse_tol, action="append",
                          help="override a criterion tolerance, name=value (repeatable)")
    p_verify.set_defaults(handler=cmd_verify)

    for sp in (p_wave, p_pde, p_evans, p_formulas, p_verify):
        _add_common(sp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args.config) if args.config else {}
        return args.handler(args, config)
    except _UsageProblem as exc:
        return _fail(str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
