"""Acceptance battery: the headline numerical claims as pass/fail checks.

Each criterion measures one quantitative claim end to end, at its stated
tolerance, and reports a single line.  Expensive shared artifacts (the wave
grid, the two reference PDE runs) are cached on an AcceptanceContext so the
battery reuses them across criteria; `run_all` is the entry point used both
by the test suite and by the `verify` command.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis, pde, spectral
from . import wave as wave_mod
from .errors import NegativityError
from .model import GeneralParams, Params, denormalize, general_wave_predictions, normalize

__all__ = [
    "AcceptanceContext",
    "CRITERION_NAMES",
    "CriterionResult",
    "run_all",
]

WAVE_GRID_C = (2.0, 3.0)
WAVE_GRID_R = (0.0, 1.0)
WAVE_GRID_I = (1.2, 1.5, 1.8, 2.0)

PDE_GRID = (-30.0, 120.0, 2001)
PDE_T_END = 30.0
PDE_WINDOW = (15.0, 30.0)
FRONT_THRESHOLD = 0.1


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


class AcceptanceContext:
    """Lazy cache of the artifacts shared between criteria."""

    def __init__(self, seed: int = 2026):
        self.seed = seed
        self._waves: dict[tuple[float, float, float], wave_mod.WaveProfile] | None = None
        self._pde_runs: dict[float, pde.FieldSeries] = {}

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng(self.seed + salt)

    def wave_grid(self) -> dict[tuple[float, float, float], wave_mod.WaveProfile]:
        if self._waves is None:
            self._waves = {}
            for c in WAVE_GRID_C:
                i_c = analysis.minimal_inactive_limit(c)
                for r in WAVE_GRID_R:
                    for i_minus in WAVE_GRID_I:
                        if i_minus <= 2.0 - i_c:
                            self._waves[(c, r, i_minus)] = wave_mod.shoot_wave(
                                i_minus, Params(c=c, r=r)
                            )
        return self._waves

    def pde_run(self, r: float) -> pde.FieldSeries:
        if r not in self._pde_runs:
            grid = pde.Grid(*PDE_GRID)
            xs = grid.xs()
            self._pde_runs[r] = pde.simulate(
                0.5 * np.exp(-(xs**2)),
                np.zeros_like(xs),
                Params(c=2.0, r=r),
                grid,
                t_end=PDE_T_END,
                snapshot_dt=0.5,
            )
        return self._pde_runs[r]


def _rel(got: float, want: float) -> float:
    return abs(got - want) if want == 0 else abs(got - want) / abs(want)


def _admissible_draw(rng: np.random.Generator) -> tuple[float, float, float, float]:
    """Random (c, r, i0, a0) with i0 above the minimal level and a0 admissible."""
    c = rng.uniform(1.5, 4.0)
    r = rng.uniform(0.0, 2.0)
    i_c = analysis.minimal_inactive_limit(c)
    i0 = rng.uniform(i_c + 0.05, 0.95)
    a0 = rng.uniform(0.0, analysis.a_star(i0, c, r))
    return c, r, i0, a0


def _limit_symmetry(ctx: AcceptanceContext, tol: float = 1e-3) -> tuple[bool, str]:
    t0 = time.time()
    waves = ctx.wave_grid()
    worst = max(abs(w.i_plus_inf + key[2] - 2.0) for key, w in waves.items())
    per_wave = (time.time() - t0) / len(waves)
    return worst < tol, (
        f"max |i+inf + i-inf - 2| = {worst:.2e} over {len(waves)} waves "
        f"(tol {tol:g}, {per_wave:.2f}s/wave)"
    )


def _attractor_formula(ctx: AcceptanceContext, tol: float = 1e-4) -> tuple[bool, str]:
    rng = ctx.rng(2)
    t0 = time.time()
    worst = 0.0
    for _ in range(50):
        c, r, i0, a0 = _admissible_draw(rng)
        _, limit = wave_mod.shoot_from_max(a0, i0, Params(c=c, r=r))
        worst = max(worst, abs(limit - analysis.i_plus_infinity(a0, i0, c, r)))
    elapsed = time.time() - t0
    return worst < tol and elapsed < 60.0, (
        f"max |measured limit - closed form| = {worst:.2e} over 50 random "
        f"starts (tol {tol:g}, {elapsed:.0f}s of 60s budget)"
    )


def _threshold_consistency(ctx: AcceptanceContext, tol: float = 1e-10) -> tuple[bool, str]:
    rng = ctx.rng(3)
    worst = 0.0
    for _ in range(100):
        c = rng.uniform(1.5, 4.0)
        r = rng.uniform(0.0, 2.0)
        i_c = analysis.minimal_inactive_limit(c)
        i0 = rng.uniform(i_c + 0.05, 0.95)
        alpha = analysis.alpha_threshold(i0, c, r)
        worst = max(worst, abs(analysis.i_plus_infinity(alpha, i0, c, r) - i_c))
        a_max = analysis.a_at_first_max(2.0 - i_c, i0, c, r)
        worst = max(worst, abs(a_max - alpha))
    return worst < tol, (
        f"max defect of threshold identities = {worst:.2e} over 100 random "
        f"(i0, c, r) (tol {tol:g})"
    )


def _decay_rates(ctx: AcceptanceContext, tol: float = 0.02) -> tuple[bool, str]:
    prefactor_band = 0.15
    worst_rate = 0.0
    prefactors = []
    for (c, r, i_minus), w in ctx.wave_grid().items():
        expected = analysis.decay_rate(i_minus, c)
        worst_rate = max(worst_rate, _rel(w.mu_minus, expected))
        if w.tail_prefactor_exp is not None:
            prefactors.append(w.tail_prefactor_exp)
    pre_ok = all(abs(p - 1.0) <= prefactor_band for p in prefactors)
    pre_txt = ", ".join(f"{p:.3f}" for p in prefactors) or "none"
    return worst_rate < tol and pre_ok, (
        f"max rear-rate rel err = {worst_rate:.2e} (tol {tol:g}); critical "
        f"tail prefactor exponents [{pre_txt}] within 1 +- {prefactor_band:g}"
    )


def _triangles(ctx: AcceptanceContext, tol: float = 1e-6) -> tuple[bool, str]:
    rng = ctx.rng(5)
    escapes = 0
    samples = 0
    for _ in range(200):
        c, r, i0, a0 = _admissible_draw(rng)
        traj, _ = wave_mod.shoot_from_max(a0, i0, Params(c=c, r=r))
        i_c = analysis.minimal_inactive_limit(c)
        for a, b, i in traj.states:
            level = min(max(i, i_c), 1.0 - 1e-12)
            if not analysis.triangle_contains(
                analysis.triangle(level, c), (a, b), tol=tol
            ):
                escapes += 1
        samples += len(traj)
    nested = True
    for _ in range(50):
        c = rng.uniform(1.5, 4.0)
        i_c = analysis.minimal_inactive_limit(c)
        lo, hi = sorted(rng.uniform(i_c + 1e-3, 0.98, size=2))
        if hi - lo < 1e-9:
            hi = min(hi + 1e-3, 0.985)
        outer, inner = analysis.triangle(lo, c), analysis.triangle(hi, c)
        for vertex in (inner.v0, inner.v1, inner.apex):
            nested &= analysis.triangle_contains(outer, vertex, tol=1e-9)
    return escapes == 0 and nested, (
        f"{escapes} escapes beyond slack {tol:g} across {samples} samples of "
        f"200 trajectories; vertex nesting over 50 level pairs "
        f"{'holds' if nested else 'FAILS'}"
    )


def _mass_identities(ctx: AcceptanceContext, tol: float = 1e-4) -> tuple[bool, str]:
    worst = 0.0
    for w in ctx.wave_grid().values():
        res = analysis.mass_residuals(
            w.trajectory.zs, w.trajectory.states, w.params, endpoint_tol=1e-6
        )
        worst = max(worst, res.res1, res.res2, res.res3)
    return worst < tol, (
        f"max of the three identity residuals = {worst:.2e} over "
        f"{len(ctx.wave_grid())} waves (tol {tol:g})"
    )


def _front_stats(ctx: AcceptanceContext, r: float) -> tuple[float, float]:
    series = ctx.pde_run(r)
    c_est = pde.measure_speed(series, FRONT_THRESHOLD, PDE_WINDOW).c_est
    A, I = series.at(PDE_T_END)
    xs = series.grid.xs()
    x_front = pde.front_position(A, series.grid, FRONT_THRESHOLD)
    sel = (xs >= 10.0) & (xs <= x_front - 20.0)
    plateau = float(np.mean(I[sel]))
    return c_est, plateau


def _pde_front(ctx: AcceptanceContext, tol: float = 0.05) -> tuple[bool, str]:
    plateau_tol = 0.02
    parts = []
    ok = True
    for r in (0.0, 1.0):
        c_est, plateau = _front_stats(ctx, r)
        ok &= _rel(c_est, 2.0) < tol and _rel(plateau, 2.0) < plateau_tol
        parts.append(
            f"r={r:g}: c_est={c_est:.4f} ({100 * _rel(c_est, 2.0):.1f}% of "
            f"{100 * tol:.0f}%), plateau={plateau:.4f} "
            f"({100 * _rel(plateau, 2.0):.2f}% of {100 * plateau_tol:.0f}%)"
        )
    return ok, "; ".join(parts)


def _pde_ode_shape(ctx: AcceptanceContext, tol: float = 0.05) -> tuple[bool, str]:
    series = ctx.pde_run(0.0)
    c_est = pde.measure_speed(series, FRONT_THRESHOLD, PDE_WINDOW).c_est
    prof = pde.comoving_profile(series, PDE_T_END, c_est, FRONT_THRESHOLD)
    sel = (prof.z >= -10.0) & (prof.z <= 10.0)
    zq, a_pde, i_pde = prof.z[sel], prof.a[sel], prof.i[sel]

    w = ctx.wave_grid()[(2.0, 0.0, 2.0)]
    wzs, wst = w.trajectory.zs, w.trajectory.states
    # the comoving profile anchors z = 0 at the threshold crossing while the
    # wave anchors its maximum there; start the scan from the maxima offset
    s0 = float(zq[np.argmax(a_pde)])
    best_a = math.inf
    best_i = math.inf
    for shift in s0 + np.arange(-1.0, 1.0 + 1e-9, 0.01):
        a_ode = np.interp(zq - shift, wzs, wst[:, 0])
        sup_a = float(np.max(np.abs(a_pde - a_ode)))
        if sup_a < best_a:
            best_a = sup_a
            i_ode = np.interp(zq - shift, wzs, wst[:, 2])
            best_i = float(np.max(np.abs(i_pde - i_ode)))
    rel_a = best_a / w.a_max
    rel_i = best_i / 2.0
    return rel_a < tol and rel_i < tol, (
        f"sup-norm misfit on z in [-10, 10] after optimal shift: active "
        f"{100 * rel_a:.2f}%, inactive {100 * rel_i:.2f}% (tol {100 * tol:.0f}%)"
    )


def _evans_winding(ctx: AcceptanceContext, tol: float = 0.1) -> tuple[bool, str]:
    parts = []
    ok = True
    for r in (0.0, 1.0):
        setup = spectral.make_setup(wave=ctx.wave_grid()[(2.0, r, 2.0)])
        contour = spectral.contour_of_S()
        winding, max_step = spectral.winding_number(setup, contour)
        ok &= winding == 0
        parts.append(
            f"r={r:g}: winding={winding}, max arg step {max_step:.3f} rad, "
            f"closure deviation enforced < {tol:g}"
        )
    return ok, "; ".join(parts)


def _oscillatory_exclusion(ctx: AcceptanceContext, tol: float = 1e-6) -> tuple[bool, str]:
    try:
        wave_mod.shoot_wave(1.5, Params(c=1.0, r=0.0))
    except NegativityError as exc:
        depth = exc.value
        # the integration stops on the downward crossing of -tol itself, so
        # the recorded depth equals -tol up to the event locator's rounding
        # (z to 1e-10, hence a to ~1e-13)
        return depth is not None and depth <= -tol + 1e-12, (
            f"(c=1, i-inf=1.5) rejected: a falls to {depth:.6e}, reaching "
            f"the -{tol:g} floor"
        )
    return False, "(c=1, i-inf=1.5) unexpectedly produced a non-negative wave"


def _rescaling(ctx: AcceptanceContext, tol: float = 1e-12) -> tuple[bool, str]:
    rng = ctx.rng(11)
    worst = 0.0
    for _ in range(100):
        g = GeneralParams(
            r_S=rng.uniform(0.2, 5.0),
            r_A=rng.uniform(0.2, 5.0),
            r_I=rng.uniform(0.0, 5.0),
            D=rng.uniform(0.2, 5.0),
        )
        c = rng.uniform(0.2, 6.0)
        direct = general_wave_predictions(g, c)

        # density_factor converts general densities to normalized ones, so
        # normalized predictions map back by division
        p, s = normalize(g)
        speed_factor = s.space_factor * s.time_factor
        c_n = c / speed_factor
        i_c_mapped = analysis.minimal_inactive_limit(c_n) / s.density_factor
        limit_sum_mapped = 2.0 / s.density_factor
        worst = max(
            worst,
            _rel(direct.i_c, i_c_mapped),
            _rel(direct.limit_sum, limit_sum_mapped),
            _rel(direct.c_normalized, c_n),
        )
        span = 2.0 * g.r_A / g.r_S - direct.i_c
        i_limit = direct.i_c + rng.uniform(0.01, 1.0) * span
        rate_mapped = (
            analysis.decay_rate(i_limit * s.density_factor, c_n) / s.space_factor
        )
        worst = max(worst, _rel(direct.decay_rate(i_limit), rate_mapped))

        back = denormalize(p, s)
        for got, want in zip(
            (back.r_S, back.r_A, back.r_I, back.D), (g.r_S, g.r_A, g.r_I, g.D)
        ):
            worst = max(worst, _rel(got, want))
    return worst < tol, (
        f"max rel deviation between direct and normalize-then-map routes = "
        f"{worst:.2e} over 100 random parameter sets (tol {tol:g})"
    )


_CRITERIA: list[tuple[str, Callable]] = [
    ("limit-symmetry", _limit_symmetry),
    ("attractor-formula", _attractor_formula),
    ("threshold-consistency", _threshold_consistency),
    ("decay-rates", _decay_rates),
    ("triangles", _triangles),
    ("mass-identities", _mass_identities),
    ("pde-front", _pde_front),
    ("pde-ode-shape", _pde_ode_shape),
    ("evans-winding", _evans_winding),
    ("oscillatory-exclusion", _oscillatory_exclusion),
    ("rescaling", _rescaling),
]

CRITERION_NAMES = tuple(name for name, _ in _CRITERIA)


def run_all(
    only: str | None = None,
    seed: int = 2026,
    tolerances: dict[str, float] | None = None,
    ctx: AcceptanceContext | None = None,
) -> list[CriterionResult]:
    """Run the battery; `only` filters criteria by substring match on name.

    `tolerances` overrides the headline tolerance per criterion name.  A
    criterion that raises is reported as failed, not propagated.
    """
    if ctx is None:
        ctx = AcceptanceContext(seed=seed)
    overrides = tolerances or {}
    results = []
    for name, fn in _CRITERIA:
        if only is not None and only not in name:
            continue
        t0 = time.time()
        kwargs = {"tol": overrides[name]} if name in overrides else {}
        try:
            passed, detail = fn(ctx, **kwargs)
        except Exception as exc:
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CriterionResult(name, passed, detail, time.time() - t0))
    return results
