"""Traveling-wave construction by shooting.

A profile is grown from a seed on the one-dimensional unstable manifold
of the invaded equilibrium, followed forward until the active density
peaks (first b = 0 down-crossing) and then decays into the attracting
equilibrium continuum. The profile is re-anchored so the maximum sits at
z = 0, the limits are measured, and both tail rates are fitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import analysis
from .errors import BudgetError, DomainError, NegativityError, NonConvergenceError
from .model import Params, WaveState, wave_rhs
from .odeint import Event, EventRecord, IntegratorOptions, Trajectory, integrate

# event indices used by the shooting runs
_EV_MAX = 0
_EV_NEG = 1
_EV_STOP = 2

# pure-exponential tail fitting is hopeless once the two decay rates at
# the forward limit are this close to collision
CRITICAL_DISC = 0.01


@dataclass(frozen=True)
class ShootingOptions:
    """Knobs for :func:`shoot_wave` and :func:`shoot_from_max`.

    eps: seed offset along the unstable eigendirection.
    stop_tol: sup-norm of (a, b) below which the run counts as converged.
    z_budget: give up (budget error) beyond this much pseudo-time.
    negativity_tol: a below -negativity_tol means no non-negative wave.
    """

    eps: float = 1e-7
    stop_tol: float = 1e-10
    z_budget: float = 1000.0
    negativity_tol: float = 1e-6
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)

    def __post_init__(self):
        if not 0.0 < self.eps <= 1e-4:
            raise DomainError(f"eps must lie in (0, 1e-4], got {self.eps}")
        for name in ("stop_tol", "z_budget", "negativity_tol"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")


@dataclass
class WaveProfile:
    """A computed traveling wave, anchored so the a-maximum sits at z = 0.

    z_first_max is the pseudo-time from the seed to that maximum (the
    amount the raw shooting coordinate was shifted by). mu_minus is the
    fitted growth rate of a on the rising tail, mu_plus the fitted decay
    rate on the falling tail; in the near-critical regime mu_plus is
    pinned at -c/2 and tail_prefactor_exp carries the fitted exponent of
    the algebraic prefactor (1 for a z e^{-cz/2} tail).
    """

    trajectory: Trajectory
    i_minus_inf: float
    i_plus_inf: float
    z_first_max: float
    a_max: float
    i_at_max: float
    mu_minus: float
    mu_plus: float
    params: Params
    tail_prefactor_exp: float | None = None


def seed_unstable_manifold(i_minus_inf: float, p: Params, eps: float = 1e-7) -> WaveState:
    """Point at distance ~eps from (0, 0, i_minus_inf) along its unstable direction.

    The eigendirection is normalized so its a-component equals +1,
    selecting the branch that enters a > 0.
    """
    if i_minus_inf <= 1.0:
        raise DomainError(
            f"level {i_minus_inf} leaves no unstable direction; need i > 1"
        )
    if i_minus_inf > 2.0:
        raise DomainError(f"level {i_minus_inf} exceeds the admissible maximum 2")
    if not 0.0 < eps <= 1e-4:
        raise DomainError(f"eps must lie in (0, 1e-4], got {eps}")
    K = i_minus_inf
    lam = analysis.fixed_point_spectrum(K, p.c).lambda_plus
    e_hat = np.array([1.0, lam, -(K + p.r) / (p.c * lam)])
    return WaveState(eps, eps * lam, i_minus_inf + eps * e_hat[2])


def _shooting_events(opts: ShootingOptions) -> list[Event]:
    return [
        Event(lambda z, y: y[1], direction=-1),
        Event(lambda z, y: y[0] + opts.negativity_tol, direction=-1, terminal=True),
        Event(
            lambda z, y: max(abs(y[0]), abs(y[1])) - opts.stop_tol,
            direction=-1,
            terminal=True,
        ),
    ]


def _run_shoot(y0, p: Params, opts: ShootingOptions) -> Trajectory:
    traj = integrate(
        lambda z, y: wave_rhs(y, p),
        y0,
        (0.0, opts.z_budget),
        opts.integrator,
        _shooting_events(opts),
    )
    for rec in traj.events:
        if rec.index == _EV_NEG:
            raise NegativityError(
                f"a fell below -{opts.negativity_tol:g} at z = {rec.z:.3f}; "
                "the trajectory spirals and no non-negative wave exists here",
                z=rec.z,
                value=rec.state[0],
                trajectory=traj,
            )
    return traj


def _stopped(traj: Trajectory) -> bool:
    return any(rec.index == _EV_STOP for rec in traj.events)


def _check_limit_band(traj: Trajectory, p: Params) -> float:
    i_limit = float(traj.states[-1, 2])
    i_c = analysis.minimal_inactive_limit(p.c)
    if not (i_c - 1e-6 <= i_limit < 1.0):
        raise NonConvergenceError(
            f"converged to i = {i_limit:.6f}, outside [{i_c:g} - 1e-6, 1)",
            traj,
        )
    return i_limit


def _loglinear_slope(x, y) -> float:
    return float(np.polyfit(x, y, 1)[0])


def _fit_tails(traj: Trajectory, a_max: float, i_plus: float, p: Params,
               eps: float) -> tuple[float, float, float | None]:
    """Tail rates from least squares on log a (zs anchored at the maximum)."""
    zs = traj.zs
    a = traj.states[:, 0]
    lo, hi = 1e-8 * a_max, 1e-3 * a_max

    rise = (zs < 0) & (a >= max(3.0 * eps, lo)) & (a <= hi)
    if np.count_nonzero(rise) < 8:
        raise NonConvergenceError("rising tail too sparse to fit a rate", traj)
    mu_minus = _loglinear_slope(zs[rise], np.log(a[rise]))

    decay = (zs > 0) & (a >= lo) & (a <= hi)
    if np.count_nonzero(decay) < 8:
        raise NonConvergenceError("decaying tail too sparse to fit a rate", traj)

    disc = p.c * p.c / 4.0 + i_plus - 1.0
    if disc > CRITICAL_DISC:
        mu_plus = _loglinear_slope(zs[decay], np.log(a[decay]))
        return mu_minus, mu_plus, None
    # rates nearly collide: fit the algebraic prefactor of (z+d)^p e^{-cz/2}.
    # The offset d soaks up the constant term of the true (C1 z + C2)
    # prefactor; without it the log-log slope overshoots 1 badly at any
    # reachable depth.
    zw = zs[decay]
    weighted = np.log(a[decay]) + (p.c / 2.0) * zw

    def sse(d):
        slope, intercept = np.polyfit(np.log(zw + d), weighted, 1)
        return float(np.sum((weighted - slope * np.log(zw + d) - intercept) ** 2))

    best = minimize_scalar(sse, bounds=(-zw[0] + 0.5, 50.0), method="bounded")
    prefactor_exp = _loglinear_slope(np.log(zw + best.x), weighted)
    return mu_minus, -p.c / 2.0, prefactor_exp


def shoot_wave(i_minus_inf: float, p: Params, opts: ShootingOptions | None = None) -> WaveProfile:
    """Construct the wave connecting level i_minus_inf to its forward limit.

    Seeds the unstable manifold, integrates forward recording the first
    b = 0 down-crossing, and stops once sup|(a, b)| < opts.stop_tol.
    Raises NegativityError when a dips below -negativity_tol (expected
    above the critical level 2 - i_c, where every connection spirals) and
    BudgetError when the maximum or the convergence never arrives within
    opts.z_budget.
    """
    if opts is None:
        opts = ShootingOptions()
    y0 = seed_unstable_manifold(i_minus_inf, p, opts.eps)
    traj = _run_shoot(y0, p, opts)

    max_hits = [rec for rec in traj.events if rec.index == _EV_MAX]
    if not max_hits:
        raise BudgetError(
            f"no maximum of a within z budget {opts.z_budget:g}", traj
        )
    if not _stopped(traj):
        raise BudgetError(
            f"no convergence to the far equilibrium within z budget {opts.z_budget:g}",
            traj,
        )
    i_plus = _check_limit_band(traj, p)

    first = max_hits[0]
    anchored = Trajectory(
        traj.zs - first.z,
        traj.states,
        [EventRecord(r.index, r.z - first.z, r.state) for r in traj.events],
    )
    a_max, i_at_max = float(first.state[0]), float(first.state[2])
    mu_minus, mu_plus, prefactor = _fit_tails(anchored, a_max, i_plus, p, opts.eps)

    return WaveProfile(
        trajectory=anchored,
        i_minus_inf=i_minus_inf,
        i_plus_inf=i_plus,
        z_first_max=float(first.z),
        a_max=a_max,
        i_at_max=i_at_max,
        mu_minus=mu_minus,
        mu_plus=mu_plus,
        params=p,
        tail_prefactor_exp=prefactor,
    )


def shoot_from_max(a0: float, i0: float, p: Params, opts: ShootingOptions | None = None) -> tuple[Trajectory, float]:
    """Forward run from (a0, 0, i0) into the attracting continuum.

    Returns the trajectory and the measured forward limit of i. Starting
    above the threshold a_star(i0) typically ends in NegativityError;
    that is the expected dynamics, not a failure of the integrator.
    """
    if opts is None:
        opts = ShootingOptions()
    i_c = analysis.minimal_inactive_limit(p.c)
    if not (i_c - 1e-12 <= i0 < 1.0):
        raise DomainError(f"i0 must lie in [{i_c:g}, 1), got {i0}")
    if a0 < 0.0:
        raise DomainError(f"a0 must be non-negative, got {a0}")
    if a0 > 1.0 - i0 + 1e-9:
        raise DomainError(
            f"a0 = {a0} exceeds the equilibrium cap 1 - i0 = {1.0 - i0}"
        )

    if a0 < opts.stop_tol:
        # already on the fixed-point continuum
        traj = Trajectory(np.array([0.0]), np.array([[a0, 0.0, i0]]))
        return traj, i0

    traj = _run_shoot(np.array([a0, 0.0, i0]), p, opts)
    if not _stopped(traj):
        raise BudgetError(
            f"no convergence within z budget {opts.z_budget:g}", traj
        )
    return traj, _check_limit_band(traj, p)


@dataclass(frozen=True)
class VerificationReport:
    """Diagnostics for a computed profile; thresholds live in `passed`."""

    i_monotone: bool
    single_max: bool
    limit_sum_residual: float
    mass: analysis.MassResiduals
    mu_minus_rel_err: float
    mu_plus_rel_err: float | None
    prefactor_exp: float | None

    @property
    def passed(self) -> bool:
        """All structural flags hold and every residual is within budget.

        Budgets: 1e-3 on the limit sum, 1e-4 on each mass residual
        (relative to the total transferred mass), 2% on tail rates, 0.15
        on the near-critical prefactor exponent.
        """
        scale = max(abs(self.mass.total_mass), 1.0)
        mass_ok = all(
            abs(r) <= 1e-4 * scale
            for r in (self.mass.res1, self.mass.res2, self.mass.res3)
        )
        if self.prefactor_exp is not None:
            tail_ok = abs(self.prefactor_exp - 1.0) <= 0.15
        else:
            tail_ok = self.mu_plus_rel_err is not None and self.mu_plus_rel_err <= 0.02
        return (
            self.i_monotone
            and self.single_max
            and self.limit_sum_residual <= 1e-3
            and mass_ok
            and self.mu_minus_rel_err <= 0.02
            and tail_ok
        )


def _rel_err(got: float, expected: float) -> float:
    if expected == 0.0:
        return abs(got - expected)
    return abs(got - expected) / abs(expected)


def _count_b_crossings(b: np.ndarray) -> tuple[int, int]:
    """(down, up) sign changes of b, ignoring |b| <= 1e-12 plateaus."""
    s = np.sign(np.where(np.abs(b) <= 1e-12, 0.0, b))
    s = s[s != 0.0]
    down = up = 0
    for prev, cur in zip(s, s[1:]):
        if prev > 0 > cur:
            down += 1
        elif prev < 0 < cur:
            up += 1
    return down, up


def verify_profile(w: WaveProfile) -> VerificationReport:
    """Report-only structural checks of a profile against its own theory."""
    traj = w.trajectory
    i_vals = traj.states[:, 2]
    i_monotone = bool(np.all(np.diff(i_vals) <= 1e-8))

    down, up = _count_b_crossings(traj.states[:, 1])
    single_max = down <= 1 and up == 0

    limit_sum_residual = abs(w.i_minus_inf + w.i_plus_inf - 2.0)
    mass = analysis.mass_residuals(traj.zs, traj.states, w.params, endpoint_tol=1e-6)

    c = w.params.c
    mu_minus_rel_err = _rel_err(w.mu_minus, analysis.decay_rate(w.i_minus_inf, c))
    if w.tail_prefactor_exp is not None:
        mu_plus_rel_err = None
    else:
        disc = c * c / 4.0 + w.i_plus_inf - 1.0
        expected = -c / 2.0 + math.sqrt(max(disc, 0.0))
        mu_plus_rel_err = _rel_err(w.mu_plus, expected)

    return VerificationReport(
        i_monotone=i_monotone,
        single_max=single_max,
        limit_sum_residual=limit_sum_residual,
        mass=mass,
        mu_minus_rel_err=mu_minus_rel_err,
        mu_plus_rel_err=mu_plus_rel_err,
        prefactor_exp=w.tail_prefactor_exp,
    )
