"""Mean-field ODE for the Yes-fraction, in slot time.

Free slots follow the logistic field ``(q - p) / M * beta * (1 - beta)``;
influenced slots follow the affine field ``(q_inf * (1 - beta) - p_inf * beta) / M``.
Both have closed forms, so a schedule is solved by composing them slot by
slot.  ``rk4_*`` integrate the same vector fields numerically and serve as
an independent check on every closed form in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schedules import Horizon, InfluenceSchedule
from .trajectory import Trajectory


@dataclass(frozen=True)
class OdeParams:
    p: float
    q: float
    p_inf: float
    q_inf: float
    M: int
    beta0: float

    def __post_init__(self):
        if not 0.0 <= self.beta0 <= 1.0:
            raise ValueError("beta0 must lie in [0,1]")
        if self.M <= 0:
            raise ValueError("M must be positive")


def _scalar_free(beta0, p, q, M, t):
    c = (q - p) * t / M
    if c == 0 or beta0 in (0.0, 1.0):
        return float(beta0)
    e = math.exp(-abs(c))
    if c > 0:
        return beta0 / (beta0 + (1.0 - beta0) * e)
    return beta0 * e / (1.0 - beta0 + beta0 * e)


def solve_free(beta0, p, q, M, t):
    """Logistic solution of the free ODE; all arguments broadcast."""
    if all(np.ndim(x) == 0 for x in (beta0, p, q, M, t)):
        if t < 0:
            raise ValueError("t must be >= 0")
        return _scalar_free(float(beta0), float(p), float(q), float(M), float(t))
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    beta0 = np.asarray(beta0, dtype=float)
    c = (q - p) * t / M
    e = np.exp(-np.abs(c))  # never overflows
    with np.errstate(invalid="ignore", divide="ignore"):
        up = beta0 / (beta0 + (1.0 - beta0) * e)
        down = beta0 * e / (1.0 - beta0 + beta0 * e)
    fixed = (c == 0) | (beta0 == 0) | (beta0 == 1)
    return np.where(fixed, beta0, np.where(c > 0, up, down))


def solve_influenced(beta0, p_inf, q_inf, M, t):
    if all(np.ndim(x) == 0 for x in (beta0, p_inf, q_inf, M, t)):
        if t < 0:
            raise ValueError("t must be >= 0")
        r = p_inf + q_inf
        if r == 0:
            return float(beta0)
        target = q_inf / r
        return float(target + (beta0 - target) * math.exp(-r * t / M))
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    r = np.asarray(p_inf + q_inf, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        target = q_inf / r
        moved = target + (beta0 - target) * np.exp(-r * t / M)
    return np.where(r == 0, beta0, moved)


def piecewise_plan(h: Horizon, sched: InfluenceSchedule) -> list[tuple[int, bool]]:
    """Runs of equal influence mode as (duration in slots, influenced)."""
    plan: list[tuple[int, bool]] = []
    for flag in sched.mask(h.T).tolist():
        if plan and plan[-1][1] == flag:
            plan[-1] = (plan[-1][0] + 1, flag)
        else:
            plan.append((1, flag))
    return plan


def solve_schedule(params: OdeParams, h: Horizon, sched: InfluenceSchedule) -> Trajectory:
    sched.check(h)
    mask = sched.mask(h.T)
    series = np.empty(h.T + 1)
    beta = series[0] = params.beta0
    for t, flag in enumerate(mask.tolist(), start=1):
        if flag:
            beta = solve_influenced(beta, params.p_inf, params.q_inf, params.M, 1.0)
        else:
            beta = solve_free(beta, params.p, params.q, params.M, 1.0)
        series[t] = beta
    return Trajectory(series, mask)


def terminal_from_plan(params: OdeParams, h: Horizon, sched: InfluenceSchedule) -> float:
    """beta(T) by composing one closed-form solve per run of the plan."""
    beta = params.beta0
    for duration, flag in piecewise_plan(h, sched):
        if flag:
            beta = solve_influenced(beta, params.p_inf, params.q_inf, params.M, duration)
        else:
            beta = solve_free(beta, params.p, params.q, params.M, duration)
    return float(beta)


def _steps_per_slot(dt: float) -> int:
    if not 0 < dt <= 0.1:
        raise ValueError("dt must lie in (0, 0.1]")
    n = round(1.0 / dt)
    if abs(n * dt - 1.0) > 1e-12:
        raise ValueError("1/dt must be an integer so slot boundaries fall on the grid")
    return n


def _rk4_step(beta, a, c, e, h):
    # field: a*(1-beta) - c*beta + e*beta*(1-beta), coefficients already divided by M
    def f(x):
        return a * (1.0 - x) - c * x + e * x * (1.0 - x)

    k1 = f(beta)
    k2 = f(beta + 0.5 * h * k1)
    k3 = f(beta + 0.5 * h * k2)
    k4 = f(beta + h * k3)
    return beta + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_batch(beta0, p, q, p_inf, q_inf, M, masks, dt=0.01, lengths=None) -> np.ndarray:
    """Fixed-step RK4 over many (parameters, schedule) pairs at once.

    Scalar or shape-(n,) parameters; ``masks`` has shape (n, T).  Points
    with ``lengths[i] < T`` are frozen after slot ``lengths[i]``.  Returns
    beta at integer slots, shape (n, T + 1).
    """
    masks = np.atleast_2d(np.asarray(masks, dtype=bool))
    n, T = masks.shape
    arr = [np.broadcast_to(np.asarray(x, dtype=float), (n,)) for x in (beta0, p, q, p_inf, q_inf, M)]
    beta, p, q, p_inf, q_inf, M = arr
    beta = beta.copy()
    lengths = np.full(n, T) if lengths is None else np.asarray(lengths)
    per = _steps_per_slot(dt)
    out = np.empty((n, T + 1))
    out[:, 0] = beta
    for s in range(T):
        live = s < lengths
        infl = masks[:, s]
        a = np.where(live & infl, q_inf / M, 0.0)
        c = np.where(live & infl, p_inf / M, 0.0)
        e = np.where(live & ~infl, (q - p) / M, 0.0)
        for _ in range(per):
            beta = _rk4_step(beta, a, c, e, dt)
        out[:, s + 1] = beta
    return out


def rk4_schedule(params: OdeParams, h: Horizon, sched: InfluenceSchedule, dt=0.01) -> Trajectory:
    sched.check(h)
    mask = sched.mask(h.T)
    series = rk4_batch(params.beta0, params.p, params.q, params.p_inf, params.q_inf, params.M, mask[None, :], dt)
    return Trajectory(series[0], mask)


# Hub-and-spoke reductions.  The hub starts Yes and is selected exactly once,
# at time t_h; an influence window of length b*T starts at t_i.  Spokes see
# only the hub, so while the hub holds Yes the No-fraction decays at rate q/M
# (q_inf/M under influence) and no Yes spoke flips.  A hub selected outside
# the window flips to No with probability p * delta(t_h); afterwards Yes
# spokes decay at rate p/M.  The closed forms assume p_inf = 0.


def _check(cond, msg):
    if np.any(~np.asarray(cond)):
        raise ValueError(msg)


def hub_spoke_case_a(delta0, p, q, q_inf, M, T, b, t_h):
    """Expected beta(T) when the whole influence window ends before t_h."""
    L = np.multiply(b, T)
    _check((L < t_h) & (t_h <= T), "case a needs b*T < t_h <= T")
    delta_h = delta0 * np.exp(-q / M * (t_h - L) - q_inf * L / M)
    beta_h = 1.0 - delta_h
    flip = p * delta_h
    return flip * beta_h * np.exp(-p / M * (T - t_h)) + (1.0 - flip) * (
        1.0 - delta_h * np.exp(-q / M * (T - t_h))
    )


def hub_spoke_case_b(delta0, q, q_inf, M, T, b):
    """Expected beta(T) when the hub is selected inside the influence window."""
    return 1.0 - delta0 * np.exp(-np.divide(T, M) * (q * (1.0 - b) + q_inf * b))


def hub_spoke_case_c(delta0, p, q, q_inf, M, T, b, t_h, t_i):
    """Expected beta(T) when the hub is selected before the window starts at t_i."""
    L = np.multiply(b, T)
    _check((0 <= t_h) & (t_h < t_i) & (t_i + L <= T), "case c needs 0 <= t_h < t_i and t_i + b*T <= T")
    delta_h = delta0 * np.exp(-q * t_h / M)
    beta_h = 1.0 - delta_h
    flip = p * delta_h
    stay = (1.0 - flip) * hub_spoke_case_b(delta0, q, q_inf, M, T, b)
    after_window = 1.0 - (1.0 - beta_h * np.exp(-p / M * (t_i - t_h))) * np.exp(-q_inf * L / M)
    return stay + flip * after_window * np.exp(-p / M * (T - t_i - L))


def hub_spoke_rk4(delta0, p, q, p_inf, q_inf, M, T, b, t_i, t_h, dt=0.01):
    """Expected beta(T) on the reduced hub-and-spoke dynamics by RK4.

    Integrates the hub-stays-Yes and hub-flips branches separately and mixes
    them with the hub's flip probability at t_h.  Accepts p_inf > 0, unlike
    the closed forms.  Arrays broadcast; t_i, t_h and b*T must sit on the
    dt grid.
    """
    per = _steps_per_slot(dt)
    delta0, p, q, p_inf, q_inf, M, T, b, t_i, t_h = np.broadcast_arrays(
        *[np.asarray(x, dtype=float) for x in (delta0, p, q, p_inf, q_inf, M, T, b, t_i, t_h)]
    )
    L = b * T
    n_steps = int(round(float(T.max()) * per))
    stop = np.rint(T * per).astype(int)
    hub_step = np.rint(t_h * per).astype(int)
    yes = 1.0 - delta0
    no = yes.copy()
    delta_h = np.where(hub_step == 0, delta0, np.nan)
    for k in range(n_steps):
        mid = (k + 0.5) * dt
        live = k < stop
        infl = live & (t_i <= mid) & (mid < t_i + L)
        free = live & ~infl
        after = mid > t_h
        a_y = np.where(infl, q_inf, np.where(free, q, 0.0)) / M
        c_y = np.where(infl, p_inf, 0.0) / M
        a_n = np.where(after & free, 0.0, a_y)
        c_n = np.where(after & free, p / M, c_y)
        yes = _rk4_step(yes, a_y, c_y, 0.0, dt)
        no = _rk4_step(no, a_n, c_n, 0.0, dt)
        delta_h = np.where(hub_step == k + 1, 1.0 - yes, delta_h)
    hub_influenced = (t_i <= t_h) & (t_h <= t_i + L)
    flip = np.where(hub_influenced, p_inf, p * delta_h)
    return (1.0 - flip) * yes + flip * no
