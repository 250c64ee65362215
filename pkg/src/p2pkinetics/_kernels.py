"""Hot numeric kernels: jitted scalar loops and a pure-numpy fallback.

Every time-stepping loop lives here in two lanes (see ``_backend``).  Both
lanes implement the same algorithms and consume the same random-number
stream, so a given seed produces statistically identical paths; bit-exact
agreement across lanes is not guaranteed (summation order differs), but each
lane is fully deterministic.

Random numbers
--------------
The generator is splitmix64: state advances by the odd constant
0x9E3779B97F4A7C15 and the output is the avalanche finalizer
``z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27; z *= 0x94D049BB133111EB;
z ^= z>>31`` applied to the new state.  Uniform doubles take the top 53 bits
(``u = (z >> 11) * 2**-53``, in [0, 1)).  Normal variates use the Marsaglia
polar method, filling the target array pairwise and discarding the unused
half of the final pair when the length is odd.  Exponential waiting times are
``-log(1 - u) / rate`` with u redrawn in the measure-zero case u == 0.
Decorrelated per-run seeds come from ``derive_stream_seed``: the finalizer
applied to ``seed + (index + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``.
"""

from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np

from ._backend import BACKEND, NUMBA_AVAILABLE

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_EVENT_BUDGET = 2


def mix64(z: int) -> int:
    """splitmix64 avalanche finalizer on python ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def derive_stream_seed(seed: int, index: int) -> int:
    """Documented per-run seed mixing for ensembles (see module docstring)."""
    return mix64((seed + (index + 1) * GOLDEN) & MASK64)


def _record_count(n_steps: int, stride: int) -> int:
    # steps 0, stride, 2*stride, ... plus the final step when off-stride
    return n_steps // stride + 1 + (0 if n_steps % stride == 0 else 1)


# ---------------------------------------------------------------------------
# pure-python / numpy lane
# ---------------------------------------------------------------------------


class SplitMix64:
    """Reference implementation of the documented generator (python ints)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def fill_normals(self, out: np.ndarray) -> None:
        n = out.shape[0]
        i = 0
        while i < n:
            u = 2.0 * self.next_unit() - 1.0
            v = 2.0 * self.next_unit() - 1.0
            s2 = u * u + v * v
            if s2 >= 1.0 or s2 == 0.0:
                continue
            f = math.sqrt(-2.0 * math.log(s2) / s2)
            out[i] = u * f
            i += 1
            if i < n:
                out[i] = v * f
                i += 1


def _prop_np(arrs, x: np.ndarray) -> np.ndarray:
    n_s = arrs.n_species
    src = np.empty(n_s + arrs.n_aggregates)
    src[:n_s] = x
    if arrs.n_aggregates:
        src[n_s:] = arrs.agg_w @ x
    # overflow/invalid on diverging states is expected; callers check isfinite
    with np.errstate(over="ignore", invalid="ignore"):
        s = arrs.rates * np.prod(src[None, :] ** arrs.exp_dense, axis=1)
    s[s < 0.0] = 0.0  # NaN propagates: the comparison is False
    return s


def _drift_np(arrs, x: np.ndarray) -> np.ndarray:
    return _prop_np(arrs, x) @ arrs.change_f


def _rk4_np(arrs, x0, dt, n_steps, stride):
    n_rec = _record_count(n_steps, stride)
    times = np.empty(n_rec)
    states = np.empty((n_rec, arrs.n_species))
    x = np.array(x0, dtype=np.float64)
    times[0] = 0.0
    states[0] = x
    rec = 1
    status = STATUS_OK
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(1, n_steps + 1):
        k1 = _drift_np(arrs, x)
        k2 = _drift_np(arrs, x + half * k1)
        k3 = _drift_np(arrs, x + half * k2)
        k4 = _drift_np(arrs, x + dt * k3)
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(x)):
            status = STATUS_NONFINITE
            break
        if k % stride == 0 or k == n_steps:
            times[rec] = k * dt
            states[rec] = x
            rec += 1
    return times[:rec], states[:rec], status


def _em_np(arrs, x0, dt, n_steps, stride, noise_scale, seed):
    n_rec = _record_count(n_steps, stride)
    times = np.empty(n_rec)
    states = np.empty((n_rec, arrs.n_species))
    x = np.array(x0, dtype=np.float64)
    times[0] = 0.0
    states[0] = x
    rec = 1
    status = STATUS_OK
    rng = SplitMix64(seed)
    xi = np.empty(arrs.n_reactions)
    scale = noise_scale * math.sqrt(dt)
    for k in range(1, n_steps + 1):
        s = _prop_np(arrs, x)
        a = s @ arrs.change_f
        rng.fill_normals(xi)
        noise = (np.sqrt(s) * xi) @ arrs.change_f
        x = x + dt * a + scale * noise
        if not np.all(np.isfinite(x)):
            status = STATUS_NONFINITE
            break
        if k % stride == 0 or k == n_steps:
            times[rec] = k * dt
            states[rec] = x
            rec += 1
    return times[:rec], states[:rec], status


def _ssa_step_np(arrs, xf, rng):
    """One Gillespie draw: returns (tau, chosen).

    chosen = -1 signals an absorbing state (total propensity 0), -2 a
    non-finite total.
    """
    s = _prop_np(arrs, xf)
    total = float(s.sum())
    if not math.isfinite(total):
        return 0.0, -2
    if total <= 0.0:
        return 0.0, -1
    u = rng.next_unit()
    while u == 0.0:
        u = rng.next_unit()
    tau = -math.log(1.0 - u) / total
    thr = rng.next_unit() * total
    cum = 0.0
    chosen = -1
    for r in range(arrs.n_reactions):
        cum += s[r]
        if cum >= thr:
            chosen = r
            break
    if chosen < 0:  # cumulative rounding fell short: take last live reaction
        for r in range(arrs.n_reactions - 1, -1, -1):
            if s[r] > 0.0:
                chosen = r
                break
    return tau, chosen


def _ssa_events_np(arrs, x0, t_end, stride, seed, max_events):
    rng = SplitMix64(seed)
    x = np.array(x0, dtype=np.int64)
    xf = np.empty(arrs.n_species)
    times = [0.0]
    states = [x.copy()]
    t = 0.0
    nevents = 0
    last_rec = 0
    status = STATUS_OK
    while True:
        xf[:] = x
        tau, chosen = _ssa_step_np(arrs, xf, rng)
        if chosen == -2:
            status = STATUS_NONFINITE
            break
        if chosen == -1:
            break
        if t + tau > t_end:
            break
        t = t + tau
        x += arrs.change_i[chosen]
        nevents += 1
        if nevents % stride == 0:
            times.append(t)
            states.append(x.copy())
            last_rec = nevents
        if nevents >= max_events:
            status = STATUS_EVENT_BUDGET
            break
    if nevents > last_rec:
        times.append(t)
        states.append(x.copy())
    return np.asarray(times), np.asarray(states), status


def _ssa_grid_np(arrs, x0, grid, seed, max_events):
    rng = SplitMix64(seed)
    x = np.array(x0, dtype=np.int64)
    xf = np.empty(arrs.n_species)
    out = np.empty((grid.shape[0], arrs.n_species), dtype=np.int64)
    t = 0.0
    gi = 0
    nevents = 0
    status = STATUS_OK
    while gi < grid.shape[0]:
        xf[:] = x
        tau, chosen = _ssa_step_np(arrs, xf, rng)
        if chosen == -2:
            status = STATUS_NONFINITE
            break
        if chosen == -1:
            break
        tnew = t + tau
        while gi < grid.shape[0] and grid[gi] < tnew:
            out[gi] = x
            gi += 1
        if gi >= grid.shape[0]:
            break
        t = tnew
        x += arrs.change_i[chosen]
        nevents += 1
        if nevents >= max_events:
            status = STATUS_EVENT_BUDGET
            break
    while gi < grid.shape[0]:
        out[gi] = x
        gi += 1
    return out, status


def _normals_np(seed, n):
    out = np.empty(n)
    SplitMix64(seed).fill_normals(out)
    return out


def _uniforms_np(seed, n):
    rng = SplitMix64(seed)
    return np.array([rng.next_unit() for _ in range(n)])


def _build_numpy_lane():
    return SimpleNamespace(
        name="numpy",
        propensities=lambda arrs, x: _prop_np(arrs, x),
        drift=lambda arrs, x: _drift_np(arrs, x),
        rk4=lambda arrs, x0, dt, n_steps, stride: _rk4_np(
            arrs, x0, dt, n_steps, stride
        ),
        em=lambda arrs, x0, dt, n_steps, stride, noise_scale, seed: _em_np(
            arrs, x0, dt, n_steps, stride, noise_scale, seed
        ),
        ssa_events=lambda arrs, x0, t_end, stride, seed, max_events: (
            _ssa_events_np(arrs, x0, t_end, stride, seed, max_events)
        ),
        ssa_grid=lambda arrs, x0, grid, seed, max_events: _ssa_grid_np(
            arrs, x0, grid, seed, max_events
        ),
        normals=_normals_np,
        uniforms=_uniforms_np,
    )


# ---------------------------------------------------------------------------
# numba lane
# ---------------------------------------------------------------------------


def _build_numba_lane():
    from numba import njit

    u64 = np.uint64
    C_GOLDEN = u64(GOLDEN)
    C_MIX_A = u64(MIX_A)
    C_MIX_B = u64(MIX_B)
    S30, S27, S31, S11 = u64(30), u64(27), u64(31), u64(11)
    UNIT = 2.0**-53

    @njit(cache=True)
    def _next_u64(state):
        state[0] = state[0] + C_GOLDEN
        z = state[0]
        z = (z ^ (z >> S30)) * C_MIX_A
        z = (z ^ (z >> S27)) * C_MIX_B
        return z ^ (z >> S31)

    @njit(cache=True)
    def _next_unit(state):
        return np.float64(_next_u64(state) >> S11) * UNIT

    @njit(cache=True)
    def _fill_normals(state, out):
        n = out.shape[0]
        i = 0
        while i < n:
            u = 2.0 * _next_unit(state) - 1.0
            v = 2.0 * _next_unit(state) - 1.0
            s2 = u * u + v * v
            if s2 >= 1.0 or s2 == 0.0:
                continue
            f = math.sqrt(-2.0 * math.log(s2) / s2)
            out[i] = u * f
            i += 1
            if i < n:
                out[i] = v * f
                i += 1

    @njit(cache=True)
    def _prop(xf, rates, f_ptr, f_src, f_exp, agg_w, aggv, out):
        n_s = xf.shape[0]
        for a in range(agg_w.shape[0]):
            acc = 0.0
            for j in range(n_s):
                acc += agg_w[a, j] * xf[j]
            aggv[a] = acc
        for r in range(rates.shape[0]):
            v = rates[r]
            for f in range(f_ptr[r], f_ptr[r + 1]):
                src = f_src[f]
                base = xf[src] if src < n_s else aggv[src - n_s]
                for _ in range(f_exp[f]):
                    v *= base
            if v < 0.0:
                v = 0.0
            out[r] = v

    @njit(cache=True)
    def _drift_into(xf, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, out):
        _prop(xf, rates, f_ptr, f_src, f_exp, agg_w, aggv, s)
        n_s = xf.shape[0]
        for j in range(n_s):
            out[j] = 0.0
        for r in range(rates.shape[0]):
            sr = s[r]
            if sr != 0.0:
                for j in range(n_s):
                    out[j] += change_f[r, j] * sr

    @njit(cache=True)
    def _drift(xf, rates, f_ptr, f_src, f_exp, agg_w, change_f):
        aggv = np.empty(agg_w.shape[0])
        s = np.empty(rates.shape[0])
        out = np.empty(xf.shape[0])
        _drift_into(xf, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, out)
        return out

    @njit(cache=True)
    def _propensities(xf, rates, f_ptr, f_src, f_exp, agg_w):
        aggv = np.empty(agg_w.shape[0])
        out = np.empty(rates.shape[0])
        _prop(xf, rates, f_ptr, f_src, f_exp, agg_w, aggv, out)
        return out

    @njit(cache=True)
    def _rk4(x0, dt, n_steps, stride, rates, f_ptr, f_src, f_exp, agg_w, change_f):
        n_s = x0.shape[0]
        n_rec = n_steps // stride + 1 + (0 if n_steps % stride == 0 else 1)
        times = np.empty(n_rec)
        states = np.empty((n_rec, n_s))
        x = x0.copy()
        aggv = np.empty(agg_w.shape[0])
        s = np.empty(rates.shape[0])
        k1 = np.empty(n_s)
        k2 = np.empty(n_s)
        k3 = np.empty(n_s)
        k4 = np.empty(n_s)
        xt = np.empty(n_s)
        times[0] = 0.0
        for j in range(n_s):
            states[0, j] = x[j]
        rec = 1
        status = STATUS_OK
        half = 0.5 * dt
        sixth = dt / 6.0
        for k in range(1, n_steps + 1):
            _drift_into(x, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, k1)
            for j in range(n_s):
                xt[j] = x[j] + half * k1[j]
            _drift_into(xt, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, k2)
            for j in range(n_s):
                xt[j] = x[j] + half * k2[j]
            _drift_into(xt, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, k3)
            for j in range(n_s):
                xt[j] = x[j] + dt * k3[j]
            _drift_into(xt, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, k4)
            ok = True
            for j in range(n_s):
                x[j] = x[j] + sixth * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
                if not np.isfinite(x[j]):
                    ok = False
            if not ok:
                status = STATUS_NONFINITE
                break
            if k % stride == 0 or k == n_steps:
                times[rec] = k * dt
                for j in range(n_s):
                    states[rec, j] = x[j]
                rec += 1
        return times[:rec].copy(), states[:rec].copy(), status

    @njit(cache=True)
    def _em(
        x0, dt, n_steps, stride, noise_scale, seed,
        rates, f_ptr, f_src, f_exp, agg_w, change_f,
    ):
        n_s = x0.shape[0]
        n_r = rates.shape[0]
        n_rec = n_steps // stride + 1 + (0 if n_steps % stride == 0 else 1)
        times = np.empty(n_rec)
        states = np.empty((n_rec, n_s))
        x = x0.copy()
        aggv = np.empty(agg_w.shape[0])
        s = np.empty(n_r)
        a = np.empty(n_s)
        xi = np.empty(n_r)
        noise = np.empty(n_s)
        rng = np.empty(1, dtype=np.uint64)
        rng[0] = seed
        times[0] = 0.0
        for j in range(n_s):
            states[0, j] = x[j]
        rec = 1
        status = STATUS_OK
        scale = noise_scale * math.sqrt(dt)
        for k in range(1, n_steps + 1):
            _drift_into(x, rates, f_ptr, f_src, f_exp, agg_w, change_f, aggv, s, a)
            _fill_normals(rng, xi)
            for j in range(n_s):
                noise[j] = 0.0
            for r in range(n_r):
                w = math.sqrt(s[r]) * xi[r]
                for j in range(n_s):
                    noise[j] += change_f[r, j] * w
            ok = True
            for j in range(n_s):
                x[j] = x[j] + dt * a[j] + scale * noise[j]
                if not np.isfinite(x[j]):
                    ok = False
            if not ok:
                status = STATUS_NONFINITE
                break
            if k % stride == 0 or k == n_steps:
                times[rec] = k * dt
                for j in range(n_s):
                    states[rec, j] = x[j]
                rec += 1
        return times[:rec].copy(), states[:rec].copy(), status

    @njit(cache=True)
    def _grow_f(arr, needed):
        cap = arr.shape[0]
        if needed <= cap:
            return arr
        out = np.empty(cap * 2)
        out[:cap] = arr
        return out

    @njit(cache=True)
    def _grow_i2(arr, needed):
        cap = arr.shape[0]
        if needed <= cap:
            return arr
        out = np.empty((cap * 2, arr.shape[1]), dtype=np.int64)
        out[:cap] = arr
        return out

    @njit(cache=True)
    def _ssa_events(
        x0, t_end, stride, seed, max_events,
        rates, f_ptr, f_src, f_exp, agg_w, change_i,
    ):
        n_s = x0.shape[0]
        n_r = rates.shape[0]
        times = np.empty(256)
        states = np.empty((256, n_s), dtype=np.int64)
        x = x0.copy()
        xf = np.empty(n_s)
        aggv = np.empty(agg_w.shape[0])
        s = np.empty(n_r)
        rng = np.empty(1, dtype=np.uint64)
        rng[0] = seed
        times[0] = 0.0
        for j in range(n_s):
            states[0, j] = x[j]
        count = 1
        t = 0.0
        nevents = 0
        last_rec = 0
        status = STATUS_OK
        while True:
            for j in range(n_s):
                xf[j] = x[j]
            _prop(xf, rates, f_ptr, f_src, f_exp, agg_w, aggv, s)
            total = 0.0
            for r in range(n_r):
                total += s[r]
            if not np.isfinite(total):
                status = STATUS_NONFINITE
                break
            if total <= 0.0:
                break
            u = _next_unit(rng)
            while u == 0.0:
                u = _next_unit(rng)
            tau = -math.log(1.0 - u) / total
            if t + tau > t_end:
                break
            t = t + tau
            thr = _next_unit(rng) * total
            cum = 0.0
            chosen = -1
            for r in range(n_r):
                cum += s[r]
                if cum >= thr:
                    chosen = r
                    break
            if chosen < 0:
                for r in range(n_r - 1, -1, -1):
                    if s[r] > 0.0:
                        chosen = r
                        break
            for j in range(n_s):
                x[j] += change_i[chosen, j]
            nevents += 1
            if nevents % stride == 0:
                times = _grow_f(times, count + 1)
                states = _grow_i2(states, count + 1)
                times[count] = t
                for j in range(n_s):
                    states[count, j] = x[j]
                count += 1
                last_rec = nevents
            if nevents >= max_events:
                status = STATUS_EVENT_BUDGET
                break
        if nevents > last_rec:
            times = _grow_f(times, count + 1)
            states = _grow_i2(states, count + 1)
            times[count] = t
            for j in range(n_s):
                states[count, j] = x[j]
            count += 1
        return times[:count].copy(), states[:count].copy(), status

    @njit(cache=True)
    def _ssa_grid(
        x0, grid, seed, max_events,
        rates, f_ptr, f_src, f_exp, agg_w, change_i,
    ):
        n_s = x0.shape[0]
        n_r = rates.shape[0]
        out = np.empty((grid.shape[0], n_s), dtype=np.int64)
        x = x0.copy()
        xf = np.empty(n_s)
        aggv = np.empty(agg_w.shape[0])
        s = np.empty(n_r)
        rng = np.empty(1, dtype=np.uint64)
        rng[0] = seed
        t = 0.0
        gi = 0
        nevents = 0
        status = STATUS_OK
        while gi < grid.shape[0]:
            for j in range(n_s):
                xf[j] = x[j]
            _prop(xf, rates, f_ptr, f_src, f_exp, agg_w, aggv, s)
            total = 0.0
            for r in range(n_r):
                total += s[r]
            if not np.isfinite(total):
                status = STATUS_NONFINITE
                break
            if total <= 0.0:
                break
            u = _next_unit(rng)
            while u == 0.0:
                u = _next_unit(rng)
            tau = -math.log(1.0 - u) / total
            tnew = t + tau
            while gi < grid.shape[0] and grid[gi] < tnew:
                for j in range(n_s):
                    out[gi, j] = x[j]
                gi += 1
            if gi >= grid.shape[0]:
                break
            t = tnew
            thr = _next_unit(rng) * total
            cum = 0.0
            chosen = -1
            for r in range(n_r):
                cum += s[r]
                if cum >= thr:
                    chosen = r
                    break
            if chosen < 0:
                for r in range(n_r - 1, -1, -1):
                    if s[r] > 0.0:
                        chosen = r
                        break
            for j in range(n_s):
                x[j] += change_i[chosen, j]
            nevents += 1
            if nevents >= max_events:
                status = STATUS_EVENT_BUDGET
                break
        while gi < grid.shape[0]:
            for j in range(n_s):
                out[gi, j] = x[j]
            gi += 1
        return out, status

    @njit(cache=True)
    def _normals(seed, n):
        rng = np.empty(1, dtype=np.uint64)
        rng[0] = seed
        out = np.empty(n)
        _fill_normals(rng, out)
        return out

    @njit(cache=True)
    def _uniforms(seed, n):
        rng = np.empty(1, dtype=np.uint64)
        rng[0] = seed
        out = np.empty(n)
        for i in range(n):
            out[i] = _next_unit(rng)
        return out

    def _unpack(arrs):
        return arrs.rates, arrs.f_ptr, arrs.f_src, arrs.f_exp, arrs.agg_w

    return SimpleNamespace(
        name="numba",
        propensities=lambda arrs, x: _propensities(x, *_unpack(arrs)),
        drift=lambda arrs, x: _drift(x, *_unpack(arrs), arrs.change_f),
        rk4=lambda arrs, x0, dt, n_steps, stride: _rk4(
            x0, dt, n_steps, stride, *_unpack(arrs), arrs.change_f
        ),
        em=lambda arrs, x0, dt, n_steps, stride, noise_scale, seed: _em(
            x0, dt, n_steps, stride, noise_scale, np.uint64(seed),
            *_unpack(arrs), arrs.change_f,
        ),
        ssa_events=lambda arrs, x0, t_end, stride, seed, max_events: (
            _ssa_events(
                x0, t_end, stride, np.uint64(seed), max_events,
                *_unpack(arrs), arrs.change_i,
            )
        ),
        ssa_grid=lambda arrs, x0, grid, seed, max_events: _ssa_grid(
            x0, grid, np.uint64(seed), max_events,
            *_unpack(arrs), arrs.change_i,
        ),
        normals=lambda seed, n: _normals(np.uint64(seed), n),
        uniforms=lambda seed, n: _uniforms(np.uint64(seed), n),
    )


_LANES: dict[str, SimpleNamespace] = {"numpy": _build_numpy_lane()}
if NUMBA_AVAILABLE:
    _LANES["numba"] = _build_numba_lane()


def get_kernels(lane: str) -> SimpleNamespace:
    """Kernel namespace for an explicit lane ('numba' or 'numpy')."""
    try:
        return _LANES[lane]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel lane {lane!r}") from None


def active_kernels() -> SimpleNamespace:
    """Kernel namespace for the lane selected by the environment."""
    return _LANES[BACKEND]
