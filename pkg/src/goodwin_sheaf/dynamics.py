"""Trajectory integration and long-run behaviour classification.

Integration is fixed-step RK4 (default dt = 1e-3).  Catalogued models carry
compiled kernels; anything else falls back to a plain-Python loop with the
same arithmetic.  A blow-up guard truncates runs whose state leaves
|x| <= 1e12 or turns non-finite; states that a model requires positive
reject the whole run instead (StepRejectionError), since the vector fields
here are meaningless across those axes.

Classification is a decision tree over three diagnostics:
  * tail amplitude        -> settled to a fixed point
  * separation growth     -> largest Lyapunov exponent estimate
  * section returns       -> closed orbit and its period
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .models import DomainError, ModelSpec

__all__ = [
    "BLOW_LIMIT",
    "StepRejectionError",
    "Trajectory",
    "LyapunovResult",
    "CycleResult",
    "DynamicsVerdict",
    "integrate",
    "conservation_report",
    "lyapunov_exponent",
    "detect_limit_cycle",
    "classify_dynamics",
]

BLOW_LIMIT = 1e12
CHAOS_THRESHOLD = 1e-2
NEUTRAL_BAND = 5e-3
VERDICT_KINDS = ("fixed-point", "limit-cycle", "chaotic", "undetermined")


class StepRejectionError(RuntimeError):
  """A state that the model requires positive crossed zero."""


@dataclass(frozen=True)
class Trajectory:
  """States sampled on a uniform time grid t0 + k*dt (dt is the recording
  step, an integer multiple of the integration step)."""
  t0: float
  dt: float
  states: np.ndarray
  model: str
  params_hash: str
  truncated: bool = False
  last_time: float | None = None  # set when truncated

  def __post_init__(self):
    if not np.all(np.isfinite(self.states)):
      raise ValueError("trajectory contains non-finite states")
    self.states.setflags(write=False)

  @property
  def t(self) -> np.ndarray:
    return self.t0 + self.dt * np.arange(self.states.shape[0])

  @property
  def n_samples(self) -> int:
    return int(self.states.shape[0])


def _positivity_mask(model: ModelSpec) -> np.ndarray:
  mask = np.zeros(model.dim, dtype=np.int64)
  for i, name in enumerate(model.state_names):
    if name in model.positive_states:
      mask[i] = 1
  return mask


def _rk4_step_py(f: Callable, x: np.ndarray, dt: float) -> np.ndarray:
  k1 = np.asarray(f(x), dtype=float)
  k2 = np.asarray(f(x + 0.5 * dt * k1), dtype=float)
  k3 = np.asarray(f(x + 0.5 * dt * k2), dtype=float)
  k4 = np.asarray(f(x + dt * k3), dtype=float)
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_state(x: np.ndarray, mask: np.ndarray) -> int:
  if not np.all(np.isfinite(x)) or np.any(np.abs(x) > BLOW_LIMIT):
    return 1
  if np.any((mask == 1) & (x <= 0.0)):
    return 2
  return 0


def integrate(model: ModelSpec,
              x0: Sequence[float],
              t_end: float,
              dt: float = 1e-3,
              record_stride: int = 1,
              use_kernel: bool = True) -> Trajectory:
  """March the model from x0 to t_end with fixed-step RK4.

  Every `record_stride`-th state is kept, so the trajectory's grid step is
  dt * record_stride.  Models with an algebraic price mode are projected
  onto the short-run price equilibrium after every step (and at t=0, so the
  price coordinates are slaved to the real states throughout).  Blow-up
  truncates and flags the trajectory; a positive-state violation raises
  StepRejectionError.
  """
  x0 = np.asarray(x0, dtype=float)
  if x0.shape != (model.dim,):
    raise ValueError(
        f"initial state must have shape ({model.dim},), got {x0.shape}")
  if dt <= 0 or t_end <= 0:
    raise ValueError("dt and t_end must be positive")
  if record_stride < 1:
    raise ValueError("record_stride must be >= 1")
  n_steps = int(round(t_end / dt))
  mask = _positivity_mask(model)
  if _check_state(x0, mask) != 0:
    raise ValueError(f"initial state {x0!r} violates the model domain")

  if use_kernel and model.kernel_id > 0:
    from . import _kernels
    par = np.asarray(model.kernel_params, dtype=float)
    out, rec, status, last = _kernels.integrate_loop(
        model.kernel_id, par, x0, dt, n_steps, record_stride, mask)
    states = out[:rec].copy()
  else:
    status, last, states_list = 0, 0, []
    x = x0.copy()
    if model.project is not None:
      x = np.asarray(model.project(x), dtype=float)
    states_list.append(x.copy())
    for step in range(1, n_steps + 1):
      x = _rk4_step_py(model.rhs, x, dt)
      if model.project is not None:
        x = np.asarray(model.project(x), dtype=float)
      bad = _check_state(x, mask)
      if bad != 0:
        status = bad
        break
      last = step
      if step % record_stride == 0:
        states_list.append(x.copy())
    states = np.array(states_list)

  if status == 2:
    raise StepRejectionError(
        f"model {model.name!r}: positive state crossed zero near "
        f"t = {(last + 1) * dt:.6g}")
  truncated = status == 1
  return Trajectory(
      t0=0.0,
      dt=dt * record_stride,
      states=states,
      model=model.name,
      params_hash=model.params_hash,
      truncated=truncated,
      last_time=last * dt if truncated else None,
  )


def conservation_report(traj: Trajectory,
                        first_integral: Callable[[np.ndarray], float]) -> dict:
  """Drift of a conserved quantity along a trajectory.

  Returns {"max_drift": max |F - F0|, "relative_drift": that over |F0|}.
  """
  values = np.array([first_integral(s) for s in traj.states])
  f0 = values[0]
  drift = float(np.max(np.abs(values - f0)))
  denom = abs(f0)
  if denom == 0.0:
    raise ValueError("first integral vanishes at the initial state; "
                     "relative drift undefined")
  return {"max_drift": drift, "relative_drift": drift / denom}


@dataclass(frozen=True)
class LyapunovResult:
  lambda_: float
  n_renorms: int
  truncated: bool
  d0: float
  renorm_interval: float
  restarts: int = 0


def lyapunov_exponent(model: ModelSpec,
                      x0: Sequence[float],
                      horizon: float = 5000.0,
                      dt: float = 1e-3,
                      renorm_interval: float = 1.0,
                      d0: float = 1e-8,
                      seed: int = 0,
                      use_kernel: bool = True) -> LyapunovResult:
  """Largest Lyapunov exponent by the two-trajectory renormalisation method.

  A companion trajectory starts d0 away along a seeded random direction;
  every renorm_interval the separation d is folded into sum(log(d/d0)) and
  the companion is pulled back to distance d0.  The estimate is the mean
  log-growth rate per unit time over the completed renormalisations.

  Companion-only failures (a positivity graze or a float-level merge with
  the base trajectory) reseed the companion at distance d0 and skip that
  interval's event rather than aborting; the count is reported as
  `restarts`.  Base-trajectory failures still end the estimate early.
  """
  x0 = np.asarray(x0, dtype=float)
  if d0 <= 0:
    raise ValueError(f"d0 must be positive, got {d0}")
  if horizon < renorm_interval:
    raise ValueError(
        "horizon must cover at least one renormalisation interval "
        f"(horizon={horizon}, renorm_interval={renorm_interval})")
  rng = np.random.default_rng(seed)
  direction = rng.standard_normal(model.dim)
  direction /= np.linalg.norm(direction)
  y0 = x0 + d0 * direction
  renorm_steps = max(1, int(round(renorm_interval / dt)))
  n_renorms = max(1, int(round(horizon / (renorm_steps * dt))))
  mask = _positivity_mask(model)

  if use_kernel and model.kernel_id > 0:
    from . import _kernels
    par = np.asarray(model.kernel_params, dtype=float)
    log_sum, events, status, restarts = _kernels.lyapunov_loop(
        model.kernel_id, par, x0, y0, dt, renorm_steps, n_renorms, d0, mask)
  else:
    x = x0.copy()
    y = y0.copy()
    if model.project is not None:
      x = np.asarray(model.project(x), dtype=float)
      y = np.asarray(model.project(y), dtype=float)
    log_sum, events, status, restarts = 0.0, 0, 0, 0
    skip_event = False

    def _reseed(base):
      nonlocal restarts, skip_event
      fresh = base.copy()
      fresh[restarts % model.dim] += d0
      restarts += 1
      skip_event = True
      return fresh

    for _r in range(n_renorms):
      for _s in range(renorm_steps):
        x = _rk4_step_py(model.rhs, x, dt)
        if model.project is not None:
          try:
            x = np.asarray(model.project(x), dtype=float)
          except DomainError:
            status = 1
            break
        bad = _check_state(x, mask)
        if bad:
          status = bad
          break
        y = _rk4_step_py(model.rhs, y, dt)
        y_bad = _check_state(y, mask)
        if not y_bad and model.project is not None:
          try:
            y = np.asarray(model.project(y), dtype=float)
          except DomainError:
            y_bad = 1
        if y_bad:
          y = _reseed(x)
      if status:
        break
      d = float(np.linalg.norm(y - x))
      if not math.isfinite(d):
        status = 3
        break
      if d <= 0.0:
        y = _reseed(x)
        skip_event = False
        continue
      if skip_event:
        skip_event = False
      else:
        log_sum += math.log(d / d0)
        events += 1
      y = x + (y - x) * (d0 / d)

  if status == 2:
    raise StepRejectionError(
        f"model {model.name!r}: positive state crossed zero during the "
        "separation-growth estimate")
  if events == 0:
    raise ValueError("no completed renormalisations; horizon too short "
                     "or trajectory lost immediately")
  lam = log_sum / (events * renorm_steps * dt)
  return LyapunovResult(lambda_=float(lam), n_renorms=int(events),
                        truncated=status != 0, d0=d0,
                        renorm_interval=renorm_steps * dt,
                        restarts=int(restarts))


@dataclass(frozen=True)
class CycleResult:
  is_cycle: bool
  period: float | None
  n_crossings: int
  last_gap: float | None
  note: str = ""


def detect_limit_cycle(traj: Trajectory,
                       transient_fraction: float = 0.5,
                       tol_cycle: float = 1e-4,
                       period_rel_tol: float = 0.01) -> CycleResult:
  """Closed-orbit test via Poincare section returns.

  The section passes through the mean of the post-transient states with the
  leading principal axis of their scatter as its normal; upward crossings
  are located by linear interpolation.  The orbit counts as a cycle when the
  last two return points agree within tol_cycle in every component, the
  return times have stabilised (relative change below period_rel_tol), and
  the last loop has non-vanishing extent.  Fewer than 3 crossings leave the
  verdict undetermined.
  """
  X = traj.states[int(traj.states.shape[0] * transient_fraction):]
  if X.shape[0] < 10:
    return CycleResult(False, None, 0, None, "too few post-transient samples")
  mean = X.mean(axis=0)
  centered = X - mean
  cov = centered.T @ centered / X.shape[0]
  eigvals, eigvecs = np.linalg.eigh(cov)
  normal = eigvecs[:, -1]  # leading principal axis
  nz = np.flatnonzero(np.abs(normal) > 1e-12)
  if nz.size and normal[nz[0]] < 0:
    normal = -normal
  s = centered @ normal
  up = np.flatnonzero((s[:-1] < 0.0) & (s[1:] >= 0.0))
  if up.size < 3:
    return CycleResult(False, None, int(up.size), None,
                       "fewer than 3 section crossings")
  # interpolated return points and times
  frac = -s[up] / (s[up + 1] - s[up])
  points = X[up] + frac[:, None] * (X[up + 1] - X[up])
  times = traj.t0 + traj.dt * (
      int(traj.states.shape[0] * transient_fraction) + up + frac)
  gaps = np.max(np.abs(np.diff(points, axis=0)), axis=1)
  last_gap = float(gaps[-1])
  intervals = np.diff(times)
  period = float(intervals[-1])
  loop = X[up[-2]:up[-1] + 2]
  loop_extent = float(np.max(loop.max(axis=0) - loop.min(axis=0)))
  if last_gap > tol_cycle:
    return CycleResult(False, None, int(up.size), last_gap,
                       "section returns not converged")
  if len(intervals) >= 2:
    rel = abs(intervals[-1] - intervals[-2]) / max(intervals[-1], 1e-30)
    if rel > period_rel_tol:
      return CycleResult(False, None, int(up.size), last_gap,
                         "return times not stabilised")
  if loop_extent <= 100.0 * tol_cycle:
    return CycleResult(False, None, int(up.size), last_gap,
                       "orbit collapsed toward a point")
  return CycleResult(True, period, int(up.size), last_gap, "")


@dataclass(frozen=True)
class DynamicsVerdict:
  kind: str
  lyapunov: float
  period: float | None
  evidence: Mapping[str, Any] = field(default_factory=dict)

  def __post_init__(self):
    if self.kind not in VERDICT_KINDS:
      raise ValueError(f"kind must be one of {VERDICT_KINDS}, got {self.kind!r}")
    thr = self.evidence.get("chaos_threshold", CHAOS_THRESHOLD)
    if self.kind == "chaotic" and not self.lyapunov > thr:
      raise ValueError("chaotic verdict requires lyapunov > chaos threshold")
    if self.kind == "limit-cycle" and self.period is None:
      raise ValueError("limit-cycle verdict requires a period")


def classify_dynamics(model: ModelSpec,
                      x0: Sequence[float],
                      horizon: float = 5000.0,
                      dt: float = 1e-3,
                      seed: int = 0,
                      record_dt: float = 1e-2,
                      chaos_threshold: float = CHAOS_THRESHOLD,
                      neutral_band: float = NEUTRAL_BAND,
                      amp_tol: float = 1e-3,
                      transient_fraction: float = 0.5,
                      tol_cycle: float = 1e-4,
                      use_kernel: bool = True) -> DynamicsVerdict:
  """Long-run verdict for one initial condition.

  Decision tree: a post-transient tail of vanishing amplitude is a fixed
  point; otherwise separation growth above chaos_threshold is chaotic;
  otherwise converged section returns give a limit cycle (annotated as a
  neutrally stable orbit when |lambda| sits inside neutral_band and the
  model conserves a first integral); anything else is undetermined.
  Truncated runs are undetermined with the truncation recorded.
  """
  stride = max(1, int(round(record_dt / dt)))
  evidence: dict[str, Any] = {
      "horizon": horizon, "dt": dt, "seed": seed,
      "chaos_threshold": chaos_threshold, "neutral_band": neutral_band,
      "amp_tol": amp_tol,
  }
  try:
    traj = integrate(model, x0, horizon, dt=dt, record_stride=stride,
                     use_kernel=use_kernel)
  except StepRejectionError as exc:
    evidence["rejected"] = str(exc)
    return DynamicsVerdict("undetermined", float("nan"), None, evidence)
  if traj.truncated:
    evidence["truncated"] = True
    evidence["last_time"] = traj.last_time
    return DynamicsVerdict("undetermined", float("nan"), None, evidence)

  tail = traj.states[int(traj.states.shape[0] * transient_fraction):]
  amplitude = float(np.max(tail.max(axis=0) - tail.min(axis=0)))
  evidence["amplitude"] = amplitude

  try:
    lya = lyapunov_exponent(model, x0, horizon=horizon, dt=dt, seed=seed,
                            use_kernel=use_kernel)
    lam = lya.lambda_
    evidence["lyapunov_truncated"] = lya.truncated
    if lya.restarts:
      evidence["lyapunov_restarts"] = lya.restarts
  except (StepRejectionError, ValueError) as exc:
    lam = float("nan")
    evidence["lyapunov_error"] = str(exc)

  if amplitude < amp_tol:
    return DynamicsVerdict("fixed-point", lam, None, evidence)

  cycle = detect_limit_cycle(traj, transient_fraction=transient_fraction,
                             tol_cycle=tol_cycle)
  evidence["crossings"] = cycle.n_crossings
  if cycle.last_gap is not None:
    evidence["return_gap"] = cycle.last_gap
  if cycle.note:
    evidence["cycle_note"] = cycle.note

  if math.isfinite(lam) and lam > chaos_threshold:
    return DynamicsVerdict("chaotic", lam, None, evidence)
  if cycle.is_cycle:
    if model.conservative and math.isfinite(lam) and abs(lam) < neutral_band:
      evidence["orbit"] = "neutrally-stable orbit"
    return DynamicsVerdict("limit-cycle", lam, cycle.period, evidence)
  return DynamicsVerdict("undetermined", lam, None, evidence)
