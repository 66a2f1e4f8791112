"""Compiled fixed-step integrators for the catalogued vector fields.

Kernel ids (ModelSpec.kernel_id):
  1 predator-prey            par = (a, b, c, d)
  2 employment cycle         par = (alpha, beta, gamma, rho, sigma)
  3 damped employment cycle  par = (alpha, beta, gamma, rho, sigma, damping)
  4 lagged-share variant     par = (alpha, beta, gamma, rho, sigma, K, lag_rate)
  5 two-country, algebraic prices   par = (8 country-1, 8 country-2, P)
  6 two-country, excess-demand ODE  par = same layout

Arithmetic mirrors models.py expression-for-expression so the compiled and
interpreted integrators agree to rounding error.  Status codes returned by
the loops: 0 ok, 1 blow-up/non-finite, 2 positivity violated, 3 separation
degenerate (Lyapunov loop only).
"""

import numpy as np
from numba import njit

BLOW_LIMIT = 1e12


@njit(cache=True)
def _rhs(kid, par, x, out):
  if kid == 1:
    a, b, c, d = par[0], par[1], par[2], par[3]
    out[0] = x[0] * (a - b * x[1])
    out[1] = x[1] * (-c + d * x[0])
  elif kid == 2:
    alpha, beta, gamma, rho, sigma = par[0], par[1], par[2], par[3], par[4]
    A = 1.0 / sigma - (alpha + beta)
    out[0] = x[0] * (A - x[1] / sigma)
    out[1] = x[1] * (-(alpha + gamma) + rho * x[0])
  elif kid == 3:
    alpha, beta, gamma, rho, sigma, damp = (
        par[0], par[1], par[2], par[3], par[4], par[5])
    A = 1.0 / sigma - (alpha + beta)
    out[0] = x[0] * (A - x[1] / sigma)
    out[1] = x[1] * (-(alpha + gamma) + rho * x[0] + damp * (1.0 - x[1]))
  elif kid == 4:
    alpha, beta, gamma, rho, sigma, K, lag = (
        par[0], par[1], par[2], par[3], par[4], par[5], par[6])
    A = 1.0 / sigma - (alpha + beta)
    out[0] = x[0] * (A * (1.0 - x[0]) / K - x[1] / sigma)
    out[1] = x[1] * (-(alpha + gamma) + rho * x[2])
    out[2] = lag * (x[0] - x[2])
  else:
    # two-country: state (v1, u1, p1, v2, u2, p2)
    a1, b1, g1, r1, s1 = par[0], par[1], par[2], par[3], par[4]
    ap1, n1, t1 = par[5], par[6], par[7]
    a2, b2, g2, r2, s2 = par[8], par[9], par[10], par[11], par[12]
    ap2, n2, t2 = par[13], par[14], par[15]
    A1 = 1.0 / s1 - (a1 + b1)
    A2 = 1.0 / s2 - (a2 + b2)
    out[0] = x[0] * (A1 - x[1] / s1)
    out[1] = (x[1] / x[2]) * (-(a1 + g1) + r1 * x[0])
    out[3] = x[3] * (A2 - x[4] / s2)
    out[4] = (x[4] / x[5]) * (-(a2 + g2) + r2 * x[3])
    if kid == 6:
      i1 = ap1 * x[1] * x[0] * n1
      i2 = ap2 * x[4] * x[3] * n2
      d1 = (1.0 - t2) * x[5] * i2 - (1.0 - t1) * x[2] * i1
      out[2] = d1
      out[5] = -d1
    else:
      out[2] = 0.0
      out[5] = 0.0


@njit(cache=True)
def _project(kid, par, x):
  if kid == 5:
    ap1, n1 = par[5], par[6]
    ap2, n2 = par[13], par[14]
    P = par[16]
    i1 = ap1 * x[1] * x[0] * n1
    i2 = ap2 * x[4] * x[3] * n2
    if i1 <= 0.0 or i2 <= 0.0:
      return 1
    p1 = np.sqrt(P * i2 / i1)
    x[2] = p1
    x[5] = P / p1
  return 0


@njit(cache=True)
def _step(kid, par, x, dt, k1, k2, k3, k4, tmp):
  n = x.shape[0]
  _rhs(kid, par, x, k1)
  for i in range(n):
    tmp[i] = x[i] + 0.5 * dt * k1[i]
  _rhs(kid, par, tmp, k2)
  for i in range(n):
    tmp[i] = x[i] + 0.5 * dt * k2[i]
  _rhs(kid, par, tmp, k3)
  for i in range(n):
    tmp[i] = x[i] + dt * k3[i]
  _rhs(kid, par, tmp, k4)
  for i in range(n):
    x[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit(cache=True)
def _state_bad(x, pos_mask):
  for i in range(x.shape[0]):
    if not np.isfinite(x[i]) or np.abs(x[i]) > BLOW_LIMIT:
      return 1
    if pos_mask[i] == 1 and x[i] <= 0.0:
      return 2
  return 0


@njit(cache=True)
def integrate_loop(kid, par, x0, dt, n_steps, stride, pos_mask):
  """RK4 march recording every `stride`-th state (plus the initial one).

  Returns (records, n_recorded, status, last_good_step)."""
  dim = x0.shape[0]
  n_rec = n_steps // stride + 1
  out = np.empty((n_rec, dim))
  k1 = np.empty(dim); k2 = np.empty(dim); k3 = np.empty(dim)
  k4 = np.empty(dim); tmp = np.empty(dim)
  x = x0.copy()
  _project(kid, par, x)
  for i in range(dim):
    out[0, i] = x[i]
  rec = 1
  status = 0
  last = 0
  for step in range(1, n_steps + 1):
    _step(kid, par, x, dt, k1, k2, k3, k4, tmp)
    if _project(kid, par, x) != 0:
      status = 1
      break
    bad = _state_bad(x, pos_mask)
    if bad != 0:
      status = bad
      break
    last = step
    if step % stride == 0:
      for i in range(dim):
        out[rec, i] = x[i]
      rec += 1
  return out, rec, status, last


@njit(cache=True)
def lyapunov_loop(kid, par, x0, y0, dt, renorm_steps, n_renorms, d0, pos_mask):
  """Two-trajectory separation-growth accumulator.

  Returns (sum of log(d/d0) over completed renormalisations, count, status,
  restarts).  Failures of the companion trajectory alone (positivity graze,
  float-level merge with the base) reseed the companion at distance d0 along
  a cycling axis instead of aborting; only base-trajectory failures stop the
  loop.  The interval containing a restart contributes no event.
  """
  dim = x0.shape[0]
  k1 = np.empty(dim); k2 = np.empty(dim); k3 = np.empty(dim)
  k4 = np.empty(dim); tmp = np.empty(dim)
  x = x0.copy()
  y = y0.copy()
  _project(kid, par, x)
  _project(kid, par, y)
  log_sum = 0.0
  events = 0
  status = 0
  restarts = 0
  skip_event = False
  for _r in range(n_renorms):
    for _s in range(renorm_steps):
      _step(kid, par, x, dt, k1, k2, k3, k4, tmp)
      if _project(kid, par, x) != 0:
        return log_sum, events, 1, restarts
      bad = _state_bad(x, pos_mask)
      if bad != 0:
        return log_sum, events, bad, restarts
      _step(kid, par, y, dt, k1, k2, k3, k4, tmp)
      y_bad = _state_bad(y, pos_mask)
      if y_bad == 0:
        y_bad = _project(kid, par, y)
      if y_bad != 0:
        for i in range(dim):
          y[i] = x[i]
        y[restarts % dim] += d0
        restarts += 1
        skip_event = True
    d2 = 0.0
    for i in range(dim):
      d2 += (y[i] - x[i]) * (y[i] - x[i])
    d = np.sqrt(d2)
    if not np.isfinite(d):
      return log_sum, events, 3, restarts
    if d <= 0.0:
      for i in range(dim):
        y[i] = x[i]
      y[restarts % dim] += d0
      restarts += 1
      skip_event = False
      continue
    if skip_event:
      skip_event = False
    else:
      log_sum += np.log(d / d0)
      events += 1
    scale = d0 / d
    for i in range(dim):
      y[i] = x[i] + (y[i] - x[i]) * scale
  return log_sum, events, status, restarts
