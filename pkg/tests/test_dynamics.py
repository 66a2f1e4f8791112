"""Integrator accuracy, conservation, Lyapunov estimates, verdicts."""

import numpy as np
import pytest

import goodwin_sheaf as gs
from goodwin_sheaf.dynamics import BLOW_LIMIT
from conftest import brisk_trade, mild_goodwin, mild_trade
import oracles

LV_UNIT = gs.LVParams(a=1.0, b=1.0, c=1.0, d=1.0)


def explosive_model():
  """dx/dt = x^2 from x0=1 blows up at t=1; handy for truncation tests."""
  return gs.ModelSpec(
      name="explosive", state_names=("x",), params=None,
      rhs=lambda s: np.array([s[0] * s[0]]))


def decaying_model():
  """dx/dt = -1 marches straight through zero; positivity must reject it."""
  return gs.ModelSpec(
      name="decaying", state_names=("x",), params=None,
      rhs=lambda s: np.array([-1.0]), positive_states=("x",))


# ---------------------------------------------------------------------------
# RK4 core


def test_single_step_matches_textbook_rk4():
  model = gs.lotka_volterra(LV_UNIT)
  dt = 1e-2
  traj = gs.integrate(model, (2.0, 1.0), t_end=dt, dt=dt, use_kernel=False)
  f = lambda x: tuple(gs.lv_rhs(x, LV_UNIT))
  expected = oracles.rk4_step_reference(f, (2.0, 1.0), dt)
  assert traj.states[-1] == pytest.approx(expected, rel=1e-15)


def test_halving_dt_divides_error_by_sixteen():
  model = gs.lotka_volterra(LV_UNIT)
  x0 = (2.0, 1.0)
  ref = gs.integrate(model, x0, t_end=1.0, dt=1e-5).states[-1]
  errs = []
  for dt in (4e-2, 2e-2):
    end = gs.integrate(model, x0, t_end=1.0, dt=dt).states[-1]
    errs.append(np.max(np.abs(end - ref)))
  ratio = errs[0] / errs[1]
  assert 12.0 < ratio < 20.0


def test_kernel_and_python_paths_agree_exactly():
  cases = [
      (gs.lotka_volterra(LV_UNIT), (2.0, 1.0)),
      (gs.goodwin(mild_goodwin()), (0.45, 0.85)),
      (gs.modified_goodwin(mild_goodwin(), 0.05), (0.45, 0.85)),
      (gs.vadasz(gs.VadaszParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1,
                                 sigma=3.0, K=0.95, lag_rate=0.5)),
       (0.45, 0.85, 0.45)),
      (gs.two_country(mild_trade()), (0.55, 0.85, 1.0, 0.65, 0.95, 1.0)),
      (gs.two_country(mild_trade("excess-demand-ode")),
       (0.55, 0.85, 1.0, 0.65, 0.95, 1.0)),
  ]
  for model, x0 in cases:
    fast = gs.integrate(model, x0, t_end=2.0, dt=1e-3, use_kernel=True)
    slow = gs.integrate(model, x0, t_end=2.0, dt=1e-3, use_kernel=False)
    assert np.array_equal(fast.states, slow.states), model.name


def test_recording_stride_thins_the_grid():
  model = gs.goodwin(mild_goodwin())
  traj = gs.integrate(model, (0.45, 0.85), t_end=1.0, dt=1e-3,
                      record_stride=10)
  assert traj.dt == pytest.approx(1e-2)
  assert traj.n_samples == 101
  assert traj.t[0] == 0.0
  assert traj.t[-1] == pytest.approx(1.0)


def test_integrate_validates_inputs():
  model = gs.goodwin(mild_goodwin())
  with pytest.raises(ValueError):
    gs.integrate(model, (0.45,), t_end=1.0)
  with pytest.raises(ValueError):
    gs.integrate(model, (0.45, 0.85), t_end=-1.0)
  with pytest.raises(ValueError):
    gs.integrate(model, (-0.45, 0.85), t_end=1.0)


def test_blow_up_truncates_with_flag():
  traj = gs.integrate(explosive_model(), (1.0,), t_end=5.0, dt=1e-4)
  assert traj.truncated
  assert traj.last_time is not None and traj.last_time < 1.05
  assert np.all(np.abs(traj.states) <= BLOW_LIMIT)


def test_zero_crossing_raises_step_rejection():
  with pytest.raises(gs.StepRejectionError):
    gs.integrate(decaying_model(), (0.5,), t_end=2.0, dt=1e-3)


def test_time_reversal_returns_home():
  model = gs.lotka_volterra(LV_UNIT)
  forward = gs.integrate(model, (2.0, 1.0), t_end=10.0, dt=1e-3)
  back_spec = gs.ModelSpec(
      name="lv-backward", state_names=("x", "y"), params=LV_UNIT,
      rhs=lambda s: -gs.lv_rhs(s, LV_UNIT), positive_states=("x", "y"))
  back = gs.integrate(back_spec, forward.states[-1], t_end=10.0, dt=1e-3)
  assert np.max(np.abs(back.states[-1] - np.array([2.0, 1.0]))) < 1e-9


# ---------------------------------------------------------------------------
# conservation


def test_lv_integral_drift_is_tiny():
  model = gs.lotka_volterra(LV_UNIT)
  traj = gs.integrate(model, (2.0, 1.0), t_end=100.0, dt=1e-3,
                      record_stride=100)
  report = gs.conservation_report(
      traj, lambda s: gs.lv_first_integral(s, LV_UNIT))
  assert report["relative_drift"] < 1e-6


def test_goodwin_integral_drift_is_tiny():
  p = mild_goodwin()
  model = gs.goodwin(p)
  traj = gs.integrate(model, (0.45, 0.85), t_end=50.0, dt=1e-3,
                      record_stride=100)
  report = gs.conservation_report(
      traj, lambda s: gs.goodwin_first_integral(s, p))
  assert report["relative_drift"] < 1e-9


def test_drift_scales_as_dt_fourth_power():
  model = gs.lotka_volterra(LV_UNIT)
  drifts, dts = [], (8e-3, 4e-3, 2e-3)
  for dt in dts:
    traj = gs.integrate(model, (2.0, 1.0), t_end=20.0, dt=dt,
                        record_stride=max(1, int(round(0.1 / dt))))
    rep = gs.conservation_report(
        traj, lambda s: gs.lv_first_integral(s, LV_UNIT))
    drifts.append(rep["max_drift"])
  slope = oracles.log_slope(dts, drifts)
  assert 3.5 <= slope <= 4.5


def test_price_sum_conserved_in_excess_demand_mode():
  tp = mild_trade("excess-demand-ode")
  model = gs.two_country(tp)
  x0 = (0.55, 0.85, 1.2, 0.65, 0.95, 0.8)
  traj = gs.integrate(model, x0, t_end=50.0, dt=1e-3, record_stride=100)
  sums = traj.states[:, 2] + traj.states[:, 5]
  assert np.max(np.abs(sums - 2.0)) < 1e-10
  # the product genuinely moves, it is not an accidental second invariant
  products = traj.states[:, 2] * traj.states[:, 5]
  assert np.max(np.abs(products - products[0])) > 1e-6


def test_price_product_pinned_in_algebraic_mode():
  tp = mild_trade()
  model = gs.two_country(tp)
  x0 = (0.55, 0.85, 1.0, 0.65, 0.95, 1.0)
  traj = gs.integrate(model, x0, t_end=50.0, dt=1e-3, record_stride=100)
  products = traj.states[:, 2] * traj.states[:, 5]
  assert np.max(np.abs(products - tp.price_product)) < 1e-12


# ---------------------------------------------------------------------------
# Lyapunov exponent


def test_lyapunov_flat_for_conservative_orbit():
  model = gs.goodwin(mild_goodwin())
  res = gs.lyapunov_exponent(model, (0.45, 0.85), horizon=300.0)
  assert abs(res.lambda_) < 5e-3
  assert res.n_renorms > 0
  assert not res.truncated


def test_lyapunov_negative_for_damped_spiral():
  model = gs.modified_goodwin(mild_goodwin(), 0.05)
  res = gs.lyapunov_exponent(model, (0.45, 0.85), horizon=800.0)
  # contraction at the damped rate: half the trace of the interior Jacobian
  assert res.lambda_ == pytest.approx(-0.02275, abs=3e-3)


def test_lyapunov_kernel_matches_python():
  model = gs.goodwin(mild_goodwin())
  fast = gs.lyapunov_exponent(model, (0.45, 0.85), horizon=50.0,
                              use_kernel=True)
  slow = gs.lyapunov_exponent(model, (0.45, 0.85), horizon=50.0,
                              use_kernel=False)
  assert fast.lambda_ == slow.lambda_
  assert fast.n_renorms == slow.n_renorms
  assert fast.restarts == slow.restarts


def test_lyapunov_requires_room_for_renormalisation():
  model = gs.goodwin(mild_goodwin())
  with pytest.raises(ValueError):
    gs.lyapunov_exponent(model, (0.45, 0.85), horizon=0.5, renorm_interval=1.0)


# ---------------------------------------------------------------------------
# limit-cycle detection


def test_goodwin_orbit_detected_as_cycle_with_measured_period():
  p = mild_goodwin()
  model = gs.goodwin(p)
  traj = gs.integrate(model, (0.45, 0.85), t_end=400.0, dt=1e-3,
                      record_stride=10)
  cycle = gs.detect_limit_cycle(traj)
  assert cycle.is_cycle
  # independent crossing-based measurement on the employment series
  tail = traj.states[traj.n_samples // 2:]
  t_tail = traj.t[traj.n_samples // 2:]
  v_star = gs.goodwin_equilibrium(p).state[0]
  expected = oracles.mean_crossing_period(t_tail, tail[:, 0], v_star)
  assert cycle.period == pytest.approx(expected, rel=1e-3)
  # finite amplitude stretches the small-oscillation period a little
  assert cycle.period == pytest.approx(gs.goodwin_period(p), rel=0.01)


def test_damped_spiral_is_not_a_cycle():
  model = gs.modified_goodwin(mild_goodwin(), 0.05)
  traj = gs.integrate(model, (0.45, 0.85), t_end=400.0, dt=1e-3,
                      record_stride=10)
  cycle = gs.detect_limit_cycle(traj)
  assert not cycle.is_cycle


# ---------------------------------------------------------------------------
# classification


def test_goodwin_classifies_as_neutral_cycle():
  verdict = gs.classify_dynamics(gs.goodwin(mild_goodwin()), (0.45, 0.85),
                                 horizon=400.0)
  assert verdict.kind == "limit-cycle"
  assert abs(verdict.lyapunov) < 5e-3
  assert verdict.period == pytest.approx(46.803, abs=0.01)
  assert verdict.evidence.get("orbit") == "neutrally-stable orbit"


def test_modified_goodwin_classifies_as_fixed_point():
  verdict = gs.classify_dynamics(gs.modified_goodwin(mild_goodwin(), 0.05),
                                 (0.58, 0.89), horizon=2000.0)
  assert verdict.kind == "fixed-point"
  assert verdict.lyapunov < 0


def test_truncated_run_is_undetermined_with_evidence():
  verdict = gs.classify_dynamics(explosive_model(), (1.0,), horizon=5.0,
                                 dt=1e-4)
  assert verdict.kind == "undetermined"
  assert verdict.evidence["truncated"]
  assert verdict.evidence["last_time"] < 1.05


def test_anchored_trade_start_classifies_as_limit_cycle():
  model = gs.two_country(brisk_trade(sigma2=2.0))
  x0 = (0.5, 0.35, 1.0, 0.6, 0.64, 1.0)
  verdict = gs.classify_dynamics(model, x0, horizon=1000.0)
  assert verdict.kind == "limit-cycle"
  assert verdict.period == pytest.approx(26.49, abs=0.05)
  assert abs(verdict.lyapunov) < 5e-3


def test_classification_is_deterministic():
  model = gs.goodwin(mild_goodwin())
  a = gs.classify_dynamics(model, (0.45, 0.85), horizon=200.0)
  b = gs.classify_dynamics(model, (0.45, 0.85), horizon=200.0)
  assert a.kind == b.kind
  assert a.lyapunov == b.lyapunov
  assert a.period == b.period


def test_verdict_record_enforces_its_own_invariants():
  with pytest.raises(ValueError):
    gs.DynamicsVerdict(kind="chaotic", lyapunov=0.0, period=None)
  with pytest.raises(ValueError):
    gs.DynamicsVerdict(kind="limit-cycle", lyapunov=0.0, period=None)
  with pytest.raises(ValueError):
    gs.DynamicsVerdict(kind="mystery", lyapunov=0.0, period=None)
