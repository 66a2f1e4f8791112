"""Closed forms, Jacobians, demand identities, and factory equilibria."""

import math

import numpy as np
import pytest

import goodwin_sheaf as gs
from conftest import (brisk_trade, mild_goodwin, mild_trade,
                      random_country_params, random_goodwin_params)
import oracles


# ---------------------------------------------------------------------------
# parameter validation


def test_lv_params_reject_nonpositive():
  with pytest.raises(gs.ParamError):
    gs.LVParams(a=1.0, b=0.0, c=1.0, d=1.0)
  with pytest.raises(gs.ParamError):
    gs.LVParams(a=1.0, b=1.0, c=-2.0, d=1.0)
  with pytest.raises(gs.ParamError):
    gs.LVParams(a=float("nan"), b=1.0, c=1.0, d=1.0)


def test_goodwin_params_need_positive_expansion_rate():
  # 1/sigma - (alpha + beta) must stay positive
  with pytest.raises(gs.ParamError):
    gs.GoodwinParams(alpha=0.2, beta=0.2, gamma=0.04, rho=0.1, sigma=3.0)
  with pytest.raises(gs.ParamError):
    gs.GoodwinParams(alpha=0.02, beta=0.01, gamma=0.04, rho=-0.1, sigma=3.0)
  p = mild_goodwin()
  assert p.net_expansion_rate == pytest.approx(1.0 / 3.0 - 0.03)


def test_country_params_theta_band():
  with pytest.raises(gs.ParamError):
    gs.CountryParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1, sigma=3.0,
                     theta=1.0)
  with pytest.raises(gs.ParamError):
    gs.CountryParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1, sigma=3.0,
                     a_prod=-1.0)


def test_trade_params_price_mode_and_p0():
  c = mild_trade().country1
  with pytest.raises(gs.ParamError):
    gs.TradeParams(country1=c, country2=c, price_mode="instantaneous")
  with pytest.raises(gs.ParamError):
    gs.TradeParams(country1=c, country2=c, p0=(1.0, -1.0))
  assert mild_trade().price_product == 1.0


def test_vadasz_params_capacity_band():
  with pytest.raises(gs.ParamError):
    gs.VadaszParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1, sigma=3.0,
                    K=1.5)


# ---------------------------------------------------------------------------
# Lotka-Volterra


def test_lv_rhs_vanishes_at_equilibrium():
  p = gs.LVParams(a=1.0, b=1.0, c=1.0, d=1.0)
  assert np.allclose(gs.lv_rhs((1.0, 1.0), p), 0.0)
  rng = np.random.default_rng(7)
  for _ in range(50):
    a, b, c, d = rng.uniform(0.5, 3.0, size=4)
    p = gs.LVParams(a=a, b=b, c=c, d=d)
    res = gs.lv_rhs((c / d, a / b), p)
    assert np.max(np.abs(res)) < 1e-14


def test_lv_jacobian_trace_and_det():
  # dyadic rates make the closed forms exact in floating point
  rng = np.random.default_rng(3)
  choices = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
  for _ in range(50):
    a, b, c, d = rng.choice(choices, size=4)
    p = gs.LVParams(a=a, b=b, c=c, d=d)
    J = gs.lv_jacobian((c / d, a / b), p)
    assert J[0, 0] == 0.0 and J[1, 1] == 0.0
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    assert det == a * c


def test_lv_jacobian_matches_finite_differences():
  p = gs.LVParams(a=1.2, b=0.7, c=0.9, d=1.4)
  x = np.array([1.7, 0.6])
  J = gs.lv_jacobian(x, p)
  eps = 1e-6
  for j in range(2):
    dx = np.zeros(2)
    dx[j] = eps
    col = (gs.lv_rhs(x + dx, p) - gs.lv_rhs(x - dx, p)) / (2 * eps)
    assert np.allclose(J[:, j], col, atol=1e-8)


def test_lv_first_integral_minimised_at_equilibrium():
  p = gs.LVParams(a=1.0, b=1.0, c=1.0, d=1.0)
  fn = lambda x, y: gs.lv_first_integral((x, y), p)
  grid = np.linspace(0.5, 2.0, 31)
  _, x_best, y_best = oracles.grid_minimum(fn, grid, grid)
  assert x_best == pytest.approx(1.0)
  assert y_best == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Goodwin


def test_goodwin_equilibrium_closed_form():
  rng = np.random.default_rng(11)
  for _ in range(100):
    p = random_goodwin_params(rng)
    v_star = (p.alpha + p.gamma) / p.rho
    u_star = 1.0 - p.sigma * (p.alpha + p.beta)
    res = gs.goodwin_rhs((v_star, u_star), p)
    assert np.max(np.abs(res)) < 1e-12


def test_goodwin_jacobian_zero_trace_at_equilibrium():
  rng = np.random.default_rng(13)
  for _ in range(100):
    p = random_goodwin_params(rng)
    fp = gs.goodwin_equilibrium(p)
    J = gs.goodwin_jacobian(fp.state, p)
    assert abs(J[0, 0] + J[1, 1]) < 1e-12


def test_goodwin_equilibrium_is_center():
  fp = gs.goodwin_equilibrium(mild_goodwin())
  assert fp.state == pytest.approx((0.6, 0.91))
  assert fp.classification == "center/neutrally-stable"
  assert fp.residual < 1e-15
  assert all(abs(ev.real) < 1e-14 for ev in fp.eigenvalues)


def test_goodwin_period_formula():
  p = mild_goodwin()
  expected = 2 * math.pi / math.sqrt((p.alpha + p.gamma) * p.net_expansion_rate)
  assert gs.goodwin_period(p) == pytest.approx(expected)
  assert gs.goodwin_period(p) == pytest.approx(46.57406815401939, abs=1e-10)


def test_goodwin_factory_wiring():
  model = gs.goodwin(mild_goodwin())
  assert model.state_names == ("v", "u")
  assert model.conservative
  assert model.positive_states == ("v", "u")
  x = np.array([0.5, 0.8])
  assert np.allclose(model.rhs(x), gs.goodwin_rhs(x, mild_goodwin()))
  # the trivial rest point is reported alongside the interior one
  states = [fp.state for fp in model.equilibria()]
  assert (0.0, 0.0) in states


# ---------------------------------------------------------------------------
# modified Goodwin


def test_linear_phillips_profile():
  g = gs.linear_phillips(0.05)
  assert g(0.2) == pytest.approx(0.04)
  assert g(0.2) > g(0.8) > 0
  with pytest.raises(gs.ParamError):
    gs.linear_phillips(0.0)


def test_modified_goodwin_factory_wiring():
  p = mild_goodwin()
  with pytest.raises(gs.ParamError):
    gs.modified_goodwin(p, damping_scale=-0.05)
  model = gs.modified_goodwin(p, damping_scale=0.05)
  assert model.params == (p, 0.05)
  assert not model.conservative
  x = np.array([0.5, 0.8])
  expected = gs.modified_goodwin_rhs(x, p, gs.linear_phillips(0.05))
  assert np.allclose(model.rhs(x), expected)


def test_modified_goodwin_interior_spiral_in():
  model = gs.modified_goodwin(mild_goodwin(), damping_scale=0.05)
  interior = [fp for fp in model.equilibria() if fp.state[0] > 0][0]
  v_star, u_star = interior.state
  assert u_star == pytest.approx(0.91)
  # the wage-response boost shifts the employment coordinate down
  g_at = 0.05 * (1.0 - u_star)
  assert v_star == pytest.approx((0.02 + 0.04 - g_at) / 0.1)
  assert interior.classification == "spiral-in"
  ev = sorted(interior.eigenvalues, key=lambda z: z.imag)
  assert ev[1].real == pytest.approx(-0.022749999999, abs=1e-9)
  assert abs(ev[1].imag) == pytest.approx(0.12774, abs=1e-4)


def test_modified_goodwin_trace_is_share_times_damping_slope():
  rng = np.random.default_rng(17)
  for _ in range(20):
    p = random_goodwin_params(rng)
    scale = float(rng.uniform(0.01, 0.1))
    model = gs.modified_goodwin(p, damping_scale=scale)
    interior = [fp for fp in model.equilibria() if fp.state[0] > 0][0]
    J = gs.jacobian_at(model, interior.state)
    u_star = interior.state[1]
    # g(u) = scale (1 - u) has slope -scale, so tr J = -u* scale < 0
    assert J[0, 0] + J[1, 1] == pytest.approx(-u_star * scale, rel=1e-6)


# ---------------------------------------------------------------------------
# Vadasz lag model


def test_vadasz_rhs_and_equilibrium():
  p = gs.VadaszParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1, sigma=3.0,
                      K=0.95, lag_rate=0.5)
  model = gs.vadasz(p)
  assert model.state_names == ("v", "u", "z")
  interior = [fp for fp in model.equilibria() if fp.state[1] > 0][0]
  assert interior.residual < 1e-9
  # the lagged signal settles at the employment rate itself
  assert interior.state[2] == pytest.approx(interior.state[0], rel=1e-9)
  # z chases v with the configured lag rate
  x = np.array([0.5, 0.8, 0.3])
  dz = gs.vadasz_rhs(x, p)[2]
  assert dz == pytest.approx(0.5 * (0.5 - 0.3))


def test_vadasz_shares_the_wage_response_law():
  g = mild_goodwin()
  p = gs.VadaszParams(alpha=g.alpha, beta=g.beta, gamma=g.gamma, rho=g.rho,
                      sigma=g.sigma, K=1.0, lag_rate=1.0)
  # with the lagged signal pinned to v, the share rate is the undamped law;
  # the employment rate differs by the capacity factor (1 - v)/K
  full = gs.vadasz_rhs(np.array([0.5, 0.8, 0.5]), p)
  base = gs.goodwin_rhs(np.array([0.5, 0.8]), g)
  assert full[1] == pytest.approx(base[1], rel=1e-12)
  capacity = (1.0 - 0.5) / p.K
  expected_dv = 0.5 * (g.net_expansion_rate * capacity - 0.8 / g.sigma)
  assert full[0] == pytest.approx(expected_dv, rel=1e-12)


# ---------------------------------------------------------------------------
# two-country trade


def test_demand_budget_identity():
  rng = np.random.default_rng(23)
  for _ in range(50):
    c = random_country_params(rng)
    own, other = rng.uniform(0.3, 3.0, size=2)
    u, v = rng.uniform(0.2, 1.0, size=2)
    q_own, q_other = gs.demand(c, other_price=other, own_price=own, u=u, v=v)
    income = c.a_prod * u * v * c.N
    assert own * q_own + other * q_other == pytest.approx(income, rel=1e-12)
    assert q_own > 0 and q_other > 0


def test_demand_rejects_nonpositive_prices():
  c = mild_trade().country1
  with pytest.raises(gs.DomainError):
    gs.demand(c, other_price=0.0, own_price=1.0, u=0.9, v=0.6)


def test_price_excess_demand_sums_to_zero():
  rng = np.random.default_rng(29)
  tp = mild_trade("excess-demand-ode")
  for _ in range(20):
    s4 = rng.uniform(0.2, 1.0, size=4)
    prices = rng.uniform(0.3, 3.0, size=2)
    d1, d2 = gs.price_excess_demand_rhs(prices, s4, tp)
    assert d1 + d2 == 0.0


def test_excess_demand_vanishes_at_clearing_prices():
  rng = np.random.default_rng(31)
  for _ in range(20):
    theta = float(rng.uniform(0.2, 0.8))
    c1 = random_country_params(rng, theta=theta)
    c2 = random_country_params(rng, theta=theta)
    tp = gs.TradeParams(country1=c1, country2=c2, p0=(1.0, 1.0))
    s4 = rng.uniform(0.2, 1.0, size=4)
    e = gs.short_run_price_equilibrium(s4, tp)
    d1, d2 = gs.price_excess_demand_rhs(e, s4, tp)
    assert abs(d1) < 1e-12 and abs(d2) < 1e-12
    assert e[0] * e[1] == pytest.approx(tp.price_product, rel=1e-12)


def test_price_adjustment_eigenvalues():
  rng = np.random.default_rng(37)
  for _ in range(20):
    c1 = random_country_params(rng)
    c2 = random_country_params(rng)
    tp = gs.TradeParams(country1=c1, country2=c2)
    s4 = rng.uniform(0.2, 1.0, size=4)
    M = gs.price_adjustment_matrix(s4, tp)
    i1 = c1.a_prod * s4[1] * s4[0] * c1.N
    i2 = c2.a_prod * s4[3] * s4[2] * c2.N
    expected = -((1 - c1.theta) * i1 + (1 - c2.theta) * i2)
    ev = sorted(np.linalg.eigvals(M).real)
    assert ev[1] == pytest.approx(0.0, abs=1e-10)
    assert ev[0] == pytest.approx(expected, abs=1e-10)


def test_two_country_equilibrium_is_fixed_in_both_modes():
  for mode in gs.PRICE_MODES:
    tp = brisk_trade(sigma2=2.0, price_mode=mode)
    model = gs.two_country(tp)
    interior = [fp for fp in model.equilibria() if fp.state[0] > 0][0]
    assert interior.residual < 1e-12
    rates = gs.two_country_rhs(interior.state, tp)
    assert np.max(np.abs(rates)) < 1e-12
    v1, u1, _, v2, u2, _ = interior.state
    assert (v1, v2) == pytest.approx((0.6, 0.6))
    assert (u1, u2) == pytest.approx((0.46, 0.64))


def test_two_country_state_names_and_positivity():
  model = gs.two_country(mild_trade())
  assert model.state_names == ("v1", "u1", "p1", "v2", "u2", "p2")
  assert set(model.positive_states) == set(model.state_names)


def test_algebraic_mode_projection_holds_price_product():
  tp = mild_trade()
  model = gs.two_country(tp)
  x = np.array([0.55, 0.85, 1.3, 0.65, 0.95, 1.1])
  projected = model.project(x)
  assert projected[2] * projected[5] == pytest.approx(tp.price_product,
                                                      rel=1e-12)
  # the real states pass through untouched
  assert np.array_equal(projected[[0, 1, 3, 4]], x[[0, 1, 3, 4]])
