"""Equation-system encodings of the catalogued models.

Two readings of a differential model are encoded:

* pointwise: each state and each rate is an independent coordinate at one
  instant, and every model equation relates them algebraically.  This is the
  reading the section-extension machinery works on.
* trajectory: each variable carries a whole sampled series, rates must match
  central differences of their states, and the differentiation constraints
  become equation nodes of their own.

Variable ids are namespaced (e.g. "country1.u"); rate variables carry a "d"
prefix on the final component ("country1.du" is the wage-share rate).
"""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

import numpy as np

from . import models as m
from .equation_sheaf import Equation, EquationSystem, dependency_graph
from .poset_sheaf import (
    Poset,
    Sheaf,
    StalkSpace,
    finite_set,
    product_space,
    real_interval,
    real_vector,
)

__all__ = [
    "RATE_BRACKETS",
    "goodwin_pointwise_system",
    "two_country_pointwise_system",
    "generic_pointwise_system",
    "goodwin_trajectory_system",
    "commutativity_demo",
    "state_collapse_map",
    "trade_clusters",
    "TRADE_SUBSYSTEMS",
]

# default chase domains: shares and employment rates live in (0, 2),
# prices in (0, 100); rates are unconstrained reals
SHARE_SPACE = real_interval(0.0, 2.0)
PRICE_SPACE = real_interval(0.0, 100.0)
RATE_SPACE = real_vector(1)
RATE_BRACKETS = {"share": (0.0, 2.0), "price": (0.0, 100.0)}


# ---------------------------------------------------------------------------
# single-economy pointwise system


def goodwin_pointwise_system(p: m.GoodwinParams) -> EquationSystem:
  """Instantaneous relations of the employment cycle: variables u, v, du,
  dv; the two rate definitions carry closed solved forms for every slot."""
  A = p.net_expansion_rate
  ag = p.alpha + p.gamma

  eq_dv = Equation(
      id="eq.dv",
      variables=("v", "u", "dv"),
      residual=lambda v, u, dv: dv - v * (A - u / p.sigma),
      solved_forms={
          "dv": lambda v, u: v * (A - u / p.sigma),
          "v": lambda u, dv: dv / (A - u / p.sigma),
          "u": lambda v, dv: p.sigma * (A - dv / v),
      },
      target="dv",
  )
  eq_du = Equation(
      id="eq.du",
      variables=("u", "v", "du"),
      residual=lambda u, v, du: du - u * (-ag + p.rho * v),
      solved_forms={
          "du": lambda u, v: u * (-ag + p.rho * v),
          "u": lambda v, du: du / (-ag + p.rho * v),
          "v": lambda u, du: (du / u + ag) / p.rho,
      },
      target="du",
  )
  variables = {
      "u": SHARE_SPACE,
      "v": SHARE_SPACE,
      "du": RATE_SPACE,
      "dv": RATE_SPACE,
  }
  return EquationSystem(variables, (eq_dv, eq_du))


# ---------------------------------------------------------------------------
# two-country pointwise system


def _income(c: m.CountryParams, u: float, v: float) -> float:
  return c.a_prod * u * v * c.N


def two_country_pointwise_system(tp: m.TradeParams,
                                 price_form: str | None = None) -> EquationSystem:
  """Instantaneous relations of the trade model: twelve variables (six
  states, six rates) and six equations.

  price_form "conserved-product" uses the square-root price rates whose
  product is pinned to P = p0_1 * p0_2; "excess-demand" uses the raw excess
  demand rates (which reference the price levels themselves).  Defaults to
  the form matching tp.price_mode.
  """
  if price_form is None:
    price_form = ("excess-demand" if tp.price_mode == "excess-demand-ode"
                  else "conserved-product")
  if price_form not in ("conserved-product", "excess-demand"):
    raise ValueError(f"unknown price_form {price_form!r}")
  c1, c2 = tp.country1, tp.country2
  P = tp.price_product

  def country_equations(tag: str, c: m.CountryParams) -> tuple[Equation, Equation]:
    A = c.net_expansion_rate
    ag = c.alpha + c.gamma
    v_, u_, p_ = f"country{tag}.v", f"country{tag}.u", f"country{tag}.p"
    dv_, du_ = f"country{tag}.dv", f"country{tag}.du"
    eq_dv = Equation(
        id=f"eq.dv{tag}",
        variables=(v_, u_, dv_),
        residual=lambda v, u, dv: dv - v * (A - u / c.sigma),
        solved_forms={
            dv_: lambda v, u: v * (A - u / c.sigma),
            v_: lambda u, dv: dv / (A - u / c.sigma),
            u_: lambda v, dv: c.sigma * (A - dv / v),
        },
        target=dv_,
    )
    eq_du = Equation(
        id=f"eq.du{tag}",
        variables=(u_, p_, v_, du_),
        residual=lambda u, p, v, du: du - (u / p) * (-ag + c.rho * v),
        solved_forms={
            du_: lambda u, p, v: (u / p) * (-ag + c.rho * v),
            p_: lambda u, v, du: u * (-ag + c.rho * v) / du,
            u_: lambda p, v, du: du * p / (-ag + c.rho * v),
            v_: lambda u, p, du: (du * p / u + ag) / c.rho,
        },
        target=du_,
    )
    return eq_dv, eq_du

  eq_dv1, eq_du1 = country_equations("1", c1)
  eq_dv2, eq_du2 = country_equations("2", c2)

  u1, v1 = "country1.u", "country1.v"
  u2, v2 = "country2.u", "country2.v"
  p1, p2 = "country1.p", "country2.p"
  dp1, dp2 = "country1.dp", "country2.dp"

  if price_form == "conserved-product":
    # dp1 = sqrt(P I2 / I1), dp2 = sqrt(P I1 / I2); the levels p1, p2 do not
    # appear, so dp1 * dp2 = P identically
    def r1(u1v, v1v, u2v, v2v, dp):
      return dp - math.sqrt(P * _income(c2, u2v, v2v) / _income(c1, u1v, v1v))

    def r2(u1v, v1v, u2v, v2v, dp):
      return dp - math.sqrt(P * _income(c1, u1v, v1v) / _income(c2, u2v, v2v))

    k12 = P * c2.a_prod * c2.N / (c1.a_prod * c1.N)  # dp1^2 = k12 * (u2 v2)/(u1 v1)

    eq_price1 = Equation(
        id="eq.price1",
        variables=(u1, v1, u2, v2, dp1),
        residual=r1,
        solved_forms={
            dp1: lambda u1v, v1v, u2v, v2v: math.sqrt(
                k12 * (u2v * v2v) / (u1v * v1v)),
            u2: lambda u1v, v1v, v2v, dp: dp * dp * u1v * v1v / (k12 * v2v),
            v2: lambda u1v, v1v, u2v, dp: dp * dp * u1v * v1v / (k12 * u2v),
            u1: lambda v1v, u2v, v2v, dp: k12 * u2v * v2v / (dp * dp * v1v),
            v1: lambda u1v, u2v, v2v, dp: k12 * u2v * v2v / (dp * dp * u1v),
        },
        target=dp1,
    )
    k21 = P / k12  # dp2^2 = k21 * (u1 v1)/(u2 v2)
    eq_price2 = Equation(
        id="eq.price2",
        variables=(u1, v1, u2, v2, dp2),
        residual=r2,
        solved_forms={
            dp2: lambda u1v, v1v, u2v, v2v: math.sqrt(
                k21 * (u1v * v1v) / (u2v * v2v)),
            u1: lambda v1v, u2v, v2v, dp: dp * dp * u2v * v2v / (k21 * v1v),
            v1: lambda u1v, u2v, v2v, dp: dp * dp * u2v * v2v / (k21 * u1v),
            u2: lambda u1v, v1v, v2v, dp: k21 * u1v * v1v / (dp * dp * v2v),
            v2: lambda u1v, v1v, u2v, dp: k21 * u1v * v1v / (dp * dp * u2v),
        },
        target=dp2,
    )
  else:
    t1c = 1.0 - c1.theta
    t2c = 1.0 - c2.theta

    def xd1(u1v, v1v, p1v, u2v, v2v, p2v):
      return t2c * p2v * _income(c2, u2v, v2v) - t1c * p1v * _income(c1, u1v, v1v)

    eq_price1 = Equation(
        id="eq.price1",
        variables=(u1, v1, p1, u2, v2, p2, dp1),
        residual=lambda a, b, c, d, e, f, dp: dp - xd1(a, b, c, d, e, f),
        solved_forms={
            dp1: xd1,
            p1: lambda u1v, v1v, u2v, v2v, p2v, dp:
                (t2c * p2v * _income(c2, u2v, v2v) - dp)
                / (t1c * _income(c1, u1v, v1v)),
            p2: lambda u1v, v1v, p1v, u2v, v2v, dp:
                (dp + t1c * p1v * _income(c1, u1v, v1v))
                / (t2c * _income(c2, u2v, v2v)),
        },
        target=dp1,
    )
    eq_price2 = Equation(
        id="eq.price2",
        variables=(u1, v1, p1, u2, v2, p2, dp2),
        residual=lambda a, b, c, d, e, f, dp: dp + xd1(a, b, c, d, e, f),
        solved_forms={
            dp2: lambda a, b, c, d, e, f: -xd1(a, b, c, d, e, f),
        },
        target=dp2,
    )

  variables = {
      u1: SHARE_SPACE, v1: SHARE_SPACE, p1: PRICE_SPACE,
      "country1.du": RATE_SPACE, "country1.dv": RATE_SPACE, dp1: RATE_SPACE,
      u2: SHARE_SPACE, v2: SHARE_SPACE, p2: PRICE_SPACE,
      "country2.du": RATE_SPACE, "country2.dv": RATE_SPACE, dp2: RATE_SPACE,
  }
  return EquationSystem(
      variables, (eq_dv1, eq_du1, eq_price1, eq_price2, eq_dv2, eq_du2))


TRADE_SUBSYSTEMS = {
    "country1": {
        "variables": ("country1.u", "country1.du", "country1.v",
                      "country1.dv", "country1.p"),
        "equations": ("eq.dv1", "eq.du1"),
    },
    "price": {
        "variables": ("country1.u", "country1.v", "country1.p", "country1.dp",
                      "country2.u", "country2.v", "country2.p", "country2.dp"),
        "equations": ("eq.price1", "eq.price2"),
    },
    "country2": {
        "variables": ("country2.u", "country2.du", "country2.v",
                      "country2.dv", "country2.p"),
        "equations": ("eq.dv2", "eq.du2"),
    },
}


def trade_clusters() -> dict[str, tuple[str, ...]]:
  """Grouping of the trade system's poset elements for boxed DOT output."""
  out: dict[str, tuple[str, ...]] = {}
  for name, sub in TRADE_SUBSYSTEMS.items():
    members = list(sub["variables"]) + list(sub["equations"])
    out[name] = tuple(members)
  return out


# ---------------------------------------------------------------------------
# generic pointwise builder (for models without hand closed forms)


def generic_pointwise_system(model: m.ModelSpec) -> EquationSystem:
  """Pointwise system derived from a model's rate dependency sets.

  One equation per state s: d<s> = rhs_s(deps).  Residuals evaluate the full
  right-hand side with non-dependency slots held at 1, which is safe exactly
  because rate_deps lists every slot the component reads.  Only the rate
  slot gets a closed solved form; anything else falls back to bracketed
  root finding during a chase.
  """
  names = model.state_names
  variables: dict[str, StalkSpace] = {}
  for s in names:
    variables[s] = PRICE_SPACE if s.startswith("p") else SHARE_SPACE
    variables["d" + s] = RATE_SPACE
  eqs = []
  for i, s in enumerate(names):
    deps = tuple(model.rate_deps[s])
    var_list = deps + ("d" + s,)

    def make_residual(i=i, deps=deps):
      def residual(*vals):
        state = np.ones(len(names))
        for name, val in zip(deps, vals[:-1]):
          state[names.index(name)] = val
        return vals[-1] - float(model.rhs(state)[i])
      return residual

    def make_solved(i=i, deps=deps):
      def solved(*vals):
        state = np.ones(len(names))
        for name, val in zip(deps, vals):
          state[names.index(name)] = val
        return float(model.rhs(state)[i])
      return solved

    eqs.append(Equation(
        id=f"eq.d{s}",
        variables=var_list,
        residual=make_residual(),
        solved_forms={"d" + s: make_solved()},
        target="d" + s,
    ))
  return EquationSystem(variables, tuple(eqs))


def state_collapse_map(system: EquationSystem) -> dict[str, str]:
  """Rename map folding each rate-defining equation and its rate variable
  onto the underlying state, for the state-level dependency graph."""
  out: dict[str, str] = {}
  for eq in system.equations:
    if eq.target is None:
      continue
    head, sep, last = eq.target.rpartition(".")
    if last.startswith("d"):
      state = head + sep + last[1:]
      out[eq.id] = state
      out[eq.target] = state
  return out


# ---------------------------------------------------------------------------
# trajectory reading


def _series_residual(fn: Callable[..., float]) -> Callable[..., float]:
  """Lift a samplewise residual to series tuples: worst sample wins."""
  def lifted(*series):
    return max(abs(fn(*vals)) for vals in zip(*series))
  return lifted


def _central_diff(series: tuple, dt: float) -> tuple:
  """Second-order differentiation of a sampled series (three-point one-sided
  stencils at the ends)."""
  n = len(series)
  if n < 3:
    raise ValueError("need at least 3 samples to differentiate")
  out = [0.0] * n
  for i in range(1, n - 1):
    out[i] = (series[i + 1] - series[i - 1]) / (2.0 * dt)
  out[0] = (-3.0 * series[0] + 4.0 * series[1] - series[2]) / (2.0 * dt)
  out[-1] = (3.0 * series[-1] - 4.0 * series[-2] + series[-3]) / (2.0 * dt)
  return tuple(out)


def goodwin_trajectory_system(p: m.GoodwinParams, n_samples: int = 8,
                              dt: float = 0.1) -> EquationSystem:
  """Trajectory reading of the employment cycle: variables are series of
  n_samples values, the two rate equations hold samplewise, and two extra
  differentiation equations tie each rate series to the central difference
  of its state series."""
  A = p.net_expansion_rate
  ag = p.alpha + p.gamma
  series = real_vector(n_samples)
  variables = {"u": series, "v": series, "du": series, "dv": series}

  def ddt_residual(state_series, rate_series):
    diff = _central_diff(state_series, dt)
    return max(abs(a - b) for a, b in zip(rate_series, diff))

  eqs = (
      Equation(
          id="eq.dv",
          variables=("v", "u", "dv"),
          residual=_series_residual(lambda v, u, dv: dv - v * (A - u / p.sigma)),
          solved_forms={"dv": lambda v, u: tuple(
              vv * (A - uu / p.sigma) for vv, uu in zip(v, u))},
          target="dv",
      ),
      Equation(
          id="eq.du",
          variables=("u", "v", "du"),
          residual=_series_residual(lambda u, v, du: du - u * (-ag + p.rho * v)),
          solved_forms={"du": lambda u, v: tuple(
              uu * (-ag + p.rho * vv) for uu, vv in zip(u, v))},
          target="du",
      ),
      Equation(
          id="eq.ddt.u",
          variables=("u", "du"),
          residual=ddt_residual,
          solved_forms={"du": lambda u: _central_diff(u, dt)},
      ),
      Equation(
          id="eq.ddt.v",
          variables=("v", "dv"),
          residual=ddt_residual,
          solved_forms={"dv": lambda v: _central_diff(v, dt)},
      ),
  )
  return EquationSystem(variables, eqs)


def commutativity_demo(p: m.GoodwinParams, mode: str, n_samples: int = 200,
                       dt: float = 0.1,
                       x0: Sequence[float] = (0.5, 0.8)) -> Sheaf:
  """Diamond diagram exposing the differentiate-vs-evaluate tension.

  Bottom element "eq.du" holds (u, v) series pairs; the left route projects
  to the state series and differentiates, the right route evaluates the
  share-rate formula samplewise and includes.  Both land in the rate series
  "du".

    mode "raw":        series stalks are free vectors -- the two routes
                       disagree on generic data and the diagram fails to
                       commute at any reasonable tolerance;
    mode "trajectory": stalks hold the single series actually sampled from
                       an integrated orbit -- the routes agree up to the
                       O(dt^2) differentiation error, so the diagram
                       commutes at a finite-difference tolerance and still
                       fails at 1e-9.
  """
  if mode not in ("raw", "trajectory"):
    raise ValueError(f"mode must be 'raw' or 'trajectory', got {mode!r}")
  ag = p.alpha + p.gamma
  poset = Poset(
      ["eq.du", "u", "du.alg", "du"],
      [("eq.du", "u"), ("eq.du", "du.alg"), ("u", "du"), ("du.alg", "du")],
  )

  def formula(pair):
    u, v = pair
    return tuple(uu * (-ag + p.rho * vv) for uu, vv in zip(u, v))

  restrictions = {
      ("eq.du", "u"): lambda pair: pair[0],
      ("eq.du", "du.alg"): formula,
      ("u", "du"): lambda u: _central_diff(u, dt),
      ("du.alg", "du"): lambda s: s,
  }
  series = real_vector(n_samples)
  if mode == "raw":
    stalks = {
        "eq.du": product_space((series, series)),
        "u": series,
        "du.alg": series,
        "du": series,
    }
  else:
    from .dynamics import integrate
    traj = integrate(m.goodwin(p), x0, t_end=n_samples * dt, dt=dt,
                     use_kernel=False)
    u_series = tuple(float(x) for x in traj.states[:n_samples, 1])
    v_series = tuple(float(x) for x in traj.states[:n_samples, 0])
    du_series = formula((u_series, v_series))
    stalks = {
        "eq.du": finite_set([(u_series, v_series)]),
        "u": finite_set([u_series]),
        "du.alg": finite_set([du_series]),
        "du": finite_set([du_series]),
    }
  return Sheaf(poset, stalks, restrictions)
