"""Growth-cycle model family: vector fields, equilibria, linearizations.

State conventions
-----------------
* predator-prey:            (x, y)        prey, predator
* employment cycle:         (v, u)        employment rate, workers' share
* lagged-share variant:     (v, u, z)     z = exponentially lagged v
* two-country trade:        (v1, u1, p1, v2, u2, p2)

All growth-cycle parameters are per unit time; sigma is the capital-output
ratio, alpha/beta productivity and labour-force growth, gamma/rho the wage
response intercept/slope.  The two-country model couples two such economies
through goods prices; prices either relax by excess demand (an explicit ODE)
or are projected onto the short-run market equilibrium after every step.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ParamError",
    "DomainError",
    "LVParams",
    "GoodwinParams",
    "VadaszParams",
    "CountryParams",
    "TradeParams",
    "FixedPoint",
    "ModelSpec",
    "lv_rhs",
    "goodwin_rhs",
    "modified_goodwin_rhs",
    "vadasz_rhs",
    "two_country_rhs",
    "demand",
    "price_excess_demand_rhs",
    "short_run_price_equilibrium",
    "price_adjustment_matrix",
    "lv_first_integral",
    "goodwin_period",
    "goodwin_equilibrium",
    "jacobian_at",
    "classify_fixed_point",
    "linear_phillips",
    "lotka_volterra",
    "goodwin",
    "modified_goodwin",
    "vadasz",
    "two_country",
    "PRICE_MODES",
]

PRICE_MODES = ("algebraic-equilibrium", "excess-demand-ode")


class ParamError(ValueError):
  """Parameter values outside the model's admissible region."""


class DomainError(ValueError):
  """State values outside a function's domain."""


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class LVParams:
  """Predator-prey coefficients; all strictly positive.

  prey:      dx/dt = x (a - b y)
  predator:  dy/dt = y (-c + d x)
  """
  a: float
  b: float
  c: float
  d: float

  def __post_init__(self):
    for f in fields(self):
      v = getattr(self, f.name)
      if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ParamError(f"LV parameter {f.name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class GoodwinParams:
  """Employment-cycle coefficients.

  alpha: labour productivity growth rate
  beta:  labour force growth rate
  gamma: wage-response intercept
  rho:   wage-response slope on employment
  sigma: capital-output ratio (> 0)

  Admissibility requires 1/sigma - (alpha + beta) > 0 so the profit-driven
  expansion outruns the drains on employment; rho > 0 keeps the wage
  response increasing.
  """
  alpha: float
  beta: float
  gamma: float
  rho: float
  sigma: float

  def __post_init__(self):
    for f in ("alpha", "beta", "gamma", "rho", "sigma"):
      v = getattr(self, f)
      if not (isinstance(v, (int, float)) and math.isfinite(v)):
        raise ParamError(f"parameter {f} must be a finite number, got {v!r}")
    if self.sigma <= 0:
      raise ParamError(f"sigma must be > 0, got {self.sigma}")
    if self.rho <= 0:
      raise ParamError(f"rho must be > 0, got {self.rho}")
    if self.net_expansion_rate <= 0:
      raise ParamError(
          "1/sigma - (alpha + beta) must be > 0, got "
          f"{self.net_expansion_rate} (sigma={self.sigma}, alpha={self.alpha}, "
          f"beta={self.beta})")

  @property
  def net_expansion_rate(self) -> float:
    """1/sigma - (alpha + beta): employment growth at zero wage share."""
    return 1.0 / self.sigma - (self.alpha + self.beta)


@dataclass(frozen=True)
class VadaszParams(GoodwinParams):
  """Employment cycle with capacity ceiling K and an exponential lag of the
  employment signal entering the wage response (lag_rate = 1/T)."""
  K: float = 1.0
  lag_rate: float = 1.0

  def __post_init__(self):
    super().__post_init__()
    if not (0 < self.K <= 1):
      raise ParamError(f"K must lie in (0, 1], got {self.K}")
    if self.lag_rate <= 0:
      raise ParamError(f"lag_rate must be > 0, got {self.lag_rate}")


@dataclass(frozen=True)
class CountryParams(GoodwinParams):
  """One open economy: cycle coefficients plus production scale and the
  home-good expenditure share theta of its consumers."""
  a_prod: float = 1.0
  N: float = 1.0
  theta: float = 0.5

  def __post_init__(self):
    super().__post_init__()
    if not (0 < self.theta < 1):
      raise ParamError(f"theta must lie in (0, 1), got {self.theta}")
    if self.a_prod <= 0 or self.N <= 0:
      raise ParamError(
          f"a_prod and N must be > 0, got a_prod={self.a_prod}, N={self.N}")


@dataclass(frozen=True)
class TradeParams:
  """Two coupled economies trading their goods.

  p0 fixes the initial prices and thereby the price scale: the algebraic
  mode holds the price product at p0[0]*p0[1] (the clearing manifold), and
  the excess-demand mode conserves the price sum p0[0]+p0[1] instead.
  price_mode selects between the excess-demand price ODE and algebraic
  projection onto the short-run price equilibrium after each step.
  """
  country1: CountryParams
  country2: CountryParams
  p0: tuple[float, float] = (1.0, 1.0)
  price_mode: str = "algebraic-equilibrium"

  def __post_init__(self):
    if self.price_mode not in PRICE_MODES:
      raise ParamError(
          f"price_mode must be one of {PRICE_MODES}, got {self.price_mode!r}")
    if len(self.p0) != 2 or any(p <= 0 for p in self.p0):
      raise ParamError(f"p0 must be two positive prices, got {self.p0!r}")
    object.__setattr__(self, "p0", (float(self.p0[0]), float(self.p0[1])))

  @property
  def price_product(self) -> float:
    return self.p0[0] * self.p0[1]


CLASSIFICATIONS = (
    "stable-node",
    "unstable-node",
    "saddle",
    "center/neutrally-stable",
    "spiral-in",
    "spiral-out",
)


@dataclass(frozen=True)
class FixedPoint:
  """An equilibrium state with its local linear character."""
  state: tuple[float, ...]
  classification: str
  eigenvalues: tuple[complex, ...]
  residual: float
  note: str = ""

  def __post_init__(self):
    if self.classification not in CLASSIFICATIONS:
      raise ParamError(
          f"classification must be one of {CLASSIFICATIONS}, "
          f"got {self.classification!r}")


# ---------------------------------------------------------------------------
# right-hand sides


def lv_rhs(state: Sequence[float], p: LVParams) -> np.ndarray:
  x, y = state
  return np.array([x * (p.a - p.b * y), y * (-p.c + p.d * x)])


def goodwin_rhs(state: Sequence[float], p: GoodwinParams) -> np.ndarray:
  v, u = state
  dv = v * (p.net_expansion_rate - u / p.sigma)
  du = u * (-(p.alpha + p.gamma) + p.rho * v)
  return np.array([dv, du])


def linear_phillips(scale: float) -> Callable[[float], float]:
  """g(u) = scale * (1 - u): the simplest admissible damping profile for the
  modified wage response (positive and strictly decreasing on (0, 1))."""
  if scale <= 0:
    raise ParamError(f"damping scale must be > 0, got {scale}")
  return lambda u: scale * (1.0 - u)


def _check_damping(g: Callable[[float], float]) -> None:
  """The damping profile must be positive and strictly decreasing on (0, 1);
  checked on a sample grid."""
  us = np.linspace(0.01, 0.99, 99)
  vals = np.array([g(float(u)) for u in us])
  if not np.all(vals > 0):
    raise ParamError("damping profile must be positive on (0, 1)")
  if not np.all(np.diff(vals) < 0):
    raise ParamError("damping profile must be strictly decreasing on (0, 1)")


def modified_goodwin_rhs(state: Sequence[float], p: GoodwinParams,
                         g: Callable[[float], float]) -> np.ndarray:
  """Employment cycle with a share-dependent wage-response term g(u) > 0,
  g' < 0, added inside the share growth rate.  The g' < 0 slope puts a
  negative term on the Jacobian trace at the interior fixed point, so the
  closed orbits of the undamped cycle collapse into an inward spiral."""
  v, u = state
  dv = v * (p.net_expansion_rate - u / p.sigma)
  du = u * (-(p.alpha + p.gamma) + p.rho * v + g(u))
  return np.array([dv, du])


def vadasz_rhs(state: Sequence[float], p: VadaszParams) -> np.ndarray:
  """Capacity-limited employment growth with the wage response driven by an
  exponentially lagged employment signal z."""
  v, u, z = state
  dv = v * (p.net_expansion_rate * (1.0 - v) / p.K - u / p.sigma)
  du = u * (-(p.alpha + p.gamma) + p.rho * z)
  dz = p.lag_rate * (v - z)
  return np.array([dv, du, dz])


# -- trade ------------------------------------------------------------------


def demand(country: CountryParams, other_price: float, own_price: float,
           u: float, v: float) -> tuple[float, float]:
  """Quantities (own good, other good) demanded by one country's consumers.

  Income I = a_prod * u * v * N is spent on the two goods with home share
  theta; the split satisfies the budget identity
  own_price * q_own + other_price * q_other = I exactly.
  """
  if own_price <= 0 or other_price <= 0:
    raise DomainError("prices must be positive")
  income = country.a_prod * u * v * country.N
  s = own_price + other_price
  q_own = (country.theta * own_price + other_price) * income / (own_price * s)
  q_other = (1.0 - country.theta) * own_price * income / (other_price * s)
  return (q_own, q_other)


def _incomes(s4: Sequence[float], tp: TradeParams) -> tuple[float, float]:
  v1, u1, v2, u2 = s4
  i1 = tp.country1.a_prod * u1 * v1 * tp.country1.N
  i2 = tp.country2.a_prod * u2 * v2 * tp.country2.N
  return i1, i2


def price_excess_demand_rhs(prices: Sequence[float], s4: Sequence[float],
                            tp: TradeParams) -> tuple[float, float]:
  """Price adjustment proportional to excess world demand for each good.

  s4 = (v1, u1, v2, u2).  Net demand for good 1 beyond country 1's supply
  reduces to (1-theta2) p2 I2 - (1-theta1) p1 I1 (imports minus exports in
  value terms), and symmetrically for good 2; the two rates sum to zero, so
  the price sum is a conserved quantity of this subsystem.
  """
  p1, p2 = prices
  i1, i2 = _incomes(s4, tp)
  d1 = (1.0 - tp.country2.theta) * p2 * i2 - (1.0 - tp.country1.theta) * p1 * i1
  return (d1, -d1)


def short_run_price_equilibrium(s4: Sequence[float],
                                tp: TradeParams) -> tuple[float, float]:
  """Prices where both goods markets clear, holding the price product at its
  initial value P = p0_1 * p0_2:  p1 = sqrt(P I2 / I1), p2 = sqrt(P I1 / I2)
  (equal-theta form; the ratio balances the two countries' trade values)."""
  i1, i2 = _incomes(s4, tp)
  if i1 <= 0 or i2 <= 0:
    raise DomainError(
        f"short-run price equilibrium undefined at zero income (I1={i1}, I2={i2})")
  P = tp.price_product
  p1 = math.sqrt(P * i2 / i1)
  return (p1, P / p1)


def price_adjustment_matrix(s4: Sequence[float], tp: TradeParams) -> np.ndarray:
  """Jacobian of the excess-demand price rates with respect to (p1, p2).

  Its eigenvalues are 0 (the conserved price-product direction) and
  -[(1-theta1) I1 + (1-theta2) I2] (relaxation onto the equilibrium ray).
  """
  i1, i2 = _incomes(s4, tp)
  a = (1.0 - tp.country1.theta) * i1
  b = (1.0 - tp.country2.theta) * i2
  return np.array([[-a, b], [a, -b]])


def two_country_rhs(state: Sequence[float], tp: TradeParams) -> np.ndarray:
  """Full six-dimensional rate vector (dv1, du1, dp1, dv2, du2, dp2).

  Each country runs the employment cycle with its wage bargain deflated by
  its own good's price; prices follow the excess-demand ODE in
  "excess-demand-ode" mode and are frozen here (projected after each step)
  in "algebraic-equilibrium" mode.
  """
  v1, u1, p1, v2, u2, p2 = state
  if p1 <= 0 or p2 <= 0:
    raise DomainError(f"prices must stay positive, got p1={p1}, p2={p2}")
  c1, c2 = tp.country1, tp.country2
  dv1 = v1 * (c1.net_expansion_rate - u1 / c1.sigma)
  du1 = (u1 / p1) * (-(c1.alpha + c1.gamma) + c1.rho * v1)
  dv2 = v2 * (c2.net_expansion_rate - u2 / c2.sigma)
  du2 = (u2 / p2) * (-(c2.alpha + c2.gamma) + c2.rho * v2)
  if tp.price_mode == "excess-demand-ode":
    dp1, dp2 = price_excess_demand_rhs((p1, p2), (v1, u1, v2, u2), tp)
  else:
    dp1 = dp2 = 0.0
  return np.array([dv1, du1, dp1, dv2, du2, dp2])


def _project_prices(state: np.ndarray, tp: TradeParams) -> np.ndarray:
  p1, p2 = short_run_price_equilibrium(
      (state[0], state[1], state[3], state[4]), tp)
  out = state.copy()
  out[2] = p1
  out[5] = p2
  return out


# ---------------------------------------------------------------------------
# conserved quantity, period, equilibria


def lv_first_integral(state: Sequence[float], p: LVParams) -> float:
  """Conserved quantity -c ln x + d x - a ln y + b y of the predator-prey
  flow; defined for strictly positive states only."""
  x, y = state
  if x <= 0 or y <= 0:
    raise DomainError(f"first integral needs x > 0 and y > 0, got ({x}, {y})")
  return -p.c * math.log(x) + p.d * x - p.a * math.log(y) + p.b * y


def goodwin_first_integral(state: Sequence[float], p: GoodwinParams) -> float:
  """Conserved quantity of the employment cycle (the predator-prey integral
  under the standard change of names)."""
  v, u = state
  if v <= 0 or u <= 0:
    raise DomainError(f"first integral needs v > 0 and u > 0, got ({v}, {u})")
  A = p.net_expansion_rate
  return -(p.alpha + p.gamma) * math.log(v) + p.rho * v \
      - A * math.log(u) + u / p.sigma


def goodwin_period(p: GoodwinParams) -> float:
  """Small-oscillation period 2*pi / sqrt((alpha+gamma) * (1/sigma - alpha - beta))."""
  return 2.0 * math.pi / math.sqrt((p.alpha + p.gamma) * p.net_expansion_rate)


def goodwin_equilibrium(p: GoodwinParams) -> FixedPoint:
  """The interior rest point v* = (alpha+gamma)/rho, u* = sigma * (1/sigma -
  alpha - beta) = 1 - sigma (alpha + beta), a neutral center."""
  v = (p.alpha + p.gamma) / p.rho
  u = p.sigma * p.net_expansion_rate
  state = (v, u)
  J = goodwin_jacobian(state, p)
  eig = tuple(np.linalg.eigvals(J))
  res = float(np.max(np.abs(goodwin_rhs(state, p))))
  return FixedPoint(state=state, classification=classify_fixed_point(J),
                    eigenvalues=eig, residual=res)


def lv_jacobian(state: Sequence[float], p: LVParams) -> np.ndarray:
  x, y = state
  return np.array([[p.a - p.b * y, -p.b * x],
                   [p.d * y, -p.c + p.d * x]])


def goodwin_jacobian(state: Sequence[float], p: GoodwinParams) -> np.ndarray:
  v, u = state
  return np.array([
      [p.net_expansion_rate - u / p.sigma, -v / p.sigma],
      [p.rho * u, -(p.alpha + p.gamma) + p.rho * v],
  ])


# ---------------------------------------------------------------------------
# generic linearization and classification


def _central_fd_jacobian(f: Callable[[np.ndarray], np.ndarray],
                         x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
  x = np.asarray(x, dtype=float)
  n = x.size
  fx = np.asarray(f(x), dtype=float)
  J = np.empty((fx.size, n))
  for j in range(n):
    h = rel_step * max(1.0, abs(x[j]))
    xp = x.copy(); xp[j] += h
    xm = x.copy(); xm[j] -= h
    J[:, j] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * h)
  return J


def jacobian_at(model: "ModelSpec", state: Sequence[float]) -> np.ndarray:
  """Linearization at a state: analytic when the model carries one,
  otherwise central finite differences with relative step 1e-6."""
  x = np.asarray(state, dtype=float)
  if model.jacobian is not None:
    return np.asarray(model.jacobian(x), dtype=float)
  return _central_fd_jacobian(model.rhs, x)


def classify_fixed_point(J: np.ndarray, tol_zero: float = 1e-9) -> str:
  """Name the linear character of an equilibrium from its eigenvalues.

  Real parts within tol_zero of zero count as neutral; a mix of strictly
  positive and strictly negative real parts is a saddle; one-sided spectra
  split into nodes and spirals by the presence of rotation.
  """
  eig = np.linalg.eigvals(np.asarray(J, dtype=float))
  re = eig.real
  im = eig.imag
  has_pos = bool(np.any(re > tol_zero))
  has_neg = bool(np.any(re < -tol_zero))
  rotating = bool(np.any(np.abs(im) > tol_zero))
  if has_pos and has_neg:
    return "saddle"
  if has_neg and np.all(re < -tol_zero):
    return "spiral-in" if rotating else "stable-node"
  if has_pos and np.all(re > tol_zero):
    return "spiral-out" if rotating else "unstable-node"
  return "center/neutrally-stable"


def _fixed_point(model: "ModelSpec", state: Iterable[float],
                 note: str = "") -> FixedPoint:
  st = tuple(float(s) for s in state)
  res = float(np.max(np.abs(model.rhs(np.array(st)))))
  J = jacobian_at(model, st)
  return FixedPoint(state=st, classification=classify_fixed_point(J),
                    eigenvalues=tuple(np.linalg.eigvals(J)), residual=res,
                    note=note)


# ---------------------------------------------------------------------------
# model catalogue


@dataclass(frozen=True)
class ModelSpec:
  """A named vector field with everything the tooling needs attached."""
  name: str
  state_names: tuple[str, ...]
  params: Any
  rhs: Callable[[np.ndarray], np.ndarray] = field(compare=False)
  jacobian: Callable[[np.ndarray], np.ndarray] | None = field(
      default=None, compare=False)
  equilibria: Callable[[], tuple[FixedPoint, ...]] = field(
      default=lambda: (), compare=False)
  # state-level dependency sets: which states each rate reads
  rate_deps: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
  project: Callable[[np.ndarray], np.ndarray] | None = field(
      default=None, compare=False)
  positive_states: tuple[str, ...] = ()
  conservative: bool = False
  first_integral: Callable[[np.ndarray], float] | None = field(
      default=None, compare=False)
  kernel_id: int = 0          # 0 = no compiled kernel
  kernel_params: tuple[float, ...] = ()

  @property
  def dim(self) -> int:
    return len(self.state_names)

  @property
  def params_hash(self) -> str:
    body = repr((self.name, self.params)).encode()
    return hashlib.sha256(body).hexdigest()[:12]


def lotka_volterra(p: LVParams) -> ModelSpec:
  def equilibria() -> tuple[FixedPoint, ...]:
    spec = lotka_volterra(p)
    return (
        _fixed_point(spec, (0.0, 0.0), note="trivial: both populations extinct"),
        _fixed_point(spec, (p.c / p.d, p.a / p.b)),
    )

  return ModelSpec(
      name="lotka_volterra",
      state_names=("x", "y"),
      params=p,
      rhs=lambda s: lv_rhs(s, p),
      jacobian=lambda s: lv_jacobian(s, p),
      equilibria=equilibria,
      rate_deps={"x": ("x", "y"), "y": ("x", "y")},
      positive_states=("x", "y"),
      conservative=True,
      first_integral=lambda s: lv_first_integral(s, p),
      kernel_id=1,
      kernel_params=(p.a, p.b, p.c, p.d),
  )


def goodwin(p: GoodwinParams) -> ModelSpec:
  def equilibria() -> tuple[FixedPoint, ...]:
    spec = goodwin(p)
    trivial = _fixed_point(spec, (0.0, 0.0),
                           note="trivial: empty economy, economically meaningless")
    return (trivial, goodwin_equilibrium(p))

  return ModelSpec(
      name="goodwin",
      state_names=("v", "u"),
      params=p,
      rhs=lambda s: goodwin_rhs(s, p),
      jacobian=lambda s: goodwin_jacobian(s, p),
      equilibria=equilibria,
      rate_deps={"v": ("v", "u"), "u": ("u", "v")},
      positive_states=("v", "u"),
      conservative=True,
      first_integral=lambda s: goodwin_first_integral(s, p),
      kernel_id=2,
      kernel_params=(p.alpha, p.beta, p.gamma, p.rho, p.sigma),
  )


def modified_goodwin(p: GoodwinParams, damping_scale: float = 0.05) -> ModelSpec:
  """Employment cycle with the linear damping profile g(u) = scale*(1-u);
  arbitrary admissible profiles can be passed to modified_goodwin_rhs
  directly, but the catalogued model pins the linear family so compiled
  kernels and model files can reproduce it."""
  g = linear_phillips(damping_scale)
  _check_damping(g)

  def rhs(s):
    return modified_goodwin_rhs(s, p, g)

  def equilibria() -> tuple[FixedPoint, ...]:
    spec = modified_goodwin(p, damping_scale)
    u_star = p.sigma * p.net_expansion_rate
    # share equation now needs rho v = alpha + gamma - g(u*)
    v_star = (p.alpha + p.gamma - g(u_star)) / p.rho
    trivial = _fixed_point(spec, (0.0, 0.0),
                           note="trivial: empty economy, economically meaningless")
    return (trivial, _fixed_point(spec, (v_star, u_star)))

  return ModelSpec(
      name="modified_goodwin",
      state_names=("v", "u"),
      params=(p, damping_scale),
      rhs=rhs,
      jacobian=None,
      equilibria=equilibria,
      rate_deps={"v": ("v", "u"), "u": ("u", "v")},
      positive_states=("v", "u"),
      kernel_id=3,
      kernel_params=(p.alpha, p.beta, p.gamma, p.rho, p.sigma, damping_scale),
  )


def vadasz(p: VadaszParams) -> ModelSpec:
  def equilibria() -> tuple[FixedPoint, ...]:
    spec = vadasz(p)
    out = [
        _fixed_point(spec, (0.0, 0.0, 0.0), note="trivial: empty economy"),
        _fixed_point(spec, (1.0, 0.0, 1.0), note="full employment, zero share"),
    ]
    v_star = (p.alpha + p.gamma) / p.rho
    if v_star < 1.0:
      u_star = p.sigma * p.net_expansion_rate * (1.0 - v_star) / p.K
      out.append(_fixed_point(spec, (v_star, u_star, v_star)))
    return tuple(out)

  return ModelSpec(
      name="vadasz",
      state_names=("v", "u", "z"),
      params=p,
      rhs=lambda s: vadasz_rhs(s, p),
      equilibria=equilibria,
      rate_deps={"v": ("v", "u"), "u": ("u", "z"), "z": ("v", "z")},
      positive_states=("v", "u"),
      kernel_id=4,
      kernel_params=(p.alpha, p.beta, p.gamma, p.rho, p.sigma, p.K, p.lag_rate),
  )


def _trade_equilibrium_state(tp: TradeParams) -> tuple[float, ...]:
  c1, c2 = tp.country1, tp.country2
  v1 = (c1.alpha + c1.gamma) / c1.rho
  u1 = c1.sigma * c1.net_expansion_rate
  v2 = (c2.alpha + c2.gamma) / c2.rho
  u2 = c2.sigma * c2.net_expansion_rate
  p1, p2 = short_run_price_equilibrium((v1, u1, v2, u2), tp)
  return (v1, u1, p1, v2, u2, p2)


def two_country(tp: TradeParams) -> ModelSpec:
  def equilibria() -> tuple[FixedPoint, ...]:
    spec = two_country(tp)
    state = _trade_equilibrium_state(tp)
    res = float(np.max(np.abs(spec.rhs(np.array(state)))))
    note = ""
    if res > 1e-10:
      note = ("approximate: price rates do not vanish exactly "
              "(unequal expenditure shares)")
    J = jacobian_at(spec, state)
    return (FixedPoint(state=state, classification=classify_fixed_point(J),
                       eigenvalues=tuple(np.linalg.eigvals(J)),
                       residual=res, note=note),)

  price_deps = ("v1", "u1", "p1", "v2", "u2", "p2") \
      if tp.price_mode == "excess-demand-ode" else ("v1", "u1", "v2", "u2")
  c1, c2 = tp.country1, tp.country2
  return ModelSpec(
      name="two_country",
      state_names=("v1", "u1", "p1", "v2", "u2", "p2"),
      params=tp,
      rhs=lambda s: two_country_rhs(s, tp),
      equilibria=equilibria,
      rate_deps={
          "v1": ("v1", "u1"),
          "u1": ("u1", "p1", "v1"),
          "p1": price_deps,
          "v2": ("v2", "u2"),
          "u2": ("u2", "p2", "v2"),
          "p2": price_deps,
      },
      project=((lambda s: _project_prices(s, tp))
               if tp.price_mode == "algebraic-equilibrium" else None),
      positive_states=("v1", "u1", "p1", "v2", "u2", "p2"),
      kernel_id=5 if tp.price_mode == "algebraic-equilibrium" else 6,
      kernel_params=(
          c1.alpha, c1.beta, c1.gamma, c1.rho, c1.sigma, c1.a_prod, c1.N, c1.theta,
          c2.alpha, c2.beta, c2.gamma, c2.rho, c2.sigma, c2.a_prod, c2.N, c2.theta,
          tp.price_product,
      ),
  )
