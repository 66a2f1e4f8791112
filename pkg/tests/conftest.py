"""Shared helpers: random admissible parameter draws and config paths."""

from pathlib import Path

import numpy as np

import goodwin_sheaf as gs

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
GOLDEN_DIR = Path(__file__).resolve().parent / "goldens"


def random_goodwin_params(rng: np.random.Generator) -> gs.GoodwinParams:
  """A random admissible parameter set with both equilibrium coordinates
  in (0.3, 0.9) and every rate positive."""
  while True:
    sigma = float(rng.uniform(1.5, 4.0))
    u_star = float(rng.uniform(0.3, 0.9))
    ab = (1.0 - u_star) / sigma
    alpha = float(ab * rng.uniform(0.2, 0.8))
    beta = ab - alpha
    v_star = float(rng.uniform(0.3, 0.9))
    rho = float(rng.uniform(0.2, 0.8))
    gamma = rho * v_star - alpha
    if gamma <= 0.005:
      continue
    return gs.GoodwinParams(alpha=alpha, beta=beta, gamma=gamma,
                            rho=rho, sigma=sigma)


def random_country_params(rng: np.random.Generator,
                          theta: float | None = None) -> gs.CountryParams:
  g = random_goodwin_params(rng)
  if theta is None:
    theta = float(rng.uniform(0.2, 0.8))
  return gs.CountryParams(alpha=g.alpha, beta=g.beta, gamma=g.gamma,
                          rho=g.rho, sigma=g.sigma,
                          a_prod=float(rng.uniform(0.5, 1.5)),
                          N=float(rng.uniform(0.5, 1.5)),
                          theta=theta)


def mild_goodwin() -> gs.GoodwinParams:
  """The gentle rate scales used by the hand-checked walkthroughs."""
  return gs.GoodwinParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1, sigma=3.0)


def mild_trade(price_mode: str = "algebraic-equilibrium") -> gs.TradeParams:
  """The parameter set of configs/trade_chase.toml."""
  def country(sigma):
    return gs.CountryParams(alpha=0.02, beta=0.01, gamma=0.04, rho=0.1,
                            sigma=sigma, a_prod=1.0, N=1.0, theta=0.5)
  return gs.TradeParams(country1=country(3.0), country2=country(2.5),
                        p0=(1.0, 1.0), price_mode=price_mode)


def brisk_trade(sigma2: float = 2.0,
                price_mode: str = "algebraic-equilibrium") -> gs.TradeParams:
  """The parameter set of configs/trade.toml (the sweep default)."""
  def country(sigma):
    return gs.CountryParams(alpha=0.12, beta=0.06, gamma=0.33, rho=0.75,
                            sigma=sigma, a_prod=1.0, N=1.0, theta=0.5)
  return gs.TradeParams(country1=country(3.0), country2=country(sigma2),
                        p0=(1.0, 1.0), price_mode=price_mode)
