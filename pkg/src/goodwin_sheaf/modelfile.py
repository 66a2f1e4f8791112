"""TOML model and scenario files.

A model file names one catalogued model and its parameters:

    [model]
    name = "goodwin"        # lotka_volterra | goodwin | modified_goodwin
                            # | vadasz | two_country
    t_end = 200.0           # optional run defaults
    dt = 1e-3
    seed = 0

    [params]
    alpha = 0.02
    ...

    [initial]
    v = 0.45
    u = 0.85

The two-country model nests per-country tables [params.country1] /
[params.country2] and adds a [trade] table (p0, price_mode).  A scenario
file for section extension holds `mode` plus an [assert] table of
variable = value pairs (quote dotted names).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

try:
  import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
  import tomli as tomllib

from . import models as m

__all__ = ["ModelFileError", "LoadedModel", "load_model", "load_scenario",
           "build_model", "with_param"]


class ModelFileError(ValueError):
  pass


@dataclass(frozen=True)
class LoadedModel:
  spec: m.ModelSpec
  x0: np.ndarray | None
  t_end: float | None
  dt: float | None
  seed: int | None
  path: str


_COUNTRY_KEYS = ("alpha", "beta", "gamma", "rho", "sigma", "a_prod", "N", "theta")
_PARAM_KEYS = {
    "lotka_volterra": ("a", "b", "c", "d"),
    "goodwin": ("alpha", "beta", "gamma", "rho", "sigma"),
    "modified_goodwin": ("alpha", "beta", "gamma", "rho", "sigma",
                         "damping_scale"),
    "vadasz": ("alpha", "beta", "gamma", "rho", "sigma", "K", "lag_rate"),
}
_OPTIONAL_PARAMS = {
    "modified_goodwin": {"damping_scale": 0.05},
    "vadasz": {"K": 1.0, "lag_rate": 1.0},
}


def _require(table: Mapping[str, Any], key: str, where: str):
  if key not in table:
    raise ModelFileError(f"missing required key {key!r} in [{where}]")
  return table[key]


def _check_unknown(table: Mapping[str, Any], allowed, where: str):
  unknown = sorted(set(table) - set(allowed))
  if unknown:
    raise ModelFileError(
        f"unknown key {unknown[0]!r} in [{where}] "
        f"(allowed: {', '.join(sorted(allowed))})")


def _number(value: Any, key: str, where: str) -> float:
  if isinstance(value, bool) or not isinstance(value, (int, float)):
    raise ModelFileError(f"key {key!r} in [{where}] must be a number, "
                         f"got {value!r}")
  return float(value)


def build_model(name: str, params: Mapping[str, Any],
                trade: Mapping[str, Any] | None = None) -> m.ModelSpec:
  """Build a catalogued model from plain dictionaries (the parsed file)."""
  try:
    if name == "lotka_volterra":
      return m.lotka_volterra(m.LVParams(**params))
    if name == "goodwin":
      return m.goodwin(m.GoodwinParams(**params))
    if name == "modified_goodwin":
      rest = dict(params)
      scale = rest.pop("damping_scale", 0.05)
      return m.modified_goodwin(m.GoodwinParams(**rest), scale)
    if name == "vadasz":
      return m.vadasz(m.VadaszParams(**params))
    if name == "two_country":
      trade = trade or {}
      c1 = m.CountryParams(**params["country1"])
      c2 = m.CountryParams(**params["country2"])
      p0 = trade.get("p0", [1.0, 1.0])
      mode = trade.get("price_mode", "algebraic-equilibrium")
      return m.two_country(m.TradeParams(
          country1=c1, country2=c2, p0=tuple(p0), price_mode=mode))
  except TypeError as exc:
    raise ModelFileError(f"bad parameters for model {name!r}: {exc}") from exc
  raise ModelFileError(
      f"unknown model name {name!r} (known: lotka_volterra, goodwin, "
      "modified_goodwin, vadasz, two_country)")


def load_model(path: str | Path) -> LoadedModel:
  path = Path(path)
  try:
    with open(path, "rb") as fh:
      data = tomllib.load(fh)
  except FileNotFoundError:
    raise ModelFileError(f"model file not found: {path}") from None
  except tomllib.TOMLDecodeError as exc:
    raise ModelFileError(f"cannot parse {path}: {exc}") from None

  _check_unknown(data, ("model", "params", "initial", "trade"), "file")
  model_tab = data.get("model", {})
  _check_unknown(model_tab, ("name", "t_end", "dt", "seed"), "model")
  name = _require(model_tab, "name", "model")

  params_tab = data.get("params")
  if params_tab is None:
    raise ModelFileError("missing required section [params]")

  if name == "two_country":
    for c in ("country1", "country2"):
      sub = _require(params_tab, c, "params")
      _check_unknown(sub, _COUNTRY_KEYS, f"params.{c}")
      for key in ("alpha", "beta", "gamma", "rho", "sigma"):
        _require(sub, key, f"params.{c}")
      for key in sub:
        sub[key] = _number(sub[key], key, f"params.{c}")
    _check_unknown(params_tab, ("country1", "country2"), "params")
    trade_tab = data.get("trade", {})
    _check_unknown(trade_tab, ("p0", "price_mode"), "trade")
    spec = build_model(name, params_tab, trade_tab)
  elif name in _PARAM_KEYS:
    allowed = _PARAM_KEYS[name]
    _check_unknown(params_tab, allowed, "params")
    optional = _OPTIONAL_PARAMS.get(name, {})
    parsed = {}
    for key in allowed:
      if key in params_tab:
        parsed[key] = _number(params_tab[key], key, "params")
      elif key in optional:
        parsed[key] = optional[key]
      else:
        _require(params_tab, key, "params")
    spec = build_model(name, parsed)
  else:
    spec = build_model(name, params_tab)  # raises the unknown-name error

  x0 = None
  if "initial" in data:
    init = data["initial"]
    _check_unknown(init, spec.state_names, "initial")
    vals = []
    for s in spec.state_names:
      vals.append(_number(_require(init, s, "initial"), s, "initial"))
    x0 = np.array(vals, dtype=float)

  def opt_num(key):
    return (_number(model_tab[key], key, "model")
            if key in model_tab else None)

  seed = None
  if "seed" in model_tab:
    seed = int(_number(model_tab["seed"], "seed", "model"))
  return LoadedModel(spec=spec, x0=x0, t_end=opt_num("t_end"),
                     dt=opt_num("dt"), seed=seed, path=str(path))


def load_scenario(path: str | Path) -> tuple[str, dict[str, float]]:
  """Parse an extension scenario: mode plus the asserted values."""
  path = Path(path)
  try:
    with open(path, "rb") as fh:
      data = tomllib.load(fh)
  except FileNotFoundError:
    raise ModelFileError(f"scenario file not found: {path}") from None
  except tomllib.TOMLDecodeError as exc:
    raise ModelFileError(f"cannot parse {path}: {exc}") from None
  _check_unknown(data, ("mode", "assert"), "file")
  mode = data.get("mode", "structural")
  if mode not in ("structural", "numeric"):
    raise ModelFileError(
        f"scenario mode must be structural or numeric, got {mode!r}")
  table = data.get("assert", {})
  asserted = {}
  for key, value in table.items():
    asserted[str(key)] = _number(value, key, "assert")
  return mode, asserted


def with_param(spec: m.ModelSpec, path: str, value: float) -> m.ModelSpec:
  """Rebuild a catalogued model with one parameter replaced; `path` is the
  field name, or country1.<field> / country2.<field> for the trade model."""
  params = spec.params
  if spec.name == "two_country":
    tp: m.TradeParams = params
    if "." in path:
      country, field = path.split(".", 1)
      if country not in ("country1", "country2"):
        raise ModelFileError(f"unknown parameter path {path!r}")
      target = getattr(tp, country)
      if field not in {f.name for f in dataclasses.fields(target)}:
        raise ModelFileError(f"unknown parameter {field!r} in {country}")
      new_c = dataclasses.replace(target, **{field: value})
      tp = dataclasses.replace(tp, **{country: new_c})
    elif path == "p0":
      raise ModelFileError("p0 cannot be swept; edit the model file")
    else:
      raise ModelFileError(
          f"two_country parameters need a country prefix, got {path!r}")
    return m.two_country(tp)
  if spec.name == "modified_goodwin":
    base, scale = params
    if path == "damping_scale":
      return m.modified_goodwin(base, value)
    if path not in {f.name for f in dataclasses.fields(base)}:
      raise ModelFileError(f"unknown parameter {path!r}")
    return m.modified_goodwin(dataclasses.replace(base, **{path: value}), scale)
  if path not in {f.name for f in dataclasses.fields(params)}:
    raise ModelFileError(f"unknown parameter {path!r} for model {spec.name!r}")
  new_params = dataclasses.replace(params, **{path: value})
  builder = {"lotka_volterra": m.lotka_volterra, "goodwin": m.goodwin,
             "vadasz": m.vadasz}[spec.name]
  return builder(new_params)
