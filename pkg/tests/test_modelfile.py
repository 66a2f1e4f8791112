"""Model and scenario files: loading the shipped configurations, the
validation messages, and single-parameter rebuilds for sweeps."""

import numpy as np
import pytest

import goodwin_sheaf as gs
from goodwin_sheaf.modelfile import (ModelFileError, build_model, load_model,
                                     load_scenario, with_param)
from conftest import CONFIG_DIR


MODEL_FILES = {
    "lv.toml": "lotka_volterra",
    "goodwin.toml": "goodwin",
    "modified_goodwin.toml": "modified_goodwin",
    "vadasz.toml": "vadasz",
    "trade.toml": "two_country",
    "trade_xd.toml": "two_country",
    "trade_chase.toml": "two_country",
}


def test_every_shipped_model_file_loads():
  for fname, expected in MODEL_FILES.items():
    lm = load_model(CONFIG_DIR / fname)
    assert lm.spec.name == expected, fname
    assert lm.x0 is not None and len(lm.x0) == len(lm.spec.state_names)
    assert lm.t_end > 0 and lm.dt > 0
    # the shipped initial states are valid starting points
    rates = lm.spec.rhs(lm.x0)
    assert np.all(np.isfinite(rates))


def test_trade_file_details():
  lm = load_model(CONFIG_DIR / "trade.toml")
  tp = lm.spec.params
  assert tp.price_mode == "algebraic-equilibrium"
  assert tp.country1.sigma == 3.0 and tp.country2.sigma == 2.0
  assert lm.spec.state_names == ("v1", "u1", "p1", "v2", "u2", "p2")
  assert lm.x0.tolist() == [0.5, 0.35, 1.0, 0.6, 0.64, 1.0]
  assert (lm.t_end, lm.dt, lm.seed) == (5000.0, 1e-3, 0)
  xd = load_model(CONFIG_DIR / "trade_xd.toml")
  assert xd.spec.params.price_mode == "excess-demand-ode"


def test_optional_parameters_get_their_defaults(tmp_path):
  f = tmp_path / "m.toml"
  f.write_text('[model]\nname = "modified_goodwin"\n'
               '[params]\nalpha = 0.02\nbeta = 0.01\ngamma = 0.04\n'
               'rho = 0.1\nsigma = 3.0\n')
  lm = load_model(f)
  base, scale = lm.spec.params
  assert scale == 0.05
  assert base.sigma == 3.0
  assert lm.x0 is None and lm.seed is None


def test_vadasz_lag_defaults(tmp_path):
  f = tmp_path / "m.toml"
  f.write_text('[model]\nname = "vadasz"\n'
               '[params]\nalpha = 0.02\nbeta = 0.01\ngamma = 0.04\n'
               'rho = 0.1\nsigma = 3.0\n')
  lm = load_model(f)
  assert lm.spec.params.K == 1.0
  assert lm.spec.params.lag_rate == 1.0


# ---------------------------------------------------------------------------
# validation messages


def write_goodwin(tmp_path, body):
  f = tmp_path / "m.toml"
  f.write_text('[model]\nname = "goodwin"\n' + body)
  return f


def test_missing_required_key(tmp_path):
  f = write_goodwin(tmp_path, '[params]\nalpha = 0.02\nbeta = 0.01\n'
                    'gamma = 0.04\nsigma = 3.0\n')  # rho missing
  with pytest.raises(ModelFileError,
                     match=r"missing required key 'rho' in \[params\]"):
    load_model(f)


def test_unknown_key_is_rejected_with_the_allowed_list(tmp_path):
  f = write_goodwin(tmp_path, '[params]\nalpha = 0.02\nbeta = 0.01\n'
                    'gamma = 0.04\nrho = 0.1\nsigma = 3.0\nzeta = 1.0\n')
  with pytest.raises(ModelFileError,
                     match=r"unknown key 'zeta' in \[params\] \(allowed:"):
    load_model(f)


def test_unknown_top_level_section(tmp_path):
  f = write_goodwin(tmp_path, '[params]\nalpha = 0.02\nbeta = 0.01\n'
                    'gamma = 0.04\nrho = 0.1\nsigma = 3.0\n[extras]\nx = 1\n')
  with pytest.raises(ModelFileError, match="unknown key 'extras'"):
    load_model(f)


def test_missing_params_section(tmp_path):
  f = tmp_path / "m.toml"
  f.write_text('[model]\nname = "goodwin"\n')
  with pytest.raises(ModelFileError, match=r"missing required section \[params\]"):
    load_model(f)


def test_unknown_model_name(tmp_path):
  f = tmp_path / "m.toml"
  f.write_text('[model]\nname = "hyper_cycle"\n[params]\n')
  with pytest.raises(ModelFileError, match="unknown model name 'hyper_cycle'"):
    load_model(f)


def test_initial_section_must_cover_every_state(tmp_path):
  f = write_goodwin(tmp_path, '[params]\nalpha = 0.02\nbeta = 0.01\n'
                    'gamma = 0.04\nrho = 0.1\nsigma = 3.0\n'
                    '[initial]\nv = 0.5\n')
  with pytest.raises(ModelFileError, match=r"missing required key 'u' in \[initial\]"):
    load_model(f)


def test_initial_section_rejects_unknown_states(tmp_path):
  f = write_goodwin(tmp_path, '[params]\nalpha = 0.02\nbeta = 0.01\n'
                    'gamma = 0.04\nrho = 0.1\nsigma = 3.0\n'
                    '[initial]\nv = 0.5\nu = 0.8\nw = 0.1\n')
  with pytest.raises(ModelFileError, match="unknown key 'w'"):
    load_model(f)


def test_values_must_be_numbers(tmp_path):
  f = write_goodwin(tmp_path, '[params]\nalpha = "small"\nbeta = 0.01\n'
                    'gamma = 0.04\nrho = 0.1\nsigma = 3.0\n')
  with pytest.raises(ModelFileError, match="must be a number"):
    load_model(f)
  f2 = write_goodwin(tmp_path, '[params]\nalpha = true\nbeta = 0.01\n'
                     'gamma = 0.04\nrho = 0.1\nsigma = 3.0\n')
  with pytest.raises(ModelFileError, match="must be a number"):
    load_model(f2)


def test_missing_file_and_bad_toml(tmp_path):
  with pytest.raises(ModelFileError, match="model file not found"):
    load_model(tmp_path / "nope.toml")
  bad = tmp_path / "bad.toml"
  bad.write_text("[model\nname =")
  with pytest.raises(ModelFileError, match="cannot parse"):
    load_model(bad)


def test_build_model_reports_bad_parameters():
  with pytest.raises(ModelFileError, match="bad parameters for model 'goodwin'"):
    build_model("goodwin", {"alpha": 0.02})


# ---------------------------------------------------------------------------
# scenarios


def test_shipped_scenarios_load():
  for name, mode in (("chase_stage1", "numeric"), ("chase_stage2", "numeric"),
                     ("chase_stage2_structural", "structural"),
                     ("chase_conflict", "numeric")):
    got_mode, asserted = load_scenario(CONFIG_DIR / f"{name}.toml")
    assert got_mode == mode
    assert asserted and all(isinstance(v, float) for v in asserted.values())


def test_scenario_mode_defaults_to_structural(tmp_path):
  f = tmp_path / "s.toml"
  f.write_text('[assert]\n"country1.u" = 0.9\n')
  mode, asserted = load_scenario(f)
  assert mode == "structural"
  assert asserted == {"country1.u": 0.9}


def test_scenario_rejects_bad_mode_and_stray_keys(tmp_path):
  f = tmp_path / "s.toml"
  f.write_text('mode = "hopeful"\n[assert]\nx = 1.0\n')
  with pytest.raises(ModelFileError, match="mode must be structural or numeric"):
    load_scenario(f)
  g = tmp_path / "t.toml"
  g.write_text('mode = "numeric"\n[guess]\nx = 1.0\n')
  with pytest.raises(ModelFileError, match="unknown key 'guess'"):
    load_scenario(g)


# ---------------------------------------------------------------------------
# single-parameter rebuilds


def test_with_param_on_flat_models():
  lv = load_model(CONFIG_DIR / "lv.toml").spec
  swept = with_param(lv, "a", 2.5)
  assert swept.params.a == 2.5
  assert swept.params.b == lv.params.b
  gw = load_model(CONFIG_DIR / "goodwin.toml").spec
  assert with_param(gw, "sigma", 4.0).params.sigma == 4.0
  vd = load_model(CONFIG_DIR / "vadasz.toml").spec
  assert with_param(vd, "K", 0.9).params.K == 0.9


def test_with_param_on_the_damped_model():
  spec = load_model(CONFIG_DIR / "modified_goodwin.toml").spec
  base, scale = spec.params
  swept = with_param(spec, "damping_scale", 0.2)
  assert swept.params[1] == 0.2 and swept.params[0] == base
  swept2 = with_param(spec, "alpha", 0.03)
  assert swept2.params[0].alpha == 0.03 and swept2.params[1] == scale


def test_with_param_on_the_trade_model():
  spec = load_model(CONFIG_DIR / "trade.toml").spec
  swept = with_param(spec, "country2.sigma", 4.55)
  assert swept.params.country2.sigma == 4.55
  assert swept.params.country1 == spec.params.country1
  assert swept.params.p0 == spec.params.p0
  with pytest.raises(ModelFileError, match="cannot be swept"):
    with_param(spec, "p0", 2.0)
  with pytest.raises(ModelFileError, match="need a country prefix"):
    with_param(spec, "sigma", 4.0)
  with pytest.raises(ModelFileError, match="unknown parameter path"):
    with_param(spec, "country3.sigma", 4.0)
  with pytest.raises(ModelFileError, match="unknown parameter 'zeta'"):
    with_param(spec, "country1.zeta", 4.0)


def test_with_param_rejects_unknown_names():
  gw = load_model(CONFIG_DIR / "goodwin.toml").spec
  with pytest.raises(ModelFileError, match="unknown parameter 'zeta'"):
    with_param(gw, "zeta", 1.0)
