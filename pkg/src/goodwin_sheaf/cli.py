"""Command-line front end.

Subcommands
-----------
simulate    integrate a model file, write trajectory.csv + verdict.json
equilibria  fixed points with linearization, write equilibria.json
classify    long-run verdict (fixed-point / limit-cycle / chaotic), JSON
sweep       one-parameter sweep of the verdict + Lyapunov exponent, CSV
graph       DOT renderings of the dependency digraph and the diagram poset
extend      run a local-section extension scenario, report + extend.json

Every run is deterministic for a given seed.  Seed precedence:
SHEAF_GOODWIN_SEED environment variable, then --seed, then the model
file's seed, then 0.  Errors print `error: ...` on stderr and exit 2.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import dynamics, models, sections, systems
from . import equation_sheaf as eqs
from .modelfile import ModelFileError, load_model, load_scenario, with_param

__all__ = ["main"]

_FLOAT_FMT = "%.17g"
_CSV_EOL = "\r\n"


def _fmt(value) -> str:
  if value is None:
    return ""
  if isinstance(value, float):
    return _FLOAT_FMT % value
  return str(value)


def _write_csv(path: Path, header, rows) -> None:
  with open(path, "w", newline="") as fh:
    fh.write(",".join(header) + _CSV_EOL)
    for row in rows:
      fh.write(",".join(_fmt(v) for v in row) + _CSV_EOL)


def _jsonable(obj):
  if isinstance(obj, dict):
    return {k: _jsonable(v) for k, v in obj.items()}
  if isinstance(obj, (list, tuple)):
    return [_jsonable(v) for v in obj]
  if isinstance(obj, np.ndarray):
    return [_jsonable(v) for v in obj.tolist()]
  if isinstance(obj, (np.floating, float)):
    f = float(obj)
    return f if math.isfinite(f) else None
  if isinstance(obj, (np.integer,)):
    return int(obj)
  if isinstance(obj, complex):
    return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
  return obj


def _write_json(path: Path, payload) -> None:
  with open(path, "w") as fh:
    json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
    fh.write("\n")


def _resolve_seed(args, loaded) -> int:
  env = os.environ.get("SHEAF_GOODWIN_SEED")
  if env is not None:
    try:
      return int(env)
    except ValueError:
      raise ModelFileError(
          f"SHEAF_GOODWIN_SEED must be an integer, got {env!r}") from None
  if getattr(args, "seed", None) is not None:
    return args.seed
  if loaded is not None and loaded.seed is not None:
    return loaded.seed
  return 0


def _out_dir(args) -> Path:
  out = Path(getattr(args, "out", ".") or ".")
  out.mkdir(parents=True, exist_ok=True)
  return out


def _need_x0(loaded):
  if loaded.x0 is None:
    raise ModelFileError(
        f"model file {loaded.path} has no [initial] section")
  return loaded.x0


def _run_settings(args, loaded, t_end_default=200.0):
  t_end = args.t_end if args.t_end is not None else loaded.t_end
  if t_end is None:
    t_end = t_end_default
  dt = args.dt if args.dt is not None else loaded.dt
  if dt is None:
    dt = 1e-3
  return float(t_end), float(dt)


def cmd_simulate(args) -> int:
  loaded = load_model(args.model)
  seed = _resolve_seed(args, loaded)
  t_end, dt = _run_settings(args, loaded)
  x0 = _need_x0(loaded)
  out = _out_dir(args)

  traj = dynamics.integrate(loaded.spec, x0, t_end, dt=dt,
                            record_stride=args.record_stride)
  csv_path = out / "trajectory.csv"
  header = ["t"] + list(loaded.spec.state_names)
  t = traj.t
  rows = ([float(t[i])] + [float(v) for v in traj.states[i]]
          for i in range(traj.n_samples))
  _write_csv(csv_path, header, rows)

  verdict = dynamics.classify_dynamics(loaded.spec, x0, horizon=t_end,
                                       dt=dt, seed=seed)
  verdict_path = out / "verdict.json"
  _write_json(verdict_path, {
      "model": loaded.spec.name, "kind": verdict.kind,
      "lyapunov": verdict.lyapunov, "period": verdict.period,
      "evidence": verdict.evidence, "t_end": t_end, "dt": dt, "seed": seed,
  })
  print(f"wrote {csv_path} ({traj.n_samples} samples)"
        + (" [truncated]" if traj.truncated else ""))
  print(f"wrote {verdict_path} (kind={verdict.kind})")
  return 0


def cmd_equilibria(args) -> int:
  loaded = load_model(args.model)
  out = _out_dir(args)
  fps = loaded.spec.equilibria()
  payload = []
  for fp in fps:
    payload.append({
        "state": fp.state, "classification": fp.classification,
        "eigenvalues": fp.eigenvalues, "residual": fp.residual,
        "note": fp.note,
    })
    state = ", ".join(_FLOAT_FMT % v for v in fp.state)
    line = f"({state})  {fp.classification}"
    if fp.note:
      line += f"  [{fp.note}]"
    print(line)
  path = out / "equilibria.json"
  _write_json(path, {"model": loaded.spec.name, "equilibria": payload})
  print(f"wrote {path} ({len(fps)} equilibria)")
  return 0


def cmd_classify(args) -> int:
  loaded = load_model(args.model)
  seed = _resolve_seed(args, loaded)
  x0 = _need_x0(loaded)
  out = _out_dir(args)
  horizon = args.horizon
  if horizon is None:
    horizon = loaded.t_end if loaded.t_end is not None else 5000.0
  dt = args.dt if args.dt is not None else (loaded.dt or 1e-3)

  verdict = dynamics.classify_dynamics(loaded.spec, x0, horizon=horizon,
                                       dt=dt, seed=seed)
  path = out / "classify.json"
  _write_json(path, {
      "model": loaded.spec.name, "kind": verdict.kind,
      "lyapunov": verdict.lyapunov, "period": verdict.period,
      "evidence": verdict.evidence, "horizon": horizon, "dt": dt,
      "seed": seed,
  })
  lam = ("none" if verdict.lyapunov is None or not math.isfinite(verdict.lyapunov)
         else _FLOAT_FMT % verdict.lyapunov)
  per = "none" if verdict.period is None else _FLOAT_FMT % verdict.period
  print(f"kind={verdict.kind} lyapunov={lam} period={per}")
  print(f"wrote {path}")
  return 0


def _sweep_value(payload):
  (model_path, param, value, horizon, dt, seed) = payload
  loaded = load_model(model_path)
  spec = with_param(loaded.spec, param, value)
  x0 = loaded.x0
  verdict = dynamics.classify_dynamics(spec, x0, horizon=horizon, dt=dt,
                                       seed=seed)
  truncated = bool(verdict.evidence.get("truncated")
                   or verdict.evidence.get("rejected"))
  return (value, verdict.lyapunov, verdict.kind, verdict.period, truncated)


def cmd_sweep(args) -> int:
  loaded = load_model(args.model)
  seed = _resolve_seed(args, loaded)
  _need_x0(loaded)
  out = _out_dir(args)
  lo, hi, step = args.from_, args.to, args.step
  if step <= 0:
    raise ModelFileError("--step must be positive")
  n = int(round((hi - lo) / step)) + 1
  if n < 1:
    raise ModelFileError("empty sweep range")
  values = [round(lo + i * step, 10) for i in range(n)]
  with_param(loaded.spec, args.param, values[0])  # validate the path early

  horizon = args.horizon
  dt = args.dt if args.dt is not None else (loaded.dt or 1e-3)
  payloads = [(str(args.model), args.param, v, horizon, dt, seed)
              for v in values]
  if args.jobs > 1:
    with Pool(args.jobs) as pool:
      results = pool.map(_sweep_value, payloads)
  else:
    results = [_sweep_value(p) for p in payloads]

  path = out / "sweep.csv"
  header = [args.param, "lambda", "kind", "period", "truncated"]
  rows = [(v, lam, kind, period, "true" if trunc else "false")
          for (v, lam, kind, period, trunc) in results]
  _write_csv(path, header, rows)
  kinds = sorted({r[2] for r in results})
  print(f"wrote {path} ({n} rows; kinds seen: {', '.join(kinds)})")
  return 0


def _model_systems(loaded, args):
  """The pointwise equation system used for the diagram rendering."""
  spec = loaded.spec
  if spec.name == "goodwin":
    return systems.goodwin_pointwise_system(spec.params)
  if spec.name == "two_country":
    return systems.two_country_pointwise_system(spec.params)
  return systems.generic_pointwise_system(spec)


def cmd_graph(args) -> int:
  loaded = load_model(args.model)
  out = _out_dir(args)
  spec = loaded.spec

  system = _model_systems(loaded, args)
  dep = eqs.dependency_graph(system, collapse=systems.state_collapse_map(system))
  dep_path = out / f"{spec.name}_dependency.dot"
  dep_path.write_text(dep.to_dot(name=f"{spec.name}_dependency"))

  clusters = None
  if spec.name == "two_country":
    clusters = systems.trade_clusters()
    if args.subsystem:
      if args.subsystem not in clusters:
        raise ModelFileError(
            f"unknown subsystem {args.subsystem!r} "
            f"(choose from: {', '.join(sorted(clusters))})")
      keep = clusters[args.subsystem]
      poset = eqs.build_poset(system)
      restricted = [e for e in poset.elements if e in keep]
      rels = [(a, b) for (a, b) in poset.relation_pairs()
              if a in keep and b in keep and a != b]
      from .poset_sheaf import Poset, poset_to_dot
      sub_poset = Poset(restricted, rels)
      sheaf_path = out / f"{spec.name}_sheaf_{args.subsystem}.dot"
      sheaf_path.write_text(poset_to_dot(
          sub_poset, name=f"{spec.name}_{args.subsystem}",
          clusters={args.subsystem: keep}))
      print(f"wrote {dep_path}")
      print(f"wrote {sheaf_path}")
      return 0
  elif args.subsystem:
    raise ModelFileError("--subsystem only applies to the two_country model")

  from .poset_sheaf import poset_to_dot
  poset = eqs.build_poset(system)
  sheaf_path = out / f"{spec.name}_sheaf.dot"
  sheaf_path.write_text(poset_to_dot(poset, name=f"{spec.name}_diagram",
                                     clusters=clusters))
  print(f"wrote {dep_path}")
  print(f"wrote {sheaf_path}")
  return 0


def cmd_extend(args) -> int:
  loaded = load_model(args.model)
  seed = _resolve_seed(args, loaded)
  out = _out_dir(args)
  mode, asserted = load_scenario(args.scenario)

  spec = loaded.spec
  if spec.name == "goodwin":
    system = systems.goodwin_pointwise_system(spec.params)
  elif spec.name == "two_country":
    system = systems.two_country_pointwise_system(spec.params)
  else:
    raise ModelFileError(
        "extend supports the goodwin and two_country models, "
        f"not {spec.name!r}")

  payload = dict(asserted) if mode == "numeric" else sorted(asserted)
  result = sections.extend_local_section(system, payload, mode=mode,
                                         seed=seed)
  report = sections.section_report(result)
  print(report)
  path = out / "extend.json"
  _write_json(path, sections.result_to_dict(result))
  print(f"wrote {path}")
  return 0


def build_parser() -> argparse.ArgumentParser:
  parser = argparse.ArgumentParser(
      prog="goodwin-sheaf",
      description="growth-cycle models and equation-diagram tools")
  sub = parser.add_subparsers(dest="command", required=True)

  def add_common(p, x0=True):
    p.add_argument("--model", required=True, help="TOML model file")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=None)

  p = sub.add_parser("simulate", help="integrate and record a trajectory")
  add_common(p)
  p.add_argument("--t-end", dest="t_end", type=float, default=None)
  p.add_argument("--dt", type=float, default=None)
  p.add_argument("--record-stride", dest="record_stride", type=int, default=10)
  p.set_defaults(func=cmd_simulate)

  p = sub.add_parser("equilibria", help="fixed points and their local type")
  add_common(p)
  p.set_defaults(func=cmd_equilibria)

  p = sub.add_parser("classify", help="long-run behaviour verdict")
  add_common(p)
  p.add_argument("--horizon", type=float, default=None)
  p.add_argument("--dt", type=float, default=None)
  p.set_defaults(func=cmd_classify)

  p = sub.add_parser("sweep", help="verdict across one parameter range")
  add_common(p)
  p.add_argument("--param", default="country2.sigma")
  p.add_argument("--from", dest="from_", type=float, required=True)
  p.add_argument("--to", type=float, required=True)
  p.add_argument("--step", type=float, required=True)
  p.add_argument("--horizon", type=float, default=5000.0)
  p.add_argument("--dt", type=float, default=None)
  p.add_argument("--jobs", type=int, default=1)
  p.set_defaults(func=cmd_sweep)

  p = sub.add_parser("graph", help="DOT files for dependencies and diagram")
  add_common(p)
  p.add_argument("--subsystem", default=None,
                 help="two_country only: country1 | price | country2")
  p.set_defaults(func=cmd_graph)

  p = sub.add_parser("extend", help="extend a local section over a diagram")
  add_common(p)
  p.add_argument("--scenario", required=True,
                 help="TOML scenario: mode + [assert] table")
  p.set_defaults(func=cmd_extend)
  return parser


def main(argv=None) -> int:
  parser = build_parser()
  args = parser.parse_args(argv)
  try:
    return args.func(args)
  except (ModelFileError, models.ParamError, models.DomainError,
          dynamics.StepRejectionError, sections.EquationSystemError,
          ValueError, OSError) as exc:
    print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":  # pragma: no cover
  sys.exit(main())
