"""Local sections of equation systems and their extension by diagram chase.

A local section is a partial assignment of variable values consistent with
the equations it touches.  Extending one means propagating values through
equations until nothing more follows.  Two modes:

* structural: symbolic only.  An equation with a single unknown determines
  it; when that stalls, a square block of remaining equations and unknowns
  that admits a perfect matching is generically solvable, so its variables
  count as determined (maximum-matching / alternating-path argument).
* numeric: actual values.  Only single-unknown steps are taken, via a
  closed solved form when the equation carries one, otherwise by bracketed
  bisection on the variable's domain.  Variables the structural chase
  reaches but the numeric one cannot pin down are reported as ambiguities,
  with distinct witness completions exhibited by fixing block variables at
  seeded random values and re-propagating.

Degrees of freedom of a sub-diagram is the variable count minus the
equation count (each independent scalar equation removes one dimension).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .equation_sheaf import Equation, EquationSystem, EquationSystemError
from .models import DomainError
from .poset_sheaf import Poset

__all__ = [
    "SubDiagram",
    "Determination",
    "Ambiguity",
    "ExtensionResult",
    "degrees_of_freedom",
    "extend_local_section",
    "section_report",
]

VERIFY_TOL = 1e-9
DISTINCT_TOL = 1e-6


@dataclass(frozen=True)
class SubDiagram:
  """A named induced piece of an equation system: a set of variables plus
  the equations whose variables all lie inside it."""
  name: str
  variables: tuple[str, ...]
  equations: tuple[str, ...]
  system: EquationSystem = field(compare=False)

  def __post_init__(self):
    vset = set(self.variables)
    if len(vset) != len(self.variables):
      raise EquationSystemError(f"sub-diagram {self.name!r} repeats a variable")
    for v in self.variables:
      if v not in self.system.variables:
        raise EquationSystemError(
            f"sub-diagram {self.name!r} lists unknown variable {v!r}")
    for eid in self.equations:
      eq = self.system.equation(eid)
      missing = [v for v in eq.variables if v not in vset]
      if missing:
        raise EquationSystemError(
            f"sub-diagram {self.name!r} includes equation {eid!r} but not "
            f"its variables {missing}")

  def induced_poset(self) -> Poset:
    relations = [
        (eid, v)
        for eid in self.equations
        for v in self.system.equation(eid).variables
    ]
    return Poset(list(self.variables) + list(self.equations), relations)


def degrees_of_freedom(sub: SubDiagram) -> int:
  """Variable count minus equation count.  A negative value (more equations
  than variables) is returned as-is with a warning: it signals an
  overdetermined sub-diagram, not an error."""
  dof = len(sub.variables) - len(sub.equations)
  if dof < 0:
    warnings.warn(
        f"sub-diagram {sub.name!r} is overdetermined "
        f"({len(sub.equations)} equations on {len(sub.variables)} variables)",
        stacklevel=2)
  return dof


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class Determination:
  variable: str
  via_equation: str
  method: str  # "one-unknown" | "generic-rank" | "solved-form" | "bisection"
  value: float | None = None


@dataclass(frozen=True)
class Ambiguity:
  """A set of variables the equations pin down structurally but not to a
  unique value.  kind is "rank-deficient" (a generically solvable block
  whose actual equations are dependent), "multiple-roots", or "no-root".
  Witnesses are full consistent completions demonstrating the slack."""
  kind: str
  variables: tuple[str, ...]
  equations: tuple[str, ...]
  witnesses: tuple[Mapping[str, float], ...] = ()
  detail: str = ""


@dataclass(frozen=True)
class ExtensionResult:
  mode: str
  asserted: tuple[str, ...]
  determined: tuple[Determination, ...]
  still_free: tuple[str, ...]
  dof_consumed: int
  conflicts: tuple[tuple[str, float], ...] = ()
  ambiguities: tuple[Ambiguity, ...] = ()
  redundant_equations: tuple[str, ...] = ()

  def __post_init__(self):
    det = {d.variable for d in self.determined}
    if det & set(self.asserted):
      raise EquationSystemError("a determined variable was also asserted")
    if det & set(self.still_free):
      raise EquationSystemError("a determined variable is also still free")

  def determined_variables(self) -> tuple[str, ...]:
    return tuple(d.variable for d in self.determined)

  def values(self) -> dict[str, float]:
    return {d.variable: d.value for d in self.determined if d.value is not None}


# ---------------------------------------------------------------------------
# structural chase


def _max_matching(eq_ids: Sequence[str],
                  adj: Mapping[str, Sequence[str]]) -> tuple[dict, dict]:
  """Deterministic Kuhn matching of equations to their unknowns."""
  match_var: dict[str, str] = {}
  match_eq: dict[str, str] = {}

  def augment(e: str, visited: set[str]) -> bool:
    for v in adj[e]:
      if v in visited:
        continue
      visited.add(v)
      if v not in match_var or augment(match_var[v], visited):
        match_var[v] = e
        match_eq[e] = v
        return True
    return False

  for e in eq_ids:
    augment(e, set())
  return match_var, match_eq


def _generic_rank_block(equations: Sequence[Equation],
                        known: set[str]) -> dict[str, str]:
  """Variables generically determined by the remaining equations.

  A variable stays free exactly when an alternating path from some
  unmatched variable reaches it (equivalently, adding the constraint
  "v = const" would enlarge the maximum matching).  Everything else matched
  is determined at generic rank; the map sends each such variable to its
  matched equation.
  """
  eq_ids = sorted(eq.id for eq in equations)
  by_id = {eq.id: eq for eq in equations}
  adj = {eid: sorted(v for v in by_id[eid].variables if v not in known)
         for eid in eq_ids}
  all_unknowns = sorted({v for vs in adj.values() for v in vs})
  match_var, match_eq = _max_matching(eq_ids, adj)
  reach = set(v for v in all_unknowns if v not in match_var)
  queue = sorted(reach)
  seen_eq: set[str] = set()
  while queue:
    w = queue.pop(0)
    for e in eq_ids:
      if w in adj[e] and match_var.get(w) != e and e not in seen_eq:
        seen_eq.add(e)
        mv = match_eq.get(e)
        if mv is not None and mv not in reach:
          reach.add(mv)
          queue.append(mv)
  return {v: match_var[v] for v in sorted(match_var) if v not in reach}


def _structural_chase(system: EquationSystem, start: set[str]):
  known = set(start)
  consumed: dict[str, str] = {}
  determined: list[Determination] = []
  eqs = sorted(system.equations, key=lambda e: e.id)
  while True:
    progress = False
    for eq in eqs:
      if eq.id in consumed:
        continue
      unknowns = [v for v in eq.variables if v not in known]
      if len(unknowns) == 1:
        var = unknowns[0]
        known.add(var)
        consumed[eq.id] = var
        determined.append(Determination(var, eq.id, "one-unknown"))
        progress = True
    if progress:
      continue
    remaining = [eq for eq in eqs if eq.id not in consumed
                 and any(v not in known for v in eq.variables)]
    if not remaining:
      break
    block = _generic_rank_block(remaining, known)
    if not block:
      break
    for var, eid in sorted(block.items()):
      known.add(var)
      consumed[eid] = var
      determined.append(Determination(var, eid, "generic-rank"))
  redundant = tuple(eq.id for eq in eqs if eq.id not in consumed
                    and all(v in known for v in eq.variables))
  return determined, known, consumed, redundant


# ---------------------------------------------------------------------------
# numeric chase


def _bracket_for(system: EquationSystem, var: str) -> tuple[float, float]:
  stalk = system.stalk(var)
  if stalk.kind == "interval":
    return (stalk.lo, stalk.hi)
  return (-1e3, 1e3)


def _bisect_roots(fn, lo: float, hi: float, n_scan: int = 257,
                  xtol: float = 1e-12) -> list[float]:
  """All sign-change roots of fn on (lo, hi) from a uniform scan, each
  refined by bisection."""
  eps = (hi - lo) * 1e-9
  xs = np.linspace(lo + eps, hi - eps, n_scan)
  vals = []
  for x in xs:
    try:
      vals.append(float(fn(float(x))))
    except (ZeroDivisionError, ValueError, OverflowError):
      vals.append(float("nan"))
  roots: list[float] = []
  for i in range(n_scan - 1):
    a, b = float(xs[i]), float(xs[i + 1])
    fa, fb = vals[i], vals[i + 1]
    if not (np.isfinite(fa) and np.isfinite(fb)):
      continue
    if fa == 0.0:
      roots.append(a)
      continue
    if fa * fb < 0.0:
      while b - a > xtol * max(1.0, abs(a), abs(b)):
        mid = 0.5 * (a + b)
        fm = float(fn(mid))
        if fm == 0.0:
          a = b = mid
          break
        if fa * fm < 0.0:
          b = mid
        else:
          a, fa = mid, fm
      roots.append(0.5 * (a + b))
  if vals and vals[-1] == 0.0:
    roots.append(float(xs[-1]))
  # merge near-duplicates
  out: list[float] = []
  for r in roots:
    if not out or abs(r - out[-1]) > 1e-8 * max(1.0, abs(r)):
      out.append(r)
  return out


def _solve_single(system: EquationSystem, eq: Equation, var: str,
                  values: Mapping[str, float], tol: float):
  """Solve eq for its one unknown.  Returns (value, method) on success or
  (None, kind, roots) when the root set is empty or not a singleton."""
  others = eq.others(var)
  if var in eq.solved_forms:
    try:
      value = float(eq.solved_forms[var](*(values[o] for o in others)))
      if np.isfinite(value):
        full = {**values, var: value}
        if abs(eq.residual_at(full)) <= max(tol, 1e-7 * max(1.0, abs(value))):
          return value, "solved-form", None
    except (ZeroDivisionError, ValueError, OverflowError):
      pass
  lo, hi = _bracket_for(system, var)

  def fn(x: float) -> float:
    probe = {**values, var: x}
    return eq.residual_at(probe)

  roots = _bisect_roots(fn, lo, hi)
  if len(roots) == 1:
    return roots[0], "bisection", None
  kind = "no-root" if not roots else "multiple-roots"
  return None, kind, tuple(roots)


def _propagate(system: EquationSystem, values: dict[str, float], tol: float,
               consumed: dict[str, str], checked: set[str],
               determined: list[Determination],
               conflicts: list[tuple[str, float]],
               stalled_single: dict[str, tuple]):
  """One-unknown numeric propagation to a fixed point (deterministic:
  equations visited in id order)."""
  eqs = sorted(system.equations, key=lambda e: e.id)
  while True:
    progress = False
    for eq in eqs:
      if eq.id in consumed:
        continue
      unknowns = [v for v in eq.variables if v not in values]
      if not unknowns:
        if eq.id not in checked:
          checked.add(eq.id)
          r = abs(eq.residual_at(values))
          if r > tol:
            conflicts.append((eq.id, float(r)))
        continue
      if len(unknowns) > 1:
        continue
      var = unknowns[0]
      value, method, roots = _solve_single(system, eq, var, values, tol)
      if value is None:
        stalled_single[eq.id] = (var, method, roots)
        continue
      if not system.stalk(var).contains(value, tol):
        conflicts.append((eq.id, float(abs(eq.residual_at(
            {**values, var: value})))))
        checked.add(eq.id)
        consumed[eq.id] = var
        continue
      values[var] = value
      consumed[eq.id] = var
      stalled_single.pop(eq.id, None)
      determined.append(Determination(var, eq.id, method, value))
      progress = True
    if not progress:
      return


def _verify_all(system: EquationSystem, values: Mapping[str, float],
                tol: float) -> bool:
  for eq in system.equations:
    if any(v not in values for v in eq.variables):
      return False
    if abs(eq.residual_at(values)) > tol:
      return False
  for var, val in values.items():
    if not system.stalk(var).contains(val, tol):
      return False
  return True


def _witness_completions(system: EquationSystem, base: Mapping[str, float],
                         block_vars: Sequence[str], tol: float,
                         rng: np.random.Generator,
                         want: int = 2, attempts: int = 60):
  """Distinct full solutions extending `base`, built by fixing block
  variables at sampled values and re-propagating.

  Returns (witness value dicts, equation ids consumed as solvers in some
  witness).  Block equations outside the latter never pinned a variable in
  any exhibited completion."""
  found: list[dict[str, float]] = []
  solver_eqs: set[str] = set()
  for _ in range(attempts):
    values = dict(base)
    consumed: dict[str, str] = {}
    checked: set[str] = set()
    det: list[Determination] = []
    confl: list[tuple[str, float]] = []
    stalled: dict[str, tuple] = {}
    ok = True
    while True:
      _propagate(system, values, tol, consumed, checked, det, confl, stalled)
      if confl:
        ok = False
        break
      remaining = [v for v in block_vars if v not in values]
      if not remaining:
        break
      pick = remaining[int(rng.integers(len(remaining)))]
      values[pick] = system.stalk(pick).sample(rng)
    if not ok or not _verify_all(system, values, VERIFY_TOL):
      continue
    if any(
        all(abs(values[v] - w[v]) <= DISTINCT_TOL for v in block_vars)
        for w in found):
      continue  # not distinct from an earlier witness
    found.append(dict(values))
    solver_eqs.update(consumed)
    if len(found) >= want:
      break
  return tuple(found), solver_eqs


# ---------------------------------------------------------------------------
# public entry point


def extend_local_section(system: EquationSystem,
                         asserted: Mapping[str, float] | Iterable[str],
                         mode: str = "structural",
                         tol: float = VERIFY_TOL,
                         seed: int = 0) -> ExtensionResult:
  """Extend a partial assignment through the equations as far as it goes.

  `asserted` is a mapping variable -> value; structural mode also accepts a
  bare iterable of names.  Asserted values must lie in their variables'
  domains (DomainError otherwise).  See the module docstring for the two
  modes' semantics.  Conflicts are equations all of whose variables ended
  up known while the residual stays above tol.
  """
  if mode not in ("structural", "numeric"):
    raise EquationSystemError(f"mode must be structural or numeric, got {mode!r}")
  if isinstance(asserted, Mapping):
    asserted_values = {str(k): v for k, v in asserted.items()}
  else:
    if mode == "numeric":
      raise EquationSystemError("numeric mode needs variable values, not names")
    asserted_values = {str(k): None for k in asserted}
  for var in asserted_values:
    if var not in system.variables:
      raise EquationSystemError(f"asserted unknown variable {var!r}")
  asserted_names = tuple(sorted(asserted_values))

  if mode == "numeric":
    for var, val in asserted_values.items():
      if not system.stalk(var).contains(float(val), tol):
        raise DomainError(
            f"asserted value {val!r} for {var!r} lies outside its domain "
            f"({system.stalk(var).label()})")

  struct_det, struct_known, _consumed, struct_redundant = _structural_chase(
      system, set(asserted_values))

  if mode == "structural":
    still_free = tuple(sorted(set(system.variables) - struct_known))
    return ExtensionResult(
        mode=mode,
        asserted=asserted_names,
        determined=tuple(struct_det),
        still_free=still_free,
        dof_consumed=len(asserted_names),
        redundant_equations=struct_redundant,
    )

  values: dict[str, float] = {k: float(v) for k, v in asserted_values.items()}
  consumed: dict[str, str] = {}
  checked: set[str] = set()
  determined: list[Determination] = []
  conflicts: list[tuple[str, float]] = []
  stalled: dict[str, tuple] = {}
  _propagate(system, values, tol, consumed, checked, determined, conflicts,
             stalled)

  ambiguities: list[Ambiguity] = []
  rng = np.random.default_rng(seed)

  for eid in sorted(stalled):
    var, kind, roots = stalled[eid]
    witnesses: tuple = ()
    detail = ""
    if kind == "multiple-roots":
      detail = f"{len(roots)} roots in the domain of {var!r}"
      wit = []
      for r in roots[:2]:
        cand = dict(values)
        cand[var] = float(r)
        csm: dict[str, str] = {}
        chk: set[str] = set()
        d2: list[Determination] = []
        c2: list[tuple[str, float]] = []
        s2: dict[str, tuple] = {}
        _propagate(system, cand, tol, csm, chk, d2, c2, s2)
        if not c2 and _verify_all(system, cand, VERIFY_TOL):
          wit.append(dict(cand))
      witnesses = tuple(wit)
    elif kind == "no-root":
      detail = f"no root for {var!r} inside its domain"
    ambiguities.append(Ambiguity(kind=kind, variables=(var,),
                                 equations=(eid,), witnesses=witnesses,
                                 detail=detail))

  # variables the structural chase pins down but single-unknown numeric
  # propagation cannot: a rank-deficient block
  numeric_known = set(values)
  gap = [d for d in struct_det if d.variable not in numeric_known]
  if gap:
    block_vars = sorted(
        d.variable for d in gap if d.method == "generic-rank")
    if not block_vars:
      block_vars = sorted(d.variable for d in gap)
    gap_eqs = tuple(sorted(
        eq.id for eq in system.equations
        if eq.id not in consumed and any(v not in numeric_known
                                         for v in eq.variables)))
    witnesses, solver_eqs = _witness_completions(
        system, values, block_vars, tol, rng)
    detail = (
        "equations constrain only a combination of these variables; "
        "distinct completions witness the slack")
    ambiguities.append(Ambiguity(
        kind="rank-deficient",
        variables=tuple(sorted(d.variable for d in gap)),
        equations=gap_eqs,
        witnesses=witnesses,
        detail=detail,
    ))
  else:
    solver_eqs = set()

  # an equation is redundant when it never pins anything down: satisfied
  # with zero unknowns in the main pass, or -- inside a rank-deficient
  # block -- holding in >= 2 distinct witnesses without ever acting as the
  # solver for a variable in any of them
  redundant_set = {
      eid for eid in checked
      if eid not in {e for e, _ in conflicts} and consumed.get(eid) is None}
  for amb in ambiguities:
    if amb.kind != "rank-deficient" or len(amb.witnesses) < 2:
      continue
    for eid in amb.equations:
      if eid in solver_eqs:
        continue
      eq = system.equation(eid)
      if all(
          all(v in w for v in eq.variables)
          and abs(eq.residual_at(w)) <= VERIFY_TOL
          for w in amb.witnesses):
        redundant_set.add(eid)
  redundant = tuple(sorted(redundant_set))

  still_free = tuple(sorted(set(system.variables) - set(values)))
  return ExtensionResult(
      mode=mode,
      asserted=asserted_names,
      determined=tuple(determined),
      still_free=still_free,
      dof_consumed=len(asserted_names),
      conflicts=tuple(conflicts),
      ambiguities=tuple(ambiguities),
      redundant_equations=redundant,
  )


# ---------------------------------------------------------------------------
# reporting


def _fmt(x: Any) -> str:
  if isinstance(x, float):
    return format(x, ".17g")
  return str(x)


def section_report(result: ExtensionResult) -> str:
  """Human-readable summary of an extension run (stable across runs with
  the same inputs and seed, so it can be snapshot-tested)."""
  lines = [f"mode: {result.mode}"]
  lines.append(f"asserted ({len(result.asserted)}): "
               + (", ".join(result.asserted) if result.asserted else "none"))
  lines.append(f"determined ({len(result.determined)}):")
  if not result.determined:
    lines.append("  none")
  for d in result.determined:
    val = "" if d.value is None else f" = {_fmt(d.value)}"
    lines.append(f"  {d.variable} via {d.via_equation} [{d.method}]{val}")
  lines.append(f"still free ({len(result.still_free)}): "
               + (", ".join(result.still_free) if result.still_free else "none"))
  if result.conflicts:
    lines.append(f"conflicts ({len(result.conflicts)}):")
    for eid, r in result.conflicts:
      lines.append(f"  {eid}: |residual| = {_fmt(r)}")
  else:
    lines.append("conflicts: none")
  if result.ambiguities:
    lines.append(f"ambiguities ({len(result.ambiguities)}):")
    for amb in result.ambiguities:
      lines.append(f"  [{amb.kind}] variables: " + ", ".join(amb.variables))
      lines.append(f"    equations: " + ", ".join(amb.equations))
      if amb.detail:
        lines.append(f"    {amb.detail}")
      for i, w in enumerate(amb.witnesses):
        vals = ", ".join(f"{v}={_fmt(w[v])}" for v in amb.variables)
        lines.append(f"    witness {i + 1}: {vals}")
  else:
    lines.append("ambiguities: none")
  if result.redundant_equations:
    lines.append("redundant equations: " + ", ".join(result.redundant_equations))
  else:
    lines.append("redundant equations: none")
  lines.append(f"dof consumed: {result.dof_consumed}")
  return "\n".join(lines) + "\n"


def result_to_dict(result: ExtensionResult) -> dict:
  """JSON-ready form of an extension result."""
  return {
      "mode": result.mode,
      "asserted": list(result.asserted),
      "determined": [
          {"variable": d.variable, "via_equation": d.via_equation,
           "method": d.method, "value": d.value}
          for d in result.determined
      ],
      "still_free": list(result.still_free),
      "dof_consumed": result.dof_consumed,
      "conflicts": [[eid, r] for eid, r in result.conflicts],
      "ambiguities": [
          {"kind": a.kind, "variables": list(a.variables),
           "equations": list(a.equations),
           "witnesses": [dict(sorted(w.items())) for w in a.witnesses],
           "detail": a.detail}
          for a in result.ambiguities
      ],
      "redundant_equations": list(result.redundant_equations),
  }
