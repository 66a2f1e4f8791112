"""Equation systems encoded as sheaves on bipartite posets.

A system of equations over variables v with value spaces W_v induces a poset:
one element per variable, one per equation, with e <= v exactly when v occurs
in e.  Three sheaves on that poset matter here:

  * the product sheaf: the stalk at an equation is the full product of its
    variables' spaces, restrictions are projections -- its global sections
    are arbitrary variable assignments;
  * the solution sheaf: the equation stalks are cut down to the residual's
    zero set -- its global sections are exactly the solutions;
  * the explicit solution sheaf: for systems where every equation computes a
    designated output variable from the remaining inputs, the equation stalk
    is the product of the inputs only and the restriction to the output
    applies the equation -- again sections are solutions, with one redundant
    slot removed per equation.

Section enumeration is by backtracking over enumerable stalks.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .poset_sheaf import (
    Poset,
    Sheaf,
    SheafError,
    StalkSpace,
    product_space,
    subset_space,
)

__all__ = [
    "Equation",
    "EquationSystem",
    "EquationSystemError",
    "ExplicitnessError",
    "DependencyGraph",
    "build_poset",
    "build_product_sheaf",
    "build_solution_sheaf",
    "build_explicit_solution_sheaf",
    "dependency_graph",
    "enumerate_sections",
    "assignment_from_values",
]


class EquationSystemError(ValueError):
  pass


class ExplicitnessError(EquationSystemError):
  """The system does not satisfy the explicit-form requirements."""


@dataclass(frozen=True)
class Equation:
  """One scalar relation among named variables.

  residual takes the values of `variables` positionally and returns a number
  whose vanishing means the relation holds.  solved_forms optionally maps a
  variable name to a function of the *remaining* variables (in `variables`
  order with the solved one removed) returning its value.  `target` marks
  the output slot for explicit systems.
  """
  id: str
  variables: tuple[str, ...]
  residual: Callable[..., float] = field(compare=False)
  solved_forms: Mapping[str, Callable[..., float]] = field(
      default_factory=dict, compare=False)
  target: str | None = None

  def __post_init__(self):
    if len(set(self.variables)) != len(self.variables):
      raise EquationSystemError(
          f"equation {self.id!r} lists a variable twice: {self.variables}")
    if not self.variables:
      raise EquationSystemError(f"equation {self.id!r} involves no variables")
    for name in self.solved_forms:
      if name not in self.variables:
        raise EquationSystemError(
            f"equation {self.id!r} has a solved form for {name!r}, "
            "which it does not involve")
    if self.target is not None and self.target not in self.variables:
      raise EquationSystemError(
          f"equation {self.id!r} targets {self.target!r}, "
          "which it does not involve")

  def inputs(self) -> tuple[str, ...]:
    """Variables other than the target, in declaration order."""
    return tuple(v for v in self.variables if v != self.target)

  def residual_at(self, values: Mapping[str, Any]) -> float:
    return self.residual(*(values[v] for v in self.variables))

  def others(self, name: str) -> tuple[str, ...]:
    return tuple(v for v in self.variables if v != name)


class EquationSystem:
  """Named variables with value spaces plus equations over them."""

  def __init__(self,
               variables: Mapping[str, StalkSpace],
               equations: Sequence[Equation]):
    self.variables: dict[str, StalkSpace] = dict(variables)
    self.equations: tuple[Equation, ...] = tuple(equations)
    ids = set()
    for eq in self.equations:
      if eq.id in ids:
        raise EquationSystemError(f"duplicate equation id {eq.id!r}")
      ids.add(eq.id)
      if eq.id in self.variables:
        raise EquationSystemError(
            f"equation id {eq.id!r} collides with a variable name")
      for v in eq.variables:
        if v not in self.variables:
          raise EquationSystemError(
              f"equation {eq.id!r} involves unknown variable {v!r}")
    used = {v for eq in self.equations for v in eq.variables}
    self.unused_variables: frozenset[str] = frozenset(self.variables) - used
    if self.unused_variables:
      # Soft invariant: section-counting results assume every variable is
      # constrained by at least one equation.
      warnings.warn(
          "variables not involved in any equation: "
          + ", ".join(sorted(self.unused_variables)),
          stacklevel=2)

  def equation(self, eq_id: str) -> Equation:
    for eq in self.equations:
      if eq.id == eq_id:
        return eq
    raise EquationSystemError(f"unknown equation id {eq_id!r}")

  def stalk(self, var: str) -> StalkSpace:
    try:
      return self.variables[var]
    except KeyError:
      raise EquationSystemError(f"unknown variable {var!r}") from None

  def targets(self) -> dict[str, str]:
    """Map target variable -> equation id, for equations that declare one."""
    out: dict[str, str] = {}
    for eq in self.equations:
      if eq.target is not None:
        if eq.target in out:
          raise ExplicitnessError(
              f"variable {eq.target!r} is the target of both "
              f"{out[eq.target]!r} and {eq.id!r}")
        out[eq.target] = eq.id
    return out


# ---------------------------------------------------------------------------
# poset and sheaf constructions


def build_poset(system: EquationSystem) -> Poset:
  """Bipartite poset: variables on top, equations below, e <= v iff v occurs
  in e.  Element ids are the variable and equation ids unchanged."""
  elements = list(system.variables) + [eq.id for eq in system.equations]
  relations = [(eq.id, v) for eq in system.equations for v in eq.variables]
  return Poset(elements, relations)


def build_product_sheaf(system: EquationSystem) -> Sheaf:
  """Stalk at a variable: its value space.  Stalk at an equation: the full
  product of its variables' spaces.  Restrictions are projections."""
  base = build_poset(system)
  stalks: dict[str, StalkSpace] = dict(system.variables)
  restrictions: dict[tuple[str, str], Callable] = {}
  for eq in system.equations:
    stalks[eq.id] = product_space(system.stalk(v) for v in eq.variables)
    for idx, v in enumerate(eq.variables):
      restrictions[(eq.id, v)] = _projection(idx)
  return Sheaf(base, stalks, restrictions)


def build_solution_sheaf(system: EquationSystem, tol: float = 1e-9) -> Sheaf:
  """Like the product sheaf, but each equation stalk keeps only the tuples
  where the residual vanishes (|residual| <= tol for real-valued stalks,
  exactly zero for finite ones).  Warns when an enumerable zero set is
  empty."""
  base = build_poset(system)
  stalks: dict[str, StalkSpace] = dict(system.variables)
  restrictions: dict[tuple[str, str], Callable] = {}
  for eq in system.equations:
    full = product_space(system.stalk(v) for v in eq.variables)
    exact = all(system.stalk(v).kind == "finite" for v in eq.variables)
    cut = 0.0 if exact else tol

    def predicate(value, eq=eq, cut=cut):
      return abs(eq.residual(*value)) <= cut

    stalk = subset_space(full, predicate, note=f"{eq.id}=0")
    if stalk.is_enumerable() and not stalk.enumerate_values():
      warnings.warn(f"equation {eq.id!r} has an empty solution set",
                    stacklevel=2)
    stalks[eq.id] = stalk
    for idx, v in enumerate(eq.variables):
      restrictions[(eq.id, v)] = _projection(idx)
  return Sheaf(base, stalks, restrictions)


def build_explicit_solution_sheaf(system: EquationSystem,
                                  tol: float = 1e-9) -> Sheaf:
  """Sheaf for explicit systems: every equation must target a distinct
  output variable not among its inputs and provide a solved form for it.
  The equation stalk is the product of the input spaces; the restriction to
  the output applies the solved form, restrictions to inputs project."""
  targets = system.targets()
  for eq in system.equations:
    if eq.target is None:
      raise ExplicitnessError(f"equation {eq.id!r} declares no target variable")
    if eq.target not in eq.solved_forms:
      raise ExplicitnessError(
          f"equation {eq.id!r} has no solved form for its target {eq.target!r}")
  del targets  # injectivity checked inside system.targets()
  base = build_poset(system)
  stalks: dict[str, StalkSpace] = dict(system.variables)
  restrictions: dict[tuple[str, str], Callable] = {}
  for eq in system.equations:
    inputs = eq.inputs()
    stalks[eq.id] = product_space(system.stalk(v) for v in inputs)
    for v in eq.variables:
      if v == eq.target:
        restrictions[(eq.id, v)] = _apply_solved(eq.solved_forms[eq.target])
      else:
        restrictions[(eq.id, v)] = _projection(inputs.index(v))
  return Sheaf(base, stalks, restrictions)


def _projection(idx: int) -> Callable:
  return lambda value: value[idx]


def _apply_solved(fn: Callable) -> Callable:
  return lambda value: fn(*value)


def assignment_from_values(system: EquationSystem,
                           values: Mapping[str, Any],
                           explicit: bool = False) -> dict[str, Any]:
  """Total assignment over the system's poset induced by variable values:
  each equation element gets the tuple of its variables' values (inputs only
  when `explicit`).  Useful for feeding verify_section."""
  out: dict[str, Any] = {v: values[v] for v in system.variables}
  for eq in system.equations:
    names = eq.inputs() if explicit else eq.variables
    out[eq.id] = tuple(values[v] for v in names)
  return out


# ---------------------------------------------------------------------------
# dependency graph


@dataclass(frozen=True)
class DependencyGraph:
  """Directed graph of value flow in an explicit system.

  Nodes are free variables (no equation outputs them) plus one node per
  equation, displayed under its output's name.  An edge runs from the
  producer of each input into the consuming equation."""
  nodes: tuple[tuple[str, str], ...]  # (node id, kind: "free" | "equation")
  edges: tuple[tuple[str, str], ...]
  labels: Mapping[str, str]

  def in_degree(self, node: str) -> int:
    return sum(1 for _a, b in self.edges if b == node)

  def out_degree(self, node: str) -> int:
    return sum(1 for a, _b in self.edges if a == node)

  def to_dot(self, name: str = "dependencies") -> str:
    lines = [f'digraph "{name}" {{', '  node [fontname="Helvetica"];']
    for node, kind in self.nodes:
      shape = "ellipse" if kind == "free" else "box"
      label = self.labels.get(node, node)
      lines.append(f'  "{node}" [label="{label}", shape={shape}];')
    for a, b in self.edges:
      lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dependency_graph(system: EquationSystem,
                     collapse: Mapping[str, str] | None = None) -> DependencyGraph:
  """Value-flow graph of an explicit system (every equation must declare a
  target; targets must be distinct).

  Nodes: equations (labelled by their target) and free variables.  For every
  input v of equation e there is an edge from v's producer -- the equation
  targeting v, or the free variable v itself -- into e.

  `collapse` optionally renames nodes (typically mapping a derivative output
  back onto its state, e.g. "dv" -> "v"); nodes sharing a name after
  renaming are merged, which is how self-loops arise in the collapsed
  state-level graph."""
  targets = system.targets()
  for eq in system.equations:
    if eq.target is None:
      raise ExplicitnessError(f"equation {eq.id!r} declares no target variable")
  producer: dict[str, str] = {}  # variable -> node id that yields it
  free_vars: list[str] = []
  for v in system.variables:
    if v in targets:
      producer[v] = targets[v]
    else:
      producer[v] = v
      free_vars.append(v)

  rename = dict(collapse or {})

  def node_of(raw: str) -> str:
    return rename.get(raw, raw)

  nodes: dict[str, str] = {}
  labels: dict[str, str] = {}
  for v in free_vars:
    nodes.setdefault(node_of(v), "free")
    labels[node_of(v)] = node_of(v)
  for eq in system.equations:
    nid = node_of(eq.id)
    # an equation node absorbs a free-variable node of the same name
    nodes[nid] = "equation"
    labels[nid] = rename.get(eq.target, eq.target)
  edges: set[tuple[str, str]] = set()
  for eq in system.equations:
    for v in eq.inputs():
      edges.add((node_of(producer[v]), node_of(eq.id)))
  node_items = tuple(sorted(nodes.items()))
  return DependencyGraph(nodes=node_items, edges=tuple(sorted(edges)),
                         labels=labels)


# ---------------------------------------------------------------------------
# section enumeration


def enumerate_sections(sheaf: Sheaf) -> list[dict[str, Any]]:
  """All global sections of a sheaf whose stalks are enumerable, by
  backtracking in a fixed element order.  Raises SheafError when some stalk
  is not enumerable.  The result order is deterministic (product order over
  sorted minimal elements)."""
  base = sheaf.base
  for e in base.elements:
    if not sheaf.stalk(e).is_enumerable():
      raise SheafError(
          f"cannot enumerate sections: stalk at {e!r} is not enumerable "
          f"({sheaf.stalk(e).label()})")
  # visit minimal elements first so upper values are forced by restrictions
  order = sorted(base.elements,
                 key=lambda e: (sum(1 for o in base.elements
                                    if o != e and base.le(o, e)), e))
  below: dict[str, list[str]] = {
      e: [o for o in order if o != e and base.le(o, e)] for e in order}
  sections: list[dict[str, Any]] = []
  assignment: dict[str, Any] = {}

  def extend(i: int) -> None:
    if i == len(order):
      sections.append(dict(assignment))
      return
    e = order[i]
    stalk = sheaf.stalk(e)
    assigned_below = [o for o in below[e] if o in assignment]
    if assigned_below:
      forced = sheaf.apply(assigned_below[0], e, assignment[assigned_below[0]])
      candidates = [forced] if stalk.contains(forced) else []
    else:
      candidates = stalk.enumerate_values()
    for value in candidates:
      ok = all(
          _same(sheaf.apply(o, e, assignment[o]), value)
          for o in assigned_below)
      if ok:
        assignment[e] = value
        extend(i + 1)
        del assignment[e]

  extend(0)
  return sections


def _same(a: Any, b: Any) -> bool:
  return a == b
