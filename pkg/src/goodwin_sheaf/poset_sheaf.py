"""Finite posets and sheaves of sets on them.

A finite poset is stored as its full order relation (reflexive, antisymmetric,
transitive).  Open sets are the up-sets of the Alexandroff topology, so a
sheaf is determined by one stalk per element plus one restriction map per
covering relation; restrictions along general relations are composites along
Hasse paths, derived on demand.

Stalk carriers come in a few kinds: explicit finite sets, real scalars or
vectors, bounded real intervals, finite products of other stalks, and
predicate-restricted subsets.  Values for vector stalks of dimension one are
plain floats; products hold tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "PosetError",
    "SheafError",
    "MissingRestrictionError",
    "Poset",
    "StalkSpace",
    "finite_set",
    "real_vector",
    "real_interval",
    "product_space",
    "subset_space",
    "Sheaf",
    "up_set",
    "check_commutativity",
    "verify_section",
    "poset_to_dot",
    "sheaf_to_dot",
]


class PosetError(ValueError):
  """Bad poset data: duplicate ids, unknown endpoints, or an order cycle."""


class SheafError(ValueError):
  """Structurally invalid sheaf data."""


class MissingRestrictionError(SheafError):
  """A covering relation has no restriction map attached."""


def _transitive_closure(n: int, le: np.ndarray) -> np.ndarray:
  # boolean matrix closure; n is small everywhere we use this
  reach = le.copy()
  for k in range(n):
    reach |= reach[:, k:k + 1] & reach[k:k + 1, :]
  return reach


class Poset:
  """Finite poset over opaque string ids.

  `relations` lists generating pairs (lesser, greater); the reflexive and
  transitive closure is taken automatically.  A cycle through distinct
  elements violates antisymmetry and raises PosetError.
  """

  def __init__(self, elements: Iterable[str], relations: Iterable[tuple[str, str]] = ()):
    elems = list(elements)
    seen = set()
    for e in elems:
      if not isinstance(e, str):
        raise PosetError(f"element ids must be strings, got {e!r}")
      if e in seen:
        raise PosetError(f"duplicate element id {e!r}")
      seen.add(e)
    self.elements: tuple[str, ...] = tuple(elems)
    self._index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    le = np.eye(n, dtype=bool)
    for a, b in relations:
      for end in (a, b):
        if end not in self._index:
          raise PosetError(f"relation endpoint {end!r} is not an element")
      le[self._index[a], self._index[b]] = True
    le = _transitive_closure(n, le)
    for i in range(n):
      for j in range(i + 1, n):
        if le[i, j] and le[j, i]:
          raise PosetError(
              f"antisymmetry violated: {elems[i]!r} and {elems[j]!r} lie on a cycle")
    self._le = le

  def __contains__(self, x: str) -> bool:
    return x in self._index

  def __len__(self) -> int:
    return len(self.elements)

  def _i(self, x: str) -> int:
    try:
      return self._index[x]
    except KeyError:
      raise PosetError(f"unknown element {x!r}") from None

  def le(self, a: str, b: str) -> bool:
    """True iff a <= b."""
    return bool(self._le[self._i(a), self._i(b)])

  def up_set(self, x: str) -> frozenset[str]:
    """The principal up-set {y : x <= y} (smallest open set containing x)."""
    i = self._i(x)
    return frozenset(self.elements[j] for j in np.flatnonzero(self._le[i]))

  def covers(self) -> tuple[tuple[str, str], ...]:
    """Covering relations (a, b): a < b with nothing strictly between."""
    n = len(self.elements)
    out = []
    for i in range(n):
      for j in range(n):
        if i == j or not self._le[i, j]:
          continue
        between = any(
            k != i and k != j and self._le[i, k] and self._le[k, j]
            for k in range(n))
        if not between:
          out.append((self.elements[i], self.elements[j]))
    return tuple(sorted(out))

  def relation_pairs(self) -> tuple[tuple[str, str], ...]:
    """All strict pairs (a, b) with a < b."""
    n = len(self.elements)
    return tuple(
        (self.elements[i], self.elements[j])
        for i in range(n) for j in range(n)
        if i != j and self._le[i, j])

  def hasse_paths(self, bottom: str, top: str) -> list[tuple[str, ...]]:
    """All directed paths bottom -> top along covering relations, in
    lexicographic order of the intermediate ids."""
    covers_from: dict[str, list[str]] = {}
    for a, b in self.covers():
      covers_from.setdefault(a, []).append(b)
    for v in covers_from.values():
      v.sort()
    paths: list[tuple[str, ...]] = []

    def walk(node: str, acc: list[str]) -> None:
      if node == top:
        paths.append(tuple(acc))
        return
      for nxt in covers_from.get(node, ()):
        if self.le(nxt, top):
          walk(nxt, acc + [nxt])

    if self.le(bottom, top) and bottom != top:
      walk(bottom, [bottom])
    return paths


def up_set(poset: Poset, x: str) -> frozenset[str]:
  """Module-level alias for Poset.up_set."""
  return poset.up_set(x)


# ---------------------------------------------------------------------------
# stalk carriers


@dataclass(frozen=True)
class StalkSpace:
  """Value carrier for one stalk.

  kind is one of:
    "finite"   -- explicit value tuple
    "vector"   -- R^dim, values are floats (dim 1) or float tuples
    "interval" -- open real interval (lo, hi)
    "product"  -- cartesian product of factor spaces, values are tuples
    "subset"   -- predicate-restricted subset of a base space
  """
  kind: str
  values: tuple = ()
  dim: int = 1
  lo: float = 0.0
  hi: float = 0.0
  factors: tuple["StalkSpace", ...] = ()
  base: "StalkSpace | None" = None
  predicate: Callable[[Any], bool] | None = field(default=None, compare=False)
  sampler: Callable[[np.random.Generator], Any] | None = field(default=None, compare=False)
  note: str = ""

  # -- structure ----------------------------------------------------------
  def is_enumerable(self) -> bool:
    if self.kind == "finite":
      return True
    if self.kind == "product":
      return all(f.is_enumerable() for f in self.factors)
    if self.kind == "subset":
      return self.base.is_enumerable()
    return False

  def enumerate_values(self) -> list:
    if self.kind == "finite":
      return list(self.values)
    if self.kind == "product":
      return [tuple(c) for c in itertools.product(
          *(f.enumerate_values() for f in self.factors))]
    if self.kind == "subset":
      return [v for v in self.base.enumerate_values() if self.predicate(v)]
    raise SheafError(f"stalk of kind {self.kind!r} is not enumerable")

  def contains(self, value: Any, tol: float = 0.0) -> bool:
    if self.kind == "finite":
      if value in self.values:
        return True
      return tol > 0.0 and any(
          self.values_equal(value, v, tol) for v in self.values)
    if self.kind == "vector":
      vals = value if isinstance(value, tuple) else (value,)
      return len(vals) == self.dim and all(
          isinstance(v, (int, float)) and math.isfinite(float(v)) for v in vals)
    if self.kind == "interval":
      return (isinstance(value, (int, float)) and math.isfinite(float(value))
              and self.lo - tol < value < self.hi + tol)
    if self.kind == "product":
      return (isinstance(value, tuple) and len(value) == len(self.factors)
              and all(f.contains(v, tol) for f, v in zip(self.factors, value)))
    if self.kind == "subset":
      if not self.base.contains(value, tol):
        return False
      return bool(self.predicate(value))
    raise SheafError(f"unknown stalk kind {self.kind!r}")

  def sample(self, rng: np.random.Generator) -> Any:
    if self.kind == "finite":
      return self.values[int(rng.integers(len(self.values)))]
    if self.kind == "vector":
      draw = rng.standard_normal(self.dim)
      return float(draw[0]) if self.dim == 1 else tuple(float(v) for v in draw)
    if self.kind == "interval":
      return float(rng.uniform(self.lo, self.hi))
    if self.kind == "product":
      return tuple(f.sample(rng) for f in self.factors)
    if self.kind == "subset":
      if self.sampler is not None:
        return self.sampler(rng)
      for _ in range(1000):
        v = self.base.sample(rng)
        if self.predicate(v):
          return v
      raise SheafError("rejection sampling from subset stalk failed (1000 tries)")
    raise SheafError(f"unknown stalk kind {self.kind!r}")

  def values_equal(self, a: Any, b: Any, tol: float = 0.0) -> bool:
    if self.kind == "finite":
      # numeric members of a finite stalk still compare with tolerance, so
      # singleton data stalks can be checked at a chosen precision
      if tol > 0.0:
        return value_deviation(a, b) <= tol
      return a == b
    if self.kind in ("vector", "interval"):
      return _num_close(a, b, tol)
    if self.kind == "product":
      return all(f.values_equal(x, y, tol) for f, x, y in zip(self.factors, a, b))
    if self.kind == "subset":
      return self.base.values_equal(a, b, tol)
    raise SheafError(f"unknown stalk kind {self.kind!r}")

  def label(self) -> str:
    if self.kind == "finite":
      return f"finite({len(self.values)})"
    if self.kind == "vector":
      return f"R^{self.dim}"
    if self.kind == "interval":
      return f"({self.lo:g},{self.hi:g})"
    if self.kind == "product":
      return "x".join(f.label() for f in self.factors) if self.factors else "()"
    if self.kind == "subset":
      inner = self.note or "pred"
      return f"{{{inner}}} in {self.base.label()}"
    return self.kind


def _num_close(a: Any, b: Any, tol: float) -> bool:
  av = a if isinstance(a, tuple) else (a,)
  bv = b if isinstance(b, tuple) else (b,)
  if len(av) != len(bv):
    return False
  return all(abs(float(x) - float(y)) <= tol for x, y in zip(av, bv))


def value_deviation(a: Any, b: Any) -> float:
  """Max-norm distance between numeric values; 0/1 mismatch otherwise."""
  try:
    av = a if isinstance(a, tuple) else (a,)
    bv = b if isinstance(b, tuple) else (b,)
    if len(av) != len(bv):
      return 1.0
    return max((abs(float(x) - float(y)) for x, y in zip(av, bv)), default=0.0)
  except (TypeError, ValueError):
    return 0.0 if a == b else 1.0


def finite_set(values: Iterable) -> StalkSpace:
  vals = tuple(values)
  if not vals:
    raise SheafError("finite stalk needs at least one value")
  return StalkSpace(kind="finite", values=vals)


def real_vector(dim: int = 1) -> StalkSpace:
  if dim < 1:
    raise SheafError("vector stalk dimension must be >= 1")
  return StalkSpace(kind="vector", dim=dim)


def real_interval(lo: float, hi: float) -> StalkSpace:
  if not (lo < hi):
    raise SheafError("interval stalk needs lo < hi")
  return StalkSpace(kind="interval", lo=float(lo), hi=float(hi))


def product_space(factors: Iterable[StalkSpace]) -> StalkSpace:
  return StalkSpace(kind="product", factors=tuple(factors))


def subset_space(base: StalkSpace,
                 predicate: Callable[[Any], bool],
                 sampler: Callable[[np.random.Generator], Any] | None = None,
                 note: str = "") -> StalkSpace:
  return StalkSpace(kind="subset", base=base, predicate=predicate,
                    sampler=sampler, note=note)


# ---------------------------------------------------------------------------
# sheaves


class Sheaf:
  """Sheaf of sets on a finite poset.

  stalks: element id -> StalkSpace
  restrictions: (lower, upper) covering relation -> map on values.
  The identity on x <= x is implicit; maps along longer relations are
  composites along a canonical (lexicographically first) Hasse path.
  """

  def __init__(self,
               base: Poset,
               stalks: Mapping[str, StalkSpace],
               restrictions: Mapping[tuple[str, str], Callable[[Any], Any]],
               validate: bool = True):
    self.base = base
    self.stalks = dict(stalks)
    self.restrictions = dict(restrictions)
    missing_stalks = [e for e in base.elements if e not in self.stalks]
    if missing_stalks:
      raise SheafError(f"missing stalks for elements: {missing_stalks}")
    covers = set(base.covers())
    for key in self.restrictions:
      if key not in covers:
        raise SheafError(
            f"restriction attached to {key!r}, which is not a covering relation")
    if validate:
      absent = sorted(c for c in covers if c not in self.restrictions)
      if absent:
        raise MissingRestrictionError(
            "missing restriction maps for covering relations: "
            + ", ".join(f"{a!r} <= {b!r}" for a, b in absent))
    self._composite_cache: dict[tuple[str, str], Callable[[Any], Any]] = {}

  def stalk(self, x: str) -> StalkSpace:
    try:
      return self.stalks[x]
    except KeyError:
      raise SheafError(f"unknown element {x!r}") from None

  def restriction(self, a: str, b: str) -> Callable[[Any], Any]:
    """Map stalk(a) -> stalk(b) for a <= b (composite along the canonical
    Hasse path when (a, b) is not a covering relation)."""
    if a == b:
      return lambda v: v
    key = (a, b)
    if key in self._composite_cache:
      return self._composite_cache[key]
    if not self.base.le(a, b):
      raise SheafError(f"no relation {a!r} <= {b!r}")
    if key in self.restrictions:
      fn = self.restrictions[key]
    else:
      paths = self.base.hasse_paths(a, b)
      if not paths:
        raise MissingRestrictionError(f"no Hasse path from {a!r} to {b!r}")
      fn = self.compose_along(paths[0])
    self._composite_cache[key] = fn
    return fn

  def compose_along(self, path: Sequence[str]) -> Callable[[Any], Any]:
    steps = []
    for lo, hi in zip(path, path[1:]):
      if (lo, hi) not in self.restrictions:
        raise MissingRestrictionError(
            f"missing restriction map for covering relation {lo!r} <= {hi!r}")
      steps.append(self.restrictions[(lo, hi)])

    def composed(value, steps=tuple(steps)):
      for step in steps:
        value = step(value)
      return value

    return composed

  def apply(self, a: str, b: str, value: Any) -> Any:
    return self.restriction(a, b)(value)


@dataclass(frozen=True)
class CommutativityReport:
  ok: bool
  violations: tuple[dict, ...]
  pairs_checked: int


def check_commutativity(sheaf: Sheaf,
                        sample_count: int = 20,
                        tol: float = 1e-9,
                        seed: int = 0) -> CommutativityReport:
  """Check path-independence of composite restrictions.

  For every pair x < z with at least two Hasse paths, the composites along
  all paths are compared: on every stalk value when stalk(x) is enumerable,
  otherwise on `sample_count` seeded samples.  Deviations above `tol`
  (exact mismatch for finite stalks) are reported as violations carrying the
  two paths and a witness value.
  """
  base = sheaf.base
  for lo, hi in base.covers():
    if (lo, hi) not in sheaf.restrictions:
      raise MissingRestrictionError(
          f"missing restriction map for covering relation {lo!r} <= {hi!r}")
  rng = np.random.default_rng(seed)
  violations: list[dict] = []
  pairs_checked = 0
  for x, z in sorted(base.relation_pairs()):
    paths = base.hasse_paths(x, z)
    if len(paths) < 2:
      continue
    pairs_checked += 1
    stalk = sheaf.stalk(x)
    if stalk.is_enumerable():
      probes = stalk.enumerate_values()
    else:
      probes = [stalk.sample(rng) for _ in range(sample_count)]
    fns = [(p, sheaf.compose_along(p)) for p in paths]
    ref_path, ref_fn = fns[0]
    top_stalk = sheaf.stalk(z)
    for other_path, other_fn in fns[1:]:
      for value in probes:
        va = ref_fn(value)
        vb = other_fn(value)
        if not top_stalk.values_equal(va, vb, tol):
          violations.append({
              "bottom": x,
              "top": z,
              "path_a": ref_path,
              "path_b": other_path,
              "value": value,
              "deviation": value_deviation(va, vb),
          })
          break  # one witness per path pair
  return CommutativityReport(ok=not violations,
                             violations=tuple(violations),
                             pairs_checked=pairs_checked)


@dataclass(frozen=True)
class SectionCheck:
  is_global: bool
  consistent_on: frozenset[str]
  violations: tuple[dict, ...]


def verify_section(sheaf: Sheaf,
                   assignment: Mapping[str, Any],
                   tol: float = 1e-9) -> SectionCheck:
  """Verify an assignment of stalk values against all restriction maps.

  Every assigned value must lie in its stalk (SheafError otherwise).  For
  each strict relation a < b with both ends assigned, the composite
  restriction must carry value(a) to value(b) within `tol`.  `is_global`
  requires a total assignment with no violations; `consistent_on` is the set
  of assigned elements untouched by any violated relation (all restrictions
  among them hold, so the restriction of the assignment there is a local
  section).
  """
  for x, v in assignment.items():
    stalk = sheaf.stalk(x)
    if not stalk.contains(v, tol):
      raise SheafError(f"value {v!r} does not lie in the stalk at {x!r}")
  violations: list[dict] = []
  bad_elements: set[str] = set()
  for a, b in sorted(sheaf.base.relation_pairs()):
    if a not in assignment or b not in assignment:
      continue
    expected = sheaf.apply(a, b, assignment[a])
    actual = assignment[b]
    if not sheaf.stalk(b).values_equal(expected, actual, tol):
      violations.append({
          "lower": a,
          "upper": b,
          "expected": expected,
          "actual": actual,
          "deviation": value_deviation(expected, actual),
      })
      bad_elements.update((a, b))
  consistent = frozenset(x for x in assignment if x not in bad_elements)
  is_global = (not violations) and len(assignment) == len(sheaf.base.elements)
  return SectionCheck(is_global=is_global,
                      consistent_on=consistent,
                      violations=tuple(violations))


# ---------------------------------------------------------------------------
# DOT export


def _dot_quote(s: str) -> str:
  return '"' + s.replace('"', '\\"') + '"'


def poset_to_dot(poset: Poset, name: str = "poset",
                 clusters: Mapping[str, Sequence[str]] | None = None,
                 labels: Mapping[str, str] | None = None) -> str:
  """Hasse diagram in DOT form, edges pointing from lower to upper element.

  `clusters` optionally groups element ids into named boxed subgraphs.
  Output is deterministic: elements and edges are emitted sorted.
  """
  labels = labels or {}
  lines = [f"digraph {_dot_quote(name)} {{", "  rankdir=BT;",
           '  node [shape=box, fontname="Helvetica"];']
  clustered: set[str] = set()
  if clusters:
    for cname in sorted(clusters):
      members = [m for m in clusters[cname] if m in poset._index]
      clustered.update(members)
      lines.append(f"  subgraph cluster_{_sanitize(cname)} {{")
      lines.append(f"    label={_dot_quote(cname)};")
      for m in sorted(members):
        lines.append(f"    {_dot_quote(m)} [label={_dot_quote(labels.get(m, m))}];")
      lines.append("  }")
  for e in sorted(poset.elements):
    if e not in clustered:
      lines.append(f"  {_dot_quote(e)} [label={_dot_quote(labels.get(e, e))}];")
  for a, b in poset.covers():
    lines.append(f"  {_dot_quote(a)} -> {_dot_quote(b)};")
  lines.append("}")
  return "\n".join(lines) + "\n"


def sheaf_to_dot(sheaf: Sheaf, name: str = "sheaf",
                 clusters: Mapping[str, Sequence[str]] | None = None) -> str:
  """DOT rendering of a sheaf's base poset with stalk kinds in the labels."""
  labels = {e: f"{e}\\n{sheaf.stalk(e).label()}" for e in sheaf.base.elements}
  return poset_to_dot(sheaf.base, name=name, clusters=clusters, labels=labels)


def _sanitize(s: str) -> str:
  return "".join(c if c.isalnum() else "_" for c in s)
