"""Weighted Max k-CSP_R instances: data model, evaluation, exhaustive search, JSON."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from kcsp import kernels
from kcsp._rng import rng_for
from kcsp.errors import BudgetError, ValidationError

WEIGHT_TOL = 1e-9
DEFAULT_BUDGET = 10**7
_RANGE_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class Constraint:
    """One weighted predicate.

    ``predicate`` is a dense 0/1 table over assignments to ``scope`` in
    row-major order: the first scope variable is the most significant base-R
    digit.
    """

    weight: float
    scope: tuple[int, ...]
    predicate: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "scope", tuple(int(v) for v in self.scope))
        pred = np.asarray(self.predicate, dtype=np.uint8)
        pred.setflags(write=False)
        object.__setattr__(self, "predicate", pred)

    @property
    def arity(self) -> int:
        return len(self.scope)

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return (
            self.weight == other.weight
            and self.scope == other.scope
            and np.array_equal(self.predicate, other.predicate)
        )

    def __hash__(self):
        return hash((self.weight, self.scope, self.predicate.tobytes()))


@dataclass(frozen=True, eq=False)
class CspInstance:
    n: int
    R: int
    constraints: tuple[Constraint, ...]
    _packed: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        self._validate()
        object.__setattr__(self, "_packed", _pack(self))

    def _validate(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if self.R < 2:
            raise ValidationError(f"R must be >= 2, got {self.R}")
        if not self.constraints:
            raise ValidationError("instance has no constraints")
        for idx, c in enumerate(self.constraints):
            if not c.weight > 0:
                raise ValidationError(f"constraint {idx}: weight must be > 0, got {c.weight}")
            if c.arity < 1:
                raise ValidationError(f"constraint {idx}: empty scope")
            if len(set(c.scope)) != c.arity:
                raise ValidationError(f"constraint {idx}: scope {c.scope} has duplicates")
            for v in c.scope:
                if not 0 <= v < self.n:
                    raise ValidationError(f"constraint {idx}: variable {v} outside [0, {self.n})")
            if c.predicate.shape != (self.R**c.arity,):
                raise ValidationError(
                    f"constraint {idx}: predicate has {c.predicate.size} entries, "
                    f"expected R^{c.arity} = {self.R ** c.arity}"
                )
            if c.predicate.size and c.predicate.max() > 1:
                raise ValidationError(f"constraint {idx}: predicate entries must be 0 or 1")
        total = math.fsum(c.weight for c in self.constraints)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"weights sum to {total!r}, expected 1 within {WEIGHT_TOL}")

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def arities(self) -> set[int]:
        return {c.arity for c in self.constraints}

    def __eq__(self, other):
        if not isinstance(other, CspInstance):
            return NotImplemented
        return self.n == other.n and self.R == other.R and self.constraints == other.constraints


def _pack(instance: CspInstance):
    m = instance.m
    kmax = max(c.arity for c in instance.constraints)
    weights = np.array([c.weight for c in instance.constraints], dtype=np.float64)
    scopes = np.full((m, kmax), -1, dtype=np.int64)
    arities = np.zeros(m, dtype=np.int64)
    offsets = np.zeros(m, dtype=np.int64)
    pos = 0
    for idx, c in enumerate(instance.constraints):
        scopes[idx, : c.arity] = c.scope
        arities[idx] = c.arity
        offsets[idx] = pos
        pos += c.predicate.size
    preds = np.concatenate([c.predicate for c in instance.constraints]).astype(np.int64)
    return weights, scopes, arities, offsets, preds


def check_assignment(instance: CspInstance, a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.shape != (instance.n,):
        raise ValidationError(f"assignment has shape {arr.shape}, expected ({instance.n},)")
    bad = np.flatnonzero((arr < 0) | (arr >= instance.R))
    if bad.size:
        v = int(bad[0])
        raise ValidationError(f"variable {v} has value {int(arr[v])} outside [0, {instance.R})")
    return arr


def evaluate(instance: CspInstance, a) -> float:
    """Total weight of the constraints satisfied by assignment ``a``."""
    arr = check_assignment(instance, a)
    return float(kernels.csp_values_batch(arr[None, :], instance.R, *instance._packed)[0])


def evaluate_many(instance: CspInstance, assignments) -> np.ndarray:
    arr = np.ascontiguousarray(assignments, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != instance.n:
        raise ValidationError(f"assignments must have shape (T, {instance.n}), got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= instance.R):
        raise ValidationError(f"assignment values outside [0, {instance.R})")
    return kernels.csp_values_batch(arr, instance.R, *instance._packed)


def brute_force_optimum(instance: CspInstance, budget: int = DEFAULT_BUDGET, tie_tol: float = 1e-12):
    """Exhaustive maximiser.

    Among assignments within ``tie_tol`` of the best value the
    lexicographically smallest one wins.
    """
    total = instance.R**instance.n
    if total > budget:
        raise BudgetError(
            f"instance too large for exhaustive search: R^n = {total} exceeds budget {budget}"
        )
    best_val = -1.0
    best_idx = 0
    for start in range(0, total, _RANGE_CHUNK):
        count = min(_RANGE_CHUNK, total - start)
        vals = kernels.csp_values_range(start, count, instance.n, instance.R, *instance._packed)
        j = int(np.argmax(vals))
        if vals[j] > best_val + tie_tol:
            cands = np.flatnonzero(vals >= vals[j] - tie_tol)
            best_idx = start + int(cands[0])
            best_val = float(vals[cands[0]])
    best = kernels.index_digits(np.array([best_idx]), instance.n, instance.R)[0]
    # re-evaluate the winner so the reported value is exactly evaluate(instance, best)
    return tuple(int(v) for v in best), evaluate(instance, best)


def expected_random_value(instance: CspInstance) -> float:
    return math.fsum(
        c.weight * int(c.predicate.sum()) / instance.R**c.arity for c in instance.constraints
    )


def generate_random_instance(n: int, R: int, k: int, m: int, seed: int) -> CspInstance:
    if not (n >= k >= 1 and R >= 2 and m >= 1):
        raise ValidationError(f"infeasible parameters n={n}, R={R}, k={k}, m={m}")
    rng = rng_for(seed)
    constraints = []
    for _ in range(m):
        scope = rng.choice(n, size=k, replace=False)
        pred = rng.integers(0, 2, size=R**k)
        constraints.append(Constraint(1.0 / m, tuple(scope), pred))
    return CspInstance(n, R, constraints)


def uniform_instance(n: int, R: int, scopes: Sequence[Sequence[int]], predicates) -> CspInstance:
    """Instance with equal weights on the given scopes/predicates."""
    m = len(scopes)
    return CspInstance(n, R, [Constraint(1.0 / m, s, p) for s, p in zip(scopes, predicates)])


def to_dict(instance: CspInstance) -> dict:
    return {
        "n": instance.n,
        "R": instance.R,
        "constraints": [
            {"weight": c.weight, "scope": list(c.scope), "predicate": c.predicate.tolist()}
            for c in instance.constraints
        ],
    }


def from_dict(data: dict) -> CspInstance:
    try:
        n, R = int(data["n"]), int(data["R"])
        raw = data["constraints"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"instance file missing field {exc}") from None
    constraints = []
    for idx, c in enumerate(raw):
        try:
            constraints.append(Constraint(float(c["weight"]), c["scope"], c["predicate"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"constraint {idx}: missing field {exc}") from None
    return CspInstance(n, R, constraints)


def dumps(instance: CspInstance) -> str:
    return json.dumps(to_dict(instance))


def loads(text: str) -> CspInstance:
    return from_dict(json.loads(text))


def save(instance: CspInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(instance))


def load(path) -> CspInstance:
    with open(path) as fh:
        return loads(fh.read())
