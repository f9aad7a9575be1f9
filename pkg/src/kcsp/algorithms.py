"""Approximation algorithms for Max k-CSP_R.

The arity-extension construction turns any solver for arity ``k'`` into one
for arity ``k``: project every k-ary constraint onto all of its k'-subsets
(with every fill-in of the dropped variables), solve the projected instance,
then re-randomise each variable independently with probability ``alpha``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from kcsp import csp_core
from kcsp._rng import rng_for
from kcsp.csp_core import Constraint, CspInstance
from kcsp.errors import ValidationError


@dataclass(frozen=True)
class BaseAlgorithm:
    """A solver for instances of a fixed arity.

    ``solve(instance, seed)`` returns an assignment. ``advantage`` is free-form
    metadata describing the solver's guarantee (for example its f(R)); it is
    recorded, never computed.

    A Max 2-CSP_R solver with an Omega(R log R) advantage plugs in here with
    ``arity=2`` to give the Omega(log R / R^(k-1)) algorithm for every k.
    """

    name: str
    arity: int
    solve: Callable[[CspInstance, int], tuple]
    advantage: str = ""


def naive_random(instance: CspInstance, seed: int) -> tuple[int, ...]:
    vals = rng_for(seed).integers(0, instance.R, size=instance.n)
    return tuple(int(v) for v in vals)


def _brute_solve(instance, seed):
    return csp_core.brute_force_optimum(instance)[0]


def naive_base(arity: int) -> BaseAlgorithm:
    return BaseAlgorithm("naive", arity, naive_random, advantage="f(R) = 1")


def brute_base(arity: int) -> BaseAlgorithm:
    return BaseAlgorithm("brute", arity, _brute_solve, advantage="exact optimum")


@dataclass(frozen=True)
class ExtensionParams:
    k: int
    kprime: int
    alpha: float | None = None
    resolved_alpha: float = field(init=False)

    def __post_init__(self):
        if not self.k > self.kprime >= 1:
            raise ValidationError(f"need k > k' >= 1, got k={self.k}, k'={self.kprime}")
        a = (self.k - self.kprime) / self.k if self.alpha is None else float(self.alpha)
        if not 0.0 <= a <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {a}")
        object.__setattr__(self, "resolved_alpha", a)

    @property
    def l(self) -> int:
        return min(self.kprime, self.k - self.kprime)

    def guarantee_factor(self) -> float:
        """``C(k, k') alpha^(k-k') (1-alpha)^k'``."""
        a = self.resolved_alpha
        return math.comb(self.k, self.kprime) * a ** (self.k - self.kprime) * (1 - a) ** self.kprime

    def bernoulli_floor(self) -> float:
        return 1.0 / 4**self.l


def project_instance(instance: CspInstance, kprime: int) -> CspInstance:
    """Project each k-ary constraint onto every k'-subset of its scope.

    For a constraint ``(W, S, P)``, every ``S'`` (subsets in lexicographic
    order of scope positions) and every fill-in ``tau`` of ``S - S'``
    (row-major) emit ``(W / (C(k,k') R^(k-k')), S', P(. o tau))``.
    """
    arities = instance.arities
    if len(arities) != 1:
        raise ValidationError(f"mixed constraint arities {sorted(arities)}")
    (k,) = arities
    if not 1 <= kprime < k:
        raise ValidationError(f"need 1 <= k' < k, got k'={kprime}, k={k}")
    R = instance.R
    scale = math.comb(k, kprime) * R ** (k - kprime)
    out = []
    for c in instance.constraints:
        table = c.predicate.reshape((R,) * k)
        w = c.weight / scale
        for kept in itertools.combinations(range(k), kprime):
            dropped = [p for p in range(k) if p not in kept]
            # dropped axes first: each row of `moved` is one fill-in tau
            moved = np.transpose(table, dropped + list(kept)).reshape(R ** (k - kprime), R**kprime)
            scope = tuple(c.scope[p] for p in kept)
            for tau_row in moved:
                out.append(Constraint(w, scope, tau_row))
    return CspInstance(instance.n, R, out)


def blend_assignment(phi_a, alpha: float, R: int, seed: int) -> tuple[int, ...]:
    """Independently per variable: uniform with probability ``alpha``, else keep."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    phi = np.asarray(phi_a, dtype=np.int64)
    rng = rng_for(seed)
    redraw = rng.random(phi.size) < alpha
    fresh = rng.integers(0, R, size=phi.size)
    return tuple(int(v) for v in np.where(redraw, fresh, phi))


def blend_many(phi_a, alpha: float, R: int, seeds) -> np.ndarray:
    """Row ``t`` equals ``blend_assignment(phi_a, alpha, R, seeds[t])``."""
    phi = np.asarray(phi_a, dtype=np.int64)
    out = np.empty((len(seeds), phi.size), dtype=np.int64)
    for t, s in enumerate(seeds):
        rng = rng_for(s)
        redraw = rng.random(phi.size) < alpha
        fresh = rng.integers(0, R, size=phi.size)
        out[t] = np.where(redraw, fresh, phi)
    return out


def expected_blend_value(instance: CspInstance, phi_a, alpha: float) -> float:
    """Exact ``E[value(blend(phi_a))]``, summing over every predicate row."""
    R = instance.R
    phi = np.asarray(phi_a, dtype=np.int64)
    total = []
    for c in instance.constraints:
        k = c.arity
        rows = np.indices((R,) * k).reshape(k, -1)
        match = rows == phi[list(c.scope)][:, None]
        prob = np.prod(np.where(match, 1 - alpha + alpha / R, alpha / R), axis=0)
        total.append(c.weight * math.fsum((prob * c.predicate).tolist()))
    return math.fsum(total)


def extend_algorithm(instance: CspInstance, base: BaseAlgorithm, params: ExtensionParams, seed: int):
    """Run the extended algorithm; returns ``(phi_B, phi_A, projected)``.

    The base solver and the blend step get seeds derived from ``(seed, 0)``
    and ``(seed, 1)`` respectively.
    """
    if base.arity != params.kprime:
        raise ValidationError(f"base arity {base.arity} != k' = {params.kprime}")
    if instance.arities != {params.k}:
        raise ValidationError(f"instance arities {sorted(instance.arities)} != {{{params.k}}}")
    projected = project_instance(instance, params.kprime)
    base_seed, blend_seed = (int(np.random.SeedSequence([int(seed), i]).generate_state(1)[0]) for i in (0, 1))
    phi_a = tuple(base.solve(projected, base_seed))
    csp_core.check_assignment(projected, phi_a)
    phi_b = blend_assignment(phi_a, params.resolved_alpha, instance.R, blend_seed)
    return phi_b, phi_a, projected
