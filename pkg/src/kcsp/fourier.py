"""Harmonic analysis of real functions on [R]^n.

Points and multi-indices are both stored row-major with coordinate 0 the
most significant digit. Basis index 0 is the constant function, so the degree
of a multi-index ``s`` is the number of non-zero entries.

The boolean analog of a function lives on variables ``(i, j)`` with
``i in [n]`` and ``j in [R]``; only ``j >= 1`` ever carries weight. Inside a
:class:`BooleanRep` the used variable ``(i, j)`` is bit ``i*(R-1) + (j-1)`` of
the subset mask, and a cube point with bit ``b`` set has ``y_b = -1``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from kcsp import kernels
from kcsp._rng import rng_for
from kcsp.errors import BudgetError, ValidationError

BOOLEAN_VAR_CAP = 22


def exact_mean(values) -> float:
    arr = np.asarray(values, dtype=np.float64).ravel()
    return math.fsum(arr.tolist()) / arr.size


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal basis of functions on [R] under the uniform measure.

    ``vectors[i, x]`` is ``l_i(x)``; row 0 is the constant 1.
    """

    R: int
    vectors: np.ndarray

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T / self.R


def build_basis(R: int, points=None) -> Basis:
    """Gram-Schmidt of ``1, 1{x=p_1}, ..., 1{x=p_{R-1}}``.

    ``points`` defaults to ``1, ..., R-1``. Each non-constant function is
    signed so its value at point 0 is positive (the first non-zero value, if
    that one vanishes).
    """
    if R < 2:
        raise ValidationError(f"R must be >= 2, got {R}")
    if points is None:
        points = range(1, R)
    points = [int(p) for p in points]
    if len(points) != R - 1 or len(set(points)) != R - 1 or not all(0 <= p < R for p in points):
        raise ValidationError(f"points must be R-1 distinct values in [0, {R})")
    rows = [np.ones(R)]
    for p in points:
        v = np.zeros(R)
        v[p] = 1.0
        for _ in range(2):  # second pass mops up rounding
            for u in rows:
                v = v - (u @ v / R) * u
        v = v / math.sqrt(v @ v / R)
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if v[nz[0]] < 0:
            v = -v
        rows.append(v)
    vectors = np.array(rows)
    vectors.setflags(write=False)
    return Basis(R, vectors)


@lru_cache(maxsize=None)
def _default_basis(R: int) -> Basis:
    return build_basis(R)


@lru_cache(maxsize=64)
def degrees(n: int, R: int) -> np.ndarray:
    """``|s|`` for every multi-index, flat row-major."""
    grids = np.indices((R,) * n).reshape(n, -1)
    deg = (grids != 0).sum(axis=0)
    deg.setflags(write=False)
    return deg


@lru_cache(maxsize=64)
def _coordinate_active(n: int, R: int) -> np.ndarray:
    """Boolean ``(n, R^n)`` array: ``s(i) != 0``."""
    act = np.indices((R,) * n).reshape(n, -1) != 0
    act.setflags(write=False)
    return act


@dataclass(frozen=True, eq=False)
class TableFunction:
    n: int
    R: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if vals.size != self.R**self.n:
            raise ValidationError(f"table has {vals.size} entries, expected R^n = {self.R ** self.n}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def tensor(self) -> np.ndarray:
        return self.values.reshape((self.R,) * self.n)

    @classmethod
    def from_callable(cls, n, R, fn):
        pts = np.indices((R,) * n).reshape(n, -1).T
        return cls(n, R, np.array([fn(tuple(p)) for p in pts], dtype=np.float64))

    @classmethod
    def random(cls, n, R, seed, low=0.0, high=1.0):
        return cls(n, R, rng_for(seed).uniform(low, high, size=R**n))


@dataclass(frozen=True, eq=False)
class FourierRep:
    n: int
    R: int
    basis: Basis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64).ravel()
        if c.size != self.R**self.n:
            raise ValidationError(f"coefficient vector has {c.size} entries, expected {self.R ** self.n}")
        if self.basis.R != self.R:
            raise ValidationError(f"basis is for R={self.basis.R}, function has R={self.R}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def _replace(self, coeffs) -> "FourierRep":
        return FourierRep(self.n, self.R, self.basis, coeffs)

    def __add__(self, other: "FourierRep") -> "FourierRep":
        if other.basis is not self.basis:
            raise ValidationError("cannot add representations over different bases")
        return self._replace(self.coeffs + other.coeffs)

    def to_debug_json(self, threshold: float = 1e-12) -> str:
        """``{"s0,s1,...": coefficient}`` for coefficients above ``threshold``."""
        idx = np.flatnonzero(np.abs(self.coeffs) > threshold)
        digits = kernels.index_digits(idx, self.n, self.R)
        return json.dumps(
            {",".join(map(str, d)): float(self.coeffs[i]) for i, d in zip(idx, digits)}
        )


def _contract(tensor: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Apply ``matrix`` along every axis: ``out[..a..] = sum_b matrix[a, b] in[..b..]``."""
    out = tensor
    for axis in range(tensor.ndim):
        out = np.moveaxis(np.tensordot(matrix, out, axes=([1], [axis])), 0, axis)
    return out


def transform(f: TableFunction, basis: Basis | None = None) -> FourierRep:
    basis = basis or _default_basis(f.R)
    if basis.R != f.R:
        raise ValidationError(f"basis is for R={basis.R}, function has R={f.R}")
    coeffs = _contract(f.tensor, basis.vectors / f.R)
    return FourierRep(f.n, f.R, basis, coeffs.ravel())


def inverse_transform(rep: FourierRep) -> TableFunction:
    values = _contract(rep.coeffs.reshape((rep.R,) * rep.n), rep.basis.vectors.T)
    return TableFunction(rep.n, rep.R, values.ravel())


def apply_noise(rep: FourierRep, rho: float) -> FourierRep:
    if not 0.0 <= rho <= 1.0:
        raise ValidationError(f"rho must lie in [0, 1], got {rho}")
    return rep._replace(rep.coeffs * rho ** degrees(rep.n, rep.R))


def noise_table(f: TableFunction, rho: float, basis: Basis | None = None) -> TableFunction:
    """Shortcut for ``T_rho f`` as a table."""
    return inverse_transform(apply_noise(transform(f, basis), rho))


def truncate(rep: FourierRep, d: int, part: str = "low") -> FourierRep:
    if d < 0:
        raise ValidationError(f"degree bound must be >= 0, got {d}")
    keep = degrees(rep.n, rep.R) <= d
    if part == "high":
        keep = ~keep
    elif part != "low":
        raise ValidationError(f"part must be 'low' or 'high', got {part!r}")
    return rep._replace(np.where(keep, rep.coeffs, 0.0))


def influence(rep: FourierRep, i: int) -> float:
    if not 0 <= i < rep.n:
        raise ValidationError(f"coordinate {i} outside [0, {rep.n})")
    act = _coordinate_active(rep.n, rep.R)[i]
    return math.fsum((rep.coeffs[act] ** 2).tolist())


def degree_influence(rep: FourierRep, i: int, d: int) -> float:
    if not 0 <= i < rep.n:
        raise ValidationError(f"coordinate {i} outside [0, {rep.n})")
    mask = _coordinate_active(rep.n, rep.R)[i] & (degrees(rep.n, rep.R) <= d)
    return math.fsum((rep.coeffs[mask] ** 2).tolist())


def influences(rep: FourierRep, d: int | None = None) -> np.ndarray:
    """All coordinate influences at once (degree-``d`` ones if ``d`` is given)."""
    sq = rep.coeffs**2
    if d is not None:
        sq = np.where(degrees(rep.n, rep.R) <= d, sq, 0.0)
    return _coordinate_active(rep.n, rep.R) @ sq


def p_norm(f: TableFunction, p: float) -> float:
    if p < 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    return exact_mean(np.abs(f.values) ** p) ** (1.0 / p)


def variance(rep: FourierRep) -> float:
    return math.fsum((rep.coeffs[1:] ** 2).tolist())


def mean(rep: FourierRep) -> float:
    return float(rep.coeffs[0])


def sum_squares(rep: FourierRep) -> float:
    return math.fsum((rep.coeffs**2).tolist())


def noise_sample(x, rho: float, R: int, seed=None, rng=None) -> np.ndarray:
    """A rho-correlated copy of ``x``.

    Each coordinate is kept with probability ``rho`` and otherwise redrawn
    uniformly from [R], so it agrees with ``x`` w.p. ``rho + (1 - rho)/R``.
    Accepts a single point or a batch of points (last axis = coordinates).
    """
    if not 0.0 <= rho <= 1.0:
        raise ValidationError(f"rho must lie in [0, 1], got {rho}")
    rng = rng if rng is not None else rng_for(0 if seed is None else seed)
    x = np.asarray(x, dtype=np.int64)
    keep = rng.random(x.shape) < rho
    fresh = rng.integers(0, R, size=x.shape)
    return np.where(keep, x, fresh)


# --------------------------------------------------------------------------
# boolean analogs
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BooleanRep:
    """Multilinear function on {+-1}^(nR) with sparse subset coefficients."""

    n: int
    R: int
    masks: np.ndarray
    values: np.ndarray

    @property
    def m(self) -> int:
        return self.n * self.R

    @property
    def used_vars(self) -> int:
        return self.n * (self.R - 1)

    def _replace(self, values) -> "BooleanRep":
        return BooleanRep(self.n, self.R, self.masks, np.asarray(values, dtype=np.float64))

    def sizes(self) -> np.ndarray:
        return _popcount(self.masks)

    def coefficient_dict(self) -> dict[int, float]:
        return {int(k): float(v) for k, v in zip(self.masks, self.values)}

    def table(self) -> np.ndarray:
        """Values on every point of the cube over the used variables.

        The unused ``(i, 0)`` variables do not change any value, so averages
        over this table equal averages over the full {+-1}^(nR).
        """
        if self.used_vars > BOOLEAN_VAR_CAP:
            raise BudgetError(
                f"boolean cube over {self.used_vars} variables exceeds cap {BOOLEAN_VAR_CAP}"
            )
        dense = np.zeros(1 << self.used_vars, dtype=np.float64)
        np.add.at(dense, self.masks, self.values)
        return kernels.fwht(dense)


def _popcount(masks: np.ndarray) -> np.ndarray:
    m = np.asarray(masks, dtype=np.int64).copy()
    count = np.zeros(m.shape, dtype=np.int64)
    while m.any():
        count += m & 1
        m >>= 1
    return count


@lru_cache(maxsize=64)
def _analog_masks(n: int, R: int) -> np.ndarray:
    digits = np.indices((R,) * n).reshape(n, -1)
    bits = np.arange(n, dtype=np.int64)[:, None] * (R - 1) + (digits - 1)
    masks = np.where(digits != 0, np.left_shift(1, np.maximum(bits, 0)), 0).sum(axis=0)
    masks.setflags(write=False)
    return masks


def boolean_analog(rep: FourierRep) -> BooleanRep:
    return BooleanRep(rep.n, rep.R, _analog_masks(rep.n, rep.R), rep.coeffs.copy())


def eval_boolean(G: BooleanRep, y) -> np.ndarray | float:
    """Evaluate at ``y`` in {+-1}^(nR); variable ``(i, j)`` is ``y[..., i*R + j]``."""
    y = np.asarray(y, dtype=np.float64)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    if y.shape[1] != G.m:
        raise ValidationError(f"point has {y.shape[1]} coordinates, expected nR = {G.m}")
    used = y.reshape(-1, G.n, G.R)[:, :, 1:].reshape(y.shape[0], -1)
    bits = (G.masks[:, None] >> np.arange(G.used_vars)[None, :]) & 1
    # product over the chosen variables of each subset
    chars = np.prod(np.where(bits[None, :, :] == 1, used[:, None, :], 1.0), axis=2)
    out = chars @ G.values
    return float(out[0]) if single else out


def boolean_noise(G: BooleanRep, rho: float) -> BooleanRep:
    return G._replace(G.values * rho ** G.sizes())


def boolean_truncate(G: BooleanRep, d: int, part: str = "low") -> BooleanRep:
    keep = G.sizes() <= d
    if part == "high":
        keep = ~keep
    return G._replace(np.where(keep, G.values, 0.0))


def boolean_sum_squares(G: BooleanRep) -> float:
    return math.fsum((G.values**2).tolist())


def cube_norm(table: np.ndarray, p: float) -> float:
    return exact_mean(np.abs(table) ** p) ** (1.0 / p)
