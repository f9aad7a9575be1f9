"""Label-cover games and the reductions built on them.

Labels are 0-based internally; the JSON game format stores edge maps with
1-based label values as ``map[sigma - 1] = pi(sigma)``. An edge ``(v, w)``
with map ``pi`` is satisfied when ``pi(phi(v)) = phi(w)``.

For the PCP, a proof holds one raw table ``h~_w : [R]^n -> [R]`` per right
vertex (``n`` = game alphabet). Queries go through folding,
``h_w(x) = h~_w(x - x_0*1) + x_0`` mod R, so only the entries with
``x_0 = 0`` are ever read; those are the CSP variables of the reduction.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from kcsp import csp_core, fourier, kernels
from kcsp._rng import map_chunks, rng_for
from kcsp.csp_core import Constraint, CspInstance
from kcsp.dictator_test import (
    RFunction,
    default_parameters,
    exceeds,
    fold,
    point_index,
    points,
    projection_power_sum,
)
from kcsp.errors import BudgetError, ValidationError

DEFAULT_BUDGET = 10**7
EXACT_TUPLE_BUDGET = 2 * 10**6


# --------------------------------------------------------------------------
# games
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Game:
    kind: str  # "unique" or "d-to-1"
    V: int
    W: int
    N: int
    edges: tuple  # (v, w, map) with map a tuple of 0-based labels
    d: int = 1

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(v), int(w), tuple(int(x) for x in mp)) for v, w, mp in self.edges)
        )
        self._validate()

    def _validate(self):
        if self.kind not in ("unique", "d-to-1"):
            raise ValidationError(f"unknown game kind {self.kind!r}")
        if self.kind == "unique" and self.d != 1:
            raise ValidationError("unique games have d = 1")
        if self.d < 1 or self.N % self.d:
            raise ValidationError(f"alphabet N={self.N} not divisible by d={self.d}")
        if self.V < 1 or self.W < 1 or self.N < 1:
            raise ValidationError("V, W and N must be positive")
        if not self.edges:
            raise ValidationError("game has no edges")
        for idx, (v, w, mp) in enumerate(self.edges):
            if not 0 <= v < self.V:
                raise ValidationError(f"edge {idx}: left endpoint {v} outside [0, {self.V})")
            if not 0 <= w < self.W:
                raise ValidationError(f"edge {idx}: right endpoint {w} outside [0, {self.W})")
            if len(mp) != self.N:
                raise ValidationError(f"edge {idx}: map has {len(mp)} entries, expected {self.N}")
            counts = np.bincount(np.asarray(mp, dtype=np.int64).clip(0), minlength=self.M)
            if min(mp) < 0 or max(mp) >= self.M or counts.size != self.M or np.any(counts != self.d):
                what = "a bijection" if self.kind == "unique" else f"exactly {self.d}-to-1"
                raise ValidationError(f"edge {idx}: map is not {what} onto [0, {self.M})")

    @property
    def M(self) -> int:
        """Right alphabet size."""
        return self.N // self.d

    @property
    def maps(self) -> np.ndarray:
        return np.array([mp for _, _, mp in self.edges], dtype=np.int64)

    @property
    def edge_v(self) -> np.ndarray:
        return np.array([v for v, _, _ in self.edges], dtype=np.int64)

    @property
    def edge_w(self) -> np.ndarray:
        return np.array([w for _, w, _ in self.edges], dtype=np.int64)

    def incident(self) -> list[list[int]]:
        inc = [[] for _ in range(self.V)]
        for e, (v, _, _) in enumerate(self.edges):
            inc[v].append(e)
        return inc

    def v_degree(self) -> int:
        """Common degree on the left side; raises unless the game is V-regular."""
        degs = {len(x) for x in self.incident()}
        if len(degs) != 1 or 0 in degs:
            raise ValidationError(f"game is not V-regular (left degrees {sorted(degs)})")
        return degs.pop()

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "d-to-1":
            out["d"] = self.d
        out.update(
            V=self.V,
            W=self.W,
            N=self.N,
            edges=[{"v": v, "w": w, "map": [x + 1 for x in mp]} for v, w, mp in self.edges],
        )
        return out

    @classmethod
    def from_dict(cls, data) -> "Game":
        try:
            kind = data["kind"]
            d = int(data.get("d", 1)) if kind == "d-to-1" else 1
            edges = [(e["v"], e["w"], [int(x) - 1 for x in e["map"]]) for e in data["edges"]]
            return cls(kind, int(data["V"]), int(data["W"]), int(data["N"]), edges, d)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"game file missing field {exc}") from None


def save_game(game: Game, path):
    with open(path, "w") as fh:
        json.dump(game.to_dict(), fh)


def load_game(path) -> Game:
    with open(path) as fh:
        return Game.from_dict(json.load(fh))


@dataclass(frozen=True)
class GameAssignment:
    v_labels: tuple[int, ...]
    w_labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "v_labels", tuple(int(x) for x in self.v_labels))
        object.__setattr__(self, "w_labels", tuple(int(x) for x in self.w_labels))


def _check_assignment(game: Game, phi: GameAssignment):
    if len(phi.v_labels) != game.V or len(phi.w_labels) != game.W:
        raise ValidationError("assignment size does not match the game")
    if any(not 0 <= x < game.N for x in phi.v_labels):
        raise ValidationError(f"left label outside [0, {game.N})")
    if any(not 0 <= x < game.M for x in phi.w_labels):
        raise ValidationError(f"right label outside [0, {game.M})")


def game_value(game: Game, phi: GameAssignment) -> float:
    _check_assignment(game, phi)
    sat = sum(mp[phi.v_labels[v]] == phi.w_labels[w] for v, w, mp in game.edges)
    return sat / len(game.edges)


def brute_force_game_value(game: Game, budget: int = DEFAULT_BUDGET) -> tuple[GameAssignment, float]:
    """Exhaustive maximiser, lexicographic tie-break over (left labels, right labels)."""
    radices = [game.N] * game.V + [game.M] * game.W
    total = math.prod(radices)
    if total > budget:
        raise BudgetError(f"game too large for exhaustive search: {total} assignments exceed budget {budget}")
    maps, ev, ew = game.maps, game.edge_v, game.edge_w + game.V
    place = np.array([math.prod(radices[i + 1 :]) for i in range(len(radices))], dtype=np.int64)
    rad = np.array(radices, dtype=np.int64)
    best, best_idx = -1, 0
    chunk = 1 << 16
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        labels = (idx[:, None] // place[None, :]) % rad[None, :]
        sat = (maps[np.arange(len(ev))[None, :], labels[:, ev]] == labels[:, ew]).sum(axis=1)
        j = int(np.argmax(sat))
        if sat[j] > best:
            best, best_idx = int(sat[j]), start + j
    labels = [(best_idx // place[i]) % rad[i] for i in range(len(radices))]
    phi = GameAssignment(labels[: game.V], labels[game.V :])
    return phi, best / len(game.edges)


def _regular_neighbours(rng, V, W, edges):
    if edges % V:
        raise ValidationError(f"edge count {edges} must be a multiple of V={V} for a V-regular game")
    deg = edges // V
    if deg > W:
        raise ValidationError(f"left degree {deg} exceeds W={W}")
    return [(v, int(w)) for v in range(V) for w in rng.choice(W, size=deg, replace=False)]


def generate_unique_game(V, W, N, edges, seed, satisfiable=False) -> Game:
    """V-regular random unique game; ``satisfiable`` plants a perfect labelling."""
    rng = rng_for(seed)
    pairs = _regular_neighbours(rng, V, W, edges)
    plant_v = rng.integers(0, N, size=V)
    plant_w = rng.integers(0, N, size=W)
    out = []
    for v, w in pairs:
        mp = rng.permutation(N)
        if satisfiable:
            a, b = plant_v[v], int(np.flatnonzero(mp == plant_w[w])[0])
            mp[a], mp[b] = mp[b], mp[a]
        out.append((v, w, mp))
    return Game("unique", V, W, N, out)


def generate_d21_game(V, W, N, d, edges, seed, satisfiable=False) -> Game:
    if d < 1 or N % d:
        raise ValidationError(f"alphabet N={N} not divisible by d={d}")
    rng = rng_for(seed)
    pairs = _regular_neighbours(rng, V, W, edges)
    plant_v = rng.integers(0, N, size=V)
    plant_w = rng.integers(0, N // d, size=W)
    out = []
    for v, w in pairs:
        mp = rng.permutation(N) // d
        if satisfiable:
            a, b = plant_v[v], int(np.flatnonzero(mp == plant_w[w])[0])
            mp[a], mp[b] = mp[b], mp[a]
        out.append((v, w, mp))
    return Game("d-to-1", V, W, N, out, d)


def planted_assignment(game: Game) -> GameAssignment | None:
    """Best assignment if the game is small enough to search, else ``None``."""
    try:
        return brute_force_game_value(game)[0]
    except BudgetError:
        return None


# --------------------------------------------------------------------------
# d-to-1 -> unique
# --------------------------------------------------------------------------

def reduce_d21_to_ug(game: Game) -> Game:
    """Spread each right label theta over ``d*theta .. d*theta + d - 1``.

    The preimages of theta are taken in ascending order, so the i-th smallest
    preimage maps to ``d*theta + i``.
    """
    if game.kind != "d-to-1":
        raise ValidationError("expected a d-to-1 game")
    d = game.d
    out = []
    for v, w, mp in game.edges:
        mp = np.asarray(mp)
        new = np.empty(game.N, dtype=np.int64)
        for theta in range(game.M):
            pre = np.sort(np.flatnonzero(mp == theta))
            if pre.size != d:
                raise ValidationError(f"edge ({v}, {w}): label {theta} has {pre.size} preimages")
            new[pre] = d * theta + np.arange(d)
        out.append((v, w, new))
    return Game("unique", game.V, game.W, game.N, out)


def decode_ug_assignment(d21: Game, phi_ug: GameAssignment) -> GameAssignment:
    """Left labels unchanged; right label ``l`` becomes ``l // d``."""
    return GameAssignment(phi_ug.v_labels, tuple(x // d21.d for x in phi_ug.w_labels))


def lift_d21_assignment(d21: Game, ug: Game, phi: GameAssignment) -> GameAssignment:
    """Keep left labels; give each right vertex the label satisfying most of its edges."""
    w_labels = []
    for w in range(ug.W):
        votes = np.zeros(ug.N, dtype=np.int64)
        for v, ww, mp in ug.edges:
            if ww == w:
                votes[mp[phi.v_labels[v]]] += 1
        w_labels.append(int(np.argmax(votes)))
    return GameAssignment(phi.v_labels, w_labels)


# --------------------------------------------------------------------------
# proofs and folding
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Proof:
    """Raw long-code tables, one per right vertex, values in [0, R)."""

    n: int
    R: int
    tables: tuple[np.ndarray, ...]

    def __post_init__(self):
        tabs = []
        for w, t in enumerate(self.tables):
            arr = np.asarray(t, dtype=np.int64).ravel()
            if arr.size != self.R**self.n:
                raise ValidationError(f"table {w} has {arr.size} entries, expected R^n = {self.R ** self.n}")
            if arr.min() < 0 or arr.max() >= self.R:
                raise ValidationError(f"table {w} has values outside [0, {self.R})")
            arr.setflags(write=False)
            tabs.append(arr)
        object.__setattr__(self, "tables", tuple(tabs))

    @property
    def W(self) -> int:
        return len(self.tables)

    def to_dict(self) -> dict:
        return {"R": self.R, "n": self.n, "tables": {str(w): t.tolist() for w, t in enumerate(self.tables)}}

    @classmethod
    def from_dict(cls, data) -> "Proof":
        try:
            R = int(data["R"])
            raw = data["tables"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"proof file missing field {exc}") from None
        tables = [raw[str(w)] for w in range(len(raw))]
        size = len(tables[0])
        n = int(data.get("n", round(math.log(size, R))))
        return cls(n, R, tables)

    @classmethod
    def random(cls, W, n, R, seed) -> "Proof":
        rng = rng_for(seed)
        return cls(n, R, [rng.integers(0, R, size=R**n) for _ in range(W)])

    @classmethod
    def constant(cls, W, n, R, c=0) -> "Proof":
        return cls(n, R, [np.full(R**n, c % R) for _ in range(W)])


def fold_eval(proof: Proof, w: int, x) -> int:
    x = np.asarray(x, dtype=np.int64)
    lead = int(x[0])
    rep = int(point_index((x - lead) % proof.R, proof.R))
    return int((proof.tables[w][rep] + lead) % proof.R)


def folded_table(proof: Proof, w: int) -> np.ndarray:
    return fold(RFunction(proof.n, proof.R, proof.tables[w])).table


def honest_proof(game: Game, phi: GameAssignment, R: int) -> Proof:
    """Long code of the right labels: ``h~_w(x) = x_{phi(w)}``."""
    if game.kind != "unique":
        raise ValidationError("honest proofs are defined for unique games")
    _check_assignment(game, phi)
    pts = points(game.N, R)
    return Proof(game.N, R, [pts[:, phi.w_labels[w]] for w in range(game.W)])


def proof_assignment(proof: Proof) -> np.ndarray:
    """CSP assignment read off a proof: the representative entries of each table."""
    reps = proof.R ** (proof.n - 1)
    return np.concatenate([t[:reps] for t in proof.tables])


# --------------------------------------------------------------------------
# PCP parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PcpParams:
    k: int
    R: int
    rho: float | None = None
    d: int | None = None
    log_delta: float | None = None
    mode: str = "exact"
    samples: int = 10**4

    def __post_init__(self):
        rho, d, log_delta = default_parameters(self.k, self.R)
        for name, val in (("rho", rho), ("d", d), ("log_delta", log_delta)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, val)
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1], got {self.rho}")
        if self.mode not in ("exact", "sampled"):
            raise ValidationError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")

    @property
    def delta(self) -> float:
        return math.exp(self.log_delta)


def _inverse_maps(game: Game) -> np.ndarray:
    """``out[e] = pi_{w,v}``, the inverse of edge e's map."""
    maps = game.maps
    inv = np.empty_like(maps)
    rows = np.arange(maps.shape[0])[:, None]
    inv[rows, maps] = np.arange(game.N)[None, :]
    return inv


def _check_pcp_inputs(game: Game, proof: Proof | None, R: int):
    if game.kind != "unique":
        raise ValidationError("the PCP reduction needs a unique game")
    if proof is not None and (proof.n != game.N or proof.R != R or proof.W != game.W):
        raise ValidationError(
            f"proof shape (W={proof.W}, n={proof.n}, R={proof.R}) does not match game/params "
            f"(W={game.W}, n={game.N}, R={R})"
        )


def permute_table(table: np.ndarray, n: int, R: int, perm) -> np.ndarray:
    """Table of ``x -> table(x o perm)`` where ``(x o perm)_i = x_{perm(i)}``."""
    pts = points(n, R)
    return table[point_index(pts[:, np.asarray(perm)], R)]


# --------------------------------------------------------------------------
# UG -> Max k-CSP_R
# --------------------------------------------------------------------------

def _noise_pattern_weights(k: int, R: int, rho: float) -> np.ndarray:
    """Joint law of one coordinate of k rho-correlated copies of a uniform z."""
    rows = np.indices((R,) * k).reshape(k, -1)
    total = np.zeros(rows.shape[1])
    for b in range(R):
        total += np.prod(np.where(rows == b, rho + (1 - rho) / R, (1 - rho) / R), axis=0)
    return total / R


class _ConstraintBuilder:
    """Collects (scope, predicate) keys with summed weights, first-seen order."""

    def __init__(self, R):
        self.R = R
        self.acc: dict = {}
        self.pred_cache: dict = {}

    def predicate(self, positions, shifts, arity):
        key = (positions, shifts, arity)
        if key not in self.pred_cache:
            rows = np.indices((self.R,) * arity).reshape(arity, -1)
            answers = (rows[list(positions)] + np.asarray(shifts)[:, None]) % self.R
            self.pred_cache[key] = np.all(answers == answers[:1], axis=0).astype(np.uint8)
        return self.pred_cache[key]

    def add(self, weight, var_ids, shifts):
        scope, positions = [], []
        for x in var_ids:
            if x not in scope:
                scope.append(x)
            positions.append(scope.index(x))
        pred = self.predicate(tuple(positions), tuple(shifts), len(scope))
        key = (tuple(scope), pred.tobytes())
        if key in self.acc:
            self.acc[key][0].append(weight)
        else:
            self.acc[key] = ([weight], pred)

    def build(self, n_vars) -> CspInstance:
        cons = [
            Constraint(math.fsum(ws), scope, pred)
            for (scope, _), (ws, pred) in self.acc.items()
            if math.fsum(ws) > 0
        ]
        return CspInstance(n_vars, self.R, cons)


def _query_vars(game, inv, e, x, R):
    """Variable id and folding shift of the query ``h_w(x o pi_{w,v})`` on edge e."""
    n = game.N
    u = x[..., inv[e]] if np.ndim(e) == 0 else np.take_along_axis(x, inv[e], axis=-1)
    lead = u[..., 0]
    rep = point_index((u - lead[..., None]) % R, R)
    w = game.edge_w[e]
    return w * R ** (n - 1) + rep, lead


def reduce_ug_to_csp(game: Game, params: PcpParams, seed: int = 0, budget: int = EXACT_TUPLE_BUDGET) -> CspInstance:
    """The verifier's acceptance predicates as a weighted Max k-CSP_R instance.

    Variable ``w * R^(n-1) + r`` is entry ``r`` of ``h~_w`` (the entries with
    leading coordinate 0). Exact mode enumerates (v, neighbours, queries)
    with the query law marginalised per coordinate; sampled mode draws
    ``params.samples`` verifier runs with weight ``1/samples`` each.
    Constraints with identical scope and predicate are merged.
    """
    _check_pcp_inputs(game, None, params.R)
    D = game.v_degree()
    n, R, k = game.N, params.R, params.k
    inv = _inverse_maps(game)
    inc = np.array(game.incident(), dtype=np.int64)
    builder = _ConstraintBuilder(R)
    n_vars = game.W * R ** (n - 1)
    if params.mode == "exact":
        count = game.V * D**k * R ** (n * k)
        if count > budget:
            raise BudgetError(f"exact reduction needs {count} verifier tuples, budget {budget}")
        q = _noise_pattern_weights(k, R, params.rho)
        pts = points(n, R)
        # every k-tuple of query points, weight = prod over coordinates of q
        tuple_idx = np.indices((R**n,) * k).reshape(k, -1).T
        xs = pts[tuple_idx]  # (T, k, n)
        coord_rows = point_index(np.transpose(xs, (0, 2, 1)), R)  # (T, n) row index into q
        xw = np.prod(q[coord_rows], axis=1)
        for v in range(game.V):
            for picks in itertools.product(inc[v], repeat=k):
                var_ids = np.empty((xs.shape[0], k), dtype=np.int64)
                shifts = np.empty((xs.shape[0], k), dtype=np.int64)
                for t, e in enumerate(picks):
                    var_ids[:, t], shifts[:, t] = _query_vars(game, inv, e, xs[:, t, :], R)
                base = 1.0 / (game.V * D**k)
                for row in np.flatnonzero(xw > 0):
                    builder.add(base * xw[row], var_ids[row].tolist(), shifts[row].tolist())
    else:
        rng = rng_for(seed)
        m = params.samples
        v = rng.integers(0, game.V, size=m)
        picks = inc[v[:, None], rng.integers(0, D, size=(m, k))]
        z = rng.integers(0, R, size=(m, n))
        keep = rng.random((m, k, n)) < params.rho
        fresh = rng.integers(0, R, size=(m, k, n))
        x = np.where(keep, z[:, None, :], fresh)
        var_ids, shifts = _query_vars(game, inv, picks, x, R)
        for row in range(m):
            builder.add(1.0 / m, var_ids[row].tolist(), shifts[row].tolist())
    return builder.build(n_vars)


# --------------------------------------------------------------------------
# verifier acceptance
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Acceptance:
    probability: float
    stderr: float = 0.0
    per_vertex: tuple[float, ...] = field(default=(), repr=False)


def vertex_projections(game: Game, proof: Proof, v: int, inc=None, inv=None, folded=None) -> list[fourier.TableFunction]:
    """``g^i_v(x) = E_{w~v}[1{h_w(x o pi_{w,v}) = i}]`` for every i."""
    inc = game.incident() if inc is None else inc
    inv = _inverse_maps(game) if inv is None else inv
    folded = [folded_table(proof, w) for w in range(game.W)] if folded is None else folded
    n, R = game.N, proof.R
    counts = np.zeros((R, R**n))
    cols = np.arange(R**n)
    for e in inc[v]:
        vals = permute_table(folded[game.edges[e][1]], n, R, inv[e])
        counts[vals, cols] += 1
    return [fourier.TableFunction(n, R, row / len(inc[v])) for row in counts]


def verifier_acceptance(
    game: Game,
    params: PcpParams,
    proof: Proof,
    mode: str = "exact",
    trials: int = 10**5,
    seed: int = 0,
    workers: int = 1,
    budget: int = 10**6,
) -> Acceptance:
    """Acceptance probability of the k-query verifier on ``proof``.

    ``exact`` averages ``sum_i E_z[(T_rho g^i_v)(z)^k]`` over v; ``mc``
    simulates ``trials`` verifier runs (chunk j uses stream ``(seed, j)``).
    """
    _check_pcp_inputs(game, proof, params.R)
    D = game.v_degree()
    n, R, k = game.N, params.R, params.k
    inv = _inverse_maps(game)
    folded = [folded_table(proof, w) for w in range(game.W)]
    if mode == "exact":
        if R**n > budget:
            raise BudgetError(f"R^n = {R ** n} exceeds exact-enumeration budget {budget}")
        inc = game.incident()
        per_v = [
            projection_power_sum(vertex_projections(game, proof, v, inc, inv, folded), params.rho, k)
            for v in range(game.V)
        ]
        return Acceptance(math.fsum(per_v) / game.V, 0.0, tuple(per_v))
    if mode != "mc":
        raise ValidationError(f"mode must be 'exact' or 'mc', got {mode!r}")
    inc = np.array(game.incident(), dtype=np.int64)
    folded_arr = np.stack(folded)
    edge_w = game.edge_w

    def chunk(j, size):
        rng = rng_for(seed, j)
        v = rng.integers(0, game.V, size=size)
        picks = inc[v[:, None], rng.integers(0, D, size=(size, k))]
        z = rng.integers(0, R, size=(size, n))
        keep = rng.random((size, k, n)) < params.rho
        fresh = rng.integers(0, R, size=(size, k, n))
        return kernels.verifier_accepts(folded_arr, n, R, edge_w, inv, picks, z, keep, fresh)

    accepted = sum(map_chunks(chunk, trials, workers))
    p = accepted / trials
    return Acceptance(p, math.sqrt(p * (1 - p) / trials))


# --------------------------------------------------------------------------
# decoding
# --------------------------------------------------------------------------

def candidate_labels(proof: Proof, w: int, d: int, log_delta: float) -> list[int]:
    """``{j : Inf_j^{<=d}[h^i_w] >= delta/2 for some i}`` on the folded table."""
    h = RFunction(proof.n, proof.R, folded_table(proof, w))
    half = log_delta - math.log(2)
    cand = set()
    for i in range(proof.R):
        infl = fourier.influences(fourier.transform(h.projection(i)), d)
        cand.update(j for j in range(proof.n) if exceeds(float(infl[j]), half, strict=False))
    return sorted(cand)


def vertex_labels(game: Game, params: PcpParams, proof: Proof) -> list[int | None]:
    """First ``(i, j)`` in lexicographic order with ``Inf_j^{<=d}[g^i_v] > delta``."""
    _check_pcp_inputs(game, proof, params.R)
    inc, inv = game.incident(), _inverse_maps(game)
    folded = [folded_table(proof, w) for w in range(game.W)]
    out = []
    for v in range(game.V):
        label = None
        for g in vertex_projections(game, proof, v, inc, inv, folded):
            infl = fourier.influences(fourier.transform(g), params.d)
            hits = [j for j in range(game.N) if exceeds(float(infl[j]), params.log_delta)]
            if hits:
                label = hits[0]
                break
        out.append(label)
    return out


def influence_decode(game: Game, params: PcpParams, proof: Proof, seed: int = 0) -> GameAssignment:
    """Label left vertices by a high-influence coordinate and right vertices
    uniformly from their candidate sets; uniform labels wherever those are empty."""
    rng = rng_for(seed)
    v_labels = [
        lab if lab is not None else int(rng.integers(0, game.N))
        for lab in vertex_labels(game, params, proof)
    ]
    w_labels = []
    for w in range(game.W):
        cand = candidate_labels(proof, w, params.d, params.log_delta)
        w_labels.append(int(cand[rng.integers(0, len(cand))]) if cand else int(rng.integers(0, game.N)))
    return GameAssignment(v_labels, w_labels)
