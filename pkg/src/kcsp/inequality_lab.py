"""Exact numerical checks of the analytic inequalities behind the hardness proof.

Everything here is computed by full enumeration: boolean functions on at
most 2^12 points, boolean analogs on at most 2^20, [R]^n tables within the
caller's budget. Reports carry both sides of each inequality and their
margin ``rhs - lhs``; negative margins are recorded, never clipped.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from kcsp import fourier
from kcsp.dictator_test import exceeds
from kcsp.errors import BudgetError, HypothesisUnmet, ValidationError

HYPER_MAX_VARS = 12
INVARIANCE_MAX_NR = 20
REL_TOL = 1e-12
CSV_HEADER = ("check", "params", "lhs", "rhs", "margin", "aux")


@dataclass(frozen=True)
class PsiFunction:
    kind: str  # "abs" or "clamp"
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("abs", "clamp"):
            raise ValidationError(f"psi kind must be 'abs' or 'clamp', got {self.kind!r}")
        if self.kind == "clamp" and self.k < 1:
            raise ValidationError(f"psi_k needs k >= 1, got {self.k}")

    @classmethod
    def parse(cls, text: str) -> "PsiFunction":
        """``"psi1"`` or ``"psiK"`` for an integer K >= 2."""
        if text == "psi1":
            return cls("abs")
        if text.startswith("psi") and text[3:].isdigit():
            return cls("clamp", int(text[3:]))
        raise ValidationError(f"unknown psi function {text!r}")

    @property
    def name(self) -> str:
        return "psi1" if self.kind == "abs" else f"psi{self.k}"

    @property
    def lipschitz(self) -> int:
        return 1 if self.kind == "abs" else self.k


def psi_eval(psi: PsiFunction, t):
    t = np.asarray(t, dtype=np.float64)
    if psi.kind == "abs":
        out = np.abs(t)
    else:
        out = np.where(t < 0, 0.0, np.where(t >= 1, 1.0, np.clip(t, 0.0, 1.0) ** psi.k))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class InequalityReport:
    check: str
    lhs: float | None
    rhs: float | None
    margin: float | None
    params: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)
    certified: bool = False  # True when a theorem guarantees margin >= 0
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "params": self.params,
            "aux": self.aux,
            "certified": self.certified,
            "status": self.status,
        }

    def to_row(self) -> list:
        return [
            self.check,
            json.dumps(self.params, sort_keys=True),
            repr(self.lhs),
            repr(self.rhs),
            repr(self.margin),
            json.dumps({**self.aux, "status": self.status}, sort_keys=True),
        ]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow(r.to_row())
    return buf.getvalue()


# --------------------------------------------------------------------------
# hypercontractivity on the cube
# --------------------------------------------------------------------------

def _as_cube_function(h) -> fourier.TableFunction:
    if isinstance(h, fourier.TableFunction):
        if h.R != 2:
            raise ValidationError(f"boolean function expected (R = 2), got R = {h.R}")
        return h
    arr = np.asarray(h, dtype=np.float64).ravel()
    m = arr.size.bit_length() - 1
    if arr.size != 1 << m:
        raise ValidationError(f"cube table length {arr.size} is not a power of two")
    return fourier.TableFunction(m, 2, arr)


def _within(value: float, bound: float) -> bool:
    return value <= bound * (1 + REL_TOL) + REL_TOL


def hypercontractive_rho(p: float, q: float) -> float:
    """``sqrt((p-1)/(q-1))``, or 1 when ``p = q``."""
    if p == q:
        return 1.0
    return math.sqrt((p - 1) / (q - 1))


def norm_sides(h, p: float, q: float, rho: float) -> tuple[float, float]:
    """``(||T_rho h||_q, ||h||_p)`` with no hypothesis checks."""
    f = _as_cube_function(h)
    rep = fourier.transform(f)
    # scale coefficients directly so rho > 1 is evaluated literally
    noisy = fourier.inverse_transform(rep._replace(rep.coeffs * rho ** fourier.degrees(f.n, 2)))
    return fourier.p_norm(noisy, q), fourier.p_norm(f, p)


def hypercontractivity_margin(h, p: float, q: float, rho: float) -> InequalityReport:
    """Compare ``||T_rho h||_q`` with ``||h||_p`` on {+-1}^m.

    ``h`` is a ``TableFunction`` with ``R = 2`` or a flat table of length
    ``2^m``. The hypothesis ``1 <= p <= q``, ``rho <= sqrt((p-1)/(q-1))``
    is a precondition.
    """
    f = _as_cube_function(h)
    if f.n > HYPER_MAX_VARS:
        raise BudgetError(f"cube dimension {f.n} exceeds {HYPER_MAX_VARS}")
    if not 1 <= p <= q:
        raise HypothesisUnmet(f"need 1 <= p <= q, got p={p}, q={q}")
    if not 0 <= rho or not _within(rho, hypercontractive_rho(p, q)):
        raise HypothesisUnmet(f"rho={rho} exceeds sqrt((p-1)/(q-1)) = {hypercontractive_rho(p, q)}")
    lhs, rhs = norm_sides(f, p, q, rho)
    return InequalityReport(
        "hypercontractivity", lhs, rhs, rhs - lhs, {"p": p, "q": q, "rho": rho, "m": f.n}, certified=True
    )


def k_vs_one_plus_eps(G: fourier.BooleanRep, k: int, rho: float) -> InequalityReport:
    """``||T_{2 rho} G||_k`` against ``||G||_{1+eps}`` with ``eps = 4 / ln R``.

    Two regimes are certified. If ``1 + eps <= k`` the hypercontractive
    hypothesis ``2 rho <= sqrt(eps/(k-1))`` is required. If ``1 + eps > k``
    the inequality still holds whenever ``2 rho <= 1``, because ``T_{2 rho}``
    is then a contraction in every norm and norms grow with the exponent.
    Otherwise the report has status ``"hypothesis unmet"`` and no margin.
    """
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")
    eps = 4.0 / math.log(G.R)
    p = 1.0 + eps
    if p <= k:
        regime = "hypercontractive" if _within(2 * rho, math.sqrt(eps / (k - 1))) else None
    else:
        regime = "contractive" if _within(2 * rho, 1.0) else None
    params = {"k": k, "rho": rho, "R": G.R, "n": G.n, "eps": eps, "p": p}
    if regime is None:
        return InequalityReport(
            "k_vs_one_plus_eps", None, None, None, params,
            {"two_rho": 2 * rho, "hyper_limit": math.sqrt(eps / (k - 1))}, status="hypothesis unmet",
        )
    table = G.table()
    lhs = fourier.cube_norm(fourier.boolean_noise(G, 2 * rho).table(), k)
    rhs = fourier.cube_norm(table, p)
    return InequalityReport(
        "k_vs_one_plus_eps", lhs, rhs, rhs - lhs, params, {"regime": regime}, certified=True
    )


# --------------------------------------------------------------------------
# invariance gap
# --------------------------------------------------------------------------

def invariance_gap(f: fourier.TableFunction, d: int, psi: PsiFunction, budget: int = 10**6) -> InequalityReport:
    """``|E_y[psi(F^{<=d}(y))] - E_x[psi(f^{<=d}(x))]|`` by full enumeration.

    ``lhs`` is the boolean-side expectation, ``rhs`` the [R]^n side and
    ``margin`` their absolute difference (no threshold is implied).
    """
    if f.n * f.R > INVARIANCE_MAX_NR:
        raise BudgetError(f"nR = {f.n * f.R} exceeds {INVARIANCE_MAX_NR}")
    if f.values.size > budget:
        raise BudgetError(f"R^n = {f.values.size} exceeds budget {budget}")
    low = fourier.truncate(fourier.transform(f), d)
    cube_side = fourier.exact_mean(psi_eval(psi, fourier.boolean_analog(low).table()))
    grid_side = fourier.exact_mean(psi_eval(psi, fourier.inverse_transform(low).values))
    max_inf = float(np.max(fourier.influences(fourier.transform(f), d)))
    gap = abs(cube_side - grid_side)
    return InequalityReport(
        "invariance_gap", cube_side, grid_side, gap,
        {"n": f.n, "R": f.R, "d": d, "psi": psi.name}, {"max_influence": max_inf},
    )


# --------------------------------------------------------------------------
# main lemma quantities
# --------------------------------------------------------------------------

def main_lemma_report(
    g: fourier.TableFunction,
    k: int,
    rho: float,
    d: int,
    log_delta: float,
    budget: int = 10**6,
) -> InequalityReport:
    """``E[(T_rho g)^k]`` against the scale ``1/R^k`` plus the intermediate quantities.

    ``aux`` holds the implied constant ``lhs * R^k``, the largest degree-d
    influence, ``||T_rho g^{>d}||_2^2`` with its bound ``rho^(2d) ||g||_2^2``,
    ``E|T_{1/2} g^{<=d}|``, ``E[(T_{1/2} g^{<=d})^2]`` and ``E[(T_{1/2} g)^2]``.
    """
    if g.values.size > budget:
        raise BudgetError(f"R^n = {g.values.size} exceeds budget {budget}")
    R = g.R
    if g.values.min() < -REL_TOL or g.values.max() > 1 + REL_TOL:
        raise ValidationError("g must take values in [0, 1]")
    mean = fourier.exact_mean(g.values)
    if abs(mean - 1.0 / R) > 1e-9:
        raise ValidationError(f"E[g] = {mean!r}, expected 1/R = {1.0 / R!r}")
    rep = fourier.transform(g)
    lhs = fourier.exact_mean(fourier.inverse_transform(fourier.apply_noise(rep, rho)).values ** k)
    scale = 1.0 / R**k
    infl = fourier.influences(rep, d)
    high = fourier.sum_squares(fourier.apply_noise(fourier.truncate(rep, d, "high"), rho))
    half_low = fourier.inverse_transform(fourier.apply_noise(fourier.truncate(rep, d), 0.5)).values
    half = fourier.apply_noise(rep, 0.5)
    aux = {
        "mean": mean,
        "implied_constant": lhs * R**k,
        "max_influence": float(np.max(infl)),
        "quasirandom": not exceeds(float(np.max(infl)), log_delta),
        "high_noise_mass": high,
        "high_noise_bound": rho ** (2 * d) * fourier.sum_squares(rep),
        "l1_half_low": fourier.exact_mean(np.abs(half_low)),
        "l2_half_low": fourier.exact_mean(half_low**2),
        "l2_half": fourier.sum_squares(half),
    }
    params = {"k": k, "rho": rho, "d": d, "log_delta": log_delta, "R": R, "n": g.n}
    return InequalityReport("main_lemma", lhs, scale, scale - lhs, params, aux)


def random_bounded_mean(n: int, R: int, seed) -> fourier.TableFunction:
    """Random ``g : [R]^n -> [0, 1]`` with ``E[g] = 1/R``.

    A uniform table is rescaled to mean 1/R; if that pushes a value above 1
    the table is mixed with the constant 1/R just enough to fit.
    """
    u = fourier.TableFunction.random(n, R, seed).values
    g = u * ((1.0 / R) / fourier.exact_mean(u))
    top = g.max()
    if top > 1.0:
        t = (1.0 - 1.0 / R) / (top - 1.0 / R)
        g = (1 - t) / R + t * g
    return fourier.TableFunction(n, R, np.clip(g, 0.0, 1.0))
