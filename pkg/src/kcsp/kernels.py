"""Hot inner loops.

Each kernel exists twice: an explicit loop compiled with numba, and a
vectorised numpy version. ``_accel.USE_NUMBA`` picks which one the public
names bind to. The two are kept operation-for-operation equivalent so that
they return identical floats, which the test-suite checks.

Conventions shared by all kernels:

* points of [R]^n are row-major indices, coordinate 0 most significant;
* CSP constraints are packed as ``weights (m,)``, ``scopes (m, kmax)``
  (padded with -1), ``arities (m,)``, ``offsets (m,)`` into the flat 0/1
  array ``preds``.
"""
import numpy as np

from kcsp import _accel


# --------------------------------------------------------------------------
# CSP evaluation
# --------------------------------------------------------------------------

def _csp_values_batch_loop(assign, R, weights, scopes, arities, offsets, preds):
    T = assign.shape[0]
    m = weights.shape[0]
    out = np.zeros(T, dtype=np.float64)
    for t in range(T):
        val = 0.0
        for c in range(m):
            row = 0
            for p in range(arities[c]):
                row = row * R + assign[t, scopes[c, p]]
            val += weights[c] * preds[offsets[c] + row]
        out[t] = val
    return out


def _csp_values_range_loop(start, count, n, R, weights, scopes, arities, offsets, preds):
    m = weights.shape[0]
    out = np.zeros(count, dtype=np.float64)
    digits = np.zeros(n, dtype=np.int64)
    for t in range(count):
        a = start + t
        for i in range(n - 1, -1, -1):
            digits[i] = a % R
            a //= R
        val = 0.0
        for c in range(m):
            row = 0
            for p in range(arities[c]):
                row = row * R + digits[scopes[c, p]]
            val += weights[c] * preds[offsets[c] + row]
        out[t] = val
    return out


def _csp_values_batch_np(assign, R, weights, scopes, arities, offsets, preds):
    out = np.zeros(assign.shape[0], dtype=np.float64)
    for c in range(weights.shape[0]):
        row = np.zeros(assign.shape[0], dtype=np.int64)
        for p in range(arities[c]):
            row = row * R + assign[:, scopes[c, p]]
        out += weights[c] * preds[offsets[c] + row]
    return out


def index_digits(indices, n, R):
    """Row-major digits of point indices, shape ``(len(indices), n)``."""
    indices = np.asarray(indices, dtype=np.int64)
    powers = R ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % R


def _csp_values_range_np(start, count, n, R, weights, scopes, arities, offsets, preds):
    assign = index_digits(np.arange(start, start + count, dtype=np.int64), n, R)
    return _csp_values_batch_np(assign, R, weights, scopes, arities, offsets, preds)


# --------------------------------------------------------------------------
# Walsh-Hadamard transform (unnormalised, natural order)
# --------------------------------------------------------------------------

def _fwht_loop(a):
    out = a.copy()
    size = out.shape[0]
    h = 1
    while h < size:
        for start in range(0, size, 2 * h):
            for j in range(start, start + h):
                x = out[j]
                y = out[j + h]
                out[j] = x + y
                out[j + h] = x - y
        h *= 2
    return out


def _fwht_np(a):
    out = np.array(a, dtype=np.float64, copy=True)
    size = out.shape[0]
    h = 1
    while h < size:
        blocks = out.reshape(-1, 2, h)
        x = blocks[:, 0, :].copy()
        y = blocks[:, 1, :]
        blocks[:, 0, :] = x + y
        blocks[:, 1, :] = x - y
        h *= 2
    return out


# --------------------------------------------------------------------------
# Dictator test: count accepting trials
# --------------------------------------------------------------------------

def _dictator_accepts_loop(table, n, R, z, keep, fresh, shifts):
    T = z.shape[0]
    k = shifts.shape[1]
    accepted = 0
    for t in range(T):
        first = -1
        ok = True
        for q in range(k):
            c = shifts[t, q]
            idx = 0
            for i in range(n):
                x = z[t, i] if keep[t, q, i] else fresh[t, q, i]
                idx = idx * R + (x + c) % R
            ans = (table[idx] - c) % R
            if q == 0:
                first = ans
            elif ans != first:
                ok = False
                break
        if ok:
            accepted += 1
    return accepted


def _dictator_accepts_np(table, n, R, z, keep, fresh, shifts):
    x = np.where(keep, z[:, None, :], fresh)
    y = (x + shifts[:, :, None]) % R
    powers = R ** np.arange(n - 1, -1, -1, dtype=np.int64)
    idx = (y * powers).sum(axis=2)
    ans = (table[idx] - shifts) % R
    return int(np.all(ans == ans[:, :1], axis=1).sum())


# --------------------------------------------------------------------------
# PCP verifier: count accepting trials
# --------------------------------------------------------------------------

def _verifier_accepts_loop(folded, n, R, edge_w, edge_perm, picks, z, keep, fresh):
    # query q of trial t reads h_w(x o pi) with (x o pi)_i = x_{pi(i)}
    T = z.shape[0]
    k = picks.shape[1]
    accepted = 0
    for t in range(T):
        first = -1
        ok = True
        for q in range(k):
            e = picks[t, q]
            idx = 0
            for i in range(n):
                src = edge_perm[e, i]
                x = z[t, src] if keep[t, q, src] else fresh[t, q, src]
                idx = idx * R + x
            ans = folded[edge_w[e], idx]
            if q == 0:
                first = ans
            elif ans != first:
                ok = False
                break
        if ok:
            accepted += 1
    return accepted


def _verifier_accepts_np(folded, n, R, edge_w, edge_perm, picks, z, keep, fresh):
    x = np.where(keep, z[:, None, :], fresh)
    perm = edge_perm[picks]
    u = np.take_along_axis(x, perm, axis=2)
    powers = R ** np.arange(n - 1, -1, -1, dtype=np.int64)
    idx = (u * powers).sum(axis=2)
    ans = folded[edge_w[picks], idx]
    return int(np.all(ans == ans[:, :1], axis=1).sum())


numpy_impl = {
    "csp_values_batch": _csp_values_batch_np,
    "csp_values_range": _csp_values_range_np,
    "fwht": _fwht_np,
    "dictator_accepts": _dictator_accepts_np,
    "verifier_accepts": _verifier_accepts_np,
}

if _accel.USE_NUMBA or _accel.numba is not None:
    numba_impl = {
        "csp_values_batch": _accel.njit(_csp_values_batch_loop),
        "csp_values_range": _accel.njit(_csp_values_range_loop),
        "fwht": _accel.njit(_fwht_loop),
        "dictator_accepts": _accel.njit(_dictator_accepts_loop),
        "verifier_accepts": _accel.njit(_verifier_accepts_loop),
    }
else:  # pragma: no cover
    numba_impl = None

_active = numba_impl if _accel.USE_NUMBA else numpy_impl

csp_values_batch = _active["csp_values_batch"]
csp_values_range = _active["csp_values_range"]
fwht = _active["fwht"]
dictator_accepts = _active["dictator_accepts"]
verifier_accepts = _active["verifier_accepts"]
