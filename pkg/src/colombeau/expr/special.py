"""Native evaluators for the bump and cutoff primitives and their derivatives.

The k-th derivative of bump(t) = exp(1/(t^2-1)) is R_k(t)*bump(t) with a
rational prefactor R_k = P_k / (t^2-1)^(2k).  The integer-coefficient
polynomials P_k satisfy

    P_{k+1} = P_k' * D^2 - 2 t P_k (2k D + 1),      D = t^2 - 1,

which we tabulate once per order.  Because every derivative keeps an explicit
bump factor, values on and outside |t| >= 1 are exactly zero -- the rational
prefactor is never evaluated there.

Cutoff derivatives are obtained by truncated-Taylor (jet) propagation through
the closed form B(2-|t|)/(B(2-|t|)+B(|t|-1)) on the transition band
1 < |t| < 2; the function is identically 1 / 0 (all derivatives zero) on the
plateau / outside the support, including at the seam points |t| = 1, 2.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "bump_deriv_values",
    "cutoff_deriv_values",
    "bump_poly",
    "psi_normalisation_1d",
]

# ---------------------------------------------------------------------------
# bump
# ---------------------------------------------------------------------------

_D = np.array([-1.0, 0.0, 1.0])  # t^2 - 1 in ascending coefficients
_D2 = np.polynomial.polynomial.polymul(_D, _D)
_BUMP_POLYS: list[np.ndarray] = [np.array([1.0])]


def bump_poly(k: int) -> np.ndarray:
    """Ascending coefficients of P_k in d^k bump = P_k/(t^2-1)^(2k) * bump."""
    pp = np.polynomial.polynomial
    while len(_BUMP_POLYS) <= k:
        m = len(_BUMP_POLYS) - 1
        Pm = _BUMP_POLYS[-1]
        term1 = pp.polymul(pp.polyder(Pm), _D2)
        inner = pp.polyadd(pp.polymul(np.array([2.0 * m]), _D), np.array([1.0]))
        term2 = pp.polymul(np.array([0.0, -2.0]), pp.polymul(Pm, inner))
        _BUMP_POLYS.append(pp.polyadd(term1, term2))
    return _BUMP_POLYS[k]


def bump_deriv_values(order: int, t: np.ndarray) -> np.ndarray:
    """Vectorised d^order/dt^order of the unit bump, zero outside |t|<1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    if not np.any(inside):
        return out
    ti = t[inside]
    Di = ti * ti - 1.0
    core = np.exp(1.0 / Di)
    if order == 0:
        out[inside] = core
        return out
    P = bump_poly(order)
    out[inside] = np.polynomial.polynomial.polyval(ti, P) / Di ** (2 * order) * core
    return out


def psi_normalisation_1d(Q: int = 128) -> float:
    """1 / integral of the unit bump, via a Gauss-Legendre rule of order Q."""
    x, w = np.polynomial.legendre.leggauss(Q)
    return float(1.0 / np.sum(w * bump_deriv_values(0, x)))


# ---------------------------------------------------------------------------
# cutoff via jets
# ---------------------------------------------------------------------------

def _jet_recip(a: np.ndarray) -> np.ndarray:
    # reciprocal of a truncated power series; a has shape (K+1, n)
    K = a.shape[0] - 1
    r = np.zeros_like(a)
    r[0] = 1.0 / a[0]
    for k in range(1, K + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += a[j] * r[k - j]
        r[k] = -acc * r[0]
    return r


def _jet_exp(a: np.ndarray) -> np.ndarray:
    K = a.shape[0] - 1
    e = np.zeros_like(a)
    e[0] = np.exp(a[0])
    for k in range(1, K + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += j * a[j] * e[k - j]
        e[k] = acc / k
    return e


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K = a.shape[0] - 1
    c = np.zeros_like(a)
    for k in range(K + 1):
        acc = np.zeros_like(a[0])
        for j in range(k + 1):
            acc += a[j] * b[k - j]
        c[k] = acc
    return c


def _cutoff_band_jets(s: np.ndarray, order: int) -> np.ndarray:
    """All derivatives 0..order of the cutoff at points s in (1, 2)."""
    K = order
    shape = (K + 1, s.size)
    j_u = np.zeros(shape)  # series of 2 - s
    j_u[0] = 2.0 - s
    if K >= 1:
        j_u[1] = -1.0
    j_v = np.zeros(shape)  # series of s - 1
    j_v[0] = s - 1.0
    if K >= 1:
        j_v[1] = 1.0
    b_hi = _jet_exp(-_jet_recip(j_u))  # B(2-s)
    b_lo = _jet_exp(-_jet_recip(j_v))  # B(s-1)
    jets = _jet_mul(b_hi, _jet_recip(b_hi + b_lo))
    # derivative = k! * series coefficient
    fact = 1.0
    for k in range(1, K + 1):
        fact *= k
        jets[k] *= fact
    return jets


def cutoff_deriv_values(order: int, t: np.ndarray) -> np.ndarray:
    """Vectorised d^order/dt^order of the plateau cutoff."""
    t = np.asarray(t, dtype=float)
    s = np.abs(t)
    out = np.zeros_like(t)
    if order == 0:
        out[s <= 1.0] = 1.0
    band = (s > 1.0) & (s < 2.0)
    if np.any(band):
        jets = _cutoff_band_jets(s[band], order)
        vals = jets[order]
        if order % 2 == 1:
            vals = vals * np.sign(t[band])  # chain rule through |t|
        out[band] = vals
    return out
