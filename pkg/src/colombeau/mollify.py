"""Mollification by the normalized radial bump and the density experiments.

The mollifier is psi(x) = c_d * exp(1/(|x|^2 - 1)) inside the open unit ball
and 0 outside.  All integrals use a tensor Gauss-Legendre rule of fixed order
Q per axis on [-1,1]^d; c_d is the reciprocal of that same rule applied to
the unnormalized bump, so the discrete rule integrates psi to 1 exactly (up
to round-off) and constant nets are reproduced exactly.

Convolution is computed after the substitution t = eps^n s, which keeps the
node count independent of eps:

    (u star psi_{eps^n})(x) = sum_q w_q psi(s_q) u(x - eps^n s_q).

Derivatives fall on u for evaluation (the exact symbolic path).  For the
growth-bound check they fall on psi instead -- u star d^alpha(psi_{eps^n}) --
and the agreement of the two routes is itself a test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .nets import (
    CompactBox,
    DEFAULT_SAMPLING,
    DifferenceNet,
    FunctionNet,
    NetError,
    Sampling,
    SharpSeminorm,
    enlarge,
    seminorm,
    seminorm_table,
    sharp_seminorm,
)
from .scale import EpsGrid, default_grid, estimate_valuation

DEFAULT_QUAD_ORDER = 32
DEFAULT_N_LIST = (1, 2, 3, 4)
DEFAULT_ENLARGEMENT = 0.5
# A difference is numerically null when it stays this far (in ln) below the
# base net's own magnitude; quadrature-weight round-off sits near 1e-16.
LN_NUMERICALLY_NULL = math.log(1e-10)

# Grid for difference-net valuation fits.  The difference u*psi - u shrinks
# like eps^(2(n-1)) relative to u, so on the steep default grid it falls
# below float64 cancellation noise for n >= 3; a gentler ratio keeps every
# fitted window well above round-off while still spanning two decades.
CONVERGENCE_GRID = EpsGrid(0.5, 0.8, 20)


# ---------------------------------------------------------------------------
# mollifier construction
# ---------------------------------------------------------------------------


def _ball_bump(r2: np.ndarray) -> np.ndarray:
    """exp(1/(r^2-1)) inside the open unit ball, 0 outside (unnormalized)."""
    r2 = np.asarray(r2, dtype=float)
    out = np.zeros(r2.shape)
    inside = r2 < 1.0
    if inside.any():
        out[inside] = np.exp(1.0 / (r2[inside] - 1.0))
    return out


# d^alpha exp(1/D) = exp(1/D) * P_alpha(x) / D^(2|alpha|) with D = |x|^2 - 1.
# P grows by P_{alpha+e_i} = dP/dx_i * D^2 - 2 x_i P (2|alpha| D + 1); the
# polynomials are kept as {exponent tuple: coefficient} dicts.
_Poly = dict[tuple[int, ...], float]


def _p_add(a: _Poly, b: _Poly) -> _Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0.0) + c
        if out[e] == 0.0:
            del out[e]
    return out


def _p_scale(a: _Poly, s: float) -> _Poly:
    return {e: c * s for e, c in a.items()} if s != 0.0 else {}


def _p_mul(a: _Poly, b: _Poly) -> _Poly:
    out: _Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0.0) + ca * cb
    return {e: c for e, c in out.items() if c != 0.0}


def _p_diff(a: _Poly, i: int) -> _Poly:
    out: _Poly = {}
    for e, c in a.items():
        if e[i] == 0:
            continue
        de = tuple(x - 1 if j == i else x for j, x in enumerate(e))
        out[de] = out.get(de, 0.0) + c * e[i]
    return out


def _p_eval(a: _Poly, points: np.ndarray) -> np.ndarray:
    acc = np.zeros(points.shape[1])
    for e, c in a.items():
        term = np.full(points.shape[1], c)
        for i, p in enumerate(e):
            if p:
                term = term * points[i] ** p
        acc += term
    return acc


_PSI_POLYS: dict[tuple[int, tuple[int, ...]], _Poly] = {}


def _psi_poly(d: int, alpha: tuple[int, ...]) -> _Poly:
    key = (d, alpha)
    cached = _PSI_POLYS.get(key)
    if cached is not None:
        return cached
    zero = tuple([0] * d)
    if alpha == zero:
        poly: _Poly = {zero: 1.0}
    else:
        i = next(j for j, a in enumerate(alpha) if a > 0)
        prev = tuple(a - 1 if j == i else a for j, a in enumerate(alpha))
        P = _psi_poly(d, prev)
        k = sum(prev)
        D: _Poly = {zero: -1.0}
        for j in range(d):
            D = _p_add(D, {tuple(2 if l == j else 0 for l in range(d)): 1.0})
        xi: _Poly = {tuple(1 if l == i else 0 for l in range(d)): 1.0}
        term1 = _p_mul(_p_diff(P, i), _p_mul(D, D))
        bracket = _p_add(_p_scale(D, 2.0 * k), {zero: 1.0})
        term2 = _p_scale(_p_mul(_p_mul(xi, P), bracket), -2.0)
        poly = _p_add(term1, term2)
    _PSI_POLYS[key] = poly
    return poly


@dataclass(frozen=True, eq=False)
class Mollifier:
    """Normalized bump with its tensor Gauss-Legendre rule (order Q/axis)."""

    dimension: int
    order: int
    c: float
    nodes: np.ndarray  # (d, M) tensor nodes in fixed lexicographic order
    weights: np.ndarray  # (M,) tensor weight products (rule only, no psi)
    core_weights: np.ndarray  # (M,) weights * psi(nodes); sums to 1

    @property
    def abs_integral(self) -> float:
        return float(np.sum(np.abs(self.core_weights)))

    def integral(self) -> float:
        """Re-integrate psi with the mollifier's own rule."""
        return float(np.sum(self.core_weights))

    def psi(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] != self.dimension:
            raise NetError("points must have shape (d, N)")
        return self.c * _ball_bump((points**2).sum(axis=0))

    def psi_deriv(self, alpha: Sequence[int], points: np.ndarray) -> np.ndarray:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dimension or any(a < 0 for a in alpha):
            raise NetError("bad multi-index")
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] != self.dimension:
            raise NetError("points must have shape (d, N)")
        k = sum(alpha)
        r2 = (points**2).sum(axis=0)
        out = np.zeros(points.shape[1])
        inside = r2 < 1.0
        if not inside.any():
            return out
        D = r2[inside] - 1.0
        core = self.c * np.exp(1.0 / D)
        if k == 0:
            out[inside] = core
            return out
        P = _p_eval(_psi_poly(self.dimension, alpha), points[:, inside])
        out[inside] = core * P / D ** (2 * k)
        return out


def build_mollifier(d: int = 1, Q: int = DEFAULT_QUAD_ORDER) -> Mollifier:
    if not 1 <= d <= 3:
        raise NetError("mollifier dimension must be 1, 2 or 3")
    if Q < 16:
        raise NetError("quadrature order must be at least 16")
    x, w = np.polynomial.legendre.leggauss(Q)
    if not (np.isfinite(x).all() and np.isfinite(w).all()):
        raise NetError("quadrature rule returned non-finite nodes")
    grids = np.meshgrid(*([x] * d), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids])
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    weights = np.ones(nodes.shape[1])
    for g in wgrids:
        weights = weights * g.ravel()
    raw = weights * _ball_bump((nodes**2).sum(axis=0))
    total = float(np.sum(raw))
    if not (total > 0.0 and math.isfinite(total)):
        raise NetError("bump quadrature failed")
    c = 1.0 / total
    return Mollifier(d, Q, c, nodes, weights, c * raw)


_DEFAULT_MOLLIFIERS: dict[int, Mollifier] = {}


def _default_mollifier(d: int) -> Mollifier:
    m = _DEFAULT_MOLLIFIERS.get(d)
    if m is None:
        m = build_mollifier(d)
        _DEFAULT_MOLLIFIERS[d] = m
    return m


# ---------------------------------------------------------------------------
# mollified nets
# ---------------------------------------------------------------------------

_EVAL_CHUNK = 1 << 21


class MollifiedNet(FunctionNet):
    """u_eps star psi_{eps^n}; derivatives fall on the base net."""

    def __init__(self, base: FunctionNet, n: int, mollifier: Mollifier, name: str = ""):
        if base.dimension != mollifier.dimension:
            raise NetError("mollifier dimension must match the net")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise NetError("mollification order n must be a positive integer")
        if base.oscillation_hint > n:
            # The substitution t = eps^n s maps base features of size eps^m to
            # s-features of size eps^(m-n); for m > n no fixed-order rule can
            # resolve them on the whole grid.
            raise NetError(
                "base oscillation hint exceeds the mollification order; "
                "a fixed quadrature order cannot resolve the integrand"
            )
        self.base = base
        self.n = n
        self.mollifier = mollifier
        self.dimension = base.dimension
        self.oscillation_hint = base.oscillation_hint
        self.support_box = None if base.support_box is None else enlarge(base.support_box, 1.0)
        self.name = name
        keep = mollifier.core_weights != 0.0
        self._nodes = mollifier.nodes[:, keep]
        self._weights = mollifier.core_weights[keep]

    def derivative_batch(self, alpha, coords, eps):
        shift = eps**self.n
        d, total = coords.shape
        m = self._nodes.shape[1]
        out = np.empty(total)
        step = max(1, _EVAL_CHUNK // m)
        for start in range(0, total, step):
            block = coords[:, start : start + step]
            shifted = block[:, :, None] - shift * self._nodes[:, None, :]
            vals = self.base.derivative_batch(alpha, shifted.reshape(d, -1), eps)
            out[start : start + block.shape[1]] = vals.reshape(-1, m) @ self._weights
        return out

    def sample_intervals(self, box, eps):
        shift = eps**self.n
        inflated = tuple((lo - shift, hi + shift) for lo, hi in box)
        inner = self.base.sample_intervals(inflated, eps)
        if inner is None:
            return None
        out = []
        for (blo, bhi), (lo, hi) in zip(box, inner):
            nlo, nhi = max(blo, lo - shift), min(bhi, hi + shift)
            if nlo > nhi:
                return None
            out.append((nlo, nhi))
        return out

    def describe(self):
        return {
            "variant": "mollified",
            "scale_power": self.n,
            "quadrature_order": self.mollifier.order,
            "base": self.base.describe(),
        }


def mollify(u: FunctionNet, n: int, mollifier: Optional[Mollifier] = None) -> MollifiedNet:
    if mollifier is None:
        mollifier = _default_mollifier(u.dimension)
    return MollifiedNet(u, n, mollifier)


class PsiRouteNet(FunctionNet):
    """Same convolution with derivatives on psi: u star d^alpha(psi_{eps^n}).

    derivative_batch(alpha, x, eps) computes
        eps^(-n|alpha|) * sum_q w_q psi^(alpha)(s_q) u_eps(x - eps^n s_q),
    which equals the mollified net's alpha-derivative up to quadrature error.
    """

    def __init__(self, base: FunctionNet, n: int, mollifier: Mollifier):
        if base.dimension != mollifier.dimension:
            raise NetError("mollifier dimension must match the net")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise NetError("mollification order n must be a positive integer")
        self.base = base
        self.n = n
        self.mollifier = mollifier
        self.dimension = base.dimension
        self.oscillation_hint = base.oscillation_hint
        self.support_box = None if base.support_box is None else enlarge(base.support_box, 1.0)
        self.name = ""
        self._weight_cache: dict[tuple[int, ...], np.ndarray] = {}

    def _route_weights(self, alpha: tuple[int, ...]) -> np.ndarray:
        w = self._weight_cache.get(alpha)
        if w is None:
            w = self.mollifier.weights * self.mollifier.psi_deriv(alpha, self.mollifier.nodes)
            self._weight_cache[alpha] = w
        return w

    def derivative_batch(self, alpha, coords, eps):
        alpha = tuple(int(a) for a in alpha)
        shift = eps**self.n
        scale = float(np.float64(eps) ** (-self.n * sum(alpha)))
        weights = self._route_weights(alpha)
        d, total = coords.shape
        m = self.mollifier.nodes.shape[1]
        out = np.empty(total)
        step = max(1, _EVAL_CHUNK // m)
        zero = tuple([0] * d)
        for start in range(0, total, step):
            block = coords[:, start : start + step]
            shifted = block[:, :, None] - shift * self.mollifier.nodes[:, None, :]
            vals = self.base.derivative_batch(zero, shifted.reshape(d, -1), eps)
            out[start : start + block.shape[1]] = (vals.reshape(-1, m) @ weights) * scale
        return out

    def sample_intervals(self, box, eps):
        return MollifiedNet.sample_intervals(self, box, eps)

    def describe(self):
        return {
            "variant": "psi-route",
            "scale_power": self.n,
            "quadrature_order": self.mollifier.order,
            "base": self.base.describe(),
        }


# ---------------------------------------------------------------------------
# cutoff device
# ---------------------------------------------------------------------------


def cutoff_net(u: FunctionNet, inner_box: CompactBox, outer_margin: float) -> FunctionNet:
    """u times per-axis plateau cutoffs: identity on inner_box, zero outside
    inner_box inflated by outer_margin.

    The plateau:support ratio of the cutoff profile is 1:2, so the margin
    must be at least each half-width of inner_box for both requirements to
    be satisfiable (radius (h+m)/2 then has plateau >= h and support h+m).
    """
    from .nets import CutoffProductNet

    if outer_margin <= 0:
        raise NetError("outer_margin must be positive")
    if len(inner_box.boxes) != 1:
        raise NetError("inner region must be a single box")
    if inner_box.dimension != u.dimension:
        raise NetError("inner box dimension mismatch")
    centers, radii = [], []
    for lo, hi in inner_box.boxes[0]:
        h = (hi - lo) / 2.0
        if outer_margin < h - 1e-12:
            raise NetError(
                f"outer_margin {outer_margin} below the inner half-width {h}; "
                "the plateau cannot cover the inner box"
            )
        centers.append((lo + hi) / 2.0)
        radii.append((h + outer_margin) / 2.0)
    return CutoffProductNet(u, centers, radii)


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceEntry:
    n: int
    v_hat: float  # fitted valuation of p_{k,K}(u star psi_{eps^n} - u)
    required: float  # n + reference - slack
    ok: bool
    stable: bool


@dataclass(frozen=True)
class ConvergenceRecord:
    k: int
    K: CompactBox
    reference: float  # fitted valuation of p_{k+1, K+r}(u)
    entries: tuple[ConvergenceEntry, ...]
    slope: float  # regression slope of v_hat against n
    all_ok: bool

    def to_csv_rows(self) -> list[tuple]:
        return [
            (e.n, e.v_hat, self.reference, e.v_hat - e.n - self.reference)
            for e in self.entries
        ]

    def to_json_dict(self) -> dict:
        def num(x):
            if x != x:
                return None
            if x == math.inf:
                return "inf"
            if x == -math.inf:
                return "-inf"
            return x

        return {
            "k": self.k,
            "K": self.K.describe(),
            "reference": num(self.reference),
            "slope": num(self.slope),
            "all_ok": self.all_ok,
            "entries": [
                {
                    "n": e.n,
                    "v_hat": num(e.v_hat),
                    "required": num(e.required),
                    "ok": e.ok,
                    "stable": e.stable,
                }
                for e in self.entries
            ],
        }


def convergence_experiment(
    u: FunctionNet,
    K: CompactBox,
    k: int,
    n_list: Sequence[int] = DEFAULT_N_LIST,
    grid: Optional[EpsGrid] = None,
    sampling: Sampling = DEFAULT_SAMPLING,
    r: float = DEFAULT_ENLARGEMENT,
    mollifier: Optional[Mollifier] = None,
    slack: float = 0.2,
) -> ConvergenceRecord:
    """Fit the valuation of u star psi_{eps^n} - u for each n and compare
    against the quantitative bound n + v(p_{k+1, K+r})."""
    n_list = tuple(n_list)
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise NetError("n_list must be strictly increasing and non-empty")
    if grid is None:
        grid = CONVERGENCE_GRID
    ref = sharp_seminorm(u, k + 1, enlarge(K, r), grid, sampling)
    v_ref = ref.estimate.value
    base_lns = None
    if v_ref == math.inf:
        # the bound demands a negligible difference, which float arithmetic
        # can only confirm down to round-off relative to u itself
        base_lns = [v for _, v in seminorm_table(u, 0, K, grid, sampling).samples()]
    entries = []
    for n in n_list:
        diff = DifferenceNet(mollify(u, n, mollifier), u)
        table = seminorm_table(diff, k, K, grid, sampling)
        est = estimate_valuation(table.samples(), log_values=True)
        required = math.inf if v_ref == math.inf else n + v_ref - slack
        if v_ref == math.inf:
            ok = all(
                ln_d == -math.inf
                or (
                    math.isfinite(ln_d)
                    and ln_d <= ln_u + LN_NUMERICALLY_NULL
                )
                for (_, ln_d), ln_u in zip(table.samples(), base_lns)
            )
        else:
            ok = est.value >= required or est.value == math.inf
        entries.append(ConvergenceEntry(n, est.value, required, ok, est.stable))
    finite = [(e.n, e.v_hat) for e in entries if math.isfinite(e.v_hat)]
    if len(finite) >= 2:
        ns, vs = zip(*finite)
        slope = float(np.polyfit(np.asarray(ns, float), np.asarray(vs, float), 1)[0])
    elif all(e.v_hat == math.inf for e in entries):
        slope = math.inf  # negligible differences at every order
    else:
        slope = math.nan
    return ConvergenceRecord(
        k, K, v_ref, tuple(entries), slope, all(e.ok for e in entries)
    )


@dataclass(frozen=True)
class BoundCheckRow:
    j: int
    eps: float
    ln_lhs: float  # ln p_{k,K}(u star psi_{eps^n}), psi-derivative route
    ln_rhs: float  # (-nk-1) ln eps + ln sup_L |u_eps|
    ok: bool


@dataclass(frozen=True)
class RegularBoundReport:
    k: int
    n: int
    rows: tuple[BoundCheckRow, ...]
    verdict: str  # 'yes' | 'no'

    @property
    def all_ok(self) -> bool:
        return self.verdict == "yes"


def regular_bound_experiment(
    u: FunctionNet,
    K: CompactBox,
    k: int,
    n: int,
    grid: Optional[EpsGrid] = None,
    sampling: Sampling = DEFAULT_SAMPLING,
    j0: int = 4,
    slack: float = 0.1,
    mollifier: Optional[Mollifier] = None,
) -> RegularBoundReport:
    """Check p_{k,K}(u star psi_{eps^n}) <= eps^(-nk-1) sup_L |u_eps| in the
    ln domain for every grid index j >= j0, derivatives placed on psi."""
    if u.support_box is None:
        raise NetError("the regular bound needs a net with a declared support_box")
    if grid is None:
        grid = default_grid()
    if mollifier is None:
        mollifier = _default_mollifier(u.dimension)
    route = PsiRouteNet(u, n, mollifier)
    L = u.support_box
    rows = []
    ok_all = True
    for j, eps in enumerate(grid.points):
        if j < j0:
            continue
        lhs = seminorm(route, k, K, eps, sampling).ln_value
        sup0 = seminorm(u, 0, L, eps, sampling).ln_value
        rhs = (-n * k - 1) * math.log(eps) + sup0
        ok = lhs <= rhs + slack
        ok_all = ok_all and ok
        rows.append(BoundCheckRow(j, eps, lhs, rhs, ok))
    return RegularBoundReport(k, n, tuple(rows), "yes" if ok_all else "no")


@dataclass(frozen=True)
class ClassARow:
    K: CompactBox
    k: int
    v_hat: float
    bound: float  # -Nk - N - slack
    ok: bool
    stable: bool


@dataclass(frozen=True)
class ClassAReport:
    N: int
    verdict: str  # 'yes' | 'no' | 'inconclusive'
    rows: tuple[ClassARow, ...]


def class_A_membership(
    u: FunctionNet,
    N: int,
    Ks: Sequence[CompactBox],
    k_max: int,
    grid: Optional[EpsGrid] = None,
    sampling: Sampling = DEFAULT_SAMPLING,
    slack: float = 0.1,
) -> ClassAReport:
    """Evidence for p_{k,K}(u_eps) <= eps^(-Nk-N): fitted valuations must
    stay above -Nk - N - slack for all k <= k_max and all compacts."""
    if not isinstance(N, int) or N < 1:
        raise NetError("N must be a positive integer")
    if grid is None:
        grid = default_grid()
    rows = []
    any_unstable = False
    any_violation = False
    for K in Ks:
        for k in range(k_max + 1):
            s = sharp_seminorm(u, k, K, grid, sampling)
            est = s.estimate
            bound = -N * k - N - slack
            ok = est.value >= bound
            if not est.stable:
                any_unstable = True
            elif not ok:
                any_violation = True
            rows.append(ClassARow(K, k, est.value, bound, ok, est.stable))
    if any_violation:
        verdict = "no"
    elif any_unstable:
        verdict = "inconclusive"
    else:
        verdict = "yes"
    return ClassAReport(N, verdict, tuple(rows))
