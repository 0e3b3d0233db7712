"""ARIMA(p,d,q) by conditional sum of squares.

Estimation minimizes the sum of squared one-step residuals (pre-sample
residuals fixed at zero) with a Nelder-Mead simplex started from zeros and
from method-of-moments values. Order selection is an exhaustive AIC grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize
from scipy.linalg import toeplitz
from scipy.signal import lfilter

from .base import BaseEstimator
from .exceptions import NoConvergedModel, NonFinite, TooShort
from .preprocessing import difference, integrate
from .validation import as_float_1d

AIC_VARIANCE_FLOOR = 1e-12
COEF_SANITY_BOUND = 1.5
AR_ROOT_MARGIN = 1.05
SSE_TOL = 1e-8
MAX_ITER = 2000


@dataclass(frozen=True)
class ArimaOrder:
    """(p, d, q) with the grid bounds enforced at construction."""

    p: int
    d: int
    q: int

    def __post_init__(self):
        if not (0 <= self.p <= 5):
            raise ValueError(f"p must be in 0..5, got {self.p}")
        if not (0 <= self.d <= 2):
            raise ValueError(f"d must be in 0..2, got {self.d}")
        if not (0 <= self.q <= 5):
            raise ValueError(f"q must be in 0..5, got {self.q}")

    def __str__(self) -> str:
        return f"({self.p}, {self.d}, {self.q})"


@dataclass(frozen=True)
class ArimaModel:
    """Fitted coefficients on the d-differenced scale.

    n_obs is the length of the differenced series the model was fit on;
    sigma2 = sse / n_eff with n_eff = n_obs - p residuals.
    """

    order: ArimaOrder
    alpha: float
    ar_coeffs: tuple[float, ...]
    ma_coeffs: tuple[float, ...]
    sigma2: float
    n_obs: int
    sse: float
    converged: bool = True

    def __post_init__(self):
        if len(self.ar_coeffs) != self.order.p:
            raise ValueError("ar_coeffs length must equal p")
        if len(self.ma_coeffs) != self.order.q:
            raise ValueError("ma_coeffs length must equal q")

    @property
    def n_eff(self) -> int:
        return self.n_obs - self.order.p

    @property
    def k_params(self) -> int:
        return self.order.p + self.order.q + 1


@dataclass(frozen=True)
class FitReport:
    order: ArimaOrder
    aic: float
    rmse_test: float
    converged: bool


def _residual_recursion(base: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Solve e_t = base_t - sum(phi_j e_{t-j}) with zero pre-sample state.

    This is an IIR filter with denominator [1, phi_1..phi_q]; lfilter's zero
    initial conditions match the conditional (pre-sample residuals = 0)
    convention exactly.
    """
    return lfilter([1.0], np.concatenate(([1.0], phi)), base)


def _base_residuals(y: np.ndarray, lag: np.ndarray | None, alpha: float, beta: np.ndarray) -> np.ndarray:
    p = 0 if lag is None else lag.shape[1]
    base = y[p:] - alpha
    if lag is not None:
        base = base - lag @ beta
    return base


def _lag_matrix(y: np.ndarray, p: int) -> np.ndarray | None:
    if p == 0:
        return None
    return np.column_stack([y[p - i : len(y) - i] for i in range(1, p + 1)])


def css_residuals(model: ArimaModel, differenced) -> np.ndarray:
    """One-step residuals e_t = y_t - alpha - sum(beta_i y_{t-i}) - sum(phi_j e_{t-j}).

    Defined for t >= p with pre-sample residuals set to zero (conditional
    convention); the returned array has length n - p.
    """
    y = as_float_1d(differenced, name="differenced")
    p = model.order.p
    if len(y) <= p:
        raise TooShort(f"need more than p={p} observations, got {len(y)}")
    base = _base_residuals(y, _lag_matrix(y, p), model.alpha, np.asarray(model.ar_coeffs))
    if model.order.q == 0:
        return base
    return _residual_recursion(base, np.asarray(model.ma_coeffs))


def _css_sse(x: np.ndarray, y: np.ndarray, lag: np.ndarray | None, p: int, q: int) -> float:
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1e6):
        return math.inf
    alpha = x[0]
    beta = x[1 : 1 + p]
    phi = x[1 + p :]
    base = _base_residuals(y, lag, alpha, beta)
    if q == 0:
        return float(base @ base)
    # non-invertible phi values the simplex wanders through can overflow the
    # recursion; report those points as infinitely bad instead of warning
    with np.errstate(over="ignore", invalid="ignore"):
        e = _residual_recursion(base, phi)
        sse = float(e @ e)
    return sse if math.isfinite(sse) else math.inf


def _ar_root_margin(beta: tuple[float, ...]) -> float:
    """Smallest modulus among the roots of 1 - sum(beta_i z^i).

    A stationary AR process keeps all roots outside the unit circle; a margin
    near 1 means the fit is (close to) integrated and the series should be
    differenced instead.
    """
    if not beta:
        return math.inf
    coeffs = [-b for b in reversed(beta)] + [1.0]
    roots = np.roots(coeffs)
    if len(roots) == 0:
        return math.inf
    return float(np.min(np.abs(roots)))


def _yule_walker(y: np.ndarray, p: int) -> np.ndarray:
    """Method-of-moments AR coefficients from sample autocorrelations."""
    mu = y.mean()
    z = y - mu
    n = len(z)
    denom = float(z @ z)
    if denom <= 0.0:
        return np.zeros(p)
    rho = np.array([float(z[: n - k] @ z[k:]) / denom for k in range(p + 1)])
    try:
        beta = np.linalg.solve(toeplitz(rho[:p]), rho[1 : p + 1])
    except np.linalg.LinAlgError:
        return np.zeros(p)
    if not np.all(np.isfinite(beta)):
        return np.zeros(p)
    return np.clip(beta, -1.2, 1.2)


def _mom_start(y: np.ndarray, lag: np.ndarray | None, p: int, q: int) -> np.ndarray:
    mu = float(y.mean())
    beta = _yule_walker(y, p) if p else np.zeros(0)
    alpha = mu * (1.0 - float(beta.sum()))
    phi = np.zeros(q)
    if q > 0:
        z = _base_residuals(y, lag, alpha, beta)
        denom = float(z @ z)
        if denom > 0.0 and len(z) > 1:
            r1 = float(z[:-1] @ z[1:]) / denom
            r1 = float(np.clip(r1, -0.49, 0.49))
            if r1 != 0.0:
                phi[0] = (1.0 - math.sqrt(1.0 - 4.0 * r1 * r1)) / (2.0 * r1)
    return np.concatenate([[alpha], beta, phi])


def arima_fit(series, order: ArimaOrder) -> ArimaModel:
    """Fit by minimizing the conditional sum of squares on the d-differenced series.

    Two simplex restarts (all-zero start and method-of-moments start); the
    better final SSE wins. A fit is flagged non-converged when the simplex hit
    the iteration cap before the SSE tolerance, any coefficient exceeds 1.5 in
    magnitude, or the AR polynomial has a root at or near the unit circle
    (the series is integrated and should be differenced, not modelled with a
    near-unit AR root).
    """
    raw = as_float_1d(series, name="series")
    p, d, q = order.p, order.d, order.q
    y = np.asarray(difference(raw, d)) if d else raw.astype(float)
    n = len(y)
    min_len = max(p, q) + 6 if (p or q) else 1
    if n < min_len:
        raise TooShort(f"need at least {min_len} observations after differencing, got {n}")

    lag = _lag_matrix(y, p)
    k = p + q + 1

    def objective(x: np.ndarray) -> float:
        return _css_sse(x, y, lag, p, q)

    starts = [np.zeros(k), _mom_start(y, lag, p, q)]
    best = None
    for x0 in starts:
        res = optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": MAX_ITER, "fatol": SSE_TOL, "xatol": 1e-6, "disp": False},
        )
        if best is None or res.fun < best.fun:
            best = res

    if not math.isfinite(best.fun):
        raise NonFinite(f"optimizer produced non-finite SSE for order {order}")

    alpha = float(best.x[0])
    beta = tuple(float(v) for v in best.x[1 : 1 + p])
    phi = tuple(float(v) for v in best.x[1 + p :])
    model_tmp = ArimaModel(order, alpha, beta, phi, sigma2=1.0, n_obs=n, sse=0.0)
    resid = css_residuals(model_tmp, y)
    sse = float(resid @ resid)
    n_eff = n - p
    sane = all(abs(c) <= COEF_SANITY_BOUND for c in beta + phi)
    stationary = _ar_root_margin(beta) > AR_ROOT_MARGIN
    converged = bool(best.success) and sane and stationary
    return ArimaModel(
        order=order,
        alpha=alpha,
        ar_coeffs=beta,
        ma_coeffs=phi,
        sigma2=sse / n_eff,
        n_obs=n,
        sse=sse,
        converged=converged,
    )


def arima_aic(model: ArimaModel) -> float:
    """n_eff * ln(sse/n_eff) + 2k with k = p + q + 1; the variance ratio is
    floored at 1e-12 so an exact fit stays finite."""
    n_eff = model.n_eff
    if n_eff <= 0:
        raise TooShort("model has no effective observations")
    ratio = max(model.sse / n_eff, AIC_VARIANCE_FLOOR)
    return n_eff * math.log(ratio) + 2.0 * model.k_params


def arima_auto_search(
    series, max_p: int = 5, max_d: int = 2, max_q: int = 5
) -> tuple[ArimaOrder, ArimaModel]:
    """Exhaustive (p,d,q) grid; returns the minimum-AIC converged model.

    Deterministic tie-break by (d, p+q, p) ascending. Candidates that fail to
    fit or converge are skipped; NoConvergedModel if none survive.
    """
    raw = as_float_1d(series, name="series")
    if len(raw) < 30:
        raise TooShort(f"auto search needs at least 30 observations, got {len(raw)}")
    best_key = None
    best: tuple[ArimaOrder, ArimaModel] | None = None
    for d in range(max_d + 1):
        for p in range(max_p + 1):
            for q in range(max_q + 1):
                order = ArimaOrder(p, d, q)
                try:
                    model = arima_fit(raw, order)
                except (TooShort, NonFinite):
                    continue
                if not model.converged:
                    continue
                key = (arima_aic(model), d, p + q, p)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (order, model)
    if best is None:
        raise NoConvergedModel("every candidate order failed to fit or converge")
    return best


def arima_forecast(model: ArimaModel, history, horizon: int = 5) -> list[float]:
    """Iterate the recursion with future shocks at zero, then re-integrate.

    Forecasts are produced on the differenced scale and mapped back to the
    original scale using the last d observed values as integration seeds.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    raw = as_float_1d(history, name="history")
    p, d, q = model.order.p, model.order.d, model.order.q
    if len(raw) <= d:
        raise TooShort(f"history too short to difference {d} times")
    y = np.asarray(difference(raw, d)) if d else raw.astype(float)
    n = len(y)
    if n < max(p, 1):
        raise TooShort(f"need at least {max(p, 1)} differenced observations, got {n}")

    eps = np.zeros(n)
    if q > 0 and n > p:
        eps[p:] = css_residuals(model, y)

    ys = y.tolist()
    beta = model.ar_coeffs
    phi = model.ma_coeffs
    for h in range(horizon):
        t = n + h
        acc = model.alpha
        for i in range(1, p + 1):
            acc += beta[i - 1] * ys[t - i]
        for j in range(1, q + 1):
            idx = t - j
            if idx < n:
                acc += phi[j - 1] * eps[idx]
        ys.append(acc)
    fc_diff = ys[n:]
    if d == 0:
        return [float(v) for v in fc_diff]
    return [float(v) for v in integrate(fc_diff, raw[-d:], d)]


def arima_one_step_predictions(model: ArimaModel, history, n_eval: int) -> list[float]:
    """One-step-ahead predictions for the last n_eval points, on the original scale.

    Each prediction uses actual history up to the previous week; used for
    held-out evaluation of a fitted model.
    """
    raw = as_float_1d(history, name="history")
    p, d = model.order.p, model.order.d
    if n_eval < 1:
        raise ValueError("n_eval must be >= 1")
    y = np.asarray(difference(raw, d)) if d else raw.astype(float)
    n = len(y)
    first_t = n - n_eval
    if first_t < p:
        raise TooShort("history too short to produce that many one-step predictions")
    resid = css_residuals(model, y)
    preds = []
    for t in range(first_t, n):
        pred_diff = float(y[t] - resid[t - p])
        if d == 0:
            preds.append(pred_diff)
        else:
            t_orig = t + d
            preds.append(float(integrate([pred_diff], raw[t_orig - d : t_orig], d)[0]))
    return preds


# -- serialization -----------------------------------------------------------

FORMAT_TAG = "arima-model/1"


def dumps_arima(model: ArimaModel) -> str:
    """Flat key=value text record; floats use repr so the round trip is exact."""
    lines = [
        f"format={FORMAT_TAG}",
        f"p={model.order.p}",
        f"d={model.order.d}",
        f"q={model.order.q}",
        f"alpha={model.alpha!r}",
        "ar=" + ",".join(repr(c) for c in model.ar_coeffs),
        "ma=" + ",".join(repr(c) for c in model.ma_coeffs),
        f"sigma2={model.sigma2!r}",
        f"n_obs={model.n_obs}",
        f"sse={model.sse!r}",
        f"converged={'true' if model.converged else 'false'}",
    ]
    return "\n".join(lines) + "\n"


def loads_arima(text: str) -> ArimaModel:
    fields: dict[str, str] = {}
    for line in text.strip().splitlines():
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    if fields.get("format") != FORMAT_TAG:
        raise ValueError(f"not an {FORMAT_TAG} record")

    def floats(csv: str) -> tuple[float, ...]:
        return tuple(float(v) for v in csv.split(",")) if csv else ()

    return ArimaModel(
        order=ArimaOrder(int(fields["p"]), int(fields["d"]), int(fields["q"])),
        alpha=float(fields["alpha"]),
        ar_coeffs=floats(fields["ar"]),
        ma_coeffs=floats(fields["ma"]),
        sigma2=float(fields["sigma2"]),
        n_obs=int(fields["n_obs"]),
        sse=float(fields["sse"]),
        converged=fields.get("converged", "true") == "true",
    )


def save_arima(model: ArimaModel, path) -> None:
    Path(path).write_text(dumps_arima(model), encoding="utf-8")


def load_arima(path) -> ArimaModel:
    return loads_arima(Path(path).read_text(encoding="utf-8"))


class ArimaForecaster(BaseEstimator):
    """Estimator facade: fixed-order fit or AIC grid search when order=None."""

    def __init__(self, order: tuple[int, int, int] | None = None, max_p: int = 5, max_d: int = 2, max_q: int = 5):
        self.order = order
        self.max_p = max_p
        self.max_d = max_d
        self.max_q = max_q
        self.model_: ArimaModel | None = None
        self.history_: np.ndarray | None = None

    def fit(self, y, X=None) -> "ArimaForecaster":
        arr = as_float_1d(y, name="y")
        if self.order is not None:
            self.model_ = arima_fit(arr, ArimaOrder(*self.order))
        else:
            _, self.model_ = arima_auto_search(arr, self.max_p, self.max_d, self.max_q)
        self.history_ = arr
        return self

    def predict(self, horizon: int = 5) -> list[float]:
        self._check_fitted("model_")
        return arima_forecast(self.model_, self.history_, horizon)
