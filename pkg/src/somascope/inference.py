"""Statistical machinery: Spearman correlation, binomial logistic regression
via IRLS, likelihood-ratio tests, and two-way ANOVA.

All operations are pure functions; p-value kernels are regularized
incomplete gamma/beta survival functions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DataError


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p: float
    n: int


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    log_likelihood: float
    null_log_likelihood: float
    lr_stat: float
    lr_p: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class AnovaEffect:
    sum_sq: float
    df: int
    mean_sq: float
    F: float | None
    p: float | None


@dataclass(frozen=True)
class AnovaResult:
    factor_a: AnovaEffect
    factor_b: AnovaEffect
    interaction: AnovaEffect | None
    residual: AnovaEffect


def chi_square_sf(x: float, df: float) -> float:
    """Chi-square survival function via the regularized upper incomplete gamma."""
    if df <= 0:
        raise DataError(f"chi-square df must be positive, got {df}")
    if x <= 0:
        return 1.0
    return float(special.gammaincc(df / 2.0, x / 2.0))


def t_sf(x: float, df: float) -> float:
    """Student-t survival function P(T > x) via the regularized incomplete beta."""
    if df <= 0:
        raise DataError(f"t df must be positive, got {df}")
    if math.isinf(x):
        return 0.0 if x > 0 else 1.0
    tail = 0.5 * float(special.betainc(df / 2.0, 0.5, df / (df + x * x)))
    return tail if x >= 0 else 1.0 - tail


def f_sf(x: float, d1: float, d2: float) -> float:
    """F-distribution survival function."""
    if d1 <= 0 or d2 <= 0:
        raise DataError(f"F dfs must be positive, got ({d1}, {d2})")
    if x <= 0:
        return 1.0
    return float(special.betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)))


def rank_average(values) -> np.ndarray:
    """Ranks starting at 1, ties receiving the average of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        raise DataError("zero-variance vector in correlation")
    return float(xc @ yc) / denom


def spearman(x, y, method: str = "approx") -> CorrelationResult:
    """Spearman rank correlation with average-rank tie handling.

    The two-sided p-value uses the t-approximation by default; method="exact"
    enumerates all rank permutations (n <= 10 only).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"length mismatch: {x.shape} vs {y.shape}")
    n = len(x)
    if n < 3:
        raise DataError(f"need n >= 3 for Spearman correlation, got {n}")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DataError("non-finite values in correlation input")
    rx, ry = rank_average(x), rank_average(y)
    rho = _pearson(rx, ry)
    rho = max(-1.0, min(1.0, rho))
    if method == "exact":
        if n > 10:
            raise DataError(f"exact permutation p only supported for n <= 10, got {n}")
        count = 0
        total = 0
        for perm in itertools.permutations(range(n)):
            r = _pearson(rx, ry[list(perm)])
            total += 1
            if abs(r) >= abs(rho) - 1e-12:
                count += 1
        return CorrelationResult(rho=rho, p=count / total, n=n)
    if abs(rho) >= 1.0 - 1e-15:
        return CorrelationResult(rho=rho, p=0.0, n=n)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return CorrelationResult(rho=rho, p=2.0 * t_sf(abs(t), n - 2), n=n)


def _binomial_loglik(successes, totals, mu) -> float:
    """Binomial log-likelihood kernel (binomial coefficients omitted)."""
    eps = 1e-12
    mu = np.clip(mu, eps, 1.0 - eps)
    return float(successes @ np.log(mu) + (totals - successes) @ np.log(1.0 - mu))


def _irls(successes, totals, design, tol=1e-8, max_iter=100):
    n_obs, n_par = design.shape
    beta = np.zeros(n_par)
    # Initialize the intercept at the pooled empirical log-odds.
    pooled = (successes.sum() + 0.5) / (totals.sum() + 1.0)
    beta[0] = math.log(pooled / (1.0 - pooled))
    mu = 1.0 / (1.0 + np.exp(-(design @ beta)))
    ll = _binomial_loglik(successes, totals, mu)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = design @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = totals * mu * (1.0 - mu)
        w = np.maximum(w, 1e-12)
        z = eta + (successes - totals * mu) / w
        wx = design * w[:, None]
        try:
            delta = np.linalg.solve(design.T @ wx, wx.T @ z) - beta
        except np.linalg.LinAlgError as e:
            raise DataError(f"singular weighted design matrix: {e}") from e
        # Step-halving: back off while the likelihood decreases.
        step = 1.0
        for _ in range(30):
            cand = beta + step * delta
            mu_c = 1.0 / (1.0 + np.exp(-(design @ cand)))
            ll_c = _binomial_loglik(successes, totals, mu_c)
            if ll_c >= ll - 1e-12:
                break
            step /= 2.0
        beta = beta + step * delta
        ll = _binomial_loglik(successes, totals, 1.0 / (1.0 + np.exp(-(design @ beta))))
        if np.max(np.abs(step * delta)) < tol:
            converged = True
            break
    return beta, ll, converged, it


def fit_binomial_logit(successes, totals, design) -> RegressionResult:
    """Binomial logistic regression by iteratively reweighted least squares.

    The design matrix's first column must be the intercept. The LR statistic
    compares against the intercept-only null; perfect separation surfaces as
    converged=False with coefficients still returned.
    """
    successes = np.asarray(successes, dtype=float)
    totals = np.asarray(totals, dtype=float)
    design = np.asarray(design, dtype=float)
    if design.ndim != 2 or len(successes) != len(totals) or len(successes) != design.shape[0]:
        raise DataError("successes, totals, and design rows must have equal length")
    if np.any(successes < 0) or np.any(successes > totals):
        raise DataError("need 0 <= successes[i] <= totals[i]")
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise DataError("design matrix is rank deficient")
    if not np.allclose(design[:, 0], 1.0):
        raise DataError("first design column must be the intercept")
    beta, ll, converged, iters = _irls(successes, totals, design)
    null_beta, null_ll, _, _ = _irls(successes, totals, np.ones((len(successes), 1)))
    lr = 2.0 * (ll - null_ll)
    if lr < -1e-8:
        raise DataError(f"null likelihood exceeds full likelihood (LR = {lr})")
    lr = max(0.0, lr)
    df = design.shape[1] - 1
    lr_p = chi_square_sf(lr, df) if df > 0 else 1.0
    return RegressionResult(
        coefficients=beta,
        log_likelihood=ll,
        null_log_likelihood=null_ll,
        lr_stat=lr,
        lr_p=lr_p,
        converged=converged,
        iterations=iters,
    )


def lr_test(full: RegressionResult, null: RegressionResult, df: int) -> tuple[float, float]:
    """Likelihood-ratio test for a null model nested in a full model."""
    if df <= 0:
        raise DataError(f"df must be positive, got {df}")
    lr = 2.0 * (full.log_likelihood - null.log_likelihood)
    if lr < -1e-8:
        raise DataError(f"nesting violation: full log-likelihood below null by {-lr / 2}")
    lr = max(0.0, lr)
    return lr, chi_square_sf(lr, df)


def _dummies(labels, levels) -> np.ndarray:
    """Treatment-coded indicator columns (first level is the reference)."""
    cols = [np.asarray([1.0 if l == lev else 0.0 for l in labels]) for lev in levels[1:]]
    return np.column_stack(cols) if cols else np.empty((len(labels), 0))


def _rss(y: np.ndarray, design: np.ndarray) -> float:
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float(resid @ resid)


def two_way_anova(values, factor_a, factor_b) -> AnovaResult:
    """Two-way ANOVA with Type-I (sequential) sums of squares in order
    A, B, AxB. Requires a complete design; the interaction is omitted when
    there are no replicates to estimate a residual against it."""
    y = np.asarray(values, dtype=float)
    fa = list(factor_a)
    fb = list(factor_b)
    if len(y) != len(fa) or len(y) != len(fb):
        raise DataError("values and factor label vectors must have equal length")
    levels_a = sorted(set(fa))
    levels_b = sorted(set(fb))
    a, b = len(levels_a), len(levels_b)
    if a < 2 or b < 2:
        raise DataError("both factors need at least 2 levels")
    cells = {(la, lb) for la, lb in zip(fa, fb)}
    if len(cells) < a * b:
        raise DataError("incomplete design: some factor-level cells are empty")
    n = len(y)
    with_interaction = n > a * b

    intercept = np.ones((n, 1))
    da = _dummies(fa, levels_a)
    db = _dummies(fb, levels_b)
    dab = np.column_stack(
        [da[:, i] * db[:, j] for i in range(da.shape[1]) for j in range(db.shape[1])]
    ) if with_interaction else np.empty((n, 0))

    ss_total = float(((y - y.mean()) ** 2).sum())
    # Floor for float noise in the sequential RSS differences.
    tiny = 1e-12 * max(1.0, ss_total)

    def _chop(ss):
        return 0.0 if ss < tiny else ss

    rss0 = ss_total
    rss_a = _rss(y, np.hstack([intercept, da]))
    rss_ab = _rss(y, np.hstack([intercept, da, db]))
    ss_a = _chop(rss0 - rss_a)
    ss_b = _chop(rss_a - rss_ab)
    if with_interaction:
        rss_full = _rss(y, np.hstack([intercept, da, db, dab]))
        ss_int = _chop(rss_ab - rss_full)
        ss_resid = _chop(rss_full)
        df_int = (a - 1) * (b - 1)
        df_resid = n - a * b
    else:
        ss_int = None
        ss_resid = _chop(rss_ab)
        df_int = 0
        df_resid = n - 1 - (a - 1) - (b - 1)
    if df_resid <= 0:
        raise DataError("no residual degrees of freedom")
    ms_resid = ss_resid / df_resid

    def effect(ss, df):
        ms = ss / df
        if ms_resid == 0.0:
            # All-equal data: F = 0, p = 1; exact fit with real effects: F = inf.
            if ss <= 1e-12:
                return AnovaEffect(sum_sq=ss, df=df, mean_sq=ms, F=0.0, p=1.0)
            return AnovaEffect(sum_sq=ss, df=df, mean_sq=ms, F=math.inf, p=0.0)
        f = ms / ms_resid
        return AnovaEffect(sum_sq=ss, df=df, mean_sq=ms, F=f, p=f_sf(f, df, df_resid))

    return AnovaResult(
        factor_a=effect(ss_a, a - 1),
        factor_b=effect(ss_b, b - 1),
        interaction=effect(ss_int, df_int) if with_interaction else None,
        residual=AnovaEffect(sum_sq=ss_resid, df=df_resid, mean_sq=ms_resid, F=None, p=None),
    )
