"""Exact Gaussian process regression on scalar inputs.

Supports the power-curve models used by the dispatch optimizer: one
independent GP per compressor mapping cooling load (kW) to electrical
power (kW), squared-exponential kernel, zero prior mean on the raw
power values, Gaussian observation noise.

All posteriors are computed through a Cholesky factorization of the
noisy kernel matrix.  Observations may carry an individual noise level
so that exact (noise-free) anchor points coexist with noisy plant
measurements in the same model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize as _scipy_minimize

# Jitter added to the kernel diagonal when Cholesky fails; scaled by
# signal variance and escalated by x10 until _JITTER_MAX.
_JITTER_START = 1e-10
_JITTER_MAX = 1e-4


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel hyperparameters, all in kW units."""

    lengthscale: float
    signal_std: float
    noise_std: float

    def validate(self) -> None:
        for name in ("lengthscale", "signal_std"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
        if not np.isfinite(self.noise_std) or self.noise_std < 0.0:
            raise ValueError(f"noise_std must be finite and >= 0, got {self.noise_std!r}")


@dataclass(frozen=True)
class Observation:
    """One (load, power) sample.

    noise_std overrides the model noise for this point; None means the
    model default.  Zero marks an exact evaluation of the true curve.
    """

    load: float
    power: float
    noise_std: Optional[float] = None


@dataclass(frozen=True)
class GpModel:
    """Fitted GP posterior state.

    Prediction-time quantities (Cholesky factor, weights, inverse) are
    precomputed at fit time; the model is immutable and updates return
    a new instance.
    """

    params: KernelParams
    loads: np.ndarray
    powers: np.ndarray
    noise: np.ndarray
    chol: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    kinv: np.ndarray = field(repr=False)
    jitter: float = 0.0

    @property
    def n_obs(self) -> int:
        return int(self.loads.size)

    def predict(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return gp_predict(self, x)

    def predict_scalar(self, x: float) -> Tuple[float, float, float, float]:
        return gp_predict_scalar(self, x)


def kernel(params: KernelParams, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared-exponential covariance between load vectors a and b.

    k(a, b) = signal_std^2 * exp(-(a - b)^2 / (2 * lengthscale^2))
    """
    a = np.asarray(a, dtype=float).reshape(-1, 1)
    b = np.asarray(b, dtype=float).reshape(1, -1)
    sq = (a - b) ** 2
    return params.signal_std**2 * np.exp(-sq / (2.0 * params.lengthscale**2))


def _coerce_data(
    data: Sequence[Observation], default_noise: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    loads = np.array([o.load for o in data], dtype=float)
    powers = np.array([o.power for o in data], dtype=float)
    noise = np.array(
        [default_noise if o.noise_std is None else o.noise_std for o in data],
        dtype=float,
    )
    if loads.size == 0:
        raise ValueError("need at least one observation to fit a GP")
    if not (np.all(np.isfinite(loads)) and np.all(np.isfinite(powers))):
        raise ValueError("observations must be finite")
    if np.any(noise < 0.0):
        raise ValueError("per-observation noise_std must be >= 0")
    return loads, powers, noise


def _factorize(params: KernelParams, loads: np.ndarray, noise: np.ndarray):
    """Cholesky of K + diag(noise^2), escalating jitter on failure."""
    k_nn = kernel(params, loads, loads)
    k_noisy = k_nn + np.diag(noise**2)
    sf2 = params.signal_std**2
    jitter = 0.0
    scale = _JITTER_START
    while True:
        try:
            low = np.linalg.cholesky(k_noisy + jitter * np.eye(loads.size))
            return low, jitter
        except np.linalg.LinAlgError:
            jitter = scale * sf2
            scale *= 10.0
            if scale > _JITTER_MAX * 10.0:
                raise np.linalg.LinAlgError(
                    "kernel matrix not positive definite even with jitter "
                    f"{_JITTER_MAX * sf2:g}"
                )


def gp_fit(params: KernelParams, data: Sequence[Observation]) -> GpModel:
    """Fit an exact GP to the given observations.

    Raises ValueError on empty data or invalid hyperparameters.
    """
    params.validate()
    loads, powers, noise = _coerce_data(data, params.noise_std)
    low, jitter = _factorize(params, loads, noise)
    alpha = cho_solve((low, True), powers)
    kinv = cho_solve((low, True), np.eye(loads.size))
    return GpModel(
        params=params,
        loads=loads,
        powers=powers,
        noise=noise,
        chol=low,
        alpha=alpha,
        kinv=kinv,
        jitter=jitter,
    )


def gp_update(model: GpModel, new: Sequence[Observation]) -> GpModel:
    """Return a new model with extra observations appended.

    Refits the factorization from scratch; at the data sizes seen in a
    dispatch run (a few hundred points) this is cheaper than keeping a
    rank-one update path correct.
    """
    if not new:
        return model
    merged = [
        Observation(float(l), float(p), float(s))
        for l, p, s in zip(model.loads, model.powers, model.noise)
    ]
    merged.extend(new)
    return gp_fit(model.params, merged)


def prior_model(params: KernelParams) -> GpModel:
    """Data-free model: zero mean everywhere, std equal to signal_std."""
    params.validate()
    empty = np.empty(0, dtype=float)
    return GpModel(
        params=params,
        loads=empty,
        powers=empty.copy(),
        noise=empty.copy(),
        chol=np.empty((0, 0)),
        alpha=empty.copy(),
        kinv=np.empty((0, 0)),
    )


def gp_predict(model: GpModel, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Posterior mean and std at query loads x (vectorized).

    mean = k_*^T (K + Sigma_n)^-1 y
    var  = k(x,x) - k_*^T (K + Sigma_n)^-1 k_*

    Variance is clamped at zero before the square root; with exact
    arithmetic it cannot go negative.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    sf2 = model.params.signal_std**2
    if model.n_obs == 0:
        return np.zeros_like(x), np.full_like(x, model.params.signal_std)
    k_star = kernel(model.params, model.loads, x)  # (n, q)
    mean = k_star.T @ model.alpha
    # v = L^-1 k_*; var = sf2 - sum(v^2)
    v = solve_triangular(model.chol, k_star, lower=True)
    var = sf2 + model.jitter - np.einsum("ij,ij->j", v, v)
    std = np.sqrt(np.clip(var, 0.0, None))
    return mean, std


def gp_predict_scalar(model: GpModel, x: float) -> Tuple[float, float, float, float]:
    """Mean, std and their load-derivatives at a single query point.

    Used by the dispatch solver, which needs gradients.  The std
    derivative is defined as 0 where std underflows (exact anchors).
    """
    p = model.params
    sf2 = p.signal_std**2
    if model.n_obs == 0:
        return 0.0, p.signal_std, 0.0, 0.0
    diff = x - model.loads
    k_star = sf2 * np.exp(-(diff**2) / (2.0 * p.lengthscale**2))
    dk = -k_star * diff / p.lengthscale**2
    mean = float(k_star @ model.alpha)
    dmean = float(dk @ model.alpha)
    w = model.kinv @ k_star
    var = sf2 + model.jitter - float(k_star @ w)
    var = max(var, 0.0)
    std = math.sqrt(var)
    if std > 1e-9:
        dstd = -float(dk @ w) / std
    else:
        dstd = 0.0
    return mean, std, dmean, dstd


def log_marginal_likelihood(params: KernelParams, data: Sequence[Observation]) -> float:
    """Log evidence of the zero-mean GP for the given data."""
    params.validate()
    loads, powers, noise = _coerce_data(data, params.noise_std)
    low, _ = _factorize(params, loads, noise)
    alpha = cho_solve((low, True), powers)
    return float(
        -0.5 * powers @ alpha
        - np.sum(np.log(np.diag(low)))
        - 0.5 * loads.size * math.log(2.0 * math.pi)
    )


def fit_hyperparams(
    data: Sequence[Observation],
    init: KernelParams,
    lengthscale_bounds: Optional[Tuple[float, float]] = None,
    signal_bounds: Optional[Tuple[float, float]] = None,
) -> KernelParams:
    """Maximize log marginal likelihood over lengthscale and signal_std.

    The noise level is kept at its init value: it encodes the known
    measurement noise of the plant and is not identifiable from the
    small exact seed sets this is typically run on.  Optimization runs
    in log space with L-BFGS-B from the given init; the result is
    deterministic for identical data and init.

    Default bounds are derived from the data: lengthscale within
    [span/20, span] of the input span, signal_std within [std/3, std]
    of the output spread.  The amplitude cap matters: a zero-mean
    model on raw power values otherwise inflates signal_std to cover
    the magnitudes themselves, which both drowns the exploration
    signal and hides how little the short seed segment says about the
    unexplored upper load range.

    Raises ValueError for fewer than 3 observations or a non-finite
    likelihood at the optimum.
    """
    init.validate()
    if len(data) < 3:
        raise ValueError("hyperparameter fit needs at least 3 observations")
    loads = np.array([o.load for o in data], dtype=float)
    powers = np.array([o.power for o in data], dtype=float)
    span = float(loads.max() - loads.min())
    if span <= 0.0:
        raise ValueError("hyperparameter fit needs distinct load values")
    spread = float(np.std(powers))
    if spread <= 0.0:
        spread = 1.0
    if lengthscale_bounds is None:
        lengthscale_bounds = (span / 20.0, span)
    if signal_bounds is None:
        signal_bounds = (spread / 3.0, spread)

    def neg_lml(theta):
        ls, sf = np.exp(theta)
        try:
            val = log_marginal_likelihood(
                KernelParams(ls, sf, init.noise_std), data
            )
        except np.linalg.LinAlgError:
            return 1e12
        if not np.isfinite(val):
            return 1e12
        return -val

    x0 = np.log(
        [
            np.clip(init.lengthscale, *lengthscale_bounds),
            np.clip(init.signal_std, *signal_bounds),
        ]
    )
    bounds = [tuple(np.log(lengthscale_bounds)), tuple(np.log(signal_bounds))]
    res = _scipy_minimize(neg_lml, x0, method="L-BFGS-B", bounds=bounds)
    if not np.isfinite(res.fun) or res.fun >= 1e12:
        raise ValueError("hyperparameter fit did not reach a finite likelihood")
    ls, sf = np.exp(res.x)
    return replace(init, lengthscale=float(ls), signal_std=float(sf))
