"""Least-squares extraction of dip, saturation, and composition parameters.

All fits use Levenberg-Marquardt (scipy.optimize.leastsq) with numerically
differenced Jacobians, stopping on a relative cost change below 1e-10.
Non-convergence is reported through the ``converged`` flag with best-so-far
parameters, never as an exception. Parameter uncertainties are 1-sigma
values from the scaled LM covariance.

Dips are modeled as a baseline, flat or optionally tilted, minus a sum of
Gaussians, the workflow used for every spectrum here; the underlying
lineshape question is open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import leastsq

from .datasets import read_csv
from .rate_model import SimplifiedParams
from .experiments import Spectrum

__all__ = [
    "DipFit",
    "SaturationFit",
    "fit_dips",
    "fit_saturation",
    "fit_contrast_curve",
    "recover_simplified",
    "load_dataset",
]

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

# TODO: optional Lorentzian lineshape once the pulsed-trapping lineshape
# question is settled; Gaussian matches the current analysis workflow.


@dataclass(frozen=True)
class DipFit:
    """Result of a k-Gaussian dip fit, sorted by center.

    no_dip flags fits whose largest amplitude is indistinguishable from the
    noise floor; converged is False when the optimizer hit its evaluation
    budget instead of the cost tolerance. baseline_slope is zero unless the
    fit was run with ``slope=True``.
    """

    centers: np.ndarray
    fwhms: np.ndarray
    amplitudes: np.ndarray
    baseline: float
    residual_norm: float
    converged: bool
    no_dip: bool
    center_sigmas: np.ndarray
    fwhm_sigmas: np.ndarray
    baseline_slope: float = 0.0


@dataclass(frozen=True)
class SaturationFit:
    """Exponential saturation fit p_inf - (p_inf - p0) e^{-n/n_s}.

    identifiable is False when the fitted asymptote and start coincide
    (a constant series pins no time scale).
    """

    n_s: float
    p_inf: float
    p0: float
    residual_norm: float
    converged: bool
    identifiable: bool
    n_s_sigma: float
    p_inf_sigma: float


def _dip_model(x: np.ndarray, params: np.ndarray, x_mid: float, with_slope: bool) -> np.ndarray:
    if with_slope:
        y = params[0] + params[1] * (x - x_mid)
        first = 2
    else:
        y = np.full_like(x, params[0])
        first = 1
    for i in range(first, len(params), 3):
        amp, center, sigma = params[i : i + 3]
        y = y - amp * np.exp(-((x - center) ** 2) / (2.0 * sigma * sigma))
    return y


def _local_minima(y: np.ndarray) -> np.ndarray:
    interior = np.nonzero((y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:]))[0] + 1
    return interior


def _noise_scale(y: np.ndarray, baseline: float) -> float:
    return 1.4826 * float(np.median(np.abs(y - baseline)))


def _covariance_sigmas(cov: np.ndarray | None, residuals: np.ndarray, n_params: int) -> np.ndarray:
    if cov is None or len(residuals) <= n_params:
        return np.full(n_params, np.inf)
    s_sq = float(residuals @ residuals) / (len(residuals) - n_params)
    return np.sqrt(np.abs(np.diag(cov)) * s_sq)


def fit_dips(
    spec: Spectrum | tuple[np.ndarray, np.ndarray],
    k: int,
    init_centers: np.ndarray | None = None,
    slope: bool = False,
) -> DipFit:
    """Fit a baseline minus k Gaussians to a spectrum.

    Initial dip centers come from ``init_centers`` when given, otherwise
    from the local minima lying below baseline - 3 * (robust noise scale),
    falling back to the k deepest local minima when the noiseless spectrum
    leaves the robust scale at zero. With ``slope=True`` the baseline gains
    a linear term about the grid midpoint, which keeps narrow dips anchored
    when they ride on a tilted background.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if isinstance(spec, Spectrum):
        x, y = spec.detuning_grid, spec.signal
    else:
        x = np.asarray(spec[0], dtype=float)
        y = np.asarray(spec[1], dtype=float)
    if len(x) < 3 * k + 1:
        raise ValueError("grid too short for the requested dip count")

    baseline0 = float(np.median(y))
    noise = _noise_scale(y, baseline0)
    if init_centers is not None:
        centers0 = np.sort(np.asarray(init_centers, dtype=float))[:k]
        if len(centers0) != k:
            raise ValueError("init_centers must provide at least k values")
    else:
        minima = _local_minima(y)
        deep = minima[y[minima] < baseline0 - 3.0 * noise] if noise > 0 else minima
        if len(deep) == 0:
            deep = minima if len(minima) else np.array([int(np.argmin(y))])
        order = np.argsort(y[deep])
        picked = deep[order[:k]]
        while len(picked) < k:
            picked = np.append(picked, int(np.argmin(y)))
        centers0 = np.sort(x[picked])

    span = float(x[-1] - x[0])
    x_mid = 0.5 * float(x[0] + x[-1])
    sigma0 = span / (10.0 * k)
    params0 = [baseline0, 0.0] if slope else [baseline0]
    first = len(params0)
    for c in centers0:
        depth = baseline0 - float(np.interp(c, x, y))
        params0.extend([max(depth, 1e-6), c, sigma0])
    params0 = np.asarray(params0)

    def residuals(p: np.ndarray) -> np.ndarray:
        return _dip_model(x, p, x_mid, slope) - y

    popt, cov, info, _, ier = leastsq(
        residuals, params0, ftol=1e-10, maxfev=500 * (len(params0) + 1), full_output=True
    )
    res = info["fvec"]
    sigmas = _covariance_sigmas(cov, res, len(popt))

    amps = popt[first::3]
    centers = popt[first + 1 :: 3]
    widths = np.abs(popt[first + 2 :: 3]) * FWHM_PER_SIGMA
    order = np.argsort(centers)
    # Judged against the post-fit residual scatter, not the pre-fit spread:
    # a genuine dip inflates the raw spread with structure, not noise.
    rms = float(np.sqrt(res @ res / max(1, len(res) - len(popt))))
    floor = max(5.0 * rms, 1e-8 * max(1.0, abs(popt[0])))
    return DipFit(
        centers=centers[order],
        fwhms=widths[order],
        amplitudes=amps[order],
        baseline=float(popt[0]),
        residual_norm=float(np.sqrt(res @ res)),
        converged=ier in (1, 2, 3, 4),
        no_dip=bool(np.max(np.abs(amps)) < floor),
        center_sigmas=sigmas[first + 1 :: 3][order],
        fwhm_sigmas=sigmas[first + 2 :: 3][order] * FWHM_PER_SIGMA,
        baseline_slope=float(popt[1]) if slope else 0.0,
    )


def fit_saturation(trace) -> SaturationFit:
    """Fit the exponential saturation model to a pumping series.

    Accepts a PumpTrace (fits the calibrated estimate), a StepTrace (fits
    p_dark), or a plain array indexed by step number from 0.
    """
    series = trace
    if hasattr(series, "p_dark_est"):
        series = series.p_dark_est
    elif hasattr(series, "p_dark"):
        series = series.p_dark
    series = np.asarray(series, dtype=float)
    if len(series) < 5:
        raise ValueError("need at least 5 points to fit a saturation curve")
    n = np.arange(len(series), dtype=float)

    def model(p: np.ndarray) -> np.ndarray:
        p_inf, p0, n_s = p
        return p_inf - (p_inf - p0) * np.exp(-n / abs(n_s))

    def residuals(p: np.ndarray) -> np.ndarray:
        return model(p) - series

    params0 = np.array([series[-1], series[0], max(1.0, len(series) / 5.0)])
    popt, cov, info, _, ier = leastsq(
        residuals, params0, ftol=1e-10, maxfev=2000, full_output=True
    )
    res = info["fvec"]
    sigmas = _covariance_sigmas(cov, res, 3)
    p_inf, p0, n_s = float(popt[0]), float(popt[1]), float(abs(popt[2]))
    return SaturationFit(
        n_s=n_s,
        p_inf=p_inf,
        p0=p0,
        residual_norm=float(np.sqrt(res @ res)),
        converged=ier in (1, 2, 3, 4),
        identifiable=bool(abs(p_inf - p0) > 1e-8),
        n_s_sigma=float(sigmas[2]),
        p_inf_sigma=float(sigmas[0]),
    )


def fit_contrast_curve(points) -> float:
    """Closed-form contrast a of f(r) = 1/2 + a (r^2/(1+r^2) - 1/2).

    ``points`` is a sequence of (ratio, probability) pairs. The model is
    linear in a, so the least-squares solution is a single quotient.
    Raises ValueError when every abscissa sits at the degenerate 1/2.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least 3 (ratio, probability) pairs")
    r, f = pts[:, 0], pts[:, 1]
    x = r * r / (1.0 + r * r) - 0.5
    denom = float(x @ x)
    if denom < 1e-15:
        raise ValueError("all ratios give the degenerate composition 1/2")
    return float(x @ (f - 0.5)) / denom


def recover_simplified(fit: SaturationFit) -> SimplifiedParams:
    """Invert a saturation fit to the per-step probabilities.

    From the fitted time scale, a = e^{-1/n_s}; then
    alpha_dp = 2 (1-a)(1-p_inf) and alpha_p_eff = (1-a-alpha_dp)/(1-alpha_dp).
    Values are clamped to [0, 1] against small fit excursions.
    """
    a = math.exp(-1.0 / fit.n_s)
    alpha_dp = 2.0 * (1.0 - a) * (1.0 - fit.p_inf)
    alpha_dp = min(max(alpha_dp, 0.0), 1.0)
    if alpha_dp < 1.0:
        alpha_p_eff = (1.0 - a - alpha_dp) / (1.0 - alpha_dp)
    else:
        alpha_p_eff = 0.0
    alpha_p_eff = min(max(alpha_p_eff, 0.0), 1.0)
    return SimplifiedParams(alpha_p_eff=alpha_p_eff, alpha_dp=alpha_dp)


def load_dataset(path) -> dict[str, np.ndarray | list[str]]:
    """Read a dataset CSV written by the CLI (comment block plus header row)."""
    return read_csv(path)
