"""Riemann-Liouville fractional Brownian motion and rough Bergomi paths.

The variance process is lognormal, driven by the Volterra process

    W_t^H = sqrt(2H) * int_0^t (t-s)^(H-1/2) dW_s,

and the price is a log-Euler diffusion whose shocks correlate with the fBm
driver. Two fBm samplers are provided: a hybrid scheme (exact treatment of
the kernel singularity over the most recent step plus an FFT convolution for
the smooth remainder, O(n log n)) used for production runs, and a dense
Cholesky factorization of the analytic covariance (O(n^3), small grids only)
kept as an exact cross-check.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import integrate, signal, special

from .errors import NumericalError, ParameterError
from .rng import substream

CHOLESKY_MAX_STEPS = 2048


@dataclass(frozen=True)
class RBergomiParams:
    """Full parameter set for one rough Bergomi simulation.

    Parameters
    ----------
    hurst : float
        Hurst exponent of the variance driver, strictly inside (0, 1).
    vol_of_vol : float
        Volatility of the variance process, >= 0 (0 freezes the variance).
    forward_variance : float
        Flat initial forward variance, > 0.
    correlation : float
        Correlation between price shocks and the fBm driver, in [-1, 1].
    n_steps : int
        Number of time steps, >= 2.
    dt : float
        Step size in years (1/252 corresponds to one trading day).
    spot : float
        Initial price, > 0.
    seed : int
        Nonnegative 64-bit seed; simulation is reproducible given it.
    """

    hurst: float
    vol_of_vol: float = 1.9
    forward_variance: float = 0.1
    correlation: float = 0.0
    n_steps: int = 5000
    dt: float = 1.0 / 252.0
    spot: float = 100.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ParameterError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.vol_of_vol < 0.0:
            raise ParameterError(f"vol_of_vol must be >= 0, got {self.vol_of_vol}")
        if self.forward_variance <= 0.0:
            raise ParameterError(
                f"forward_variance must be > 0, got {self.forward_variance}"
            )
        if not -1.0 <= self.correlation <= 1.0:
            raise ParameterError(
                f"correlation must lie in [-1, 1], got {self.correlation}"
            )
        if self.n_steps < 2:
            raise ParameterError(f"n_steps must be >= 2, got {self.n_steps}")
        if self.dt <= 0.0:
            raise ParameterError(f"dt must be > 0, got {self.dt}")
        if self.spot <= 0.0:
            raise ParameterError(f"spot must be > 0, got {self.spot}")
        if self.seed < 0 or self.seed > 2**64 - 1:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class PathPair:
    """Simulated price/variance paths with their driving fBm on a shared grid.

    ``times``, ``price``, ``variance`` and ``fbm`` all have ``n_steps + 1``
    entries (index 0 is the initial state); ``brownian_increments`` holds the
    ``n_steps`` Gaussian driver increments of the fBm.
    """

    times: np.ndarray
    price: np.ndarray
    variance: np.ndarray
    fbm: np.ndarray
    brownian_increments: np.ndarray

    def __post_init__(self):
        n = self.times.size
        for name in ("price", "variance", "fbm"):
            if getattr(self, name).size != n:
                raise ParameterError(f"{name} must have the same length as times")
        if self.brownian_increments.size != n - 1:
            raise ParameterError("brownian_increments must have length n_steps")

    def write_csv(self, path) -> None:
        """Write the paths as CSV with columns step, time, price, variance, fbm."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "time", "price", "variance", "fbm"])
            for k in range(self.times.size):
                writer.writerow(
                    [k, repr(float(self.times[k])), repr(float(self.price[k])),
                     repr(float(self.variance[k])), repr(float(self.fbm[k]))]
                )

    def write_npz(self, path) -> None:
        """Binary column dump consumed by the experiments module."""
        np.savez_compressed(
            path,
            times=self.times,
            price=self.price,
            variance=self.variance,
            fbm=self.fbm,
            brownian_increments=self.brownian_increments,
        )


def load_path_npz(path) -> PathPair:
    with np.load(path) as data:
        return PathPair(
            times=data["times"],
            price=data["price"],
            variance=data["variance"],
            fbm=data["fbm"],
            brownian_increments=data["brownian_increments"],
        )


def _check_fbm_args(hurst: float, n_steps: int) -> None:
    if not 0.0 < hurst < 1.0:
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    if n_steps < 2:
        raise ParameterError(f"n_steps must be >= 2, got {n_steps}")


def hybrid_convolution_weights(hurst: float, n_steps: int, dt: float) -> np.ndarray:
    """Kernel weights for the smooth (lag >= 2) part of the hybrid scheme.

    The weight for lag k replaces the kernel over [(k-1) dt, k dt] by the
    root mean square of s^(H-1/2) on that interval, which makes the variance
    of the discretized process match t^(2H) exactly at every grid point.
    """
    two_h = 2.0 * hurst
    k = np.arange(2, n_steps + 1, dtype=float)
    return np.sqrt(((k * dt) ** two_h - ((k - 1.0) * dt) ** two_h) / (two_h * dt))


def simulate_fbm_rl_batch(
    hurst: float, n_steps: int, dt: float, rng: np.random.Generator, n_paths: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized hybrid-scheme sampler: ``n_paths`` fBm paths at once.

    Returns ``(fbm, driver)`` with shapes ``(n_paths, n_steps + 1)`` and
    ``(n_paths, n_steps)``. A batch of size 1 consumes the random stream
    exactly like :func:`simulate_fbm_rl`.
    """
    _check_fbm_args(hurst, n_steps)
    if dt <= 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if n_paths < 1:
        raise ParameterError(f"n_paths must be >= 1, got {n_paths}")
    alpha = hurst - 0.5
    # joint law of (dW_k, int_{t_(k-1)}^{t_k} (t_k - s)^alpha dW_s)
    cov_ww = dt
    cov_wi = dt ** (alpha + 1.0) / (alpha + 1.0)
    cov_ii = dt ** (2.0 * alpha + 1.0) / (2.0 * alpha + 1.0)
    l11 = np.sqrt(cov_ww)
    l21 = cov_wi / l11
    l22 = np.sqrt(max(cov_ii - l21 * l21, 0.0))

    z = rng.standard_normal((n_paths, n_steps, 2))
    dw = l11 * z[:, :, 0]
    near = l21 * z[:, :, 0] + l22 * z[:, :, 1]

    fbm = np.empty((n_paths, n_steps + 1))
    fbm[:, 0] = 0.0
    if alpha == 0.0:
        # exact Brownian case: the kernel weights are identically 1
        fbm[:, 1:] = np.cumsum(dw, axis=1)
        return fbm, dw

    kernel = np.concatenate([[0.0], hybrid_convolution_weights(hurst, n_steps, dt)])
    tail = signal.fftconvolve(dw, kernel[np.newaxis, :], axes=1)[:, :n_steps]
    fbm[:, 1:] = np.sqrt(2.0 * hurst) * (near + tail)
    return fbm, dw


def simulate_fbm_rl(
    hurst: float, n_steps: int, dt: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample a Riemann-Liouville fBm path with the hybrid scheme.

    The kernel sqrt(2H) (t-s)^(H-1/2) is integrated exactly against the
    driver over the most recent step (jointly Gaussian with the plain
    increment), and approximated over earlier steps by evaluating it at the
    power-mean abscissa of each interval; the resulting discrete convolution
    runs through an FFT.

    Parameters
    ----------
    hurst : float
        Hurst exponent in (0, 1). 0.5 reduces the path to the running sum of
        the driver increments exactly.
    n_steps : int
        Number of grid steps (>= 2).
    dt : float
        Grid spacing.
    rng : numpy.random.Generator
        Source of Gaussian draws; the output is deterministic given its state.

    Returns
    -------
    fbm_path : ndarray, shape (n_steps + 1,)
        The fBm sampled at k*dt, starting at 0.
    driver_increments : ndarray, shape (n_steps,)
        The N(0, dt) Brownian increments that drove the path, for building
        correlated shocks downstream.
    """
    fbm, dw = simulate_fbm_rl_batch(hurst, n_steps, dt, rng, 1)
    return fbm[0], dw[0]


def fbm_covariance_rl(hurst: float, t: float, s: float) -> float:
    """Covariance E[W_t^H W_s^H] of the Riemann-Liouville fBm.

    Evaluates 2H * int_0^min(t,s) (t-u)^(H-1/2) (s-u)^(H-1/2) du by adaptive
    quadrature with relative tolerance 1e-10. The u -> min(t,s) endpoint
    singularity for H < 1/2 is integrable and handled by the extrapolating
    quadrature.
    """
    if not 0.0 < hurst < 1.0:
        raise ParameterError(f"hurst must lie in (0, 1), got {hurst}")
    if t < 0.0 or s < 0.0:
        raise ParameterError("times must be nonnegative")
    lo, hi = (t, s) if t <= s else (s, t)
    if lo == 0.0:
        return 0.0
    alpha = hurst - 0.5

    def integrand(u: float) -> float:
        return (hi - u) ** alpha * (lo - u) ** alpha

    value, _ = integrate.quad(integrand, 0.0, lo, epsabs=0.0, epsrel=1e-10, limit=400)
    return 2.0 * hurst * value


def rl_covariance_matrix(hurst: float, times: np.ndarray) -> np.ndarray:
    """Analytic covariance matrix of the RL fBm on strictly positive times.

    Uses the closed hypergeometric form of the covariance integral; it agrees
    with :func:`fbm_covariance_rl` to quadrature tolerance and is vectorized
    for matrix assembly.
    """
    t = np.asarray(times, dtype=float)
    if np.any(t <= 0.0):
        raise ParameterError("covariance matrix requires strictly positive times")
    hi = np.maximum.outer(t, t)
    lo = np.minimum.outer(t, t)
    z = lo / hi
    hyp = special.hyp2f1(1.0, 0.5 - hurst, 1.5 + hurst, z)
    return (
        2.0 * hurst / (hurst + 0.5)
        * lo ** (hurst + 0.5) * hi ** (hurst - 0.5) * hyp
    )


def _cholesky_factor(hurst: float, n_steps: int, dt: float) -> np.ndarray:
    times = dt * np.arange(1, n_steps + 1)
    cov = rl_covariance_matrix(hurst, times)
    scale = np.mean(np.diag(cov))
    for jitter in (0.0, 1e-14, 1e-12, 1e-10):
        try:
            return np.linalg.cholesky(cov + jitter * scale * np.eye(n_steps))
        except np.linalg.LinAlgError:
            continue
    raise NumericalError("fBm covariance matrix is numerically non-positive-definite")


def simulate_fbm_cholesky_batch(
    hurst: float, n_steps: int, dt: float, rng: np.random.Generator, n_paths: int
) -> np.ndarray:
    """Vectorized exact sampler: ``n_paths`` paths, shape (n_paths, n_steps + 1)."""
    _check_fbm_args(hurst, n_steps)
    if n_steps > CHOLESKY_MAX_STEPS:
        raise ParameterError(
            f"n_steps={n_steps} exceeds the dense factorization guard "
            f"({CHOLESKY_MAX_STEPS})"
        )
    if n_paths < 1:
        raise ParameterError(f"n_paths must be >= 1, got {n_paths}")
    factor = _cholesky_factor(hurst, n_steps, dt)
    z = rng.standard_normal((n_paths, n_steps))
    paths = np.empty((n_paths, n_steps + 1))
    paths[:, 0] = 0.0
    paths[:, 1:] = z @ factor.T
    return paths


def simulate_fbm_cholesky(
    hurst: float, n_steps: int, dt: float, rng: np.random.Generator
) -> np.ndarray:
    """Exact RL-fBm sample via dense factorization of the covariance matrix.

    Intended as a correctness oracle for the hybrid scheme; the grid is
    capped at 2048 steps to keep the dense factorization tractable.
    """
    return simulate_fbm_cholesky_batch(hurst, n_steps, dt, rng, 1)[0]


def simulate_rbergomi(
    params: RBergomiParams, rng: np.random.Generator | None = None
) -> PathPair:
    """Simulate one rough Bergomi price/variance path pair.

    The variance path is the lognormal functional of the fBm,

        v_k = forward_variance * exp(eta * W_(t_k)^H - 0.5 eta^2 t_k^(2H)),

    and the log price follows a log-Euler step with variance frozen over each
    interval. Price shocks are ``corr * eps + sqrt(1 - corr^2) * eps_perp``
    where ``eps`` is the normalized fBm driver increment.

    Parameters
    ----------
    params : RBergomiParams
        Validated model and grid parameters.
    rng : numpy.random.Generator, optional
        Random stream; defaults to the substream derived from ``params.seed``.

    Returns
    -------
    PathPair
    """
    if rng is None:
        rng = substream(params.seed)
    n = params.n_steps
    dt = params.dt
    eta = params.vol_of_vol
    lam = params.correlation

    fbm, dw = simulate_fbm_rl(params.hurst, n, dt, rng)
    eps_perp = rng.standard_normal(n)

    times = dt * np.arange(n + 1)
    variance = params.forward_variance * np.exp(
        eta * fbm - 0.5 * eta * eta * times ** (2.0 * params.hurst)
    )

    eps = dw / np.sqrt(dt)
    shocks = lam * eps + np.sqrt(1.0 - lam * lam) * eps_perp
    v_left = variance[:-1]
    log_increments = -0.5 * v_left * dt + np.sqrt(v_left * dt) * shocks
    price = np.empty(n + 1)
    price[0] = params.spot
    price[1:] = params.spot * np.exp(np.cumsum(log_increments))

    return PathPair(
        times=times,
        price=price,
        variance=variance,
        fbm=fbm,
        brownian_increments=dw,
    )
