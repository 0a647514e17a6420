"""Multivariate Gaussian fitting and the Frechet distance between fits.

The distance between Gaussians (m_a, C_a) and (m_b, C_b) is

    ||m_a - m_b||^2 + Tr(C_a) + Tr(C_b) - 2 Tr((C_a C_b)^(1/2))

with the cross term evaluated through the symmetric reformulation

    Tr((C_a C_b)^(1/2)) = Tr((C_a^(1/2) C_b C_a^(1/2))^(1/2))

whose value equals the sum of singular values of C_b^(1/2) C_a^(1/2), so
every decomposition runs on a symmetric PSD matrix or a real product of
such roots and no complex arithmetic is ever needed. All work is float64
regardless of how the embeddings were stored. Rank-deficient covariances
(fewer samples than dimensions) are fully supported: negative round-off
eigenvalues are clamped to zero instead of poisoning the square root.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientSamplesError,
    NumericalError,
    NumericalWarning,
    ValidationError,
)

__all__ = [
    "GaussianStats",
    "FrechetDiagnostics",
    "fit_gaussian",
    "matrix_sqrt_psd",
    "frechet_distance",
    "frechet_distance_full",
]

# Eigenvalues below EIGVAL_CLAMP_REL * lambda_max count as zero.
EIGVAL_CLAMP_REL = 1e-10
# PSD acceptance: eigenvalues may dip to -PSD_TOL_REL * lambda_max.
PSD_TOL_REL = 1e-8
# Ridge scale for the one retry after an eigensolve failure.
REGULARIZATION_SCALE = 1e-6
# Negative totals larger than this in magnitude trigger a warning when clamped.
CLAMP_WARN_ABS = 1e-6


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector, symmetrized covariance and sample count of a fit."""

    mean: np.ndarray
    cov: np.ndarray
    sample_count: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.ndim != 1:
            raise ValidationError(f"mean must be a vector, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise ValidationError(
                f"covariance shape {cov.shape} does not match dimension {mean.size}"
            )
        if self.sample_count < 2:
            raise InsufficientSamplesError(
                f"Gaussian statistics need at least 2 samples, got {self.sample_count}"
            )
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise ValidationError("Gaussian statistics contain non-finite entries")
        cov = (cov + cov.T) / 2.0
        eigvals = np.linalg.eigvalsh(cov)
        lmax = float(eigvals[-1])
        if eigvals[0] < -PSD_TOL_REL * max(lmax, 0.0):
            raise ValidationError(
                f"covariance is not positive semidefinite within tolerance "
                f"(min eigenvalue {eigvals[0]:.3e}, max {lmax:.3e})"
            )
        mean = mean.copy()
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class FrechetDiagnostics:
    """How much numerical help a distance evaluation needed."""

    regularized: bool = False
    clamped: float = 0.0  # magnitude of the negative total clamped to zero


def fit_gaussian(samples: np.ndarray) -> GaussianStats:
    """Fit mean and unbiased (n-1 divisor) covariance to an (n, p) matrix."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2:
        raise ValidationError(f"samples must be an (n, p) matrix, got shape {samples.shape}")
    n = samples.shape[0]
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 samples to fit a Gaussian, got {n}")
    if not np.isfinite(samples).all():
        raise ValidationError("samples contain non-finite entries")
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (n - 1)
    return GaussianStats(mean=mean, cov=cov, sample_count=n)


def _clamped_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix with tiny/negative values zeroed."""
    eigvals, eigvecs = np.linalg.eigh(m)
    lmax = float(eigvals[-1])
    eigvals = np.where(eigvals < EIGVAL_CLAMP_REL * max(lmax, 0.0), 0.0, eigvals)
    return eigvals, eigvecs


def matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root: returns S with S @ S == m up to round-off.

    `m` must be symmetric to 1e-10 relative tolerance. Negative eigenvalues
    (round-off from rank-deficient inputs) are clamped to zero.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {m.shape}")
    scale = float(np.abs(m).max()) if m.size else 0.0
    if scale and float(np.abs(m - m.T).max()) > 1e-10 * scale:
        raise ValidationError("matrix is not symmetric within 1e-10 relative tolerance")
    try:
        eigvals, eigvecs = _clamped_eigh((m + m.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
    return (root + root.T) / 2.0


def _trace_sqrt_product(cov_a: np.ndarray, cov_b: np.ndarray) -> float:
    """Tr((cov_a cov_b)^(1/2)) via the symmetric reformulation.

    With S_a, S_b the PSD square roots, the target equals
    Tr((S_a cov_b S_a)^(1/2)) whose eigenvalues are the singular values of
    S_b S_a; summing those via SVD works on the unsquared eigenvalue scale,
    so small genuine eigendirections are kept instead of being clamped away.
    """
    root_a = matrix_sqrt_psd(cov_a)
    root_b = matrix_sqrt_psd(cov_b)
    return float(np.linalg.svd(root_b @ root_a, compute_uv=False).sum())


def frechet_distance_full(
    a: GaussianStats, b: GaussianStats
) -> tuple[float, FrechetDiagnostics]:
    """Frechet distance plus diagnostics about regularization and clamping."""
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")

    regularized = False
    try:
        trace_cross = _trace_sqrt_product(a.cov, b.cov)
    except np.linalg.LinAlgError:
        trace_cross = None
    except NumericalError:
        trace_cross = None
    if trace_cross is None:
        # one retry with a small ridge on both covariances
        eps = REGULARIZATION_SCALE * float(
            np.concatenate([np.diag(a.cov), np.diag(b.cov)]).mean()
        )
        eye = np.eye(a.dim)
        try:
            trace_cross = _trace_sqrt_product(a.cov + eps * eye, b.cov + eps * eye)
        except (np.linalg.LinAlgError, NumericalError) as exc:
            raise NumericalError(
                "eigendecomposition failed even after regularization",
                diagnostics={"epsilon": eps, "dim": a.dim},
            ) from exc
        regularized = True

    mean_diff = a.mean - b.mean
    value = float(
        mean_diff @ mean_diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * trace_cross
    )

    clamped = 0.0
    if value < 0.0:
        clamped = -value
        if clamped > CLAMP_WARN_ABS:
            warnings.warn(
                f"Frechet distance clamped from {value:.3e} to 0; result is at the "
                "edge of numerical resolution",
                NumericalWarning,
                stacklevel=2,
            )
        value = 0.0
    return value, FrechetDiagnostics(regularized=regularized, clamped=clamped)


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """Frechet distance between two fitted Gaussians (non-negative scalar)."""
    value, _ = frechet_distance_full(a, b)
    return value
