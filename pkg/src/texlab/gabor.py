"""Gabor filter banks and first/second-moment texture features.

Each filter is an oriented cosine carrier under a Gaussian envelope,
DC-corrected to zero mean and scaled to unit L2 norm so responses are
comparable across scales. A bank of S scales times O orientations yields a
2*S*O feature vector: per filter, the mean absolute response and the
response standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConfigError, ImageTooSmallError, ShapeMismatchError

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

DEFAULT_ASPECT = 0.5
DEFAULT_SIGMA_RATIO = 0.56
DEFAULT_MAX_KERNEL = 31


@dataclass(frozen=True)
class GaborBank:
    kernels: tuple
    wavelengths: tuple
    orientations: tuple
    scale_count: int
    orientation_count: int

    def __len__(self) -> int:
        return len(self.kernels)

    @property
    def feature_dim(self) -> int:
        return 2 * len(self.kernels)


def gabor_kernel(wavelength: float, orientation: float, aspect: float = DEFAULT_ASPECT,
                 sigma_ratio: float = DEFAULT_SIGMA_RATIO,
                 max_kernel: int = DEFAULT_MAX_KERNEL) -> np.ndarray:
    """One zero-mean, unit-norm kernel; size is odd and capped at max_kernel."""
    if wavelength <= 0:
        raise ConfigError("wavelength must be positive")
    if max_kernel < 3 or max_kernel % 2 == 0:
        raise ConfigError("max_kernel must be an odd integer >= 3")
    sigma = sigma_ratio * wavelength
    half = int(np.ceil(2.5 * sigma))
    half = max(1, min(half, (max_kernel - 1) // 2))
    coords = np.arange(-half, half + 1, dtype=np.float64)
    y, x = np.meshgrid(coords, coords, indexing="ij")
    xr = x * np.cos(orientation) + y * np.sin(orientation)
    yr = -x * np.sin(orientation) + y * np.cos(orientation)
    envelope = np.exp(-(xr * xr + (aspect * yr) ** 2) / (2.0 * sigma * sigma))
    carrier = np.cos(2.0 * np.pi * xr / wavelength)
    dc = (envelope * carrier).sum() / envelope.sum()
    kernel = envelope * (carrier - dc)
    return kernel / np.linalg.norm(kernel)


def make_gabor_bank(scales: int, orientations: int, base_wavelength: float = 4.0,
                    wavelength_ratio: float = 2.0, aspect: float = DEFAULT_ASPECT,
                    sigma_ratio: float = DEFAULT_SIGMA_RATIO,
                    max_kernel: int = DEFAULT_MAX_KERNEL) -> GaborBank:
    """Bank of scales x orientations filters.

    Wavelengths follow a geometric sequence from ``base_wavelength``;
    orientations are evenly spaced over [0, pi).
    """
    if scales < 1 or orientations < 1:
        raise ConfigError("scales and orientations must both be >= 1")
    kernels, lams, phis = [], [], []
    for s in range(scales):
        lam = base_wavelength * wavelength_ratio**s
        for o in range(orientations):
            phi = np.pi * o / orientations
            kernels.append(gabor_kernel(lam, phi, aspect, sigma_ratio, max_kernel))
            lams.append(lam)
            phis.append(phi)
    return GaborBank(tuple(kernels), tuple(lams), tuple(phis), scales, orientations)


def luminance(image: np.ndarray) -> np.ndarray:
    """Rec. 601 luma of an HxWx3 image; HxW inputs pass through."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        return img
    if img.ndim == 3 and img.shape[2] == 3:
        return img @ LUMA_WEIGHTS
    raise ShapeMismatchError(f"expected HxW or HxWx3 image, got shape {img.shape}")


def _convolve_reflect(gray: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    ph, pw = kernel.shape[0] // 2, kernel.shape[1] // 2
    padded = np.pad(gray, ((ph, ph), (pw, pw)), mode="reflect")
    return fftconvolve(padded, kernel, mode="valid")


def extract_gabor_features(image: np.ndarray, bank: GaborBank) -> np.ndarray:
    """Convolve with every filter (reflect padding) and pool statistics.

    Returns [mean |response|, std(response)] per filter, concatenated in
    bank order.
    """
    gray = luminance(image)
    h, w = gray.shape
    features = np.empty(bank.feature_dim, dtype=np.float64)
    for i, kernel in enumerate(bank.kernels):
        if kernel.shape[0] > h or kernel.shape[1] > w:
            raise ImageTooSmallError(
                f"image {h}x{w} smaller than kernel {kernel.shape[0]}x{kernel.shape[1]}"
            )
        resp = _convolve_reflect(gray, kernel)
        features[2 * i] = np.abs(resp).mean()
        features[2 * i + 1] = resp.std()
    return features


def dominant_filter(features: np.ndarray, bank: GaborBank) -> tuple:
    """Index of the filter with the largest mean |response|, as (scale, orientation)."""
    means = np.asarray(features)[0::2]
    idx = int(np.argmax(means))
    return idx // bank.orientation_count, idx % bank.orientation_count
