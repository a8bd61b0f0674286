"""Fourier and discrete wavelet features."""
import numpy as np

from fdbench.extract.base import Extractor

FOURIER_COEFFS = ("amplitude", "phase")


def extract_fourier(X, trafo_coeff="amplitude"):
    """One-sided DFT amplitudes or phases, k = 0..floor(L/2)."""
    return FourierExtractor(trafo_coeff=trafo_coeff).fit_transform(X)


class FourierExtractor(Extractor):
    method = "fourier"
    stateless = True

    def __init__(self, trafo_coeff="amplitude"):
        if trafo_coeff not in FOURIER_COEFFS:
            raise ValueError(f"trafo_coeff must be one of {FOURIER_COEFFS}, got {trafo_coeff!r}")
        super().__init__(trafo_coeff=trafo_coeff)

    def output_width(self, length):
        return length // 2 + 1

    def _transform(self, X):
        spec = np.fft.rfft(X, axis=1)
        if self.params["trafo_coeff"] == "amplitude":
            return np.abs(spec), [f"amp{k}" for k in range(spec.shape[1])], {}
        return np.arctan2(spec.imag, spec.real), [f"phase{k}" for k in range(spec.shape[1])], {}


_SQRT3 = np.sqrt(3.0)

# orthonormal scaling (low-pass) filters, sum = sqrt(2)
WAVELET_FILTERS = {
    "haar": np.array([1.0, 1.0]) / np.sqrt(2.0),
    "d4": np.array([1 + _SQRT3, 3 + _SQRT3, 3 - _SQRT3, 1 - _SQRT3]) / (4 * np.sqrt(2.0)),
    "d8": np.array([
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.02798376941685985421,
        -0.18703481171909308407,
        0.03084138183556076363,
        0.03288301166688519974,
        -0.01059740178506903211,
    ]),
}
BOUNDARIES = ("periodic", "reflection")


def wavelet_filter(name):
    """Scaling and wavelet filters ``(g, h)`` with ``h[l] = (-1)^l g[L-1-l]``."""
    try:
        g = WAVELET_FILTERS[name]
    except KeyError:
        raise ValueError(
            f"unsupported wavelet filter {name!r}; available: {sorted(WAVELET_FILTERS)}"
        ) from None
    h = g[::-1] * (-1.0) ** np.arange(len(g))
    return g, h


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def _padded_length(length, boundary):
    return _next_pow2(2 * length if boundary == "reflection" else length)


def _extend(X, boundary):
    if boundary == "reflection":
        X = np.concatenate([X, X[:, ::-1]], axis=1)
    P = _next_pow2(X.shape[1])
    return X[:, np.arange(P) % X.shape[1]]


def dwt_periodic(X, g, h):
    """Full-depth periodic pyramid of rows whose length is a power of two.

    Returns the detail levels finest first, then the final approximation.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    approx = X
    details = []
    taps = np.arange(len(g))
    while approx.shape[1] > 1:
        N = approx.shape[1]
        idx = (2 * np.arange(N // 2)[:, None] + taps[None, :]) % N
        windows = approx[:, idx]
        details.append(windows @ h)
        approx = windows @ g
    return details, approx


def extract_wavelets(X, filter="d8", boundary="periodic"):
    return WaveletExtractor(filter=filter, boundary=boundary).fit_transform(X)


class WaveletExtractor(Extractor):
    """Wavelet coefficients at every resolution level.

    Rows are extended to the next power of two: by wrapping (``periodic``)
    or by appending the mirrored series first (``reflection``).
    """

    method = "wavelets"
    stateless = True

    def __init__(self, filter="d8", boundary="periodic"):
        wavelet_filter(filter)
        if boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
        super().__init__(filter=filter, boundary=boundary)

    def output_width(self, length):
        return _padded_length(length, self.params["boundary"])

    def _check(self, X):
        g, _ = wavelet_filter(self.params["filter"])
        if X.shape[1] < len(g):
            raise ValueError(f"series length {X.shape[1]} shorter than the {self.params['filter']} filter")

    def _transform(self, X):
        g, h = wavelet_filter(self.params["filter"])
        details, approx = dwt_periodic(_extend(X, self.params["boundary"]), g, h)
        names = [f"d{lv}.{t}" for lv, d in enumerate(details, start=1) for t in range(d.shape[1])]
        names.append(f"a{len(details)}.0")
        return np.hstack(details + [approx]), names, {}
