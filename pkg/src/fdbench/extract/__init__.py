"""Feature extractors mapping curves to scalar feature vectors."""
from fdbench.extract.base import Extractor, FeatureBlock, NotFittedError, RawExtractor
from fdbench.extract.bspline import BsignalExtractor, bspline_basis, extract_bsignal
from fdbench.extract.dtwkernel import DTWKernelExtractor, extract_dtw_kernel
from fdbench.extract.multires import MultiResExtractor, extract_multires, multires_windows
from fdbench.extract.pca import PCAExtractor, extract_pca
from fdbench.extract.spectral import (
    FourierExtractor,
    WaveletExtractor,
    extract_fourier,
    extract_wavelets,
)
from fdbench.extract.tsfeat import TSFeatExtractor, extract_tsfeat

EXTRACTORS = {
    cls.method: cls
    for cls in (
        RawExtractor,
        FourierExtractor,
        WaveletExtractor,
        BsignalExtractor,
        PCAExtractor,
        DTWKernelExtractor,
        MultiResExtractor,
        TSFeatExtractor,
    )
}


def make_extractor(method, **params):
    try:
        cls = EXTRACTORS[method]
    except KeyError:
        raise ValueError(f"unknown extraction method {method!r}; known: {sorted(EXTRACTORS)}") from None
    return cls(**params)


__all__ = [
    "EXTRACTORS",
    "BsignalExtractor",
    "DTWKernelExtractor",
    "Extractor",
    "FeatureBlock",
    "FourierExtractor",
    "MultiResExtractor",
    "NotFittedError",
    "PCAExtractor",
    "RawExtractor",
    "TSFeatExtractor",
    "WaveletExtractor",
    "bspline_basis",
    "extract_bsignal",
    "extract_dtw_kernel",
    "extract_fourier",
    "extract_multires",
    "extract_pca",
    "extract_tsfeat",
    "extract_wavelets",
    "make_extractor",
    "multires_windows",
]
