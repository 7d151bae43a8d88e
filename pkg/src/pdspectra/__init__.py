"""Spectral measures, positive definite kernels and their reproducing kernel Hilbert spaces."""
from .errors import PdSpectraError
from .spectra import (CATALOG_VERSION, SpectralMeasure, bochner_eval, catalog, get_pair,
                      gram_matrix, psd_check)

__all__ = ["CATALOG_VERSION", "PdSpectraError", "SpectralMeasure", "bochner_eval", "catalog",
           "get_pair", "gram_matrix", "psd_check"]
__version__ = "0.1.0"
