"""von Mises-Fisher mixture approximation of densities on spheres."""

import json

from ._spheremix import (
    DomainError,
    FormatError,
    NonDensity,
    ResourceError,
    VmfMixture,
    __version__,
    condition2_tail,
    funk_hecke_coefficients,
    gegenbauer_normalized,
    harmonic_dimension,
    lemma1_csv,
    log_bessel_i,
    log_norm_const,
    partition_measures,
    standard_target_names,
    surface_measure,
    tail_bound,
)
from . import _spheremix


def approximate(target, delta, m=None, max_n=512.0, max_blocks=20000):
    """Approximate a built-in target (by name) or a VmfMixture; returns the report dict."""
    if isinstance(target, VmfMixture):
        text = _spheremix.approximate_mixture(target, delta, max_n, max_blocks)
    else:
        text = _spheremix.approximate(target, 2 if m is None else m, delta, max_n, max_blocks)
    return json.loads(text)
