from ._core import (
    MongeAlignError,
    Model,
    barycenter,
    bures_wasserstein_dist,
    expcorr_psd,
    fit,
    gen_stationary,
    mixture_spectrum,
    monge_map,
    read_signal,
    welch_cross_psd,
    welch_psd,
    write_signal,
)

__all__ = [
    "MongeAlignError",
    "Model",
    "barycenter",
    "bures_wasserstein_dist",
    "expcorr_psd",
    "fit",
    "gen_stationary",
    "mixture_spectrum",
    "monge_map",
    "read_signal",
    "welch_cross_psd",
    "welch_psd",
    "write_signal",
]
