from .bessel import log_bessel_i, log_vmf_normalizer
from .common import (
    load_mixture,
    mixture_fitting_set,
    responsibilities,
    responsibilities_batch,
    save_mixture,
)
from .gmm import (
    VARIANCE_FLOOR,
    GaussianMixture,
    MixtureError,
    fit_gmm,
    gmm_log_densities,
    gmm_log_responsibilities,
)
from .vmf import (
    KAPPA_CAP,
    KAPPA_FLOOR,
    VmfMixture,
    estimate_kappa,
    fit_movmf,
    unit_rows,
    vmf_log_densities,
    vmf_log_responsibilities,
)

__all__ = [
    "GaussianMixture",
    "VmfMixture",
    "MixtureError",
    "VARIANCE_FLOOR",
    "KAPPA_CAP",
    "KAPPA_FLOOR",
    "fit_gmm",
    "fit_movmf",
    "estimate_kappa",
    "responsibilities",
    "responsibilities_batch",
    "mixture_fitting_set",
    "save_mixture",
    "load_mixture",
    "unit_rows",
    "log_bessel_i",
    "log_vmf_normalizer",
    "gmm_log_densities",
    "gmm_log_responsibilities",
    "vmf_log_densities",
    "vmf_log_responsibilities",
]
