"""Quantitative information flow over finite channels.

Classical and Kolmogorov-Nagumo-generalized vulnerabilities, leakages and
capacities, the order-alpha information measures they recover, and a
numerical harness that checks the governing theorems and axioms at desk
scale.
"""

from .alpha import (
    AlphaOrder,
    alpha_loss,
    arimoto_conditional_entropy,
    arimoto_mi,
    min_expected_alpha_loss,
    pointwise_alpha_leakage,
    renyi_divergence,
    renyi_entropy,
    sibson_mi,
    sibson_via_pointwise,
)
from .capacity import (
    SimplexOptimizerConfig,
    alpha_beta_capacity_objective,
    alpha_beta_leakage,
    bayes_capacity,
    ldp_leakage,
    max_case_capacity_bound,
    maximal_alpha_beta_leakage,
    maximal_alpha_leakage,
    multiplicative_f_capacity,
    renyi_ldp,
    sup_over_prior,
)
from .core import Channel, Hyper, Prior, compose, ni_channel, push
from .errors import DimensionMismatch, ParameterError, QifError, ValidationError
from .fmeans import (
    FMeanSpec,
    FMeanValidityWarning,
    custom_fmean,
    ell_alpha,
    f_alpha,
    h_alpha_beta,
    identity_fmean,
)
from .gains import (
    FiniteMatrixGain,
    GainSpec,
    IdentityGain,
    PointwiseInfoGain,
    SimplexGain,
)
from .vulnerability import (
    ADDITIVE,
    MULTIPLICATIVE,
    LeakageReport,
    argmax_action,
    gen_posterior_vulnerability_avg,
    gen_posterior_vulnerability_max,
    gen_prior_vulnerability,
    leakage,
    posterior_vulnerability_avg,
    posterior_vulnerability_max,
    prior_vulnerability,
)

__version__ = "0.1.0"
