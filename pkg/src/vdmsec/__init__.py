"""Vandermonde null-space precoding for frequency-selective broadcast channels
with confidential messages."""

from .channel import ChannelVector, RngStream, ToeplitzChannel, make_toeplitz, sample_channel
from .errors import (
    ConfigError,
    DegenerateChannelError,
    DimensionError,
    NotOrthonormalError,
    NotPSDError,
    PropertyViolation,
    RankCertificateError,
    VdmError,
)
from .multiuser import (
    DofTuple,
    MultiuserInstance,
    kuser_dof_region,
    kuser_equal_power_rates,
    kuser_precoder,
    two_user_dof_region,
    two_user_precoder,
    two_user_rates,
)
from .optimizer import (
    AscentOptions,
    KktCertificate,
    WaterfillingSolution,
    WeightPair,
    ascend_case1,
    ascend_case3,
    greedy_max_sum_rate,
    maximize_case2,
    maximize_weighted,
    rate_region_sweep,
    secrecy_rate_vdm,
    theta_solve,
    waterfill,
)
from .precoder import (
    RootSet,
    VandermondePrecoder,
    build_precoder,
    channel_roots,
    null_complement,
    null_space_basis,
    raw_vandermonde,
)
from .rates import (
    CovarianceSet,
    EffectiveChannels,
    RateTuple,
    effective_channels,
    equal_power_rates,
    fixed_covariance_secrecy_rate,
    rate_R01,
    rate_R02,
    rate_R1,
)

__version__ = "0.1.0"
