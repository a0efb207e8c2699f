"""Binary signaling over a scalar modulo-delta AWGN channel."""

__version__ = "0.1.0"

from .wrapped_gauss import (  # noqa: E402
    WrappedGaussian,
    band_probability,
    density_direct,
    density_fourier,
    q_tail,
)
from .channel import (  # noqa: E402
    BitSource,
    ChannelParams,
    SymbolMap,
    average_power,
    generate_bits,
    map_bits,
    mod_reduce,
    transmit,
)
from .decision import (  # noqa: E402
    MAP,
    ML,
    DecisionThresholds,
    DegenerateDecision,
    EstimatedMAP,
    WeightedRule,
    decide,
    decide_sequence,
    likelihood,
    tau,
    thresholds_map,
    thresholds_uniform,
)
from .analysis import (  # noqa: E402
    PeReport,
    optimal_map_search,
    pe_map,
    pe_ml,
    pe_oracle,
    pe_uniform,
)
from .estimator import PriorEstimate, estimate_prior, two_step_decode  # noqa: E402
