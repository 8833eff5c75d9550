"""Capacity-optimal beamforming and outage analysis for RIS-aided MISO downlinks
under Rician fading."""

__version__ = "0.1.0"

from .beamforming import (
    BeamformingResult,
    analog_beamformer,
    beamform,
    digital_beamformer,
    mrt_beamformer,
    optimal_ris_phases,
    oracle_grid_search,
    snr,
)
from .bounds import BoundReport, bound_gap, bound_report, capacity, snr_upper_bound
from .channel import ChannelRealization, draw_channel, los_channel, steering_vector, trial_rng
from .config import SystemConfig
from .inversion import EulerSettings, InversionError, invert_mgf_to_cdf
from .mgf import MgfEvaluator, QuadratureError, laplace_of_rician_cdf
from .outage import (
    OutageCurve,
    monte_carlo_capacity,
    monte_carlo_outage,
    outage_lower_bound,
    simulate_snr,
)
from .specfun import RicianParams, bessel_i0, bessel_i0e, marcum_q1, rician_cdf, rician_pdf
