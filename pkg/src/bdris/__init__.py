"""Closed-form passive beamforming for beyond-diagonal RIS and a two-stage
active/passive design for multi-user MISO sum-rate maximization."""

from .active import FPState, Precoder, fp_beamforming, rzf_beamforming, sinr, sum_rate
from .channel import ChannelSet, ScenarioConfig, effective_channel, path_loss, sample_channels
from .passive import (RelaxedSolution, VectorizedProblem, passive_design, relaxed_lowcomplexity,
                      relaxed_optimal, sum_channel_gain, sum_channel_gain_gradient)
from .projections import (Architecture, ScatteringMatrix, block_diagonalize, project,
                          project_group, project_single, sym, symuni, uni)

__version__ = "0.1.0"
