from .channels import (ChannelModel, HorizonError, apply_channel, apply_exp_involution,
                       apply_hybrid_nor, apply_inertial, apply_pure, exp_channel_for,
                       inertial_for, sis_delays)
from .compare import ComparisonReport, NormalizationError, compare_models, oracle_reference
from .traces import (DigitalTrace, SampledWaveform, TraceFormatError, TraceGenConfig,
                     deviation_area, digitize, generate_traces, nor_eval)

__all__ = [
    "ChannelModel", "ComparisonReport", "DigitalTrace", "HorizonError", "NormalizationError",
    "SampledWaveform", "TraceFormatError", "TraceGenConfig", "apply_channel",
    "apply_exp_involution", "apply_hybrid_nor", "apply_inertial", "apply_pure",
    "compare_models", "deviation_area", "digitize", "exp_channel_for", "generate_traces",
    "inertial_for", "nor_eval", "oracle_reference", "sis_delays",
]
