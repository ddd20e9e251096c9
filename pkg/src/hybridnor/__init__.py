"""Hybrid ODE delay model of a 2-input NOR gate: trajectories, MIS delays, fitting, simulation."""

from .params import MODES, TABLE_I, GateParams, Mode, ParameterError, StateVector

__all__ = ["MODES", "TABLE_I", "GateParams", "Mode", "ParameterError", "StateVector"]
__version__ = "0.1.0"
