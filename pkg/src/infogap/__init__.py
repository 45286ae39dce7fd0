"""Conflict and collision probabilities for hazardous driving scenarios with
information gaps, with a Monte Carlo oracle for every closed-form result."""

__version__ = "0.1.0"
