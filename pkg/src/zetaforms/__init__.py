"""Linear forms in odd zeta values: exact construction, saddle-point asymptotics,
rank lower bounds, parameter planners and spread extraction."""

__version__ = "0.1.0"
