"""Numerical engine for prediction with expert advice.

Subpackages: ``specfun`` (special functions and the lambda inverse map),
``core`` (domain types, quantile, discrete derivatives), ``learners``
(MWU and potential players, heat-term evaluation), ``environments``
(adversaries and Brownian gain processes), ``engine`` (game loops and the
Monte Carlo harness), ``verifier`` (inequality sweeps), ``cli``.
"""

__version__ = "0.1.0"
