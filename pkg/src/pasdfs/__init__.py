"""Photon-added-then-subtracted displaced Fock states in a truncated Fock basis."""

from .engineering import StateSpec, dfs_coefficients, pasdfs_amplitudes
from .errors import (AnnihilationError, CapacityError, DomainError, PasdfsError,
                     TruncationError)
from .fock import FockAmplitudes, pasdfs_oracle
from .husimi import QGrid, find_zeros, q_function, q_grid
from .moments import Moments, OracleMoments, moment, number_mean_and_variance
from .phase import (FluctuationReport, PhaseDistribution, phase_distribution,
                    phase_fluctuation_U, sine_cosine_moments)
from .witnesses import (WitnessReport, agarwal_tara, antibunching, hong_mandel, hosps,
                        klyshko, quadrature_variance_l, vogel)

__version__ = "0.1.0"
