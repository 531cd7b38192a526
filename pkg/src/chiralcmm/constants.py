"""Physical constants (SI, CODATA) pinned in one place.

hbar and k_B fix the absolute scale of thermal occupancies and drive
amplitudes; everything else in the package is expressed in angular
frequencies (rad/s) and is independent of these values.
"""

import math

HBAR = 1.054571817e-34  # J s, reduced Planck constant
KB = 1.380649e-23       # J/K, Boltzmann constant (exact SI value)

TWO_PI = 2.0 * math.pi


def hz(value):
    """Convert an ordinary frequency (Hz, i.e. omega/2pi) to rad/s."""
    return TWO_PI * value


def to_hz(omega):
    """Convert an angular frequency (rad/s) back to ordinary Hz."""
    return omega / TWO_PI
