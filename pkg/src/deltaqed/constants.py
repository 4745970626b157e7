"""Physical constants and unit conversion.

All public inputs and outputs are ordinary frequencies in GHz. Internally every
frequency and rate is an angular frequency in rad/ns, i.e. ``2*pi*GHz``; the
factor of 2*pi is applied only by :func:`to_angular` / :func:`to_ghz`.
"""

import math

CONSTANTS_VERSION = "CODATA 2018 (exact SI)"

# CODATA values, 10 significant digits
ELEMENTARY_CHARGE = 1.602176634e-19  # C
PLANCK = 6.626070150e-34  # J s
HBAR = 1.054571818e-34  # J s
RESISTANCE_QUANTUM = PLANCK / (4.0 * ELEMENTARY_CHARGE**2)  # h/(4e^2), ohm

TWO_PI = 2.0 * math.pi

# rad/ns -> rad/s
PER_NS = 1e9

UNIT_CONVENTION = "I/O: ordinary frequency in GHz; internal: angular frequency in rad/ns"


def to_angular(ghz):
    """Ordinary frequency in GHz -> angular frequency in rad/ns."""
    return TWO_PI * ghz


def to_ghz(angular):
    """Angular frequency in rad/ns -> ordinary frequency in GHz."""
    return angular / TWO_PI
