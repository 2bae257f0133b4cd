"""Physical constants (CODATA values from scipy.constants)."""

from scipy import constants as _c

Q = _c.e  # elementary charge [C]
K_B = _c.k  # Boltzmann constant [J/K]
N_AVOGADRO = _c.N_A  # [1/mol]
EPS_0 = _c.epsilon_0  # vacuum permittivity [F/m]


def thermal_voltage(T: float) -> float:
    """kT/q in volts."""
    return K_B * T / Q
