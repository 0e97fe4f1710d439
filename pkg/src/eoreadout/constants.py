"""Physical constants (CODATA 2018, 12 significant digits)."""

HBAR = 1.05457181765e-34      # J s
K_B = 1.38064900000e-23       # J / K
E_CHARGE = 1.60217663400e-19  # C

TWO_PI = 6.28318530718

# unit multipliers for config I/O
EV = E_CHARGE                 # J per eV
MICRO_EV = 1e-6 * EV          # J per ueV
