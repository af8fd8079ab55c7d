from fractions import Fraction

GENERIC_FACTOR = "generic"
GAUSS_FACTOR = "gauss"
EISENSTEIN_FACTOR = "eisenstein"
CUSTOM_FACTOR = "custom"

PRESET_FACTORS = (GENERIC_FACTOR, GAUSS_FACTOR, EISENSTEIN_FACTOR)

# Multiplication by xi = exp(2 pi i / 3) on the lattice Z + xi Z
XI = ((0, -1), (1, -1))

# Multiplication by i on the lattice Z + i Z
GAUSS_UNIT = ((0, -1), (1, 0))

# Fraction of a full turn by which each preset unit generator rotates
GENERIC_ANGLE = Fraction(1, 2)
GAUSS_ANGLE = Fraction(1, 4)
EISENSTEIN_ANGLE = Fraction(5, 6)

# Default iso tags for the CM presets
GAUSS_TAG = "E_i"
EISENSTEIN_TAG = "E_xi"

# CM fields, used to rule out isogenies between presets
GAUSS_FIELD = "Q(i)"
EISENSTEIN_FIELD = "Q(sqrt(-3))"
