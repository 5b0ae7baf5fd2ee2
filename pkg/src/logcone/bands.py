"""Recorded empirical bands, per dimension, for the corpus-level checks.

The theory guarantees dimension-dependent constants exist but does not
quantify them, so the toolkit records what the standing corpus exhibits and
holds future inputs to those bands.  Regenerate with
``python scripts/record_bands.py`` after changing the corpus; the script
prints this file's dictionaries with fresh numbers (measured extremes padded
by a safety margin).
"""

#: sup of the density of an isotropic normalized grid, keyed by dim
SUP_DENSITY_BAND = {
    1: (0.20, 1.10),
    2: (0.05, 1.10),
    3: (0.01, 1.10),
}

#: central-hyperplane slice mass of an isotropic density, keyed by dim (>= 2)
SLICE_MASS_BAND = {
    2: (0.20, 1.10),
    3: (0.04, 1.10),
}

#: floor on the axis-variance retention ratio of symmetrization
VARIANCE_RETENTION_FLOOR = {
    1: 0.10,
    2: 0.10,
    3: 0.10,
}

#: ceiling on lipschitz(convolution) * sqrt(var_x * var_y) over variance sweeps
LIPSCHITZ_PRODUCT_BOUND = {
    1: 0.30,
    2: 0.10,
}

#: band for profile-convolution value * sqrt(var_x * var_y), keyed by dim
PROFILE_CONV_BAND = {
    2: (0.01, 1.00),
    3: (0.01, 1.00),
}
