"""Basins of attraction on a complex grid."""

from ._accel import ENV_FLAG, default_backend, numba_enabled
from .kernels import NONE
from .render import (
    BACKENDS,
    BasinConfig,
    BasinImage,
    DEFAULT_PALETTE,
    classify_orbit,
    orbit,
    render_basin,
    save_basin,
    write_basin_csv,
    write_ppm,
    write_sidecar,
)
