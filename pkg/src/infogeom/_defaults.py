"""Library-wide defaults, overridable through environment variables.

Read once at import time:

* ``INFOGEOM_GRID_SIZE``  default node count for interval sample spaces
* ``INFOGEOM_EXACT_TOL``  tolerance for exact-arithmetic identities
* ``INFOGEOM_QUAD_TOL``   tolerance for quadrature-limited identities
"""

import os

DEFAULT_GRID_SIZE = int(os.environ.get("INFOGEOM_GRID_SIZE", "512"))

# identities that hold in exact arithmetic (sums, relabelings)
EXACT_TOL = float(os.environ.get("INFOGEOM_EXACT_TOL", "1e-12"))

# identities limited by grid resolution
QUAD_TOL = float(os.environ.get("INFOGEOM_QUAD_TOL", "1e-6"))

# shrinking neighborhood sizes used by convergence probes
DEFAULT_EPS_SCHEDULE = (1e-1, 1e-2, 1e-3)
