import math
import pathlib
import warnings

import numpy as np

from .errors import PhysicsWarning

def path_replace(path, substring, replacement):
    return pathlib.Path(str(path).replace(str(substring), str(replacement)))

def warn(message):
    warnings.warn(message, PhysicsWarning, stacklevel=2)

# Odd number of sites whose half-width is at least `half_width`
def odd_lattice_size(half_width):
    return 2 * int(math.ceil(half_width)) + 1

# Offsets of the sites from the center site, for a lattice of `n_sites` (odd) sites
def site_offsets(n_sites):
    center = n_sites // 2
    return np.arange(n_sites) - center

# Rounds `value` to the closest integer, raising if `value` is too far from it.
# Used for step counts (t_max / dt) where float division leaves a tiny residue.
def as_step_count(value, rel_tol=1e-9):
    count = int(round(value))
    if(abs(count - value) > rel_tol * max(1.0, abs(value))):
        return None
    return count

# Least-squares slope of log(y) against log(x)
def loglog_fit(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return slope, intercept
