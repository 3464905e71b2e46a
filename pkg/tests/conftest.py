import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import halflab as hl

settings.register_profile(
    "lab", settings(max_examples=50, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow]))
settings.load_profile("lab")

# closed forms used across the suite
KAPPA_S_O3 = 4.0 - math.sqrt(17.0)
KAPPA_U_O3 = 4.0 + math.sqrt(17.0)


def o3_marginal_pair(alpha: float = -0.5):
    """Ghost weights (b1, b2) = ((1+k)/k, -1/k) with k the stable z=1 root."""
    if alpha != -0.5:
        probe = hl.builtin_o3(alpha, 0.0, 0.0)
        roots = hl.characteristic_roots(probe, 1.0)
        k = min((r for r in roots if abs(r) < 1 - 1e-9), key=abs).real
    else:
        k = KAPPA_S_O3
    return (1.0 + k) / k, -1.0 / k


@pytest.fixture(scope="session")
def lfr():
    return hl.builtin_lfr(-0.5, 0.75, 5.0)


@pytest.fixture(scope="session")
def o3():
    b1, b2 = o3_marginal_pair()
    return hl.builtin_o3(-0.5, b1, b2)


def make_half_field(scheme, interior):
    """Field with the given interior and rule-consistent ghosts."""
    interior = np.asarray(interior, dtype=float)
    ghosts = np.zeros(scheme.r)
    for i in range(scheme.r):
        for k in range(1, scheme.p_b + 1):
            if k - 1 < interior.size:
                ghosts[scheme.r - 1 - i] += scheme.b[i, k - 1] * interior[k - 1]
    return hl.HalfLineField(scheme.r, np.concatenate([ghosts, interior]))
