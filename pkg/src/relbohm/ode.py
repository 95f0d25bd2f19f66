"""Fixed-step RK4 trajectory integration used to cross-check contours.

The contour method is the primary trajectory machinery precisely because
the velocity diverges at pair events; this integrator exists as an
independent oracle away from those loci.  It halves the step while the
velocity is large and halts cleanly when a divergence flag is hit.
"""

from __future__ import annotations

import numpy as np

__all__ = ["integrate_trajectory"]


class DivergenceHalt(Exception):
    """Internal signal: the velocity field flagged a density zero."""


def integrate_trajectory(velocity_fn, z0: float, t0: float, t1: float,
                         dt: float, v_refine: float = 5.0,
                         max_halvings: int = 12):
    """Integrate dz/dt = v(z, t) from t0 to t1 with classical RK4.

    velocity_fn(z, t) returns a float or None (divergence flag).  The
    step is halved (up to max_halvings times) whenever |v| at the step
    start exceeds v_refine.  Integration stops early at a divergence
    flag.

    Returns (t_array, z_array); t_array ends at t1 unless halted.
    """
    def vel(z, t):
        v = velocity_fn(z, t)
        if v is None:
            raise DivergenceHalt
        return v

    ts = [t0]
    zs = [z0]
    t, z = t0, z0
    direction = 1.0 if t1 >= t0 else -1.0
    dt = abs(dt)
    try:
        while direction * (t1 - t) > 1e-15:
            h = dt
            v0 = vel(z, t)
            halvings = 0
            while abs(v0) > v_refine and halvings < max_halvings:
                h *= 0.5
                halvings += 1
            h = min(h, direction * (t1 - t))
            hs = direction * h
            k1 = v0
            k2 = vel(z + 0.5 * hs * k1, t + 0.5 * hs)
            k3 = vel(z + 0.5 * hs * k2, t + 0.5 * hs)
            k4 = vel(z + hs * k3, t + hs)
            z = z + hs * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            t = t + hs
            ts.append(t)
            zs.append(z)
    except DivergenceHalt:
        pass
    return np.array(ts), np.array(zs)
