"""Random valid cells for property checks, by rejection from simple boxes."""

import numpy as np

from .trig import E2, H2, HEX, S2, GeometryKind, valid_mask

_BOXES = {
    (E2, "lengths"): (0.3, 3.0),
    (S2, "lengths"): (0.2, 2.6),
    (H2, "lengths"): (0.2, 3.0),
    (HEX, "lengths"): (0.2, 2.5),
    (S2, "angles"): (0.3, 2.8),
    (H2, "angles"): (0.1, 1.4),
    (HEX, "angles"): (0.2, 2.5),
    (E2, "length-radius"): (0.2, 3.0),
    (S2, "length-radius"): (0.1, 1.2),
    (H2, "length-radius"): (0.1, 2.0),
    (HEX, "length-radius"): (0.1, 2.0),
    (S2, "angle-radius"): (0.05, 1.5),
    (H2, "angle-radius"): (-0.4, 0.5),
    (HEX, "angle-radius"): (-0.4, 1.6),
}


def sample_cells(g, parameterization, n, rng, margin=0.05):
    """``n`` triples strictly inside the moduli region, away from its walls.

    ``margin`` is the minimum slack demanded of every defining inequality,
    which keeps finite-difference oracles well conditioned.
    """
    g = GeometryKind.parse(g)
    if (g, parameterization) == (E2, "angles"):
        t = rng.dirichlet(np.ones(3), size=4 * n + 16) * np.pi
        t = t[np.all(t > margin, axis=1)]
        return t[:n]
    lo, hi = _BOXES[(g, parameterization)]
    out = np.empty((0, 3))
    while len(out) < n:
        x = rng.uniform(lo, hi, size=(4 * n + 16, 3))
        ok = valid_mask(g, x, parameterization) & _slack(g, x, parameterization, margin)
        out = np.concatenate([out, x[ok]])
    return out[:n]


def _slack(g, x, param, m):
    a, b, c = x[..., 0], x[..., 1], x[..., 2]
    s = a + b + c
    pair = np.minimum(np.minimum(a + b - c, b + c - a), c + a - b)
    pi = np.pi
    if param == "lengths":
        ok = np.ones(len(x), bool) if g is HEX else pair > m
        if g is S2:
            ok &= (2 * pi - s > m) & np.all(pi - x > m, axis=1)
        return ok
    if param == "angles":
        if g is H2:
            return pi - s > m
        if g is S2:
            return (s - pi > m) & (pi - pair > m)
        return np.ones(len(x), bool)
    if param == "angle-radius":
        ok = np.minimum(np.minimum(a + b, b + c), c + a) > m
        if g is H2:
            ok &= pi / 2 - s > m
        if g is S2:
            ok &= (s - pi / 2 > m) & (np.maximum(np.maximum(a + b, b + c), c + a) < pi - m)
        return ok
    if g is S2:
        return pi - s > m
    return np.ones(len(x), bool)
