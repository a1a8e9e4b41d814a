"""Monotone one-variable charts u = ∫_{basepoint}^{x} base(t)**power dt."""

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InverseOutOfRange
from .quadrature import BASES, power_integral, singular_end_integral

# where each base function vanishes (finite zeros at a domain end)
_ZEROS = {"id": 0.0, "sin": (0.0, np.pi), "sinh": 0.0, "tan_half": 0.0, "tanh_half": 0.0,
          "cos": (-np.pi / 2, np.pi / 2)}
# where each base function blows up at a finite domain end
_POLES = {"cot_half": 0.0, "coth_half": 0.0, "tan_half": np.pi}


@functools.lru_cache(maxsize=256)
def _inverse_table(chart):
    """Monotone samples (u, x) of a chart for starting its inverse."""
    lo, hi, b = chart.lo, chart.hi, chart.basepoint
    left = b - np.geomspace(1e-3, 64.0, 48)[::-1] if np.isinf(lo) else lo + (b - lo) * (1 - np.geomspace(1e-6, 1.0, 48))
    right = b + np.geomspace(1e-3, 64.0, 48) if np.isinf(hi) else b + (hi - b) * (1 - np.geomspace(1e-6, 1.0, 48)[::-1])
    xs = np.unique(np.concatenate([left, [b], right]))
    xs = xs[(xs > lo) & (xs < hi) & (xs != lo) & (xs != hi)]
    with np.errstate(all="ignore"):
        pieces = power_integral(chart.base, chart.power, xs[:-1], xs[1:])
    k = int(np.searchsorted(xs, b))
    us = np.zeros(xs.size)
    us[k + 1:] = np.cumsum(pieces[k:])
    us[:k] = -np.cumsum(pieces[:k][::-1])[::-1]
    ok = np.isfinite(us)
    return us[ok], xs[ok]


def _table_guess(chart, u):
    try:
        us, xs = _inverse_table(chart)
    except DomainError:
        return np.full(u.shape, chart.basepoint)
    if us.size < 2 or np.any(np.diff(us) <= 0):
        return np.full(u.shape, chart.basepoint)
    return np.interp(u, us, xs)


@dataclass(frozen=True)
class Chart:
    """Strictly increasing chart with derivative base(x)**power on (lo, hi)."""
    base: str
    power: float
    basepoint: float
    lo: float
    hi: float

    def gprime(self, x):
        with np.errstate(all="ignore"):
            return np.power(BASES[self.base](np.asarray(x, dtype=float)), self.power)

    def gsecond(self, x):
        """Derivative of gprime (used by curvature probes)."""
        x = np.asarray(x, dtype=float)
        p = self.power
        b = BASES[self.base](x)
        db = {
            "id": lambda t: np.ones_like(t),
            "sin": np.cos,
            "cos": lambda t: -np.sin(t),
            "sinh": np.cosh,
            "cosh": np.sinh,
            "tan_half": lambda t: 0.5 / np.cos(t / 2) ** 2,
            "cot_half": lambda t: -0.5 / np.sin(t / 2) ** 2,
            "tanh_half": lambda t: 0.5 / np.cosh(t / 2) ** 2,
            "coth_half": lambda t: -0.5 / np.sinh(t / 2) ** 2,
        }[self.base](x)
        if p == 0:
            return np.zeros_like(x)
        return p * np.power(b, p - 1) * db

    def inside(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi) & np.isfinite(x)

    def u(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(self.inside(x)):
            raise DomainError(f"chart argument outside ({self.lo}, {self.hi})")
        return power_integral(self.base, self.power, self.basepoint, x)

    def _end_value(self, end, sign):
        """Limit of u at a domain end; ±inf when the integral diverges."""
        p, b = self.power, self.basepoint
        if self.base == "id":
            if end == 0:
                return -np.inf if p <= -1 else -b ** (p + 1) / (p + 1)
            return np.inf if p >= -1 else -b ** (p + 1) / (p + 1)
        if np.isinf(end):
            if self.base in ("sinh", "cosh") and p < 0:
                # integrate far out, then add the exponential tail
                t_far = sign * max(100.0, 45.0 / abs(p))
                body = power_integral(self.base, p, b, t_far)
                tail = 2.0 ** (-p) * np.exp(p * abs(t_far)) / (-p)
                return float(body + sign * tail)
            return sign * np.inf
        zeros = _ZEROS.get(self.base)
        if zeros is not None and np.any(np.isclose(end, zeros)):
            if p <= -1:
                return sign * np.inf
            if p in (0, 1):
                return float(power_integral(self.base, p, b, end))
            return singular_end_integral(self.base, p, b, end, p)
        pole = _POLES.get(self.base)
        if pole is not None and np.isclose(end, pole):
            if p >= 1:
                return sign * np.inf
            if p in (0, -1):
                return float(power_integral(self.base, p, b, end))
            return singular_end_integral(self.base, p, b, end, -p)
        return float(power_integral(self.base, p, b, end))

    def image(self):
        """(inf u, sup u) over the open domain."""
        return self._end_value(self.lo, -1.0), self._end_value(self.hi, 1.0)

    def x(self, u, x0=None, tol=1e-14, max_iter=200):
        """Invert the chart element-wise by bracketed Newton iteration."""
        u = np.asarray(u, dtype=float)
        shape = u.shape
        u = u.ravel()
        if not np.all(np.isfinite(u)):
            raise InverseOutOfRange("chart value is not finite")
        if self.base == "id":
            return self._x_id(u).reshape(shape)
        ulo, uhi = self.image()
        if np.any(u <= ulo) or np.any(u >= uhi):
            raise InverseOutOfRange(f"chart value outside the image ({ulo}, {uhi})")
        lo = np.full(u.shape, self.lo)
        hi = np.full(u.shape, self.hi)
        # replace infinite ends with finite brackets
        for end, arr, sgn in ((self.hi, hi, 1.0), (self.lo, lo, -1.0)):
            if np.isinf(end):
                step = 1.0
                probe = np.full(u.shape, self.basepoint + sgn * step)
                for _ in range(80):
                    val = self.u(probe)
                    bad = (val < u) if sgn > 0 else (val > u)
                    if not np.any(bad):
                        break
                    step *= 2.0
                    probe = np.where(bad, self.basepoint + sgn * step, probe)
                else:
                    raise InverseOutOfRange("could not bracket the chart inverse")
                arr[:] = probe
        if x0 is None:
            x = _table_guess(self, u)
        else:
            x = np.broadcast_to(np.asarray(x0, dtype=float).ravel(), u.shape).copy()
        x = np.where((x > lo) & (x < hi), x, 0.5 * (lo + hi))
        ux = self.u(x)
        act = np.arange(u.size)
        for _ in range(max_iter):
            f = ux[act] - u[act]
            fine = np.abs(f) <= tol * np.maximum(1.0, np.abs(u[act]))
            act, f = act[~fine], f[~fine]
            if act.size == 0:
                break
            xa = x[act]
            lo[act] = np.where(f < 0, xa, lo[act])
            hi[act] = np.where(f > 0, xa, hi[act])
            with np.errstate(all="ignore"):
                xn = xa - f / self.gprime(xa)
            bad = ~((xn > lo[act]) & (xn < hi[act])) | ~np.isfinite(xn)
            xn = np.where(bad, 0.5 * (lo[act] + hi[act]), xn)
            stalled = np.abs(xn - xa) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(xa))
            # short increments converge in one panel; bisection jumps restart from the basepoint
            step_u = np.empty(act.size)
            if np.any(~bad):
                step_u[~bad] = ux[act[~bad]] + power_integral(self.base, self.power, xa[~bad], xn[~bad])
            if np.any(bad):
                step_u[bad] = self.u(xn[bad])
            ux[act] = step_u
            x[act] = xn
            act = act[~stalled]
        return x.reshape(shape)

    def _x_id(self, u):
        p = self.power
        b = self.basepoint
        with np.errstate(all="ignore"):
            if p == -1:
                x = b * np.exp(u)
            else:
                x = np.power(b ** (p + 1) + (p + 1) * u, 1.0 / (p + 1))
        if not np.all(self.inside(x)):
            raise InverseOutOfRange("chart value outside the image")
        return x
