"""Independent reflection oracle for the pure C4 model.

In the WKB gauge the pure C4 problem becomes Psi'' + (K - Vb(zb)) Psi = 0
with K = kappa*ell and the energy-independent wall Vb = 5/(8 cosh^3 2u),
where u(zb) solves du/dzb = 1/sqrt(2 cosh 2u), u(z0_bold) = 0. This
module integrates that equation with Numerov's method on a uniform zb grid
(three step sizes, Richardson extrapolation). It shares no code with the
Runge-Kutta solver or with the badlands evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError

DEFAULT_STEPS = (0.04, 0.02, 0.01)


@dataclass(frozen=True)
class OracleResult:
    kappa_ell: float
    R: float
    error_bar: float
    levels: tuple
    extrapolated: tuple
    half_width: float

    def covers(self, value):
        return abs(value - self.R) <= self.error_bar


def _u_of_s(s):
    """u at wall offsets s = zb - z0_bold (s sorted, containing 0)."""
    rhs = lambda _, u: 1.0 / np.sqrt(2.0 * np.cosh(2.0 * u))
    i0 = int(np.argmin(np.abs(s)))
    kw = dict(method="DOP853", rtol=1e-13, atol=1e-15)
    right = solve_ivp(rhs, (0.0, s[-1]), [0.0], t_eval=s[i0:], **kw).y[0]
    left = solve_ivp(rhs, (0.0, s[0]), [0.0], t_eval=s[: i0 + 1][::-1], **kw).y[0][::-1]
    return np.concatenate([left, right[1:]])


def numerov_R(kappa_ell, h, half_width):
    """Reflection probability from one Numerov sweep with step ``h``."""
    n = int(round(half_width / h))
    s = h * np.arange(-n, n + 1)
    u = _u_of_s(s)
    f = kappa_ell - 5.0 / (8.0 * np.cosh(2.0 * u) ** 3)
    c = h * h / 12.0
    a = 1.0 + c * f
    b = 2.0 * (1.0 - 5.0 * c * f)
    # exact discrete plane waves of the free recurrence: cos q = (1-5cK)/(1+cK)
    q = math.acos((1.0 - 5.0 * c * kappa_ell) / (1.0 + c * kappa_ell))
    m = len(s)
    re = np.empty(m)
    im = np.empty(m)
    re[0], im[0] = 1.0, 0.0
    re[1], im[1] = math.cos(q), -math.sin(q)
    a_l, b_l = a.tolist(), b.tolist()
    x0, y0, x1, y1 = re[0], im[0], re[1], im[1]
    for i in range(1, m - 1):
        inv = 1.0 / a_l[i + 1]
        x2 = (b_l[i] * x1 - a_l[i - 1] * x0) * inv
        y2 = (b_l[i] * y1 - a_l[i - 1] * y0) * inv
        x0, y0, x1, y1 = x1, y1, x2, y2
    psi_n1 = complex(x0, y0)
    psi_n2 = complex(x1, y1)
    n1, n2 = m - 2, m - 1
    mat = np.array([[np.exp(1j * q * n1), np.exp(-1j * q * n1)],
                    [np.exp(1j * q * n2), np.exp(-1j * q * n2)]])
    out, inc = np.linalg.solve(mat, [psi_n1, psi_n2])
    return float(abs(out / inc) ** 2)


def numerov_oracle(kappa_ell, steps=DEFAULT_STEPS, tail_tol=1e-11):
    """Richardson-extrapolated Numerov reflection probability with error bar.

    The wall is truncated where its Born reflection estimate Vb/(4K) drops
    below ``tail_tol``. The quoted error bar adds the spread of the two
    Richardson estimates, the gap between the finest sweep and the
    extrapolation, and twice the truncation tolerance.
    """
    if not kappa_ell > 0:
        raise DomainError("kappa*ell must be positive")
    if len(steps) != 3 or not steps[0] > steps[1] > steps[2] > 0:
        raise DomainError("need three decreasing step sizes")
    # Vb ~ 5/s^6 far from the peak
    half_width = max(20.0, (5.0 / (4.0 * kappa_ell * tail_tol)) ** (1.0 / 6.0))
    levels = tuple(numerov_R(kappa_ell, h, half_width) for h in steps)
    ext = []
    for (h1, r1), (h2, r2) in zip(zip(steps, levels), zip(steps[1:], levels[1:])):
        w = (h1 / h2) ** 4
        ext.append((w * r2 - r1) / (w - 1.0))
    best = ext[-1]
    bar = abs(ext[1] - ext[0]) + abs(levels[-1] - best) + 2.0 * tail_tol
    return OracleResult(kappa_ell, float(best), float(bar), levels,
                        tuple(float(x) for x in ext), half_width)
