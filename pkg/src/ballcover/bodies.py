"""Star bodies given by small radial perturbations of the unit ball.

A body is r_K(u) = 1 + rho(u) with rho a finite expansion in real spherical
harmonics Y_lm, normalized so that the average of Y_lm^2 over the sphere is
1 (then |Y_lm| <= sqrt(2l+1) everywhere, by the addition theorem).  This is
the module's float boundary: coefficients and evaluations are floats, while
everything downstream that must be exact converts sampled values to
rationals explicitly.

The certified asphericity `eps` of a body is sum |a_lm| sqrt(2l+1), a true
upper bound for sup |rho|, not a sampled estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class RadialBody:
    coeffs: tuple[tuple[int, int, float], ...]
    eps: float
    lmax: int


def make_body(coeffs: Iterable[tuple[int, int, float]]) -> RadialBody:
    cleaned = []
    seen = set()
    for l, m, a in coeffs:
        l, m, a = int(l), int(m), float(a)
        assert l >= 0 and abs(m) <= l, "bad harmonic index"
        assert (l, m) not in seen, "duplicate harmonic index"
        seen.add((l, m))
        if a != 0.0:
            cleaned.append((l, m, a))
    cleaned.sort()
    eps = sum(abs(a) * math.sqrt(2 * l + 1) for l, _, a in cleaned)
    lmax = max((l for l, _, _ in cleaned), default=0)
    return RadialBody(coeffs=tuple(cleaned), eps=eps, lmax=lmax)


def ball_body() -> RadialBody:
    return make_body([])


def is_normalized(body: RadialBody) -> bool:
    """No degree-0 (volume) and no degree-2 components."""
    return all(l not in (0, 2) for l, _, _ in body.coeffs)


def _assoc_legendre(l: int, m: int, x):
    """P_lm without the (-1)^m phase; x may be a float or an ndarray."""
    assert 0 <= m <= l
    somx2 = (1.0 - x * x) ** 0.5
    pmm = 1.0 if not isinstance(x, np.ndarray) else np.ones_like(x)
    fact = 1.0
    for _ in range(m):
        pmm = pmm * fact * somx2
        fact += 2.0
    if l == m:
        return pmm
    pmmp1 = x * (2 * m + 1) * pmm
    if l == m + 1:
        return pmmp1
    for ll in range(m + 2, l + 1):
        pmm, pmmp1 = pmmp1, (x * (2 * ll - 1) * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
    return pmmp1


def _norm_lm(l: int, m: int) -> float:
    return math.sqrt(
        (2 * l + 1) * math.factorial(l - m) / math.factorial(l + m)
    )


def real_sph_harm(l: int, m: int, xyz: Sequence[float]) -> float:
    """Real harmonic with unit quadratic mean over the sphere."""
    x, y, z = xyz
    r = math.sqrt(x * x + y * y + z * z)
    assert r > 0
    ct = max(-1.0, min(1.0, z / r))
    phi = math.atan2(y, x)
    am = abs(m)
    base = _norm_lm(l, am) * _assoc_legendre(l, am, ct)
    if m == 0:
        return base
    if m > 0:
        return math.sqrt(2.0) * base * math.cos(am * phi)
    return math.sqrt(2.0) * base * math.sin(am * phi)


def rho(body: RadialBody, xyz: Sequence[float]) -> float:
    return sum(a * real_sph_harm(l, m, xyz) for l, m, a in body.coeffs)


def radial(body: RadialBody, xyz: Sequence[float]) -> float:
    return 1.0 + rho(body, xyz)


def volume_ratio(body: RadialBody) -> float:
    """vol K / vol B = average of r_K^3 over the sphere.

    Product Gauss-Legendre x uniform quadrature, sized to integrate the
    degree <= 3 lmax integrand exactly; the only error is float roundoff.
    """
    if not body.coeffs:
        return 1.0
    deg = 3 * body.lmax
    nz = deg // 2 + 2
    nphi = deg + 2
    z, wz = np.polynomial.legendre.leggauss(nz)
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    grid = np.zeros((nz, nphi))
    for l, m, a in body.coeffs:
        am = abs(m)
        radial_part = _norm_lm(l, am) * _assoc_legendre(l, am, z)
        if m == 0:
            angular = np.ones(nphi)
        elif m > 0:
            angular = math.sqrt(2.0) * np.cos(am * phi)
        else:
            angular = math.sqrt(2.0) * np.sin(am * phi)
        grid += a * np.outer(radial_part, angular)
    r3 = (1.0 + grid) ** 3
    return float(wz @ r3.sum(axis=1)) / (2.0 * nphi)


def body_to_dict(body: RadialBody) -> dict:
    return {
        "kind": "radial-body",
        "harmonics": [[l, m, a] for l, m, a in body.coeffs],
    }


def body_from_dict(data: dict) -> RadialBody:
    if not isinstance(data, dict) or "harmonics" not in data:
        raise ValueError("body file must contain a 'harmonics' list")
    rows = data["harmonics"]
    if not isinstance(rows, list) or not all(
        isinstance(r, (list, tuple)) and len(r) == 3 for r in rows
    ):
        raise ValueError("'harmonics' must be a list of [degree, order, coefficient]")
    return make_body((int(l), int(m), float(a)) for l, m, a in rows)


def save_body(body: RadialBody, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(body_to_dict(body), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_body(path: str) -> RadialBody:
    with open(path) as fh:
        return body_from_dict(json.load(fh))
