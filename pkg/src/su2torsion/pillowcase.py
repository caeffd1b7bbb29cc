"""Restriction to the boundary torus and coordinates on the pillowcase."""
import math
from dataclasses import dataclass

import numpy as np

from . import su2
from .errors import CornerPoint, NonCommuting
from .presentation import evaluate_word

TWO_PI = 2 * math.pi
CENTRAL_TOL = 1e-9
COMMUTE_TOL = 1e-8


def _wrap(theta):
    # IEEE remainder is exact and odd, so canon(-x) = -canon(x) bit for bit
    r = math.remainder(theta, TWO_PI)
    return math.pi if r == -math.pi else r


def canonicalize(theta_l, theta_m):
    """Representative of (theta_l, theta_m) modulo 2 pi and the involution (l, m) -> (1/l, 1/m).

    The result has theta_m in [0, pi] and theta_l in (-pi, pi]; when theta_m is
    0 or pi, theta_l is taken in [0, pi].
    """
    l, m = _wrap(float(theta_l)), _wrap(float(theta_m))
    if m < 0 or ((m == 0.0 or m == math.pi) and l < 0):
        l, m = _wrap(-l), _wrap(-m)
    return l + 0.0, m + 0.0


@dataclass(frozen=True)
class PillowcasePoint:
    theta_l: float
    theta_m: float
    corner: bool = False

    @classmethod
    def canonical(cls, theta_l, theta_m, corner=False):
        l, m = canonicalize(theta_l, theta_m)
        return cls(l, m, corner)


def restrict(pres, rep, strict=False):
    """Eigen-angle coordinates of (rho(longitude), rho(meridian)).

    Both angles are measured about a common axis taken from whichever boundary
    image has the larger imaginary part. When both images are central the
    point is a pillowcase corner: it is returned with ``corner=True``, or
    CornerPoint is raised when ``strict``.
    """
    images = getattr(rep, "images", rep)
    lam = evaluate_word(pres.longitude, images)
    mu = evaluate_word(pres.meridian, images)
    comm = su2.qmul(su2.qmul(lam, mu), su2.qinv(su2.qmul(mu, lam)))
    if np.linalg.norm(comm - su2.IDENTITY) > COMMUTE_TOL:
        raise NonCommuting("boundary images do not commute")
    nl, nm = su2.imag_norm(lam), su2.imag_norm(mu)
    if max(nl, nm) < CENTRAL_TOL:
        if strict:
            raise CornerPoint("both boundary images are central")
        return PillowcasePoint.canonical(su2.angle(lam), su2.angle(mu), corner=True)
    axis = (lam if nl >= nm else mu)[1:]
    axis = axis / np.linalg.norm(axis)
    theta_l = math.atan2(float(lam[1:] @ axis), float(lam[0]))
    theta_m = math.atan2(float(mu[1:] @ axis), float(mu[0]))
    return PillowcasePoint.canonical(theta_l, theta_m)


def evaluate_on_pillowcase(f, pt):
    """sum c * 2 cos(p theta_l + q theta_m)."""
    return float(sum(c * 2 * math.cos(p * pt.theta_l + q * pt.theta_m) for c, p, q in f.terms))


def a_ideal_residual(pres, candidates, sample):
    """For each candidate, the largest |value| over the restricted sample points."""
    points = [restrict(pres, rep) for rep in sample]
    return [max(abs(evaluate_on_pillowcase(f, pt)) for pt in points) for f in candidates]
