"""Dubois torsion at regular representations and its integrals along paths."""
import re
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from . import su2
from .chain import build_chain_maps, pseudo_det, row_space_basis, numerical_rank
from .errors import (InputError, NotRegular, QuadratureFailure, RankMismatch,
                     SingularPoint)
from .presentation import evaluate_word
from .repvariety import (RepresentationPoint, regularity_check, tangent_cocycle)


@dataclass(frozen=True)
class TorsionBreakdown:
    volume_det: float
    v_norm: float
    r_pseudodet: float
    value: float


@dataclass(frozen=True)
class PeripheralFunction:
    """Symmetric Laurent polynomial sum c (l^p m^q + l^-p m^-q).

    Terms are canonicalized so p > 0, or p = 0 and q >= 0, with duplicates
    merged; the (0, 0) term therefore stands for the constant 2c.
    """

    terms: tuple

    def __post_init__(self):
        merged = {}
        for c, p, q in self.terms:
            p, q = int(p), int(q)
            if p < 0 or (p == 0 and q < 0):
                p, q = -p, -q
            merged[(p, q)] = merged.get((p, q), 0.0) + float(c)
        object.__setattr__(self, "terms", tuple(
            (c, p, q) for (p, q), c in sorted(merged.items()) if c != 0.0))

    @classmethod
    def parse(cls, text):
        """Parse the ``c:p:q[,c:p:q]*`` grammar (``0.5:0:0`` is the constant 1)."""
        terms = []
        for chunk in text.replace(" ", "").split(","):
            if not chunk:
                continue
            m = re.fullmatch(r"\+?([-+0-9.eE]+):([-+]?\d+):([-+]?\d+)", chunk)
            if not m:
                raise InputError(f"bad peripheral term {chunk!r}; expected c:p:q")
            try:
                c = float(m.group(1))
            except ValueError:
                raise InputError(f"bad coefficient in {chunk!r}") from None
            terms.append((c, int(m.group(2)), int(m.group(3))))
        if not terms:
            raise InputError("empty peripheral function")
        return cls(tuple(terms))

    def spell(self):
        return ",".join(f"{c:g}:{p}:{q}" for c, p, q in self.terms)


ONE = PeripheralFunction(((0.5, 0, 0),))


def boundary_images(pres, rep):
    images = getattr(rep, "images", rep)
    return evaluate_word(pres.longitude, images), evaluate_word(pres.meridian, images)


def evaluate_peripheral(f, pres, rep):
    """sum c tr(rho(longitude)^p rho(meridian)^q)."""
    lam, mu = boundary_images(pres, rep)
    total = np.zeros(np.shape(lam)[:-1])
    for c, p, q in f.terms:
        total = total + c * su2.trace(su2.qmul(su2.qpow(lam, p), su2.qpow(mu, q)))
    return total if total.ndim else float(total)


def _flat_tangent(h):
    return np.asarray(getattr(h, "components", h), dtype=float).reshape(-1)


def _check_regular(pres, rep):
    report = regularity_check(pres, rep)
    if report.rank_delta2 != 3 * pres.k - 4:
        raise RankMismatch(f"rank delta^2 = {report.rank_delta2}, expected {3 * pres.k - 4}")
    if not report.is_regular:
        raise NotRegular(f"representation is not regular (v_norm={report.v_norm:.3g})")


def torsion_at(pres, rep, h, mode="pseudodet", rng=None):
    """Absolute Dubois torsion evaluated on the tangent cocycle h.

    ``mode="pseudodet"`` uses the orthonormal complement b_1 from the SVD of
    delta^2 and the pseudo-determinant of delta^2. ``mode="reidemeister"``
    forms the determinant ratio of the extended complex directly; with an
    ``rng`` it draws random (non-orthonormal) complements b_1 and b_2, which
    must not change the value.
    """
    _check_regular(pres, rep)
    cm = build_chain_maps(pres, rep)
    k = pres.k
    hv = _flat_tangent(h)
    v_norm = cm.v_norm
    if mode == "pseudodet":
        b1 = row_space_basis(cm.delta2, 3 * k - 4)
        volume = abs(np.linalg.det(np.column_stack([cm.delta1, hv, b1])))
        rpd = pseudo_det(cm.delta2, 3 * k - 4)
        return TorsionBreakdown(volume, v_norm, rpd, volume * v_norm / rpd)
    if mode == "reidemeister":
        return _reidemeister(cm, hv, k, rng)
    raise ValueError(f"unknown mode {mode!r}")


def _reidemeister(cm, hv, k, rng):
    if rng is None:
        b1 = row_space_basis(cm.delta2, 3 * k - 4)
        b2 = cm.v / np.linalg.norm(cm.v)
    else:
        b1 = rng.standard_normal((3 * k, 3 * k - 4))
        b2 = rng.standard_normal(3 * (k - 1))
    # degrees 0..3: [b0/c0] = 1, [d1 c0, h, b1 / c1], [d2 b1, b2 / c2], [d3 b2 / c3]
    det1 = abs(np.linalg.det(np.column_stack([cm.delta1, hv, b1])))
    det2 = abs(np.linalg.det(np.column_stack([cm.delta2 @ b1, b2])))
    det3 = abs(float(cm.v @ b2))
    value = det1 * det3 / det2
    if rng is None:
        return TorsionBreakdown(det1, cm.v_norm, det2, value)
    return TorsionBreakdown(float("nan"), cm.v_norm, float("nan"), value)


def path_integrand(pres, path, f, t):
    rep = RepresentationPoint(path.images(t), 0.0)
    try:
        h = tangent_cocycle(pres, path, t)
        tau = torsion_at(pres, rep, h).value
    except (NotRegular, RankMismatch) as exc:
        raise SingularPoint(f"non-regular point at t={t:.6g}: {exc}") from exc
    return evaluate_peripheral(f, pres, rep) * tau


def integrate_path(pres, path, f, a=None, b=None, epsrel=1e-10, epsabs=1e-13,
                   full_output=False):
    """Integral of f against the torsion along a path of representations.

    Adaptive 15-point Gauss-Kronrod; the nodes never touch the endpoints,
    where the integrand may vanish through a bifurcation.
    """
    lo, hi = path.domain
    a = lo if a is None else a
    b = hi if b is None else b

    def integrand(t):
        return path_integrand(pres, path, f, float(t))

    # epsabs keeps integrands that cancel to ~0 (A-ideal members) from stalling
    value, err, info = quad_vec(integrand, a, b, epsrel=epsrel, epsabs=epsabs,
                                quadrature="gk15", full_output=True, limit=2000)
    # status 2 (roundoff) is accepted once the error estimate is already negligible
    if not info.success and err > 100 * max(epsabs, epsrel * abs(value)):
        raise QuadratureFailure(f"quadrature did not converge (error estimate {err:.3g})")
    value = float(value)
    return (value, float(err)) if full_output else value


def seminorm(pres, path, f, **kwargs):
    """|integral of f against the torsion| (the A-ideal seminorm)."""
    if kwargs.get("full_output"):
        value, err = integrate_path(pres, path, f, **kwargs)
        return abs(value), err
    return abs(integrate_path(pres, path, f, **kwargs))
