"""SU(2) representation points, paths of representations and their tangents."""
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import su2
from .chain import (RANK_RTOL, build_chain_maps, coboundary_0, kernel_basis,
                    numerical_rank, peripheral_vector)
from .errors import DomainError, NoConvergence, NotACocycle, SingularPoint
from .presentation import evaluate_word, relator_jacobian, relator_values

ACCEPT_RESIDUAL = 1e-9
NEAR_SINGULAR_VNORM = 0.05
REGULAR_VNORM = 1e-8
REDUCIBLE_TOL = 1e-6


def relator_residual(pres, images):
    """Largest angle of a relator image from the identity."""
    return float(np.max(su2.angle(relator_values(pres, images))))


@dataclass(frozen=True)
class RepresentationPoint:
    images: np.ndarray
    residual: float

    @classmethod
    def from_images(cls, pres, images):
        images = np.array(images, dtype=float)
        return cls(images, relator_residual(pres, images))

    @property
    def k(self):
        return self.images.shape[0]

    def conjugated(self, a, pres=None):
        images = su2.conjugate_by(a, self.images)
        res = self.residual if pres is None else relator_residual(pres, images)
        return RepresentationPoint(images, res)


@dataclass(frozen=True)
class TangentCocycle:
    """Right-trivialized tangent (dX_i/dt) X_i^-1, one su(2) vector per generator."""

    components: np.ndarray

    @property
    def flat(self):
        return self.components.reshape(-1)

    @property
    def norm(self):
        return float(np.linalg.norm(self.components))


@dataclass(frozen=True)
class RegularityReport:
    rank_delta1: int
    rank_delta2: int
    v_norm: float
    is_regular: bool
    near_singular: bool


def regularity_check(pres, rep, rtol=RANK_RTOL):
    """Irreducibility, one-dimensional H^1 and non-vanishing peripheral vector."""
    images = getattr(rep, "images", rep)
    d1 = coboundary_0(images)
    d2 = relator_jacobian(pres, images)
    v_norm = float(np.linalg.norm(peripheral_vector(pres, images)))
    r1, r2 = numerical_rank(d1, rtol), numerical_rank(d2, rtol)
    regular = r1 == 3 and r2 == 3 * pres.k - 4 and v_norm > REGULAR_VNORM
    return RegularityReport(r1, r2, v_norm, regular, v_norm < NEAR_SINGULAR_VNORM)


def is_reducible(images, tol=REDUCIBLE_TOL):
    """True when all images share a rotation axis (delta^1 drops rank)."""
    sv = np.linalg.svd(coboundary_0(images), compute_uv=False)
    return sv[-1] < tol


# -- paths ------------------------------------------------------------------

class RepresentationPath:
    """A smooth family t -> rho_t of representations on an open interval.

    Subclasses provide ``images(t)`` (vectorized, shape (..., k, 4)) and may
    provide ``tangent(t)`` returning right-trivialized derivatives (..., k, 3).
    """

    domain = (0.0, 1.0)
    k = None

    def images(self, t):
        raise NotImplementedError

    def tangent(self, t):
        return finite_difference_tangent(self.images, t)

    def point(self, t, pres=None):
        images = self.images(t)
        if pres is None:
            return RepresentationPoint(images, 0.0)
        return RepresentationPoint.from_images(pres, images)


class TrefoilPath(RepresentationPath):
    """rho_t(x) = i, rho_t(y) = cos(pi/3) + sin(pi/3)(cos t i + sin t j)."""

    domain = (0.0, np.pi)
    k = 2

    def images(self, t):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(np.pi / 3), np.sin(np.pi / 3)
        x = np.broadcast_to(su2.QI, t.shape + (4,))
        zero = np.zeros_like(t)
        y = np.stack([np.full_like(t, c), s * np.cos(t), s * np.sin(t), zero], axis=-1)
        return np.stack([x, y], axis=-2)

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(np.pi / 3), np.sin(np.pi / 3)
        hx = np.zeros(t.shape + (3,))
        hy = np.stack([-s * c * np.sin(t), s * c * np.cos(t), np.full_like(t, s * s)], axis=-1)
        return np.stack([hx, hy], axis=-2)


def builtin_trefoil_path(t):
    """Point of the closed-form irreducible trefoil family at t in (0, pi)."""
    if not 0 < t < np.pi:
        raise DomainError("t must lie in (0, pi)")
    images = TrefoilPath().images(t)
    return RepresentationPoint(images, float(np.max(su2.angle(
        su2.qmul(su2.qpow(images[0], 2), su2.qpow(images[1], -3))))))


def right_derivative(x_plus, x_minus, x_mid, h):
    """Imaginary part of ((X(t+h) - X(t-h)) / 2h) X(t)^-1."""
    diff = (np.asarray(x_plus) - np.asarray(x_minus)) / (2 * h)
    return su2.qmul(diff, su2.qinv(x_mid))[..., 1:]


def finite_difference_tangent(images_fn, t, h=1e-5):
    """Central difference with one Richardson refinement."""
    t = np.asarray(t, dtype=float)
    mid = images_fn(t)
    coarse = right_derivative(images_fn(t + h), images_fn(t - h), mid, h)
    fine = right_derivative(images_fn(t + h / 2), images_fn(t - h / 2), mid, h / 2)
    return (4 * fine - coarse) / 3


def project_to_variety(pres, images, tol=1e-14, max_iter=10):
    """Min-norm Gauss-Newton steps onto r_j = 1, batched over leading axes.

    Uses the instantiated Fox Jacobian, which is the right-trivialized
    derivative of the relator map.
    """
    images = np.array(images, dtype=float)
    batch = images.shape[:-2]
    for _ in range(max_iter):
        r = su2.log_unchecked(relator_values(pres, images)).reshape(batch + (-1,))
        if not np.max(np.abs(r), initial=0.0) > tol:
            break
        pinv = np.linalg.pinv(relator_jacobian(pres, images), rcond=RANK_RTOL)
        w = -np.einsum("...ij,...j->...i", pinv, r).reshape(images.shape[:-1] + (3,))
        images = su2.normalize(su2.qmul(su2.exp_map(w), images))
    return images


class InterpolatedPath(RepresentationPath):
    """Smooth path through continuation output, parametrized by step index.

    Quaternion coordinates are cubic-splined and renormalized; with ``pres``
    given, each point is then projected back onto R, so the path lies on the
    representation variety and its tangent is a cocycle.
    """

    def __init__(self, points, pres=None):
        if len(points) < 4:
            raise ValueError("need at least four points to interpolate a path")
        data = np.stack([p.images for p in points])
        self.k = data.shape[1]
        self.pres = pres
        self.nodes = np.arange(len(points), dtype=float)
        self.domain = (0.0, float(len(points) - 1))
        self._spline = CubicSpline(self.nodes, data, axis=0)

    def images(self, t):
        raw = su2.normalize(self._spline(np.asarray(t, dtype=float)))
        return raw if self.pres is None else project_to_variety(self.pres, raw)

    def tangent(self, t):
        if self.pres is not None:
            return finite_difference_tangent(self.images, t)
        t = np.asarray(t, dtype=float)
        raw = self._spline(t)
        d = self._spline(t, 1)
        n = np.linalg.norm(raw, axis=-1, keepdims=True)
        q = raw / n
        dq = d / n - q * np.sum(q * d, axis=-1, keepdims=True) / n
        return su2.qmul(dq, su2.qinv(q))[..., 1:]


def tangent_cocycle(pres, path, t0, tol=1e-6):
    """Tangent of ``path`` at ``t0`` projected onto ker delta^2."""
    images = path.images(t0)
    h = np.asarray(path.tangent(t0), dtype=float).reshape(-1)
    d2 = relator_jacobian(pres, images)
    null = kernel_basis(d2, numerical_rank(d2))
    projected = null @ (null.T @ h)
    displacement = float(np.linalg.norm(h - projected))
    if displacement > tol * max(1.0, float(np.linalg.norm(h))):
        raise NotACocycle(f"tangent leaves ker delta^2 by {displacement:.3g}")
    return TangentCocycle(projected.reshape(-1, 3))


# -- root finding -----------------------------------------------------------

def _apply_step(images, step):
    return su2.normalize(su2.qmul(su2.exp_map(step.reshape(-1, 3)), images))


def _relator_logs(pres, images):
    return su2.log_unchecked(relator_values(pres, images)).reshape(-1)


def _numeric_jacobian(fn, images, h=1e-7):
    base = images.shape[0] * 3
    cols = []
    for m in range(base):
        e = np.zeros(base)
        e[m] = h
        cols.append((fn(_apply_step(images, e)) - fn(_apply_step(images, -e))) / (2 * h))
    return np.stack(cols, axis=-1)


def newton_correct(pres, images, tol=1e-12, max_iter=60):
    """Least-squares (minimum-norm) Newton iteration onto r_j = 1.

    Returns the corrected images, or None if the iteration fails.
    """
    images = np.array(images, dtype=float)
    fn = lambda im: _relator_logs(pres, im)
    res = relator_residual(pres, images)
    for _ in range(max_iter):
        if res <= tol:
            return images
        f = fn(images)
        if not np.all(np.isfinite(f)):
            return None
        jac = _numeric_jacobian(fn, images)
        step = -np.linalg.lstsq(jac, f, rcond=None)[0]
        scale = 1.0
        for _ in range(30):
            trial = _apply_step(images, scale * step)
            trial_res = relator_residual(pres, trial)
            if trial_res < res or trial_res <= tol:
                break
            scale /= 2
        else:
            return None
        images, res = trial, trial_res
    return images if res <= tol else None


def find_representation(pres, rng, initial=None, abelian_filter=True,
                        max_restarts=50, tol=1e-12):
    """Newton from random Haar starts (or ``initial`` first) onto R(S^3 - K).

    With ``abelian_filter`` on, reducible solutions (including those with a
    central meridian) are rejected and the search restarts.
    """
    starts = 0
    while starts < max_restarts:
        if initial is not None and starts == 0:
            guess = np.array(initial, dtype=float)
        else:
            guess = su2.haar_sample(rng, pres.k)
        starts += 1
        images = newton_correct(pres, guess, tol=tol)
        if images is None:
            continue
        if abelian_filter:
            mu = evaluate_word(pres.meridian, images)
            if su2.imag_norm(mu) < 1e-6 or is_reducible(images):
                continue
        return RepresentationPoint.from_images(pres, images)
    raise NoConvergence(f"no acceptable representation after {max_restarts} starts")


# -- continuation -----------------------------------------------------------

def _corrected_step(pres, previous, predicted, singular_vnorm):
    new = newton_correct(pres, predicted)
    if new is None:
        raise SingularPoint("corrector failed to converge")
    new = gauge_fix(new, previous)
    new = newton_correct(pres, new)
    if new is None:
        raise SingularPoint("corrector failed after gauge fixing")
    point = RepresentationPoint.from_images(pres, new)
    report = regularity_check(pres, point)
    if not report.is_regular or report.v_norm < singular_vnorm:
        raise SingularPoint(
            f"regularity lost (v_norm={report.v_norm:.3g}, ranks "
            f"{report.rank_delta1}/{report.rank_delta2})")
    return point, report


def h1_direction(pres, images):
    """Unit vector of ker delta^2 orthogonal to im delta^1."""
    d2 = relator_jacobian(pres, images)
    null = kernel_basis(d2, numerical_rank(d2))
    q, _ = np.linalg.qr(coboundary_0(images))
    residual = null - q @ (q.T @ null)
    u, s, _ = np.linalg.svd(residual)
    return u[:, 0]


def gauge_fix(images, reference, iters=8):
    """Conjugate ``images`` to minimize the distance to ``reference``."""
    def resid(a):
        conj = su2.conjugate_by(su2.exp_map(a), images)
        return su2.log_unchecked(su2.qmul(conj, su2.qinv(reference))).reshape(-1)

    a = np.zeros(3)
    for _ in range(iters):
        f = resid(a)
        jac = np.stack([(resid(a + e) - resid(a - e)) / 2e-7 for e in np.eye(3) * 1e-7], -1)
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        a = a + step
        if np.linalg.norm(step) < 1e-14:
            break
    return su2.normalize(su2.conjugate_by(su2.exp_map(a), images))


def continue_path(pres, seed, step, n_steps, direction=1, singular_vnorm=NEAR_SINGULAR_VNORM,
                  stop_at_singular=False):
    """Predictor-corrector continuation along the H^1 direction.

    The step is capped at v_norm / 8 so that the approach to a bifurcation
    point is geometric and gets detected through v_norm. With
    ``stop_at_singular`` the points found so far are returned instead of
    raising SingularPoint.
    """
    points = [seed]
    report = regularity_check(pres, seed)
    if not report.is_regular:
        raise SingularPoint("seed is not a regular representation")
    images = seed.images
    tangent = direction * h1_direction(pres, images)
    for _ in range(n_steps):
        h = min(step, report.v_norm / 8)
        new = _apply_step(images, h * tangent)
        try:
            point, report = _corrected_step(pres, images, new, singular_vnorm)
        except SingularPoint:
            if stop_at_singular:
                break
            raise
        new = point.images
        nxt = h1_direction(pres, new)
        tangent = nxt if np.dot(nxt, tangent) >= 0 else -nxt
        images = new
        points.append(point)
    return points


def trace_path(pres, seed, step=0.02, max_steps=400):
    """Continue from ``seed`` both ways until regularity degrades; spline the result."""
    back = continue_path(pres, seed, step, max_steps, -1, stop_at_singular=True)
    ahead = continue_path(pres, seed, step, max_steps, 1, stop_at_singular=True)
    points = back[:0:-1] + ahead
    if len(points) < 4:
        raise SingularPoint("continuation produced too few regular points for a path")
    return InterpolatedPath(points, pres)
