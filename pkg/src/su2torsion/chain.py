"""The extended adjoint cochain complex C^0 -> C^1 -> C^2 -> R at a representation.

Bases are orthonormal tensor bases e^i (x) (i, j, k); block i of C^1 holds the
su(2) component attached to generator x_i.
"""
from dataclasses import dataclass

import numpy as np

from . import su2
from .errors import CentralMeridian, RankMismatch
from .presentation import evaluate_word, relator_jacobian

RANK_RTOL = 1e-8
CENTRAL_TOL = 1e-9


def _images(rep):
    return np.asarray(getattr(rep, "images", rep), dtype=float)


def coboundary_0(rep):
    """delta^1: w -> (Ad(X_i) - 1) w for each i, shape (..., 3k, 3)."""
    images = _images(rep)
    ad = su2.adjoint_matrix(images) - np.eye(3)
    return ad.reshape(images.shape[:-2] + (3 * images.shape[-2], 3))


def meridian_axis(pres, rep):
    """Unit axis P of the meridian image and the norm of its imaginary part."""
    mu = evaluate_word(pres.meridian, _images(rep))
    im = mu[..., 1:]
    norm = np.linalg.norm(im, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = im / norm[..., None]
    return axis, norm


def peripheral_vector(pres, rep, central_tol=CENTRAL_TOL):
    """v = (sign_j (Ad rho(s_j) - Ad rho(t_j)) P)_j, shape (..., 3(k-1)).

    Entries are set to zero where the meridian image is central (P undefined);
    those points belong to the measure-zero set where v vanishes anyway.
    """
    images = _images(rep)
    axis, norm = meridian_axis(pres, images)
    central = norm < central_tol
    axis = np.where(central[..., None], 0.0, axis)
    parts = []
    for (s, t), sign in zip(pres.peripheral, pres.relator_signs):
        ad_s = su2.adjoint_matrix(evaluate_word(s, images))
        ad_t = su2.adjoint_matrix(evaluate_word(t, images))
        parts.append(sign * np.einsum("...ab,...b->...a", ad_s - ad_t, axis))
    return np.concatenate(parts, axis=-1)


@dataclass(frozen=True)
class ChainMaps:
    delta1: np.ndarray
    delta2: np.ndarray
    v: np.ndarray

    @property
    def v_norm(self):
        return float(np.linalg.norm(self.v))


def build_chain_maps(pres, rep):
    residual = getattr(rep, "residual", None)
    if residual is not None and residual > 1e-9:
        raise ValueError(f"not a representation point (residual {residual:.3g})")
    images = _images(rep)
    _, norm = meridian_axis(pres, images)
    if norm < CENTRAL_TOL:
        raise CentralMeridian("meridian image is central; the peripheral axis is undefined")
    return ChainMaps(coboundary_0(images), relator_jacobian(pres, images),
                     peripheral_vector(pres, images))


def numerical_rank(mat, rtol=RANK_RTOL):
    sv = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def pseudo_det(mat, expected_rank=None, rtol=RANK_RTOL):
    """Product of the singular values above rtol * sigma_max.

    This is sqrt(det(L* L)) for L restricted to (ker L)^perp -> im L.
    """
    sv = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    keep = sv[sv > rtol * sv[0]] if sv.size and sv[0] > 0 else sv[:0]
    if expected_rank is not None and keep.size != expected_rank:
        raise RankMismatch(f"numerical rank {keep.size}, expected {expected_rank}")
    return float(np.prod(keep))


def row_space_basis(mat, rank):
    """Orthonormal basis (columns) of (ker mat)^perp from the SVD of mat."""
    _, _, vt = np.linalg.svd(mat)
    return vt[..., :rank, :].swapaxes(-1, -2)


def kernel_basis(mat, rank):
    _, _, vt = np.linalg.svd(mat)
    return vt[..., rank:, :].swapaxes(-1, -2)
