"""
Quaternion model of SU(2).

Conventions
-----------

- A group element is a unit quaternion stored as ``[w, x, y, z]`` in the last
  axis of a float array. Every function accepts batches ``(..., 4)``.
- The Lie algebra su(2) is identified with the pure quaternions, i.e. with R^3
  through the basis (i, j, k). Algebra vectors are ``(..., 3)`` arrays.
- Tangent vectors at X are right-trivialized: ``dX X^-1`` in su(2).
- The metric is the round metric of the unit sphere S^3 in R^4; its volume form
  has total mass 2 pi^2 (Haar measure times 2 pi^2).
"""
from dataclasses import dataclass

import numpy as np

from .errors import AntipodeError

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])
MINUS_IDENTITY = np.array([-1.0, 0.0, 0.0, 0.0])
QI = np.array([0.0, 1.0, 0.0, 0.0])
QJ = np.array([0.0, 0.0, 1.0, 0.0])
QK = np.array([0.0, 0.0, 0.0, 1.0])

SU2_VOLUME = 2.0 * np.pi ** 2
RENORMALIZE_EVERY = 16


def quat(w, x, y, z):
    return np.array([w, x, y, z], dtype=float)


def qmul(p, q):
    """Hamilton product, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ], axis=-1)


def qinv(q):
    """Inverse of a unit quaternion (its conjugate)."""
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def qprod(factors):
    """Ordered product of a sequence of quaternion arrays.

    The running product is renormalized every 16 multiplications.
    """
    out = None
    for count, f in enumerate(factors, start=1):
        out = np.array(f, dtype=float) if out is None else qmul(out, f)
        if count % RENORMALIZE_EVERY == 0:
            out = normalize(out)
    return IDENTITY.copy() if out is None else out


def qpow(q, n):
    """Integer power of a unit quaternion (negative n allowed)."""
    q = np.asarray(q, dtype=float)
    base = q if n >= 0 else qinv(q)
    out = np.broadcast_to(IDENTITY, q.shape).copy()
    for count in range(1, abs(n) + 1):
        out = qmul(out, base)
        if count % RENORMALIZE_EVERY == 0:
            out = normalize(out)
    return out


def conjugate_by(a, q):
    """a q a^-1."""
    return qmul(qmul(a, q), qinv(a))


def imag_norm(q):
    return np.linalg.norm(np.asarray(q, dtype=float)[..., 1:], axis=-1)


def angle(q):
    """Angle phi in [0, pi] between q and the identity, so q = cos phi + sin phi P."""
    q = np.asarray(q, dtype=float)
    return np.arctan2(imag_norm(q), q[..., 0])


def trace(q):
    """Trace of q viewed as a 2x2 SU(2) matrix."""
    return 2.0 * np.asarray(q, dtype=float)[..., 0]


def to_matrix(q):
    """The 2x2 complex matrix [[a, b], [-conj(b), conj(a)]] of a quaternion."""
    q = np.asarray(q, dtype=float)
    a = q[..., 0] + 1j * q[..., 1]
    b = q[..., 2] + 1j * q[..., 3]
    return np.stack([np.stack([a, b], -1),
                     np.stack([-np.conj(b), np.conj(a)], -1)], -2)


def exp_map(v):
    """exp(v) = cos|v| + sin|v| v/|v|; the identity at v = 0."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)
    # sin(theta)/theta with its limit at 0
    sinc = np.sinc(theta / np.pi)
    return np.concatenate([np.cos(theta)[..., None], sinc[..., None] * v], axis=-1)


def log_unchecked(q):
    """log on S^3 minus {-1}; returns nan where q is numerically -1."""
    q = np.asarray(q, dtype=float)
    s = imag_norm(q)
    phi = np.arctan2(s, q[..., 0])
    with np.errstate(invalid='ignore', divide='ignore'):
        # phi / sin(phi) computed as phi / s, which equals 1 in the limit s -> 0
        scale = np.where(s > 1e-300, phi / np.where(s > 1e-300, s, 1.0), 1.0)
    out = scale[..., None] * q[..., 1:]
    bad = (s < 1e-300) & (q[..., 0] < 0)
    if np.any(bad):
        out = np.where(bad[..., None], np.nan, out)
    return out


def log_map(q, tol=1e-9):
    """Inverse of exp_map on the open ball of radius pi.

    Raises AntipodeError when the angle of q is within ``tol`` of pi.
    """
    q = np.asarray(q, dtype=float)
    if np.any(np.pi - angle(q) < tol):
        raise AntipodeError("log is undefined at -1")
    return log_unchecked(q)


def adjoint_matrix(q):
    """Matrix of v -> q v q^-1 on su(2) = R^3 (rotation by twice the angle of q)."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    n2 = w * w + x * x + y * y + z * z
    s = 2.0 / n2
    rows = [
        [1 - s * (y * y + z * z), s * (x * y - w * z), s * (x * z + w * y)],
        [s * (x * y + w * z), 1 - s * (x * x + z * z), s * (y * z - w * x)],
        [s * (x * z - w * y), s * (y * z + w * x), 1 - s * (x * x + y * y)],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def chebyshev_s(c, x):
    """s_0 = 1, s_1 = x, s_n = x s_{n-1} - s_{n-2}."""
    if c < 0:
        raise ValueError("c must be non-negative")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x
    if c == 0:
        return prev if prev.ndim else float(prev)
    for _ in range(c - 1):
        prev, cur = cur, x * cur - prev
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class KernelParams:
    """Concentration ``lam`` and heat-series cutoff ``truncation_eps``."""

    lam: float
    truncation_eps: float = 1e-12

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not 0 < self.truncation_eps < 1:
            raise ValueError("truncation_eps must lie in (0, 1)")


def gaussian_parametrix(q, params):
    """(lam / 4 pi)^{3/2} exp(-lam phi^2 / 4), phi the angle of q from 1."""
    phi = angle(q)
    lam = params.lam
    return (lam / (4 * np.pi)) ** 1.5 * np.exp(-lam * phi ** 2 / 4)


def heat_cutoff(params):
    """Largest index c kept in the heat-kernel series.

    Terms are bounded by (c+1)^2 exp(-c(c+2)/lam); the series stops at the
    first term whose bound falls below truncation_eps times the running sum
    of the bounds.
    """
    lam = params.lam
    total = 0.0
    c = 0
    while True:
        bound = (c + 1) ** 2 * np.exp(-c * (c + 2) / lam)
        if c > 0 and bound < params.truncation_eps * total:
            return c - 1
        total += bound
        c += 1


def heat_kernel_trace(q, params):
    """Heat kernel of S^3 at time 1/lam, as a class function of q.

    Evaluates (1 / 2 pi^2) sum_c (c+1) e^{-c(c+2)/lam} s_c(2 cos phi). The
    Chebyshev recursion gives sin((c+1) phi) / sin(phi) directly, so there is
    no removable singularity to treat at phi = 0.
    """
    phi = angle(q)
    x = 2.0 * np.cos(phi)
    lam = params.lam
    cmax = heat_cutoff(params)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    total = np.ones_like(x)
    for c in range(1, cmax + 1):
        prev, cur = cur, x * cur - prev
        total = total + (c + 1) * np.exp(-c * (c + 2) / lam) * cur
    return total / SU2_VOLUME


def haar_sample(rng, size=None):
    """Haar-uniform elements of SU(2) as normalized 4-d Gaussians."""
    shape = (4,) if size is None else tuple(np.atleast_1d(size)) + (4,)
    return normalize(rng.standard_normal(shape))
