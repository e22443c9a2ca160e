"""The ququat number system built from the four coherent states ``|i^k alpha>``.

``|alpha_j>`` is the normalized component of ``|alpha>`` with photon number
``n = j (mod 4)``.  The constants ``r_j`` satisfy
``|i^k alpha> = 1/2 sum_j r_j i^(jk) |alpha_j>``, so ``r_j^2 / 4`` is the
Poisson weight of the residue class ``j``.  All constants are evaluated from
those Poisson sums rather than from the trigonometric closed forms, which lose
relative precision for small ``|alpha|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import poisson

from .coherent import CoherentSuperposition, i_pow, tensor
from .errors import DegenerateInputError, SingularityError

MIN_ALPHA = 0.1


def residue_weights(mean: float) -> tuple[np.ndarray, float]:
    """Poisson mass of ``n = j (mod 4)`` for j = 0..3, and of ``n = 0``."""
    n_max = int(np.ceil(mean + 12 * np.sqrt(mean) + 40))
    n = np.arange(n_max + 1)
    pmf = poisson.pmf(n, mean)
    weights = np.array([pmf[n % 4 == j].sum() for j in range(4)])
    return weights, float(pmf[0])


@dataclass(frozen=True)
class AlphaBasis:
    alpha: complex
    x: float
    N: np.ndarray
    r: np.ndarray
    N4: float
    a: np.ndarray
    beta_block: Optional["AlphaBasis"] = None

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def beta(self) -> complex:
        return (1 + 1j) * self.alpha / 2

    @property
    def b(self) -> np.ndarray:
        return self.beta_block.a

    def ecs_normalizer(self, j: int) -> float:
        """``N_Ej`` from the Schmidt weights ``r_l r_(j-l)``."""
        l = np.arange(4)
        return float(1 / np.sqrt(np.sum(self.r[l] ** 2 * self.r[(j - l) % 4] ** 2)))


def _build(alpha: complex) -> AlphaBasis:
    s = abs(alpha) ** 2
    w, p0 = residue_weights(s)
    r = 2 * np.sqrt(w)
    a4_sq = w[0] - p0
    if not (np.all(r > 0) and a4_sq > 0):
        raise SingularityError(f"ququat basis degenerates at |alpha|={abs(alpha):.6g}")
    a4 = np.sqrt(a4_sq)
    a = np.array([np.sqrt(p0), r[1] / 2, r[2] / 2, r[3] / 2, a4])
    for arr in (r, a):
        arr.flags.writeable = False
    N = 1 / (2 * r)
    N.flags.writeable = False
    return AlphaBasis(alpha=complex(alpha), x=float(np.exp(-s)), N=N, r=r, N4=float(1 / (4 * a4)), a=a)


def make_basis(alpha: complex) -> AlphaBasis:
    """Constants for amplitude ``alpha`` together with the ``beta = (1+i) alpha / 2`` block."""
    if not np.isfinite(alpha) or abs(alpha) < MIN_ALPHA:
        raise SingularityError(
            f"|alpha|={abs(alpha):.6g} is below {MIN_ALPHA}; the normalizers N_1, N_3 diverge"
        )
    base = _build(alpha)
    beta = _build((1 + 1j) * alpha / 2)
    return AlphaBasis(base.alpha, base.x, base.N, base.r, base.N4, base.a, beta_block=beta)


def _cat(basis: AlphaBasis, weights) -> CoherentSuperposition:
    amps = basis.alpha * i_pow(np.arange(4))
    return CoherentSuperposition(np.asarray(weights, dtype=complex), amps.reshape(4, 1))


def alpha_j_state(basis: AlphaBasis, j: int) -> CoherentSuperposition:
    """``|alpha_j> = N_j sum_k i^(-jk) |i^k alpha>``."""
    if j not in (0, 1, 2, 3):
        raise ValueError(f"j={j} is not in 0..3")
    return _cat(basis, basis.N[j] * i_pow(-j * np.arange(4)))


def alpha4_state(basis: AlphaBasis) -> CoherentSuperposition:
    """Nonzero multiple-of-4 photon component of ``|alpha>``, normalized."""
    a4 = basis.a[4]
    if not (np.isfinite(a4) and a4 > 0):
        raise SingularityError(f"a_4 is not real positive at |alpha|={abs(basis.alpha):.6g}")
    cat = _cat(basis, np.full(4, basis.N4))
    vac = CoherentSuperposition.coherent(0, coeff=-4 * np.sqrt(basis.x) * basis.N4)
    return cat + vac


def ecs_state(basis: AlphaBasis, j: int) -> CoherentSuperposition:
    """Bipartite four-component entangled coherent state ``|E_j>``."""
    if j not in (0, 1, 2, 3):
        raise ValueError(f"j={j} is not in 0..3")
    k = np.arange(4)
    amps = basis.alpha * i_pow(k)
    return CoherentSuperposition(
        basis.ecs_normalizer(j) * i_pow(-j * k), np.stack([amps, amps], axis=1)
    )


def ecs_schmidt(basis: AlphaBasis, j: int) -> np.ndarray:
    """Coefficients of ``|E_j>`` on ``|alpha_m, alpha_n>`` as a 4x4 matrix."""
    out = np.zeros((4, 4))
    for l in range(4):
        out[l, (j - l) % 4] = basis.r[l] * basis.r[(j - l) % 4]
    return basis.ecs_normalizer(j) * out


def _phase_matrix() -> np.ndarray:
    # entry [j, k] = i^(jk)
    k = np.arange(4)
    return i_pow(np.outer(k, k))


def encode_info(eps, basis: AlphaBasis) -> np.ndarray:
    """epsilon weights on ``(|alpha>, |i alpha>, |-alpha>, |-i alpha>)`` -> c on ``|alpha_j>``."""
    eps = np.asarray(eps, dtype=complex)
    return basis.r / 2 * (_phase_matrix() @ eps)


def decode_info(c, basis: AlphaBasis) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if not np.any(np.abs(c) > 0):
        raise DegenerateInputError("cannot decode the zero ququat")
    return np.conj(_phase_matrix()).T @ (basis.N * c)


def info_state(c, basis: AlphaBasis) -> CoherentSuperposition:
    """Single-mode state ``sum_j c_j |alpha_j>`` as a superposition of four coherent states."""
    return _cat(basis, decode_info(c, basis))


def normalize_c(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    n = np.linalg.norm(c)
    if n == 0:
        raise DegenerateInputError("information vector is zero")
    return c / n


def c_from_eps(eps, basis: AlphaBasis) -> np.ndarray:
    """Encode and normalize; the induced coherent superposition then has unit norm."""
    return normalize_c(encode_info(eps, basis))


def product_with_vacuum(s: CoherentSuperposition) -> CoherentSuperposition:
    return tensor(s, CoherentSuperposition.coherent(0))
