"""Truncated photon-number simulator used to cross-check the coherent algebra.

Everything here works on dense number-basis arrays, so it shares no formulas
with the coherent-state code beyond the definition ``<n|g> = e^(-|g|^2/2)
g^n / sqrt(n!)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .basis import AlphaBasis, alpha_j_state
from .coherent import CoherentSuperposition, inner_product, i_pow
from .errors import ArityError, DomainError, ResourceError
from .generation import circuit_output, even_cat, run_generation
from .teleport import TeleportSimulator, enumerate_pc_classes

MAX_ALPHA = 3.5
MAX_CUTOFF = 400


def cutoff_for(gamma: float) -> int:
    """Per-mode cutoff ``ceil(g^2 + 8 g + 10)``; leakage < 1e-10 for ``|g| <= 5``."""
    g = abs(gamma)
    return int(np.ceil(g * g + 8 * g + 10))


@dataclass(frozen=True)
class FockVector:
    cutoffs: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        shape = tuple(c + 1 for c in self.cutoffs)
        if self.amplitudes.shape != shape:
            raise ArityError(f"amplitude shape {self.amplitudes.shape} does not match cutoffs {self.cutoffs}")

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def inner(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def coherent_column(gamma: complex, cutoff: int) -> np.ndarray:
    """``<n|gamma>`` for n = 0..cutoff, by the recursion ``t_n = t_(n-1) gamma / sqrt(n)``."""
    out = np.empty(cutoff + 1, dtype=complex)
    out[0] = np.exp(-abs(gamma) ** 2 / 2)
    for n in range(1, cutoff + 1):
        out[n] = out[n - 1] * gamma / np.sqrt(n)
    return out


def to_fock(s: CoherentSuperposition, cutoffs: Optional[Sequence[int]] = None) -> FockVector:
    if cutoffs is None:
        gmax = float(np.max(np.abs(s.amps))) if s.n_terms else 0.0
        cutoffs = (cutoff_for(gmax),) * s.mode_count
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != s.mode_count or min(cutoffs, default=0) < 0:
        raise ArityError("need one non-negative cutoff per mode")
    amp = np.zeros(tuple(c + 1 for c in cutoffs), dtype=complex)
    for coeff, row in zip(s.coeffs, s.amps):
        term = np.array(coeff, dtype=complex)
        for g, c in zip(row, cutoffs):
            term = np.multiply.outer(term, coherent_column(g, c))
        amp += term
    return FockVector(cutoffs, amp)


@lru_cache(maxsize=None)
def _bs_block(n: int) -> np.ndarray:
    """Splitter on the ``n``-photon block ``|k, n-k>``: ``exp(i pi/4 (a^+ b + b^+ a))``."""
    k = np.arange(n)
    h = np.sqrt((k + 1) * (n - k))
    w, v = np.linalg.eigh(np.diag(h, 1) + np.diag(h, -1))
    u = (v * np.exp(1j * np.pi / 4 * w)) @ v.conj().T
    u.flags.writeable = False
    return u


def _bs_pair(arr: np.ndarray) -> np.ndarray:
    """Apply the splitter to the first two axes of ``arr``."""
    na, nb = arr.shape[:2]
    out = np.zeros_like(arr)
    for n in range(na + nb - 1):
        k = np.arange(max(0, n - nb + 1), min(na - 1, n) + 1)
        block = np.zeros((n + 1,) + arr.shape[2:], dtype=complex)
        block[k] = arr[k, n - k]
        res = np.tensordot(_bs_block(n), block, axes=(1, 0))
        out[k, n - k] = res[k]
    return out


def fock_beam_splitter(v: FockVector, mode_a: int, mode_b: int) -> FockVector:
    """50-50 splitter with ``|1,0> -> (|1,0> + i|0,1>)/sqrt 2``.

    Amplitudes pushed above a mode's cutoff are dropped, so the caller picks
    cutoffs that cover the output amplitudes.
    """
    m = v.mode_count
    if not (0 <= mode_a < m and 0 <= mode_b < m) or mode_a == mode_b:
        raise ArityError(f"invalid beam-splitter modes ({mode_a}, {mode_b}) for {m} modes")
    arr = np.moveaxis(v.amplitudes, (mode_a, mode_b), (0, 1))
    arr = np.moveaxis(_bs_pair(arr), (0, 1), (mode_a, mode_b))
    return FockVector(v.cutoffs, arr)


def fock_phase_shifter(v: FockVector, mode: int) -> FockVector:
    """``|n> -> (-i)^n |n>``, i.e. ``|g> -> |-i g>``."""
    if not 0 <= mode < v.mode_count:
        raise ArityError(f"mode {mode} out of range")
    phase = i_pow(-np.arange(v.cutoffs[mode] + 1))
    shape = [1] * v.mode_count
    shape[mode] = -1
    return FockVector(v.cutoffs, v.amplitudes * phase.reshape(shape))


def symbol_mask(symbol: Optional[int], cutoff: int) -> np.ndarray:
    """Number-basis indicator of a counting symbol (0..4) or a residue (None excluded)."""
    n = np.arange(cutoff + 1)
    if symbol == 0:
        return n == 0
    if symbol == 4:
        return (n % 4 == 0) & (n > 0)
    return n % 4 == symbol


def residue_mask(j: int, cutoff: int) -> np.ndarray:
    return np.arange(cutoff + 1) % 4 == j


# -- oracle comparison ------------------------------------------------------------

@dataclass(frozen=True)
class OracleReport:
    alpha: float
    cutoff: int
    inner_product_dev: float
    generation_amplitude_dev: float
    generation_probability_dev: float
    class_probability_dev: float
    oracle_probability_sum: float

    @property
    def max_deviation(self) -> float:
        return max(
            self.inner_product_dev,
            self.generation_amplitude_dev,
            self.generation_probability_dev,
            self.class_probability_dev,
        )

    def rows(self) -> list[tuple[str, float]]:
        return [
            ("alpha_j_inner_products", self.inner_product_dev),
            ("generation_amplitudes", self.generation_amplitude_dev),
            ("generation_probabilities", self.generation_probability_dev),
            ("class_probabilities", self.class_probability_dev),
            ("oracle_probability_sum_minus_1", abs(self.oracle_probability_sum - 1)),
        ]


def _check_cutoff(required: int, override: Optional[int], limit: int) -> int:
    n = required if override is None else int(override)
    if n > limit:
        raise ResourceError(f"oracle needs cutoff {n} > limit {limit}", n)
    return n


def _split_with_vacuum(gamma: complex, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Factors of ``BS|gamma, 0>``, recovered from the (rank one) two-mode array."""
    arr = _bs_pair(np.multiply.outer(coherent_column(gamma, n), coherent_column(0, n)))
    u, s, vh = np.linalg.svd(arr)
    return s[0] * u[:, 0], vh[0]


def _generation_fock(basis: AlphaBasis, n: int) -> FockVector:
    cat_a = to_fock(even_cat(basis.alpha), (n,)).amplitudes
    cat_b = to_fock(even_cat(-1j * basis.alpha), (n,)).amplitudes
    v = FockVector((n, n), np.multiply.outer(cat_a, cat_b))
    v = fock_beam_splitter(v, 0, 1)
    v = fock_phase_shifter(v, 1)
    return fock_beam_splitter(v, 0, 1)


def _pair_grams(pairs: np.ndarray, n: int) -> np.ndarray:
    """``G[x, y, s, t] = <p_s| Q_x (x) Q_y |p_t>`` for symbols x, y in 0..4."""
    masks = np.array([symbol_mask(sym, n) for sym in range(5)], dtype=float)
    # sum over both photon numbers with the product mask
    return np.einsum("xa,yb,sab,tab->xyst", masks, masks, pairs.conj(), pairs, optimize=True)


class FockTeleport:
    """Number-basis version of the teleportation measurement.

    The sender's four output modes come in two independent pairs, (9, 8) and
    (10, 11), each produced by one splitter; their Gram matrices under every
    pair of counting symbols are tabulated once.
    """

    def __init__(self, basis: AlphaBasis, c, channel: int = 0, cutoff: Optional[int] = None):
        n = cutoff if cutoff is not None else cutoff_for(abs(basis.alpha))
        c = np.asarray(c, dtype=complex)
        c = c / np.linalg.norm(c)
        k1, k2 = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
        k1, k2 = k1.ravel(), k2.ravel()
        a_amp, b_amp = basis.alpha * i_pow(k1), basis.alpha * i_pow(k2)
        eps = basis.N[None, :] * i_pow(-np.outer(k1, np.arange(4)))
        self.weights = basis.ecs_normalizer(channel) * i_pow(-channel * k2) * (eps @ c)
        pair_98, pair_ab = [], []
        for a, b in zip(a_amp, b_amp):
            m4, m5 = _split_with_vacuum(a, n)
            m6, m7 = _split_with_vacuum(b, n)
            m5 = m5 * i_pow(-np.arange(n + 1))
            pair_98.append(_bs_pair(np.multiply.outer(m5, m7)))  # axes (9, 8)
            pair_ab.append(_bs_pair(np.multiply.outer(m4, m6)))  # axes (10, 11)
        self.g98 = _pair_grams(np.array(pair_98), n)
        self.gab = _pair_grams(np.array(pair_ab), n)
        self.bob = np.array([coherent_column(b, n) for b in b_amp])
        self.basis_cols = np.array([to_fock(alpha_j_state(basis, j), (n,)).amplitudes for j in range(4)])
        self.cutoff = n

    def _gram(self, pc) -> np.ndarray:
        s8, s9, s10, s11 = pc.symbols
        return self.g98[s9, s8] * self.gab[s10, s11]

    def probability(self, pc) -> float:
        gram = self._gram(pc) * (self.bob.conj() @ self.bob.T)
        w = self.weights
        return float(np.real(w.conj() @ gram @ w))

    def bob_state(self, pc) -> np.ndarray:
        """Unnormalized receiver state in the ``{|alpha_j>}`` basis."""
        v = (self.basis_cols.conj() @ self.bob.T) * self.weights[None, :]
        return v @ self._gram(pc).T @ v.conj().T


def fock_class_probabilities(basis: AlphaBasis, c, channel: int = 0, cutoff: Optional[int] = None) -> dict:
    """Counting-class probabilities for information vector ``c`` from number-basis arrays."""
    ft = FockTeleport(basis, c, channel, cutoff)
    return {pc: ft.probability(pc) for pc in enumerate_pc_classes()}


def oracle_compare(
    basis: AlphaBasis,
    c,
    channel: int = 0,
    cutoff_override: Optional[int] = None,
    max_cutoff: int = MAX_CUTOFF,
) -> OracleReport:
    """Largest deviations between the exact algebra and the number-basis oracle."""
    alpha = abs(basis.alpha)
    if alpha > MAX_ALPHA:
        raise DomainError(f"|alpha|={alpha:.6g} exceeds the oracle bound {MAX_ALPHA}")
    # the generation circuit carries amplitudes up to sqrt(2)|alpha|
    n = _check_cutoff(cutoff_for(np.sqrt(2) * alpha), cutoff_override, max_cutoff)

    states = [alpha_j_state(basis, j) for j in range(4)]
    exact = np.array([[inner_product(a, b) for b in states] for a in states])
    fock = [to_fock(s, (n,)) for s in states]
    oracle = np.array([[a.inner(b) for b in fock] for a in fock])
    ip_dev = float(np.max(np.abs(exact - oracle)))

    gen = _generation_fock(basis, n)
    gen_exact = to_fock(circuit_output(basis), (n, n))
    amp_dev = float(np.max(np.abs(gen.amplitudes - gen_exact.amplitudes)))
    probs = [o.probability for o in run_generation(basis)]
    pj = [float(np.sum(np.abs(gen.amplitudes[residue_mask(j, n)]) ** 2)) for j in range(4)]
    gp_dev = float(np.max(np.abs(np.subtract(probs, pj))))

    sim = TeleportSimulator(basis, channel)
    cn = np.asarray(c, dtype=complex) / np.linalg.norm(c)
    fp = fock_class_probabilities(basis, cn, channel, n)
    cp_dev = max(abs(sim.channel_for(pc).probability(cn) - p) for pc, p in fp.items())
    return OracleReport(alpha, n, ip_dev, amp_dev, gp_dev, float(cp_dev), float(sum(fp.values())))
