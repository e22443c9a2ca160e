"""Exact algebra over multimode superpositions of coherent states.

A state is stored as a list of terms ``coeff * |a_1, ..., a_M>`` where each
``a_m`` is a coherent amplitude.  Everything the teleportation machinery needs
(overlaps, 50-50 beam splitters, -pi/2 phase shifters, photon-number-mod-4
projectors, vacuum projectors and the reduced state of one mode) closes over
this representation, so no photon-number truncation is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ArityError, UnsupportedSupportError

MERGE_TOL = 1e-12
VACUUM_TOL = 1e-12
# Below this |z| the mod-4 exponential sums are evaluated by their power series,
# which keeps relative accuracy for the tiny overlaps of weak amplitudes.
_SERIES_RADIUS = 4.0
_SERIES_TERMS = 80

_I_POW = np.array([1, 1j, -1, -1j])


def i_pow(n) -> complex:
    """``i**n`` without rounding noise; ``n`` may be negative or an array."""
    return _I_POW[np.mod(n, 4)]


@dataclass(frozen=True)
class CoherentSuperposition:
    coeffs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim == 1:
            amps = amps.reshape(len(coeffs), -1) if len(coeffs) else amps.reshape(0, 0)
        if amps.ndim != 2 or amps.shape[0] != coeffs.shape[0]:
            raise ArityError(f"amps of shape {amps.shape} do not match {coeffs.shape[0]} terms")
        if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(amps))):
            raise ValueError("non-finite coefficient or amplitude")
        coeffs.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def coherent(cls, *amplitudes: complex, coeff: complex = 1.0) -> "CoherentSuperposition":
        """Single product term ``coeff * |amplitudes...>``."""
        return cls(np.array([coeff]), np.array([amplitudes], dtype=complex))

    @classmethod
    def from_terms(cls, terms: Sequence[tuple], mode_count: Optional[int] = None):
        """Build from ``[(coeff, (a_1, ..., a_M)), ...]``."""
        if not terms:
            if mode_count is None:
                raise ArityError("an empty state needs an explicit mode_count")
            return cls.zero(mode_count)
        coeffs = [t[0] for t in terms]
        amps = [tuple(t[1]) for t in terms]
        if len({len(a) for a in amps}) != 1:
            raise ArityError("terms have differing mode counts")
        return cls(np.array(coeffs), np.array(amps, dtype=complex))

    @classmethod
    def zero(cls, mode_count: int) -> "CoherentSuperposition":
        return cls(np.zeros(0, dtype=complex), np.zeros((0, mode_count), dtype=complex))

    @property
    def mode_count(self) -> int:
        return self.amps.shape[1]

    @property
    def n_terms(self) -> int:
        return self.coeffs.shape[0]

    def __len__(self):
        return self.n_terms

    def __add__(self, other: "CoherentSuperposition") -> "CoherentSuperposition":
        return add(self, other)

    def __mul__(self, factor: complex) -> "CoherentSuperposition":
        return scale(self, factor)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def terms(self):
        return [(complex(c), tuple(complex(a) for a in row)) for c, row in zip(self.coeffs, self.amps)]


def _check_mode(s: CoherentSuperposition, mode: int):
    if not (0 <= mode < s.mode_count):
        raise ArityError(f"mode {mode} out of range for a {s.mode_count}-mode state")


def _amp_scale(*states: CoherentSuperposition) -> float:
    m = 0.0
    for s in states:
        if s.amps.size:
            m = max(m, float(np.max(np.abs(s.amps))))
    return max(1.0, m)


def scale(s: CoherentSuperposition, factor: complex) -> CoherentSuperposition:
    return CoherentSuperposition(s.coeffs * factor, s.amps)


def add(s1: CoherentSuperposition, s2: CoherentSuperposition) -> CoherentSuperposition:
    if s1.mode_count != s2.mode_count:
        raise ArityError(f"cannot add {s1.mode_count}-mode and {s2.mode_count}-mode states")
    return CoherentSuperposition(
        np.concatenate([s1.coeffs, s2.coeffs]), np.concatenate([s1.amps, s2.amps])
    )


def tensor(s1: CoherentSuperposition, s2: CoherentSuperposition) -> CoherentSuperposition:
    """Product state with the modes of ``s1`` first."""
    n1, n2 = s1.n_terms, s2.n_terms
    coeffs = np.outer(s1.coeffs, s2.coeffs).reshape(-1)
    amps = np.concatenate(
        [np.repeat(s1.amps, n2, axis=0), np.tile(s2.amps, (n1, 1))], axis=1
    )
    return CoherentSuperposition(coeffs, amps)


def canonicalize(s: CoherentSuperposition, tolerance: float = MERGE_TOL) -> CoherentSuperposition:
    """Snap near-vacuum amplitudes to 0, merge equal amplitude tuples, drop null terms."""
    if s.n_terms == 0:
        return s
    tol = tolerance * _amp_scale(s)
    amps = np.where(np.abs(s.amps) < tol, 0.0, s.amps)
    reps: list[np.ndarray] = []
    coeffs: list[complex] = []
    for c, row in zip(s.coeffs, amps):
        if reps:
            dist = np.max(np.abs(np.asarray(reps) - row), axis=1)
            hit = int(np.argmin(dist))
            if dist[hit] < tol:
                coeffs[hit] += c
                continue
        reps.append(row)
        coeffs.append(complex(c))
    coeffs_arr = np.array(coeffs)
    # exact cancellations (e.g. P_1 acting on vacuum) leave rounding-level residue
    keep = np.abs(coeffs_arr) > 1e-15 * max(1.0, float(np.sum(np.abs(s.coeffs))))
    if not np.any(keep):
        return CoherentSuperposition.zero(s.mode_count)
    return CoherentSuperposition(coeffs_arr[keep], np.asarray(reps)[keep])


def overlap_matrix(bra_amps: np.ndarray, ket_amps: np.ndarray) -> np.ndarray:
    """``<a_s|b_t>`` for all term pairs, amplitudes of shape (S, M) and (T, M)."""
    a = bra_amps[:, None, :]
    b = ket_amps[None, :, :]
    log_k = -0.5 * np.abs(a) ** 2 - 0.5 * np.abs(b) ** 2 + np.conj(a) * b
    return np.exp(np.sum(log_k, axis=-1))


def inner_product(s1: CoherentSuperposition, s2: CoherentSuperposition) -> complex:
    """``<s1|s2>``, antilinear in the first argument."""
    if s1.mode_count != s2.mode_count:
        raise ArityError(f"mode count mismatch: {s1.mode_count} vs {s2.mode_count}")
    if s1.n_terms == 0 or s2.n_terms == 0:
        return 0j
    g = overlap_matrix(s1.amps, s2.amps)
    return complex(np.conj(s1.coeffs) @ g @ s2.coeffs)


def norm(s: CoherentSuperposition) -> float:
    return float(np.sqrt(max(inner_product(s, s).real, 0.0)))


def normalized(s: CoherentSuperposition) -> CoherentSuperposition:
    n = norm(s)
    if n == 0:
        raise ValueError("cannot normalize the zero state")
    return scale(s, 1 / n)


def apply_beam_splitter(s: CoherentSuperposition, mode_a: int, mode_b: int) -> CoherentSuperposition:
    """50-50 beam splitter: ``(a, b) -> ((a + i b)/sqrt2, (i a + b)/sqrt2)``."""
    _check_mode(s, mode_a)
    _check_mode(s, mode_b)
    if mode_a == mode_b:
        raise ArityError("beam splitter needs two distinct modes")
    amps = s.amps.copy()
    a, b = s.amps[:, mode_a], s.amps[:, mode_b]
    amps[:, mode_a] = (a + 1j * b) / np.sqrt(2)
    amps[:, mode_b] = (1j * a + b) / np.sqrt(2)
    return CoherentSuperposition(s.coeffs, amps)


def apply_phase_shifter(s: CoherentSuperposition, mode: int) -> CoherentSuperposition:
    """-pi/2 phase shifter: ``a -> -i a``."""
    _check_mode(s, mode)
    amps = s.amps.copy()
    amps[:, mode] = -1j * amps[:, mode]
    return CoherentSuperposition(s.coeffs, amps)


def project_vacuum(s: CoherentSuperposition, mode: int) -> CoherentSuperposition:
    """``|0><0|`` on one mode: ``|g> -> exp(-|g|^2/2) |0>``."""
    _check_mode(s, mode)
    amps = s.amps.copy()
    factor = np.exp(-0.5 * np.abs(amps[:, mode]) ** 2)
    amps[:, mode] = 0
    return canonicalize(CoherentSuperposition(s.coeffs * factor, amps))


def project_mod4(
    s: CoherentSuperposition, mode: int, j: int, exclude_vacuum: bool = False
) -> CoherentSuperposition:
    """Project one mode onto photon numbers ``n = j (mod 4)``.

    Uses ``P_j|g> = 1/4 sum_k i^(-jk) |i^k g>``.  With ``exclude_vacuum`` and
    ``j == 0`` the ``n = 0`` component is removed as well.  The result is not
    normalized; its squared norm is the outcome probability.
    """
    _check_mode(s, mode)
    if j not in (0, 1, 2, 3):
        raise ValueError(f"residue class {j} is not in 0..3")
    coeffs, amps = [], []
    for k in range(4):
        rotated = s.amps.copy()
        rotated[:, mode] = i_pow(k) * rotated[:, mode]
        coeffs.append(s.coeffs * i_pow(-j * k) / 4)
        amps.append(rotated)
    if exclude_vacuum and j == 0:
        vac = s.amps.copy()
        vac[:, mode] = 0
        coeffs.append(-s.coeffs * np.exp(-0.5 * np.abs(s.amps[:, mode]) ** 2))
        amps.append(vac)
    return canonicalize(CoherentSuperposition(np.concatenate(coeffs), np.concatenate(amps)))


def _mod4_series(z: np.ndarray, j: int) -> np.ndarray:
    """``sum_{n = j mod 4} z^n / n!`` by direct summation."""
    total = np.zeros_like(z)
    term = np.ones_like(z)
    for n in range(_SERIES_TERMS):
        if n > 0:
            term = term * z / n
        if n % 4 == j:
            total = total + term
    return total


def mod4_kernel(bra: np.ndarray, ket: np.ndarray, symbol: Optional[int]) -> np.ndarray:
    """Matrix elements ``<bra_s| Q |ket_t>`` of a single-mode projector.

    ``symbol`` follows the photon-counting alphabet: 0 is the vacuum projector,
    1..3 are the mod-4 residue projectors, 4 is the nonzero multiple-of-4
    projector (``P_0 - |0><0|``); ``None`` gives the plain overlap.
    """
    a = np.asarray(bra, dtype=complex)[:, None]
    b = np.asarray(ket, dtype=complex)[None, :]
    damp = -0.5 * (np.abs(a) ** 2 + np.abs(b) ** 2)
    z = np.conj(a) * b
    if symbol is None:
        return np.exp(damp + z)
    if symbol == 0:
        return np.exp(damp) * np.ones_like(z)
    if symbol not in (1, 2, 3, 4):
        raise ValueError(f"unknown photon-counting symbol {symbol}")
    j = symbol % 4
    small = np.abs(z) <= _SERIES_RADIUS
    out = np.empty(np.broadcast(a, b).shape, dtype=complex)
    damp = np.broadcast_to(damp, out.shape)
    z = np.broadcast_to(z, out.shape)
    if np.any(small):
        series = _mod4_series(z[small], j)
        if symbol == 4:
            series = series - 1
        out[small] = np.exp(damp[small]) * series
    big = ~small
    if np.any(big):
        zb, db = z[big], damp[big]
        acc = sum(i_pow(-j * k) * np.exp(i_pow(k) * zb + db) for k in range(4)) / 4
        if symbol == 4:
            acc = acc - np.exp(db)
        out[big] = acc
    return out


def bob_vectors(bob_amps: np.ndarray, basis, tolerance: float = VACUUM_TOL) -> np.ndarray:
    """Coordinates of ``|i^k alpha>`` in the ``{|alpha_j>}`` basis, one row per amplitude."""
    alpha = basis.alpha
    tol = tolerance * max(1.0, abs(alpha))
    candidates = alpha * _I_POW
    dist = np.abs(np.asarray(bob_amps)[:, None] - candidates[None, :])
    k = np.argmin(dist, axis=1)
    bad = dist[np.arange(len(k)), k] >= tol
    if np.any(bad):
        raise UnsupportedSupportError(
            f"amplitude {complex(np.asarray(bob_amps)[bad][0]):.6g} is not one of "
            f"+-alpha, +-i alpha for alpha={alpha:.6g}"
        )
    jj = np.arange(4)
    return 0.5 * np.asarray(basis.r)[None, :] * i_pow(np.outer(k, jj))


def reduced_dm4(
    s: CoherentSuperposition,
    keep_mode: int,
    basis,
    symbols: Optional[Sequence[Optional[int]]] = None,
) -> np.ndarray:
    """Unnormalized reduced state of ``keep_mode`` after optional projectors.

    ``symbols`` gives one photon-counting symbol (or ``None``) per traced-out
    mode in increasing mode order.  The trace of the result is the probability
    of the projected outcome.
    """
    _check_mode(s, keep_mode)
    others = [m for m in range(s.mode_count) if m != keep_mode]
    if symbols is None:
        symbols = [None] * len(others)
    if len(symbols) != len(others):
        raise ArityError(f"expected {len(others)} symbols, got {len(symbols)}")
    if s.n_terms == 0:
        return np.zeros((4, 4), dtype=complex)
    v = bob_vectors(s.amps[:, keep_mode], basis)
    gram = np.ones((s.n_terms, s.n_terms), dtype=complex)
    for m, sym in zip(others, symbols):
        gram = gram * mod4_kernel(s.amps[:, m], s.amps[:, m], sym)
    w = v * s.coeffs[:, None]
    # rho = sum_{s,t} c_t c_s^* <phi_s|phi_t> v_t v_s^dagger
    return w.T @ gram.T @ np.conj(w)


def trace_out_to_dm4(s: CoherentSuperposition, keep_mode: int, basis) -> np.ndarray:
    """Normalized reduced density matrix of ``keep_mode`` in the ``{|alpha_j>}`` basis."""
    rho = reduced_dm4(s, keep_mode, basis)
    tr = np.trace(rho).real
    if tr <= 0:
        raise ValueError("zero state has no reduced density matrix")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)
