"""Heralded preparation of ``|alpha_j>`` from two even cat states.

Modes 0 and 1 carry even cats; a beam splitter maps them to modes 2, 3, a
-pi/2 phase shifter acts on mode 3, and a second beam splitter produces modes
4 and 5.  Counting photons modulo 4 in mode 4 heralds ``|alpha_j>`` in mode 5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import AlphaBasis, alpha_j_state, make_basis
from .coherent import (
    CoherentSuperposition,
    apply_beam_splitter,
    apply_phase_shifter,
    canonicalize,
    inner_product,
    norm,
    normalized,
    project_mod4,
    scale,
    tensor,
)
from .errors import UnsupportedSupportError


@dataclass(frozen=True)
class GenerationOutcome:
    j: int
    probability: float
    closed_form: float
    heralded_state: CoherentSuperposition


def even_cat(amplitude: complex) -> CoherentSuperposition:
    """``N_e (|a> + |-a>)``."""
    s = CoherentSuperposition.from_terms([(1, (amplitude,)), (1, (-amplitude,))])
    return normalized(s)


def input_state(basis: AlphaBasis) -> CoherentSuperposition:
    """Modes (0, 1): even cats built on ``alpha`` and ``-i alpha``."""
    return tensor(even_cat(basis.alpha), even_cat(-1j * basis.alpha))


def after_first_splitter(basis: AlphaBasis) -> CoherentSuperposition:
    return canonicalize(apply_beam_splitter(input_state(basis), 0, 1))


def circuit_output(basis: AlphaBasis) -> CoherentSuperposition:
    """Two-mode state on modes (4, 5) before the heralding measurement."""
    s = after_first_splitter(basis)
    s = apply_phase_shifter(s, 1)
    return canonicalize(apply_beam_splitter(s, 0, 1))


def generation_probabilities(basis: AlphaBasis) -> np.ndarray:
    """Closed form ``P_j = N_e^4 r_j^4``."""
    ne_sq = 1 / (2 * (1 + basis.x**2))
    return ne_sq**2 * basis.r**4


def _fix_phase(s: CoherentSuperposition, alpha: complex) -> CoherentSuperposition:
    # make the |alpha> component real positive
    idx = np.flatnonzero(np.abs(s.amps[:, 0] - alpha) < 1e-12 * max(1.0, abs(alpha)))
    if idx.size == 0:
        return s
    c = s.coeffs[idx[0]]
    return scale(s, abs(c) / c) if c != 0 else s


def run_generation(basis: AlphaBasis) -> list[GenerationOutcome]:
    out = circuit_output(basis)
    closed = generation_probabilities(basis)
    results = []
    for j in range(4):
        projected = project_mod4(out, 0, j)
        p = inner_product(projected, projected).real
        # heralded mode 5 state: the mode-4 part of every surviving term is
        # a residue-j projection, identical up to the known phases
        heralded = _herald(projected, basis, j)
        results.append(GenerationOutcome(j, p, float(closed[j]), heralded))
    return results


def _herald(projected: CoherentSuperposition, basis: AlphaBasis, j: int) -> CoherentSuperposition:
    """Conditional state of mode 5 given residue ``j`` in mode 4."""
    # |psi> = sum_t c_t P_j|a_t> |b_t>; pick any unit reference in mode 4 to
    # contract with: <alpha_j| P_j = <alpha_j| and the branch is pure.
    ref = alpha_j_state(basis, j)
    coeffs, amps = [], []
    for c, row in zip(projected.coeffs, projected.amps):
        ov = inner_product(ref, CoherentSuperposition.coherent(row[0]))
        coeffs.append(c * ov)
        amps.append([row[1]])
    s = canonicalize(CoherentSuperposition(np.array(coeffs), np.array(amps)))
    return _fix_phase(normalized(s), basis.alpha)


def ecs_from_heralded(heralded: CoherentSuperposition, basis: AlphaBasis) -> CoherentSuperposition:
    """Split ``|alpha_j>`` with vacuum on a 50-50 beam splitter.

    The second output picks up a factor ``i`` per coherent amplitude; a -pi/2
    phase shifter on that port removes it, leaving ``|E_j>`` at amplitude
    ``alpha / sqrt 2``.
    """
    if heralded.mode_count != 1:
        raise UnsupportedSupportError("heralded state must be single-mode")
    if np.any(np.abs(heralded.amps) > 0):
        _family_index(heralded, basis)
    s = tensor(heralded, CoherentSuperposition.coherent(0))
    s = apply_beam_splitter(s, 0, 1)
    return canonicalize(apply_phase_shifter(s, 1))


def _family_index(s: CoherentSuperposition, basis: AlphaBasis) -> int:
    n = norm(s)
    for j in range(4):
        if abs(abs(inner_product(alpha_j_state(basis, j), s)) - n) < 1e-9 * max(n, 1e-300):
            return j
    raise UnsupportedSupportError("input is not one of the |alpha_j> states")


def split_basis(basis: AlphaBasis) -> AlphaBasis:
    """Basis at amplitude ``alpha / sqrt 2`` (the splitter outputs)."""
    return make_basis(basis.alpha / np.sqrt(2))

