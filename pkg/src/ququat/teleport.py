"""Linear-optics teleportation of a ququat through ``|E_j>``.

The sender holds the information state in mode 1 and half of the channel in
mode 2; the receiver holds mode 3.  Two beam splitters, a phase shifter and two
more beam splitters map ``|a, b, c>`` to

    |i(a+b)/2, (a-b)/2, (a+ib)/2, (ia+b)/2, c>   on modes (8, 9, 10, 11, 3)

and the sender counts photons in modes 8-11.  Each mode reports one symbol:
0 for no photons, 1/2/3 for nonzero counts with that residue mod 4, and 4 for
nonzero counts divisible by 4.

Because the output is linear in the information coefficients ``c``, every
counting class acts on ``c`` through a fixed set of 4x4 Kraus operators.  They
are computed once per class from exact coherent overlaps; probabilities,
conditional states and fidelities for any ``c`` then follow by matrix products.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .basis import AlphaBasis, ecs_state, info_state
from .coherent import (
    CoherentSuperposition,
    apply_beam_splitter,
    apply_phase_shifter,
    bob_vectors,
    canonicalize,
    i_pow,
    mod4_kernel,
    reduced_dm4,
    tensor,
)
from .errors import ArityError

GROUPS = ("I", "II", "III.I", "III.II", "IV")
ALICE_MODES = (8, 9, 10, 11)
CODE_BITS = 9


# -- circuit -----------------------------------------------------------------

def circuit_map(s: CoherentSuperposition) -> CoherentSuperposition:
    """Closed-form action on modes (1, 2, 3); output modes are (8, 9, 10, 11, 3)."""
    if s.mode_count != 3:
        raise ArityError(f"teleportation circuit takes 3 modes, got {s.mode_count}")
    a, b, c = s.amps.T
    out = np.stack([1j * (a + b) / 2, (a - b) / 2, (a + 1j * b) / 2, (1j * a + b) / 2, c], axis=1)
    return CoherentSuperposition(s.coeffs, out)


def circuit_elementwise(s: CoherentSuperposition) -> CoherentSuperposition:
    """The same map built from the individual optical elements.

    Working modes: 0 = in1, 1 = in2, 2 = receiver, 3 and 4 = vacuum ports.
    BS1 (in1, vac) -> (4, 5); BS2 (in2, vac) -> (6, 7); PS on 5;
    BS-57 sends (5, 7) -> (9, 8); BS-46 sends (4, 6) -> (10, 11).
    """
    if s.mode_count != 3:
        raise ArityError(f"teleportation circuit takes 3 modes, got {s.mode_count}")
    s = tensor(s, CoherentSuperposition.coherent(0, 0))
    s = apply_beam_splitter(s, 0, 3)  # mode 4 at 0, mode 5 at 3
    s = apply_beam_splitter(s, 1, 4)  # mode 6 at 1, mode 7 at 4
    s = apply_phase_shifter(s, 3)
    s = apply_beam_splitter(s, 3, 4)  # mode 9 at 3, mode 8 at 4
    s = apply_beam_splitter(s, 0, 1)  # mode 10 at 0, mode 11 at 1
    order = [4, 3, 0, 1, 2]
    return CoherentSuperposition(s.coeffs, s.amps[:, order])


def joint_initial(c, basis: AlphaBasis, channel: int = 0) -> CoherentSuperposition:
    """``|I>_1 (x) |E_channel>_{2,3}``."""
    return tensor(info_state(c, basis), ecs_state(basis, channel))


# -- counting classes ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class PCClass:
    symbols: tuple[int, int, int, int]

    def __post_init__(self):
        sym = tuple(int(v) for v in self.symbols)
        if len(sym) != 4 or any(v not in range(5) for v in sym):
            raise ValueError(f"bad photon-counting symbols {self.symbols}")
        object.__setattr__(self, "symbols", sym)

    @property
    def zeros(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.symbols) if v == 0)

    @property
    def group(self) -> Optional[str]:
        z = self.zeros
        if len(z) == 4:
            return "I"
        if len(z) == 3:
            return "II"
        if len(z) == 2:
            return "III.II" if z in ((0, 1), (2, 3)) else "III.I"
        if len(z) == 1:
            return "IV"
        return None

    @property
    def reachable(self) -> bool:
        return bool(self.zeros)

    def label(self) -> str:
        return "(" + ",".join(map(str, self.symbols)) + ")"

    def __str__(self):
        return self.label()

    @classmethod
    def parse(cls, text: str) -> "PCClass":
        return cls(tuple(int(t) for t in text.strip().strip("()").split(",")))


def all_symbol_tuples() -> list[PCClass]:
    return [PCClass(t) for t in itertools.product(range(5), repeat=4)]


def enumerate_pc_classes() -> list[PCClass]:
    """The 369 reachable classes, lexicographic by symbols."""
    return [p for p in all_symbol_tuples() if p.reachable]


def encode_outcome(pc: PCClass) -> str:
    """9-bit big-endian index of the class among the reachable classes."""
    return format(_CLASS_INDEX[pc], f"0{CODE_BITS}b")


def decode_outcome(bits: str) -> PCClass:
    if len(bits) != CODE_BITS or set(bits) - {"0", "1"}:
        raise ValueError(f"expected {CODE_BITS} bits, got {bits!r}")
    idx = int(bits, 2)
    if idx >= len(_CLASSES):
        raise ValueError(f"code {bits} does not name a counting class")
    return _CLASSES[idx]


_CLASSES = enumerate_pc_classes()
_CLASS_INDEX = {p: i for i, p in enumerate(_CLASSES)}


# -- correction operators and receiver-state forms ------------------------------

def u_matrix(j: int, k: int) -> np.ndarray:
    """``U^(j,k) = sum_l (-i)^(jl) |alpha_(k+l)><alpha_l|``."""
    m = np.zeros((4, 4), dtype=complex)
    for l in range(4):
        m[(k + l) % 4, l] = i_pow(-j * l)
    return m


def ujkm_matrix(j: int, k: int, m: int) -> np.ndarray:
    return 0.5 * (u_matrix(j, k) + i_pow(-m) * u_matrix(j + 2, k))


def b_matrix(j: int, k: int, r) -> np.ndarray:
    """Linear map ``c -> B^(j,k) = sum_l c_(l+k) (r_l / r_(l+k)) i^(jl) |alpha_l>``."""
    r = np.asarray(r)
    out = np.zeros((4, 4), dtype=complex)
    for l in range(4):
        out[l, (l + k) % 4] = r[l] / r[(l + k) % 4] * i_pow(j * l)
    return out


def bjkm_matrix(j: int, k: int, m: int, r) -> np.ndarray:
    return 0.5 * (b_matrix(j, k, r) + i_pow(m) * b_matrix(j + 2, k, r))


@dataclass(frozen=True)
class Correction:
    kind: str  # identity | U_jk | U_jkm | none_fail
    j: int = 0
    k: int = 0
    m: int = 0
    prefactor: complex = 1.0
    matrix: np.ndarray = field(default_factory=lambda: np.eye(4, dtype=complex), compare=False)

    @property
    def label(self) -> str:
        pre = _prefactor_label(self.prefactor)
        if self.kind == "identity":
            return "I"
        if self.kind == "U_jk":
            return f"{pre}U({self.j},{self.k})"
        if self.kind == "U_jkm":
            return f"{pre}U({self.j},{self.k},{self.m})"
        return "fail"

    @property
    def operator(self) -> np.ndarray:
        return self.prefactor * self.matrix


def _prefactor_label(p: complex) -> str:
    table = {1: "", -1: "-", 1j: "i", -1j: "-i"}
    for key, lab in table.items():
        if abs(p - key) < 1e-12:
            return lab
    if abs(p - np.sqrt(2)) < 1e-12:
        return "sqrt2*"
    return f"({p:.6g})*"


def unitary_U(j: int, k: int, basis: Optional[AlphaBasis] = None, prefactor: complex = 1.0) -> Correction:
    kind = "identity" if (j % 4, k % 4) == (0, 0) and prefactor == 1 else "U_jk"
    return Correction(kind, j % 4, k % 4, 0, prefactor, u_matrix(j, k))


def unitary_Ujkm(j: int, k: int, m: int, basis: Optional[AlphaBasis] = None, prefactor: complex = 1.0) -> Correction:
    return Correction("U_jkm", j % 4, k % 4, m % 4, prefactor, ujkm_matrix(j, k, m))


FAIL = Correction("none_fail")


def fidelity_form_id(kind: str, k: int, m: int = 1) -> str:
    """Fidelity family reached by the ideal correction for a receiver-state form."""
    if kind == "U_jk":
        return f"F{7 + k}"
    if m % 2 == 1:
        return {1: "F5", 3: "F6"}.get(k, "?")
    return {(0, 0): "F1", (0, 2): "F2", (2, 2): "F3", (2, 0): "F4"}.get((k, m), "?")


# -- measurement ---------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementOutcome:
    pc_class: PCClass
    probability: float
    bob_dm: Optional[np.ndarray]
    purity: float

    @property
    def defined(self) -> bool:
        return self.bob_dm is not None


def _outcome(pc: PCClass, rho: np.ndarray) -> MeasurementOutcome:
    p = float(np.trace(rho).real)
    if not p > 1e-300:
        return MeasurementOutcome(pc, max(p, 0.0), None, float("nan"))
    rho = rho / p
    rho = 0.5 * (rho + rho.conj().T)
    purity = float(np.real(np.trace(rho @ rho)))
    return MeasurementOutcome(pc, p, rho, purity)


def measure(out_state: CoherentSuperposition, pc_class: PCClass, basis: AlphaBasis) -> MeasurementOutcome:
    """Project modes 8-11 of a circuit output onto ``pc_class``; mode 3 is kept."""
    if out_state.mode_count != 5:
        raise ArityError(f"expected the 5-mode circuit output, got {out_state.mode_count} modes")
    rho = reduced_dm4(out_state, 4, basis, symbols=pc_class.symbols)
    return _outcome(pc_class, rho)


def teleport_fidelity(outcome: MeasurementOutcome, correction: Correction, c) -> float:
    """``<I| U rho U^dagger |I>`` for the corrected receiver state."""
    if not outcome.defined:
        raise ValueError(f"class {outcome.pc_class} has zero probability; no receiver state")
    c = np.asarray(c, dtype=complex)
    u = correction.operator
    return float(np.real(np.conj(c) @ u @ outcome.bob_dm @ u.conj().T @ c))


@dataclass(frozen=True)
class ClassChannel:
    """Kraus representation of one counting class acting on the information vector."""

    pc_class: PCClass
    kraus: np.ndarray  # (n, 4, 4)
    singular_values: np.ndarray

    @property
    def pure(self) -> bool:
        s = self.singular_values
        return bool(s.size and s[0] > 0 and (s.size == 1 or s[1] <= 1e-7 * s[0]))

    @property
    def effective(self) -> np.ndarray:
        """Dominant rank-one component, valid when the class leaves a pure state."""
        flat = self.kraus.reshape(len(self.kraus), 16)
        _, s, vh = np.linalg.svd(flat, full_matrices=False)
        return (s[0] * vh[0]).reshape(4, 4)

    def rho(self, c) -> np.ndarray:
        v = np.einsum("nij,j->ni", self.kraus, np.asarray(c, dtype=complex))
        return v.T @ v.conj()

    def probability(self, c) -> float:
        v = np.einsum("nij,j->ni", self.kraus, np.asarray(c, dtype=complex))
        return float(np.sum(np.abs(v) ** 2))


class TeleportSimulator:
    """Exact simulation of the protocol at one amplitude and channel index."""

    def __init__(self, basis: AlphaBasis, channel: int = 0):
        if channel not in range(4):
            raise ValueError(f"channel {channel} not in 0..3")
        self.basis = basis
        self.channel = channel
        k1, k2 = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
        k1, k2 = k1.ravel(), k2.ravel()
        alpha = basis.alpha
        a, b = alpha * i_pow(k1), alpha * i_pow(k2)
        inp = CoherentSuperposition(np.ones(16), np.stack([a, b, b], axis=1))
        self.out_amps = circuit_map(inp).amps
        # coefficient of term (k1, k2) as a linear function of c
        eps_of_c = basis.N[None, :] * i_pow(-np.outer(k1, np.arange(4)))
        ecs = basis.ecs_normalizer(channel) * i_pow(-channel * k2)
        self.coef_map = ecs[:, None] * eps_of_c
        self.bob = bob_vectors(self.out_amps[:, 4], basis)
        self._cache: dict[PCClass, ClassChannel] = {}

    def output_state(self, c) -> CoherentSuperposition:
        coeffs = self.coef_map @ np.asarray(c, dtype=complex)
        return canonicalize(CoherentSuperposition(coeffs, self.out_amps))

    def channel_for(self, pc: PCClass) -> ClassChannel:
        if pc not in self._cache:
            self._cache[pc] = self._build(pc)
        return self._cache[pc]

    def _build(self, pc: PCClass) -> ClassChannel:
        gram = np.ones((16, 16), dtype=complex)
        for m, sym in enumerate(pc.symbols):
            gram = gram * mod4_kernel(self.out_amps[:, m], self.out_amps[:, m], sym)
        gram = 0.5 * (gram + gram.conj().T)
        lam, vec = np.linalg.eigh(gram)
        top = lam.max() if lam.size else 0.0
        keep = lam > max(top, 0.0) * 1e-14
        if top <= 0 or not np.any(keep):
            return ClassChannel(pc, np.zeros((0, 4, 4), dtype=complex), np.zeros(0))
        w = np.sqrt(lam[keep])[:, None] * vec[:, keep].conj().T
        kraus = np.einsum("mt,ti,tj->mij", w, self.bob, self.coef_map)
        sv = np.linalg.svd(kraus.reshape(len(kraus), 16), compute_uv=False)
        return ClassChannel(pc, kraus, sv)

    @cached_property
    def channels(self) -> list[ClassChannel]:
        return [self.channel_for(p) for p in enumerate_pc_classes()]

    def measure(self, c, pc: PCClass) -> MeasurementOutcome:
        return _outcome(pc, self.channel_for(pc).rho(c))

    def outcomes(self, c) -> list[MeasurementOutcome]:
        return [self.measure(c, p) for p in enumerate_pc_classes()]

    # corrections derived from the simulated receiver states

    @cached_property
    def _b_forms(self) -> dict:
        r = self.basis.r
        forms = {}
        for j in range(4):
            for k in range(4):
                forms[("U_jk", j, k, 0)] = b_matrix(j, k, r)
                for m in range(4):
                    forms[("U_jkm", j, k, m)] = bjkm_matrix(j, k, m, r)
        return forms

    def fit_form(self, pc: PCClass) -> tuple[Optional[tuple], float]:
        """Best receiver-state form for a pure class and its cosine similarity."""
        ch = self.channel_for(pc)
        if not ch.pure:
            return None, 0.0
        k_eff = ch.effective
        nk = np.linalg.norm(k_eff)
        kinds = ("U_jk",) if pc.group == "IV" else ("U_jkm",)
        best, best_cos = None, -1.0
        for key, mat in self._b_forms.items():
            if key[0] not in kinds:
                continue
            cos = abs(np.vdot(mat, k_eff)) / (np.linalg.norm(mat) * nk)
            if cos > best_cos + 1e-12:
                best, best_cos = key, cos
        return best, best_cos

    def derived_correction(self, pc: PCClass) -> tuple[Correction, bool, str]:
        """Correction, success flag and fidelity-family id for one class."""
        g = pc.group
        if g == "I":
            return unitary_U(0, 0), False, "F0"
        if g in ("II", "III.I"):
            return FAIL, False, "-"
        form, cos = self.fit_form(pc)
        if form is None or cos < 1 - 1e-8:
            return FAIL, False, "-"
        kind, j, k, m = form
        if kind == "U_jk":
            return unitary_U(j, k), True, fidelity_form_id(kind, k)
        # normalize the label: prefer the j < 2 representative for m odd
        if m % 2 == 1:
            if j >= 2:
                j, m = j - 2, (-m) % 4
            return unitary_Ujkm(j, k, m, prefactor=np.sqrt(2)), True, fidelity_form_id(kind, k, m)
        if j >= 2:
            j = j - 2
        return unitary_U(j, k), False, fidelity_form_id(kind, k, m)
