"""Closed-form probabilities and fidelities, worst-case searches and alpha sweeps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable

import numpy as np

from .basis import AlphaBasis, MIN_ALPHA, make_basis
from .errors import DomainError
from .teleport import TeleportSimulator

FIDELITY_FORMS = tuple(f"F{i}" for i in range(11))
PROBABILITY_FORMS = ("PI", "PII_4000", "PIII1_4040")
QUANTITIES = (
    "P_I_max",
    "P_II_max",
    "P_III1_max",
    "P_IV_sum_min",
    "MASFI_F5",
    "MASFI_F6",
    "MASFI_F8",
    "MASFI_F9",
    "MASFI_F10",
    "MAVFI",
)
FAIL_POLICIES = ("zero", "overlap")


@dataclass(frozen=True)
class InfoParams:
    theta: float
    phi1: float
    phi2: float
    xi1: float
    xi2: float
    xi3: float

    def c(self) -> np.ndarray:
        return params_to_c(np.array([[self.theta, self.phi1, self.phi2, self.xi1, self.xi2, self.xi3]]))[0]


def params_to_c(p: np.ndarray) -> np.ndarray:
    """Angles (n, 6) -> unit ququat coefficients (n, 4)."""
    p = np.atleast_2d(p)
    th, f1, f2, x1, x2, x3 = p.T
    return np.stack(
        [
            np.cos(th) * np.cos(f1) + 0j,
            np.cos(th) * np.sin(f1) * np.exp(1j * x1),
            np.sin(th) * np.cos(f2) * np.exp(1j * x2),
            np.sin(th) * np.sin(f2) * np.exp(1j * x3),
        ],
        axis=1,
    )


# -- closed forms -------------------------------------------------------------

def _weights(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    return np.abs(c) ** 2


def closed_form_probability(form: str, c, basis: AlphaBasis):
    """Probabilities of the counting results (0000), (4000) and (4040)."""
    w = _weights(c)
    x, s = basis.x, basis.mean_photons
    ne0_sq = basis.ecs_normalizer(0) ** 2
    g = np.cos(s / 2) * np.cosh(s / 2) - 1
    a4, b4 = basis.a[4], basis.b[4]
    c0, c2 = w[..., 0], w[..., 2]
    if form == "PI":
        return 4 * x**2 * c0 / (1 + x**4 + 2 * x**2 * np.cos(2 * s))
    if form == "PII_4000":
        return ne0_sq * (a4**2 * x + 4 * b4**2 * x**1.5 * (c0 + c2) + 4 * x**2 * g * (c0 - c2))
    if form == "PIII1_4040":
        return 2 * ne0_sq * (a4**2 * b4**2 * np.sqrt(x) + x**2 * g**2 * (c0 - c2))
    raise ValueError(f"unknown probability form {form!r}")


def _ratio(num, den):
    num, den = np.asarray(num, dtype=float), np.asarray(den, dtype=float)
    out = np.zeros(np.broadcast(num, den).shape)
    ok = den > 0
    np.divide(num, den, out=out, where=ok)
    return out


def fidelity_form(form: str, c, basis: AlphaBasis):
    """The tabulated fidelity families, for one ``c`` or a stack of shape (n, 4)."""
    w = _weights(c)
    r0, r1, r2, r3 = basis.r
    c0, c1, c2, c3 = (w[..., i] for i in range(4))
    if form == "F0":
        return c0
    if form == "F1":
        return c0 + c2
    if form == "F2":
        return c1 + c3
    if form == "F3":
        return _ratio((c3 * r1**2 + c1 * r3**2) ** 2, c3 * r1**4 + c1 * r3**4)
    if form == "F4":
        return _ratio((c2 * r0**2 + c0 * r2**2) ** 2, c2 * r0**4 + c0 * r2**4)
    if form in ("F5", "F8"):
        num = c1 * r0**2 * r2 * r3 + c2 * r1**2 * r3 * r0 + c3 * r2**2 * r0 * r1 + c0 * r3**2 * r1 * r2
        den = (c1 * r0**4 * r2**2 * r3**2 + c2 * r1**4 * r3**2 * r0**2
               + c3 * r2**4 * r0**2 * r1**2 + c0 * r3**4 * r1**2 * r2**2)
        return _ratio(num**2, den)
    if form in ("F6", "F10"):
        num = c3 * r0**2 * r1 * r2 + c0 * r1**2 * r2 * r3 + c1 * r2**2 * r3 * r0 + c2 * r3**2 * r0 * r1
        den = (c3 * r0**4 * r1**2 * r2**2 + c0 * r1**4 * r2**2 * r3**2
               + c1 * r2**4 * r3**2 * r0**2 + c2 * r3**4 * r0**2 * r1**2)
        return _ratio(num**2, den)
    if form == "F7":
        return np.ones_like(c0)
    if form == "F9":
        num = c0 * r2**2 * r1 * r3 + c1 * r3**2 * r0 * r2 + c2 * r0**2 * r1 * r3 + c3 * r1**2 * r0 * r2
        den = (c0 * r2**4 * r1**2 * r3**2 + c1 * r3**4 * r0**2 * r2**2
               + c2 * r0**4 * r1**2 * r3**2 + c3 * r1**4 * r0**2 * r2**2)
        return _ratio(num**2, den)
    raise ValueError(f"unknown fidelity form {form!r}")


# -- deterministic multistart minimizer -----------------------------------------

_GOLD = (np.sqrt(5) - 1) / 2
_MAG_GRID = np.array([0.0, np.pi / 6, np.pi / 3, np.pi / 2])
_PHASE_GRID = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])


def lattice_starts() -> np.ndarray:
    grids = [_MAG_GRID] * 3 + [_PHASE_GRID] * 3
    return np.array(list(itertools.product(*grids)))


def golden_section(f: Callable, lo: np.ndarray, hi: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Vectorized golden-section minimization of ``f`` over per-row brackets."""
    a, b = np.array(lo, dtype=float), np.array(hi, dtype=float)
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    while np.max(b - a) > tol:
        left = fc <= fd
        # keep [a, d] where the left probe is lower, else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - _GOLD * (b - a), d)
        nd = np.where(left, c, a + _GOLD * (b - a))
        probe = np.where(left, nc, nd)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = nc, nd
    return 0.5 * (a + b)


def multistart_minimize(
    fun: Callable[[np.ndarray], np.ndarray],
    keep: int = 32,
    step_tol: float = 1e-6,
    max_sweeps: int = 200,
) -> tuple[float, np.ndarray]:
    """Minimize ``fun`` over the six information-state angles.

    ``fun`` maps an (n, 6) array of angles to n values.  All 4^6 lattice points
    are evaluated, the best ``keep`` are refined by coordinate-wise
    golden-section descent until no coordinate moves by more than
    ``step_tol``.  Fully deterministic.
    """
    starts = lattice_starts()
    vals = fun(starts)
    order = np.argsort(vals, kind="stable")[:keep]
    x = starts[order].copy()
    fx = vals[order].copy()
    width = np.full(6, np.pi / 6)
    width[3:] = np.pi / 2
    h = np.tile(width, (len(x), 1))
    for _ in range(max_sweeps):
        moved = np.zeros(len(x))
        for d in range(6):
            def along(t, d=d):
                trial = x.copy()
                trial[:, d] = t
                return fun(trial)

            t = golden_section(along, x[:, d] - h[:, d], x[:, d] + h[:, d], tol=step_tol / 4)
            ft = along(t)
            better = ft < fx
            step = np.where(better, np.abs(t - x[:, d]), 0.0)
            x[:, d] = np.where(better, t, x[:, d])
            fx = np.where(better, ft, fx)
            moved = np.maximum(moved, step)
            # shrink the bracket once the coordinate settles, widen when it hits the edge
            h[:, d] = np.clip(np.where(step > 0.9 * h[:, d], 2 * h[:, d], np.maximum(4 * step, h[:, d] / 2)),
                              step_tol, width[d])
        if np.max(moved) <= step_tol and np.all(h <= 2 * step_tol + 1e-15):
            break
    best = int(np.argmin(fx))
    return float(fx[best]), x[best]


# -- protocol-level quantities ---------------------------------------------------

@lru_cache(maxsize=64)
def simulator(alpha: complex, channel: int = 0) -> TeleportSimulator:
    return TeleportSimulator(make_basis(alpha), channel)


class FidelityModel:
    """Precomputed operator stacks turning favg and group sums into quadratic forms."""

    def __init__(self, sim: TeleportSimulator):
        self.sim = sim
        success, fail_overlap, group_iv = [], [], []
        for ch in sim.channels:
            if ch.kraus.shape[0] == 0:
                continue
            corr, ok, _ = sim.derived_correction(ch.pc_class)
            u = corr.operator if corr.kind != "none_fail" else np.eye(4)
            lk = np.einsum("ab,nbc->nac", u, ch.kraus)
            (success if ok else fail_overlap).append(lk)
            if ch.pc_class.group == "IV":
                group_iv.append(ch.kraus)
        empty = np.zeros((0, 4, 4), dtype=complex)
        self.success = np.concatenate(success) if success else empty
        self.fail = np.concatenate(fail_overlap) if fail_overlap else empty
        self.group_iv = np.concatenate(group_iv) if group_iv else empty

    @staticmethod
    def _quad(stack: np.ndarray, c: np.ndarray) -> np.ndarray:
        # sum_n |c^dagger L_n c|^2 for each row of c
        amp = np.einsum("pa,nab,pb->pn", c.conj(), stack, c)
        return np.sum(np.abs(amp) ** 2, axis=1)

    def favg(self, c, fail_policy: str = "zero") -> np.ndarray:
        if fail_policy not in FAIL_POLICIES:
            raise ValueError(f"unknown fail policy {fail_policy!r}")
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        total = self._quad(self.success, c)
        if fail_policy == "overlap":
            total = total + self._quad(self.fail, c)
        return total

    def group_iv_probability(self, c) -> np.ndarray:
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        v = np.einsum("nab,pb->pna", self.group_iv, c)
        return np.sum(np.abs(v) ** 2, axis=(1, 2))


@lru_cache(maxsize=64)
def fidelity_model(alpha: complex, channel: int = 0) -> FidelityModel:
    return FidelityModel(simulator(alpha, channel))


def favg(c, basis: AlphaBasis, fail_policy: str = "zero", channel: int = 0) -> float:
    """Probability-weighted average fidelity over all counting classes."""
    c = np.asarray(c, dtype=complex)
    return float(fidelity_model(complex(basis.alpha), channel).favg(c, fail_policy)[0])


def masfi(form: str, basis: AlphaBasis) -> float:
    """Minimum of a fidelity family over all information states."""
    fidelity_form(form, np.ones(4) / 2, basis)  # validates the id
    value, _ = multistart_minimize(lambda p: fidelity_form(form, params_to_c(p), basis))
    return value


def mavfi(basis: AlphaBasis, fail_policy: str = "zero", channel: int = 0) -> float:
    model = fidelity_model(complex(basis.alpha), channel)
    value, _ = multistart_minimize(lambda p: model.favg(params_to_c(p), fail_policy))
    return value


def worst_case_info(basis: AlphaBasis, fail_policy: str = "zero", channel: int = 0) -> np.ndarray:
    model = fidelity_model(complex(basis.alpha), channel)
    _, p = multistart_minimize(lambda p: model.favg(params_to_c(p), fail_policy))
    return params_to_c(p)[0]


def max_probability(form: str, basis: AlphaBasis) -> float:
    if form == "PI":
        return float(closed_form_probability("PI", np.array([1, 0, 0, 0]), basis))
    value, _ = multistart_minimize(lambda p: -closed_form_probability(form, params_to_c(p), basis))
    return -value


def min_group_iv_probability(basis: AlphaBasis, channel: int = 0) -> float:
    model = fidelity_model(complex(basis.alpha), channel)
    value, _ = multistart_minimize(lambda p: model.group_iv_probability(params_to_c(p)))
    return value


@dataclass(frozen=True)
class SweepRecord:
    alpha: float
    quantity: str
    value: float


def evaluate_quantity(quantity: str, basis: AlphaBasis, fail_policy: str = "zero") -> float:
    if quantity == "P_I_max":
        return max_probability("PI", basis)
    if quantity == "P_II_max":
        return max_probability("PII_4000", basis)
    if quantity == "P_III1_max":
        return max_probability("PIII1_4040", basis)
    if quantity == "P_IV_sum_min":
        return min_group_iv_probability(basis)
    if quantity.startswith("MASFI_"):
        return masfi(quantity.split("_", 1)[1], basis)
    if quantity == "MAVFI":
        return mavfi(basis, fail_policy)
    raise ValueError(f"unknown quantity {quantity!r}")


def alpha_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid, rounded to kill accumulation error."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


DEFAULT_GRID = (0.2, 4.0, 0.1)


def _sweep_point(args) -> SweepRecord:
    quantity, a, fail_policy = args
    return SweepRecord(float(a), quantity, float(evaluate_quantity(quantity, make_basis(a), fail_policy)))


def sweep(quantity: str, grid: Iterable[float], fail_policy: str = "zero", workers: int = 1) -> list[SweepRecord]:
    """Evaluate one quantity on every grid point; results keep the grid order."""
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    if fail_policy not in FAIL_POLICIES:
        raise ValueError(f"unknown fail policy {fail_policy!r}")
    grid = list(grid)
    bad = [a for a in grid if a < MIN_ALPHA]
    if bad:
        raise DomainError(f"grid value {bad[0]} below the domain guard {MIN_ALPHA}")
    jobs = [(quantity, a, fail_policy) for a in grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(j) for j in jobs]
