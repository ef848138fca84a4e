"""Gibbs states, the maximal entropy at bounded energy, and oscillator spectra.

Energies are in the units of the supplied levels (``hbar omega`` units for
oscillators).  Entropies follow the usual ``base`` convention.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import OutOfRange, TruncationWarning
from .qinfo import g, log_factor, shannon
from .qmat import DensityMatrix

OCCUPANCY_THRESHOLD = 1e-9
ENERGY_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class EnergySpec:
    levels: np.ndarray
    label: str = ""

    def __init__(self, levels: Sequence[float], label: str = ""):
        lv = np.array(levels, dtype=float)
        if lv.ndim != 1 or lv.size == 0:
            raise ValueError("levels must be a nonempty 1-D sequence")
        if np.any(np.diff(lv) < 0):
            raise ValueError("levels must be nondecreasing")
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "label", label)

    @property
    def ground(self) -> float:
        return float(self.levels[0])


@dataclass(frozen=True)
class OscillatorSpec:
    omegas: tuple[float, ...]

    def __init__(self, omegas: Sequence[float]):
        om = tuple(float(w) for w in omegas)
        if not om or any(w <= 0 for w in om):
            raise ValueError("frequencies must be positive")
        object.__setattr__(self, "omegas", om)

    @property
    def modes(self) -> int:
        return len(self.omegas)

    @property
    def ground(self) -> float:
        return 0.5 * sum(self.omegas)

    @property
    def e_star(self) -> float:
        return float(np.exp(np.mean(np.log(self.omegas))))


def _weights(levels: np.ndarray, lam: float) -> np.ndarray:
    logw = -lam * levels
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _mean_energy(levels: np.ndarray, lam: float) -> float:
    return float(_weights(levels, lam) @ levels)


def gibbs_probs(spec: EnergySpec, energy: float, warn: bool = True) -> tuple[np.ndarray, float]:
    """Occupation probabilities of the Gibbs state with mean energy ``energy``.

    Returns ``(probs, lam)``; ``lam`` solves ``Tr H e^{-lam H} = E Tr e^{-lam H}``
    by bisection on the (strictly decreasing) mean-energy curve.
    """
    lv = spec.levels
    lo_e, hi_e = float(lv[0]), float(lv[-1])
    scale = max(1.0, abs(energy))
    if energy < lo_e - ENERGY_RTOL * scale or energy > hi_e + ENERGY_RTOL * scale:
        raise OutOfRange(f"energy {energy} outside [{lo_e}, {hi_e}]")
    if energy <= lo_e + ENERGY_RTOL * scale:
        probs = (lv == lo_e).astype(float)
        return probs / probs.sum(), math.inf
    if energy >= hi_e - ENERGY_RTOL * scale:
        raise OutOfRange(f"energy {energy} not below the truncated supremum {hi_e}")

    # mean energy decreases in lam: keep mean(lo) >= energy >= mean(hi)
    lo, hi = -1.0, 1.0
    for _ in range(2000):
        if _mean_energy(lv, hi) <= energy:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise OutOfRange(f"could not bracket energy {energy}")
    for _ in range(2000):
        if _mean_energy(lv, lo) >= energy:
            break
        hi, lo = lo, 2.0 * lo
    else:
        raise OutOfRange(f"could not bracket energy {energy}")
    lam = 0.5 * (lo + hi)
    for _ in range(400):
        lam = 0.5 * (lo + hi)
        e = _mean_energy(lv, lam)
        if abs(e - energy) <= ENERGY_RTOL * scale:
            break
        if e > energy:
            lo = lam
        else:
            hi = lam
        if hi - lo <= 1e-16 * max(1.0, abs(lam)):
            break
    probs = _weights(lv, lam)
    if warn and lv.size > 1 and probs[-1] > OCCUPANCY_THRESHOLD:
        warnings.warn(
            f"top-level occupancy {probs[-1]:.2e} exceeds {OCCUPANCY_THRESHOLD:g}; "
            "truncation may be inadequate",
            TruncationWarning,
            stacklevel=2,
        )
    return probs, lam


def gibbs_state(spec: EnergySpec, energy: float, warn: bool = True) -> tuple[DensityMatrix, float]:
    probs, lam = gibbs_probs(spec, energy, warn=warn)
    return DensityMatrix.trusted(np.diag(probs)), lam


def f_h(spec: EnergySpec, energy: float, base=2) -> float:
    """Maximal entropy at mean energy at most ``energy``: the Gibbs entropy."""
    probs, _ = gibbs_probs(spec, energy)
    return shannon(probs, base)


def shifted_f_hat(spec: EnergySpec, energy: float, base=2) -> float:
    """``F_H(E + E_0)``, a valid upper bound on ``[0, inf)`` even when ``E_0 != 0``."""
    if energy < 0:
        raise OutOfRange("energy must be nonnegative")
    return f_h(spec, energy + spec.ground, base)


def _occupations(omegas: np.ndarray, lam: float) -> np.ndarray:
    return 1.0 / np.expm1(lam * omegas)


def water_filling(osc: OscillatorSpec, energy: float) -> tuple[np.ndarray, float]:
    """Per-mode energies maximizing the total oscillator entropy at fixed total energy.

    The optimum equalizes ``d g(n_i) / d E_i = ln(1 + 1/n_i) / omega_i``, i.e.
    ``E_i = omega_i (1/(e^{lam omega_i} - 1) + 1/2)`` with one multiplier ``lam``.
    """
    om = np.array(osc.omegas)
    e0 = osc.ground
    if energy < e0 - ENERGY_RTOL * max(1.0, e0):
        raise OutOfRange(f"energy {energy} below ground energy {e0}")
    if energy <= e0 * (1 + 1e-15):
        return 0.5 * om, math.inf

    def total(lam: float) -> float:
        return float(np.sum(om * (_occupations(om, lam) + 0.5)))

    lo, hi = 1.0, 1.0
    while total(lo) < energy:
        lo *= 0.5
    while total(hi) > energy:
        hi *= 2.0
    for _ in range(500):
        lam = math.sqrt(lo * hi) if lo > 0 else 0.5 * (lo + hi)
        e = total(lam)
        if abs(e - energy) <= ENERGY_RTOL * energy:
            break
        if e > energy:
            lo = lam
        else:
            hi = lam
    return om * (_occupations(om, lam) + 0.5), lam


def f_osc(osc: OscillatorSpec, energy: float, base=2) -> float:
    """Exact ``F_H(E)`` for the multimode oscillator, ``max sum_i g(E_i/omega_i - 1/2)``."""
    if osc.modes == 1:
        if energy < osc.ground - ENERGY_RTOL * max(1.0, osc.ground):
            raise OutOfRange(f"energy {energy} below ground energy {osc.ground}")
        return g(max(energy / osc.omegas[0] - 0.5, 0.0), base)
    energies, lam = water_filling(osc, energy)
    if math.isinf(lam):
        return 0.0
    occ = energies / np.array(osc.omegas) - 0.5
    return sum(g(max(n, 0.0), base) for n in occ)


def f_osc_hat(osc: OscillatorSpec, energy: float, base=2) -> float:
    """Closed-form upper bound ``l ln((E + E_0)/(l E_*)) + l`` (nats), converted to ``base``."""
    if energy < 0:
        raise OutOfRange("energy must be nonnegative")
    ell = osc.modes
    nats = ell * math.log((energy + osc.ground) / (ell * osc.e_star)) + ell
    return nats * log_factor(base)


def truncated_oscillator(osc: OscillatorSpec, cutoff: int) -> EnergySpec:
    """All levels ``sum_i omega_i (n_i + 1/2)`` with ``n_i < cutoff``, sorted."""
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    grids = [w * (np.arange(cutoff) + 0.5) for w in osc.omegas]
    levels = grids[0]
    for grid in grids[1:]:
        levels = (levels[:, None] + grid[None, :]).reshape(-1)
    levels = np.sort(levels, kind="stable")
    return EnergySpec(levels, label=f"oscillator{osc.omegas} cutoff={cutoff}")


def _top_occupancy(osc: OscillatorSpec, cutoff: int, energy: float) -> float:
    """Largest marginal weight any mode puts on its highest retained level."""
    spec = truncated_oscillator(osc, cutoff)
    if energy >= spec.levels[-1]:
        return 1.0
    _, lam = gibbs_probs(spec, energy, warn=False)
    if math.isinf(lam):
        return 0.0
    worst = 0.0
    for w in osc.omegas:
        marg = _weights(w * np.arange(cutoff), lam)
        worst = max(worst, float(marg[-1]))
    return worst


def adequate_cutoff(osc: OscillatorSpec, energy: float, threshold: float = OCCUPANCY_THRESHOLD, start: int = 4) -> int:
    """Smallest per-mode cutoff whose Gibbs state leaves at most ``threshold`` on the top level."""
    hi = max(start, 2)
    while _top_occupancy(osc, hi, energy) >= threshold:
        hi *= 2
        if hi ** osc.modes > 5_000_000:
            raise OutOfRange("truncation adequacy needs an impractically large cutoff")
    lo = max(2, hi // 2)
    if _top_occupancy(osc, lo, energy) < threshold:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _top_occupancy(osc, mid, energy) < threshold:
            hi = mid
        else:
            lo = mid
    return hi
