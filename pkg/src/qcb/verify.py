"""Scripted tightness experiments.

Each suite rebuilds an extremal construction, measures the achieved
difference, evaluates the matching continuity bound and returns a
deterministic :class:`SuiteTable` (CSV with ``#`` metadata lines, plus a JSON
mirror).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bounds
from .channels import analytic_capacities, apply, d_prop3, erasure, ChannelFamily
from .energy import OscillatorSpec, adequate_cutoff, f_osc_hat, gibbs_probs, truncated_oscillator
from .ensembles import Ensemble, d0, d_star
from .errors import DimCap, DomainError
from .qinfo import h2, holevo, log_factor, mutual_information, pure_mixture_entropy, shannon
from .qmat import DensityMatrix, maximally_entangled, permute_subsystems, trace_norm

REMAINDER_CONSTANT = 5.0  # |remainder| <= C eps / d^2 in the maximally-entangled suite
DENSE_MAX_DIM = 1024
EXACT_N_MAX = 2
SIG_DIGITS = 12


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, f".{SIG_DIGITS}g")
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return float(format(v, f".{SIG_DIGITS}g")) if math.isfinite(v) else None
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    return value


@dataclass
class SuiteTable:
    name: str
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    def select(self, **where) -> list[dict]:
        return [r for r in self.rows if all(r.get(k) == v for k, v in where.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# suite: {self.name}\n")
        for key in sorted(self.meta):
            buf.write(f"# {key}: {json.dumps(_json_value(self.meta[key]), sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "suite": self.name,
            "meta": _json_value(self.meta),
            "columns": self.columns,
            "rows": [{c: _json_value(r.get(c)) for c in self.columns} for r in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "SuiteTable":
        data = json.loads(text)
        return cls(data["suite"], list(data["columns"]), list(data["rows"]), dict(data.get("meta", {})))


@dataclass
class SuiteConfig:
    name: str
    dims: tuple[int, ...] | None = None
    eps: tuple[float, ...] | None = None
    energies: tuple[float, ...] | None = None  # multiples of the ground energy
    omegas: tuple[float, ...] = (1.0,)
    p: tuple[float, ...] | None = None
    n: tuple[int, ...] | None = None
    x: tuple[float, ...] | None = None
    b: float = 1.0
    c: float = 0.0
    seed: int = 0
    base: object = 2

    def __post_init__(self):
        for key in ("dims", "eps", "energies", "p", "n", "x"):
            val = getattr(self, key)
            if val is not None and len(val) == 0:
                raise DomainError(f"grid {key!r} must be nonempty")


# ---------------------------------------------------------------------------
# maximally entangled pair: sigma = (1-eps) psi + eps (I - psi)/(d^2 - 1)


def entangled_pair(d: int, eps: float) -> tuple[DensityMatrix, DensityMatrix]:
    psi = maximally_entangled(d)
    n = d * d
    sigma = (1 - eps) * psi.matrix + eps / (n - 1) * (np.eye(n) - psi.matrix)
    return psi, DensityMatrix.trusted(sigma, (d, d))


def entangled_pair_delta(d: int, eps: float, base=2) -> float:
    """Exact ``I(rho) - I(sigma)``: both marginals are maximally mixed, so it equals ``H(sigma)``."""
    n = d * d
    return h2(eps, base) + eps * math.log(n - 1) * log_factor(base)


def suite_cmi_tightness(dims: Sequence[int] = (2, 4, 8, 16, 32, 64), eps_grid: Sequence[float] = (0.01, 0.02, 0.05, 0.1, 0.15, 0.2), base=2) -> SuiteTable:
    k = log_factor(base)
    rows = []
    for d in dims:
        if d < 2:
            raise DomainError("dims must be at least 2")
        for eps in eps_grid:
            structural = entangled_pair_delta(d, eps, base) if eps > 0 else 0.0
            if d * d <= DENSE_MAX_DIM:
                rho, sigma = entangled_pair(d, eps)
                dist = 0.5 * trace_norm(rho.matrix - sigma.matrix)
                delta = mutual_information(rho, base=base) - mutual_information(sigma, base=base)
                method = "dense"
            else:
                # spectrum of rho - sigma: eps once, -eps/(d^2-1) with multiplicity d^2-1
                dist = 0.5 * (eps + (d * d - 1) * eps / (d * d - 1))
                delta = structural
                method = "structural"
            bound = bounds.cmi_fannes_bound(eps, d, base=base)
            reduced = bounds.cmi_fannes_bound(eps, d, equal_marginal=True, base=base)
            main = 2 * eps * math.log(d) * k + h2(eps, base)
            remainder = delta - main
            scale = eps / d**2
            rows.append({
                "d": d,
                "eps": eps,
                "method": method,
                "trace_distance": dist,
                "delta_I": delta,
                "delta_I_structural": structural,
                "bound": bound,
                "ratio": delta / bound if bound > 0 else 0.0,
                "bound_equal_marginal": reduced,
                "ratio_equal_marginal": delta / reduced if reduced > 0 else 0.0,
                "remainder": remainder,
                "remainder_scaled": remainder / scale if scale > 0 else 0.0,
            })
    cols = list(rows[0]) if rows else []
    meta = {"dims": list(dims), "eps": list(eps_grid), "base": str(base), "remainder_constant": REMAINDER_CONSTANT, "dense_max_dim": DENSE_MAX_DIM}
    return SuiteTable("cmi-tightness", cols, rows, meta)


# ---------------------------------------------------------------------------
# ensembles of basis states


def holevo_example_one(d: int, eps: float) -> tuple[Ensemble, Ensemble]:
    basis = [DensityMatrix.diagonal(np.eye(d)[i]) for i in range(d)]
    mixed = np.eye(d) / d
    noisy = [DensityMatrix.trusted((1 - eps) * b.matrix + eps * mixed) for b in basis]
    probs = np.full(d, 1.0 / d)
    return Ensemble(probs, basis), Ensemble(probs, noisy)


def holevo_example_two(d: int, eps: float) -> tuple[Ensemble, Ensemble]:
    mixed = np.eye(d) / d
    states = [DensityMatrix.trusted(eps * np.diag(np.eye(d)[i]) + (1 - eps) * mixed) for i in range(d)]
    return Ensemble(np.full(d, 1.0 / d), states), Ensemble([1.0], [DensityMatrix.trusted(mixed)])


def suite_holevo_tightness(dims: Sequence[int] = (2, 3, 4, 5, 6, 7, 8), eps_grid: Sequence[float] = (0.05, 0.1, 0.2), tol: float = 1e-6, base=2) -> SuiteTable:
    k = log_factor(base)
    rows = []
    for d in dims:
        for eps in eps_grid:
            mu, nu = holevo_example_one(d, eps)
            e0 = d0(mu, nu)
            gap1 = holevo(mu, base) - holevo(nu, base)
            bound1 = bounds.holevo_fannes_bound("d", eps0=e0, d=d, equal_probs=True, base=base)
            mu2, nu2 = holevo_example_two(d, eps)
            star = d_star(mu2, nu2, tol=tol)
            e0_2 = d0(mu2, nu2)
            chi2 = holevo(mu2, base) - holevo(nu2, base)
            eps_star = min(star.value, 1.0)
            bound2 = bounds.holevo_fannes_bound("d", eps_star=eps_star, d=d, base=base)
            rows.append({
                "d": d,
                "eps": eps,
                "ex1_d0": e0,
                "ex1_d0_expected": eps * (1 - 1 / d),
                "ex1_chi_gap": gap1,
                "ex1_floor": eps * math.log(d) * k,
                "ex1_bound": bound1,
                "ex1_ratio": gap1 / bound1 if bound1 > 0 else 0.0,
                "ex2_d_star": star.value,
                "ex2_d_star_gap": star.gap,
                "ex2_d0": e0_2,
                "ex2_chi_gap": chi2,
                "ex2_floor": eps * math.log(d) * k - h2(eps, base),
                "ex2_bound": bound2,
                "ex2_ratio": chi2 / bound2 if bound2 > 0 else 0.0,
            })
    meta = {"dims": list(dims), "eps": list(eps_grid), "base": str(base), "d_star_tol": tol}
    return SuiteTable("holevo-tightness", list(rows[0]), rows, meta)


# ---------------------------------------------------------------------------
# energy-constrained constructions


def energy_cmi_delta(lam: np.ndarray, eps: float, base=2) -> float:
    """``I(rho) - I(sigma)`` for ``rho = |psi><psi|``, ``psi = sum sqrt(lam_n)|n n>``,
    ``sigma = (1-eps) rho + eps |00><00|``.

    Marginals are diagonal and ``H(sigma_AB)`` comes from a 2x2 Gram matrix.
    """
    full = 2 * shannon(lam, base)
    marg = (1 - eps) * np.asarray(lam, dtype=float)
    marg[0] += eps
    n = len(lam)
    psi = np.zeros(n * n)
    psi[:: n + 1] = np.sqrt(lam)
    ground = np.zeros(n * n)
    ground[0] = 1.0
    h_ab = pure_mixture_entropy([psi, ground], [1 - eps, eps], base)
    return full - (2 * shannon(marg, base) - h_ab)


def energy_cmi_pair(lam: np.ndarray, eps: float) -> tuple[DensityMatrix, DensityMatrix]:
    """Dense version of the pair behind :func:`energy_cmi_delta` (small truncations only)."""
    n = len(lam)
    psi = np.zeros(n * n)
    psi[:: n + 1] = np.sqrt(lam)
    rho = np.outer(psi, psi)
    ground = np.zeros((n * n, n * n))
    ground[0, 0] = 1.0
    return DensityMatrix.trusted(rho, (n, n)), DensityMatrix.trusted((1 - eps) * rho + eps * ground, (n, n))


def energy_holevo_delta(lam: np.ndarray, eps: float, base=2) -> float:
    """``chi(mu) - chi(nu)`` for ``mu = {lam_n, |n><n|}``, ``nu = {lam_n, (1-eps)|n><n| + eps gamma}``.

    Both averages equal ``gamma``, so the gap is ``sum_n lam_n H(sigma_n)``.
    """
    lam = np.asarray(lam, dtype=float)
    total = 0.0
    for i, weight in enumerate(lam):
        if weight <= 0:
            continue
        probs = eps * lam
        probs[i] += 1 - eps
        total += weight * shannon(probs, base)
    return total


def suite_energy_tightness(
    omegas: Sequence[float] = (1.0,),
    energy_multiples: Sequence[float] = (10.0, 30.0, 100.0),
    eps_grid: Sequence[float] = (0.01, 0.05, 0.1, 0.2),
    base=2,
) -> SuiteTable:
    osc = OscillatorSpec(omegas)
    rows = []
    for mult in energy_multiples:
        energy = mult * osc.ground
        cutoff = adequate_cutoff(osc, energy)
        spec = truncated_oscillator(osc, cutoff)
        lam, _ = gibbs_probs(spec, energy)
        f_true = shannon(lam, base)
        f_hat = f_osc_hat(osc, energy, base)
        for eps in eps_grid:
            cmi = energy_cmi_delta(lam, eps, base)
            eps_cmi = eps * math.sqrt(max(1.0 - lam[0], 0.0))
            t_c, b_c = bounds.optimize_t(
                lambda t: bounds.winter_cmi_bound(bounds.WinterParams(eps_cmi, t, energy, lambda _e: f_hat, ell=osc.modes, base=base)),
                eps_cmi,
            )
            chi = energy_holevo_delta(lam, eps, base)
            eps_chi = eps * float(lam @ (1 - lam))  # D0 of the two ensembles
            t_h, b_h = bounds.optimize_t(
                lambda t: bounds.winter_holevo_bound(bounds.WinterParams(eps_chi, t, energy, lambda _e: f_hat, ell=osc.modes, base=base)),
                eps_chi,
            )
            rows.append({
                "E": energy,
                "E_multiple": mult,
                "cutoff": cutoff,
                "eps": eps,
                "F_H": f_true,
                "F_hat": f_hat,
                "cmi_achieved": cmi,
                "cmi_floor": 2 * eps * f_true - h2(eps, base),
                "cmi_eps": eps_cmi,
                "cmi_t_opt": t_c,
                "cmi_bound": b_c,
                "cmi_ratio": cmi / b_c,
                "chi_achieved": chi,
                "chi_floor": eps * f_true,
                "chi_eps": eps_chi,
                "chi_t_opt": t_h,
                "chi_bound": b_h,
                "chi_ratio": chi / b_h,
            })
    meta = {
        "omegas": list(omegas),
        "E_multiples": list(energy_multiples),
        "eps": list(eps_grid),
        "base": str(base),
        "cutoff_rule": "per-mode top occupancy < 1e-9",
        "grid_points": bounds.GRID_POINTS,
    }
    return SuiteTable("energy-tightness", list(rows[0]), rows, meta)


# ---------------------------------------------------------------------------
# capacities of depolarizing and erasure channels


def suite_capacity_tightness(dims: Sequence[int] = (2, 4, 8, 16, 32, 64), p_grid: Sequence[float] = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5), base=2) -> SuiteTable:
    rows = []

    def add(family, d, p, quantity, delta, bound_name, d_bound, eps_exact):
        bnd = bounds.capacity_bound(p, d_bound, bound_name, base)
        tight = bounds.capacity_bound(eps_exact, d_bound, bound_name, base)
        rows.append({
            "family": family,
            "d": d,
            "p": p,
            "quantity": quantity,
            "delta": delta,
            "eps": p,
            "bound": bnd,
            "ratio": delta / bnd if bnd > 0 else 0.0,
            "eps_exact": eps_exact,
            "bound_exact": tight,
            "ratio_exact": delta / tight if tight > 0 else 0.0,
        })

    for d in dims:
        ident = analytic_capacities(ChannelFamily("identity", d), base)
        for p in p_grid:
            dep = analytic_capacities(ChannelFamily("depolarizing", d, p), base)
            c = 1 - 1 / d
            ct = 1 - 1 / d**2
            add("depolarizing", d, p, "Cchi", ident["Cchi"] - dep["Cchi"], "Cchi", d, p * c)
            add("depolarizing", d, p, "Cea", ident["Cea"] - dep["Cea"], "Cea", d, p * ct)
            add("depolarizing", d, p, "C", ident["C"] - dep["C"], "C", d, p * ct)
            if p <= 0.5:
                e0 = analytic_capacities(ChannelFamily("erasure", d, 0.0), base)
                ep = analytic_capacities(ChannelFamily("erasure", d, p), base)
                add("erasure", d, p, "Q", e0["Q"] - ep["Q"], "Q", d + 1, p)
                add("erasure", d, p, "C", e0["C"] - ep["C"], "C", d + 1, p)
    meta = {"dims": list(dims), "p": list(p_grid), "base": str(base), "eps_rule": "eps = p (upper end of the distance bracket); eps_exact = exact half-norm distance"}
    return SuiteTable("capacity-tightness", list(rows[0]), rows, meta)


# ---------------------------------------------------------------------------
# n copies of the erasure pair on a maximally entangled input


def _n_copy_input(d: int, n: int) -> DensityMatrix:
    """Maximally entangled ``A^n`` with reference ``D`` ordered ``(A_1..A_n, R_1..R_n)``."""
    vec = maximally_entangled(d)
    state = np.array([[1.0]])
    dims: tuple[int, ...] = ()
    for _ in range(n):
        state = np.kron(state, vec.matrix)
        dims = dims + (d, d)
    # reorder (A1 R1 A2 R2 ...) -> (A1 A2 ... R1 R2 ...)
    rho = DensityMatrix.trusted(state, dims)
    order = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return permute_subsystems(rho, order)


def n_copy_chain(d: int, n: int, p: float, base=2) -> list[float]:
    """``I(B^n : D)`` for ``Phi^{(x)k} (x) Psi^{(x)(n-k)}``, ``k = 0..n``; ``Phi`` perfect, ``Psi`` erasing."""
    if n > EXACT_N_MAX:
        raise DimCap(f"exact n-copy evaluation is limited to n <= {EXACT_N_MAX}")
    phi, psi = erasure(d, 0.0), erasure(d, p)
    rho = _n_copy_input(d, n)
    values = []
    for k in range(n + 1):
        out = rho
        for j in range(n):
            out = apply(phi if j < k else psi, out, on=j)
        values.append(mutual_information(out, a=tuple(range(n)), b=tuple(range(n, 2 * n)), base=base))
    return values


def suite_n_copy(n_list: Sequence[int] = (1, 2, 3, 4), d: int = 2, p_grid: Sequence[float] = (0.05, 0.1, 0.25, 0.5), base=2) -> SuiteTable:
    rows = []
    for n in n_list:
        for p in p_grid:
            exact = n <= EXACT_N_MAX
            delta = resid = step_sum = dist = None
            if exact:
                chain = n_copy_chain(d, n, p, base)
                steps = [chain[k + 1] - chain[k] for k in range(n)]
                delta = abs(chain[-1] - chain[0])
                step_sum = sum(abs(s) for s in steps)
                resid = abs(sum(steps) - (chain[-1] - chain[0]))
                rho = _n_copy_input(d, n)
                dist, _ = d_prop3(erasure(d, 0.0), erasure(d, p), rho, n)
            eps = dist if dist is not None else p
            bound = bounds.n_copy_finite(min(eps, 1.0), d + 1, n, base)
            rows.append({
                "n": n,
                "d": d,
                "p": p,
                "exact": exact,
                "eps": eps,
                "delta": delta,
                "step_abs_sum": step_sum,
                "telescoping_residual": resid,
                "bound": bound,
                "ratio": (delta / bound) if delta is not None and bound > 0 else None,
            })
    meta = {"n": list(n_list), "d": d, "p": list(p_grid), "base": str(base), "exact_n_max": EXACT_N_MAX}
    return SuiteTable("n-copy", list(rows[0]), rows, meta)


# ---------------------------------------------------------------------------


def suite_lemma1(x_grid: Sequence[float] = (1e3, 1e4, 1e5, 1e6), b: float = 1.0, c: float = 0.0) -> SuiteTable:
    rows = []
    for x in x_grid:
        if x <= 0:
            raise DomainError("x must be positive")
        t_opt, value = bounds.lemma1_min(x, b, c)
        _, base_val = bounds.lemma1_min(x, 0.0, 0.0)
        rows.append({
            "x": x,
            "b": b,
            "c": c,
            "t_opt": t_opt,
            "min": value,
            "ratio": (value - x) / x,
            "no_log_baseline": base_val,
        })
    meta = {"x": list(x_grid), "b": b, "c": c, "grid_points": bounds.GRID_POINTS}
    return SuiteTable("lemma1", list(rows[0]), rows, meta)


SUITES = ("cmi-tightness", "holevo-tightness", "energy-tightness", "capacity-tightness", "n-copy", "lemma1")


def run_suite(cfg: SuiteConfig) -> SuiteTable:
    """Dispatch a :class:`SuiteConfig`; unset grids take the suite defaults."""
    kw: dict = {}
    if cfg.name == "cmi-tightness":
        if cfg.dims: kw["dims"] = cfg.dims
        if cfg.eps: kw["eps_grid"] = cfg.eps
        table = suite_cmi_tightness(base=cfg.base, **kw)
    elif cfg.name == "holevo-tightness":
        if cfg.dims: kw["dims"] = cfg.dims
        if cfg.eps: kw["eps_grid"] = cfg.eps
        table = suite_holevo_tightness(base=cfg.base, **kw)
    elif cfg.name == "energy-tightness":
        if cfg.energies: kw["energy_multiples"] = cfg.energies
        if cfg.eps: kw["eps_grid"] = cfg.eps
        table = suite_energy_tightness(omegas=cfg.omegas, base=cfg.base, **kw)
    elif cfg.name == "capacity-tightness":
        if cfg.dims: kw["dims"] = cfg.dims
        if cfg.p: kw["p_grid"] = cfg.p
        table = suite_capacity_tightness(base=cfg.base, **kw)
    elif cfg.name == "n-copy":
        if cfg.n: kw["n_list"] = cfg.n
        if cfg.p: kw["p_grid"] = cfg.p
        if cfg.dims: kw["d"] = cfg.dims[0]
        table = suite_n_copy(base=cfg.base, **kw)
    elif cfg.name == "lemma1":
        if cfg.x: kw["x_grid"] = cfg.x
        table = suite_lemma1(b=cfg.b, c=cfg.c, **kw)
    else:
        raise DomainError(f"unknown suite {cfg.name!r}; choose from {', '.join(SUITES)}")
    table.meta["seed"] = cfg.seed
    return table
