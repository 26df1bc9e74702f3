"""Data-driven choice of the regularisation level k for both estimators.

Ridge: a Goldenshluger-Lepski rule.  For each admissible k the bias proxy

    A_hat(k) = max_{k'} ( ||f_hat_{k'} - f_hat_{min(k',k)}||^2 - chi1 * V_hat(.) )_+

is paired with the variance proxy V_hat(k) = 2 * sigma_hat * ||R_k||^2 / n,
and k_hat minimises A_hat(k) + chi2 * V_hat(k) over the admissible set
{k : ||R_k||^2 <= n}.  The penalty inside the supremum is evaluated at the
candidate k' by default (``penalty_at="candidate"``); the variant with the
penalty at the outer k is available as ``penalty_at="outer"``.

Cut-off: k_tilde minimises -||f_tilde_k||^2 + pen(k) with
pen(k) = 2 * chi * sigma_hat * ||1_[-k,k] / M_g||^2 / (2 pi n) over
{k : ||1_[-k,k] / M_g||^2 <= 2 pi n}.

Contrast norms are computed in the Mellin domain via the Plancherel
identity, so the whole selection runs on one shared frequency grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .estimators import (
    RidgeSpec,
    check_nonvanishing,
    ridge_multiplier,
)
from .grids import FrequencyGrid, QuadratureConfig
from .mellin import EmpiricalMellin, MellinFunction, empirical_mellin_on_grid

TWO_PI = 2.0 * np.pi


class EmptyAdmissibleSetError(ValueError):
    """No candidate level passes the admissibility bound for this sample size."""


@dataclass(frozen=True)
class SelectionConfig:
    """Constants and candidate grid for the data-driven rules.

    chi1/chi2 scale the ridge penalties (chi2 >= chi1 > 0), chi the cut-off
    penalty.  ``k_grid`` of None means consecutive integers 1, 2, ... with
    the scan stopping at the first inadmissible level.
    """

    chi1: float
    chi2: float
    chi: float
    c: float = 1.0
    r: float = 2.0
    xi: float = 0.0
    k_grid: Optional[Sequence[int]] = None
    penalty_at: str = "candidate"

    def __post_init__(self):
        if not (self.chi2 >= self.chi1 > 0.0):
            raise ValueError("need chi2 >= chi1 > 0")
        if not self.chi > 0.0:
            raise ValueError("need chi > 0")
        if self.penalty_at not in ("candidate", "outer"):
            raise ValueError("penalty_at must be 'candidate' or 'outer'")
        if self.k_grid is not None:
            kg = tuple(int(k) for k in self.k_grid)
            if len(kg) == 0:
                raise ValueError("k_grid must be nonempty")
            if any(k <= 0 for k in kg) or any(b <= a for a, b in zip(kg, kg[1:])):
                raise ValueError("k_grid must be strictly increasing positive integers")
            object.__setattr__(self, "k_grid", kg)


@dataclass(frozen=True)
class LevelDiagnostics:
    """Per-candidate diagnostics; see `SelectionResult`."""

    k: int
    a_hat: float
    v_hat: float
    objective: float


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of a data-driven level choice.

    For the ridge rule, ``a_hat``/``v_hat`` are the bias and variance
    proxies and objective = a_hat + chi2 * v_hat.  For the cut-off rule,
    ``a_hat`` holds the window norm ||f_tilde_k||^2, ``v_hat`` the penalty,
    and objective = v_hat - a_hat.  ``k_hat`` is the smallest admissible
    minimiser of the objective.
    """

    method: str
    k_hat: int
    sigma_hat: float
    diagnostics: tuple

    @property
    def admissible(self) -> tuple:
        return tuple(d.k for d in self.diagnostics)


def sigma_hat(em: EmpiricalMellin) -> float:
    """Moment estimator n^-1 sum_j Y_j^(2(c-1)) scaling the variance proxy."""
    return float(np.mean(em.sample ** (2.0 * (em.c - 1.0))))


def _candidate_levels(cfg: SelectionConfig) -> Sequence[int]:
    if cfg.k_grid is not None:
        return cfg.k_grid
    return None  # unbounded consecutive scan


class RidgeBank:
    """Ridge multipliers tabulated on a shared grid for a prefix of levels.

    Levels are taken from ``cfg.k_grid`` (or 1, 2, ... when absent) as long
    as ||R_k||^2 <= n_cap; by magnitude monotonicity in k the admissible set
    is always such a prefix.
    """

    def __init__(
        self,
        g_mellin: MellinFunction,
        cfg: SelectionConfig,
        grid: FrequencyGrid,
        n_cap: float,
    ):
        self.grid = grid
        self.g_mellin = g_mellin
        self.cfg = cfg
        levels = []
        rows = []
        norms = []
        explicit = cfg.k_grid
        k_iter = explicit if explicit is not None else _consecutive()
        for k in k_iter:
            mult = ridge_multiplier(
                RidgeSpec(k=float(k), c=cfg.c, xi=cfg.xi, r=cfg.r), g_mellin
            )
            row = mult(grid.t)
            norm = float(grid.integrate(np.abs(row) ** 2))
            if norm > n_cap:
                break
            levels.append(int(k))
            rows.append(row)
            norms.append(norm)
        self.k_values = np.array(levels, dtype=int)
        self.rows = np.array(rows) if rows else np.empty((0, grid.t.size), complex)
        self.norms_sq = np.array(norms, dtype=float)

    def __len__(self) -> int:
        return self.k_values.size


def _consecutive():
    k = 1
    while True:
        yield k
        k += 1


def admissible_ridge(
    g_mellin: MellinFunction,
    cfg: SelectionConfig,
    n: int,
    q: QuadratureConfig,
) -> list:
    """Prefix of the candidate grid with ||R_k||^2 <= n.

    Raises `EmptyAdmissibleSetError` when even the first candidate fails
    (the grid starts too high for this sample size).
    """
    grid = FrequencyGrid.from_config(q)
    bank = RidgeBank(g_mellin, cfg, grid, n_cap=float(n))
    if len(bank) == 0:
        raise EmptyAdmissibleSetError(
            f"no ridge level on the candidate grid satisfies the admissibility "
            f"bound for n={n}"
        )
    return [int(k) for k in bank.k_values]


def _ridge_select_from_arrays(
    mhat_abs_sq: np.ndarray,
    sig_hat: float,
    n: int,
    bank: RidgeBank,
    cfg: SelectionConfig,
) -> SelectionResult:
    """Goldenshluger-Lepski selection given |M_hat|^2 on the bank's grid."""
    if len(bank) == 0:
        raise EmptyAdmissibleSetError(
            f"no ridge level on the candidate grid satisfies the admissibility "
            f"bound for n={n}"
        )
    grid = bank.grid
    m = len(bank)
    v_hat = 2.0 * sig_hat * bank.norms_sq / n

    # contrast(i, j) = ||f_hat_{k_j} - f_hat_{k_i}||^2 for i < j, via Plancherel
    contrast = np.zeros((m, m))
    for j in range(1, m):
        diff_sq = np.abs(bank.rows[j] - bank.rows[:j]) ** 2
        contrast[:j, j] = grid.integrate(mhat_abs_sq * diff_sq) / TWO_PI

    a_hat = np.zeros(m)
    for i in range(m):
        if i + 1 >= m:
            break
        terms = contrast[i, i + 1 :]
        pen = cfg.chi1 * (v_hat[i + 1 :] if cfg.penalty_at == "candidate" else v_hat[i])
        a_hat[i] = max(np.max(terms - pen, initial=0.0), 0.0)

    objective = a_hat + cfg.chi2 * v_hat
    best = int(np.argmin(objective))  # first minimiser = smallest k
    diags = tuple(
        LevelDiagnostics(
            k=int(bank.k_values[i]),
            a_hat=float(a_hat[i]),
            v_hat=float(v_hat[i]),
            objective=float(objective[i]),
        )
        for i in range(m)
    )
    return SelectionResult(
        method="ridge",
        k_hat=int(bank.k_values[best]),
        sigma_hat=float(sig_hat),
        diagnostics=diags,
    )


def select_ridge(
    em: EmpiricalMellin,
    g_mellin: MellinFunction,
    cfg: SelectionConfig,
    q: QuadratureConfig,
) -> SelectionResult:
    """Data-driven ridge level for a sample."""
    grid = FrequencyGrid.from_config(q)
    bank = RidgeBank(g_mellin, cfg, grid, n_cap=float(em.n))
    mhat = empirical_mellin_on_grid(em, grid)
    return _ridge_select_from_arrays(
        np.abs(mhat) ** 2, sigma_hat(em), em.n, bank, cfg
    )


class CutoffBank:
    """Cut-off window norms tabulated for a prefix of admissible levels."""

    def __init__(
        self,
        g_mellin: MellinFunction,
        cfg: SelectionConfig,
        grid: FrequencyGrid,
        n_cap: float,
    ):
        self.grid = grid
        self.g_mellin = g_mellin
        mg = np.asarray(g_mellin(grid.t), dtype=np.complex128)
        amg = np.abs(mg)
        # guarded reciprocal; true zero-freeness is certified per window below
        safe = np.where(amg > 0.0, mg, 1.0)
        self.inv_mg = np.where(amg > 0.0, 1.0 / safe, 0.0)
        inv_sq = np.abs(self.inv_mg) ** 2
        cum = grid.centered_cumulative(inv_sq)

        levels = []
        norms = []
        explicit = cfg.k_grid
        k_iter = explicit if explicit is not None else _consecutive()
        for k in k_iter:
            j = int(round(k / grid.t_step))
            if j > grid.half_size:
                break
            norm = float(cum[j])
            if norm > TWO_PI * n_cap:
                break
            levels.append(int(k))
            norms.append(norm)
        self.k_values = np.array(levels, dtype=int)
        self.norms_sq = np.array(norms, dtype=float)
        if len(levels) > 0:
            check_nonvanishing(g_mellin, float(levels[-1]), grid.t_step)

    def __len__(self) -> int:
        return self.k_values.size


def _cutoff_select_from_arrays(
    mhat_abs_sq: np.ndarray,
    sig_hat: float,
    n: int,
    bank: CutoffBank,
    cfg: SelectionConfig,
) -> SelectionResult:
    """Penalised-contrast selection given |M_hat|^2 on the bank's grid."""
    if len(bank) == 0:
        raise EmptyAdmissibleSetError(
            f"no cut-off level on the candidate grid satisfies the "
            f"admissibility bound for n={n}"
        )
    grid = bank.grid
    data_sq = mhat_abs_sq * np.abs(bank.inv_mg) ** 2
    cum = grid.centered_cumulative(data_sq)
    window_norms = np.array(
        [cum[int(round(k / grid.t_step))] for k in bank.k_values]
    ) / TWO_PI
    pen = 2.0 * cfg.chi * sig_hat * bank.norms_sq / (TWO_PI * n)
    objective = pen - window_norms
    best = int(np.argmin(objective))
    diags = tuple(
        LevelDiagnostics(
            k=int(bank.k_values[i]),
            a_hat=float(window_norms[i]),
            v_hat=float(pen[i]),
            objective=float(objective[i]),
        )
        for i in range(len(bank))
    )
    return SelectionResult(
        method="cutoff",
        k_hat=int(bank.k_values[best]),
        sigma_hat=float(sig_hat),
        diagnostics=diags,
    )


def select_cutoff(
    em: EmpiricalMellin,
    g_mellin: MellinFunction,
    cfg: SelectionConfig,
    q: QuadratureConfig,
) -> SelectionResult:
    """Data-driven cut-off level for a sample."""
    grid = FrequencyGrid.from_config(q)
    bank = CutoffBank(g_mellin, cfg, grid, n_cap=float(em.n))
    mhat = empirical_mellin_on_grid(em, grid)
    return _cutoff_select_from_arrays(
        np.abs(mhat) ** 2, sigma_hat(em), em.n, bank, cfg
    )


def write_diagnostics_csv(path, result: SelectionResult) -> None:
    """Write per-level diagnostics: k, A_hat, V_hat, objective, admissible."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "A_hat", "V_hat", "objective", "admissible"])
        for d in result.diagnostics:
            writer.writerow(
                [d.k, repr(d.a_hat), repr(d.v_hat), repr(d.objective), 1]
            )
