"""Ridge and spectral cut-off density estimators as Mellin-domain multipliers.

Both estimators multiply the empirical Mellin transform by a frequency
multiplier built from the known error transform M_g and invert the product:

* cut-off: 1/M_g on the window |t| <= k, zero outside; requires M_g to be
  zero-free on the window.
* ridge:   conj(M_g(t)) |M_g(t)|^r / max(|M_g(t)|, (1+|t|)^xi / k)^(r+2),
  which equals 1/M_g wherever |M_g| clears the threshold and is damped to
  zero where it does not, so no zero-freeness is needed.

The damped region G_k = {t : (1+|t|)^xi / k > |M_g(t)|} shrinks as k grows;
multiplier magnitudes grow monotonically in k.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .grids import FrequencyGrid, QuadratureConfig
from .mellin import (
    EmpiricalMellin,
    HermitianSymmetryError,
    MellinError,
    MellinFunction,
    empirical_mellin_on_grid,
    golden_section_min,
    invert_grid_values,
)


class NoiseTransformZeroError(MellinError):
    """The error-density transform (numerically) vanishes inside a cut-off
    window, so division by it is ill-posed there."""


@dataclass(frozen=True)
class RidgeSpec:
    """Ridge configuration: level k, threshold exponent xi, power r, point c."""

    k: float
    c: float
    xi: float = 0.0
    r: float = 2.0

    def __post_init__(self):
        if not self.k > 0.0:
            raise ValueError("ridge level k must be positive")
        if self.xi < 0.0 or self.r < 0.0:
            raise ValueError("xi and r must be nonnegative")


@dataclass(frozen=True)
class CutoffSpec:
    """Spectral cut-off configuration: window bound k and development point c."""

    k: float
    c: float

    def __post_init__(self):
        if not self.k > 0.0:
            raise ValueError("cut-off level k must be positive")


@dataclass(frozen=True)
class MellinMultiplier:
    """A frequency multiplier with its defining spec and error transform."""

    spec: Union[RidgeSpec, CutoffSpec]
    g_mellin: MellinFunction
    eval_fn: Callable[[np.ndarray], np.ndarray]
    support: Optional[float] = None  # window bound for cut-off, None for ridge

    def __call__(self, t) -> np.ndarray:
        return self.eval_fn(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class DensityEstimate:
    """Estimated density on an x-grid plus its Mellin-domain representation.

    ``mellin_values`` holds the product (empirical transform x multiplier)
    on ``t_grid`` so that selection-stage norms can be computed without
    re-inverting.
    """

    x_grid: np.ndarray
    values: np.ndarray
    c: float
    t_grid: np.ndarray
    mellin_values: np.ndarray
    t_step: float


def ridge_multiplier(spec: RidgeSpec, g_mellin: MellinFunction) -> MellinMultiplier:
    """Build the ridge multiplier for an error transform.

    Exactly 1/M_g(t) wherever |M_g(t)| >= (1+|t|)^xi / k; the damped branch
    is used elsewhere and never divides by zero.
    """
    if g_mellin.c != spec.c:
        raise MellinError(
            f"development point mismatch: multiplier c={spec.c}, noise c={g_mellin.c}"
        )
    if g_mellin.decay_exponent is not None:
        rate = g_mellin.decay_exponent * (spec.r + 1.0) + spec.xi * (spec.r + 2.0)
        if rate <= 1.0:
            warnings.warn(
                "ridge multiplier may not be integrable: decay rate "
                f"{rate:.3g} <= 1 for r={spec.r}, xi={spec.xi}; proceeding "
                "on the finite quadrature window",
                RuntimeWarning,
                stacklevel=2,
            )

    k, xi, r = spec.k, spec.xi, spec.r

    def eval_fn(t, k=k, xi=xi, r=r, g=g_mellin):
        t = np.asarray(t, dtype=float)
        mg = np.asarray(g.eval_fn(t), dtype=np.complex128)
        mg_neg = np.asarray(g.eval_fn(-t), dtype=np.complex128)
        amg = np.abs(mg)
        thresh = (1.0 + np.abs(t)) ** xi / k
        exact = amg >= thresh
        out = np.empty_like(mg)
        out[exact] = 1.0 / mg[exact]
        damped = ~exact
        out[damped] = (
            mg_neg[damped]
            * amg[damped] ** r
            / np.maximum(amg[damped], thresh[damped]) ** (r + 2.0)
        )
        return out

    return MellinMultiplier(spec=spec, g_mellin=g_mellin, eval_fn=eval_fn, support=None)


def check_nonvanishing(
    g_mellin: MellinFunction, k: float, t_step: float = 0.01
) -> None:
    """Verify |M_g| > 1e-12 on [-k, k], refining suspicious grid dips.

    A plain grid minimum can straddle an exact zero without seeing it, so
    local minima below 1e-3 are polished by golden-section search before
    the threshold test.  Raises `NoiseTransformZeroError` on failure.
    """
    step = min(t_step, 0.01)
    t = np.arange(0.0, k + step, step)
    t[-1] = min(t[-1], k)
    vals = np.abs(g_mellin(t))
    if vals.min() < 1e-12:
        raise NoiseTransformZeroError(
            f"noise transform vanishes near t={t[int(vals.argmin())]:.4f} "
            f"inside the window [-{k}, {k}]"
        )
    interior = (vals[1:-1] < vals[:-2]) & (vals[1:-1] < vals[2:])
    suspicious = np.where(interior & (vals[1:-1] < 1e-3))[0] + 1
    fn = lambda x: float(np.abs(g_mellin(np.array([x]))[0]))
    for idx in suspicious:
        refined = golden_section_min(fn, t[idx - 1], t[idx + 1])
        if refined < 1e-12:
            raise NoiseTransformZeroError(
                f"noise transform vanishes near t={t[idx]:.4f} inside the "
                f"window [-{k}, {k}]"
            )


def cutoff_multiplier(
    spec: CutoffSpec, g_mellin: MellinFunction, q: QuadratureConfig
) -> MellinMultiplier:
    """Build the cut-off multiplier 1/M_g restricted to |t| <= k."""
    if g_mellin.c != spec.c:
        raise MellinError(
            f"development point mismatch: multiplier c={spec.c}, noise c={g_mellin.c}"
        )
    check_nonvanishing(g_mellin, spec.k, q.t_step)
    k = spec.k

    def eval_fn(t, k=k, g=g_mellin):
        t = np.asarray(t, dtype=float)
        mg = np.asarray(g.eval_fn(t), dtype=np.complex128)
        inside = np.abs(t) <= k
        out = np.zeros_like(mg)
        out[inside] = 1.0 / mg[inside]
        return out

    return MellinMultiplier(spec=spec, g_mellin=g_mellin, eval_fn=eval_fn, support=k)


def multiplier_norm_sq(mult: MellinMultiplier, q: QuadratureConfig) -> float:
    """Integral of |multiplier|^2 dt (no 2*pi normalisation).

    Cut-off multipliers are integrated exactly over their window [-k, k];
    ridge multipliers over the full quadrature window.  When the noise
    transform carries decay metadata, the analytic tail bound is checked
    against ``q.rel_tail_tol`` and a truncation warning is emitted if the
    window is too short.
    """
    grid = FrequencyGrid.from_config(q)
    if mult.support is not None:
        vals = np.abs(mult(grid.t)) ** 2
        return float(grid.window_integrate(vals, mult.support))
    vals = np.abs(mult(grid.t)) ** 2
    norm = float(grid.integrate(vals))
    g = mult.g_mellin
    spec = mult.spec
    if isinstance(spec, RidgeSpec) and g.decay_exponent is not None:
        # tail of |R|^2 <= (k^(r+2) C^(r+1))^2 (1+t^2)^(-gamma(r+1)) beyond t_max
        rate = 2.0 * g.decay_exponent * (spec.r + 1.0)
        if rate > 1.0:
            const = (spec.k ** (spec.r + 2.0) * g.decay_upper ** (spec.r + 1.0)) ** 2
            tail = 2.0 * const * grid.t_max ** (1.0 - rate) / (rate - 1.0)
            if tail > q.rel_tail_tol * max(norm, np.finfo(float).tiny):
                warnings.warn(
                    f"ridge norm truncated: analytic tail bound {tail:.3g} "
                    f"exceeds rel_tail_tol of the computed value {norm:.6g}; "
                    "increase t_max",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return norm


class InversionKernel:
    """Cached inversion onto a fixed x-grid for repeated Mellin products.

    Holds the phase matrix exp(-i * log(x) ⊗ t) for the nonnegative half of
    a frequency grid, so that inverting a conjugate-symmetric product costs
    one matrix-vector product.  The half-grid sum 2*Re(sum_{m>0}) + centre
    term is exact for conjugate-symmetric inputs.
    """

    def __init__(self, grid: FrequencyGrid, x_grid: np.ndarray, c: float):
        self.grid = grid
        self.x = np.asarray(x_grid, dtype=float)
        self.c = float(c)
        t_half = grid.t[grid.center :]
        self.phases = np.exp(-1j * np.outer(np.log(self.x), t_half))
        self.x_pow = self.x ** (-self.c) / (2.0 * np.pi)

    def _half(self, product: np.ndarray, support: Optional[float]):
        j = (
            self.grid.window_index(support)
            if support is not None
            else self.grid.half_size
        )
        half = product[self.grid.center : self.grid.center + j + 1] * self.grid.t_step
        half[-1] *= 0.5
        return half, j

    def apply(self, product: np.ndarray, support: Optional[float] = None) -> np.ndarray:
        """Invert one product (full grid length, conjugate-symmetric)."""
        half, j = self._half(product, support)
        acc = self.phases[:, : j + 1] @ half
        return (2.0 * acc.real - half[0].real) * self.x_pow

    def apply_multi(
        self, products: np.ndarray, support: Optional[float] = None
    ) -> np.ndarray:
        """Invert a (K, len(grid)) stack of products at once -> (K, len(x))."""
        j = (
            self.grid.window_index(support)
            if support is not None
            else self.grid.half_size
        )
        half = products[:, self.grid.center : self.grid.center + j + 1] * self.grid.t_step
        half[:, -1] *= 0.5
        acc = self.phases[:, : j + 1] @ half.T
        vals = 2.0 * acc.real - half[:, 0].real[None, :]
        return (vals * self.x_pow[:, None]).T


def estimate_values_from_product(
    grid: FrequencyGrid,
    product: np.ndarray,
    c: float,
    x_grid: np.ndarray,
    support: Optional[float] = None,
) -> np.ndarray:
    """Invert a conjugate-symmetric Mellin-domain product to real x-values.

    One-shot variant of `InversionKernel.apply`; build a kernel instead when
    inverting many products onto the same grid.
    """
    return InversionKernel(grid, x_grid, c).apply(product, support=support)


def estimate_density(
    mult: MellinMultiplier,
    em: EmpiricalMellin,
    x_grid: np.ndarray,
    q: QuadratureConfig,
) -> DensityEstimate:
    """Apply a multiplier to the empirical transform and invert to x-space.

    The result is real up to quadrature round-off (the product inherits
    conjugate symmetry from the real sample weights); the imaginary residue
    is checked as in `inverse_mellin`.
    """
    if em.c != mult.spec.c:
        raise MellinError(
            f"development point mismatch: sample c={em.c}, multiplier c={mult.spec.c}"
        )
    grid = FrequencyGrid.from_config(q)
    mhat = empirical_mellin_on_grid(em, grid)
    product = mhat * mult(grid.t)
    complex_vals = invert_grid_values(
        grid, product, em.c, x_grid, support=mult.support
    )
    re, im = complex_vals.real, complex_vals.imag
    if np.abs(im).max() > 1e-8 * (1.0 + np.abs(re).max()):
        raise HermitianSymmetryError(
            "estimate has a non-negligible imaginary part; the Mellin "
            "product lost conjugate symmetry"
        )
    return DensityEstimate(
        x_grid=np.asarray(x_grid, dtype=float),
        values=re,
        c=em.c,
        t_grid=grid.t,
        mellin_values=product,
        t_step=grid.t_step,
    )


def write_estimate_csv(path, estimate: DensityEstimate) -> None:
    """Write an estimate as CSV with columns x, f_hat."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "f_hat"])
        for x, v in zip(estimate.x_grid, estimate.values):
            writer.writerow([repr(float(x)), repr(float(v))])
