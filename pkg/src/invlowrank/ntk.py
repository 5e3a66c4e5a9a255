"""Tangent kernels of shallow scalar networks and their group-averaged forms.

Finite-width empirical kernels of the bias-free two-layer net
f(x) = (1/sqrt(d1)) sum_d a_d sigma(w_d^T x), the closed-form infinite-width
ReLU kernel, the orbit-averaged kernel, the group-convolutional finite-width
kernel, and ridge-free kernel interpolation. Scalar outputs only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import tolerances as tol
from .activations import get_activation
from .errors import DimensionMismatch, NotUnitary, SingularKernel, ZeroVector
from .groups import GroupRep, elements, is_unitary


@dataclass(frozen=True)
class WidthSampleSet:
    """Sampled first-layer weights and output scales of a finite-width net."""

    weights: np.ndarray     # d1 x d0
    out_scales: np.ndarray  # d1
    seed: int

    def __post_init__(self):
        if self.weights.shape[0] != self.out_scales.shape[0]:
            raise DimensionMismatch("one output scale per weight vector required")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.out_scales))):
            raise ValueError("sample weights and scales must be finite")

    @property
    def width(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric kernel Gram matrix plus the diagonal jitter used in solves."""

    entries: np.ndarray
    jitter: float


def sample_width_set(dim: int, width: int, seed: int) -> WidthSampleSet:
    """a_d ~ N(0,1), w_d ~ N(0, I_dim), drawn from one seeded generator."""
    rng = np.random.default_rng(seed)
    weights = rng.standard_normal((width, dim))
    out_scales = rng.standard_normal(width)
    return WidthSampleSet(weights=weights, out_scales=out_scales, seed=seed)


def orbit_symmetrize(samples: WidthSampleSet, rep: GroupRep) -> WidthSampleSet:
    """Close the weight set under w -> rho(g)^T w, replicating out scales.

    The exact conv-kernel = augmented-kernel identity holds on orbit-closed
    sets; expansion is sample-major (the full orbit of w_0 first).
    """
    mats = elements(rep)
    weights = np.vstack([
        np.stack([g.T @ w for g in mats]) for w in samples.weights
    ])
    out_scales = np.repeat(samples.out_scales, len(mats))
    return WidthSampleSet(weights=weights, out_scales=out_scales, seed=samples.seed)


def relu_limiting_ntk(x: np.ndarray, xp: np.ndarray) -> float:
    """Infinite-width tangent kernel of the two-layer ReLU net.

    K(x, x') = (x.x'/(2 pi)) (pi - theta)
             + (|x||x'|/(2 pi)) ((pi - theta) cos theta + sin theta),
    with theta the angle between x and x'. The angle comes from the
    two-argument arctangent of the unit-vector sum and difference, which is
    exact at the parallel and antipodal endpoints where arccos of a rounded
    cosine loses ~sqrt(eps) digits.
    """
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.shape != xp.shape:
        raise DimensionMismatch(f"shapes {x.shape} vs {xp.shape}")
    nx = float(np.linalg.norm(x))
    np_ = float(np.linalg.norm(xp))
    if nx == 0.0 or np_ == 0.0:
        raise ZeroVector("limiting kernel needs nonzero inputs")
    u = x / nx
    v = xp / np_
    theta = 2.0 * np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v))
    dot = float(x @ xp)
    return dot * (np.pi - theta) / (2 * np.pi) + nx * np_ * (
        (np.pi - theta) * np.cos(theta) + np.sin(theta)
    ) / (2 * np.pi)


def empirical_ntk(samples: WidthSampleSet, activation: str,
                  x: np.ndarray, xp: np.ndarray) -> float:
    """Finite-width kernel
    (1/d1) sum_d [a_d^2 sigma'(w_d.x) sigma'(w_d.x') x.x' + sigma(w_d.x) sigma(w_d.x')].
    """
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.shape != xp.shape or x.shape[0] != samples.weights.shape[1]:
        raise DimensionMismatch(
            f"inputs {x.shape}, {xp.shape} vs weight dim {samples.weights.shape[1]}"
        )
    act, act_prime = get_activation(activation)
    pre_x = samples.weights @ x
    pre_y = samples.weights @ xp
    grad_term = samples.out_scales ** 2 * act_prime(pre_x) * act_prime(pre_y) * float(x @ xp)
    act_term = act(pre_x) * act(pre_y)
    return float(np.mean(grad_term + act_term))


def empirical_ntk_terms(samples: WidthSampleSet, activation: str,
                        x: np.ndarray, xp: np.ndarray) -> np.ndarray:
    """The d1 per-unit summands of the empirical kernel (for error bars)."""
    act, act_prime = get_activation(activation)
    pre_x = samples.weights @ x
    pre_y = samples.weights @ xp
    return (samples.out_scales ** 2 * act_prime(pre_x) * act_prime(pre_y) * float(x @ xp)
            + act(pre_x) * act(pre_y))


def augmented_kernel(kernel: Callable[[np.ndarray, np.ndarray], float],
                     rep: GroupRep, x: np.ndarray, xp: np.ndarray) -> float:
    """Uniform group average E_g k(rho(g) x, x')."""
    vals = [kernel(g @ x, xp) for g in elements(rep)]
    return float(np.mean(vals))


def conv_forward(samples: WidthSampleSet, activation: str, rep: GroupRep,
                 x: np.ndarray) -> float:
    """Group-convolutional net (1/sqrt(d1)) sum_d a_d mean_g sigma(w_d^T rho(g) x)."""
    act, _ = get_activation(activation)
    orbit = np.stack([g @ x for g in elements(rep)])      # k x d0
    pre = samples.weights @ orbit.T                       # d1 x k
    pooled = act(pre).mean(axis=1)
    return float(samples.out_scales @ pooled / np.sqrt(samples.width))


def conv_empirical_ntk(samples: WidthSampleSet, activation: str, rep: GroupRep,
                       x: np.ndarray, xp: np.ndarray) -> float:
    """Finite-width kernel of the group-convolutional net.

    Both terms carry group-averaged features: the activation product of the
    pooled activations and the gradient product of the orbit-averaged
    sigma'-weighted inputs. Requires a unitary representation.
    """
    if not is_unitary(rep):
        raise NotUnitary("group-convolutional kernel requires a unitary representation")
    act, act_prime = get_activation(activation)
    mats = elements(rep)

    def pooled(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        orbit = np.stack([g @ v for g in mats])           # k x d0
        pre = samples.weights @ orbit.T                   # d1 x k
        s = act(pre).mean(axis=1)                         # d1
        grad = act_prime(pre) @ orbit / len(mats)         # d1 x d0
        return s, grad

    s_x, g_x = pooled(np.asarray(x, dtype=float))
    s_y, g_y = pooled(np.asarray(xp, dtype=float))
    act_term = s_x * s_y
    grad_term = samples.out_scales ** 2 * np.sum(g_x * g_y, axis=1)
    return float(np.mean(act_term + grad_term))


def build_kernel_matrix(kernel: Callable[[np.ndarray, np.ndarray], float],
                        points: np.ndarray, jitter: float | None = None) -> KernelMatrix:
    """Gram matrix over the columns of ``points``; default jitter 1e-10 trace/n."""
    n = points.shape[1]
    k = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            k[i, j] = kernel(points[:, i], points[:, j])
            k[j, i] = k[i, j]
    if jitter is None:
        jitter = 1e-10 * float(np.trace(k)) / n
    return KernelMatrix(entries=k, jitter=float(jitter))


def kernel_interpolate(k: KernelMatrix, y: np.ndarray) -> np.ndarray:
    """Solve (K + jitter I) alpha = y, verifying the residual."""
    y = np.asarray(y, dtype=float)
    system = k.entries + k.jitter * np.eye(k.entries.shape[0])
    try:
        alpha = np.linalg.solve(system, y)
    except np.linalg.LinAlgError as exc:
        raise SingularKernel(f"kernel solve failed: {exc}") from exc
    residual = float(np.linalg.norm(system @ alpha - y))
    bound = tol.KERNEL_RESIDUAL * max(float(np.linalg.norm(y)), 1e-300)
    if residual > bound:
        raise SingularKernel(f"solve residual {residual:.3e} exceeds {bound:.3e}")
    return alpha


def kernel_predict(kernel: Callable[[np.ndarray, np.ndarray], float],
                   centers: np.ndarray, coeffs: np.ndarray, x: np.ndarray) -> float:
    """sum_i coeffs[i] k(x, centers[:, i])."""
    return float(sum(coeffs[i] * kernel(x, centers[:, i]) for i in range(centers.shape[1])))
