"""First-order oracles with bounded, reproducible noise.

The solver only ever sees an OracleHandle: a function value field and a
gradient field that may each be wrong by a declared absolute amount. The
noise here is deterministic in the query point. Asking for the same x twice
returns the same corrupted values, which is the regime the convergence
analysis assumes (a fixed corrupted function, not a stochastic one).

Determinism comes from keying a pseudo-random function on the bytes of x:
no state is carried between calls, so evaluation order is irrelevant.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .sampler import sample_ball

Array = np.ndarray


@dataclass(frozen=True)
class NoiseBounds:
    """Absolute error bounds granted to a noisy oracle.

    eps_f bounds |f_noisy(x) - f(x)|, eps_g bounds the Euclidean distance
    from the reported gradient to some true subgradient at x. Both hold
    exactly, with no floating-point slack.
    """

    eps_f: float = 0.0
    eps_g: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.eps_f) and self.eps_f >= 0.0):
            raise ValueError("eps_f must be finite and nonnegative")
        if not (np.isfinite(self.eps_g) and self.eps_g >= 0.0):
            raise ValueError("eps_g must be finite and nonnegative")


@dataclass(frozen=True)
class TruthAccess:
    """Exact evaluators, used for verification and reporting only.

    f returns the exact value, g one valid subgradient. subdiff, when
    available, returns a matrix whose rows generate the convex hull of the
    full subdifferential at x. The solver never steps on any of these.
    """

    f: Callable[[Array], float]
    g: Callable[[Array], Array]
    subdiff: Optional[Callable[[Array], Array]] = None


@dataclass(frozen=True)
class OracleHandle:
    """What the solver consumes: dimension plus two evaluation fields.

    deterministic promises that repeated queries at the same point return
    identical values. Oracles that break that promise (mini-batch style
    resampling) must say so; the solver then runs outside its supported
    contract and warns. meta is a mutable scratch area for oracle
    diagnostics such as sample counters; nothing in the solver reads it.
    """

    dims: int
    eval_f: Callable[[Array], float]
    eval_g: Callable[[Array], Array]
    truth_access: Optional[TruthAccess] = None
    deterministic: bool = True
    meta: dict = field(default_factory=dict)


def exact_oracle(dims: int, f: Callable[[Array], float], g: Callable[[Array], Array],
                 subdiff: Optional[Callable[[Array], Array]] = None) -> OracleHandle:
    """Package exact callables as a noise-free oracle with truth attached."""
    return OracleHandle(dims=int(dims), eval_f=f, eval_g=g,
                        truth_access=TruthAccess(f=f, g=g, subdiff=subdiff))


def _canonical_bytes(x) -> bytes:
    # -0.0 + 0.0 is +0.0, so the two zeros key identical noise.
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64)) + 0.0
    return arr.astype("<f8").tobytes()


def _keyed_rng(seed: int, tag: bytes, x) -> np.random.Generator:
    msg = _canonical_bytes(x) + b"|" + tag + b"|" + str(int(seed)).encode()
    digest = hashlib.blake2b(msg, digest_size=32).digest()
    words = np.frombuffer(digest, dtype=np.uint32)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words.tolist())))


def keyed_seed(seed: int, x, tag: bytes = b"") -> int:
    """Derive a point-keyed integer seed. Stable across processes."""
    msg = _canonical_bytes(x) + b"|" + tag + b"|" + str(int(seed)).encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


def keyed_uniform(seed: int, x, half_width: float, tag: bytes = b"f") -> float:
    """Deterministic draw from [-half_width, half_width), keyed by (seed, x)."""
    if half_width == 0.0:
        return 0.0
    rng = _keyed_rng(seed, tag, x)
    return float(rng.uniform(-half_width, half_width))


def keyed_ball(seed: int, x, radius: float, dim: int, tag: bytes = b"g") -> Array:
    """Deterministic draw from the closed ball of given radius, keyed by (seed, x)."""
    if radius == 0.0:
        return np.zeros(dim)
    rng = _keyed_rng(seed, tag, x)
    direction = rng.standard_normal(dim)
    nrm = float(np.linalg.norm(direction))
    if nrm == 0.0:
        return np.zeros(dim)
    return direction * (radius * rng.random() ** (1.0 / dim) / nrm)


def clamp_scalar(value: float, anchor: float, half_width: float) -> float:
    """Force |value - anchor| <= half_width exactly in floating point.

    Adding noise to a large anchor can round one ulp past the bound; the
    declared bound is a hard contract, so shave the spill off.
    """
    while abs(value - anchor) > half_width:
        value = float(np.nextafter(value, anchor))
    return value


def clamp_ball(value: Array, anchor: Array, radius: float) -> Array:
    """Force ||value - anchor||_2 <= radius exactly in floating point."""
    delta = value - anchor
    dist = float(np.linalg.norm(delta))
    while dist > radius:
        delta = delta * ((radius / dist) * (1.0 - 1e-14))
        value = anchor + delta
        delta = value - anchor
        dist = float(np.linalg.norm(delta))
    return value


def wrap_with_uniform_noise(exact: OracleHandle, bounds: NoiseBounds, noise_seed: int) -> OracleHandle:
    """Corrupt an exact oracle with independent uniform noise fields.

    Function noise is uniform on [-eps_f, eps_f]; gradient noise is uniform
    on the closed eps_g ball (Gaussian direction, radius eps_g * U**(1/n)).
    Both are keyed by (noise_seed, x), so the corrupted oracle is a fixed
    deterministic function. Degenerate bounds hand back the exact oracle.
    """
    if exact.truth_access is None:
        raise ValueError("wrapping requires an oracle with exact evaluators attached")
    truth = exact.truth_access
    n = exact.dims
    eps_f = float(bounds.eps_f)
    eps_g = float(bounds.eps_g)
    if eps_f == 0.0 and eps_g == 0.0:
        return exact

    if eps_f == 0.0:
        noisy_f = truth.f
    else:
        def noisy_f(x, _f=truth.f):
            fx = float(_f(x))
            return clamp_scalar(fx + keyed_uniform(noise_seed, x, eps_f, b"f"), fx, eps_f)

    if eps_g == 0.0:
        noisy_g = truth.g
    else:
        def noisy_g(x, _g=truth.g):
            gx = np.asarray(_g(x), dtype=float)
            return clamp_ball(gx + keyed_ball(noise_seed, x, eps_g, n, b"g"), gx, eps_g)

    return OracleHandle(dims=n, eval_f=noisy_f, eval_g=noisy_g, truth_access=truth,
                        deterministic=True)


def estimate_diam_caveat(exact: OracleHandle, x, eps: float, num_samples: int,
                         rng_seed: int = 0) -> float:
    """Largest pairwise distance among true subgradients sampled near x.

    A value much larger than the eps_g one is prepared to declare means the
    bounded-gradient-error assumption is restrictive there: near a kink the
    subdifferential has diameter comparable to the derivative jump, and a
    single reported gradient with small error cannot represent it.
    """
    if exact.truth_access is None:
        raise ValueError("diameter estimation needs exact evaluators")
    if num_samples < 2:
        raise ValueError("need at least two samples for a pairwise distance")
    if not (math.isfinite(eps) and eps > 0.0):
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    points = sample_ball(x, eps, num_samples, rng_seed, 0).points
    grads = np.empty((num_samples, x.size))
    for i, p in enumerate(points):
        grads[i] = np.asarray(exact.truth_access.g(p), dtype=float)
    sq = np.einsum("ij,ij->i", grads, grads)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (grads @ grads.T)
    return float(np.sqrt(max(float(np.max(d2)), 0.0)))
