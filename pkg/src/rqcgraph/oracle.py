"""Brute-force Monte Carlo statevector oracle for Haar-averaged moments.

Deliberately simple: dense amplitudes, exact Haar gates via Ginibre + QR,
per-sample counter-derived RNG streams so results are reproducible no matter
how the samples are chunked or parallelised.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ValidationError
from .graphs import Bipartition, EdgeProcess, FixedSequence, Graph, VertexSet, draw_sequence

MAX_AMPLITUDES = 1 << 24
_BATCH = 1024


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Exact Haar draw: complex Ginibre, QR, column phases fixed from diag(R)."""
    if dim < 2:
        raise ValidationError(f"unitary dimension must be >= 2, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def product_state(n: int, d: int, local: np.ndarray | None = None) -> np.ndarray:
    """Totally factorized fiducial state; defaults to |0...0>."""
    if local is None:
        local = np.zeros(d, dtype=complex)
        local[0] = 1.0
    psi = np.array([1.0 + 0j])
    for _ in range(n):
        psi = np.kron(psi, local)
    return psi


def apply_gate(psi: np.ndarray, n: int, d: int, x: VertexSet, u: np.ndarray) -> np.ndarray:
    """Apply a unitary supported on the vertices of x; axis i is vertex i."""
    m = len(x)
    if u.shape != (d**m, d**m):
        raise ValidationError(
            f"gate shape {u.shape} does not match edge of {m} qudits at d={d}"
        )
    axes = x.indices()
    t = psi.reshape((d,) * n)
    t = np.moveaxis(t, axes, range(m))
    t = (u @ t.reshape(d**m, -1)).reshape((d,) * n)
    t = np.moveaxis(t, range(m), axes)
    return t.reshape(-1)


def reduced_density(psi: np.ndarray, n: int, d: int, a: VertexSet) -> np.ndarray:
    """Partial trace over the complement of a, by index-split reshaping."""
    axes = a.indices()
    m = len(axes)
    t = np.moveaxis(psi.reshape((d,) * n), axes, range(m))
    mat = t.reshape(d**m, -1)
    return mat @ mat.conj().T


def renyi_moment(psi: np.ndarray, n: int, d: int, a: VertexSet, alpha: int) -> float:
    """Tr(rho_A^alpha); Frobenius shortcut at alpha=2, eigenvalues otherwise."""
    if alpha < 1:
        raise ValidationError(f"Renyi order must be >= 1, got {alpha}")
    rho = reduced_density(psi, n, d, a)
    if alpha == 1:
        return float(np.trace(rho).real)
    if alpha == 2:
        return float(np.vdot(rho, rho).real)
    evals = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    return float(np.sum(evals**alpha))


@dataclass
class SampleStats:
    """Streaming mean/variance (Welford) with an associative pairwise merge."""

    n_samples: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.n_samples += 1
        delta = x - self.mean
        self.mean += delta / self.n_samples
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "SampleStats") -> "SampleStats":
        if other.n_samples == 0:
            return SampleStats(self.n_samples, self.mean, self.m2)
        if self.n_samples == 0:
            return SampleStats(other.n_samples, other.mean, other.m2)
        n = self.n_samples + other.n_samples
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n_samples / n
        m2 = self.m2 + other.m2 + delta * delta * self.n_samples * other.n_samples / n
        return SampleStats(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.n_samples - 1) if self.n_samples > 1 else 0.0

    @property
    def stderr(self) -> float:
        return float(np.sqrt(self.variance / self.n_samples)) if self.n_samples else 0.0


def _sample_value(
    g: Graph,
    proc: EdgeProcess,
    a: VertexSet,
    k: int,
    alpha: int,
    rng: np.random.Generator,
    fiducial: np.ndarray | None,
) -> float:
    n, d = g.n_vertices, g.d
    seq = draw_sequence(proc, k, rng)
    psi = product_state(n, d) if fiducial is None else fiducial.copy()
    for edge in seq:
        psi = apply_gate(psi, n, d, edge, haar_unitary(d ** len(edge), rng))
    return renyi_moment(psi, n, d, a, alpha)


def _stats_for_range(args) -> SampleStats:
    g, proc, a, k, alpha, seed, lo, hi, fiducial = args
    stats = SampleStats()
    for idx in range(lo, hi):
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
        stats.add(_sample_value(g, proc, a, k, alpha, rng, fiducial))
    return stats


def estimate_moments(
    g: Graph,
    proc: EdgeProcess,
    p: Bipartition,
    k: int,
    alpha: int,
    samples: int,
    seed: int,
    fiducial: np.ndarray | None = None,
    workers: int | None = None,
) -> SampleStats:
    """Monte Carlo mean/variance of Tr(rho_A^alpha) over the circuit ensemble.

    Sample i uses the RNG stream SeedSequence([seed, i]) for both its edge
    sequence and its Haar gates, so the result is independent of chunking
    and worker count.
    """
    if g.d**g.n_vertices > MAX_AMPLITUDES:
        raise CapacityError(
            f"{g.d}^{g.n_vertices} amplitudes exceed the {MAX_AMPLITUDES} cap"
        )
    if samples < 2:
        raise ValidationError(f"need at least 2 samples, got {samples}")
    if k < 0:
        raise ValidationError(f"steps must be >= 0, got {k}")
    if workers is None:
        workers = int(os.environ.get("RQCGRAPH_WORKERS", "1"))
    a = p.a_set
    if workers > 1 and samples >= 4 * _BATCH:
        bounds = np.linspace(0, samples, workers + 1, dtype=int)
        jobs = [
            (g, proc, a, k, alpha, seed, int(lo), int(hi), fiducial)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_stats_for_range, jobs))
        stats = SampleStats()
        for part in parts:
            stats = stats.merge(part)
        return stats
    if isinstance(proc, FixedSequence) or k == 0:
        return _estimate_fixed_sequence(g, proc, a, k, alpha, samples, seed, fiducial)
    return _stats_for_range((g, proc, a, k, alpha, seed, 0, samples, fiducial))


def _estimate_fixed_sequence(
    g: Graph,
    proc: EdgeProcess,
    a: VertexSet,
    k: int,
    alpha: int,
    samples: int,
    seed: int,
    fiducial: np.ndarray | None,
) -> SampleStats:
    """Batched path for a shared edge sequence: gates stacked across samples."""
    n, d = g.n_vertices, g.d
    seq = draw_sequence(proc, k, np.random.default_rng(0)) if k else ()
    base = product_state(n, d) if fiducial is None else fiducial
    stats = SampleStats()
    for lo in range(0, samples, _BATCH):
        hi = min(lo + _BATCH, samples)
        b = hi - lo
        rngs = [np.random.default_rng(np.random.SeedSequence([seed, i])) for i in range(lo, hi)]
        psis = np.broadcast_to(base, (b,) + base.shape).copy()
        for edge in seq:
            dim = d ** len(edge)
            gates = np.stack([haar_unitary(dim, rng) for rng in rngs])
            psis = _apply_gate_batch(psis, n, d, edge, gates)
        vals = _renyi_batch(psis, n, d, a, alpha)
        for v in vals:
            stats.add(float(v))
    return stats


def _apply_gate_batch(
    psis: np.ndarray, n: int, d: int, x: VertexSet, gates: np.ndarray
) -> np.ndarray:
    b = psis.shape[0]
    m = len(x)
    axes = [i + 1 for i in x.indices()]
    t = psis.reshape((b,) + (d,) * n)
    t = np.moveaxis(t, axes, range(1, m + 1))
    t = np.matmul(gates, t.reshape(b, d**m, -1)).reshape((b,) + (d,) * n)
    t = np.moveaxis(t, range(1, m + 1), axes)
    return t.reshape(b, -1)


def _renyi_batch(psis: np.ndarray, n: int, d: int, a: VertexSet, alpha: int) -> np.ndarray:
    b = psis.shape[0]
    axes = [i + 1 for i in a.indices()]
    m = len(axes)
    t = np.moveaxis(psis.reshape((b,) + (d,) * n), axes, range(1, m + 1))
    mats = t.reshape(b, d**m, -1)
    svals = np.linalg.svd(mats, compute_uv=False)
    return np.sum(svals ** (2 * alpha), axis=1)
