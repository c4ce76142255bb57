"""Exact alpha=2 purity dynamics in the sparse swap-operator basis.

A two-copy Haar twirl on the support of an edge X projects the swap operator
T_A onto span{T_{A\\X}, T_{A u X}}; iterating this over an edge sequence gives
the exact ensemble-averaged purity for any graph, bipartition and circuit.

Convention: edge sequences are stored in application-to-state order, but the
twirl superoperators compose in the reverse order, so the purity of a circuit
is computed by applying the twirl of the *last* gate first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import CapacityError, ValidationError
from .graphs import (
    Bipartition,
    EdgeProcess,
    FixedSequence,
    Graph,
    UniformIID,
    VertexSet,
    sample_sequence,
    step_distributions,
)
from .series import PuritySeries

PRUNE_THRESHOLD = 1e-15
DEFAULT_TERM_CAP = 1 << 24


@lru_cache(maxsize=None)
def twirl_coefficients(m: int, s: int, d: int) -> tuple[float, float]:
    """Coefficients (c_keep, c_join) of the two-copy twirl on a |X|=m edge.

    The restriction of T_A to the edge support is the swap on the s = |A n X|
    overlapped factors times the identity on the rest; the Haar twirl projects
    it onto the commutant span{1_X, T_X} of U^(x2).  Solving the 2x2 Gram
    system with Tr O = d^(2m-s) and Tr(O T_X) = d^(m+s) gives the result as
    R_X(T_A) = c_keep T_{A\\X} + c_join T_{A u X}.
    """
    if m < 2 or s < 0 or s > m:
        raise ValidationError(f"invalid twirl overlap: m={m}, s={s}")
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got d={d}")
    if s == 0:
        return 1.0, 0.0
    if s == m:
        return 0.0, 1.0
    big = float(d) ** m  # dim of the edge support
    tr_o = float(d) ** (2 * m - s)
    tr_ot = float(d) ** (m + s)
    det = big**4 - big**2
    c_keep = (big**2 * tr_o - big * tr_ot) / det
    c_join = (big**2 * tr_ot - big * tr_o) / det
    return c_keep, c_join


@dataclass(frozen=True)
class SwapVector:
    """Sparse nonnegative combination sum_A c_A T_A over subset bitmasks."""

    terms: dict[int, float] = field(compare=False)
    n: int = 0
    d: int = 2

    @classmethod
    def basis(cls, a: VertexSet, d: int) -> "SwapVector":
        return cls({a.bits: 1.0}, a.n, d)

    def purity(self) -> float:
        """<omega^(x2), .> with a product fiducial state: every T_B contributes 1."""
        return sum(self.terms.values())

    def coefficient(self, a: VertexSet) -> float:
        return self.terms.get(a.bits, 0.0)

    def __len__(self) -> int:
        return len(self.terms)


def purity(v: SwapVector) -> float:
    return v.purity()


def apply_edge(v: SwapVector, x: VertexSet, term_cap: int = DEFAULT_TERM_CAP) -> SwapVector:
    """One edge twirl R_X applied to every term, with linear extension."""
    xb = x.bits
    m = len(x)
    d = v.d
    out: dict[int, float] = {}
    for bits, c in v.terms.items():
        s = (bits & xb).bit_count()
        if s == 0 or s == m:
            out[bits] = out.get(bits, 0.0) + c
            continue
        c_keep, c_join = twirl_coefficients(m, s, d)
        keep = bits & ~xb
        join = bits | xb
        out[keep] = out.get(keep, 0.0) + c * c_keep
        out[join] = out.get(join, 0.0) + c * c_join
    out = {b: c for b, c in out.items() if c >= PRUNE_THRESHOLD}
    if len(out) > term_cap:
        raise CapacityError(f"swap vector exceeded {term_cap} terms")
    return SwapVector(out, v.n, v.d)


def apply_mixture(
    v: SwapVector,
    edges: tuple[VertexSet, ...],
    probs,
    term_cap: int = DEFAULT_TERM_CAP,
) -> SwapVector:
    """Probability-weighted mixture sum_X P(X) R_X applied once."""
    out: dict[int, float] = {}
    for e, p in zip(edges, probs):
        if p == 0.0:
            continue
        step = apply_edge(v, e, term_cap)
        for bits, c in step.terms.items():
            out[bits] = out.get(bits, 0.0) + p * c
    out = {b: c for b, c in out.items() if c >= PRUNE_THRESHOLD}
    if len(out) > term_cap:
        raise CapacityError(f"swap vector exceeded {term_cap} terms")
    return SwapVector(out, v.n, v.d)


def _sequence_purity(
    start: SwapVector, seq: tuple[VertexSet, ...], term_cap: int
) -> float:
    """Purity of the circuit given by seq (application order): twirls reversed."""
    v = start
    for e in reversed(seq):
        v = apply_edge(v, e, term_cap)
    return v.purity()


def evolve(
    g: Graph,
    start: Bipartition,
    proc: EdgeProcess,
    k: int,
    mode: str = "expectation",
    seed: int | None = None,
    term_cap: int = DEFAULT_TERM_CAP,
) -> PuritySeries:
    """Ensemble-averaged purity after each of 0..k circuit steps.

    expectation mode averages exactly over both the Haar unitaries and the
    edge choice (per-step marginals for a MarkovChain process); sampled mode
    fixes one drawn edge sequence and averages over Haar only.
    """
    if k < 0:
        raise ValidationError(f"steps must be >= 0, got {k}")
    if mode not in ("expectation", "sampled"):
        raise ValidationError(f"mode must be 'expectation' or 'sampled', got {mode!r}")
    basis = SwapVector.basis(start.a_set, g.d)
    values = [1.0]
    meta = {"model": "swap-engine", "d": g.d, "n": g.n_vertices, "mode": mode}

    if mode == "sampled":
        if seed is None:
            raise ValidationError("sampled mode requires a seed")
        meta["seed"] = seed
        seq = sample_sequence(proc, k, seed)
        for j in range(1, k + 1):
            values.append(_sequence_purity(basis, seq[:j], term_cap))
        return PuritySeries(tuple(values), meta)

    if isinstance(proc, UniformIID):
        # every step applies the same mixture: composition order is immaterial
        probs = [1.0 / g.n_edges] * g.n_edges
        v = basis
        for _ in range(k):
            v = apply_mixture(v, g.edges, probs, term_cap)
            values.append(v.purity())
        return PuritySeries(tuple(values), meta)

    dists = step_distributions(proc, k)
    if isinstance(proc, FixedSequence):
        seq = sample_sequence(proc, k, 0)
        for j in range(1, k + 1):
            values.append(_sequence_purity(basis, seq[:j], term_cap))
        return PuritySeries(tuple(values), meta)
    # MarkovChain: marginal mixtures differ per step and compose in reverse
    for j in range(1, k + 1):
        v = basis
        for t in range(j - 1, -1, -1):
            v = apply_mixture(v, g.edges, dists[t], term_cap)
        values.append(v.purity())
    return PuritySeries(tuple(values), meta)
