"""Brute-force perturbation search against the robust-efficiency definition.

Robustness of a candidate demands that it stay efficient for every additive
perturbation Cx whose Frobenius norm is strictly below a radius.  This module
is the refuting half of that quantifier: it walks a deterministic family of
sparse perturbation matrices plus a seeded batch of random lattice ones,
decides efficiency exactly per sample, and reports the first dominated sample
under a fixed total order.  Finding nothing proves nothing.
"""

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .certify import VOPInstance, _verify_domination, efficiency_check
from .errors import ConsistencyError, InstanceFormatError
from .funcs import AffinePiece, PieceFn, QuadPiece, Selection, full_dim_selections
from .rationals import Vec, vadd

REFUTED = "RefutedWithWitness"
NO_COUNTEREXAMPLE = "NoCounterexampleFound"

# random entries live on the k/2^20 grid before rescaling
LATTICE_BITS = 20

WORKERS_ENV = "VOPCERT_ORACLE_WORKERS"


@dataclass(frozen=True)
class PerturbationMatrix:
    """A p x n rational matrix added row-wise to the objective as Cx."""

    rows: Tuple[Vec, ...]

    def frobenius_sq(self) -> Fraction:
        return sum((c * c for row in self.rows for c in row), Fraction(0))

    def in_ball(self, r: Fraction) -> bool:
        # strict: the ball of radius r is open
        return self.frobenius_sq() < r * r


@dataclass(frozen=True)
class OracleReport:
    outcome: str
    matrix: Optional[PerturbationMatrix]
    witness: Optional[Vec]
    patterns_tried: int
    samples_tried: int
    budget: int
    seed: int
    exact: bool = True
    note: Optional[str] = None

    @property
    def refuted(self) -> bool:
        return self.outcome == REFUTED


@dataclass(frozen=True)
class RadiusEstimate:
    """One-sided radius probe: a refuted level and the largest clean level.

    clean_below records absence of a found counterexample, never a
    certificate of robustness.
    """

    refuted_at: Optional[Fraction]
    clean_below: Fraction
    trace: Tuple[Tuple[Fraction, str], ...]


def zero_matrix(p: int, n: int) -> PerturbationMatrix:
    row = tuple(Fraction(0) for _ in range(n))
    return PerturbationMatrix(tuple(row for _ in range(p)))


def _entry_matrix(p: int, n: int, entries) -> PerturbationMatrix:
    rows = [[Fraction(0)] * n for _ in range(p)]
    for (i, j), v in entries:
        rows[i][j] = v
    return PerturbationMatrix(tuple(tuple(r) for r in rows))


def structured_patterns(p: int, n: int, r: Fraction) -> Tuple[PerturbationMatrix, ...]:
    """Sparse one- and two-entry matrices at magnitude r/2, fixed order.

    Single entries come first in row-major cell order with the positive sign
    before the negative; then every ordered cell pair with the four sign
    combinations. Both shapes stay strictly inside the Frobenius ball.
    """
    rho = Fraction(r) / 2
    cells = [(i, j) for i in range(p) for j in range(n)]
    out = []
    for cell in cells:
        for s in (1, -1):
            out.append(_entry_matrix(p, n, ((cell, s * rho),)))
    for a in range(len(cells)):
        for b in range(a + 1, len(cells)):
            for s1, s2 in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
                out.append(_entry_matrix(
                    p, n, ((cells[a], s1 * rho), (cells[b], s2 * rho))))
    return tuple(out)


def _random_matrix(rng: random.Random, p: int, n: int, r: Fraction) -> PerturbationMatrix:
    den = 1 << LATTICE_BITS
    entries = [[Fraction(rng.randint(-den, den), den) for _ in range(n)]
               for _ in range(p)]
    fro = sum((c * c for row in entries for c in row), Fraction(0))
    if fro == 0:
        return PerturbationMatrix(tuple(tuple(row) for row in entries))
    # t*t > fro, so scaling by r*mag/t keeps the squared norm strictly
    # below r^2 without ever leaving rational arithmetic
    t = math.isqrt(int(fro)) + 1
    mag = Fraction(rng.randint(1, den), den)
    alpha = Fraction(r) * mag / t
    return PerturbationMatrix(tuple(tuple(alpha * c for c in row)
                                    for row in entries))


def perturbed_instance(inst: VOPInstance, matrix: PerturbationMatrix) -> VOPInstance:
    """Shift every piece of component i by the affine term rows[i] . x."""
    comps = []
    for fn, crow in zip(inst.objectives, matrix.rows):
        pieces = []
        for pc in fn.pieces:
            if isinstance(pc, AffinePiece):
                pieces.append(AffinePiece(vadd(pc.a, crow), pc.b))
            else:
                pieces.append(QuadPiece(pc.h, vadd(pc.a, crow), pc.b))
        comps.append(PieceFn(fn.kind, tuple(pieces)))
    return VOPInstance(tuple(comps), inst.feasible, inst.cone, inst.n)


def _evaluate(inst: VOPInstance, xbar: Vec,
              regions: Optional[Tuple[Selection, ...]],
              matrix: PerturbationMatrix) -> Optional[Vec]:
    """Dominating point of xbar under the perturbed objective, or None.

    The perturbation adds the same affine term to every piece of a
    component, so within-component piece comparisons are untouched and the
    selection regions of the unperturbed instance stay valid.
    """
    pert = perturbed_instance(inst, matrix)
    res = efficiency_check(pert, xbar, regions)
    if res.efficient:
        return None
    y = res.witness
    if y is None or not _verify_domination(pert, xbar, y):
        raise ConsistencyError("oracle refutation failed substitution")
    return y


def _scan_chunk(args):
    inst, xbar, regions, cands, base = args
    for k, matrix in enumerate(cands):
        y = _evaluate(inst, xbar, regions, matrix)
        if y is not None:
            return (base + k, matrix, y)
    return None


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            workers = 1
    return max(1, workers)


def robust_oracle(inst: VOPInstance, xbar: Vec, r, budget: int = 1000,
                  seed: int = 0, patterns: bool = True,
                  workers: Optional[int] = None) -> OracleReport:
    """Search the open Frobenius ball of radius r for a refuting C.

    The candidate stream is the zero matrix, then the structured patterns,
    then `budget` seeded lattice samples. The reported refutation is the
    first under that order; with several workers the chunks are merged by
    minimum index, so the report does not depend on scheduling.
    """
    r = Fraction(r)
    if r <= 0:
        raise InstanceFormatError("perturbation radius must be positive")
    exact = all(fn.is_affine() for fn in inst.objectives)
    regions = full_dim_selections(inst.objectives, inst.n) if exact else None
    pats = structured_patterns(inst.p, inst.n, r) if patterns else ()
    rng = random.Random(seed)
    samples = tuple(_random_matrix(rng, inst.p, inst.n, r)
                    for _ in range(budget))
    candidates = (zero_matrix(inst.p, inst.n),) + pats + samples
    npat = 1 + len(pats)
    assert all(m.frobenius_sq() < r * r for m in candidates)

    workers = _resolve_workers(workers)
    hit = None
    if workers == 1 or len(candidates) < 2 * workers:
        hit = _scan_chunk((inst, xbar, regions, candidates, 0))
    else:
        size = -(-len(candidates) // workers)
        chunks = [(inst, xbar, regions, candidates[i:i + size], i)
                  for i in range(0, len(candidates), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            found = [h for h in pool.map(_scan_chunk, chunks) if h is not None]
        if found:
            hit = min(found, key=lambda h: h[0])

    note = None if exact else "suggestive"
    if hit is not None:
        idx, matrix, y = hit
        return OracleReport(REFUTED, matrix, y,
                            patterns_tried=min(idx + 1, npat),
                            samples_tried=max(0, idx + 1 - npat),
                            budget=budget, seed=seed, exact=exact, note=note)
    return OracleReport(NO_COUNTEREXAMPLE, None, None,
                        patterns_tried=npat, samples_tried=budget,
                        budget=budget, seed=seed, exact=exact, note=note)


def radius_estimate(inst: VOPInstance, xbar: Vec, r_max, budget: int = 200,
                    seed: int = 0, levels: int = 6,
                    patterns: bool = True) -> RadiusEstimate:
    """Bisect [0, r_max], probing each level with a fixed sample budget.

    Probes start at r_max and walk the bisection interval; a refuted probe
    lowers the top, a clean probe raises the bottom, so every clean level
    sits strictly below every refuted one and the trace is monotone.
    """
    r_max = Fraction(r_max)
    if r_max < 0:
        raise InstanceFormatError("radius bound must be nonnegative")
    if r_max == 0:
        return RadiusEstimate(None, Fraction(0), ())
    lo, hi = Fraction(0), r_max
    refuted_at: Optional[Fraction] = None
    clean_below = Fraction(0)
    trace = []
    probe = r_max
    for level in range(levels):
        rep = robust_oracle(inst, xbar, probe, budget, seed + level, patterns)
        trace.append((probe, rep.outcome))
        if rep.refuted:
            refuted_at = probe if refuted_at is None else min(refuted_at, probe)
            hi = probe
        else:
            clean_below = max(clean_below, probe)
            lo = probe
        nxt = (lo + hi) / 2
        if nxt in (lo, hi):
            break
        probe = nxt
    if refuted_at is not None:
        assert clean_below < refuted_at
    return RadiusEstimate(refuted_at, clean_below, tuple(trace))
