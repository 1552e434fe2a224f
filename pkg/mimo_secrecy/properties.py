"""Randomized property sweeps behind `check-properties`.

Each suite draws instances from one seeded generator, records pass/fail and
the worst gap per property, and never raises on a violation.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, Iterable, Optional

import numpy as np
from tqdm import tqdm

from .augmented import (
    assemble_augmented,
    composite_from_augmented,
    make_generator,
    m_matrix,
    random_augmented_covariance,
    real_composite_rate,
    to_real_composite,
)
from .matrix_core import (
    block_expansion_identity,
    check_sylvester_identity,
    det_cofactor,
    random_complex,
    random_hermitian,
    random_pd,
    symmetric_block_permute,
)
from .models import AugmentedCovariance, PartitionSpec, PropertyReport, PropertyResult
from .secrecy_rates import (
    conditional_entropy_gap,
    degraded_dominance,
    fischer_like,
    general_rate,
    noise_covariance,
    proper_minmax_objective,
    proper_rate,
    random_channel,
    random_degraded_channel,
    random_noise_correlation,
    udl_factors,
    udl_inverse,
)
from .solvers import noise_gradient, rate_gradient_general, rate_gradient_proper

log = logging.getLogger(__name__)

SCOPES = ("all", "identities", "fischer", "dominance", "gradients")
# older scope names kept for existing scripts
SCOPE_ALIASES = {"lemma1": "fischer", "theorem2": "dominance"}
DEFAULT_INSTANCES = {"identities": 100, "fischer": 1000, "dominance": 500, "gradients": 50}

FD_STEP = 1e-6
FD_REL_TOL = 1e-5


def _rel(a: complex, b: complex) -> float:
    return float(abs(a - b) / max(1.0, abs(b)))


# ---------- identities ----------

def _identities(rng: np.random.Generator, n: int, progress: bool) -> Iterable[PropertyResult]:
    res = {name: PropertyResult("identities", name) for name in (
        "sylvester", "block_expansion", "permutation_det", "permutation_inverse",
        "udl_inverse", "udl_factors", "m_unitarity", "composite_channel", "composite_rate",
    )}
    for _ in tqdm(range(n), desc="identities", disable=not progress):
        m, k = (int(x) for x in rng.integers(1, 5, size=2))
        A, B = random_complex(rng, m, k), random_complex(rng, k, m)
        lhs, rhs = check_sylvester_identity(A, B)
        gap = _rel(lhs, rhs)
        res["sylvester"].record(gap <= 1e-9, gap)

        C = random_hermitian(rng, k)
        lhs_m, rhs_m = block_expansion_identity(random_complex(rng, m, k), random_complex(rng, int(rng.integers(1, 4)), k), C)
        gap = float(np.max(np.abs(lhs_m - rhs_m)))
        res["block_expansion"].record(gap <= 1e-10, gap)

        dim = int(rng.integers(4, 6))
        part = PartitionSpec.random(rng, dim)
        M = random_pd(rng, dim)
        P = symmetric_block_permute(M, part)
        gap = _rel(det_cofactor(P), det_cofactor(M))
        res["permutation_det"].record(gap <= 1e-9, gap)
        gap = float(np.max(np.abs(symmetric_block_permute(P, part.swapped()) - M)))
        res["permutation_inverse"].record(gap == 0.0, gap)

        n_r, n_e = (int(x) for x in rng.integers(1, 4, size=2))
        nc = random_noise_correlation(rng, n_r, n_e, pseudo=bool(rng.integers(0, 2)))
        Q = noise_covariance(nc)
        gap = float(np.max(np.abs(Q @ udl_inverse(nc) - np.eye(Q.shape[0]))))
        res["udl_inverse"].record(gap <= 1e-10, gap)
        U, D, L = udl_factors(nc)
        gap = float(np.max(np.abs(U @ D @ L - Q)))
        res["udl_factors"].record(gap <= 1e-12, gap)

        M2 = m_matrix(k)
        gap = float(np.max(np.abs(M2 @ M2.conj().T - 2 * np.eye(2 * k))))
        res["m_unitarity"].record(gap <= 1e-14, gap)

        ch = random_channel(rng, k, m, int(rng.integers(1, 4)))
        gap = float(np.max(np.abs(composite_from_augmented(ch.H_r) - to_real_composite(ch).H_r)))
        res["composite_channel"].record(gap <= 1e-12, gap)
        aug = random_augmented_covariance(rng, ch.n_t, power=float(rng.uniform(0.5, 5.0)))
        gap = abs(general_rate(ch, aug).value - real_composite_rate(ch, aug))
        res["composite_rate"].record(gap <= 1e-9, gap)
    return res.values()


# ---------- Fischer-like inequality ----------

def _block_diagonal_pd(rng: np.random.Generator, part: PartitionSpec) -> np.ndarray:
    s1, s2, s3, s4 = part.blocks()
    K = np.zeros((part.k, part.k), dtype=complex)
    left, right = np.concatenate([s1, s2]), np.concatenate([s3, s4])
    K[np.ix_(left, left)] = random_pd(rng, left.size)
    K[np.ix_(right, right)] = random_pd(rng, right.size)
    return K


def _fischer(rng: np.random.Generator, n: int, progress: bool, inject_fault: bool) -> Iterable[PropertyResult]:
    holds = PropertyResult("fischer", "inequality_holds")
    entropy = PropertyResult("fischer", "entropy_cross_check")
    equality = PropertyResult("fischer", "block_diagonal_equality")
    strict = PropertyResult("fischer", "strict_when_coupled")
    for _ in tqdm(range(n), desc="fischer", disable=not progress):
        k = int(rng.integers(4, 9))
        part = PartitionSpec.random(rng, k)
        K = random_pd(rng, k)
        rep = fischer_like(K, part)
        ok = rep.holds != inject_fault
        holds.record(ok, max(0.0, -rep.equality_gap))

        gap = abs(rep.equality_gap - conditional_entropy_gap(K, part))
        entropy.record(gap <= 1e-9, gap)

        if rep.cross_block_norm >= 0.1:
            strict.record(rep.equality_gap > 0.0, max(0.0, -rep.equality_gap))

        diag = fischer_like(_block_diagonal_pd(rng, part), part)
        equality.record(abs(diag.equality_gap) <= 1e-9, abs(diag.equality_gap))
    return holds, entropy, equality, strict


# ---------- dominance on degraded channels ----------

def _dominance(rng: np.random.Generator, n: int, progress: bool) -> Iterable[PropertyResult]:
    dom = PropertyResult("dominance", "proper_dominates")
    for _ in tqdm(range(n), desc="dominance", disable=not progress):
        n_t, n_e = (int(x) for x in rng.integers(1, 4, size=2))
        ch = random_degraded_channel(rng, n_t, n_e)
        aug = random_augmented_covariance(rng, n_t, power=float(rng.uniform(0.1, 10.0)))
        general, proper = degraded_dominance(ch, aug)
        excess = general.value - proper.value
        dom.record(excess <= 1e-9, max(0.0, excess))
    return (dom,)


# ---------- gradients ----------

def _central_difference(f: Callable[[float], float]) -> float:
    return (f(FD_STEP) - f(-FD_STEP)) / (2 * FD_STEP)


def _gradients(rng: np.random.Generator, n: int, progress: bool) -> Iterable[PropertyResult]:
    proper = PropertyResult("gradients", "proper_rate")
    general = PropertyResult("gradients", "general_rate")
    noise = PropertyResult("gradients", "minmax_noise")
    for _ in tqdm(range(n), desc="gradients", disable=not progress):
        n_t, n_r, n_e = (int(x) for x in rng.integers(1, 5, size=3))
        ch = random_channel(rng, n_t, n_r, n_e)

        K = random_pd(rng, n_t)
        E = random_hermitian(rng, n_t)
        fd = _central_difference(lambda h: proper_rate(ch, K + h * E).value)
        an = float(np.vdot(rate_gradient_proper(ch, K), E).real)
        gap = _rel(fd, an)
        proper.record(gap <= FD_REL_TOL, gap)

        aug = random_augmented_covariance(rng, n_t, power=float(rng.uniform(0.5, 3.0)))
        E_t = random_complex(rng, n_t, n_t)
        E_aug = assemble_augmented(E, (E_t + E_t.T) / 2)

        def general_at(h: float) -> float:
            X = aug.matrix + h * E_aug
            return general_rate(ch, AugmentedCovariance(X[:n_t, :n_t], X[:n_t, n_t:])).value

        fd = _central_difference(general_at)
        an = float(np.vdot(rate_gradient_general(ch, aug), E_aug).real)
        gap = _rel(fd, an)
        general.record(gap <= FD_REL_TOL, gap)

        A = random_noise_correlation(rng, n_r, n_e, radius=0.8).A
        dA = random_complex(rng, n_r, n_e)
        fd = _central_difference(lambda h: proper_minmax_objective(ch, A + h * dA, K).value)
        an = float(np.vdot(noise_gradient(ch.H_r, ch.H_e, A, K), dA).real)
        gap = _rel(fd, an)
        noise.record(gap <= FD_REL_TOL, gap)
    return proper, general, noise


def check_properties(
    scope: str = "all",
    instances: Optional[int] = None,
    seed: int = 0,
    inject_fault: bool = False,
    progress: bool = True,
) -> PropertyReport:
    """Run the selected suites. `instances` overrides every suite's default count."""
    scope = SCOPE_ALIASES.get(scope, scope)
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}; choose from {', '.join(SCOPES)}")
    rng = make_generator(seed)
    count: Dict[str, int] = {s: instances or d for s, d in DEFAULT_INSTANCES.items()}
    wanted = DEFAULT_INSTANCES if scope == "all" else (scope,)

    report = PropertyReport()
    for suite in wanted:
        if suite == "identities":
            results = _identities(rng, count[suite], progress)
        elif suite == "fischer":
            results = _fischer(rng, count[suite], progress, inject_fault)
        elif suite == "dominance":
            results = _dominance(rng, count[suite], progress)
        else:
            results = _gradients(rng, count[suite], progress)
        report.results.extend(results)

    for r in report.results:
        if r.failed:
            log.warning("%s/%s: %d of %d instances violated (worst gap %.3e)", r.suite, r.name, r.failed, r.total, r.worst_gap)
    return report


def format_properties(report: PropertyReport) -> str:
    lines = [f"{'suite':<11} {'property':<26} {'passed':>12}  worst gap"]
    for r in report.results:
        lines.append(f"{r.suite:<11} {r.name:<26} {r.passed:>5}/{r.total:<6}  {r.worst_gap:.3e}")
    lines.append(f"Violations: {report.violations}  Verdict: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines)
