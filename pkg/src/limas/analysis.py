"""Consensusability analysis for linear interconnected multi-agent systems.

An interconnected multi-agent plant couples N identical linear agents in
two ways at once: physically (neighbor states leak into each agent's
dynamics through a coupling matrix and a physical graph) and cybernetically
(a shared static feedback gain acts on communicated state differences).
This module decides whether one common gain can drive all agents to
consensus, and synthesizes that gain when its sufficient condition holds:

* assumption checks (commuting Laplacians, per-mode controllability,
  proportional physical coupling),
* a sufficient condition comparing the spread of per-mode gain targets
  against a critical Riccati margin, with gain synthesis through a
  modified Riccati fixed point,
* a necessary (refutation) condition built from per-mode determinants,
* sharper interval conditions for scalar agent dynamics,
* direct per-mode spectral-radius verification of any candidate gain.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    AssumptionViolated,
    Divergence,
    EmptyRange,
    NotCommuting,
    DegenerateSpectrum,
    NotControllable,
    SynthesisFailed,
)
from .graphs import (
    COMMUTE_RTOL,
    GROUP_RTOL,
    SpectralPair,
    WeightedGraph,
    commute_check,
    is_connected,
    laplacian,
    simultaneous_diagonalize,
)
from .linalg import (
    RANK_RTOL,
    as_matrix,
    as_square,
    controllability_margin,
    determinant,
    eig_general,
    eig_sym,
    gain_kernel,
    is_controllable,
    spectral_radius,
)

MARE_Q_SCALE = 1e-6
MARE_MAX_ITER = 100_000
MARE_CONVERGENCE_RTOL = 1e-10
MARE_DIVERGENCE_NORM = 1e12
# Below this, the smallest communication mode counts as a disconnected graph.
CONNECTIVITY_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class LimasModel:
    """A fully specified interconnected multi-agent plant.

    ``A`` (n x n) is the common agent state matrix, ``Ap`` (n x n) the
    physical coupling matrix, ``B`` (n x 1) the scalar-input matrix, and
    ``gp``/``gc`` the physical and communication graphs on N nodes. Pass
    ``alpha`` instead of (or along with) ``Ap`` to declare proportional
    coupling Ap = alpha * A; when both are given they must agree.
    """

    n: int
    N: int
    A: np.ndarray
    Ap: np.ndarray
    B: np.ndarray
    gp: WeightedGraph
    gc: WeightedGraph
    alpha: float | None

    def __init__(self, A, B, gp: WeightedGraph, gc: WeightedGraph,
                 Ap=None, alpha: float | None = None):
        A = as_matrix(A, name="A")
        n = A.shape[0]
        A = as_matrix(A, rows=n, cols=n, name="A")
        B = as_matrix(B, rows=n, cols=1, name="B")
        if Ap is None and alpha is None:
            raise ValueError("provide Ap, alpha, or both")
        if Ap is None:
            Ap = alpha * A
        Ap = as_matrix(Ap, rows=n, cols=n, name="Ap")
        if alpha is not None:
            drift = float(np.linalg.norm(Ap - alpha * A))
            if drift > 1e-9 * max(1.0, float(np.linalg.norm(A))):
                raise ValueError(
                    f"Ap and alpha disagree: ||Ap - alpha*A|| = {drift:g}")
        if not isinstance(gp, WeightedGraph) or not isinstance(gc, WeightedGraph):
            raise ValueError("gp and gc must be WeightedGraph instances")
        if gp.node_count != gc.node_count:
            raise ValueError("physical and communication graphs disagree on node count")
        if not is_connected(gc):
            raise ValueError("communication graph must be connected")
        # own copies, frozen, so the model never aliases caller arrays
        A, Ap, B = A.copy(), Ap.copy(), B.copy()
        for arr in (A, Ap, B):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "N", gp.node_count)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Ap", Ap)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "gp", gp)
        object.__setattr__(self, "gc", gc)
        object.__setattr__(self, "alpha", None if alpha is None else float(alpha))

    @cached_property
    def laplacian_p(self) -> np.ndarray:
        return laplacian(self.gp)

    @cached_property
    def laplacian_c(self) -> np.ndarray:
        return laplacian(self.gc)

    def spectral_pair(self, group_rtol: float = GROUP_RTOL,
                      commute_rtol: float = COMMUTE_RTOL) -> SpectralPair:
        return simultaneous_diagonalize(self.laplacian_p, self.laplacian_c,
                                        group_rtol=group_rtol,
                                        commute_rtol=commute_rtol)


@dataclass(frozen=True)
class AssumptionCheck:
    holds: bool
    residual: float
    detail: str = ""


def check_laplacians_commute(model: LimasModel,
                             rtol: float = COMMUTE_RTOL) -> AssumptionCheck:
    """Do the two graph Laplacians commute? Residual is the commutator norm."""
    ok, residual = commute_check(model.laplacian_p, model.laplacian_c, rtol=rtol)
    return AssumptionCheck(ok, residual)


def check_modal_controllability(model: LimasModel,
                                rank_rtol: float = RANK_RTOL) -> AssumptionCheck:
    """Is (A - lambda*Ap, B) controllable for every non-consensus mode lambda?

    The mode eigenvalues are the physical Laplacian spectrum with one zero
    removed; pairing with communication modes is irrelevant here. The
    residual is the smallest controllability-matrix singular value seen.
    """
    modes = eig_sym(model.laplacian_p).values[1:]
    margin = np.inf
    failures = []
    for lam in modes:
        M = model.A - lam * model.Ap
        margin = min(margin, controllability_margin(M, model.B))
        if not is_controllable(M, model.B, rank_rtol=rank_rtol):
            failures.append(float(lam))
    if failures:
        return AssumptionCheck(False, float(margin),
                               f"uncontrollable at physical modes {failures}")
    return AssumptionCheck(True, float(margin))


def check_proportional_coupling(model: LimasModel) -> tuple[AssumptionCheck, float | None]:
    """Is Ap proportional to A? Returns the check and the ratio used.

    A declared ratio is taken as-is; otherwise the best Frobenius fit
    <Ap, A> / <A, A> is tried. The residual is ||Ap - alpha*A||_F.
    """
    if model.alpha is not None:
        alpha = model.alpha
    else:
        denom = float(np.sum(model.A * model.A))
        alpha = float(np.sum(model.Ap * model.A)) / denom if denom > 0.0 else 0.0
    residual = float(np.linalg.norm(model.Ap - alpha * model.A))
    holds = residual <= 1e-9 * max(1.0, float(np.linalg.norm(model.A)))
    return AssumptionCheck(holds, residual), (alpha if holds else None)


@dataclass(frozen=True)
class AlphaSpectrum:
    """Per-mode coupling factors 1 - alpha*lambda for the non-consensus modes."""

    alpha_i: np.ndarray
    alpha_min: float
    alpha_max: float


def alpha_spectrum(alpha: float, lambda_p) -> AlphaSpectrum:
    """Coupling factors for the given physical modes (consensus mode excluded)."""
    modes = np.asarray(lambda_p, dtype=float).ravel()
    if modes.size == 0:
        raise EmptyRange("no physical modes supplied")
    alpha_i = 1.0 - alpha * modes
    mags = np.abs(alpha_i)
    return AlphaSpectrum(alpha_i, float(mags.min()), float(mags.max()))


def sigma_critical(A, alpha_max: float) -> float:
    """Critical Riccati margin for the scaled state matrix alpha_max * A.

    Zero when alpha_max * A is Schur stable; otherwise one minus the inverse
    squared product of its eigenvalues on or outside the unit circle.
    """
    values = eig_general(alpha_max * as_square(A, name="A"))
    mags = np.abs(values)
    if float(mags.max()) < 1.0:
        return 0.0
    product = float(np.prod(mags[mags >= 1.0]))
    return 1.0 - 1.0 / (product * product)


@dataclass(frozen=True)
class SufficientResult:
    """Outcome of the sufficient consensusability test.

    ``holds`` compares the squared half-spread of the gain targets
    alpha_i / lambda_cj (``lhs``) against the admissible margin ``rhs``.
    ``k_star`` is the midpoint gain scale and ``sigma_modes`` the per-mode
    Riccati margins it achieves under positional mode pairing.
    """

    holds: bool
    k_star: float
    lhs: float
    rhs: float
    sigma_c: float
    alpha: AlphaSpectrum
    sigma_modes: np.ndarray


def sufficient_check(model: LimasModel, spec: SpectralPair,
                     rank_rtol: float = RANK_RTOL,
                     commute_rtol: float = COMMUTE_RTOL) -> SufficientResult:
    """Evaluate the sufficient condition and the midpoint gain scale.

    Requires commuting Laplacians, per-mode controllability and
    proportional coupling; raises AssumptionViolated otherwise. The
    extremes of alpha_i / lambda_cj range over modes i and j independently,
    while the reported sigma_modes pair modes positionally.
    """
    a1 = check_laplacians_commute(model, rtol=commute_rtol)
    if not a1.holds:
        raise AssumptionViolated(1, f"commutator residual {a1.residual:g}")
    a2 = check_modal_controllability(model, rank_rtol=rank_rtol)
    if not a2.holds:
        raise AssumptionViolated(2, a2.detail)
    a3, alpha = check_proportional_coupling(model)
    if not a3.holds:
        raise AssumptionViolated(3, f"coupling residual {a3.residual:g}")

    lam_c = np.asarray(spec.lambda_c[1:], dtype=float)
    if float(lam_c.min()) <= CONNECTIVITY_FLOOR:
        raise AssumptionViolated(0, "communication graph effectively disconnected")
    asp = alpha_spectrum(alpha, spec.lambda_p[1:])

    if asp.alpha_max == 0.0:
        # Every mode matrix collapses to lambda_c * B K, so K = 0 certifies.
        return SufficientResult(True, 0.0, 0.0, 0.0, 0.0, asp,
                                np.zeros_like(lam_c))

    sc = sigma_critical(model.A, asp.alpha_max)
    ratios = asp.alpha_i[:, None] / lam_c[None, :]
    lo, hi = float(ratios.min()), float(ratios.max())
    lhs = ((hi - lo) / 2.0) ** 2
    rhs = (asp.alpha_min ** 2 - asp.alpha_max ** 2 * sc) / float(lam_c.max()) ** 2
    k_star = (lo + hi) / 2.0
    sigma_modes = (2.0 * asp.alpha_i * lam_c * k_star
                   - lam_c ** 2 * k_star ** 2) / asp.alpha_max ** 2
    return SufficientResult(lhs < rhs, k_star, lhs, rhs, sc, asp, sigma_modes)


@dataclass(frozen=True)
class MareSolution:
    """Fixed point of the modified Riccati recursion and how it was reached."""

    P: np.ndarray
    sigma: float
    iterations: int
    residual: float


def solve_mare(Abar, B, sigma: float, Q=None,
               max_iter: int = MARE_MAX_ITER,
               rank_rtol: float = RANK_RTOL) -> MareSolution:
    """Solve P = Abar'P Abar - sigma * Abar'PB (B'PB)^-1 B'P Abar + Q.

    Plain fixed-point iteration from P = I, stopping when successive
    iterates agree to 1e-10 relative. The recursion converges exactly when
    sigma exceeds the critical margin of Abar, so divergence (norm blow-up
    or iteration cap) is reported as such rather than patched over.
    """
    Abar = as_square(Abar, name="Abar")
    n = Abar.shape[0]
    B = as_matrix(B, rows=n, cols=1, name="B")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    if not is_controllable(Abar, B, rank_rtol=rank_rtol):
        raise NotControllable("(Abar, B) fails the controllability rank test")
    Q = MARE_Q_SCALE * np.eye(n) if Q is None else as_matrix(Q, rows=n, cols=n, name="Q")

    P = np.eye(n)
    for iteration in range(1, max_iter + 1):
        PB = P @ B
        gain_dir = Abar.T @ PB
        P_next = Abar.T @ P @ Abar \
            - sigma * (gain_dir @ gain_dir.T) / float((B.T @ PB).item()) + Q
        P_next = (P_next + P_next.T) / 2.0
        if float(np.linalg.norm(P_next)) > MARE_DIVERGENCE_NORM:
            raise Divergence(
                f"iterate norm exceeded {MARE_DIVERGENCE_NORM:g} at step "
                f"{iteration} (sigma = {sigma:g} is at or below critical)",
                iterations=iteration)
        diff = float(np.linalg.norm(P_next - P))
        if diff <= MARE_CONVERGENCE_RTOL * float(np.linalg.norm(P)):
            return MareSolution(P_next, sigma, iteration, diff)
        P = P_next
    raise Divergence(
        f"no fixed point within {max_iter} iterations (sigma = {sigma:g})",
        iterations=max_iter)


def mare_inequality_margin(Abar, B, sigma: float, P) -> float:
    """Largest eigenvalue of Abar'P Abar - sigma*Abar'PB(B'PB)^-1 B'P Abar - P.

    Negative means P strictly satisfies the Riccati inequality at this sigma.
    """
    Abar = as_square(Abar, name="Abar")
    P = as_square(P, name="P")
    B = as_matrix(B, rows=Abar.shape[0], cols=1, name="B")
    PB = P @ B
    gain_dir = Abar.T @ PB
    residual = Abar.T @ P @ Abar \
        - sigma * (gain_dir @ gain_dir.T) / float((B.T @ PB).item()) - P
    return float(eig_sym((residual + residual.T) / 2.0).values[-1])


def modal_radii(model: LimasModel, spec: SpectralPair, K) -> np.ndarray:
    """Spectral radius of every non-consensus mode A - lp*Ap + lc*BK.

    Valid only with the positional mode pairing of a SpectralPair, i.e.
    under commuting Laplacians. All radii below one certifies consensus.
    """
    K = as_matrix(K, rows=1, cols=model.n, name="K")
    BK = model.B @ K
    return np.array([
        spectral_radius(model.A - lp * model.Ap + lc * BK)
        for lp, lc in zip(spec.lambda_p[1:], spec.lambda_c[1:])
    ])


@dataclass(frozen=True)
class SynthesisResult:
    """A synthesized gain with the diagnostics that produced and verified it."""

    K: np.ndarray
    k_star: float
    sigma: float
    mare: MareSolution | None
    modal_radii: np.ndarray


def synthesize_gain(model: LimasModel, spec: SpectralPair,
                    sufficient: SufficientResult | None = None,
                    mare_q: float = MARE_Q_SCALE,
                    mare_max_iter: int = MARE_MAX_ITER,
                    rank_rtol: float = RANK_RTOL,
                    commute_rtol: float = COMMUTE_RTOL) -> SynthesisResult:
    """Synthesize the common feedback gain under the sufficient condition.

    Solves the modified Riccati recursion for the worst-case scaled state
    matrix at the smallest per-mode margin achieved by the midpoint gain
    scale, forms K = -k* (B'PB)^-1 B'PA, and verifies every modal radius.
    A gain that leaves any mode unstable is reported as SynthesisFailed,
    never returned silently.
    """
    if sufficient is None:
        sufficient = sufficient_check(model, spec, rank_rtol=rank_rtol,
                                      commute_rtol=commute_rtol)
    if not sufficient.holds:
        raise SynthesisFailed("sufficient condition does not hold")

    if sufficient.alpha.alpha_max == 0.0:
        K = np.zeros((1, model.n))
        radii = modal_radii(model, spec, K)
        return SynthesisResult(K, 0.0, 0.0, None, radii)

    sigma = min(float(np.min(sufficient.sigma_modes)), 1.0)
    # sigma = sigma_c = 0 is the plain Lyapunov recursion for a stable
    # scaled state matrix and converges; anything else at or below the
    # critical margin cannot.
    if sigma < 0.0 or (sigma <= sufficient.sigma_c and sufficient.sigma_c > 0.0):
        raise SynthesisFailed(
            f"worst mode margin {sigma:g} does not exceed critical "
            f"{sufficient.sigma_c:g}")
    mare = solve_mare(sufficient.alpha.alpha_max * model.A, model.B, sigma,
                      Q=mare_q * np.eye(model.n), max_iter=mare_max_iter,
                      rank_rtol=rank_rtol)
    K = -sufficient.k_star * gain_kernel(mare.P, model.B, model.A)
    radii = modal_radii(model, spec, K)
    if float(radii.max()) >= 1.0:
        raise SynthesisFailed(
            f"synthesized gain leaves a modal radius at {float(radii.max()):g}")
    return SynthesisResult(K, sufficient.k_star, sigma, mare, radii)


@dataclass(frozen=True)
class NecessaryResult:
    """Outcome of the necessary (refutation) condition.

    ``holds=False`` certifies that no common static gain can reach
    consensus. ``lhs`` is |gamma_c * det_min - det_max| and ``rhs`` is
    gamma_c + 1.
    """

    holds: bool
    gamma_c: float
    det_min: float
    det_max: float
    lhs: float
    rhs: float
    dets: tuple[float, ...]


def necessary_check(model: LimasModel, spec: SpectralPair,
                    rank_rtol: float = RANK_RTOL,
                    commute_rtol: float = COMMUTE_RTOL) -> NecessaryResult:
    """Evaluate the determinant-based necessary condition.

    Requires commuting Laplacians and per-mode controllability, but not
    proportional coupling. gamma_c is the communication eigenratio
    lambda_c_max / lambda_c_min over non-consensus modes.
    """
    a1 = check_laplacians_commute(model, rtol=commute_rtol)
    if not a1.holds:
        raise AssumptionViolated(1, f"commutator residual {a1.residual:g}")
    a2 = check_modal_controllability(model, rank_rtol=rank_rtol)
    if not a2.holds:
        raise AssumptionViolated(2, a2.detail)

    lam_c = np.asarray(spec.lambda_c[1:], dtype=float)
    if float(lam_c.min()) <= CONNECTIVITY_FLOOR:
        raise AssumptionViolated(0, "communication graph effectively disconnected")
    gamma_c = float(lam_c.max()) / float(lam_c.min())
    dets = tuple(abs(determinant(model.A - lp * model.Ap))
                 for lp in spec.lambda_p[1:])
    det_min, det_max = min(dets), max(dets)
    lhs = abs(gamma_c * det_min - det_max)
    rhs = gamma_c + 1.0
    return NecessaryResult(lhs < rhs, gamma_c, det_min, det_max, lhs, rhs, dets)


@dataclass(frozen=True)
class ScalarResult:
    """Interval conditions for scalar (n = 1) agent dynamics.

    ``c1``/``c2`` are the positive- and negative-gain sufficient conditions;
    ``k_plus``/``k_minus`` the corresponding open gain intervals (endpoints
    reported even when empty). ``necessary`` is the scalar refutation test;
    when it is False, no gain works at all.
    """

    c1: bool
    c2: bool
    k_plus: tuple[float, float]
    k_minus: tuple[float, float]
    k_recommended: float | None
    necessary: bool
    gamma_c: float
    delta_p: float


def scalar_check(a: float, lambda_p, lambda_c) -> ScalarResult:
    """Evaluate the scalar consensusability conditions.

    ``lambda_p`` and ``lambda_c`` are the non-consensus mode eigenvalues of
    the physical and communication Laplacians (one structural zero already
    removed from each). No commuting assumption is needed; only spectral
    extremes enter.
    """
    lp = np.asarray(lambda_p, dtype=float).ravel()
    lc = np.asarray(lambda_c, dtype=float).ravel()
    if lp.size == 0 or lc.size == 0:
        raise EmptyRange("scalar conditions need at least one mode per graph")
    if float(lc.min()) <= 0.0:
        raise ValueError("communication modes must be strictly positive")
    a = float(a)
    lp_min, lp_max = float(lp.min()), float(lp.max())
    lc_min, lc_max = float(lc.min()), float(lc.max())
    gamma_c = lc_max / lc_min
    delta_p = lp_max - lp_min

    c1 = (lp_min > a - 1.0) and \
        ((gamma_c - 1.0) * (1.0 - a + lp_min) < gamma_c * (2.0 - delta_p))
    c2 = (lp_max < 1.0 + a) and \
        ((gamma_c - 1.0) * (-1.0 - a + lp_max) > gamma_c * (delta_p - 2.0))

    k_plus = ((-1.0 - a + lp_max) / lc_min, (1.0 - a + lp_min) / lc_max)
    k_minus = ((-1.0 - a + lp_max) / lc_max, (1.0 - a + lp_min) / lc_min)

    k_recommended = None
    if c1:
        k_recommended = (max(k_plus[0], 0.0) + k_plus[1]) / 2.0
    elif c2:
        k_recommended = (k_minus[0] + min(k_minus[1], 0.0)) / 2.0

    dists = np.abs(a - lp)
    necessary = abs(gamma_c * float(dists.min()) - float(dists.max())) < gamma_c + 1.0
    return ScalarResult(c1, c2, k_plus, k_minus, k_recommended, necessary,
                        gamma_c, delta_p)


@dataclass
class AnalysisReport:
    """Everything a consensusability run decided, plus the raw numbers.

    ``consensusable_certified`` is True only when a gain was produced and
    every verified deviation-mode radius is strictly below one.
    ``verdict`` is "consensusable", "not-consensusable" (necessary
    condition refuted) or "inconclusive".
    """

    n: int
    N: int
    alpha: float | None
    lambda_p: list[float]
    lambda_c: list[float]
    assumption_commuting: AssumptionCheck
    assumption_controllability: AssumptionCheck
    assumption_coupling: AssumptionCheck
    lambda_p_paired: list[float] | None = None
    lambda_c_paired: list[float] | None = None
    sufficient: SufficientResult | None = None
    sufficient_error: str | None = None
    necessary: NecessaryResult | None = None
    necessary_error: str | None = None
    scalar: ScalarResult | None = None
    gain: list[float] | None = None
    gain_source: str | None = None
    synthesis_error: str | None = None
    mare_sigma: float | None = None
    mare_iterations: int | None = None
    modal_radii: list[float] | None = None
    certificate_method: str | None = None
    certified_radius: float | None = None
    consensusable_certified: bool = False
    verdict: str = "inconclusive"

    def certify(self, method: str, max_radius: float) -> None:
        """Record a verified stability certificate for the reported gain."""
        self.certificate_method = method
        self.certified_radius = float(max_radius)
        self.consensusable_certified = max_radius < 1.0
        if self.consensusable_certified:
            self.verdict = "consensusable"

    def to_dict(self) -> dict:
        def check(c: AssumptionCheck) -> dict:
            d = {"holds": c.holds, "residual": c.residual}
            if c.detail:
                d["detail"] = c.detail
            return d

        out: dict = {
            "model": {"n": self.n, "N": self.N, "alpha": self.alpha},
            "spectra": {
                "lambda_p": self.lambda_p,
                "lambda_c": self.lambda_c,
                "lambda_p_paired": self.lambda_p_paired,
                "lambda_c_paired": self.lambda_c_paired,
            },
            "assumptions": {
                "commuting_laplacians": check(self.assumption_commuting),
                "modal_controllability": check(self.assumption_controllability),
                "proportional_coupling": check(self.assumption_coupling),
            },
        }
        if self.sufficient is not None:
            s = self.sufficient
            out["sufficient"] = {
                "holds": s.holds, "lhs": s.lhs, "rhs": s.rhs,
                "sigma_c": s.sigma_c, "k_star": s.k_star,
                "alpha_min": s.alpha.alpha_min, "alpha_max": s.alpha.alpha_max,
                "sigma_modes": [float(v) for v in s.sigma_modes],
            }
        else:
            out["sufficient"] = {"error": self.sufficient_error}
        if self.necessary is not None:
            c = self.necessary
            out["necessary"] = {
                "holds": c.holds, "gamma_c": c.gamma_c,
                "det_min": c.det_min, "det_max": c.det_max,
                "lhs": c.lhs, "rhs": c.rhs,
            }
        else:
            out["necessary"] = {"error": self.necessary_error}
        if self.scalar is not None:
            sc = self.scalar
            out["scalar"] = {
                "c1": sc.c1, "c2": sc.c2,
                "k_plus": list(sc.k_plus), "k_minus": list(sc.k_minus),
                "k_recommended": sc.k_recommended,
                "necessary": sc.necessary,
                "gamma_c": sc.gamma_c, "delta_p": sc.delta_p,
            }
        else:
            out["scalar"] = None
        if self.gain is not None:
            out["gain"] = {"K": self.gain, "source": self.gain_source,
                           "sigma": self.mare_sigma,
                           "mare_iterations": self.mare_iterations}
        else:
            out["gain"] = {"error": self.synthesis_error} if self.synthesis_error else None
        out["modal_radii"] = self.modal_radii
        if self.certificate_method is not None:
            out["certificate"] = {"method": self.certificate_method,
                                  "max_radius": self.certified_radius}
        else:
            out["certificate"] = None
        out["consensusable_certified"] = self.consensusable_certified
        out["verdict"] = self.verdict
        return out


def analyze(model: LimasModel,
            commute_rtol: float = COMMUTE_RTOL,
            group_rtol: float = GROUP_RTOL,
            rank_rtol: float = RANK_RTOL,
            mare_q: float = MARE_Q_SCALE,
            mare_max_iter: int = MARE_MAX_ITER) -> AnalysisReport:
    """Run the full consensusability workflow on one model.

    Assumption checks always run. The sufficient and necessary conditions
    run when their assumptions hold; failures are recorded in the report
    instead of raised. Scalar models additionally get the interval
    conditions, which need no commuting assumption. Any produced gain is
    verified mode by mode before the report claims consensusability.
    """
    lambda_p = eig_sym(model.laplacian_p).values
    lambda_c = eig_sym(model.laplacian_c).values

    a1 = check_laplacians_commute(model, rtol=commute_rtol)
    a2 = check_modal_controllability(model, rank_rtol=rank_rtol)
    a3, alpha_eff = check_proportional_coupling(model)

    report = AnalysisReport(
        n=model.n, N=model.N,
        alpha=alpha_eff if alpha_eff is not None else model.alpha,
        lambda_p=[float(v) for v in lambda_p],
        lambda_c=[float(v) for v in lambda_c],
        assumption_commuting=a1,
        assumption_controllability=a2,
        assumption_coupling=a3,
    )

    spec = None
    if a1.holds:
        try:
            spec = model.spectral_pair(group_rtol=group_rtol, commute_rtol=commute_rtol)
            report.lambda_p_paired = [float(v) for v in spec.lambda_p]
            report.lambda_c_paired = [float(v) for v in spec.lambda_c]
        except (NotCommuting, DegenerateSpectrum) as exc:
            report.sufficient_error = str(exc)
            report.necessary_error = str(exc)
    else:
        reason = f"Laplacians do not commute (residual {a1.residual:g})"
        report.sufficient_error = reason
        report.necessary_error = reason

    if spec is not None:
        try:
            report.sufficient = sufficient_check(model, spec,
                                                 rank_rtol=rank_rtol,
                                                 commute_rtol=commute_rtol)
        except AssumptionViolated as exc:
            report.sufficient_error = str(exc)
        try:
            report.necessary = necessary_check(model, spec,
                                               rank_rtol=rank_rtol,
                                               commute_rtol=commute_rtol)
        except AssumptionViolated as exc:
            report.necessary_error = str(exc)

    b_scalar = float(model.B.item()) if model.n == 1 else None
    if model.n == 1 and b_scalar != 0.0:
        # Scalar normal form: coupling strength folds into the physical
        # modes and b into the gain, leaving a unit input coefficient.
        ap = float(model.Ap.item())
        try:
            report.scalar = scalar_check(float(model.A.item()),
                                         ap * lambda_p[1:], lambda_c[1:])
        except (EmptyRange, ValueError) as exc:
            report.synthesis_error = report.synthesis_error or str(exc)

    if spec is not None and report.sufficient is not None and report.sufficient.holds:
        try:
            synth = synthesize_gain(model, spec, sufficient=report.sufficient,
                                    mare_q=mare_q, mare_max_iter=mare_max_iter,
                                    rank_rtol=rank_rtol, commute_rtol=commute_rtol)
            report.gain = [float(v) for v in synth.K.ravel()]
            report.gain_source = "riccati"
            report.mare_sigma = synth.sigma
            if synth.mare is not None:
                report.mare_iterations = synth.mare.iterations
            report.modal_radii = [float(v) for v in synth.modal_radii]
            report.certify("modal-radii", float(synth.modal_radii.max()))
        except (SynthesisFailed, Divergence, NotControllable) as exc:
            report.synthesis_error = str(exc)

    if report.gain is None and report.scalar is not None \
            and report.scalar.k_recommended is not None:
        report.gain = [report.scalar.k_recommended / b_scalar]
        report.gain_source = "scalar-interval"
        if spec is not None:
            radii = modal_radii(model, spec, [report.gain])
            report.modal_radii = [float(v) for v in radii]
            report.certify("modal-radii", float(radii.max()))

    refuted = (report.necessary is not None and not report.necessary.holds) \
        or (report.scalar is not None and not report.scalar.necessary)
    if not report.consensusable_certified and refuted:
        report.verdict = "not-consensusable"
    return report
