"""Regime classification: map (graph, parameters) to long-term behaviour.

Each decision cites the governing limit theorem by tag (see README for the
tag table) together with the inequality that fired.  Parameter regions with
no covering theorem are reported as Unknown rather than guessed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graphs import Graph, GraphError, StructureReport, analyze
from .model import ModelParams

__all__ = [
    "RegimeReport",
    "ExcludedCaseError",
    "classify",
    "predicted_rates",
    "REGIMES",
    "FINE_STRUCTURES",
]

REGIMES = ("Ergodic", "NonErgodic", "Transient", "Explosive", "NotExplosive", "Unknown")
FINE_STRUCTURES = ("SingleVertexExplosion", "AdjacentPairExplosion", "SimultaneousExplosion")

#: Relative half-width of the band treated as exact criticality.
_BOUNDARY_RTOL = 1e-12

_DENOMINATOR_NOTE = (
    "star growth rates use denominator 2*n*beta + (n+1)*|alpha|, the unique "
    "normalization under which they sum to 1; the non-normalizing alternative "
    "(n+1)*beta + 2*|alpha| (equal at n=1) is rejected and contradicted by the "
    "rate suite"
)


class ExcludedCaseError(ValueError):
    """Raised for the excluded trivial parameter pair alpha = beta = 0."""


@dataclass(frozen=True)
class RegimeReport:
    """Classification outcome with its justification.

    ``rates`` are the predicted per-vertex growth-rate limits of the embedded
    chain where a theorem supplies them (they sum to 1); ``fine_structure``
    is present only for explosive regimes.
    """

    regime: str
    theorem: str
    inequality: str
    fine_structure: str | None = None
    rates: tuple[float, ...] | None = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.fine_structure is not None:
            if self.fine_structure not in FINE_STRUCTURES:
                raise ValueError(f"unknown fine structure {self.fine_structure!r}")
            if self.regime != "Explosive":
                raise ValueError("fine structure is only meaningful for Explosive regimes")

    def to_json_dict(self) -> dict:
        return {
            "regime": self.regime,
            "fine_structure": self.fine_structure,
            "theorem": self.theorem,
            "inequality": self.inequality,
            "rates": list(self.rates) if self.rates is not None else None,
            "warnings": list(self.warnings),
        }


def _boundary_tol(params: ModelParams, degree_scale: float) -> float:
    return _BOUNDARY_RTOL * max(1.0, abs(params.alpha), abs(params.beta) * degree_scale)


def _star_rates(n: int, alpha: float, beta: float, center: int) -> tuple[float, ...]:
    denom = 2.0 * n * beta + (n + 1) * abs(alpha)
    center_rate = (n * beta + abs(alpha)) / denom
    leaf_rate = (beta + abs(alpha)) / denom
    return tuple(center_rate if x == center else leaf_rate for x in range(n + 1))


def _pair_fine(g: Graph, theorem: str, base_warnings: list[str]) -> RegimeReport:
    """Explosive with an adjacent pair sharing the late events at frequency 1/2 each."""
    warnings = list(base_warnings)
    if g.vertex_count == 2:
        rates: tuple[float, ...] | None = (0.5, 0.5)
    else:
        rates = None
        warnings.append(
            "growth concentrates on an undetermined adjacent pair, each vertex at rate 1/2"
        )
    return RegimeReport(
        regime="Explosive",
        fine_structure="AdjacentPairExplosion",
        theorem=theorem,
        inequality="0 < alpha < beta",
        rates=rates,
        warnings=tuple(warnings),
    )


def _classify_star(g: Graph, rep: StructureReport, params: ModelParams) -> RegimeReport:
    n = rep.star_leaf_count
    assert n is not None
    alpha, beta = params.alpha, params.beta
    root = math.sqrt(n)
    crit = alpha + beta * root
    tol = _boundary_tol(params, root)
    if alpha < 0:
        if crit < -tol:
            return RegimeReport("Ergodic", "T4.1", f"alpha + beta*sqrt(n) = {crit:.6g} < 0")
        if abs(crit) <= tol:
            return RegimeReport("Transient", "T4.2", "alpha + beta*sqrt(n) = 0 (critical boundary)")
        center = max(range(g.vertex_count), key=lambda x: g.degrees[x])
        return RegimeReport(
            regime="Explosive",
            fine_structure="SimultaneousExplosion",
            theorem="T4.3",
            inequality=f"alpha < 0 < alpha + beta*sqrt(n) = {crit:.6g}",
            rates=_star_rates(n, alpha, beta, center),
            warnings=(_DENOMINATOR_NOTE,),
        )
    if alpha == 0:
        return _classify_general(g, rep, params)
    if beta < alpha:
        return RegimeReport(
            regime="Explosive",
            fine_structure="SingleVertexExplosion",
            theorem="T4.4.i",
            inequality=f"alpha = {alpha:.6g} > max(0, beta)",
            warnings=("all late events occur at a single undetermined vertex",),
        )
    if beta > alpha:
        return _pair_fine(g, "T4.4.ii", [])
    return RegimeReport(
        regime="Explosive",
        theorem="T4.4",
        inequality=f"alpha = {alpha:.6g} > 0",
        warnings=("fine structure for alpha = beta > 0 is not covered",),
    )


def _classify_constant_degree(g: Graph, rep: StructureReport, params: ModelParams) -> RegimeReport:
    nu = rep.constant_degree
    assert nu is not None
    alpha, beta = params.alpha, params.beta
    n = g.vertex_count
    crit = alpha + beta * nu
    tol = _boundary_tol(params, nu)
    if alpha < 0:
        if crit < -tol:
            return RegimeReport("Ergodic", "T3.1", f"alpha + beta*nu = {crit:.6g} < 0")
        if abs(crit) <= tol:
            return RegimeReport("Transient", "T3.2", "alpha + beta*nu = 0 (critical boundary)")
        if rep.is_complete:
            return RegimeReport(
                regime="Explosive",
                fine_structure="SimultaneousExplosion",
                theorem="T3.1.1",
                inequality=f"alpha < 0 < alpha + beta*(n-1) = {crit:.6g}",
                rates=tuple([1.0 / n] * n),
            )
        return RegimeReport(
            regime="Explosive",
            theorem="T3.3",
            inequality=f"alpha < 0 < alpha + beta*nu = {crit:.6g}",
            warnings=("escape geometry beyond explosiveness is not covered for this graph",),
        )
    if alpha == 0:
        return _classify_general(g, rep, params)
    if beta < alpha:
        return RegimeReport(
            regime="Explosive",
            fine_structure="SingleVertexExplosion",
            theorem="T3.4.i",
            inequality=f"alpha = {alpha:.6g} > max(0, beta)",
            warnings=("all late events occur at a single undetermined vertex",),
        )
    if beta > alpha:
        if rep.is_complete:
            return RegimeReport(
                regime="Explosive",
                fine_structure="SimultaneousExplosion",
                theorem="T3.1.1",
                inequality=f"0 < alpha = {alpha:.6g} < beta = {beta:.6g}",
                rates=tuple([1.0 / n] * n),
            )
        if rep.is_triangle_free:
            return _pair_fine(g, "T3.4.ii", [])
        return RegimeReport(
            regime="Explosive",
            theorem="T3.4",
            inequality=f"alpha = {alpha:.6g} > 0",
            warnings=(
                "fine structure for 0 < alpha < beta on non-complete graphs with "
                "triangles is not covered",
            ),
        )
    return RegimeReport(
        regime="Explosive",
        theorem="T3.4",
        inequality=f"alpha = {alpha:.6g} > 0",
        warnings=("fine structure for alpha = beta > 0 is not covered",),
    )


def _classify_general(g: Graph, rep: StructureReport, params: ModelParams) -> RegimeReport:
    alpha, beta = params.alpha, params.beta
    maxdeg = rep.max_degree
    crit = alpha + beta * maxdeg
    tol = _boundary_tol(params, maxdeg)
    if alpha < 0:
        if crit < -tol:
            return RegimeReport("Ergodic", "T1.1", f"alpha + beta*max_degree = {crit:.6g} < 0")
        if abs(crit) <= tol:
            return RegimeReport(
                regime="NotExplosive",
                theorem="T1.1",
                inequality="alpha + beta*max_degree = 0 (critical boundary)",
                warnings=("recurrence at the critical boundary is unknown for this graph",),
            )
        return RegimeReport(
            regime="Unknown",
            theorem="none",
            inequality=f"alpha < 0 < alpha + beta*max_degree = {crit:.6g}",
            warnings=(
                "no covering theorem: alpha < 0 with a supercritical max-degree bound "
                "on a graph that is neither constant-degree nor a star",
            ),
        )
    # alpha >= 0 from here on; explosion theorems are sharper than plain
    # non-ergodicity, so they are checked first.
    if alpha > max(0.0, beta):
        return RegimeReport(
            regime="Explosive",
            fine_structure="SingleVertexExplosion",
            theorem="T2",
            inequality=f"alpha = {alpha:.6g} > max(0, beta)",
            warnings=("all late events occur at a single undetermined vertex",),
        )
    if 0 < alpha < beta and rep.is_triangle_free:
        return _pair_fine(g, "T-no-triangle", [])
    warnings = []
    if alpha > 0:
        if alpha == beta:
            warnings.append("fine structure for alpha = beta > 0 is not covered")
        else:
            warnings.append(
                "explosion is not certified for 0 < alpha < beta on graphs with triangles "
                "that are neither complete nor constant-degree"
            )
    if alpha == 0 and beta < 0 and g.vertex_count == 2:
        warnings.append(
            "two-vertex case with alpha = 0, beta < 0 is recurrent but not positive "
            "recurrent (null recurrence); see the log-Lyapunov drift check"
        )
    return RegimeReport(
        regime="NonErgodic",
        theorem="T1.2",
        inequality=f"alpha = {alpha:.6g} >= 0",
        warnings=tuple(warnings),
    )


def classify(g: Graph, params: ModelParams) -> RegimeReport:
    """Classify the long-term regime of the chain on ``g`` with ``params``.

    Dispatches to the sharpest graph family the structure report admits
    (star, then constant degree with a complete-graph refinement, then
    general connected).  Disconnected graphs are accepted only in the
    dominant-self-interaction regime alpha > max{0, beta}.
    """
    alpha, beta = params.alpha, params.beta
    if alpha == 0 and beta == 0:
        raise ExcludedCaseError(
            "excluded trivial case alpha = beta = 0: components are independent "
            "symmetric random walks reflected at 0 (null recurrent on 1 or 2 "
            "vertices, transient on 3 or more)"
        )
    rep = analyze(g)
    if not rep.is_connected:
        if alpha > max(0.0, beta):
            return RegimeReport(
                regime="Explosive",
                fine_structure="SingleVertexExplosion",
                theorem="T2",
                inequality=f"alpha = {alpha:.6g} > max(0, beta)",
                warnings=(
                    "graph is disconnected; the single-vertex takeover does not "
                    "require connectedness",
                    "all late events occur at a single undetermined vertex",
                ),
            )
        raise GraphError(
            "disconnected graphs are only classifiable when alpha > max{0, beta}"
        )
    if beta == 0:
        if alpha < 0:
            return RegimeReport(
                regime="Ergodic",
                theorem="IID",
                inequality=f"beta = 0, alpha = {alpha:.6g} < 0",
                warnings=("components are independent ergodic birth-and-death chains",),
            )
        return RegimeReport(
            regime="Explosive",
            fine_structure="SingleVertexExplosion",
            theorem="IID",
            inequality=f"beta = 0, alpha = {alpha:.6g} > 0",
            warnings=(
                "components are independent explosive birth-and-death chains; "
                "exactly one explodes first",
            ),
        )
    if rep.star_leaf_count is not None:
        return _classify_star(g, rep, params)
    if rep.constant_degree is not None:
        return _classify_constant_degree(g, rep, params)
    return _classify_general(g, rep, params)


def predicted_rates(g: Graph, params: ModelParams) -> tuple[float, ...] | None:
    """Per-vertex growth-rate limits of the embedded chain, when a theorem predicts them."""
    return classify(g, params).rates
