"""Social optima and the price of anarchy.

The closed-form optimum compares the star, (n-1)*alpha + 2n - 1, with the
complete graph, alpha*n*(n-1)/2 + n; the crossover sits exactly at
alpha = 2/(n-2). A brute-force twin minimizes social cost over every edge
subset and serves as the independent oracle for the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import NotEquilibrium, NotTree, SizeGuard
from .game import (INF, GameConfig, StrategyProfile, agent_cost,
                   all_pairs_distances, build_graph, eccentricity, metrics,
                   social_cost)
from .equilibrium import enumerate_equilibria, is_nash

OPTIMUM_BRUTEFORCE_MAX_N = 6


@dataclass(frozen=True)
class OptimumResult:
    cost: Fraction
    witness: StrategyProfile
    method: str  # "analytic" | "brute-force"


@dataclass(frozen=True)
class PoAReport:
    alpha: Fraction
    n: int
    worst_equilibrium_cost: Fraction | None
    optimum_cost: Fraction
    poa: Fraction | None  # None when no equilibrium exists
    equilibria_considered: int
    exhaustive: bool


@dataclass(frozen=True)
class TreePoaCertificate:
    """Per-equilibrium evidence for the tree price-of-anarchy bound."""

    diameter: int
    diameter_bound: Fraction
    diameter_ok: bool
    social_cost: Fraction
    optimum_cost: Fraction
    ratio: Fraction
    ratio_ok: bool
    deviation_agent: int
    deviation_target: int
    deviation_old_cost: Fraction
    deviation_new_cost: Fraction
    deviation_nonimproving: bool

    def passed(self) -> bool:
        return self.diameter_ok and self.ratio_ok and self.deviation_nonimproving


def star_profile(n: int) -> StrategyProfile:
    """Star centered at 0; every leaf pays for its own link."""
    return StrategyProfile.from_sets([set()] + [{0} for _ in range(n - 1)])


def clique_profile(n: int) -> StrategyProfile:
    """Complete graph; each edge paid by its smaller endpoint."""
    return StrategyProfile.from_sets(
        [set(range(i + 1, n)) for i in range(n)])


def optimum_analytic(config: GameConfig) -> OptimumResult:
    """Closed-form social optimum: the cheaper of star and complete graph.

    At the boundary alpha = 2/(n-2) both agree and the star is returned.
    n <= 2 is handled directly (empty graph / the single forced edge).
    """
    n, alpha = config.n, config.alpha
    if n == 1:
        return OptimumResult(cost=Fraction(0), witness=StrategyProfile.empty(1),
                             method="analytic")
    if n == 2:
        profile = StrategyProfile.from_sets([set(), {0}])
        return OptimumResult(cost=alpha + 2, witness=profile, method="analytic")
    star_cost = (n - 1) * alpha + 2 * n - 1
    clique_cost = alpha * n * (n - 1) / 2 + n
    if star_cost <= clique_cost:
        return OptimumResult(cost=star_cost, witness=star_profile(n), method="analytic")
    return OptimumResult(cost=clique_cost, witness=clique_profile(n), method="analytic")


def optimum_bruteforce(config: GameConfig) -> OptimumResult:
    """Exact minimum of social cost over all 2^(n(n-1)/2) edge subsets.

    Who owns an edge never changes the social cost, so minimizing over
    graphs with one owner per edge covers the whole strategy space; the
    smaller endpoint pays in the reported witness. Ties break toward the
    lexicographically smallest edge set.
    """
    n = config.n
    if n > OPTIMUM_BRUTEFORCE_MAX_N:
        raise SizeGuard(
            f"brute-force optimum needs n <= {OPTIMUM_BRUTEFORCE_MAX_N}, got {n}")
    pairs = list(combinations(range(n), 2))
    best_cost, best_edges = None, None
    for bits in range(1 << len(pairs)):
        adj = [0] * n
        edge_count = 0
        for i, (u, v) in enumerate(pairs):
            if (bits >> i) & 1:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
                edge_count += 1
        usage = 0
        for v in range(n):
            e = eccentricity(adj, v, n)
            if e == INF:
                usage = INF
                break
            usage += e
        if usage == INF:
            continue
        cost = config.alpha * edge_count + usage
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_edges = bits
    buys: list[set] = [set() for _ in range(n)]
    for i, (u, v) in enumerate(pairs):
        if (best_edges >> i) & 1:
            buys[u].add(v)
    return OptimumResult(cost=best_cost,
                         witness=StrategyProfile.from_sets(buys),
                         method="brute-force")


def price_of_anarchy(config: GameConfig, equilibria=None, workers: int = 1) -> PoAReport:
    """Worst equilibrium social cost over the optimum.

    Without a supplied equilibrium list this enumerates exhaustively (and
    cross-checks the closed-form optimum against brute force). When no
    equilibrium exists the ratio is reported as undefined (None), never
    as 0 or infinity.
    """
    exhaustive = equilibria is None
    if exhaustive:
        equilibria = enumerate_equilibria(config, workers=workers).equilibria
    opt = optimum_analytic(config)
    if exhaustive and config.n <= OPTIMUM_BRUTEFORCE_MAX_N:
        brute = optimum_bruteforce(config)
        if brute.cost != opt.cost:
            raise AssertionError(
                f"optimum mismatch: analytic {opt.cost} vs brute force {brute.cost}")
    costs = [social_cost(config, prof) for prof in equilibria]
    worst = max(costs) if costs else None
    if worst is None:
        poa = None
    elif opt.cost == 0:  # n == 1: the empty profile is both optimum and equilibrium
        poa = Fraction(1)
    else:
        poa = worst / opt.cost
    return PoAReport(
        alpha=config.alpha, n=config.n,
        worst_equilibrium_cost=worst,
        optimum_cost=opt.cost,
        poa=poa,
        equilibria_considered=len(costs),
        exhaustive=exhaustive)


def tree_poa_certificate(config: GameConfig, profile: StrategyProfile) -> TreePoaCertificate:
    """Check the three facts behind the constant tree bound on one equilibrium:
    diameter <= 2*alpha + 3, social cost below three optima, and the
    add-one-edge deviation from a deepest leaf to a center not improving.
    """
    graph = build_graph(profile)
    if not graph.is_tree():
        raise NotTree("certificate applies to tree profiles only")
    if not is_nash(config, profile).is_nash:
        raise NotEquilibrium("certificate applies to verified equilibria only")
    bound = 2 * config.alpha + 3
    if config.n == 1:
        # Single vertex: the empty profile is simultaneously the optimum.
        return TreePoaCertificate(
            diameter=0, diameter_bound=bound, diameter_ok=True,
            social_cost=Fraction(0), optimum_cost=Fraction(0),
            ratio=Fraction(1), ratio_ok=True,
            deviation_agent=0, deviation_target=0,
            deviation_old_cost=Fraction(0), deviation_new_cost=Fraction(0),
            deviation_nonimproving=True)
    mets = metrics(all_pairs_distances(graph))
    diameter = mets.diameter
    cost = social_cost(config, profile)
    opt = optimum_analytic(config).cost
    ratio = cost / opt

    center = min(mets.centers)
    dist_from_center = all_pairs_distances(graph).rows[center]
    # In a tree the far end of any longest path sits at exactly radius from
    # the center and realizes the diameter, so this set is never empty.
    candidates = [v for v in range(config.n)
                  if dist_from_center[v] == mets.radius and mets.ecc[v] == diameter]
    u = min(candidates)
    old = agent_cost(config, profile, u)
    deviated = profile.with_strategy(u, set(profile.buys[u]) | {center})
    new = agent_cost(config, deviated, u)
    return TreePoaCertificate(
        diameter=diameter,
        diameter_bound=bound,
        diameter_ok=Fraction(diameter) <= bound,
        social_cost=cost,
        optimum_cost=opt,
        ratio=ratio,
        ratio_ok=ratio < 3,
        deviation_agent=u,
        deviation_target=center,
        deviation_old_cost=old.total,
        deviation_new_cost=new.total,
        deviation_nonimproving=new.total >= old.total)
