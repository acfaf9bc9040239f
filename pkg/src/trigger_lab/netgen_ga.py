"""Genetic algorithm over CPT parameters of a fixed structure, targeting an arc-strength regime."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .bayesnet import BayesNet, make_rng, network_strength, random_cpts
from .graph import Dag


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    generations: int = 100
    mutation_rate: float = 0.1
    crossover_rate: float = 0.9
    elitism: int = 2
    tournament: int = 3
    seed: int = 0
    aggregate: str = "mean"  # how arc MIs reduce to the fitness strength

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        for name in ("mutation_rate", "crossover_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0 <= self.elitism <= self.population:
            raise ValueError("elitism must lie in [0, population]")
        if self.aggregate not in ("mean", "min"):
            raise ValueError(f"unknown aggregate {self.aggregate!r}")


@dataclass(frozen=True)
class StrengthObjective:
    kind: str  # "maximize", "minimize" or "target"
    target_value: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("maximize", "minimize", "target"):
            raise ValueError(f"unknown objective {self.kind!r}")
        if self.kind == "target" and self.target_value is None:
            raise ValueError("target objective needs target_value")

    def fitness(self, strength: float) -> float:
        if self.kind == "maximize":
            return strength
        if self.kind == "minimize":
            return -strength
        return -abs(strength - self.target_value)


@dataclass
class GaResult:
    net: BayesNet
    strength: float  # mean arc MI, whatever aggregate drove the search
    fitness: float
    history: list[float] = field(default_factory=list)  # best fitness after each generation


def _rows(net: BayesNet) -> list[tuple[int, int]]:
    return [(v, r) for v, t in enumerate(net.cpts) for r in range(t.shape[0])]


def evolve_with_history(structure: Dag, arity: int, objective: StrengthObjective,
                        cfg: GaConfig = GaConfig()) -> GaResult:
    if not structure.edges:
        raise ValueError("cannot evolve arc strengths on an edgeless structure")
    rng = make_rng(cfg.seed)
    pop = [random_cpts(structure, arity, rng) for _ in range(cfg.population)]
    rows = _rows(pop[0])

    def score(net: BayesNet) -> float:
        return objective.fitness(network_strength(net, cfg.aggregate))

    fit = np.array([score(x) for x in pop])
    history = []
    for _ in range(cfg.generations):
        order = np.argsort(-fit, kind="stable")
        nxt = [pop[i] for i in order[:cfg.elitism]]
        nxt_fit = [fit[i] for i in order[:cfg.elitism]]
        while len(nxt) < cfg.population:
            a = _tournament(fit, cfg.tournament, rng)
            b = _tournament(fit, cfg.tournament, rng)
            cpts = [t.copy() for t in pop[a].cpts]
            if rng.random() < cfg.crossover_rate:
                take = rng.random(len(rows)) < 0.5
                for (v, r), t in zip(rows, take):
                    if t:
                        cpts[v][r] = pop[b].cpts[v][r]
            redraw = rng.random(len(rows)) < cfg.mutation_rate
            for (v, r), m in zip(rows, redraw):
                if m:
                    cpts[v][r] = rng.dirichlet(np.ones(arity))
            child = BayesNet(structure, arity, tuple(cpts))
            nxt.append(child)
            nxt_fit.append(score(child))
        pop, fit = nxt, np.array(nxt_fit)
        history.append(float(fit.max()))
    best = int(np.argmax(fit))
    return GaResult(pop[best], network_strength(pop[best]), float(fit[best]), history)


def _tournament(fit: np.ndarray, size: int, rng: np.random.Generator) -> int:
    picks = rng.integers(0, len(fit), size=size)
    return int(picks[np.argmax(fit[picks])])


def evolve(structure: Dag, arity: int, objective: StrengthObjective, cfg: GaConfig = GaConfig()) -> BayesNet:
    """Best CPT parameterization found for ``objective``; pure in its arguments."""
    return evolve_with_history(structure, arity, objective, cfg).net


@dataclass
class StrengthSuite:
    strong: GaResult
    weak: GaResult
    medium: GaResult

    def as_dict(self) -> dict[str, GaResult]:
        return {"strong": self.strong, "weak": self.weak, "medium": self.medium}


def three_level_suite(structure: Dag, arity: int, seed: int, cfg: GaConfig | None = None,
                      strong_aggregate: str = "min") -> StrengthSuite:
    """Strongest, weakest, and midway nets for one structure.

    The three runs use seeds ``seed``, ``seed + 1`` and ``seed + 2``. The strong
    run maximizes ``strong_aggregate`` of the arc MIs; with "min" no arc can be
    sacrificed to inflate the others, which a mean objective does at colliders.
    Weak minimizes the mean, and medium targets the midpoint of the other two
    mean strengths.
    """
    base = cfg or GaConfig()
    strong = evolve_with_history(structure, arity, StrengthObjective("maximize"),
                                 replace(base, seed=seed, aggregate=strong_aggregate))
    weak = evolve_with_history(structure, arity, StrengthObjective("minimize"),
                               replace(base, seed=seed + 1, aggregate="mean"))
    target = (strong.strength + weak.strength) / 2
    medium = evolve_with_history(structure, arity, StrengthObjective("target", target),
                                 replace(base, seed=seed + 2, aggregate="mean"))
    return StrengthSuite(strong, weak, medium)
