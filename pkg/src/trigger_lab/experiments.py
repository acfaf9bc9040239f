"""Seeded end-to-end experiments on strong-arc networks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bayesnet import BayesNet, forward_sample
from .graph import Dag, enumerate_dags, is_weakly_connected
from .netgen_ga import GaConfig, StrengthObjective, evolve_with_history
from .pipeline import STAGE_DATA, STAGE_NETS, derive_seed
from .structure_learn import pc, trigger_pc
from .trigger_search import TriggerCatalog, find_triggers


def strong_net(structure: Dag, arity: int, seed: int, population: int = 40, generations: int = 30) -> BayesNet:
    """Maximin-MI network: every arc as strong as the GA can make the weakest one."""
    cfg = GaConfig(population=population, generations=generations, seed=seed, aggregate="min")
    return evolve_with_history(structure, arity, StrengthObjective("maximize"), cfg).net


@dataclass
class FalsePositiveConfig:
    n_vars: int = 4
    arities: tuple[int, ...] = (2, 3)
    alphas: dict[int, float] = field(default_factory=lambda: {2: 0.12268, 3: 0.20160})
    n_rows: int = 10_000
    seed: int = 0


@dataclass
class FalsePositiveResult:
    cases: int
    pc_fp: int
    trigger_pc_fp: int
    bidirected_on_non_matches: int

    @property
    def pc_rate(self) -> float:
        return self.pc_fp / self.cases

    @property
    def trigger_pc_rate(self) -> float:
        return self.trigger_pc_fp / self.cases


def false_positive_study(cfg: FalsePositiveConfig, catalog: TriggerCatalog | None = None) -> FalsePositiveResult:
    """PC vs Trigger-PC on every connected fully observed structure; any <-> counts as a false positive."""
    catalog = catalog or find_triggers(cfg.n_vars)
    dags = [g for g in enumerate_dags(cfg.n_vars) if is_weakly_connected(g)]
    cases = pc_fp = tpc_fp = leaked = 0
    for i, g in enumerate(dags):
        for arity in cfg.arities:
            net = strong_net(g, arity, derive_seed(cfg.seed, STAGE_NETS, 0, i, arity))
            data = forward_sample(net, cfg.n_rows, derive_seed(cfg.seed, STAGE_DATA, 0, i, arity, 0, cfg.n_rows))
            alpha = cfg.alphas[arity]
            pc_fp += pc(data, alpha).has_bidirected()
            res = trigger_pc(data, alpha, catalog)
            tpc_fp += res.graph.has_bidirected()
            if not res.is_trigger:
                leaked += len(res.graph.bidirected())
            cases += 1
    return FalsePositiveResult(cases, pc_fp, tpc_fp, leaked)


@dataclass
class RecoveryConfig:
    n_vars: int = 4
    arity: int = 2
    alpha: float = 0.05
    n_rows: int = 10_000
    runs: int = 20
    seed: int = 0


def trigger_recovery_study(cfg: RecoveryConfig, catalog: TriggerCatalog | None = None) -> list[int]:
    """Per trigger, how many runs return a trigger with the true latent pair.

    Every run draws its own network and its own sample.
    """
    catalog = catalog or find_triggers(cfg.n_vars)
    hits = []
    for i, trig in enumerate(catalog.triggers):
        m = trig.model
        count = 0
        for run in range(cfg.runs):
            net = strong_net(m.full, cfg.arity, derive_seed(cfg.seed, STAGE_NETS, 1, i, cfg.arity, run))
            data = forward_sample(net, cfg.n_rows, derive_seed(cfg.seed, STAGE_DATA, 1, i, cfg.arity, run),
                                  hidden=[m.hidden])
            res = trigger_pc(data, cfg.alpha, catalog)
            count += bool(res.is_trigger and res.model.latent_children == m.latent_children)
        hits.append(count)
    return hits
