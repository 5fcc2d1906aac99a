"""
Scenario generation.

Each scenario index draws from its own counter-based stream, Philox keyed by
(seed, index), so the n-th scenario does not depend on how many candidates earlier
indices rejected or on how the batch is later split across workers.
"""
from __future__ import annotations
from typing import List, Optional, Sequence, Set, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from ..common.config import settings
from ..common.errors import DomainError, ExhaustionError
from ..common.logging import logger
from ..common.schemas import QuadConfig
from ..inequalities.catalog import PROOF_FINAL_IDS, THEOREMS, InequalityId
from ..inequalities.funclasses import (
    Scenario,
    certify_scenario,
    make_map,
    parse_function_spec,
    parse_hclass,
)

DEFAULT_FAMILIES: Tuple[str, ...] = (
    "poly:0,0,1",
    "poly:0,0,0,1",
    "poly:1,1,1,1",
    "exp:1",
    "exp:0.5",
    "powabs:3",
    "powabs:2.5",
)
# |f'| and |f''| of this quartic change convexity inside [0, 1]
NON_PREINVEX_FAMILIES: Tuple[str, ...] = ("poly:0,0,1,-2,1",)
DEFAULT_INTERVALS: Tuple[Tuple[float, float], ...] = ((0.0, 1.0), (0.5, 2.0), (1.0, 3.0), (0.25, 1.25), (0.0, 2.0))


class GenerationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    families: Tuple[str, ...] = DEFAULT_FAMILIES
    h_classes: Tuple[str, ...] = ("id", "pow:0.5", "one")
    alpha_grid: Tuple[float, ...] = (0.3, 0.5, 1.0, 1.7, 2.5)
    p_grid: Tuple[float, ...] = (1.5, 2.0, 3.0)
    intervals: Tuple[Tuple[float, float], ...] = DEFAULT_INTERVALS
    lambdas: Tuple[float, ...] = (1.0, 0.75, 0.5)
    etas: Tuple[str, ...] = ("diff", "affine:1.5")
    ids: Tuple[InequalityId, ...] = PROOF_FINAL_IDS
    max_retries: int = Field(50, ge=1)
    cert_grid: int = Field(default_factory=lambda: settings.CERT_GRID, ge=3)
    waive_certification: bool = False
    quad_cfg: QuadConfig = Field(default_factory=QuadConfig)

    def required_tags(self) -> Set[str]:
        return {THEOREMS[InequalityId(i)].tag for i in self.ids}

    def check_pools(self) -> None:
        for name in ("families", "h_classes", "alpha_grid", "p_grid", "intervals", "lambdas", "etas"):
            if not getattr(self, name):
                raise DomainError(f"generation pool {name!r} is empty")

    def waived(self) -> "GenerationConfig":
        """Same pools widened with families that are not preinvex, certification off."""
        extra = tuple(f for f in NON_PREINVEX_FAMILIES if f not in self.families)
        return self.model_copy(update={"families": self.families + extra, "waive_certification": True})


def scenario_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def _pick(rng: np.random.Generator, pool: Sequence):
    return pool[int(rng.integers(len(pool)))]


def draw_candidate(config: GenerationConfig, rng: np.random.Generator) -> Optional[Scenario]:
    """One random scenario from the pools, or None when its geometry is invalid."""
    a, b = _pick(rng, config.intervals)
    try:
        return Scenario(
            f=parse_function_spec(_pick(rng, config.families)),
            a=a,
            b=b,
            alpha=_pick(rng, config.alpha_grid),
            p=_pick(rng, config.p_grid),
            h=parse_hclass(_pick(rng, config.h_classes)),
            map=make_map(_pick(rng, config.etas), _pick(rng, config.lambdas)),
            quad_cfg=config.quad_cfg,
        )
    except ValueError as exc:
        logger.debug(f"candidate rejected at construction: {exc}")
        return None


def accept(config: GenerationConfig, candidate: Scenario) -> Tuple[Scenario, bool]:
    certified = certify_scenario(candidate, grid_n=config.cert_grid)
    ok = config.waive_certification or config.required_tags() <= certified.certified
    return certified, ok


def generate_scenarios(config: GenerationConfig, seed: int, n: int) -> List[Scenario]:
    """n certified scenarios, deterministic in (config, seed).

    A slot whose candidates are all rejected after ``max_retries`` draws is skipped
    with a warning; more than 99% rejections overall raises ExhaustionError.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    config.check_pools()
    scenarios: List[Scenario] = []
    drawn = rejected = 0
    for index in range(n):
        rng = scenario_rng(seed, index)
        for _ in range(config.max_retries):
            drawn += 1
            candidate = draw_candidate(config, rng)
            if candidate is not None:
                candidate, ok = accept(config, candidate)
                if ok:
                    scenarios.append(candidate)
                    break
            rejected += 1
        else:
            logger.warning(f"scenario slot {index} skipped after {config.max_retries} rejected candidates")
        if drawn >= 100 and rejected / drawn > 0.99:
            raise ExhaustionError(f"{rejected} of {drawn} candidates rejected")
    if drawn and rejected / drawn > 0.99:
        raise ExhaustionError(f"{rejected} of {drawn} candidates rejected")
    logger.info(f"generated {len(scenarios)} scenarios (seed={seed}, drawn={drawn}, rejected={rejected})")
    return scenarios


__all__ = [
    "GenerationConfig",
    "DEFAULT_FAMILIES",
    "NON_PREINVEX_FAMILIES",
    "generate_scenarios",
    "scenario_rng",
    "draw_candidate",
    "accept",
]
