from datetime import datetime

from pydantic import BaseModel, ConfigDict

from src.shared.errors import OutOfRange
from src.shared.logger import setup_logger
from src.shared.stage_runner import StageRunner
from src.features.spectral_sequences.graded_table import GradedTable
from src.features.decomposition.link_store import LinkStore
from src.features.decomposition.models import (
    MINIMAL_NEW,
    AssemblyResult,
    BettiWithUnknowns,
    Constraint,
    InferenceResult,
    LedgerEntry,
    LinkSymbol,
    Prediction,
    Stratification,
)
from src.features.decomposition.handlers import (
    AssemblyHandler,
    BlowupHandler,
    ContributionHandler,
    LinkResolutionHandler,
    NewSystemHandler,
    PointStratumCheck,
    StratificationHandler,
)

logger = setup_logger(__name__)


class StratumStep(BaseModel):
    """What happened over one stratum: the fiber, what was predicted, what was new."""
    model_config = ConfigDict(frozen=True)

    stratum: int
    fiber: GradedTable
    prediction: Prediction
    inference: InferenceResult


class GenusReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    genus: int
    policy: str = MINIMAL_NEW
    stratification: Stratification
    defect: int
    steps: tuple[StratumStep, ...]
    ledger: tuple[LedgerEntry, ...]
    links: LinkStore
    constraints: tuple[Constraint, ...]
    assembly: AssemblyResult
    recursive_ih: dict[int, BettiWithUnknowns]
    blowup: BettiWithUnknowns | None = None
    point_check: PointStratumCheck | None = None
    zero_forced: tuple[LinkSymbol, ...] = ()

    @property
    def ih(self) -> BettiWithUnknowns:
        return self.assembly.ih

    def ledger_at(self, k: int) -> list[LedgerEntry]:
        return [entry for entry in self.ledger if entry.stratum == k]


def point_ih() -> BettiWithUnknowns:
    return BettiWithUnknowns.from_ints("Sat_0", [1], prefix="IH")


class DecompositionEngine:
    """Runs the stratum-by-stratum ledger for Sat_g, recursing on lower genera."""

    def __init__(self, registry):
        self.registry = registry
        self.stratification = StratificationHandler()
        self.resolver = LinkResolutionHandler()
        self.assembler = AssemblyHandler()
        self.blowup = BlowupHandler()

    def run_genus(self, g: int) -> GenusReport:
        if g < 1:
            raise OutOfRange(f"genus must be at least 1, got {g}")

        toroidal = self.registry.toroidal_betti(g)
        fibers = {k: self.registry.fiber_table(g, k) for k in range(g)}
        previous = self.run_genus(g - 1) if g > 1 else None

        runner = StageRunner(f"genus {g}")
        strat = runner.execute(
            "make_stratification",
            self.stratification.make_stratification,
            g,
            [self.registry.fiber_dim(g, k) for k in range(g)],
        )
        defect = self.stratification.defect(strat)

        links = previous.links.copy() if previous is not None else LinkStore()
        links.seed_circle_link(g)
        for k, r, coefficient, table, name in self.registry.link_seeds(g):
            links.seed_table(k, r, coefficient, table, reason=name)

        contribution = ContributionHandler(strat)
        new_systems = NewSystemHandler(strat)
        ledger: list[LedgerEntry] = []
        retained: list[Constraint] = []
        zero_forced: list[LinkSymbol] = []
        steps: list[StratumStep] = []

        for k in reversed(range(g)):
            prediction = runner.execute(
                "predicted_contributions", contribution.predicted_contributions, k, list(ledger), links, stratum=k
            )
            links = links.with_families(prediction.families())
            inference = runner.execute(
                "infer_new_systems", new_systems.infer_new_systems, k, fibers[k], prediction, stratum=k
            )
            ledger.extend(inference.entries)
            resolution = runner.execute(
                "resolve_links", self.resolver.resolve_links, list(inference.constraints), links, stratum=k
            )
            links = resolution.links
            retained.extend(resolution.retained)
            zero_forced.extend(resolution.zero_forced)
            steps.append(StratumStep(stratum=k, fiber=fibers[k], prediction=prediction, inference=inference))

        final = runner.execute("resolve_links", self.resolver.resolve_links, retained, links)
        links = final.links
        zero_forced.extend(final.zero_forced)

        recursive_ih = {0: point_ih()}
        if previous is not None:
            recursive_ih.update(previous.recursive_ih)
            recursive_ih[g - 1] = previous.ih

        assembly = runner.execute(
            "assemble_global", self.assembler.assemble_global, g, toroidal, list(ledger), recursive_ih
        )

        blowup = None
        point_check = None
        exceptional = self.registry.exceptional_table(g)
        if exceptional is not None:
            n = strat.total_dim
            blowup = runner.execute(
                "blowup_split", self.blowup.blowup_split, assembly.toroidal, exceptional, n, f"Perf_{g}"
            )
            point_check = self.blowup.point_stratum_check(ledger, exceptional, n)
            logger.info(f"Point stratum check: {point_check.detail}")

        logger.info(f"Genus {g}: IH(Sat_{g}) = {assembly.ih.render()}")
        return GenusReport(
            genus=g,
            stratification=strat,
            defect=defect,
            steps=tuple(steps),
            ledger=tuple(ledger),
            links=links,
            constraints=final.retained,
            zero_forced=tuple(sorted(zero_forced, key=LinkSymbol.sort_key)),
            assembly=assembly,
            recursive_ih=recursive_ih,
            blowup=blowup,
            point_check=point_check,
        )


def run_genus(g: int, registry=None) -> GenusReport:
    if registry is None:
        from src.features.datasets.registry import builtin_registry
        registry = builtin_registry()
    started = datetime.now()
    report = DecompositionEngine(registry).run_genus(g)
    logger.debug(f"run_genus({g}) took {(datetime.now() - started).total_seconds():.2f}s")
    return report
