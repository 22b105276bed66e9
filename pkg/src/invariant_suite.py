"""
Invariant suite for finitely presented Lie rings.

Runs the structural identities of dimension subrings on one presentation
and over seeded random families, collecting pass/fail per check. A check
that raises is recorded as an error and counts as failed; the remaining
checks still run.
"""
import logging
import time
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

from src.dimsub import (
    DimQuery,
    delta4_centrality_check,
    delta4_oracle_lattice,
    deltan_divisibility_check,
    dimension_quotient,
    ideal_check,
    sandwich_check,
    sjogren_equality_check,
)
from src.fplie import (
    Presentation,
    associated_graded,
    bracket_span,
    gamma_lattice,
    nilpotent_quotient,
    preabelianize,
)
from src.intlat import Lattice, scale
from src.randgen import PresentationSampler

logger = logging.getLogger(__name__)


def _deltas(pres: Presentation, max_n: int) -> Dict[int, Lattice]:
    return {n: DimQuery(pres, n).delta for n in range(1, max_n + 1)}


def delta_bracket_property(pres: Presentation, max_n: int = 4) -> bool:
    """[delta_m, delta_n] <= delta_{m+n} for m + n <= max_n."""
    deltas = _deltas(pres, max_n)
    for m in range(1, max_n):
        for n in range(m, max_n - m + 1):
            if not bracket_span(pres.ctx, deltas[m], deltas[n]).issubset(deltas[m + n]):
                return False
    return True


def gamma_in_delta_property(pres: Presentation, max_n: int = 4) -> bool:
    return all(gamma_lattice(pres, n).issubset(d) for n, d in _deltas(pres, max_n).items())


def delta_abelian_property(pres: Presentation, max_n: int = 4) -> bool:
    """delta_n / gamma_{n+1} is abelian."""
    return all(
        bracket_span(pres.ctx, d, d).issubset(gamma_lattice(pres, n + 1))
        for n, d in _deltas(pres, max_n).items()
    )


def delta_ideal_property(pres: Presentation, max_n: int = 4) -> bool:
    return all(ideal_check(DimQuery(pres, n)) for n in range(1, max_n + 1))


def dimension_quotient_trivial(pres: Presentation, n: int) -> bool:
    return dimension_quotient(DimQuery(pres, n)).is_trivial


def twice_delta4_property(pres: Presentation) -> bool:
    """2 delta_4 <= gamma_4."""
    return scale(DimQuery(pres, 4).delta, 2).issubset(gamma_lattice(pres, 4))


def delta4_oracle_property(pres: Presentation) -> bool:
    """The coefficient description of delta_4 matches the computed lattice on the preabelian form."""
    pd = preabelianize(pres)
    return delta4_oracle_lattice(pd) == DimQuery(pd.presentation, 4).delta


def graded_delta4_property(pres: Presentation) -> bool:
    """delta_4 = gamma_4 for the associated graded ring."""
    graded = associated_graded(nilpotent_quotient(pres))
    return dimension_quotient_trivial(graded, 4)


class InvariantSuite:
    """Run the dimension subring identities and record the outcome of each."""

    def __init__(self, seed: int = 0, trials: int = 20, max_n: int = 4):
        self.seed = seed
        self.trials = trials
        self.max_n = max_n

    def _run(self, results: Dict[str, Any], name: str, check: Callable[[], Any]) -> bool:
        try:
            outcome = check()
            passed = bool(outcome)
            entry: Dict[str, Any] = {"passed": passed}
            if hasattr(outcome, "to_dict"):
                entry.update(outcome.to_dict())
            results["checks"][name] = entry
            if not passed:
                logger.warning(f"Check {name} failed")
            return passed
        except Exception as e:
            error_msg = f"Error in check {name}: {str(e)}"
            logger.error(error_msg)
            results["errors"].append(error_msg)
            results["checks"][name] = {"passed": False, "error": str(e)}
            return False

    @staticmethod
    def _new_results(**fields: Any) -> Dict[str, Any]:
        results: Dict[str, Any] = {"checks": {}, "timestamp": datetime.now().isoformat(), "errors": []}
        results.update(fields)
        return results

    @staticmethod
    def _finish(results: Dict[str, Any], start_time: float) -> Dict[str, Any]:
        results["passed"] = not results["errors"] and all(c["passed"] for c in results["checks"].values())
        results["processing_time_seconds"] = time.time() - start_time
        logger.info(
            f"Invariant suite finished in {results['processing_time_seconds']:.2f} seconds",
            extra={"checks": len(results["checks"]), "errors": len(results["errors"])}
        )
        return results

    def check_presentation(self, pres: Presentation) -> Dict[str, Any]:
        """
        Run every structural check on one presentation.

        Args:
            pres: The presentation to test

        Returns:
            Dict[str, Any]: Per-check results, errors and processing time
        """
        start_time = time.time()
        results = self._new_results(presentation=pres.describe())
        max_n = self.max_n
        logger.info(f"Checking invariants of {pres.describe()}")

        self._run(results, "delta_brackets", lambda: delta_bracket_property(pres, max_n))
        self._run(results, "delta_ideal", lambda: delta_ideal_property(pres, max_n))
        self._run(results, "gamma_in_delta", lambda: gamma_in_delta_property(pres, max_n))
        self._run(results, "delta_over_next_gamma_abelian", lambda: delta_abelian_property(pres, max_n))
        self._run(results, "delta2_equals_gamma2", lambda: dimension_quotient_trivial(pres, 2))
        self._run(results, "delta3_equals_gamma3", lambda: dimension_quotient_trivial(pres, 3))
        self._run(results, "twice_delta4_in_gamma4", lambda: twice_delta4_property(pres))
        self._run(results, "delta4_centrality", lambda: delta4_centrality_check(pres))
        self._run(results, "delta4_coefficient_description", lambda: delta4_oracle_property(pres))
        self._run(results, "graded_delta4_equals_gamma4", lambda: graded_delta4_property(pres))
        self._run(results, "deltan_divisibility", lambda: deltan_divisibility_check(pres, max_n))
        return self._finish(results, start_time)

    def _family(self, results: Dict[str, Any], name: str, trial: Callable[[], bool],
                trials: int, describe: Callable[[], str]) -> None:
        failures: List[str] = []

        def sweep() -> bool:
            for _ in range(trials):
                if not trial():
                    failures.append(describe())
            return not failures

        self._run(results, name, sweep)
        results["checks"][name].update({"trials": trials, "failures": failures})

    def run_random_families(self, trials: Optional[int] = None) -> Dict[str, Any]:
        """
        Run the randomized families with this suite's seed.

        Each family draws from its own sampler seeded with ``seed``, so
        adding a family does not change the instances of the others.
        """
        trials = self.trials if trials is None else trials
        start_time = time.time()
        results = self._new_results(seed=self.seed)
        last: Dict[str, Any] = {}

        sampler = PresentationSampler(self.seed)

        def low_degree() -> bool:
            pres = sampler.presentation()
            last["instance"] = pres.describe()
            return dimension_quotient_trivial(pres, 2) and dimension_quotient_trivial(pres, 3)

        self._family(results, "delta2_delta3_trivial", low_degree, trials, lambda: last["instance"])

        preabelian = PresentationSampler(self.seed)

        def oracle() -> bool:
            pres = preabelian.delta4_instance()
            last["instance"] = pres.describe()
            return delta4_oracle_property(pres) and twice_delta4_property(pres)

        self._family(results, "delta4_coefficient_description", oracle, trials, lambda: last["instance"])

        graded = PresentationSampler(self.seed)

        def graded_trial() -> bool:
            pres = graded.presentation()
            last["instance"] = pres.describe()
            return graded_delta4_property(pres)

        self._family(results, "graded_delta4_equals_gamma4", graded_trial, trials, lambda: last["instance"])

        sjogren = PresentationSampler(self.seed)

        def sjogren_trial() -> bool:
            for n in (1, 2, 3):
                ctx = sjogren.context(2, n + 1)
                relators = sjogren.relator_set(ctx)
                last["instance"] = f"n={n}: " + "; ".join(ctx.format_vec(r) for r in relators)
                if not sjogren_equality_check(ctx, relators, n):
                    return False
            return True

        self._family(results, "sjogren_equality", sjogren_trial, trials, lambda: last["instance"])

        sandwich = PresentationSampler(self.seed)

        def sandwich_trial() -> bool:
            ctx = sandwich.context(2, 4)
            relator = sandwich.homogeneous_relator(ctx, sandwich.rng.choice((1, 2)))
            last["instance"] = ctx.format_vec(relator)
            return bool(sandwich_check(ctx, [relator]))

        self._family(results, "sandwich", sandwich_trial, trials, lambda: last["instance"])
        return self._finish(results, start_time)


def run_invariant_suite(pres: Optional[Presentation] = None, seed: int = 0,
                        trials: int = 20) -> Dict[str, Any]:
    """
    Run the suite as a standalone function.

    Args:
        pres: If provided, also check this presentation
        seed: Seed of the random families
        trials: Instances per random family

    Returns:
        Dict[str, Any]: ``presentation`` and ``random`` result blocks and overall ``passed``
    """
    suite = InvariantSuite(seed=seed, trials=trials)
    results: Dict[str, Any] = {}
    if pres is not None:
        logger.info("Running invariant suite on the given presentation...")
        results["presentation"] = suite.check_presentation(pres)
    logger.info(f"Running random families with seed {seed}...")
    results["random"] = suite.run_random_families()
    results["passed"] = all(block["passed"] for block in results.values())
    return results
