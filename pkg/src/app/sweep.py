"""Property suites run by `sweep`.

Every suite counts the checks it performs and records a failure entry for
each violated property instead of raising.
"""

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from fractions import Fraction
import logging
from math import comb
from typing import Any, Callable

import numpy as np

from app.common import APP_START_TIME, PerfTimer, SweepConfig
from core.canonical import (
    act_autl,
    act_torus,
    autl_reduce,
    is_slice_form,
    random_autl_element,
    random_generic_pair,
    random_torus_element,
    stabilizer_solve,
    t_reduce,
)
from core.cohom import euler_from_h, h_line_bundle
from core.errors import RelstabError
from core.geom import (
    ChernData,
    ChowClass,
    canonical_class,
    euler_characteristic,
    explicit_todd_class,
    grr_pushforward,
    hyperplane_class,
    line_bundle_character,
    total_todd_class,
)
from core.monad import (
    expected_dims,
    monad_chern,
    monad_complete,
    monad_compose_check,
    pointwise_check,
    pullback_p2_monad,
    random_degree_u_matrix,
    restrict_to_lambda,
)
from core.stability import (
    FibrationFrame,
    SheafNumData,
    hodge_inequality_check,
    standard_c2,
    threshold_cf,
)
from core.strata import (
    check_ineq_fg,
    dim_end,
    enumerate_bvectors,
    enumerate_split_types,
    generic_split,
    moduli_dims,
)
from core.variety import VarietyTag

HIRZEBRUCH_RANGE = range(4)
BUNDLE_TWISTS = ((0, 0), (0, 1), (1, 1), (1, 2), (2, 3))
CANONICAL_SHAPES = ((2, 3), (2, 4), (3, 5), (3, 7))
COMPLETION_SHAPES = ((2, 1), (2, 2), (3, 2))
COMPLETION_TWISTS = ((0, 0), (0, 1))


def model_varieties() -> list[VarietyTag]:
    """Return Y_0..Y_3 and the Y_{a,b} of the sweeps."""
    return [VarietyTag.hirzebruch(ell) for ell in HIRZEBRUCH_RANGE] + [
        VarietyTag.p2_bundle(a, b) for a, b in BUNDLE_TWISTS
    ]


@dataclass
class SuiteResult:
    """Checked count and failures of one suite."""

    name: str
    checked: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """Return True when nothing failed."""
        return not self.failures

    def check(self, condition: bool, **context: Any) -> None:
        """Count one check and record a failure when it does not hold."""
        self.checked += 1
        if not condition:
            logging.getLogger("sweep").error("%s failed: %s", self.name, context)
            self.failures.append({k: str(v) for k, v in context.items()})

    def __str__(self) -> str:
        """Return a one-line summary."""
        return (
            f"suite: {self.name} "
            f"checked:{self.checked} "
            f"failures:{len(self.failures)}"
        )


def _log_progress(
    logger: logging.Logger, name: str, total: int, count: int, start_time: datetime
) -> int:
    if count == 0:
        logger.info("starting %s (%s cases)", name, total)
    count += 1
    if count % 100 == 0:
        time_diff = datetime.now() - start_time
        throughput = count / max(time_diff.total_seconds(), 1e-9)
        remaining = timedelta(seconds=(total - count) / throughput)
        logger.debug(
            "heartbeat: %s %s%% %s/%s %s/s %s remaining",
            name,
            round(100 * count / total, 2),
            count,
            total,
            round(throughput, 2),
            remaining,
        )
    return count


def suite_grr(conf: SweepConfig) -> SuiteResult:
    """ch(pi_! F) = (r, -n) for c1 = 0, c2 = n*pt on Y_ell."""
    result = SuiteResult("grr")
    for ell in HIRZEBRUCH_RANGE:
        v = VarietyTag.hirzebruch(ell)
        for r in range(1, 6):
            for n in range(9):
                pushed = grr_pushforward(ChernData.from_chern(v, r, c2=standard_c2(v, n)))
                result.check(
                    pushed.rank == r and pushed.ch1.top == -n,
                    variety=v,
                    r=r,
                    n=n,
                    got=(pushed.rank, pushed.ch1.top),
                )
    return result


def _chi_end_expected(v: VarietyTag, r: int, n: int) -> int:
    if v.dim == 2:
        return -2 * r * n + r * r
    m = 2 * (1 + v.twist_sum) * n * r - r * r + 1
    return 1 - m


def suite_euler(conf: SweepConfig) -> SuiteResult:
    """chi(End F) = r^2 - 2rn on Y_ell and 1 - m on Y_{a,b}."""
    result = SuiteResult("euler")
    cases = list(conf.get_chern_cases()[0])
    for v in model_varieties():
        for r, n in cases:
            f = ChernData.from_chern(v, r, c2=standard_c2(v, n))
            chi = euler_characteristic(f.endomorphisms())
            expected = _chi_end_expected(v, r, n)
            result.check(chi == expected, variety=v, r=r, n=n, chi=chi, expected=expected)
    return result


def suite_twist(conf: SweepConfig) -> SuiteResult:
    """chi(S(-u-v)) = 0 for c1 = 0, c2 = c*u^2 with the closed-form Todd class."""
    result = SuiteResult("twist")
    for a, b in BUNDLE_TWISTS:
        v = VarietyTag.p2_bundle(a, b)
        todd = explicit_todd_class(v)
        result.check(todd == total_todd_class(v), variety=v, check="todd")
        line = -(hyperplane_class(v) + ChowClass.of(v, {"v": 1}))
        for s in range(1, 7):
            for c in range(9):
                f = ChernData.from_chern(v, s, c2=ChowClass.of(v, {"u2": c}))
                chi = (f.twist(line).character() * todd).top
                result.check(chi == 0, variety=v, rank=s, c2=c, chi=chi)
    return result


def _random_divisor(v: VarietyTag, rng: np.random.Generator) -> ChowClass:
    coords = [int(x) for x in rng.integers(-10, 11, size=len(v.ring_generators))]
    return ChowClass.divisor(v, *coords)


def suite_hodge(conf: SweepConfig) -> SuiteResult:
    """The Hodge-index inequality on random divisor classes and c in [0, 20]."""
    logger = logging.getLogger("sweep")
    result = SuiteResult("hodge")
    varieties = model_varieties()
    total = conf.hodge_samples * len(varieties)
    count, start = 0, datetime.now()
    for index, v in enumerate(varieties):
        rng = np.random.default_rng((conf.seed, index))
        frame = FibrationFrame.standard(v)
        for _ in range(conf.hodge_samples):
            count = _log_progress(logger, "hodge", total, count, start)
            xi = _random_divisor(v, rng)
            c = Fraction(int(rng.integers(0, 2001)), 100)
            check = hodge_inequality_check(frame, xi, c)
            result.check(check.holds, variety=v, xi=xi, c=c, lhs=check.lhs, rhs=check.rhs)
    return result


def suite_threshold(conf: SweepConfig) -> SuiteResult:
    """c_F = r(r-1)n on Y_ell and r(r-1)n(a+b) on Y_{a,b}."""
    result = SuiteResult("threshold")
    cases = list(conf.get_chern_cases()[0])
    for v in model_varieties():
        frame = FibrationFrame.standard(v)
        scale = v.twist_sum if v.dim == 3 else 1
        for r, n in cases:
            s = SheafNumData.with_c2(v, r, standard_c2(v, n))
            got = threshold_cf(frame, s)
            result.check(got == r * (r - 1) * n * scale, variety=v, r=r, n=n, got=got)
    return result


def suite_strata(conf: SweepConfig) -> SuiteResult:
    """dim End bounds, moduli-dimension identity, the quotient inequality and b-vector counts."""
    result = SuiteResult("strata")
    for r in range(1, 6):
        for n_f in range(13):
            generic = generic_split(r, n_f)
            for t in enumerate_split_types(r, n_f):
                d = dim_end(t)
                result.check(
                    d >= r * r and (d == r * r) == (t == generic),
                    split=t,
                    dim_end=d,
                )
    for r in range(2, 7):
        for n in range(r, 13):
            result.check(moduli_dims(r, n).consistent, r=r, n=n)
            for r_prime in range(1, r):
                for n_prime in range(r_prime, n + 1):
                    result.check(
                        check_ineq_fg(r, n, r_prime, n_prime),
                        case=(r, n, r_prime, n_prime),
                    )
    for n in range(1, 9):
        for n_f in range(1, n + 1):
            count = len(enumerate_bvectors(n, n_f))
            result.check(count == comb(n - 1, n_f - 1), n=n, n_f=n_f, count=count)
    return result


def suite_canonical(conf: SweepConfig) -> SuiteResult:
    """Slice reduction: success, idempotence, orbit constancy, trivial stabilizer."""
    logger = logging.getLogger("sweep")
    result = SuiteResult("canonical")
    total = conf.canon_seeds * len(CANONICAL_SHAPES)
    count, start = 0, datetime.now()
    for r, n in CANONICAL_SHAPES:
        for k in range(conf.canon_seeds):
            count = _log_progress(logger, "canonical", total, count, start)
            rng = np.random.default_rng((conf.seed, r, n, k))
            e = random_generic_pair(r, n, rng)
            case = {"shape": (r, n), "seed": k}
            try:
                reduced = autl_reduce(e)
                canonical = reduced.canonical
                result.check(is_slice_form(canonical), **case, check="slice form")
                result.check(
                    act_autl(reduced.g_used, e) == canonical, **case, check="g_used"
                )
                again = autl_reduce(canonical)
                result.check(
                    again.canonical == canonical and again.g_used.is_identity(),
                    **case,
                    check="idempotent",
                )
                result.check(
                    stabilizer_solve(canonical).is_trivial, **case, check="stabilizer"
                )
                scaled = t_reduce(e).scaled
                for j in range(conf.canon_group_elements):
                    g = random_autl_element(e.r1, e.r2, rng)
                    moved = autl_reduce(act_autl(g, e)).canonical
                    result.check(moved == canonical, **case, element=j, check="orbit")
                    t = random_torus_element(n, rng)
                    rescaled = t_reduce(act_torus(t, e)).scaled
                    result.check(rescaled == scaled, **case, element=j, check="torus")
            except RelstabError as err:
                result.check(False, **case, error=type(err).__name__, message=err)
    return result


def suite_monad(conf: SweepConfig) -> SuiteResult:
    """Pulled-back P2 monad, completions of random A, Chern classes, dimensions."""
    logger = logging.getLogger("sweep")
    result = SuiteResult("monad")
    pullback = pullback_p2_monad(VarietyTag.p2_bundle(0, 0))
    result.check(monad_compose_check(pullback).ok, check="pullback compose")
    report = pointwise_check(pullback, conf.monad_samples, conf.seed)
    result.check(
        report.a_injective and report.b_surjective,
        check="pullback pointwise",
        failures=len(report.failures),
    )
    result.check(restrict_to_lambda(pullback).trivial_on_lambda, check="pullback lambda")
    for a, b in COMPLETION_TWISTS:
        v = VarietyTag.p2_bundle(a, b)
        for r, n in COMPLETION_SHAPES:
            for k in range(conf.monad_seeds):
                rng = np.random.default_rng((conf.seed, a, b, r, n, k))
                a_matrix = random_degree_u_matrix(v, r + 2 * n, n, rng)
                for m in monad_complete(v, r, n, a_matrix):
                    result.check(
                        monad_compose_check(m).ok,
                        variety=v,
                        shape=(r, n),
                        seed=k,
                        check="completion",
                    )
    twists, total = conf.get_twist_cases()
    count, start = 0, datetime.now()
    for a, b in twists:
        count = _log_progress(logger, "monad", total, count, start)
        v = VarietyTag.p2_bundle(a, b)
        u2 = ChowClass.of(v, {"u2": 1})
        zero = ChowClass.zero(v)
        for r in range(1, 6):
            for n in range(6):
                got = monad_chern(v, r, n)
                result.check(
                    got == (zero, u2.scale(n), zero), variety=v, r=r, n=n, got=got
                )
        ranks, _ = conf.get_rank_cases()
        for r, n in ranks:
            result.check(
                expected_dims(a, b, r, n).consistent,
                variety=v,
                r=r,
                n=n,
                check="dimension counts",
            )
    return result


def suite_cohom(conf: SweepConfig) -> SuiteResult:
    """Euler consistency and Serre duality of line-bundle cohomology."""
    logger = logging.getLogger("sweep")
    result = SuiteResult("cohom")
    varieties = [VarietyTag.p1(), VarietyTag.p2(), *model_varieties()]
    total = conf.cohom_samples * len(varieties)
    count, start = 0, datetime.now()
    for index, v in enumerate(varieties):
        rng = np.random.default_rng((conf.seed, 1000 + index))
        kappa = canonical_class(v)
        for _ in range(conf.cohom_samples):
            count = _log_progress(logger, "cohom", total, count, start)
            coords = [int(x) for x in rng.integers(-6, 7, size=len(v.ring_generators))]
            cls = ChowClass.divisor(v, *coords)
            h = h_line_bundle(v, cls)
            chi = euler_characteristic(line_bundle_character(cls))
            result.check(euler_from_h(h) == chi, variety=v, cls=cls, h=h, chi=chi)
            dual = h_line_bundle(v, kappa - cls)
            result.check(h == dual[::-1], variety=v, cls=cls, h=h, dual=dual)
    return result


SUITE_FUNCTIONS: dict[str, Callable[[SweepConfig], SuiteResult]] = {
    "grr": suite_grr,
    "euler": suite_euler,
    "twist": suite_twist,
    "hodge": suite_hodge,
    "threshold": suite_threshold,
    "strata": suite_strata,
    "canonical": suite_canonical,
    "monad": suite_monad,
    "cohom": suite_cohom,
}


def run_sweep(conf: SweepConfig) -> list[SuiteResult]:
    """Run the selected suites in order and log a summary line per suite."""
    logger = logging.getLogger("sweep")
    results = []
    with PerfTimer(APP_START_TIME, logger):
        for name in conf.selected_suites():
            suite = SUITE_FUNCTIONS[name](conf)
            logger.info("%s", suite)
            results.append(suite)
    return results
