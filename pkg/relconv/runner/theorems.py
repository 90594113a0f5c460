"""The verification pipeline behind ``relconv verify``.

Checks run in a fixed order and report one line each. Structural
failures (axioms, reduction) stop the pipeline since later checks need
the quotient. Classifier verdicts are informational; non-associativity is
an expected finding for systems that are not strongly split.
"""

import logging
from collections.abc import Callable
from typing import Any, Optional

from relconv.core import actions
from relconv.core.checks import CheckResult
from relconv.core.convolution import (
    check_associativity,
    check_invariant_subalgebra,
    check_l2conv_lemma,
    check_split_factorization,
    check_support_in_constraint_set,
    invariant_basis,
    reduce_algebra,
    relational_product_table,
    verify_ideal,
)
from relconv.core.exceptions import RelConvError, handle_errors
from relconv.core.haar import (
    RelationalHaarSystem,
    SplitResult,
    check_relational_haar,
    is_l2_invariant,
    is_split,
    is_strongly_split,
    quotient_haar,
    saturation_invariance,
)
from relconv.core.reduction import (
    QuotientData,
    fiber_projection_check,
    quotient_groupoid,
    target_source_duality,
    verify_q_morphism,
)
from relconv.core.relational_groupoid import RelationalGroupoid, check_axioms
from relconv.core.scalars import format_fraction
from relconv.core.settings import get_settings
from relconv.report.report import Report, ReportLine, Status
from relconv.runner.batch_processor import JobInfo, ThreadBatchProcessor
from relconv.utils.logger import Log

logger = logging.getLogger(__name__)

Check = Callable[[], CheckResult]


def _guarded(name: str, check: Check) -> CheckResult:
    """Turn library errors raised by a check into a failed result."""

    @handle_errors("VERIFY", log_level=logging.DEBUG)
    def run() -> CheckResult:
        return check()

    try:
        result: CheckResult = run()
    except RelConvError as e:
        witness = e.context.get("witness") if isinstance(e.context, dict) else None
        return CheckResult.fail(name, tuple(str(w) for w in witness) if witness else None, e.message)
    return result


def _run_all(checks: list[tuple[str, Check]], threads: int) -> list[CheckResult]:
    if threads <= 1:
        return [_guarded(name, check) for name, check in checks]
    collected: dict[int, CheckResult] = {}
    processor = ThreadBatchProcessor(max_threads=threads)
    for position, (name, check) in enumerate(checks):
        processor.queue(position, _guarded, name, check)

    def store(job: JobInfo) -> None:
        name = checks[job.tag][0]
        collected[job.tag] = job.result if job.ret_val == 0 else CheckResult.fail(name, None, job.stderr)

    processor.wait(store)
    return [collected[i] for i in range(len(checks))]


def check_report(g: RelationalGroupoid, file: str = "", threads: Optional[int] = None) -> Report:
    """One line per axiom."""
    report = Report("check", file)
    report.extend(check_axioms(g, threads).results, tag="axiom")
    return report


def appendix_checks(g: RelationalGroupoid) -> list[tuple[str, Check]]:
    return [
        ("fibers-match-l2", lambda: actions.fibers_match_l2(g)),
        ("class-product", lambda: actions.class_product_property(g)),
        ("fiber-translation", lambda: actions.translation_property(g)),
        ("fiber-transport", lambda: actions.transport_property(g)),
        ("action-composition", lambda: actions.action_composition_property(g)),
        ("right-action", lambda: actions.right_action_property(g)),
        ("quintuple-round-trip", lambda: actions.quintuple_round_trip(g)),
    ]


def verify(
    g: RelationalGroupoid, rhs: RelationalHaarSystem, file: str = "", threads: Optional[int] = None
) -> Report:
    """Run the whole chain from the axioms to the reduction theorem."""
    threads = get_settings().threads if threads is None else threads
    report = Report("verify", file)
    Log.enter("verify", f"verifying {g.name or file or 'definition'}")
    try:
        axioms = check_axioms(g, threads)
        report.extend(axioms.results, tag="axiom")
        if not axioms.passed:
            return report
        g = g.checked()

        try:
            qd = quotient_groupoid(g)
        except RelConvError as e:
            witness = e.context.get("witness")
            shown = tuple(str(w) for w in witness) if witness else None
            report.add(ReportLine("quotient", Status.FAIL, "reduction", e.message, shown))
            return report
        report.add(ReportLine("quotient", Status.PASS, "reduction", f"{len(qd.classes)} classes"))

        structural: list[tuple[str, Check]] = [
            ("target-source-duality", lambda: target_source_duality(g, qd)),
            ("fiber-projection", lambda: fiber_projection_check(g, qd)),
            ("q-morphism", lambda: verify_q_morphism(g, qd)),
        ]
        for result in _run_all(structural, threads):
            report.add_check(result, "reduction")
        for result in _run_all(appendix_checks(g), threads):
            report.add_check(result, "appendix")

        haar = check_relational_haar(g, rhs, qd)
        report.extend(haar.results, tag="haar")
        report.add_check(_guarded("saturation-invariance", lambda: saturation_invariance(g, rhs, qd)), "haar")
        if not haar.passed:
            return report

        strong = _classify(report, g, rhs, qd)
        _algebra(report, g, rhs, qd, strong, threads)
        return report
    finally:
        Log.exit("verify", "PASS" if report.passed else "FAIL")


def _classify(
    report: Report, g: RelationalGroupoid, rhs: RelationalHaarSystem, qd: QuotientData
) -> SplitResult:
    invariant = is_l2_invariant(g, rhs)
    split = is_split(g, rhs, qd)
    strong = is_strongly_split(g, rhs, qd)
    report.add_check(invariant, "classifier", Status.NOTE)
    report.add(ReportLine("split", Status.PASS if split else Status.NOTE, "classifier", split.detail, split.witness))
    report.add(
        ReportLine("strongly-split", Status.PASS if strong else Status.NOTE, "classifier", strong.detail, strong.witness)
    )
    implication = bool(invariant) and bool(split) if strong else True
    report.add(
        ReportLine(
            "strong-implies-split",
            Status.PASS if implication else Status.FAIL,
            "classifier",
            "" if implication else "strongly split system is not split and L2-invariant",
        )
    )
    return strong


def _algebra(
    report: Report,
    g: RelationalGroupoid,
    rhs: RelationalHaarSystem,
    qd: QuotientData,
    strong: SplitResult,
    threads: int,
) -> None:
    table = relational_product_table(g, rhs, threads)

    assoc = _guarded("associativity", lambda: check_associativity(g, rhs, threads, table))
    report.add_check(assoc, "convolution", Status.FAIL if strong else Status.EXPECTED)
    report.add_check(_guarded("support-in-C", lambda: check_support_in_constraint_set(g, rhs, table)), "convolution")
    report.add_check(_guarded("ideal", lambda: verify_ideal(g, rhs, table)), "convolution")
    report.add_check(_guarded("invariant-subalgebra", lambda: check_invariant_subalgebra(g, rhs, qd)), "convolution")

    basis = invariant_basis(g, qd)

    def lemma() -> CheckResult:
        for f1 in basis:
            for f2 in basis:
                result = check_l2conv_lemma(g, rhs, f1, f2, qd)
                if not result:
                    return result
        return CheckResult.ok("l2-convolution")

    report.add_check(_guarded("l2-convolution", lemma), "lemma")
    if strong:
        report.add_check(
            _guarded("split-factorization", lambda: check_split_factorization(g, rhs, strong.tau, qd)),  # type: ignore[arg-type]
            "lemma",
        )

    def theorem() -> CheckResult:
        result = reduce_algebra(g, rhs, qd).verify_isomorphism()
        return CheckResult(
            "reduction-theorem", result.passed, result.witness, result.detail or f"dimension {len(basis)}"
        )

    report.add_check(_guarded("reduction-theorem", theorem), "theorem")


def describe_reduction(
    g: RelationalGroupoid, qd: QuotientData, rhs: Optional[RelationalHaarSystem] = None
) -> dict[str, Any]:
    """The quotient groupoid as plain data, with ν when a Haar system is given."""
    quotient = qd.quotient
    lbl = quotient.label
    out: dict[str, Any] = {
        "constraint_set": [g.label(x) for x in g.constraint_elements],
        "classes": {lbl(cls): [g.label(x) for x in members] for cls, members in enumerate(qd.classes)},
        "objects": list(quotient.objects.labels),
        "source": {lbl(m): quotient.objects.label(quotient.source[m]) for m in quotient.morphisms},
        "target": {lbl(m): quotient.objects.label(quotient.target[m]) for m in quotient.morphisms},
        "products": [[lbl(a), lbl(b), lbl(c)] for a, b, c in quotient.products],
    }
    if rhs is not None:
        nu = quotient_haar(g, rhs, qd)
        out["nu"] = {
            quotient.objects.label(x): {lbl(m): format_fraction(w) for m, w in nu.measure(x).items()}
            for x in quotient.objects
        }
    return out
