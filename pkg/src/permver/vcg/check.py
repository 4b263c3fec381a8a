"""Discharging a generated verification condition: one solver query for the
whole method, plus an optional per-label localization pass that re-checks
each obligation independently to report every failing one."""

from __future__ import annotations

import time

from ..se.state import Deadline, TaskTimeout, Verdict, VerificationOutcome
from ..smt import Session
from .encode import Vc


def check_vc(vc: Vc, session: Session, deadline: Deadline | None = None,
             report_all: bool = True) -> VerificationOutcome:
    deadline = deadline or Deadline(None)
    start = time.perf_counter()
    queries_before = session.query_count
    session.push()
    try:
        for line in vc.declarations:
            session.assert_raw(line)
        for h in vc.hypotheses:
            session.assert_term(h)
        deadline.check()
        result = session.check_entailed(vc.goal, deadline.remaining_ms())
        if result.is_timeout:
            return _outcome(vc, Verdict.TIMEOUT, [], start, session, queries_before)
        if result.is_unsat:
            return _outcome(vc, Verdict.VERIFIED, [], start, session, queries_before)
        errors = []
        if report_all:
            for lo in vc.labels.values():
                deadline.check()
                sub = session.check_entailed(lo.guarded, deadline.remaining_ms())
                if sub.is_timeout:
                    return _outcome(vc, Verdict.TIMEOUT, [], start, session, queries_before)
                if not sub.is_unsat:
                    errors.append(lo.obligation)
        if not errors:
            # the conjunction failed but no single label could be blamed
            # (e.g. an unknown verdict); report the first obligation
            first = next(iter(vc.labels.values()), None)
            if first is not None:
                errors.append(first.obligation)
        return _outcome(vc, Verdict.ERRORS if errors else Verdict.VERIFIED,
                        errors, start, session, queries_before)
    except TaskTimeout:
        return _outcome(vc, Verdict.TIMEOUT, [], start, session, queries_before)
    finally:
        try:
            if session.alive:
                session.pop()
            else:
                session.depth = max(0, session.depth - 1)
        except Exception:
            pass


def _outcome(vc: Vc, verdict: Verdict, errors, start, session, queries_before):
    return VerificationOutcome(
        method=vc.method,
        verdict=verdict,
        errors=errors,
        wall_time_s=time.perf_counter() - start,
        query_count=session.query_count - queries_before,
    )
