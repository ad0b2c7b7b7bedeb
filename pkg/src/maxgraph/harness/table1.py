"""The five-family by five-property matrix, assembled from the suites."""

from __future__ import annotations

from dataclasses import dataclass, field

from .suites import Context, FAIL, run_many

COLUMNS = ("D_k", "O", "ECP", "Delta", "weak_type")
FAMILIES = ("oplusK", "shiftK", "tree:k=3", "comb", "dyadic")
VERDICTS = ("verified_lb", "verified_bound", "unbounded_evidence", "paper_value_cited")

# family -> column -> (suite id, verdict when the suite passes, claim, property holds?)
PLAN = {
    "oplusK": {
        "D_k": ("prop-3.1-iii", "verified_bound", "D_2 <= 48", True),
        "O": ("prop-3.1-ii", "verified_bound", "O = 2", True),
        "ECP": ("prop-3.1-iv", "verified_bound", "C <= 48", True),
        "Delta": ("prop-3.1-i", "unbounded_evidence", "Delta = infinity", False),
        "weak_type": ("prop-3.1-v", "verified_bound", "bounded, norm <= 2", True),
    },
    "shiftK": {
        "D_k": ("prop-3.2-iii", "unbounded_evidence", "D_2 = infinity", False),
        "O": ("prop-3.2-ii", "verified_lb", "O = 5", True),
        "ECP": ("prop-3.2-iv", "unbounded_evidence", "C = infinity", False),
        "Delta": ("prop-3.2-i", "unbounded_evidence", "Delta = infinity", False),
        "weak_type": ("prop-3.2-v", "verified_bound", "bounded, norm <= 5", True),
    },
    "tree:k=3": {
        "D_k": ("prop-3.3-iii", "unbounded_evidence", "D_2 = infinity", False),
        "O": ("prop-3.3-ii", "unbounded_evidence", "O = infinity (k >= 3)", False),
        "ECP": ("prop-3.3-iv", "verified_bound", "C = 1", True),
        "Delta": ("prop-3.3-i", "verified_bound", "Delta = k", True),
        "weak_type": ("prop-3.3-v", "paper_value_cited", "bounded, uniformly in k", True),
    },
    "comb": {
        "D_k": ("prop-3.4-iii", "unbounded_evidence", "D_2 = infinity", False),
        "O": ("prop-3.4-ii", "unbounded_evidence", "O = infinity", False),
        "ECP": ("prop-3.4-iv", "unbounded_evidence", "C = infinity", False),
        "Delta": ("prop-3.4-i", "verified_bound", "Delta = 3", True),
        "weak_type": ("prop-3.4-v", "unbounded_evidence", "not bounded, even on deltas", False),
    },
    "dyadic": {
        "D_k": ("prop-3.5-iii", "verified_bound", "D_2 <= 48", True),
        "O": ("prop-3.5-ii", "unbounded_evidence", "O = infinity", False),
        "ECP": ("prop-3.5-iv", "verified_bound", "C <= 24", True),
        "Delta": ("prop-3.5-i", "verified_bound", "Delta = 3", True),
        "weak_type": ("prop-3.5-v", "verified_bound", "bounded, norm <= 72", True),
    },
}

# Implication entries of the summary table: row property => column property.
# "No" entries name the family that separates them; "Yes" entries name the
# suite establishing them.
IMPLICATIONS = [
    ("D_k", "O", "No", "dyadic"), ("D_k", "ECP", "Yes", "rem-2.6"),
    ("D_k", "Delta", "No", "oplusK"), ("D_k", "weak_type", "Yes", "eq-2"),
    ("O", "D_k", "No", "shiftK"), ("O", "ECP", "No", "shiftK"),
    ("O", "Delta", "No", "oplusK"), ("O", "weak_type", "Yes", "eq-2"),
    ("ECP", "D_k", "No", "tree:k=3"), ("ECP", "O", "No", "tree:k=3"),
    ("ECP", "Delta", "No", "oplusK"), ("ECP", "weak_type", "On deltas", "prop-2.9"),
    ("Delta", "D_k", "No", "tree:k=3"), ("Delta", "O", "No", "tree:k=3"),
    ("Delta", "ECP", "No", "comb"), ("Delta", "weak_type", "No", "comb"),
    ("weak_type", "D_k", "No", "tree:k=3"), ("weak_type", "O", "No", "tree:k=3"),
    ("weak_type", "ECP", "No", "shiftK"), ("weak_type", "Delta", "No", "oplusK"),
]


@dataclass
class Cell:
    family: str
    column: str
    suite: str
    verdict: str
    paper_claim: str
    holds: bool
    failure: bool
    evidence: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"family": self.family, "column": self.column, "suite": self.suite,
                "verdict": self.verdict, "paper_claim": self.paper_claim,
                "property_holds": self.holds, "FAILURE": self.failure,
                "evidence": self.evidence}


@dataclass
class Table1Report:
    rows: dict  # family -> column -> Cell
    implications: list

    @property
    def failures(self) -> list:
        out = [c for r in self.rows.values() for c in r.values() if c.failure]
        return out

    def as_dict(self) -> dict:
        return {
            "columns": list(COLUMNS),
            "families": list(self.rows),
            "rows": {f: {c: cell.as_dict() for c, cell in r.items()} for f, r in self.rows.items()},
            "implications": self.implications,
            "failure_cells": len(self.failures),
        }


def _evidence(rep) -> list:
    return [{"step": s.name, "status": s.status, "detail": s.detail} for s in rep.steps]


def table1_report(ctx: Context | None = None, threads: int = 1, families=FAMILIES) -> Table1Report:
    ctx = ctx or Context()
    jobs = [(f, c) for f in families for c in COLUMNS]
    reports = run_many([PLAN[f][c][0] for f, c in jobs], ctx, threads)
    rows: dict = {f: {} for f in families}
    for (f, c), rep in zip(jobs, reports):
        sid, verdict, claim, holds = PLAN[f][c]
        failed = any(s.status == FAIL for s in rep.steps)
        rows[f][c] = Cell(f, c, sid, verdict, claim, holds, failed, _evidence(rep))
    return Table1Report(rows, _implications(rows))


def _implications(rows) -> list:
    out = []
    for a, b, entry, ref in IMPLICATIONS:
        if entry == "No":
            cell = rows.get(ref)
            if cell is None:
                status = "not_run"
            else:
                sep = cell[a].holds and not cell[b].holds
                ok = sep and not cell[a].failure and not cell[b].failure
                status = "separated" if ok else "FAILURE"
        elif entry == "Yes":
            bad = [f for f, r in rows.items() if r[a].holds and not r[b].holds]
            status = "consistent" if not bad else "FAILURE"
        else:
            status = "see " + ref
        out.append({"from": a, "to": b, "entry": entry, "reference": ref, "status": status})
    return out
