"""Per-step checks of the inequalities the structured minimum-index rule
guarantees by construction.

For every decision the rule makes after initialization, with N the pre-pull
counts, hat-mu the pre-pull empirical means, mu* their maximum, L the
leader and a+ the chosen arm:

  LB1          log N_{a+} <= N_a KL(hat-mu_a, mu*) + log N_a  for each neighbor a of L
  LB2          N_{a+} <= N_L
  UB           N_{a+} KL(hat-mu_{a+}, mu*) <= log t
  MEMBERSHIP   a+ in {L} | neighbors(L)
  INDEX-FLOOR  the leader's index equals log N_L exactly

These are deterministic facts about the algorithm, not probabilistic
statements: any violation signals an implementation bug or a doctored
record. Real-valued comparisons use an absolute tolerance of 1e-9 to
absorb floating-point noise in index recomputation.
"""

import math
from dataclasses import dataclass

from .errors import ParameterError
from .policies import transport_kl

TOLERANCE = 1e-9

CHECK_IDS = ("LB1", "LB2", "UB", "MEMBERSHIP", "INDEX-FLOOR")


@dataclass(frozen=True)
class ViolationReport:
    run_id: str
    t: int
    check: str
    lhs: float
    rhs: float

    def line(self):
        return (
            f"VIOLATION run={self.run_id} t={self.t} check={self.check} "
            f"lhs={self.lhs!r} rhs={self.rhs!r}"
        )


def check_step(rec, graph, family, run_id=""):
    """All violations in one StepRecord; empty list when every check holds.

    The record must carry pre-pull statistics for the leader, the chosen
    arm and every neighbor of the leader (records from the structured rule
    and from the unstructured all-arms rule both do).
    """
    pos = {a: i for i, a in enumerate(rec.candidates)}
    if rec.leader not in pos or rec.chosen not in pos:
        raise ParameterError("record lacks statistics for its leader or chosen arm")
    neigh = graph.neighbors(rec.leader)
    missing = [a for a in neigh if a not in pos]
    if missing:
        raise ParameterError(f"record lacks statistics for neighbor arms {missing}")

    out = []
    mu_star = rec.mu_star
    n_chosen = rec.counts[pos[rec.chosen]]
    n_leader = rec.counts[pos[rec.leader]]
    log_n_chosen = math.log(n_chosen)

    if rec.chosen != rec.leader and rec.chosen not in neigh:
        out.append(
            ViolationReport(run_id, rec.t, "MEMBERSHIP", float(rec.chosen), float(rec.leader))
        )

    for a in neigh:
        i = pos[a]
        rhs = rec.counts[i] * transport_kl(family, rec.means[i], mu_star) + math.log(
            rec.counts[i]
        )
        if log_n_chosen > rhs + TOLERANCE:
            out.append(ViolationReport(run_id, rec.t, "LB1", log_n_chosen, rhs))
            break

    if n_chosen > n_leader:
        out.append(ViolationReport(run_id, rec.t, "LB2", float(n_chosen), float(n_leader)))

    ub_lhs = n_chosen * transport_kl(family, rec.means[pos[rec.chosen]], mu_star)
    ub_rhs = math.log(rec.t)
    if ub_lhs > ub_rhs + TOLERANCE:
        out.append(ViolationReport(run_id, rec.t, "UB", ub_lhs, ub_rhs))

    i = pos[rec.leader]
    floor = math.log(n_leader)
    lead_index = n_leader * transport_kl(family, rec.means[i], mu_star) + floor
    if abs(lead_index - floor) > TOLERANCE:
        out.append(ViolationReport(run_id, rec.t, "INDEX-FLOOR", lead_index, floor))

    return out


def check_trace(records, graph, family, run_id=""):
    """Concatenated check_step results over an iterable of records."""
    out = []
    for rec in records:
        out.extend(check_step(rec, graph, family, run_id))
    return out
