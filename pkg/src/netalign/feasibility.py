"""Deciding the best symmetric rate from the graph alone.

The three diagnostic ratios p_i and eta (see `netalign.xfer`) are rational
functions of the coding coefficients, yet whether they degenerate is purely
a property of the topology.  The graph-side criteria implemented here:

* eta is identically 1 exactly when the last shared bottleneck out of
  sender 2 toward receivers {1, 3} coincides with the one out of sender 3
  toward receivers {1, 2}, and likewise for the first shared bottlenecks
  back toward those receivers (the alpha/beta edges of `netalign.cuts`).
* p_i = 1 and p_i = eta each correspond to one specific two-sender/two-
  receiver min-cut being a single edge.
* The third relations (p_1 = eta/(1+eta), p_2 = 1+eta, p_3 = 1+eta) hold
  exactly when two particular alpha edges are distinct, mutually
  unreachable, separately bottleneck the cross traffic, and jointly cut the
  session's own sender from its receiver.

With every sender connected to every receiver the network is then Type I
(some p_i in {1, eta}; symmetric rate 1/3), Type II (a third relation only;
rate 2/5) or Type III (no coupling; rate 1/2).  When some sender-receiver
pair is disconnected the vanished transfer functions erase alignment
constraints instead of tightening them; such networks are flagged Reduced
and the surviving decode ratios of the two-slot scheme are tested for
non-constancy at random points, because here the graph criteria above no
longer apply.

Every graph verdict can be cross-checked numerically: each relation has a
denominator-free polynomial identity that is evaluated at random
assignments, with the usual degree-over-field-size false-accept bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .cuts import alpha_beta, alpha_edge, bottleneck_set, cut_by_pair, parallel
from .dag import Scenario
from .gf2m import Field, field as shared_field
from .xfer import (
    COUPLING_IDENTITIES,
    CodingAssignment,
    ResampleLimitError,
    SessionPair,
    evaluate_identity_sides,
    identity_degree_bound,
    session_transfer_matrix,
)

Triple = Tuple[bool, bool, bool]


@dataclass
class CouplingReport:
    """Graph verdicts for all coupling relations, plus raw connectivity."""

    connectivity: Dict[SessionPair, bool]
    eta_is_one: Optional[bool]
    p_is_one: Optional[Triple]
    p_is_eta: Optional[Triple]
    third_relation: Optional[Triple]

    @property
    def fully_connected(self) -> bool:
        return all(self.connectivity.values())


@dataclass
class NetworkType:
    kind: str  # "I" | "II" | "III" | "Reduced"
    optimal_rate: Fraction
    eta_is_one: Optional[bool] = None
    half_feasible: Optional[bool] = None  # Reduced networks only


def connectivity_map(sc: Scenario) -> Dict[SessionPair, bool]:
    out = {}
    for j in (1, 2, 3):
        reach = sc.reachable_edges(sc.sigma(j))
        for i in (1, 2, 3):
            out[(j, i)] = sc.tau(i) in reach
    return out


def check_eta_one(sc: Scenario, cache: dict | None = None) -> bool:
    """Graph test for eta identically 1 (needs full cross connectivity)."""
    ab213 = alpha_beta(sc, 2, 1, 3, cache)
    ab312 = alpha_beta(sc, 3, 1, 2, cache)
    return ab213.alpha == ab312.alpha and ab213.beta == ab312.beta


def check_pi_relations(sc: Scenario) -> Tuple[Triple, Triple]:
    """Min-cut tests for p_i = 1 and p_i = eta, i = 1..3."""
    p_is_one = (
        cut_by_pair(sc, (1, 2), (1, 3)) == 1,
        cut_by_pair(sc, (1, 2), (2, 3)) == 1,
        cut_by_pair(sc, (2, 3), (1, 3)) == 1,
    )
    p_is_eta = (
        cut_by_pair(sc, (1, 3), (1, 2)) == 1,
        cut_by_pair(sc, (2, 3), (1, 2)) == 1,
        cut_by_pair(sc, (1, 3), (2, 3)) == 1,
    )
    return p_is_one, p_is_eta


def check_third_relation(sc: Scenario, i: int, cache: dict | None = None) -> bool:
    """Graph test for session i's third coupling relation.

    For i cyclically followed by j and k, the four conditions: the last
    shared bottleneck out of sender k toward {tau_i, tau_j} also bottlenecks
    sigma_i-to-tau_j traffic; the one out of sender j toward {tau_i, tau_k}
    also bottlenecks sigma_i-to-tau_k traffic; the two edges are distinct and
    mutually unreachable; and removing both disconnects sigma_i from tau_i.
    """
    j = i % 3 + 1
    k = j % 3 + 1
    a_kij = alpha_edge(sc, k, i, j, cache)
    a_jik = alpha_edge(sc, j, i, k, cache)
    if a_kij == a_jik:
        return False
    if a_kij not in bottleneck_set(sc, sc.sigma(i), sc.tau(j), cache):
        return False
    if a_jik not in bottleneck_set(sc, sc.sigma(i), sc.tau(k), cache):
        return False
    if not parallel(sc, a_kij, a_jik):
        return False
    return not sc.connects(sc.sigma(i), sc.tau(i), banned=(a_kij, a_jik))


RATE_BY_KIND = {"I": Fraction(1, 3), "II": Fraction(2, 5), "III": Fraction(1, 2)}


def classify(sc: Scenario, *, field_bits: int = 32, trials: int = 20,
             seed: int = 0) -> Tuple[CouplingReport, NetworkType]:
    """Full taxonomy decision.

    Fully connected scenarios are decided by graph checks alone and the
    randomness parameters are unused; Reduced scenarios fall back to
    randomized non-constancy tests of the surviving decode ratios.
    """
    conn = connectivity_map(sc)
    if not all(conn.values()):
        report = CouplingReport(conn, None, None, None, None)
        return report, _classify_reduced(sc, conn, field_bits, trials, seed)

    cache: dict = {}
    eta_one = check_eta_one(sc, cache)
    p_is_one, p_is_eta = check_pi_relations(sc)
    third = tuple(check_third_relation(sc, i, cache) for i in (1, 2, 3))
    report = CouplingReport(conn, eta_one, p_is_one, p_is_eta, third)

    if any(p_is_one) or any(p_is_eta):
        kind = "I"
    elif any(third):
        kind = "II"
    else:
        kind = "III"
    return report, NetworkType(kind, RATE_BY_KIND[kind], eta_is_one=eta_one)


# -- randomized identity testing --------------------------------------------


@dataclass
class IdentityVerdict:
    name: str
    all_equal: bool
    trials: int
    degree_bound: int
    false_accept_bound: float


def randomized_identity_check(sc: Scenario, name: str, field: Field,
                              trials: int, rng: random.Random) -> IdentityVerdict:
    """Evaluate a cleared coupling identity at random assignments.

    The reported false-accept bound trials * d / 2^m is the chance budget
    for a non-identity passing all trials (union bound over single-trial
    Schwartz-Zippel misses; each factor is already conservative).
    """
    d = identity_degree_bound(sc, name)
    all_equal = True
    used = 0
    for _ in range(trials):
        x = CodingAssignment.random(sc, field, rng)
        m = session_transfer_matrix(sc, x, field)
        lhs, rhs = evaluate_identity_sides(name, m, field)
        used += 1
        if lhs != rhs:
            all_equal = False
            break
    bound = min(1.0, trials * d / field.order)
    return IdentityVerdict(name, all_equal, used, d, bound)


def cross_check_verdicts(sc: Scenario, *, field_bits: int = 32, trials: int = 20,
                         seed: int = 0) -> Dict[str, IdentityVerdict]:
    """Randomized verdicts for all ten coupling relations."""
    f = shared_field(field_bits)
    rng = random.Random(seed)
    return {name: randomized_identity_check(sc, name, f, trials, rng)
            for name in COUPLING_IDENTITIES}


def report_identity_flags(report: CouplingReport) -> Dict[str, bool]:
    """The graph verdicts keyed like COUPLING_IDENTITIES (full connectivity only)."""
    if not report.fully_connected:
        raise ValueError("graph verdicts are only defined under full connectivity")
    flags = {"eta_is_one": report.eta_is_one}
    for i in (1, 2, 3):
        flags[f"p{i}_is_one"] = report.p_is_one[i - 1]
        flags[f"p{i}_is_eta"] = report.p_is_eta[i - 1]
        flags[f"third_relation_{i}"] = report.third_relation[i - 1]
    return flags


# -- reduced connectivity ----------------------------------------------------


@dataclass
class ReducedStructure:
    """Shape of the two-slot free-choice scheme on a reduced network.

    Each sender j transmits profile_j(x) * (its theta base vector); bases
    are shared exactly when an alignment constraint chains two senders
    together.  Profiles are ratios of transfer-function products, stored as
    (numerator pairs, denominator pairs).
    """

    present: Dict[SessionPair, bool]
    base: Tuple[int, int, int]  # theta block index per sender
    profile_num: Tuple[Tuple[SessionPair, ...], ...]
    profile_den: Tuple[Tuple[SessionPair, ...], ...]
    chain_conflict: bool  # all three alignment constraints active at once


def reduced_structure(sc: Scenario, present: Dict[SessionPair, bool] | None = None) -> ReducedStructure:
    if present is None:
        present = connectivity_map(sc)
    # Alignment constraint at receiver i is real only when both of its
    # interferers actually reach it.
    a1 = present[(2, 1)] and present[(3, 1)]
    a2 = present[(1, 2)] and present[(3, 2)]
    a3 = present[(1, 3)] and present[(2, 3)]

    num: list = [(), None, None]
    den: list = [(), None, None]
    base = [0, None, None]

    if a3:  # V2 chained to V1 through receiver 3
        num[1], den[1], base[1] = ((1, 3),), ((2, 3),), 0
    if a2:  # V3 chained to V1 through receiver 2
        num[2], den[2], base[2] = ((1, 2),), ((3, 2),), 0
    if a1 and base[1] is None and base[2] is not None:
        # receiver 1 alignment drags V2 along with the already pinned V3
        num[1] = ((3, 1),) + num[2]
        den[1] = ((2, 1),) + den[2]
        base[1] = base[2]
    if base[1] is None:
        num[1], den[1], base[1] = (), (), 1
    if a1 and base[2] is None:
        # ...or drags V3 along with V2, pinned or free
        num[2] = ((2, 1),) + num[1]
        den[2] = ((3, 1),) + den[1]
        base[2] = base[1]
    if base[2] is None:
        num[2], den[2], base[2] = (), (), 2

    return ReducedStructure(
        present=present,
        base=tuple(base),
        profile_num=tuple(num),
        profile_den=tuple(den),
        chain_conflict=a1 and a2 and a3,
    )


def _ratio_nonconstant(sc: Scenario, num: Tuple[SessionPair, ...],
                       den: Tuple[SessionPair, ...], field: Field,
                       trials: int, rng: random.Random,
                       resample_limit: int = 100) -> bool:
    values = set()
    misses = 0
    valid = 0
    while valid < trials:
        x = CodingAssignment.random(sc, field, rng)
        m = session_transfer_matrix(sc, x, field)
        d = 1
        for pair in den:
            d = field.mul(d, m[pair])
        if d == 0:
            misses += 1
            if misses >= resample_limit:
                raise ResampleLimitError(
                    f"denominator stayed zero for {resample_limit} straight draws")
            continue
        misses = 0
        n = 1
        for pair in num:
            n = field.mul(n, m[pair])
        values.add(field.div(n, d))
        if len(values) > 1:
            return True
        valid += 1
    return False


def reduced_receiver_conditions(sc: Scenario, rs: ReducedStructure):
    """Per-receiver decode requirement of the two-slot scheme.

    Yields (receiver, kind, payload): kind "dead" (no desired path),
    "conflict" (two interferers that cannot be aligned), "free" (nothing to
    test) or "ratio" (payload = cleared num/den pair lists that must stay a
    non-constant ratio).
    """
    for i in (1, 2, 3):
        if not rs.present[(i, i)]:
            yield i, "dead", None
            continue
        interferers = [j for j in (1, 2, 3) if j != i and rs.present[(j, i)]]
        if not interferers:
            yield i, "free", None
            continue
        if i == 1 and len(interferers) == 2 and rs.chain_conflict:
            # V2 and V3 are both pinned to V1, so nothing is left to align
            # the two interference columns at receiver 1 with each other;
            # they coincide anyway exactly when eta is identically 1.
            if not check_eta_one(sc):
                yield i, "conflict", None
                continue
        j = interferers[0]
        gi_num, gi_den = rs.profile_num[i - 1], rs.profile_den[i - 1]
        gj_num, gj_den = rs.profile_num[j - 1], rs.profile_den[j - 1]
        if rs.base[i - 1] != rs.base[j - 1]:
            yield i, "free", None
            continue
        num = ((i, i),) + gi_num + gj_den
        den = ((j, i),) + gj_num + gi_den
        yield i, "ratio", (num, den)


def _classify_reduced(sc: Scenario, conn: Dict[SessionPair, bool],
                      field_bits: int, trials: int, seed: int) -> NetworkType:
    rs = reduced_structure(sc, conn)
    f = shared_field(field_bits)
    rng = random.Random(seed)
    dead = False
    feasible = True
    for _, kind, payload in reduced_receiver_conditions(sc, rs):
        if kind == "dead":
            dead = True
        elif kind == "conflict":
            feasible = False
        elif kind == "ratio":
            num, den = payload
            if not _ratio_nonconstant(sc, num, den, f, trials, rng):
                feasible = False
    if dead:
        # A session with no path cannot carry anything, so no positive
        # symmetric rate exists, let alone 1/2.
        return NetworkType("Reduced", Fraction(0), half_feasible=False)
    if feasible:
        return NetworkType("Reduced", Fraction(1, 2), half_feasible=True)
    # The three-slot one-symbol-each scheme still works whenever every
    # session has a path, so 1/3 remains achievable.
    return NetworkType("Reduced", Fraction(1, 3), half_feasible=False)
