"""Precoding schemes: construction, verification, end-to-end simulation.

The sender of session i transmits, over an N-slot extension, the product
V_i X_i of an N x k_i precoding matrix and its k_i data symbols; the rest
of the network performs random linear coding, so receiver i observes

    Y_i = sum_j diag(m_ji(x^(1)), ..., m_ji(x^(N))) V_j X_j.

Four plan shapes cover the taxonomy of `netalign.feasibility`:

* EtaGeneral(n): N = 2n+1, k = (n+1, n, n).  With T the diagonal matrix of
  per-slot eta values and w the all-ones column, V1 = (w, Tw, ..., T^n w),
  V2 = diag(m13/m23) (w, ..., T^{n-1} w), V3 = diag(m12/m32) (Tw, ..., T^n w).
  Interference aligns at every non-degenerate draw: the receiver-1 blocks
  satisfy M21 V2 = M31 V3 column for column, and the cross blocks at
  receivers 2 and 3 land inside the spans of M12 V1 and M13 V1.
* EtaOne: N = 2, k = (1, 1, 1), for networks where eta is identically 1.
  V1 = theta, V2 = diag(m13/m23) theta, V3 = diag(m12/m32) theta, theta a
  free random column.  The same code serves reduced networks: the chain of
  surviving alignment constraints (`reduced_structure`) decides each
  sender's gain profile and which free column it rides on.
* TypeTwoFive: N = 5, k = (2, 2, 2).  The EtaGeneral n=2 matrices, except
  sender 1 transmits only on columns {w, T^2 w}: on these networks the
  middle desired column is forced into the interference span at receiver 1,
  and giving it up restores decodability at rate 2/5.
* TrivialThird: N = 3, k = (1, 1, 1), one independent random column per
  sender; time sharing in disguise, no alignment needed.

`simulate` draws a fresh scheme every trial, pushes the encoded symbols
through the network with purely local per-node updates (`propagate` never
touches transfer functions), decodes each receiver by exact Gaussian
elimination, and counts exact recoveries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dag import Scenario
from .feasibility import (
    NetworkType,
    ReducedStructure,
    reduced_structure,
)
from .gf2m import Field, InconsistentSystemError, Matrix
from .xfer import (
    RATIOS,
    CodingAssignment,
    RatioSpec,
    ResampleLimitError,
    SessionPair,
    session_transfer_matrix,
)

RESAMPLE_LIMIT = 100

_ALL_PAIRS = tuple((j, i) for j in (1, 2, 3) for i in (1, 2, 3))


@dataclass(frozen=True)
class PrecodingPlan:
    """Shape of a precoding scheme: slot count and per-sender symbol counts."""

    kind: str  # "EtaGeneral" | "EtaOne" | "TypeTwoFive" | "TrivialThird"
    N: int
    k: Tuple[int, int, int]
    n: Optional[int] = None

    @classmethod
    def eta_general(cls, n: int) -> "PrecodingPlan":
        if n < 1:
            raise ValueError("EtaGeneral needs n >= 1")
        return cls("EtaGeneral", 2 * n + 1, (n + 1, n, n), n)

    @classmethod
    def eta_one(cls) -> "PrecodingPlan":
        return cls("EtaOne", 2, (1, 1, 1))

    @classmethod
    def type_two_five(cls) -> "PrecodingPlan":
        # Built on the n=2 structure, hence n is recorded.
        return cls("TypeTwoFive", 5, (2, 2, 2), 2)

    @classmethod
    def trivial_third(cls) -> "PrecodingPlan":
        return cls("TrivialThird", 3, (1, 1, 1))

    @property
    def rates(self) -> Tuple[Fraction, Fraction, Fraction]:
        return tuple(Fraction(ki, self.N) for ki in self.k)


def build_plan(nt: NetworkType, n: int = 1) -> PrecodingPlan:
    """Pick the scheme family matching a classification verdict."""
    if nt.kind == "I":
        return PrecodingPlan.trivial_third()
    if nt.kind == "II":
        return PrecodingPlan.type_two_five()
    if nt.kind == "III":
        return PrecodingPlan.eta_one() if nt.eta_is_one else PrecodingPlan.eta_general(n)
    if nt.kind == "Reduced":
        # Two-slot free-choice scheme when rate 1/2 is feasible; otherwise
        # fall back to one symbol per sender over three slots.
        return PrecodingPlan.eta_one() if nt.half_feasible else PrecodingPlan.trivial_third()
    raise ValueError(f"unknown network kind {nt.kind!r}")


@dataclass
class EvaluatedScheme:
    """One concrete draw of a plan: assignments, free scalars, V and M values.

    V[0] is the full structural matrix; for TypeTwoFive sender 1 only the
    `data_cols` subset carries data symbols (all columns for other plans).
    """

    plan: PrecodingPlan
    sc: Scenario
    field: Field
    assignments: List[CodingAssignment]
    m_vals: Dict[SessionPair, List[int]]
    theta: Dict[int, List[int]]
    V: Tuple[Matrix, Matrix, Matrix]
    data_cols: Tuple[Tuple[int, ...], ...]
    eta_vals: List[Optional[int]]
    p_vals: Dict[str, List[Optional[int]]]
    structure: Optional[ReducedStructure]
    resamples: int

    @property
    def reduced(self) -> bool:
        return self.structure is not None and not all(self.structure.present.values())

    def sender_matrix(self, j: int) -> Matrix:
        """The N x k_j matrix sender j actually encodes with."""
        return self.V[j - 1].select_cols(self.data_cols[j - 1])

    def received_block(self, j: int, i: int, data_only: bool = False) -> Matrix:
        """diag(m_ji per slot) times V_j (or its data columns)."""
        base = self.sender_matrix(j) if data_only else self.V[j - 1]
        return base.scale_rows(self.m_vals[(j, i)])


def _ratio_slots(m_vals: Dict[SessionPair, List[int]], spec: RatioSpec,
                 field: Field, slots: int) -> List[Optional[int]]:
    vals: List[Optional[int]] = []
    for t in range(slots):
        den = 1
        for pair in spec.denominator:
            den = field.mul(den, m_vals[pair][t])
        if den == 0:
            vals.append(None)
            continue
        num = 1
        for pair in spec.numerator:
            num = field.mul(num, m_vals[pair][t])
        vals.append(field.div(num, den))
    return vals


def _profile_value(m_vals: Dict[SessionPair, List[int]], rs: ReducedStructure,
                   idx: int, field: Field, t: int) -> int:
    den = 1
    for pair in rs.profile_den[idx]:
        den = field.mul(den, m_vals[pair][t])
    num = 1
    for pair in rs.profile_num[idx]:
        num = field.mul(num, m_vals[pair][t])
    return field.div(num, den)  # denominators kept nonzero by resampling


def evaluate_precoding(sc: Scenario, plan: PrecodingPlan, field: Field,
                       rng: random.Random) -> EvaluatedScheme:
    """Draw one concrete scheme: N coding assignments plus free scalars.

    A slot whose draw zeroes any transfer function appearing in a profile
    denominator is redrawn in full; RESAMPLE_LIMIT consecutive bad draws
    raise ResampleLimitError (tiny field or degenerate topology).
    """
    structure = None
    if plan.kind == "EtaOne":
        structure = reduced_structure(sc)
        den_pairs = tuple(sorted({p for prof in structure.profile_den for p in prof}))
    elif plan.kind in ("EtaGeneral", "TypeTwoFive"):
        den_pairs = ((1, 2), (2, 3), (3, 1), (3, 2))
    else:
        den_pairs = ()

    assignments: List[CodingAssignment] = []
    m_vals: Dict[SessionPair, List[int]] = {pair: [] for pair in _ALL_PAIRS}
    misses = 0
    resamples = 0
    while len(assignments) < plan.N:
        x = CodingAssignment.random(sc, field, rng)
        m = session_transfer_matrix(sc, x, field)
        if any(m[pair] == 0 for pair in den_pairs):
            misses += 1
            resamples += 1
            if misses >= RESAMPLE_LIMIT:
                raise ResampleLimitError(
                    f"{RESAMPLE_LIMIT} consecutive slot draws had a zero denominator")
            continue
        misses = 0
        assignments.append(x)
        for pair in _ALL_PAIRS:
            m_vals[pair].append(m[pair])

    N = plan.N
    eta_vals = _ratio_slots(m_vals, RATIOS["eta"], field, N)
    p_vals = {name: _ratio_slots(m_vals, RATIOS[name], field, N)
              for name in ("p1", "p2", "p3")}

    theta: Dict[int, List[int]] = {}
    if plan.kind in ("EtaGeneral", "TypeTwoFive"):
        n = plan.n
        g2 = [field.div(m_vals[(1, 3)][t], m_vals[(2, 3)][t]) for t in range(N)]
        g3 = [field.div(m_vals[(1, 2)][t], m_vals[(3, 2)][t]) for t in range(N)]
        eta = eta_vals  # fully defined: every eta denominator was resampled
        v1 = Matrix(field, [[field.pow(eta[t], c) for c in range(n + 1)]
                            for t in range(N)])
        v2 = Matrix(field, [[field.mul(g2[t], field.pow(eta[t], c)) for c in range(n)]
                            for t in range(N)])
        v3 = Matrix(field, [[field.mul(g3[t], field.pow(eta[t], c)) for c in range(1, n + 1)]
                            for t in range(N)])
        if plan.kind == "TypeTwoFive":
            data_cols = ((0, 2), (0, 1), (0, 1))
        else:
            data_cols = (tuple(range(n + 1)), tuple(range(n)), tuple(range(n)))
    elif plan.kind == "EtaOne":
        for b in sorted(set(structure.base)):
            theta[b] = [field.rand(rng) for _ in range(N)]
        columns = []
        for idx in range(3):
            base_vals = theta[structure.base[idx]]
            col = [[field.mul(_profile_value(m_vals, structure, idx, field, t),
                              base_vals[t])]
                   for t in range(N)]
            columns.append(Matrix(field, col))
        v1, v2, v3 = columns
        data_cols = ((0,), (0,), (0,))
    elif plan.kind == "TrivialThird":
        for b in (0, 1, 2):
            theta[b] = [field.rand(rng) for _ in range(N)]
        v1, v2, v3 = (Matrix(field, [[theta[b][t]] for t in range(N)])
                      for b in (0, 1, 2))
        data_cols = ((0,), (0,), (0,))
    else:
        raise ValueError(f"unknown plan kind {plan.kind!r}")

    return EvaluatedScheme(plan=plan, sc=sc, field=field, assignments=assignments,
                           m_vals=m_vals, theta=theta, V=(v1, v2, v3),
                           data_cols=data_cols, eta_vals=eta_vals, p_vals=p_vals,
                           structure=structure, resamples=resamples)


def check_alignment(es: EvaluatedScheme) -> bool:
    """Do the interfering signals collapse as the plan promises?

    Fully connected plans are held to span conditions: the two interference
    blocks at receiver 1 span the same space, and the sender-3 blocks at
    receivers 2 and 3 land inside the sender-1 spans.  TrivialThird packs
    k1+k2+k3 = N symbols, so there is nothing to collapse.  On reduced
    networks only the dimension count is meaningful: combined interference
    at receiver i must fit in the N - k_i leftover dimensions.
    """
    plan = es.plan
    if plan.kind == "TrivialThird":
        return True
    if es.reduced:
        for i in (1, 2, 3):
            blocks = [es.received_block(j, i) for j in (1, 2, 3)
                      if j != i and es.structure.present[(j, i)]]
            if len(blocks) < 2:
                continue
            if Matrix.hstack(blocks).rank() > plan.N - plan.k[i - 1]:
                return False
        return True
    b21, b31 = es.received_block(2, 1), es.received_block(3, 1)
    if not (Matrix.hstack([b21, b31]).rank() == b21.rank() == b31.rank()):
        return False
    b12, b32 = es.received_block(1, 2), es.received_block(3, 2)
    if Matrix.hstack([b12, b32]).rank() != b12.rank():
        return False
    b13, b23 = es.received_block(1, 3), es.received_block(2, 3)
    return Matrix.hstack([b13, b23]).rank() == b13.rank()


def check_rank(es: EvaluatedScheme) -> Tuple[bool, bool, bool]:
    """Can each receiver separate its desired symbols at this draw?

    Receivers 1..3 of the square plans need rank N from [M11 V1 | M21 V2],
    [M12 V1 | M22 V2] and [M13 V1 | M33 V3].  TypeTwoFive receiver 1 only
    needs its 5x4 system at rank 4.  TrivialThird (and any reduced layout)
    needs the desired columns independent of everything else received.
    """
    plan, N = es.plan, es.plan.N
    if plan.kind == "TrivialThird":
        out = []
        for i in (1, 2, 3):
            full = Matrix.hstack([es.received_block(j, i) for j in (1, 2, 3)])
            others = full.select_cols([c for c in range(3) if c != i - 1])
            out.append(full.rank() == others.rank() + 1)
        return tuple(out)
    if plan.kind == "TypeTwoFive":
        b1 = Matrix.hstack([es.received_block(1, 1, data_only=True),
                            es.received_block(3, 1)]).rank() == 4
        b2 = Matrix.hstack([es.received_block(1, 2),
                            es.received_block(2, 2)]).rank() == N
        b3 = Matrix.hstack([es.received_block(1, 3),
                            es.received_block(3, 3)]).rank() == N
        return (b1, b2, b3)
    if es.reduced:
        out = []
        for i in (1, 2, 3):
            desired = es.received_block(i, i)
            blocks = [es.received_block(j, i) for j in (1, 2, 3)
                      if j != i and es.structure.present[(j, i)]]
            intf_rank = Matrix.hstack(blocks).rank() if blocks else 0
            joint = Matrix.hstack([desired] + blocks)
            out.append(joint.rank() == plan.k[i - 1] + intf_rank)
        return tuple(out)
    b1 = Matrix.hstack([es.received_block(1, 1), es.received_block(2, 1)]).rank() == N
    b2 = Matrix.hstack([es.received_block(1, 2), es.received_block(2, 2)]).rank() == N
    b3 = Matrix.hstack([es.received_block(1, 3), es.received_block(3, 3)]).rank() == N
    return (b1, b2, b3)


def propagate(sc: Scenario, x: CodingAssignment, field: Field,
              injected: Sequence[int]) -> Tuple[int, int, int]:
    """Push one slot's symbols through the network by local updates only.

    Seeds sigma_i with injected[i-1], then walks edges in topological order
    applying the per-node combination; returns the three tau values.
    """
    symbols: Dict[int, int] = {}
    for j in (1, 2, 3):
        symbols[sc.sigma(j)] = injected[j - 1]
    senders = {sc.sigma(j) for j in (1, 2, 3)}
    coeffs = x.coeffs
    mul = field.mul
    for eid in sc.topo_order:
        if eid in senders:
            continue
        acc = 0
        for prev in sc.prev_edges(eid):
            v = symbols.get(prev)
            if v:
                acc ^= mul(coeffs[(prev, eid)], v)
        if acc:
            symbols[eid] = acc
    return tuple(symbols.get(sc.tau(i), 0) for i in (1, 2, 3))


def _proportional(field: Field, u: Sequence[int], v: Sequence[int]) -> bool:
    """Is v a scalar multiple of u (u known nonzero)?"""
    pivot = next(t for t, val in enumerate(u) if val)
    ratio = field.div(v[pivot], u[pivot])
    return all(v[t] == field.mul(ratio, u[t]) for t in range(len(u)))


def _decode(es: EvaluatedScheme, i: int, y: Sequence[int]) -> Optional[List[int]]:
    """Receiver i's exact decode; None when the draw leaves it ambiguous."""
    plan, f = es.plan, es.field
    k = plan.k
    try:
        if plan.kind == "TrivialThird":
            A = Matrix.hstack([es.received_block(j, i) for j in (1, 2, 3)])
            others = A.select_cols([c for c in range(3) if c != i - 1])
            if A.rank() != others.rank() + 1:
                return None
            z, _ = A.solve(y)
            return [z[i - 1]]
        if plan.kind == "EtaOne":
            # Desired column plus a basis of whatever interference arrives.
            blocks = [es.received_block(i, i)]
            basis: List[List[int]] = []
            for j in (1, 2, 3):
                if j == i or not es.structure.present[(j, i)]:
                    continue
                col = es.received_block(j, i).col(0)
                if not any(col):
                    continue
                if not basis or not _proportional(f, basis[0], col):
                    basis.append(col)
            blocks += [Matrix(f, [[v] for v in col]) for col in basis]
            z, unique = Matrix.hstack(blocks).solve(y)
            return [z[0]] if unique else None
        if plan.kind == "TypeTwoFive":
            if i == 1:
                A = Matrix.hstack([es.received_block(1, 1, data_only=True),
                                   es.received_block(2, 1)])
                z, unique = A.solve(y)
                return z[0:2] if unique else None
            own = es.received_block(i, i)
            z, unique = Matrix.hstack([es.received_block(1, i), own]).solve(y)
            return z[3:5] if unique else None
        # EtaGeneral: square systems, interference folded into one block.
        if i == 1:
            A = Matrix.hstack([es.received_block(1, 1), es.received_block(2, 1)])
            z, unique = A.solve(y)
            return z[:k[0]] if unique else None
        own = es.received_block(i, i)
        z, unique = Matrix.hstack([es.received_block(1, i), own]).solve(y)
        return z[k[0]:k[0] + k[i - 1]] if unique else None
    except InconsistentSystemError:
        return None


@dataclass
class SimulationResult:
    plan: PrecodingPlan
    trials: int
    successes: int
    receiver_failures: Tuple[int, int, int]
    rates: Tuple[Fraction, Fraction, Fraction]
    field_bits: int
    seed: int

    @property
    def success_probability(self) -> float:
        return self.successes / self.trials


def simulate(sc: Scenario, plan: PrecodingPlan, trials: int, field: Field,
             seed: int = 0) -> SimulationResult:
    """Monte-Carlo runs of a plan: fresh scheme, random data, exact decode."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    successes = 0
    failures = [0, 0, 0]
    for _ in range(trials):
        es = evaluate_precoding(sc, plan, field, rng)
        xs = [[field.rand(rng) for _ in range(plan.k[j])] for j in range(3)]
        sent = [es.sender_matrix(j + 1).mul_vec(xs[j]) for j in range(3)]
        ys = [[0] * plan.N for _ in range(3)]
        for t in range(plan.N):
            out = propagate(sc, es.assignments[t], field,
                            (sent[0][t], sent[1][t], sent[2][t]))
            for r in range(3):
                ys[r][t] = out[r]
        ok = True
        for i in (1, 2, 3):
            if _decode(es, i, ys[i - 1]) != xs[i - 1]:
                failures[i - 1] += 1
                ok = False
        if ok:
            successes += 1
    return SimulationResult(plan=plan, trials=trials, successes=successes,
                            receiver_failures=tuple(failures), rates=plan.rates,
                            field_bits=field.m, seed=seed)
