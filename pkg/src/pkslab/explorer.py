"""Systematic search for measure-zero events and coverage of the co-event
support {gamma_P, gamma_P'}.

A "covered" verdict always carries an explicit, numerically verified
witness: a zero event containing both support colourings, or a disjoint
pair of zero events containing one each (for a two-element support no
larger family is ever needed).  A "not covered" verdict is always
qualified by the scan scope, since only homogeneous events with a bounded
number of fixed rays are examined; whether some ordering and state make
the co-event preclusive outright is an open question this module collects
evidence on, not a theorem it can decide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .colourings import (
    Colouring,
    basis_chain,
    gamma_p,
    gamma_p_prime,
    pks_events,
)
from .measure import Context, HomogeneousEvent, InitialState, Ordering
from .rays import N_RAYS, PERES_RAYS, are_orthogonal, enumerate_bases, ray_index
from .spin import ray_projector

MAX_SCAN_FIXED = 8


class Provenance(Enum):
    PKS = "pks"
    ACCIDENTAL_ADJACENT = "accidental-adjacent"
    COARSE_GRAIN_COLLAPSE = "coarse-grain-collapse"
    SCAN = "scan"


@dataclass(frozen=True)
class ZeroEventRecord:
    event: HomogeneousEvent
    norm: float
    provenance: Provenance

    def describe(self) -> str:
        return f"{self.event.describe()}  norm={self.norm:.3e}  [{self.provenance.value}]"


@lru_cache(maxsize=1)
def _pks_signature_sets():
    return {tuple(b.indices) for b in enumerate_bases()}


def classify_zero_event(ctx, event: HomogeneousEvent) -> Provenance:
    """Why is this event's state zero?

    Exact preclusion patterns rank first; then a green-green orthogonal
    pair at consecutive stages; then any fixed-projector chain whose
    operator product vanishes once the free stages are summed out (for a
    detected context, every surviving sector chain must vanish); the rest
    are zeros of this particular initial state.
    """
    fixed = event.fixed
    rays = tuple(sorted(fixed))
    if len(rays) == 3 and rays in _pks_signature_sets() and not any(fixed.values()):
        return Provenance.PKS
    if (
        len(rays) == 2
        and all(fixed.values())
        and are_orthogonal(PERES_RAYS[rays[0]], PERES_RAYS[rays[1]])
    ):
        return Provenance.PKS
    chains = ctx.sector_chains(event)

    def has_adjacent_green_pair(chain) -> bool:
        return any(
            p2 == p1 + 1
            and g1
            and g2
            and are_orthogonal(PERES_RAYS[i1], PERES_RAYS[i2])
            for (p1, i1, g1), (p2, i2, g2) in zip(chain, chain[1:])
        )

    if all(has_adjacent_green_pair(chain) for chain in chains):
        return Provenance.ACCIDENTAL_ADJACENT

    def operator_vanishes(chain) -> bool:
        op = np.eye(3, dtype=complex)
        for _, i, g in chain:
            op = ray_projector(i, g) @ op
        return bool(np.linalg.norm(op) < ctx.threshold)

    if all(operator_vanishes(chain) for chain in chains):
        return Provenance.COARSE_GRAIN_COLLAPSE
    return Provenance.SCAN


def scan_zero_events(ctx, max_fixed: int) -> tuple[ZeroEventRecord, ...]:
    """All homogeneous events with at most `max_fixed` fixed rays whose norm
    falls below the context threshold, in a deterministic order.  Accepts a
    plain or a detected context."""
    if not 1 <= max_fixed <= MAX_SCAN_FIXED:
        raise ValueError(f"scan budget exceeded: max_fixed must be in 1..{MAX_SCAN_FIXED}")
    position = np.empty(N_RAYS, dtype=int)
    for p, r in enumerate(ctx.ordering.ray_at):
        position[r] = p
    records = []
    for k in range(1, max_fixed + 1):
        combos = np.array(list(itertools.combinations(range(N_RAYS), k)), dtype=int)
        order = np.argsort(position[combos], axis=1)
        chains = np.take_along_axis(combos, order, axis=1)
        for pattern in range(1 << k):
            # pattern bit j = colour of the j-th ray of the combo (1 = green)
            bit = np.array([(pattern >> j) & 1 for j in range(k)], dtype=int)
            greens_combo = np.broadcast_to(bit, combos.shape)
            greens = np.take_along_axis(greens_combo, order, axis=1)
            norms = ctx.batch_chain_norms(chains, greens)
            for row in np.nonzero(norms < ctx.threshold)[0]:
                fixed = {
                    int(combos[row, j]): bool((pattern >> j) & 1) for j in range(k)
                }
                event = HomogeneousEvent.from_fixed(fixed)
                records.append(
                    ZeroEventRecord(event, float(norms[row]), classify_zero_event(ctx, event))
                )
    records.sort(key=lambda rec: (rec.event.n_fixed, rec.event.green_mask, rec.event.red_mask))
    return tuple(records)


def provenance_counts(records) -> dict[str, int]:
    out: dict[str, int] = {}
    for rec in records:
        out[rec.provenance.value] = out.get(rec.provenance.value, 0) + 1
    return out


# --- coverage ------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageVerdict:
    status: str  # "covered" | "not-covered-within-scope"
    witness: tuple[HomogeneousEvent, ...] | None
    scope: str

    @property
    def covered(self) -> bool:
        return self.status == "covered"

    def describe(self) -> str:
        if self.covered:
            parts = " | ".join(e.describe() for e in self.witness)
            return f"covered by {parts}"
        return f"not covered within scope ({self.scope})"


def phi_m_support() -> tuple[Colouring, Colouring]:
    return gamma_p(), gamma_p_prime()


def coverage_check(
    support: tuple[Colouring, ...], zero_events, scope: str
) -> CoverageVerdict:
    """Can a disjoint union of the given zero events contain the support?

    Searches single events containing every support colouring, then
    disjoint pairs splitting it.  For the two-element supports used here a
    covering disjoint family can always be thinned to at most two events,
    so the pair search is complete within the supplied zero list.
    """
    if len(support) > 2:
        raise ValueError("coverage search implemented for supports of size <= 2")
    events = [e.event if isinstance(e, ZeroEventRecord) else e for e in zero_events]
    holders = [
        [e for e in events if e.contains(c)] for c in support
    ]
    for e in holders[0]:
        if all(e.contains(c) for c in support):
            return CoverageVerdict("covered", (e,), scope)
    if len(support) == 2:
        for e1 in holders[0]:
            for e2 in holders[1]:
                if e1.is_disjoint_from(e2):
                    return CoverageVerdict("covered", (e1, e2), scope)
    return CoverageVerdict("not-covered-within-scope", None, scope)


def pks_only_coverage() -> CoverageVerdict:
    """Coverage of {gamma_P, gamma_P'} against the bare preclusion family:
    never covered, which is exactly why that support was chosen."""
    events = [HomogeneousEvent.from_pks(e) for e in pks_events()]
    return coverage_check(phi_m_support(), events, scope="preclusion family only")


# --- structural constructions ---------------------------------------------------


def basis_gap_event(
    c: Colouring, basis_indices: tuple[int, int, int], ordering: Ordering
) -> HomogeneousEvent:
    """Fix a colouring everywhere except strictly between the basis stages.

    Freeing the rays between the first and last basis positions makes the
    three basis projectors adjacent once the free stages are summed out;
    if the colouring is red on the whole basis the product vanishes, so
    the event has measure zero while still containing the colouring.
    """
    pos = {r: p for p, r in enumerate(ordering.ray_at)}
    ps = sorted(pos[i] for i in basis_indices)
    lo, hi = ps[0], ps[-1]
    fixed = {}
    for p, r in enumerate(ordering.ray_at):
        if lo < p < hi and r not in basis_indices:
            continue
        fixed[r] = c.is_green(r)
    return HomogeneousEvent.from_fixed(fixed)


def _chain_basis(name_index: int) -> tuple[int, int, int]:
    return basis_chain()[name_index - 1].indices


@dataclass(frozen=True)
class LastStageConstruction:
    e1: HomogeneousEvent
    e2: HomogeneousEvent
    norm1: float
    norm2: float
    separating_ray: int


def last_ray_021_construction(ctx: Context) -> LastStageConstruction:
    """The two-event preclusivity breaker for orderings ending at ray 021.

    E1 frees the stages between the B11 rays around gamma_P; E2 does the
    same for B7 around gamma_P'.  Both are measure zero, they disagree on
    the final stage's colour (gamma_P reds 021, gamma_P' greens it), and
    together they contain the whole support, so the support co-event
    cannot be preclusive in such a context.
    """
    i021 = ray_index("021")
    if ctx.ordering.ray_at[-1] != i021:
        raise ValueError("construction requires ray 021 at position 33")
    b11 = _chain_basis(11)
    b7 = _chain_basis(7)
    gp, gpp = phi_m_support()
    e1 = basis_gap_event(gp, b11, ctx.ordering)
    e2 = basis_gap_event(gpp, b7, ctx.ordering)
    n1, n2 = ctx.norm(e1), ctx.norm(e2)
    if n1 >= ctx.threshold or n2 >= ctx.threshold:
        raise AssertionError("gap events failed to be measure zero")
    if not e1.is_disjoint_from(e2):
        raise AssertionError("gap events failed to be disjoint")
    if not (e1.contains(gp) and e2.contains(gpp)):
        raise AssertionError("gap events failed to contain the support")
    return LastStageConstruction(e1, e2, n1, n2, separating_ray=i021)


def structural_threat_pairs(ctx: Context) -> list[tuple[HomogeneousEvent, HomogeneousEvent]]:
    """Candidate covering pairs built from the B11/B7 red events plus one
    ray where the two support colourings disagree.  Each candidate is kept
    only if both halves are numerically zero and the halves are disjoint."""
    gp, gpp = phi_m_support()
    b11, b7 = _chain_basis(11), _chain_basis(7)
    differing = [
        i for i in range(N_RAYS) if gp.is_green(i) != gpp.is_green(i)
    ]
    out = []
    for w in differing:
        e1 = HomogeneousEvent.agreeing_with(gp, set(b11) | {w})
        e2 = HomogeneousEvent.agreeing_with(gpp, set(b7) | {w})
        if not e1.is_disjoint_from(e2):
            continue
        if ctx.is_zero(e1) and ctx.is_zero(e2):
            out.append((e1, e2))
    # the full gap construction is a candidate for any ordering
    e1 = basis_gap_event(gp, b11, ctx.ordering)
    e2 = basis_gap_event(gpp, b7, ctx.ordering)
    if e1.is_disjoint_from(e2) and ctx.is_zero(e1) and ctx.is_zero(e2):
        out.append((e1, e2))
    return out


def context_coverage(
    ctx: Context, max_fixed: int, records=None
) -> tuple[CoverageVerdict, tuple[ZeroEventRecord, ...]]:
    """Scan plus structural constructions, then the coverage decision."""
    if records is None:
        records = scan_zero_events(ctx, max_fixed)
    events: list[HomogeneousEvent] = [rec.event for rec in records]
    for e1, e2 in structural_threat_pairs(ctx):
        events.extend([e1, e2])
    scope = f"homogeneous events with <= {max_fixed} fixed rays plus structural constructions"
    return coverage_check(phi_m_support(), events, scope), records


# --- the ordering search ---------------------------------------------------------


@dataclass(frozen=True)
class SearchCandidate:
    label: str
    ordering: Ordering
    state_description: str
    state_terms: tuple[tuple[float, tuple[complex, complex, complex]], ...]
    verdict: CoverageVerdict
    zero_count: int
    support_holders: int  # zero events containing either support colouring

    def context(self, threshold: float = 1e-10) -> Context:
        """Rebuild the examined context, e.g. to re-verify a witness."""
        state = InitialState([(w, list(v)) for w, v in self.state_terms])
        return Context(self.ordering, state, threshold)


@dataclass(frozen=True)
class SearchReport:
    seed: int
    budget: int
    scan_max_fixed: int
    strategy: str
    candidates: tuple[SearchCandidate, ...]  # ranked, best (least covered) first


def _random_pure_state(rng) -> InitialState:
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    return InitialState.pure(v / np.linalg.norm(v))


def maximally_mixed_state() -> InitialState:
    """The state whose zero events are exactly the structural ones.

    Its measure of an event is the squared Frobenius norm of the operator
    chain over 3, which vanishes only when the operator product itself
    does; such events are zero for every initial state, so verdicts under
    this state are intrinsic to the ordering.
    """
    return InitialState([(1 / 3, [1, 0, 0]), (1 / 3, [0, 1, 0]), (1 / 3, [0, 0, 1])])


def _separating_ordering(rng) -> Ordering:
    """Heuristic placement: spread the B11 stages across the whole chain and
    tuck the B7 stages just inside, so the rays where the support colourings
    disagree fall strictly between both basis spans."""
    b11 = list(_chain_basis(11))
    b7 = list(_chain_basis(7))
    i021 = ray_index("021")
    b11.remove(i021)  # 021 must sit inside the B7 span, not at an end
    rest = [i for i in range(N_RAYS) if i not in set(b11) | set(b7) | {i021}]
    rng.shuffle(rest)
    middle = rest[:-4]
    mid = len(middle) // 2
    chain = (
        [b11[0], b7[0]]
        + middle[:mid]
        + [i021, b7[1]]
        + middle[mid:]
        + [b7[2], b11[1]]
        + rest[-4:]
    )
    assert sorted(chain) == list(range(N_RAYS))
    return Ordering(tuple(chain))


def ordering_search(
    budget: int,
    seed: int = 0,
    scan_max_fixed: int = 2,
    threshold: float = 1e-10,
    strategy: str = "mixed",
) -> SearchReport:
    """Heuristic exploration for contexts where no covering family is found.

    The first candidate is always the 021-last probe, which is provably
    covered.  Strategy "mixed" (default) varies both orderings and states:
    random orderings with the default or a random pure state, plus the
    separating heuristic.  Strategy "structural" evaluates every candidate
    ordering under the maximally mixed state, whose zeros are exactly the
    state-independent ones: an ordering covered there is covered for every
    initial state, so survivors are the only orderings worth pairing with
    a state at all.  Verdicts never claim preclusivity, only that no cover
    was found within the scan scope.
    """
    if strategy not in ("mixed", "structural"):
        raise ValueError("strategy must be 'mixed' or 'structural'")
    rng = np.random.default_rng(seed)
    candidates: list[SearchCandidate] = []
    gp, gpp = phi_m_support()

    def examine(label: str, ordering: Ordering, state: InitialState, state_desc: str):
        ctx = Context(ordering, state, threshold)
        verdict, records = context_coverage(ctx, scan_max_fixed)
        if ordering.ray_at[-1] == ray_index("021"):
            # the final-stage construction always covers such orderings
            built = last_ray_021_construction(ctx)
            if not verdict.covered:
                verdict = CoverageVerdict(
                    "covered", (built.e1, built.e2), verdict.scope
                )
        holders = sum(
            1 for rec in records if rec.event.contains(gp) or rec.event.contains(gpp)
        )
        terms = tuple((w, tuple(complex(x) for x in v)) for w, v in state.terms)
        candidates.append(
            SearchCandidate(
                label, ordering, state_desc, terms, verdict, len(records), holders
            )
        )

    for i in range(budget):
        if i == 0:
            examine(
                "probe-021-last",
                Ordering.default().with_ray_last(ray_index("021")),
                InitialState.default(),
                "default |0,z>",
            )
        elif strategy == "structural":
            if i % 3 == 0:
                ordering = _separating_ordering(rng)
                label = f"separating-{i}"
            else:
                ordering = Ordering(tuple(int(x) for x in rng.permutation(N_RAYS)))
                label = f"random-ord-{i}"
            examine(label, ordering, maximally_mixed_state(), "maximally mixed")
        elif i % 5 == 4:
            examine(
                f"separating-{i}", _separating_ordering(rng), _random_pure_state(rng),
                "random pure",
            )
        elif i % 2 == 1:
            perm = tuple(int(x) for x in rng.permutation(N_RAYS))
            examine(f"random-ord-{i}", Ordering(perm), InitialState.default(), "default |0,z>")
        else:
            perm = tuple(int(x) for x in rng.permutation(N_RAYS))
            examine(f"random-{i}", Ordering(perm), _random_pure_state(rng), "random pure")

    ranked = sorted(
        candidates,
        key=lambda c: (c.verdict.covered, c.support_holders, c.zero_count, c.label),
    )
    return SearchReport(
        seed=seed,
        budget=budget,
        scan_max_fixed=scan_max_fixed,
        strategy=strategy,
        candidates=tuple(ranked),
    )
