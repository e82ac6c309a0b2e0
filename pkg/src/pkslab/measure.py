"""The quantum measure on particle paths through 33 beam-splitter stages.

A path is a colouring of the Peres rays read in a chosen order; its state
is the ordered product of spin-squared projectors applied to the initial
spin state.  Homogeneous events (fixed colours on a subset of rays, free
elsewhere) admit an exact shortcut: the free projectors sum to the
identity, so the event state is just the product of the fixed projectors
in position order.  The decoherence functional is the inner product of
event states (a convex combination of those terms for a mixed state).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .colourings import Colouring, PKSEvent, pks_events
from .rays import N_RAYS, PERES_RAYS, ray_index
from .spin import ray_projector

DEFAULT_THRESHOLD = 1e-10


@dataclass(frozen=True)
class Ordering:
    """Position p (0-based) -> ray index; the beam-splitter sequence."""

    ray_at: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.ray_at) != list(range(N_RAYS)):
            raise ValueError("ordering must be a permutation of the 33 ray indices")

    @classmethod
    def default(cls) -> "Ordering":
        """The fixed listing order of the rays."""
        return cls(tuple(range(N_RAYS)))

    @classmethod
    def from_labels(cls, labels) -> "Ordering":
        return cls(tuple(ray_index(s) for s in labels))

    def position_of(self, ray: int) -> int:
        return self.ray_at.index(ray)

    def with_ray_last(self, ray: int) -> "Ordering":
        rest = [i for i in self.ray_at if i != ray]
        return Ordering(tuple(rest + [ray]))

    def labels(self) -> tuple[str, ...]:
        return tuple(PERES_RAYS[i].label for i in self.ray_at)


class InitialState:
    """A pure or mixed spin state; terms are (weight, unit vector) pairs."""

    def __init__(self, terms):
        cleaned = []
        total = 0.0
        for w, vec in terms:
            v = np.asarray(vec, dtype=complex).reshape(3)
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError("state vectors must be normalised to 1e-12")
            if w <= 0:
                raise ValueError("mixture weights must be positive")
            cleaned.append((float(w), v))
            total += w
        if abs(total - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        self.terms: tuple[tuple[float, np.ndarray], ...] = tuple(cleaned)

    @classmethod
    def pure(cls, vec) -> "InitialState":
        return cls([(1.0, vec)])

    @classmethod
    def default(cls) -> "InitialState":
        """Spin-zero along z: the middle z-basis vector."""
        return cls.pure([0.0, 1.0, 0.0])

    @property
    def is_pure(self) -> bool:
        return len(self.terms) == 1


@dataclass(frozen=True)
class HomogeneousEvent:
    """Colourings agreeing with fixed colours on a ray subset, free elsewhere."""

    green_mask: int
    red_mask: int

    def __post_init__(self) -> None:
        if self.green_mask & self.red_mask:
            raise ValueError("a ray cannot be fixed both green and red")
        if (self.green_mask | self.red_mask) >> N_RAYS:
            raise ValueError("fixed mask out of range")

    @classmethod
    def from_fixed(cls, fixed: dict[int, bool]) -> "HomogeneousEvent":
        g = r = 0
        for i, green in fixed.items():
            if green:
                g |= 1 << i
            else:
                r |= 1 << i
        return cls(g, r)

    @classmethod
    def everything(cls) -> "HomogeneousEvent":
        return cls(0, 0)

    @classmethod
    def from_pks(cls, e: PKSEvent) -> "HomogeneousEvent":
        return cls(e.green_mask, e.red_mask)

    @classmethod
    def agreeing_with(cls, c: Colouring, rays) -> "HomogeneousEvent":
        """Fix the listed rays at the colours the given colouring assigns."""
        return cls.from_fixed({i: c.is_green(i) for i in rays})

    @property
    def fixed_mask(self) -> int:
        return self.green_mask | self.red_mask

    @property
    def fixed(self) -> dict[int, bool]:
        return {
            i: bool(self.green_mask >> i & 1)
            for i in range(N_RAYS)
            if self.fixed_mask >> i & 1
        }

    @property
    def n_fixed(self) -> int:
        return self.fixed_mask.bit_count()

    def contains(self, c: Colouring) -> bool:
        return (c.bits & self.green_mask) == self.green_mask and (
            ~c.bits & self.red_mask
        ) == self.red_mask

    def is_disjoint_from(self, other: "HomogeneousEvent") -> bool:
        """Syntactic disjointness: some ray fixed green here and red there."""
        return bool(
            self.green_mask & other.red_mask or self.red_mask & other.green_mask
        )

    def with_fixed(self, ray: int, green: bool) -> "HomogeneousEvent | None":
        """Intersect with a single-ray constraint; None if the result is empty."""
        bit = 1 << ray
        if (self.red_mask if green else self.green_mask) & bit:
            return None
        if green:
            return HomogeneousEvent(self.green_mask | bit, self.red_mask)
        return HomogeneousEvent(self.green_mask, self.red_mask | bit)

    def describe(self) -> str:
        parts = [
            f"{PERES_RAYS[i].label}={'g' if green else 'r'}"
            for i, green in sorted(self.fixed.items())
        ]
        return "{" + ", ".join(parts) + "}" if parts else "{all colourings}"


@dataclass(frozen=True)
class EventUnion:
    """A disjoint union of homogeneous events.

    Disjointness is certified syntactically (two members must fix some ray
    to different colours); unions that fail the certificate are rejected.
    """

    members: tuple[HomogeneousEvent, ...]

    def __post_init__(self) -> None:
        for a, b in itertools.combinations(self.members, 2):
            if not a.is_disjoint_from(b):
                raise ValueError(
                    f"members overlap (no ray separates {a.describe()} "
                    f"and {b.describe()})"
                )

    def contains(self, c: Colouring) -> bool:
        return any(e.contains(c) for e in self.members)


def as_union(event) -> EventUnion:
    if isinstance(event, EventUnion):
        return event
    if isinstance(event, PKSEvent):
        event = HomogeneousEvent.from_pks(event)
    if isinstance(event, HomogeneousEvent):
        return EventUnion((event,))
    raise TypeError(f"cannot interpret {event!r} as an event")


class Context:
    """A decoherence functional: an ordering of the rays plus an initial state.

    Pure and immutable; evaluations are safe to run concurrently.
    """

    def __init__(
        self,
        ordering: Ordering | None = None,
        state: InitialState | None = None,
        threshold: float = DEFAULT_THRESHOLD,
    ):
        self.ordering = ordering or Ordering.default()
        self.state = state or InitialState.default()
        if threshold <= 0:
            raise ValueError("threshold must be positive")
        self.threshold = float(threshold)
        # position of each ray in the chain, for collapsing free projectors
        self._position = {r: p for p, r in enumerate(self.ordering.ray_at)}

    # -- states ---------------------------------------------------------------

    def path_state(self, c: Colouring, psi: np.ndarray) -> np.ndarray:
        """Full ordered product of all 33 projectors applied to psi."""
        v = np.asarray(psi, dtype=complex)
        for ray in self.ordering.ray_at:
            v = ray_projector(ray, c.is_green(ray)) @ v
        return v

    def _chain(self, event: HomogeneousEvent) -> list[tuple[int, bool]]:
        """Fixed (ray, colour) steps in ascending position order."""
        steps = [(self._position[i], i, g) for i, g in event.fixed.items()]
        return [(ray, green) for _, ray, green in sorted(steps)]

    def sector_chains(self, event: HomogeneousEvent) -> list[list[tuple[int, int, bool]]]:
        """The (position, ray, colour) chains whose states sum to the event's
        measure: one chain for a plain context."""
        steps = sorted((self._position[i], i, g) for i, g in event.fixed.items())
        return [steps]

    def event_state(self, event: HomogeneousEvent, psi: np.ndarray) -> np.ndarray:
        """Event state via identity collapse: apply only the fixed projectors."""
        v = np.asarray(psi, dtype=complex)
        for ray, green in self._chain(event):
            v = ray_projector(ray, green) @ v
        return v

    def _union_state(self, union: EventUnion, psi: np.ndarray) -> np.ndarray:
        total = np.zeros(3, dtype=complex)
        for e in union.members:
            total += self.event_state(e, psi)
        return total

    # -- the functional ---------------------------------------------------------

    def decoherence(self, a, b) -> complex:
        ua, ub = as_union(a), as_union(b)
        out = 0j
        for w, psi in self.state.terms:
            out += w * np.vdot(self._union_state(ua, psi), self._union_state(ub, psi))
        return complex(out)

    def measure(self, a) -> float:
        return float(self.decoherence(a, a).real)

    def norm(self, a) -> float:
        """Square root of the measure (the event-state norm for a pure state)."""
        return float(np.sqrt(max(self.measure(a), 0.0)))

    def is_zero(self, a) -> bool:
        return self.norm(a) < self.threshold

    # -- batch evaluation --------------------------------------------------------

    def batch_chain_norms(
        self, rays: np.ndarray, greens: np.ndarray, chunk: int = 65536
    ) -> np.ndarray:
        """Norms for many fixed-projector chains at once.

        `rays` and `greens` have shape (n, k); column order is chain order
        (ascending position).  Returns sqrt of the measure of each event.
        """
        from .spin import _ray_projectors

        projs = _ray_projectors()
        n, k = rays.shape
        out = np.zeros(n)
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            r = rays[lo:hi]
            g = greens[lo:hi].astype(int)
            acc = np.zeros(hi - lo)
            for w, psi in self.state.terms:
                v = np.broadcast_to(psi, (hi - lo, 3)).copy()
                for step in range(k):
                    mats = projs[r[:, step], 1 - g[:, step]]
                    v = np.einsum("nij,nj->ni", mats, v)
                acc += w * np.einsum("ni,ni->n", v.conj(), v).real
            out[lo:hi] = np.sqrt(np.maximum(acc, 0.0))
        return out


def truncated_path_states(
    ordering: Ordering, psi: np.ndarray, chain_len: int
) -> np.ndarray:
    """States of all 2^k paths through the first k beam-splitter stages.

    Row index encodes the path: bit p set means green at position p.  This
    is the brute-force route (no identity collapse) used as the oracle for
    event states on truncated chains.
    """
    if not 0 <= chain_len <= 20:
        raise ValueError("truncated chains are limited to 20 positions")
    states = np.asarray(psi, dtype=complex).reshape(1, 3)
    for p in range(chain_len):
        ray = ordering.ray_at[p]
        red = states @ ray_projector(ray, False).T
        green = states @ ray_projector(ray, True).T
        states = np.vstack([red, green])  # bit p: 0 -> red block, 1 -> green block
    return states


def event_state_by_completion(
    event: HomogeneousEvent, ordering: Ordering, psi: np.ndarray, chain_len: int
) -> np.ndarray:
    """Sum of path states over all completions of the event's free rays.

    Only defined on truncated chains: every fixed ray must sit within the
    first `chain_len` positions, and the chain is cut there.
    """
    pos = {r: p for p, r in enumerate(ordering.ray_at[:chain_len])}
    for ray in event.fixed:
        if ray not in pos:
            raise ValueError("event fixes a ray beyond the truncated chain")
    states = truncated_path_states(ordering, psi, chain_len)
    idx = np.arange(1 << chain_len)
    keep = np.ones(len(idx), dtype=bool)
    for ray, green in event.fixed.items():
        bit = (idx >> pos[ray]) & 1
        keep &= bit == (1 if green else 0)
    return states[keep].sum(axis=0)


# --- verification reports -----------------------------------------------------


@dataclass(frozen=True)
class PksZeroReport:
    entries: tuple[tuple[str, float, float], ...]  # (event name, norm, measure)
    union_entries: tuple[tuple[str, float, float], ...]
    threshold: float

    @property
    def max_norm(self) -> float:
        vals = [n for _, n, _ in self.entries + self.union_entries]
        return max(vals) if vals else 0.0

    @property
    def all_zero(self) -> bool:
        return self.max_norm < self.threshold


def verify_pks_zero(ctx: Context, rng=None, union_samples: int = 25) -> PksZeroReport:
    """Measure every all-red basis event and all-green pair event, plus
    sampled pairwise-disjoint unions of them; all must vanish."""
    entries = []
    for e in pks_events():
        entries.append((e.name, ctx.norm(e), ctx.measure(e)))
    unions = []
    if union_samples:
        rng = rng or np.random.default_rng(0)
        events = pks_events()
        tries = 0
        while len(unions) < union_samples and tries < union_samples * 50:
            tries += 1
            picks = rng.choice(len(events), size=rng.integers(2, 4), replace=False)
            members = [HomogeneousEvent.from_pks(events[i]) for i in picks]
            try:
                union = EventUnion(tuple(members))
            except ValueError:
                continue
            name = " | ".join(events[i].name for i in picks)
            unions.append((name, ctx.norm(union), ctx.measure(union)))
    return PksZeroReport(tuple(entries), tuple(unions), ctx.threshold)


class DetectedContext:
    """The measure after inserting detectors in both beams of one stage.

    Coherence between the green and red sectors of the detected ray is
    destroyed: the functional becomes the sum of the two sector-restricted
    functionals, so events differing in that ray's colour decohere exactly.
    """

    def __init__(self, base: Context, position: int):
        if not 1 <= position <= N_RAYS:
            raise ValueError("detector position must be in 1..33")
        self.base = base
        self.position = position
        self.detected_ray = base.ordering.ray_at[position - 1]
        self.ordering = base.ordering
        self.state = base.state
        self.threshold = base.threshold

    def _sector(self, union: EventUnion, green: bool) -> EventUnion:
        members = []
        for e in union.members:
            cut = e.with_fixed(self.detected_ray, green)
            if cut is not None:
                members.append(cut)
        return EventUnion(tuple(members))

    def decoherence(self, a, b) -> complex:
        ua, ub = as_union(a), as_union(b)
        out = 0j
        for green in (False, True):
            out += self.base.decoherence(self._sector(ua, green), self._sector(ub, green))
        return complex(out)

    def measure(self, a) -> float:
        return float(self.decoherence(a, a).real)

    def norm(self, a) -> float:
        return float(np.sqrt(max(self.measure(a), 0.0)))

    def is_zero(self, a) -> bool:
        return self.norm(a) < self.threshold

    def sector_chains(self, event: HomogeneousEvent) -> list[list[tuple[int, int, bool]]]:
        """The surviving sector chains: the detected ray joins the fixed set
        in each sector compatible with the event."""
        out = []
        for green in (False, True):
            cut = event.with_fixed(self.detected_ray, green)
            if cut is not None:
                out.extend(self.base.sector_chains(cut))
        return out

    def batch_chain_norms(self, rays: np.ndarray, greens: np.ndarray) -> np.ndarray:
        """Detected-measure norms for many chains: events fixing the detected
        ray keep their base norm; the rest sum both sector measures, with the
        detector stage spliced into each chain at its position."""
        n, k = rays.shape
        out = np.empty(n)
        fixes = (rays == self.detected_ray).any(axis=1)
        if fixes.any():
            out[fixes] = self.base.batch_chain_norms(rays[fixes], greens[fixes])
        free = np.nonzero(~fixes)[0]
        if free.size:
            r, g = rays[free], greens[free].astype(int)
            position = np.empty(N_RAYS, dtype=int)
            for p, ray in enumerate(self.ordering.ray_at):
                position[ray] = p
            det_pos = self.position - 1
            insert_at = (position[r] < det_pos).sum(axis=1)
            cols = np.arange(k + 1)
            source = cols[None, :] - (cols[None, :] > insert_at[:, None])
            take = np.take_along_axis  # splice: column insert_at becomes the detector
            new_r = take(r, np.clip(source, 0, k - 1), axis=1)
            new_g = take(g, np.clip(source, 0, k - 1), axis=1)
            at_det = cols[None, :] == insert_at[:, None]
            new_r = np.where(at_det, self.detected_ray, new_r)
            acc = np.zeros(free.size)
            for colour in (0, 1):
                gg = np.where(at_det, colour, new_g)
                acc += self.base.batch_chain_norms(new_r, gg) ** 2
            out[free] = np.sqrt(acc)
        return out


def insert_detector(ctx: Context, position: int) -> DetectedContext:
    return DetectedContext(ctx, position)


# --- sampling helpers shared by the check commands and the test suite ----------


def random_homogeneous_event(rng, max_fixed: int = 3) -> HomogeneousEvent:
    k = int(rng.integers(1, max_fixed + 1))
    rays = rng.choice(N_RAYS, size=k, replace=False)
    return HomogeneousEvent.from_fixed(
        {int(i): bool(rng.integers(2)) for i in rays}
    )


def random_disjoint_triple(rng) -> tuple[HomogeneousEvent, ...]:
    """Three pairwise syntactically disjoint homogeneous events."""
    i, j = (int(x) for x in rng.choice(N_RAYS, size=2, replace=False))
    a = HomogeneousEvent.from_fixed({i: True, j: True})
    b = HomogeneousEvent.from_fixed({i: False, j: True})
    c = HomogeneousEvent.from_fixed({i: True, j: False})
    return a, b, c


@dataclass(frozen=True)
class AxiomReport:
    hermiticity: float
    additivity: float
    positivity: float  # most negative diagonal seen (>= -1e-12 required)
    normalisation: float
    sum_rule: float
    samples: int

    def passes(self, tol: float = 1e-10) -> bool:
        return (
            self.hermiticity < tol
            and self.additivity < tol
            and self.positivity > -1e-12
            and self.normalisation < 1e-12
            and self.sum_rule < tol
        )


def check_axioms(ctx, rng, samples: int = 100, sum_rule_trials: int = 200) -> AxiomReport:
    """Residuals of the decoherence-functional axioms and of the three-set
    interference sum rule, over random homogeneous events.  Works on plain
    and detected contexts alike."""
    herm = add = 0.0
    pos = 0.0
    for _ in range(samples):
        a = random_homogeneous_event(rng)
        b = random_homogeneous_event(rng)
        herm = max(herm, abs(ctx.decoherence(a, b) - ctx.decoherence(b, a).conjugate()))
        x, y, _ = random_disjoint_triple(rng)
        z = random_homogeneous_event(rng)
        lhs = ctx.decoherence(EventUnion((x, y)), z)
        add = max(add, abs(lhs - ctx.decoherence(x, z) - ctx.decoherence(y, z)))
        pos = min(pos, ctx.measure(a))
    norm_res = abs(ctx.decoherence(HomogeneousEvent.everything(), HomogeneousEvent.everything()) - 1.0)
    sum_rule = 0.0
    for _ in range(sum_rule_trials):
        a, b, c = random_disjoint_triple(rng)
        lhs = ctx.measure(EventUnion((a, b, c)))
        rhs = (
            ctx.measure(EventUnion((a, b)))
            + ctx.measure(EventUnion((b, c)))
            + ctx.measure(EventUnion((a, c)))
            - ctx.measure(a)
            - ctx.measure(b)
            - ctx.measure(c)
        )
        sum_rule = max(sum_rule, abs(lhs - rhs))
    return AxiomReport(
        hermiticity=herm,
        additivity=add,
        positivity=pos,
        normalisation=norm_res,
        sum_rule=sum_rule,
        samples=samples,
    )
