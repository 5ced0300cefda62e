"""Exact distance spectra via the augmented-trellis first-return series.

The augmented graph has nodes ``(state, phase)`` where ``phase`` is the
position in the serial puncture mask.  Every encoder step consumes two mask
positions, so from ``START = (0, 0)`` only even phases are reachable and only
those ``64 * L / 2`` nodes are built.

Branches are split by whether they leave or enter START:

* ``E``: START -> S
* ``Q``: S -> S
* ``R``: S -> START

and the first-return generating function is ``T = E^T (I - Q)^{-1} R`` with
``(I - Q)^{-1} R = sum_k Q^k R``.  Counts ride along as ``(count, weight)``
pairs, which is ``T(D, N)`` evaluated at ``N = 1`` together with its
``N``-derivative, so alpha and beta come out of one pass.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .code_model import (
    NUM_STATES,
    STANDARD_GENERATORS,
    GeneratorSet,
    PunctureSchedule,
    as_schedule,
    branch_outputs,
    next_state,
)

START = 0


class SpectrumIterationError(RuntimeError):
    """The series failed to vanish within its iteration cap."""


class IncompleteEnumerationWarning(UserWarning):
    """Brute-force enumeration abandoned live paths at ``max_steps``."""


# --------------------------------------------------------------------------
# sparse (count, weight) polynomials in D


def term_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    """Product rule for ``(count, weight)`` pairs."""
    return (a[0] * b[0], a[1] * b[0] + b[1] * a[0])


class SeriesPolynomial:
    """Sparse map ``d -> (count, weight)`` truncated above ``d_max``.

    Zero-count terms are never stored.
    """

    __slots__ = ("terms", "d_max")

    def __init__(self, terms: Mapping[int, tuple[int, int]] | None = None, d_max: int | None = None):
        self.d_max = d_max
        self.terms: dict[int, tuple[int, int]] = {}
        if terms:
            for d, t in terms.items():
                self._add_term(d, t[0], t[1])

    @classmethod
    def monomial(cls, d: int, u: int, d_max: int | None = None) -> "SeriesPolynomial":
        """``D^d N^u`` for a single trellis branch."""
        return cls({d: (1, u)}, d_max)

    def _add_term(self, d: int, c: int, w: int) -> None:
        if c == 0 or (self.d_max is not None and d > self.d_max):
            return
        cur = self.terms.get(d)
        self.terms[d] = (c, w) if cur is None else (cur[0] + c, cur[1] + w)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.terms))

    def __getitem__(self, d: int) -> tuple[int, int]:
        return self.terms.get(d, (0, 0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        body = ", ".join(f"{d}: {self.terms[d]}" for d in sorted(self.terms))
        return f"SeriesPolynomial({{{body}}}, d_max={self.d_max})"

    def copy(self) -> "SeriesPolynomial":
        p = SeriesPolynomial(d_max=self.d_max)
        p.terms = dict(self.terms)
        return p

    def iadd(self, other: "SeriesPolynomial") -> "SeriesPolynomial":
        for d, (c, w) in other.terms.items():
            self._add_term(d, c, w)
        return self

    def __add__(self, other: "SeriesPolynomial") -> "SeriesPolynomial":
        return self.copy().iadd(other)

    def __mul__(self, other: "SeriesPolynomial") -> "SeriesPolynomial":
        d_max = _min_opt(self.d_max, other.d_max)
        out = SeriesPolynomial(d_max=d_max)
        for d1, t1 in self.terms.items():
            for d2, t2 in other.terms.items():
                c, w = term_mul(t1, t2)
                out._add_term(d1 + d2, c, w)
        return out

    def add_branch_product(self, d: int, u: int, other: "SeriesPolynomial") -> None:
        """``self += D^d N^u * other`` without building the monomial."""
        for d2, (c, w) in other.terms.items():
            self._add_term(d + d2, c, w + c if u else w)

    def truncated(self, d_max: int) -> "SeriesPolynomial":
        return SeriesPolynomial(self.terms, d_max)


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# --------------------------------------------------------------------------
# augmented graph


@dataclass(frozen=True)
class AugmentedState:
    sigma: int
    phase: int


def branch_distance(phase: int, outputs: tuple[int, int], schedule: PunctureSchedule) -> int:
    """Transmitted Hamming weight of one branch starting at mask position ``phase``."""
    mask = schedule.mask
    L = len(mask)
    if not 0 <= phase < L:
        raise ValueError(f"phase {phase} outside [0, {L})")
    return mask[phase] * outputs[0] + mask[(phase + 1) % L] * outputs[1]


@dataclass(frozen=True)
class AugmentedBranch:
    src: int
    dst: int
    distance: int
    input: int

    @property
    def poly(self) -> SeriesPolynomial:
        return SeriesPolynomial.monomial(self.distance, self.input)


@dataclass
class Partition:
    """Branches of the augmented graph routed into ``E``, ``Q`` and ``R``."""

    schedule: PunctureSchedule
    states: list[AugmentedState]
    E: list[AugmentedBranch]
    Q: list[AugmentedBranch]
    R: list[AugmentedBranch]

    @property
    def num_nodes(self) -> int:
        return len(self.states)


def _node_index(sigma: int, phase: int) -> int:
    # phase-major so START = (0, 0) is index 0
    return (phase // 2) * NUM_STATES + sigma


def build_partition(schedule, gens: GeneratorSet = STANDARD_GENERATORS) -> Partition:
    """Enumerate every branch leaving an even-phase node and route it.

    The START -> START branch (``u = 0`` from the zero state when ``L = 2``)
    is dropped.
    """
    schedule = as_schedule(schedule)
    L = schedule.period
    states = [AugmentedState(s, ph) for ph in range(0, L, 2) for s in range(NUM_STATES)]
    E, Q, R = [], [], []
    for st in states:
        src = _node_index(st.sigma, st.phase)
        for u in (0, 1):
            out = branch_outputs(st.sigma, u, gens)
            dst = _node_index(next_state(st.sigma, u), (st.phase + 2) % L)
            br = AugmentedBranch(src, dst, branch_distance(st.phase, out, schedule), u)
            if src == START and dst == START:
                continue
            if src == START:
                E.append(br)
            elif dst == START:
                R.append(br)
            else:
                Q.append(br)
    return Partition(schedule, states, E, Q, R)


# --------------------------------------------------------------------------
# spectrum container


@dataclass
class DistanceSpectrum:
    """Event multiplicities ``alpha[d]`` and input weights ``beta[d]`` for ``d <= d_max``.

    ``d_free`` is ``None`` when no event has distance ``<= d_max``.
    """

    schedule: PunctureSchedule
    d_max: int
    alpha: dict[int, int] = field(default_factory=dict)
    beta: dict[int, int] = field(default_factory=dict)
    complete: bool = True

    @property
    def d_free(self) -> int | None:
        return min(self.alpha) if self.alpha else None

    @property
    def is_empty(self) -> bool:
        return not self.alpha

    def __len__(self) -> int:
        return len(self.alpha)

    def distances(self) -> list[int]:
        return sorted(self.alpha)

    def rows(self, n: int | None = None) -> list[tuple[int, int, int]]:
        """First ``n`` non-zero ``(d, alpha_d, beta_d)`` rows."""
        ds = self.distances()
        if n is not None:
            ds = ds[:n]
        return [(d, self.alpha[d], self.beta[d]) for d in ds]

    def restrict(self, d_max: int) -> "DistanceSpectrum":
        keep = [d for d in self.alpha if d <= d_max]
        return DistanceSpectrum(
            self.schedule, d_max, {d: self.alpha[d] for d in keep}, {d: self.beta[d] for d in keep},
            self.complete,
        )

    def same_terms(self, other: "DistanceSpectrum") -> bool:
        return self.alpha == other.alpha and self.beta == other.beta

    @classmethod
    def from_polynomial(cls, schedule: PunctureSchedule, d_max: int, T: SeriesPolynomial,
                        complete: bool = True) -> "DistanceSpectrum":
        alpha, beta = {}, {}
        for d in sorted(T.terms):
            if d == 0 or d > d_max:
                continue
            c, w = T.terms[d]
            alpha[d] = c
            beta[d] = w
        return cls(schedule, d_max, alpha, beta, complete)


# --------------------------------------------------------------------------
# Neumann series


def compute_spectrum(schedule, d_max: int, method: str = "grouped",
                     gens: GeneratorSet = STANDARD_GENERATORS) -> DistanceSpectrum:
    """Distance spectrum of the punctured code up to ``d_max``.

    ``method="plain"`` runs the series literally, ``term <- Q @ term`` until
    the term vector is empty.  Zero-weight branches (zero state at a non-zero
    phase, fully punctured outputs) mean a plain multiply does not always
    raise the degree, so long low-weight paths need thousands of iterations
    at large ``d_max``.

    ``method="grouped"`` (default) sums the same series with ``Q`` split
    into its zero-weight part ``Z`` and the rest ``P``::

        sum_k Q^k R = sum_k ((I - Z)^-1 P)^k (I - Z)^-1 R

    ``Z`` is nilpotent for a non-catastrophic code, so ``(I - Z)^-1`` is a
    finite sweep over a DAG, and each outer step raises the minimum degree
    by at least one: the loop ends within ``d_max + 1`` steps.
    """
    schedule = as_schedule(schedule)
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1, got {d_max}")
    part = build_partition(schedule, gens)
    if method == "plain":
        T = _first_return_plain(part, d_max)
    elif method == "grouped":
        T = _first_return_grouped(part, d_max)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DistanceSpectrum.from_polynomial(schedule, d_max, T)


def _apply_E(part: Partition, x: list[SeriesPolynomial], d_max: int) -> SeriesPolynomial:
    T = SeriesPolynomial(d_max=d_max)
    for br in part.E:
        T.add_branch_product(br.distance, br.input, x[br.dst])
    T.terms.pop(0, None)
    return T


def _first_return_plain(part: Partition, d_max: int) -> SeriesPolynomial:
    n = part.num_nodes
    term = [SeriesPolynomial(d_max=d_max) for _ in range(n)]
    for br in part.R:
        term[br.src].iadd(br.poly.truncated(d_max))
    x = [SeriesPolynomial(d_max=d_max) for _ in range(n)]
    cap = 4 * d_max * part.schedule.period
    for _ in range(cap):
        if not any(term):
            break
        for i in range(n):
            x[i].iadd(term[i])
        new = [SeriesPolynomial(d_max=d_max) for _ in range(n)]
        for br in part.Q:
            if term[br.dst]:
                new[br.src].add_branch_product(br.distance, br.input, term[br.dst])
        term = new
    else:
        if any(term):
            raise SpectrumIterationError(
                f"series did not vanish after {cap} iterations for mask {part.schedule}; "
                "the punctured code may be catastrophic"
            )
    return _apply_E(part, x, d_max)


def _zero_weight_sweep(part: Partition) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Zero-weight S->S branches grouped so each group can be applied at once.

    Group order respects dependencies: a node is updated only after every
    node it reaches through zero-weight branches is final.
    """
    succ: dict[int, list[int]] = {}
    for br in part.Q:
        if br.distance == 0:
            succ.setdefault(br.src, []).append(br.dst)
    level: dict[int, int] = {}
    visiting: set[int] = set()

    def depth(i: int) -> int:
        if i in level:
            return level[i]
        if i not in succ:
            level[i] = 0
            return 0
        if i in visiting:
            raise SpectrumIterationError(
                f"zero-weight cycle in the augmented graph for mask {part.schedule}; "
                "the punctured code is catastrophic"
            )
        visiting.add(i)
        level[i] = 1 + max(depth(j) for j in succ[i])
        visiting.discard(i)
        return level[i]

    groups: dict[tuple[int, int], tuple[list[int], list[int]]] = {}
    for br in part.Q:
        if br.distance == 0:
            g = groups.setdefault((depth(br.src), br.input), ([], []))
            g[0].append(br.src)
            g[1].append(br.dst)
    return [(u, np.array(src), np.array(dst)) for (_, u), (src, dst) in sorted(groups.items())]


def _first_return_grouped(part: Partition, d_max: int) -> SeriesPolynomial:
    # dense object arrays: counts[i, d] and weights[i, d] as Python ints
    n, width = part.num_nodes, d_max + 1
    sweep = _zero_weight_sweep(part)
    shifts: dict[tuple[int, int], tuple[list[int], list[int]]] = {}
    for br in part.Q:
        if br.distance:
            g = shifts.setdefault((br.input, br.distance), ([], []))
            g[0].append(br.src)
            g[1].append(br.dst)
    positive = [(u, dd, np.array(s), np.array(t)) for (u, dd), (s, t) in shifts.items()]

    def zeros():
        return np.zeros((n, width), dtype=object)

    def close(C, W, lo):
        for u, src, dst in sweep:
            c = C[dst, lo:]
            C[src, lo:] += c
            W[src, lo:] += W[dst, lo:] + c if u else W[dst, lo:]

    C, W = zeros(), zeros()
    for br in part.R:
        if br.distance <= d_max:
            C[br.src, br.distance] += 1
            W[br.src, br.distance] += br.input
    close(C, W, 0)

    xC, xW = zeros(), zeros()
    lo = 0
    while True:
        xC[:, lo:] += C[:, lo:]
        xW[:, lo:] += W[:, lo:]
        nC, nW = zeros(), zeros()
        for u, dd, src, dst in positive:
            if lo + dd > d_max:
                continue
            c = C[dst, lo:width - dd]
            nC[src, lo + dd:] += c
            nW[src, lo + dd:] += W[dst, lo:width - dd] + c if u else W[dst, lo:width - dd]
        lo += 1
        if lo > d_max:
            break
        close(nC, nW, lo)
        C, W = nC, nW
        if not C[:, lo:].any():
            break

    T = SeriesPolynomial(d_max=d_max)
    for br in part.E:
        for d in np.flatnonzero(xC[br.dst, : width - br.distance]):
            c = xC[br.dst, d]
            w = xW[br.dst, d]
            T._add_term(int(d) + br.distance, c, w + c if br.input else w)
    T.terms.pop(0, None)
    return T


# --------------------------------------------------------------------------
# brute-force oracle


def _distance_to_start(mask, t1: int, t2: int) -> list[list[float]]:
    """Least transmitted weight from each ``(state, phase)`` back to START (Dijkstra)."""
    import heapq

    L = len(mask)
    inf = float("inf")
    best = [[inf] * L for _ in range(NUM_STATES)]
    preds: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
    for phase in range(L):
        for state in range(NUM_STATES):
            for u in (0, 1):
                reg = (state << 1) | u
                w = mask[phase] * (bin(reg & t1).count("1") & 1) + mask[(phase + 1) % L] * (bin(reg & t2).count("1") & 1)
                preds.setdefault((reg & 0x3F, (phase + 2) % L), []).append((state, phase, w))
    best[0][0] = 0
    heap = [(0, 0, 0)]
    while heap:
        d, state, phase = heapq.heappop(heap)
        if d > best[state][phase]:
            continue
        for ps, pp, w in preds.get((state, phase), ()):
            if d + w < best[ps][pp]:
                best[ps][pp] = d + w
                heapq.heappush(heap, (d + w, ps, pp))
    return best


def brute_force_spectrum(schedule, d_max: int, max_steps: int = 200,
                         gens: GeneratorSet = STANDARD_GENERATORS) -> DistanceSpectrum:
    """Enumerate every START -> START first-return path by depth-first search.

    Uses its own shift-register arithmetic rather than the partition tables.
    A prefix is dropped once its distance plus the cheapest way home exceeds
    ``d_max``; a prefix still alive at ``max_steps`` makes the result
    incomplete and raises :class:`IncompleteEnumerationWarning`.
    """
    schedule = as_schedule(schedule)
    mask = schedule.mask
    L = len(mask)
    t1, t2 = gens.taps
    home = _distance_to_start(mask, t1, t2)
    alpha: dict[int, int] = {}
    beta: dict[int, int] = {}
    truncated = False

    # (register: next input in bit 0 above the six previous inputs, phase, distance, input weight, steps)
    stack = [(u, 0, 0, 0, 0) for u in (0, 1)]
    while stack:
        reg, phase, dist, wt, steps = stack.pop()
        v1 = bin(reg & t1).count("1") & 1
        v2 = bin(reg & t2).count("1") & 1
        dist += mask[phase] * v1 + mask[(phase + 1) % L] * v2
        wt += reg & 1
        steps += 1
        state = reg & 0x3F
        phase = (phase + 2) % L
        if dist + home[state][phase] > d_max:
            continue
        if state == 0 and phase == 0:
            if dist > 0:
                alpha[dist] = alpha.get(dist, 0) + 1
                beta[dist] = beta.get(dist, 0) + wt
            # dist == 0: the excluded all-zero self-loop (L = 2) or a zero-weight return
            continue
        if steps >= max_steps:
            truncated = True
            continue
        for u in (0, 1):
            stack.append(((state << 1) | u, phase, dist, wt, steps))

    if truncated:
        warnings.warn(
            f"brute-force enumeration hit max_steps={max_steps} with live paths at distance <= {d_max}; "
            "result is incomplete",
            IncompleteEnumerationWarning,
            stacklevel=2,
        )
    alpha = dict(sorted(alpha.items()))
    return DistanceSpectrum(schedule, d_max, alpha, {d: beta[d] for d in alpha}, complete=not truncated)
