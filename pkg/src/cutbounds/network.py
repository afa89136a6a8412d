"""Broadcast networks with exact min-cut computation.

A broadcast network is a directed acyclic graph with one source, K sinks,
and a message index set; each sink demands a nonempty subset of the
messages.  Arc capacities are positive rationals, or ``None`` for arcs
that can never be cut (the unbounded delivery links of a combination
network).  All flow arithmetic uses :class:`fractions.Fraction`, so cut
capacities are exact and the internal max-flow == min-cut check is an
equality, not a tolerance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    CutVerificationError,
    GroundMismatchError,
    InfeasibleCutError,
    ParameterError,
)
from .setcalc import MAX_FAMILY, MAX_GROUND, ElementSet, GroundSet, SubsetFamily

Capacity = Optional[Fraction]

SYMMETRIC_MODES = ("common-plus-private",)


def _coerce_capacity(value) -> Capacity:
    if value is None:
        return None
    try:
        cap = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParameterError(f"invalid arc capacity {value!r}") from None
    if cap <= 0:
        raise ParameterError("arc capacity must be positive (or None for unbounded)")
    return cap


@dataclass(frozen=True)
class Arc:
    """A directed arc; capacity None marks an uncuttable, unbounded arc."""

    label: str
    tail: str
    head: str
    capacity: Capacity

    def __post_init__(self):
        for field in (self.label, self.tail, self.head):
            if not isinstance(field, str) or not field:
                raise ParameterError("arc label and endpoints must be nonempty strings")
        if self.tail == self.head:
            raise ParameterError(f"arc {self.label!r} is a self-loop")
        object.__setattr__(self, "capacity", _coerce_capacity(self.capacity))


@dataclass(frozen=True)
class Cut:
    """An arc set disconnecting the source from sink `sink`.

    Build through make_cut or min_cut; both verify the disconnection
    property.  `capacity` is the exact sum of member capacities.
    """

    arcs: ElementSet
    sink: int
    capacity: Fraction


class BroadcastNetwork:
    """Immutable single-source multi-sink network over a DAG."""

    def __init__(
        self,
        nodes: Iterable[str],
        arcs: Iterable[Arc],
        source: str,
        sinks: Sequence[str],
        messages: Sequence[str],
        demands: Mapping[int, Iterable[str]],
    ):
        self.nodes = tuple(nodes)
        if not self.nodes or len(set(self.nodes)) != len(self.nodes):
            raise ParameterError("nodes must be nonempty and distinct")
        node_set = set(self.nodes)

        self.arcs = tuple(arcs)
        if not 1 <= len(self.arcs) <= MAX_GROUND:
            raise ParameterError(f"networks carry 1..{MAX_GROUND} arcs")
        labels = [a.label for a in self.arcs]
        if len(set(labels)) != len(labels):
            raise ParameterError("arc labels must be distinct")
        for a in self.arcs:
            if not isinstance(a, Arc):
                raise ParameterError("arcs must be Arc instances")
            if a.tail not in node_set or a.head not in node_set:
                raise ParameterError(f"arc {a.label!r} references an unknown node")

        if source not in node_set:
            raise ParameterError(f"source {source!r} is not a node")
        self.source = source

        self.sinks = tuple(sinks)
        if not 1 <= len(self.sinks) <= MAX_FAMILY:
            raise ParameterError(f"networks carry 1..{MAX_FAMILY} sinks")
        if len(set(self.sinks)) != len(self.sinks):
            raise ParameterError("sinks must be distinct")
        for t in self.sinks:
            if t not in node_set:
                raise ParameterError(f"sink {t!r} is not a node")
            if t == source:
                raise ParameterError("the source cannot be a sink")

        self.messages = tuple(messages)
        if not 1 <= len(self.messages) <= MAX_GROUND:
            raise ParameterError(f"networks carry 1..{MAX_GROUND} messages")
        if len(set(self.messages)) != len(self.messages):
            raise ParameterError("message labels must be distinct")

        wanted = set(range(1, len(self.sinks) + 1))
        if set(demands) != wanted:
            raise ParameterError("demands must be keyed by sink indices 1..K exactly")
        msg_set = set(self.messages)
        cleaned = {}
        for k in sorted(demands):
            dem = frozenset(demands[k])
            if not dem:
                raise ParameterError(f"sink {k} demands no messages")
            unknown = dem - msg_set
            if unknown:
                raise ParameterError(f"sink {k} demands unknown messages {sorted(unknown)}")
            cleaned[k] = dem
        self.demands = cleaned

        self._out = {n: [] for n in self.nodes}
        for a in self.arcs:
            self._out[a.tail].append(a)
        self._check_acyclic()

        reachable = self._reachable(frozenset())
        for k, t in enumerate(self.sinks, start=1):
            if t not in reachable:
                raise ParameterError(f"sink t_{k} ({t!r}) not reachable from the source")

        self.arc_ground = GroundSet(len(self.arcs), tuple(labels))
        self.message_ground = GroundSet(len(self.messages), self.messages)
        self._by_label = {a.label: a for a in self.arcs}

    @property
    def K(self) -> int:
        return len(self.sinks)

    def arc_subset(self, labels: Iterable[str]) -> ElementSet:
        return self.arc_ground.subset_of_labels(labels)

    def message_subset(self, labels: Iterable[str]) -> ElementSet:
        return self.message_ground.subset_of_labels(labels)

    def demand_set(self, k: int) -> ElementSet:
        return self.message_subset(sorted(self.demands[k], key=self.messages.index))

    def arc(self, label: str) -> Arc:
        try:
            return self._by_label[label]
        except KeyError:
            raise ParameterError(f"unknown arc label {label!r}") from None

    def _check_acyclic(self) -> None:
        indeg = {n: 0 for n in self.nodes}
        for a in self.arcs:
            indeg[a.head] += 1
        queue = deque(n for n in self.nodes if indeg[n] == 0)
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for a in self._out[n]:
                indeg[a.head] -= 1
                if indeg[a.head] == 0:
                    queue.append(a.head)
        if seen != len(self.nodes):
            raise ParameterError("network graph contains a directed cycle")

    def _reachable(self, removed: frozenset) -> set:
        """Nodes reachable from the source when `removed` arc labels are gone."""
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            n = queue.popleft()
            for a in self._out[n]:
                if a.label in removed or a.head in seen:
                    continue
                seen.add(a.head)
                queue.append(a.head)
        return seen


def _check_sink_index(net: BroadcastNetwork, k: int) -> str:
    if not isinstance(k, int) or not 1 <= k <= net.K:
        raise ParameterError(f"sink index {k!r} outside 1..{net.K}")
    return net.sinks[k - 1]


def is_cut(net: BroadcastNetwork, arcs: ElementSet, k: int) -> bool:
    """True iff no directed source-to-sink-k path survives removing `arcs`."""
    target = _check_sink_index(net, k)
    if not isinstance(arcs, ElementSet) or arcs.ground != net.arc_ground:
        raise GroundMismatchError("arc set does not live over this network's arcs")
    removed = frozenset(arcs.member_labels())
    return target not in net._reachable(removed)


def make_cut(net: BroadcastNetwork, arcs, k: int) -> Cut:
    """Verify an arc set as a cut for sink k and attach its exact capacity."""
    if not isinstance(arcs, ElementSet):
        arcs = net.arc_subset(arcs)
    if not is_cut(net, arcs, k):
        raise CutVerificationError(
            f"arc set {sorted(arcs.member_labels())} does not disconnect sink {k}"
        )
    members = [net.arc(label) for label in arcs.member_labels()]
    if any(a.capacity is None for a in members):
        raise CutVerificationError("cuts may not contain unbounded arcs")
    capacity = sum((a.capacity for a in members), Fraction(0))
    return Cut(arcs=arcs, sink=k, capacity=capacity)


def min_cut(net: BroadcastNetwork, k: int) -> Cut:
    """Minimum-capacity cut for sink k via shortest augmenting paths.

    Residual capacities are exact rationals with None as the unbounded
    marker, so termination follows the classical Edmonds-Karp argument and
    the returned capacity equals the max-flow value exactly.  Ties break
    to the source side: the cut consists of the arcs leaving the set of
    nodes reachable in the final residual graph.
    """
    target = _check_sink_index(net, k)

    if _unbounded_path_exists(net, target):
        raise InfeasibleCutError(
            f"sink {k} is reachable through unbounded arcs alone; no finite cut exists"
        )

    residual: dict = {}
    for a in net.arcs:
        key = (a.tail, a.head)
        if a.capacity is None or residual.get(key, Fraction(0)) is None:
            residual[key] = None
        else:
            residual[key] = residual.get(key, Fraction(0)) + a.capacity
        residual.setdefault((a.head, a.tail), Fraction(0))

    pushed = {key: Fraction(0) for key in residual}
    neighbours = {n: set() for n in net.nodes}
    for (u, v) in residual:
        neighbours[u].add(v)

    def bfs_path():
        parent = {net.source: None}
        queue = deque([net.source])
        while queue:
            n = queue.popleft()
            if n == target:
                path = []
                while parent[n] is not None:
                    path.append((parent[n], n))
                    n = parent[n]
                return path[::-1]
            for m in neighbours[n]:
                cap = residual[(n, m)]
                if m not in parent and (cap is None or cap > 0):
                    parent[m] = n
                    queue.append(m)
        return None

    while True:
        path = bfs_path()
        if path is None:
            break
        finite = [residual[e] for e in path if residual[e] is not None]
        push = min(finite)  # nonempty: an all-unbounded path was excluded above
        for (u, v) in path:
            if residual[(u, v)] is not None:
                residual[(u, v)] -= push
            back = residual[(v, u)]
            if back is not None:
                residual[(v, u)] = back + push
            pushed[(u, v)] += push
            pushed[(v, u)] -= push

    side = {net.source}
    queue = deque([net.source])
    while queue:
        n = queue.popleft()
        for m in neighbours[n]:
            cap = residual[(n, m)]
            if m not in side and (cap is None or cap > 0):
                side.add(m)
                queue.append(m)

    crossing = [a.label for a in net.arcs if a.tail in side and a.head not in side]
    cut = make_cut(net, crossing, k)

    flow = sum(
        (amount for (u, _), amount in pushed.items() if u == net.source),
        Fraction(0),
    )
    # max-flow/min-cut equality is an internal consistency check, not user input
    if flow != cut.capacity:
        raise AssertionError(
            f"max-flow {flow} differs from cut capacity {cut.capacity}"
        )
    return cut


def _unbounded_path_exists(net: BroadcastNetwork, target: str) -> bool:
    finite = frozenset(a.label for a in net.arcs if a.capacity is not None)
    return target in net._reachable(finite)


def cut_and_message_families(
    net: BroadcastNetwork, cuts: Sequence[Cut]
) -> tuple[SubsetFamily, SubsetFamily]:
    """Pair (A_1..A_K, I_1..I_K) ready for bound instantiation.

    Takes exactly one cut per sink, in any order; each is re-verified
    against this network before use.
    """
    if len(cuts) != net.K:
        raise ParameterError(f"expected one cut per sink ({net.K}), got {len(cuts)}")
    by_sink = {}
    for cut in cuts:
        if not isinstance(cut, Cut):
            raise ParameterError("cuts must be Cut instances")
        if cut.sink in by_sink:
            raise ParameterError(f"two cuts given for sink {cut.sink}")
        by_sink[cut.sink] = cut
    if set(by_sink) != set(range(1, net.K + 1)):
        raise ParameterError("cuts must cover sink indices 1..K exactly")
    for k in range(1, net.K + 1):
        cut = by_sink[k]
        if not is_cut(net, cut.arcs, k):
            raise CutVerificationError(f"cut for sink {k} fails verification")
    cut_family = SubsetFamily(
        net.arc_ground, tuple(by_sink[k].arcs for k in range(1, net.K + 1))
    )
    msg_family = SubsetFamily(
        net.message_ground, tuple(net.demand_set(k) for k in range(1, net.K + 1))
    )
    return cut_family, msg_family


def _subset_key(subset) -> tuple[int, ...]:
    members = tuple(sorted(set(subset)))
    if not members:
        raise ParameterError("capacity subsets must be nonempty")
    return members


def _subset_name(members: tuple[int, ...]) -> str:
    return "".join(str(i) for i in members)


def combination_network(
    K: int,
    caps: Mapping,
    demands: Mapping[int, Iterable[str]],
    messages: Optional[Sequence[str]] = None,
) -> BroadcastNetwork:
    """Three-layer network: source, one mixer node per capacitated subset, sinks.

    `caps` maps nonempty subsets of {1..K} to nonnegative rationals; zero or
    missing entries omit the mixer node entirely, so its arcs can never show
    up in a cut.  Mixer-to-sink delivery arcs are unbounded.
    """
    if not isinstance(K, int) or K < 1:
        raise ParameterError("K must be a positive integer")
    if K > 9:
        raise ParameterError("combination networks support K <= 9")

    by_subset = {}
    for subset, value in caps.items():
        members = _subset_key(subset)
        if members[0] < 1 or members[-1] > K:
            raise ParameterError(f"subset {members} outside 1..{K}")
        if members in by_subset:
            raise ParameterError(f"duplicate capacity entry for subset {members}")
        cap = Fraction(value)
        if cap < 0:
            raise ParameterError("subset capacities must be nonnegative")
        by_subset[members] = cap

    kept = []
    for size in range(1, K + 1):
        for members in combinations(range(1, K + 1), size):
            cap = by_subset.get(members, Fraction(0))
            if cap > 0:
                kept.append((members, cap))

    nodes = ["s"]
    arcs = []
    for members, cap in kept:
        name = _subset_name(members)
        nodes.append(f"v{name}")
        arcs.append(Arc(f"a{name}", "s", f"v{name}", cap))
    sink_nodes = [f"t{k}" for k in range(1, K + 1)]
    nodes.extend(sink_nodes)
    for members, _ in kept:
        name = _subset_name(members)
        for k in members:
            arcs.append(Arc(f"v{name}->t{k}", f"v{name}", f"t{k}", None))

    if messages is None:
        seen = []
        for k in sorted(demands):
            for label in demands[k]:
                if label not in seen:
                    seen.append(label)
        messages = seen

    return BroadcastNetwork(nodes, arcs, "s", sink_nodes, messages, demands)


def complete_combination_network(K: int, caps: Optional[Mapping] = None) -> BroadcastNetwork:
    """Combination network with one message per nonempty subset of sinks.

    Message W_U is demanded by exactly the sinks in U; capacities default
    to 1 on every subset.
    """
    if not isinstance(K, int) or K < 1:
        raise ParameterError("K must be a positive integer")
    subsets = [
        members
        for size in range(1, K + 1)
        for members in combinations(range(1, K + 1), size)
    ]
    if caps is None:
        caps = {members: 1 for members in subsets}
    messages = [f"W{_subset_name(members)}" for members in subsets]
    demands = {
        k: [f"W{_subset_name(members)}" for members in subsets if k in members]
        for k in range(1, K + 1)
    }
    return combination_network(K, caps, demands, messages=messages)


def symmetric_combination_network(
    K: int, c: Sequence, mode: str = "common-plus-private"
) -> BroadcastNetwork:
    """Combination network with level capacities C_U = C_|U| and K+1 messages.

    Message W_0 is demanded by every sink; W_k only by sink k.
    """
    if mode not in SYMMETRIC_MODES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {SYMMETRIC_MODES}")
    if not isinstance(K, int) or K < 1:
        raise ParameterError("K must be a positive integer")
    c = tuple(c)
    if len(c) != K:
        raise ParameterError(f"capacity list must have length {K}")
    caps = {
        members: Fraction(c[size - 1])
        for size in range(1, K + 1)
        for members in combinations(range(1, K + 1), size)
    }
    messages = ["W0"] + [f"W{k}" for k in range(1, K + 1)]
    demands = {k: ["W0", f"W{k}"] for k in range(1, K + 1)}
    return combination_network(K, caps, demands, messages=messages)
