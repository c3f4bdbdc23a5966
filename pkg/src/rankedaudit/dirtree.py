"""Dirichlet-tree prior and posterior over the ranking trie.

The tree follows preference order: the root splits into one branch per first
preference, each internal node splits over the remaining candidates, and a
node with a single remaining candidate is a leaf (the last preference is
forced). With partial ballots enabled, every internal node below the root
carries one extra termination branch meaning "no further preferences"; the
root carries none, so a ballot always ranks at least one candidate.

Every branch has prior concentration a0. Observing a ballot adds one to the
count of every branch along its path, which by conjugacy is the exact
posterior update. Only observed prefixes are materialized; unobserved branches
contribute a0 analytically, so the trie stays small even when the number of
ballot types is astronomically large.

The flat Dirichlet baseline is the degenerate depth-1 shape over the same
leaf set, driven through the same machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .ballots import BallotMultiset, Ranking, Roster, is_canonical, validate_ranking

TERM = -2      # trie child key for the termination branch
PAD = -1       # filler in packed ranking arrays
LOG_SPACE_DEPTH = 25   # beyond this path depth, multiply factors in log space
DENSE_LEAF_LIMIT = 20000  # flat-Dirichlet sampling enumerates leaves up to here

DIRICHLET_TREE = "dirichlet-tree"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class PriorConfig:
    """Prior family and shared per-branch concentration.

    a0 = 0 is the degenerate bootstrap prior: all predictive mass sits on
    observed ballot types. For kind="dirichlet", a0 is the per-leaf
    concentration over the same leaf set the tree shape would induce.
    """

    kind: str = DIRICHLET_TREE
    a0: float = 1.0
    allow_partial: bool = True

    def __post_init__(self):
        if self.kind not in (DIRICHLET_TREE, DIRICHLET):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if not (self.a0 >= 0 and math.isfinite(self.a0)):
            raise ValueError(f"a0 must be a finite non-negative real, got {self.a0}")


@dataclass(frozen=True)
class RandomStream:
    """A reproducible, platform-stable random stream.

    Identical (seed, stream) pairs yield identical draw sequences; distinct
    stream ids give statistically independent streams. Stream ids form a
    tuple so callers can derive hierarchical sub-streams.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def child(self, *ids: int) -> "RandomStream":
        return RandomStream(self.seed, self.stream + tuple(ids))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((self.seed, *self.stream))


def leaf_count(k: int, allow_partial: bool) -> int:
    """Number of distinct ballot types the tree admits."""
    total = math.factorial(k)
    if allow_partial:
        total += sum(math.perm(k, length) for length in range(1, k - 1))
    return total


def iter_leaf_types(k: int, allow_partial: bool) -> Iterator[Ranking]:
    """All ballot types in canonical enumeration order.

    Partial lengths ascending, each block lexicographic, complete rankings
    last. This order matches rank_type/unrank_type.
    """
    import itertools

    if allow_partial:
        for length in range(1, k - 1):
            yield from itertools.permutations(range(k), length)
    yield from itertools.permutations(range(k))


def rank_type(ranking: Ranking, k: int, allow_partial: bool) -> int:
    """Position of a canonical ballot type in enumeration order."""
    length = len(ranking)
    offset = 0
    if allow_partial:
        for block_len in range(1, k - 1):
            if block_len == length:
                break
            offset += math.perm(k, block_len)
    rank = 0
    available = list(range(k))
    for i, c in enumerate(ranking):
        j = available.index(c)
        rank += j * math.perm(k - 1 - i, length - 1 - i)
        available.pop(j)
    return offset + rank


def unrank_type(index: int, k: int, allow_partial: bool) -> Ranking:
    """Inverse of rank_type."""
    length = k
    if allow_partial:
        for block_len in range(1, k - 1):
            size = math.perm(k, block_len)
            if index < size:
                length = block_len
                break
            index -= size
    available = list(range(k))
    out = []
    for i in range(length):
        block = math.perm(k - 1 - i, length - 1 - i)
        q, index = divmod(index, block)
        out.append(available.pop(q))
    return tuple(out)


class _TreeStructure:
    """The fully enumerated tree shape for small k, flattened into arrays.

    Cached per (k, allow_partial). Branches are laid out node-major in BFS
    order; each branch leads either to a child node or to a leaf (a complete
    ranking once one candidate remains, or a termination leaf).
    """

    _cache: dict[tuple[int, bool], "_TreeStructure"] = {}

    @classmethod
    def get(cls, k: int, allow_partial: bool) -> "_TreeStructure":
        key = (k, allow_partial)
        if key not in cls._cache:
            cls._cache[key] = cls(k, allow_partial)
        return cls._cache[key]

    def __init__(self, k: int, allow_partial: bool):
        assert k >= 2
        branch_owner: list[int] = []
        branch_child: list[int] = []
        branch_leaf: list[int] = []
        node_level: list[int] = [0]
        key_to_branch: list[dict[int, int]] = []
        key_to_child: list[dict[int, int]] = []
        leaves: list[Ranking] = []
        queue: list[tuple[int, Ranking, tuple[int, ...]]] = [(0, (), tuple(range(k)))]
        head = 0
        while head < len(queue):
            node_id, prefix, remaining = queue[head]
            head += 1
            depth = len(prefix)
            r = len(remaining)
            branch_map: dict[int, int] = {}
            child_map: dict[int, int] = {}
            for c in remaining:
                b = len(branch_owner)
                branch_map[c] = b
                branch_owner.append(node_id)
                if r == 2:
                    other = remaining[0] if remaining[1] == c else remaining[1]
                    branch_child.append(-1)
                    branch_leaf.append(len(leaves))
                    leaves.append(prefix + (c, other))
                else:
                    child_id = len(node_level)
                    node_level.append(depth + 1)
                    child_map[c] = child_id
                    branch_child.append(child_id)
                    branch_leaf.append(-1)
                    queue.append((child_id, prefix + (c,),
                                  tuple(x for x in remaining if x != c)))
            if allow_partial and depth > 0:
                b = len(branch_owner)
                branch_map[TERM] = b
                branch_owner.append(node_id)
                branch_child.append(-1)
                branch_leaf.append(len(leaves))
                leaves.append(prefix)
            key_to_branch.append(branch_map)
            key_to_child.append(child_map)

        self.k = k
        self.n_nodes = len(node_level)
        self.n_branches = len(branch_owner)
        self.branch_owner = np.array(branch_owner, dtype=np.int64)
        self.branch_child = np.array(branch_child, dtype=np.int64)
        self.branch_leaf = np.array(branch_leaf, dtype=np.int64)
        self.key_to_branch = key_to_branch
        self.key_to_child = key_to_child
        self.leaf_index = {t: i for i, t in enumerate(leaves)}
        self.leaf_rows = np.full((len(leaves), k), PAD, dtype=np.int16)
        for i, t in enumerate(leaves):
            self.leaf_rows[i, : len(t)] = t
        is_leaf_branch = self.branch_leaf >= 0
        self.leaf_branches = np.flatnonzero(is_leaf_branch)
        levels = np.array(node_level, dtype=np.int64)
        self.level_child_branches = [
            np.flatnonzero((levels[self.branch_owner] == lvl) & ~is_leaf_branch)
            for lvl in range(int(levels.max()) + 1)]

    def draw_leaf_counts(self, alphas: np.ndarray, m: int,
                         gen: np.random.Generator) -> np.ndarray:
        """One posterior-predictive draw of m ballots as counts per leaf.

        Draws every node's branch proportions at once (normalized gammas),
        cascades them into leaf probabilities, and splits m multinomially.
        The compound is the identical Dirichlet-multinomial law that lazy
        count propagation realizes.
        """
        weights = gen.gamma(alphas)
        node_totals = np.bincount(self.branch_owner, weights=weights,
                                  minlength=self.n_nodes)
        props = weights / node_totals[self.branch_owner]
        node_prob = np.empty(self.n_nodes, dtype=np.float64)
        node_prob[0] = 1.0
        for branches in self.level_child_branches:
            if branches.size:
                node_prob[self.branch_child[branches]] = (
                    props[branches] * node_prob[self.branch_owner[branches]])
        lb = self.leaf_branches
        leaf_prob = props[lb] * node_prob[self.branch_owner[lb]]
        leaf_prob /= leaf_prob.sum()
        return gen.multinomial(m, leaf_prob)


class _Node:
    __slots__ = ("count", "children")

    def __init__(self):
        self.count = 0
        self.children: dict[int, _Node] = {}

    def child(self, key: int) -> "_Node":
        node = self.children.get(key)
        if node is None:
            node = _Node()
            self.children[key] = node
        return node

    def copy(self) -> "_Node":
        dup = _Node()
        dup.count = self.count
        dup.children = {key: ch.copy() for key, ch in self.children.items()}
        return dup

    def __eq__(self, other) -> bool:
        return (isinstance(other, _Node) and self.count == other.count
                and self.children == other.children)


class PosteriorTree:
    """Sparse posterior over ballot types; the prior is the n = 0 state."""

    def __init__(self, roster: Roster, config: PriorConfig):
        self.roster = roster
        self.config = config
        self._root = _Node()
        self._types: dict[Ranking, int] = {}
        self._obs_cache: tuple[np.ndarray, np.ndarray] | None = None
        self._leaf_cache: tuple[np.ndarray, dict[Ranking, int]] | None = None
        self._alpha_cache: np.ndarray | None = None

    # ------------------------------------------------------------------ basics

    @property
    def n(self) -> int:
        return self._root.count

    @property
    def k(self) -> int:
        return self.roster.k

    def copy(self) -> "PosteriorTree":
        dup = PosteriorTree(self.roster, self.config)
        dup._root = self._root.copy()
        dup._types = dict(self._types)
        return dup

    def observed_types(self) -> BallotMultiset:
        return BallotMultiset(dict(self._types))

    def materialized_counts(self) -> dict[tuple[int, ...], int]:
        """Branch-path -> observation count for every materialized prefix."""
        out: dict[tuple[int, ...], int] = {}

        def walk(node: _Node, path: tuple[int, ...]):
            out[path] = node.count
            for key, child in node.children.items():
                walk(child, path + (key,))

        walk(self._root, ())
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, PosteriorTree)
                and self.roster == other.roster
                and self.config == other.config
                and self._root == other._root
                and self._types == other._types)

    # ------------------------------------------------------------------ shape

    def _check_canonical(self, ranking: Ranking) -> None:
        k = self.k
        validate_ranking(ranking, k)
        if not is_canonical(ranking, k):
            raise ValueError(
                f"ranking of length {len(ranking)} is not canonical for k={k}; "
                "canonicalize() appends the forced last preference")
        if len(ranking) < k and not self.config.allow_partial:
            raise ValueError("partial ballots are disabled for this prior")

    def _path_keys(self, ranking: Ranking) -> tuple[int, ...]:
        """Branch keys along the ranking's path; complete drops the forced leaf."""
        if len(ranking) == self.k:
            return ranking[: self.k - 1]
        return ranking + (TERM,)

    def _branch_count(self, depth: int, remaining: int) -> int:
        if depth == 0:
            return remaining
        return remaining + (1 if self.config.allow_partial else 0)

    # ------------------------------------------------------------------ update

    def update(self, ranking: Iterable[int], count: int = 1) -> None:
        """Add `count` observed ballots of one canonical ranking type."""
        ranking = tuple(ranking)
        self._check_canonical(ranking)
        if count < 1:
            raise ValueError("count must be a positive integer")
        if self.config.kind == DIRICHLET_TREE:
            node = self._root
            node.count += count
            for key in self._path_keys(ranking):
                node = node.child(key)
                node.count += count
        else:
            self._root.count += count
        self._types[ranking] = self._types.get(ranking, 0) + count
        self._obs_cache = None
        self._alpha_cache = None

    def update_all(self, ballots: BallotMultiset) -> None:
        for ranking, count in ballots.items():
            self.update(ranking, count)

    # ------------------------------------------------------------- predictive

    def predictive_probability(self, ranking: Iterable[int]) -> float:
        """Posterior-predictive probability of drawing one ballot of this type.

        The product over the ranking's path of (a0 + branch count) over the
        node total (branches * a0 + node count). With a0 = 0, anything outside
        the observed support has probability zero.
        """
        ranking = tuple(ranking)
        self._check_canonical(ranking)
        a0 = self.config.a0
        if a0 == 0 and self.n == 0:
            raise ValueError("the a0=0 bootstrap predictive is undefined before any observation")

        if self.config.kind == DIRICHLET:
            total_types = leaf_count(self.k, self.config.allow_partial)
            num = a0 + self._types.get(ranking, 0)
            if num == 0:
                return 0.0
            return num / (total_types * a0 + self.n)

        keys = self._path_keys(ranking)
        node: _Node | None = self._root
        remaining = self.k
        factors = []
        for depth, key in enumerate(keys):
            branches = self._branch_count(depth, remaining)
            node_count = node.count if node is not None else 0
            child = node.children.get(key) if node is not None else None
            num = a0 + (child.count if child is not None else 0)
            if num == 0:
                return 0.0
            factors.append(num / (branches * a0 + node_count))
            node = child
            if key != TERM:
                remaining -= 1
        if len(factors) > LOG_SPACE_DEPTH:
            return float(math.exp(sum(math.log(f) for f in factors)))
        prob = 1.0
        for f in factors:
            prob *= f
        return prob

    # --------------------------------------------------------------- sampling

    def sample_remaining(self, m: int, rng: RandomStream) -> BallotMultiset:
        """One joint draw of m unseen ballots from the posterior predictive.

        Counts propagate down the tree: each node splits its allotment over
        its branches with a Dirichlet-multinomial draw (concentrations
        a0 + branch count), so only nodes that actually receive ballots are
        visited. Exchangeably equivalent to m sequential Polya-urn draws.
        """
        rows, counts = self.sample_remaining_arrays(m, rng)
        out = BallotMultiset()
        for row, count in zip(rows, counts):
            out.add(tuple(int(c) for c in row if c != PAD), int(count))
        return out

    def sample_remaining_arrays(self, m: int,
                                rng: RandomStream | np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Array form of sample_remaining: PAD-packed rows plus counts."""
        gen = rng.generator() if isinstance(rng, RandomStream) else rng
        k = self.k
        if m < 0:
            raise ValueError("m must be non-negative")
        if m == 0:
            return np.empty((0, k), dtype=np.int16), np.empty(0, dtype=np.int64)
        if self.config.a0 == 0:
            if self.n == 0:
                raise ValueError("the a0=0 bootstrap cannot impute before any observation")
            return self._split_over_observed(m, gen)
        if k == 1:
            return (np.zeros((1, 1), dtype=np.int16), np.array([m], dtype=np.int64))
        sampler = self.fixed_type_sampler()
        if sampler is not None:
            counts = sampler.draw_counts(m, gen)
            keep = counts > 0
            return sampler.rows[keep], counts[keep].astype(np.int64)
        if self.config.kind == DIRICHLET:
            return self._sample_flat_by_halving(
                m, gen, leaf_count(k, self.config.allow_partial))
        return self._sample_tree(m, gen)

    def fixed_type_sampler(self) -> "FixedTypeSampler | None":
        """A sampler over a fixed type table, when one is tractable.

        Covers the bootstrap (observed types only) and any prior whose full
        leaf set is small enough to enumerate. Returns None when only lazy
        propagation over the huge type space will do.
        """
        a0 = self.config.a0
        if a0 == 0:
            if self.n == 0:
                return None
            rows, counts = self.observed_arrays()
            return _BootstrapSampler(rows, counts)
        if self.k == 1 or leaf_count(self.k, self.config.allow_partial) > DENSE_LEAF_LIMIT:
            return None
        if self.config.kind == DIRICHLET:
            rows, index = self._leaf_table()
            if self._alpha_cache is None:
                alphas = np.full(rows.shape[0], a0, dtype=np.float64)
                for ranking, count in self._types.items():
                    alphas[index[ranking]] += count
                self._alpha_cache = alphas
            return _FlatSampler(rows, index, self._alpha_cache)
        structure = _TreeStructure.get(self.k, self.config.allow_partial)
        if self._alpha_cache is None:
            alphas = np.full(structure.n_branches, a0, dtype=np.float64)

            def fill(node: _Node, struct_id: int):
                branch_map = structure.key_to_branch[struct_id]
                child_map = structure.key_to_child[struct_id]
                for key, child in node.children.items():
                    alphas[branch_map[key]] += child.count
                    if key in child_map:
                        fill(child, child_map[key])

            fill(self._root, 0)
            self._alpha_cache = alphas
        return _DenseTreeSampler(structure, self._alpha_cache)

    # The a0 = 0 posterior is a flat Dirichlet over observed types no matter
    # the shape (nested Dirichlets with zero prior mass aggregate exactly), so
    # both kinds share this path and produce identical draws per stream.
    def _split_over_observed(self, m: int, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        rows, observed = self.observed_arrays()
        weights = gen.gamma(observed.astype(np.float64))
        counts = gen.multinomial(m, weights / weights.sum())
        keep = counts > 0
        return rows[keep], counts[keep].astype(np.int64)

    def observed_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Observed types packed into rows, in sorted-ranking order (cached)."""
        if self._obs_cache is None:
            entries = sorted(self._types.items())
            rows = np.full((len(entries), self.k), PAD, dtype=np.int16)
            counts = np.empty(len(entries), dtype=np.int64)
            for i, (ranking, count) in enumerate(entries):
                rows[i, : len(ranking)] = ranking
                counts[i] = count
            self._obs_cache = (rows, counts)
        return self._obs_cache

    # ---------------------------------------------------- flat Dirichlet kind

    def _leaf_table(self) -> tuple[np.ndarray, dict[Ranking, int]]:
        if self._leaf_cache is None:
            k = self.k
            types = list(iter_leaf_types(k, self.config.allow_partial))
            rows = np.full((len(types), k), PAD, dtype=np.int16)
            index = {}
            for i, t in enumerate(types):
                rows[i, : len(t)] = t
                index[t] = i
            self._leaf_cache = (rows, index)
        return self._leaf_cache

    def _sample_flat_by_halving(self, m: int, gen: np.random.Generator,
                                total_types: int) -> tuple[np.ndarray, np.ndarray]:
        """Exact flat-Dirichlet sampling when the leaf set cannot be enumerated.

        Recursively halve the enumeration-ranked type space; a Dirichlet
        splits exactly into nested Beta draws over interval aggregates
        (concentration = a0 * interval size + observed count inside), so a
        beta-binomial cascade reproduces the joint law while visiting only
        intervals that receive ballots.
        """
        k = self.k
        allow_partial = self.config.allow_partial
        a0 = self.config.a0
        observed = sorted(
            (rank_type(r, k, allow_partial), c) for r, c in self._types.items())
        obs_ranks = np.array([r for r, _ in observed], dtype=np.int64)
        obs_cum = np.concatenate([[0], np.cumsum([c for _, c in observed])])

        def obs_in(lo: int, hi: int) -> int:
            i = np.searchsorted(obs_ranks, lo, side="left")
            j = np.searchsorted(obs_ranks, hi, side="left")
            return int(obs_cum[j] - obs_cum[i])

        emitted: dict[int, int] = {}
        stack = [(0, total_types, m)]
        while stack:
            lo, hi, balls = stack.pop()
            if balls == 0:
                continue
            if hi - lo == 1:
                emitted[lo] = emitted.get(lo, 0) + balls
                continue
            inside = obs_in(lo, hi)
            if inside == 0 and balls == 1:
                idx = int(gen.integers(lo, hi))
                emitted[idx] = emitted.get(idx, 0) + 1
                continue
            mid = (lo + hi) // 2
            left = a0 * (mid - lo) + obs_in(lo, mid)
            right = a0 * (hi - mid) + (inside - obs_in(lo, mid))
            p = gen.beta(left, right)
            x = int(gen.binomial(balls, p))
            stack.append((mid, hi, balls - x))
            stack.append((lo, mid, x))

        rows = np.full((len(emitted), k), PAD, dtype=np.int16)
        counts = np.empty(len(emitted), dtype=np.int64)
        for i, (idx, count) in enumerate(sorted(emitted.items())):
            t = unrank_type(idx, k, allow_partial)
            rows[i, : len(t)] = t
            counts[i] = count
        return rows, counts

    # ------------------------------------------------------ tree-shaped kind

    def _sample_tree(self, m: int, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Level-by-level count propagation, batched across nodes.

        Jobs at one depth share the same remaining-candidate count, so their
        Dirichlet-multinomial splits run as one batched gamma + multinomial
        call. Unobserved subtrees that are down to a single ballot finish via
        the closed form: termination depth is uniform over the allowed stops
        (weight 2 on completion) and the chosen candidates are a uniformly
        random ordered subset of the remaining ones.
        """
        k = self.k
        a0 = self.config.a0
        partial = self.config.allow_partial
        chunks: list[tuple[np.ndarray, np.ndarray]] = []

        # Active split jobs at the current depth.
        prefixes = np.empty((1, 0), dtype=np.int16)
        remain = np.arange(k, dtype=np.int16).reshape(1, k)
        alloc = np.array([m], dtype=np.int64)
        root = self._root if self._root.count > 0 else None
        nodes: list[_Node | None] = [root]
        # Unobserved single-ballot jobs, queued per depth.
        single_prefixes = np.empty((0, 0), dtype=np.int16)
        single_remain = np.empty((0, k), dtype=np.int16)

        for depth in range(k - 1):
            r = k - depth
            self._finish_virgin_singles(single_prefixes, single_remain, depth, gen, chunks)
            if alloc.size == 0:
                single_prefixes = np.empty((0, depth + 1), dtype=np.int16)
                single_remain = np.empty((0, r - 1), dtype=np.int16)
                continue

            has_term = partial and depth > 0
            branches = r + (1 if has_term else 0)
            alphas = np.full((alloc.size, branches), a0, dtype=np.float64)
            for row, node in enumerate(nodes):
                if node is None:
                    continue
                col_of = {int(c): col for col, c in enumerate(remain[row])}
                for key, child in node.children.items():
                    alphas[row, branches - 1 if key == TERM else col_of[key]] += child.count
            weights = gen.gamma(alphas)
            split = gen.multinomial(alloc, weights / weights.sum(axis=1, keepdims=True))

            if has_term:
                sel = split[:, r] > 0
                if sel.any():
                    chunks.append((_pad(prefixes[sel], k), split[sel, r].astype(np.int64)))

            next_prefixes, next_remain, next_alloc, next_nodes = [], [], [], []
            new_single_prefixes, new_single_remain = [], []
            node_arr = np.array(nodes, dtype=object)
            for col in range(r):
                got = split[:, col]
                sel = got > 0
                if not sel.any():
                    continue
                child_prefix = np.hstack([prefixes[sel], remain[sel, col:col + 1]])
                if r == 2:
                    complete = np.hstack([child_prefix, remain[sel, 1 - col:2 - col]])
                    chunks.append((complete, got[sel].astype(np.int64)))
                    continue
                child_remain = np.delete(remain[sel], col, axis=1)
                child_nodes = np.full(int(sel.sum()), None, dtype=object)
                parent_rows = np.flatnonzero(sel)
                for out_i, row in enumerate(parent_rows):
                    parent = node_arr[row]
                    if parent is not None:
                        child = parent.children.get(int(remain[row, col]))
                        if child is not None:
                            child_nodes[out_i] = child
                single = (got[sel] == 1) & (child_nodes == None)  # noqa: E711
                if single.any():
                    new_single_prefixes.append(child_prefix[single])
                    new_single_remain.append(child_remain[single])
                keep = ~single
                if keep.any():
                    next_prefixes.append(child_prefix[keep])
                    next_remain.append(child_remain[keep])
                    next_alloc.append(got[sel][keep])
                    next_nodes.extend(child_nodes[keep])

            if next_prefixes:
                prefixes = np.vstack(next_prefixes)
                remain = np.vstack(next_remain)
                alloc = np.concatenate(next_alloc).astype(np.int64)
                nodes = next_nodes
            else:
                prefixes = np.empty((0, depth + 1), dtype=np.int16)
                remain = np.empty((0, r - 1), dtype=np.int16)
                alloc = np.empty(0, dtype=np.int64)
                nodes = []
            if new_single_prefixes:
                single_prefixes = np.vstack(new_single_prefixes)
                single_remain = np.vstack(new_single_remain)
            else:
                single_prefixes = np.empty((0, depth + 1), dtype=np.int16)
                single_remain = np.empty((0, r - 1), dtype=np.int16)

        rows = np.vstack([c[0] for c in chunks])
        counts = np.concatenate([c[1] for c in chunks])
        return rows, counts

    def _finish_virgin_singles(self, prefixes: np.ndarray, remain: np.ndarray,
                               depth: int, gen: np.random.Generator,
                               chunks: list[tuple[np.ndarray, np.ndarray]]) -> None:
        """Closed-form completion of single ballots in unobserved subtrees."""
        n_jobs = prefixes.shape[0]
        if n_jobs == 0:
            return
        k = self.k
        r = k - depth
        perm = gen.permuted(remain, axis=1)
        rows = np.full((n_jobs, k), PAD, dtype=np.int16)
        rows[:, :depth] = prefixes
        rows[:, depth:] = perm
        if self.config.allow_partial:
            # Stop depth is uniform on {0..r-2} extra picks, with weight 2 on
            # running to completion (each node gives the termination branch
            # 1/(remaining+1); the telescoping product is uniform).
            u = gen.integers(0, r + 1, size=n_jobs)
            extra = np.where(u <= r - 2, u, r)
            col = np.arange(r, dtype=np.int64)[None, :]
            rows[:, depth:][col >= extra[:, None]] = PAD
        chunks.append((rows, np.ones(n_jobs, dtype=np.int64)))


class FixedTypeSampler:
    """Posterior draws as count vectors over a fixed table of ballot types."""

    rows: np.ndarray                     # (T, k) PAD-packed type table
    index: dict[Ranking, int] | None     # ranking -> row, when rows cover all types

    def draw_counts(self, m: int, gen: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class _BootstrapSampler(FixedTypeSampler):
    def __init__(self, rows: np.ndarray, observed: np.ndarray):
        self.rows = rows
        self.index = None
        self._alphas = observed.astype(np.float64)

    def draw_counts(self, m: int, gen: np.random.Generator) -> np.ndarray:
        weights = gen.gamma(self._alphas)
        return gen.multinomial(m, weights / weights.sum())


class _FlatSampler(FixedTypeSampler):
    def __init__(self, rows: np.ndarray, index: dict[Ranking, int], alphas: np.ndarray):
        self.rows = rows
        self.index = index
        self._alphas = alphas

    def draw_counts(self, m: int, gen: np.random.Generator) -> np.ndarray:
        weights = gen.gamma(self._alphas)
        return gen.multinomial(m, weights / weights.sum())


class _DenseTreeSampler(FixedTypeSampler):
    def __init__(self, structure: _TreeStructure, alphas: np.ndarray):
        self.rows = structure.leaf_rows
        self.index = structure.leaf_index
        self._structure = structure
        self._alphas = alphas

    def draw_counts(self, m: int, gen: np.random.Generator) -> np.ndarray:
        return self._structure.draw_leaf_counts(self._alphas, m, gen)


def new_tree(roster: Roster, config: PriorConfig) -> PosteriorTree:
    """A fresh prior: no observations, every branch at concentration a0."""
    return PosteriorTree(roster, config)


def _pad(rows: np.ndarray, k: int) -> np.ndarray:
    out = np.full((rows.shape[0], k), PAD, dtype=np.int16)
    out[:, : rows.shape[1]] = rows
    return out


# -------------------------------------------------------- variance matching

def _complete_path_branch_counts(k: int, allow_partial: bool) -> list[int]:
    """Branch counts c_d at each node along a complete-ballot path."""
    if k == 1:
        return []
    counts = [k]
    for remaining in range(k - 1, 1, -1):
        counts.append(remaining + (1 if allow_partial else 0))
    return counts


def complete_ballot_prior_variance(config: PriorConfig, k: int) -> float:
    """Prior variance of the probability of an arbitrary complete ballot.

    Along the tree path the branch proportions are independent
    Beta(a0, (c_d - 1) a0) marginals, so E[p] = prod 1/c_d and
    E[p^2] = prod (a0 + 1) / (c_d (c_d a0 + 1)). The flat Dirichlet over K
    leaves gives (K - 1) / (K^2 (K a0 + 1)).
    """
    a0 = config.a0
    if a0 <= 0:
        raise ValueError("prior variance requires a0 > 0 (the bootstrap is matched by convention)")
    if config.kind == DIRICHLET:
        total = leaf_count(k, config.allow_partial)
        return (total - 1) / (total ** 2 * (total * a0 + 1))
    mean = 1.0
    second = 1.0
    for c in _complete_path_branch_counts(k, config.allow_partial):
        mean *= 1.0 / c
        second *= (a0 + 1) / (c * (c * a0 + 1))
    return second - mean * mean


def match_dirichlet_a0(tree_a0: float, k: int, allow_partial: bool) -> float:
    """The flat-Dirichlet a0 whose complete-ballot prior variance equals the tree's.

    Inverts (K - 1) / (K^2 (K a0' + 1)) = V. tree_a0 = 0 maps to 0: the
    bootstrap is matched to the bootstrap.
    """
    if tree_a0 < 0:
        raise ValueError("tree_a0 must be non-negative")
    if tree_a0 == 0:
        return 0.0
    if k == 1:
        return tree_a0
    variance = complete_ballot_prior_variance(
        PriorConfig(DIRICHLET_TREE, tree_a0, allow_partial), k)
    total = leaf_count(k, allow_partial)
    ceiling = (total - 1) / total ** 2
    if variance >= ceiling:
        raise ValueError(
            f"no flat Dirichlet over {total} leaves reaches variance {variance}")
    return ((total - 1) / (total ** 2 * variance) - 1) / total
