"""Independent oracles the test suite checks the library against.

Everything here is written directly from first definitions, in exact rational
arithmetic where possible, and deliberately shares no code with the package:
slow but trustworthy.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

STOP = "stop"


def all_types(k: int, allow_partial: bool):
    """Every canonical ballot type: partial lengths 1..k-2, plus complete."""
    types = []
    if allow_partial:
        for length in range(1, k - 1):
            types.extend(itertools.permutations(range(k), length))
    types.extend(itertools.permutations(range(k)))
    return types


def _keypath(t: tuple, k: int) -> tuple:
    return t[: k - 1] if len(t) == k else t + (STOP,)


def tree_predictive(observed: dict, t: tuple, k: int, a0: Fraction,
                    allow_partial: bool) -> Fraction:
    """Predictive probability of one type, straight from the branch definition."""
    keys = _keypath(t, k)
    prob = Fraction(1)
    for depth in range(len(keys)):
        prefix = keys[:depth]
        remaining = k - depth
        branches = remaining if depth == 0 else remaining + (1 if allow_partial else 0)
        node_count = sum(c for s, c in observed.items()
                         if _keypath(s, k)[:depth] == prefix)
        child_count = sum(c for s, c in observed.items()
                          if _keypath(s, k)[: depth + 1] == keys[: depth + 1])
        numerator = a0 + child_count
        if numerator == 0:
            return Fraction(0)
        prob *= Fraction(numerator, branches * a0 + node_count)
    return prob


def flat_predictive(observed: dict, t: tuple, k: int, a0: Fraction,
                    allow_partial: bool) -> Fraction:
    total_types = len(all_types(k, allow_partial))
    n = sum(observed.values())
    numerator = a0 + observed.get(t, 0)
    if numerator == 0:
        return Fraction(0)
    return Fraction(numerator, total_types * a0 + n)


def urn_distribution(observed: dict, k: int, a0: Fraction, allow_partial: bool,
                     m: int, flat: bool = False) -> dict:
    """Exact law of an m-ballot posterior draw, as multiset -> probability.

    Sequential Polya urn: draw one type from the predictive, add it to the
    observations, repeat. Keys are sorted tuples of the drawn types.
    """
    types = all_types(k, allow_partial)
    predictive = flat_predictive if flat else tree_predictive
    out: dict[tuple, Fraction] = {}

    def recurse(obs: dict, left: int, prob: Fraction, drawn: list):
        if left == 0:
            key = tuple(sorted(drawn))
            out[key] = out.get(key, Fraction(0)) + prob
            return
        for t in types:
            p = predictive(obs, t, k, a0, allow_partial)
            if p == 0:
                continue
            nxt = dict(obs)
            nxt[t] = nxt.get(t, 0) + 1
            recurse(nxt, left - 1, prob * p, drawn + [t])

    recurse(dict(observed), m, Fraction(1), [])
    return out


def brute_irv(profile: dict, k: int) -> tuple[int, list[int]]:
    """Reference IRV eliminator: min first-preference count among continuing,
    ties broken by eliminating the latest candidate in roster order."""
    continuing = set(range(k))
    eliminated: list[int] = []
    while len(continuing) > 1:
        counts = {c: 0 for c in continuing}
        for ranking, count in profile.items():
            top = next((c for c in ranking if c in continuing), None)
            if top is not None:
                counts[top] += count
        low = min(counts.values())
        loser = max(c for c in continuing if counts[c] == low)
        continuing.discard(loser)
        eliminated.append(loser)
    return continuing.pop(), eliminated


def tree_variance(k: int, a0: Fraction, allow_partial: bool) -> Fraction:
    """Complete-ballot prior variance of the tree prior, exact."""
    branch_counts = []
    if k > 1:
        branch_counts.append(k)
        for remaining in range(k - 1, 1, -1):
            branch_counts.append(remaining + (1 if allow_partial else 0))
    mean = Fraction(1)
    second = Fraction(1)
    for c in branch_counts:
        mean *= Fraction(1, c)
        second *= Fraction(a0 + 1, 1) / (c * (c * a0 + 1))
    return second - mean * mean


def flat_variance(total_types: int, a0: Fraction) -> Fraction:
    return Fraction(total_types - 1, 1) / (total_types ** 2 * (total_types * a0 + 1))


def matched_a0(k: int, tree_a0: Fraction, allow_partial: bool) -> Fraction:
    total = len(all_types(k, allow_partial))
    variance = tree_variance(k, tree_a0, allow_partial)
    return (Fraction(total - 1, 1) / (total ** 2 * variance) - 1) / total
