"""Reorder source tokens to be monotonically aligned with the target.

Each source token is keyed by the smallest target index it links to
and the tokens are stably sorted by that key, which makes the
leftmost-link reduction of the alignment monotone. Unaligned tokens
travel with the nearest aligned token to their left: they get that
token's key plus a rank that keeps consecutive unaligned tokens in
their original order. At the start of the sentence the inherited key
is -1, so leading unaligned tokens stay in front.
"""

from __future__ import annotations

from typing import Sequence

from .corpus_io import Alignment

__all__ = ["monotone_preorder"]


def monotone_preorder(
    source: Sequence[str], alignment: Alignment
) -> tuple[tuple[str, ...], Alignment]:
    """Return the reordered source and the alignment re-indexed to it.

    Applying the transform to its own output changes nothing, and the
    output source is a permutation of the input.
    """
    tokens = tuple(source)
    alignment.validate(len(tokens))
    min_targets = alignment.min_target_by_source()
    keys: list[tuple[int, int]] = []
    inherited = -1
    run = 0
    for index in range(len(tokens)):
        if index in min_targets:
            inherited = min_targets[index]
            run = 0
            keys.append((inherited, 0))
        else:
            run += 1
            keys.append((inherited, run))
    order = sorted(range(len(tokens)), key=keys.__getitem__)
    new_source = tuple(tokens[index] for index in order)
    new_position = {old: new for new, old in enumerate(order)}
    new_links = frozenset(
        (new_position[i], j) for i, j in alignment.links
    )
    return new_source, Alignment(new_links)
