"""Interval dynamic programme for sums over non-crossing partitions.

A *site chain* is a sequence of matrices whose ordered product, read at one
entry, is the element whose expectation we want.  ``Glue`` sites are plain
scalar matrices.  ``Active`` sites hold, at each entry, a *payload* (typically
a generator symbol) that lives in some copy ``tag``.  The expectation is a sum
over non-crossing partitions of the active sites, each block weighted by a
model-supplied ``weight`` (a free cumulant, or a Fock-space contraction).

``F(i, j)`` is the matrix of partial sums for sites ``i..j``.  The block that
contains site ``i`` splits the rest into independent gaps and a tail, which
gives the recursion used below.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Protocol, Sequence


@dataclass(frozen=True)
class Glue:
    matrix: tuple  # tuple of row tuples

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0])


@dataclass(frozen=True)
class Active:
    entries: tuple  # tuple of row tuples of payloads
    tag: Hashable

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])


class BlockModel(Protocol):
    def blocks(self, sites: Sequence, i: int) -> list[tuple[int, ...]]:
        """Later partners ``(k2, ..., kr)`` that may share a block with site ``i``."""

    def weight(self, sites: Sequence, positions: tuple[int, ...], payloads: tuple):
        """Block weight for the given payloads (one per position)."""


def _identity(n, zero, one):
    return [[one if a == b else zero for b in range(n)] for a in range(n)]


def _matmul(A, B, zero):
    out = []
    for row in A:
        new = []
        for b in range(len(B[0])):
            acc = zero
            for a, x in enumerate(row):
                if x:
                    y = B[a][b]
                    if y:
                        acc = acc + x * y
            new.append(acc)
        out.append(new)
    return out


def chain_sum(sites: Sequence, model: BlockModel, zero, one):
    """Return ``F(0, M-1)`` as a list-of-lists matrix."""
    M = len(sites)
    if M == 0:
        return [[one]]
    block_lists = {
        i: [()] + list(model.blocks(sites, i)) for i, s in enumerate(sites) if isinstance(s, Active)
    }
    needed = {M - 1}
    for blist in block_lists.values():
        for blk in blist:
            for k in blk:
                needed.add(k - 1)

    F: dict = {}

    def get(i, j):
        if i > j:
            return _identity(sites[i].rows if i < M else sites[j].cols, zero, one)
        return F[(i, j)]

    def block_value(i, blk, j):
        positions = (i,) + blk
        gaps = [get(positions[s] + 1, positions[s + 1] - 1) for s in range(len(positions) - 1)]
        tail = get(positions[-1] + 1, j)
        first = sites[i]
        out = [[zero] * len(tail[0]) for _ in range(first.rows)]
        for a in range(first.rows):
            # partial: list of (payload tuple, index c_s of current site, running coefficient)
            states = [((first.entries[a][c],), c, one) for c in range(first.cols)]
            for s, g in enumerate(gaps):
                site = sites[positions[s + 1]]
                nxt = []
                for payloads, c, coef in states:
                    grow = g[c]
                    for e, gv in enumerate(grow):
                        if not gv:
                            continue
                        for c2 in range(site.cols):
                            nxt.append((payloads + (site.entries[e][c2],), c2, coef * gv))
                states = nxt
            for payloads, c, coef in states:
                w = model.weight(sites, positions, payloads)
                if not w:
                    continue
                w = w * coef
                trow = tail[c]
                orow = out[a]
                for b, tv in enumerate(trow):
                    if tv:
                        orow[b] = orow[b] + w * tv
        return out

    for j in sorted(needed):
        for i in range(j, -1, -1):
            site = sites[i]
            if isinstance(site, Glue):
                F[(i, j)] = _matmul([list(r) for r in site.matrix], get(i + 1, j), zero)
                continue
            acc = None
            for blk in block_lists[i]:
                if blk and blk[-1] > j:
                    continue
                val = block_value(i, blk, j)
                if acc is None:
                    acc = val
                else:
                    acc = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(acc, val)]
            F[(i, j)] = acc
    return F[(0, M - 1)]


def same_tag_subsets(sites: Sequence, i: int, max_order: int) -> list[tuple[int, ...]]:
    """All increasing tuples of later same-tag active sites, of size < ``max_order``."""
    tag = sites[i].tag
    later = [k for k in range(i + 1, len(sites)) if isinstance(sites[k], Active) and sites[k].tag == tag]
    out = []
    for r in range(1, max_order):
        out.extend(itertools.combinations(later, r))
    return out


def row_glue(size: int, index: int, zero, one) -> Glue:
    return Glue((tuple(one if b == index else zero for b in range(size)),))


def col_glue(size: int, index: int, zero, one) -> Glue:
    return Glue(tuple((one if a == index else zero,) for a in range(size)))


def link_glue(rows: int, end: int, cols: int, start: int, zero, one) -> Glue:
    return Glue(
        tuple(tuple(one if (a == end and b == start) else zero for b in range(cols)) for a in range(rows))
    )
