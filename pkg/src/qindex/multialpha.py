"""Multi-alphabet coding by binary factorization along a prefix-code tree.

The multinomial class of a sequence splits into one binomial class per
internal tree node: the node sees the symbols routed through it and records
a 1 for each that takes the branch with the smaller count (the right branch
on a tie), so every node string has at most half ones.  Each node string is coded
with the binary block coder and the shared binomial table.  String lengths
and ones counts follow from the leaf counts, so only the counts travel.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .codec import BlockCode, decode_block, encode_block
from .errors import CorruptStreamError, DegenerateAlphabetError, SymbolOutOfAlphabetError
from .qtable import QuantTable


@dataclass(frozen=True)
class Node:
    count: int
    symbol: int | None = None
    left: Node | None = None
    right: Node | None = None

    @property
    def is_leaf(self) -> bool:
        return self.symbol is not None

    def symbols(self) -> list[int]:
        if self.is_leaf:
            return [self.symbol]
        return self.left.symbols() + self.right.symbols()


@dataclass(frozen=True)
class CodeTree:
    alpha: int
    counts: tuple[int, ...]
    root: Node

    def internal_nodes(self) -> list[Node]:
        """Internal nodes in pre-order (parent, left subtree, right subtree)."""
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            if v.is_leaf:
                continue
            out.append(v)
            stack.append(v.right)
            stack.append(v.left)
        return out

    def depths(self) -> dict[int, int]:
        out, stack = {}, [(self.root, 0)]
        while stack:
            v, d = stack.pop()
            if v.is_leaf:
                out[v.symbol] = d
            else:
                stack += [(v.left, d + 1), (v.right, d + 1)]
        return out


def build_tree(counts: Sequence[int]) -> CodeTree:
    """Huffman tree with a total order on ties.

    Nodes are ordered by (count, kind, id): leaves (kind 0, id = symbol) come
    before merged nodes (kind 1, id = creation order) of equal count.  The
    first node popped becomes the left child.
    """
    alpha = len(counts)
    if alpha < 2:
        raise DegenerateAlphabetError(f"alphabet of size {alpha}")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    heap = [(c, 0, sym, Node(c, symbol=sym)) for sym, c in enumerate(counts)]
    heapq.heapify(heap)
    merged = 0
    while len(heap) > 1:
        a = heapq.heappop(heap)
        b = heapq.heappop(heap)
        node = Node(a[0] + b[0], left=a[3], right=b[3])
        heapq.heappush(heap, (node.count, 1, merged, node))
        merged += 1
    return CodeTree(alpha, tuple(counts), heap[0][3])


def symbol_counts(symbols: np.ndarray, alpha: int) -> list[int]:
    return np.bincount(symbols, minlength=alpha).tolist()


def _as_symbols(symbols, alpha: int) -> np.ndarray:
    a = np.asarray(symbols, dtype=np.int64).ravel()
    if a.size and (a.min() < 0 or a.max() >= alpha):
        raise SymbolOutOfAlphabetError(f"symbol outside 0..{alpha - 1}")
    return a


def one_branch(v: Node) -> Node:
    """The child whose symbols are marked 1 in the node string of v."""
    return v.left if v.left.count < v.right.count else v.right


def node_strings(symbols, tree: CodeTree) -> Iterator[tuple[Node, np.ndarray]]:
    """Branch-choice strings of every internal node, in pre-order."""
    seq = _as_symbols(symbols, tree.alpha)
    stack = [(tree.root, seq)]
    while stack:
        v, sub = stack.pop()
        if v.is_leaf:
            continue
        one = one_branch(v)
        marks = np.zeros(tree.alpha, dtype=np.uint8)
        marks[one.symbols()] = 1
        bits = marks[sub]
        yield v, bits
        stack.append((v.right, sub[bits == (one is v.right)]))
        stack.append((v.left, sub[bits == (one is v.left)]))


def encode_multi(symbols, tree: CodeTree, t: QuantTable) -> list[BlockCode]:
    seq = _as_symbols(symbols, tree.alpha)
    if symbol_counts(seq, tree.alpha) != list(tree.counts):
        raise CorruptStreamError("tree counts do not match the sequence")
    return [encode_block(bits, t) for _, bits in node_strings(seq, tree)]


def decode_multi(codes: Sequence[BlockCode], counts: Sequence[int], t: QuantTable) -> np.ndarray:
    tree = build_tree(counts)
    it = iter(codes)

    def expand(v: Node) -> np.ndarray:
        if v.is_leaf:
            return np.full(v.count, v.symbol, dtype=np.int64)
        try:
            code = next(it)
        except StopIteration:
            raise CorruptStreamError("fewer node codes than internal nodes") from None
        one = one_branch(v)
        zero = v.right if one is v.left else v.left
        if code.m != v.count or code.k != one.count:
            raise CorruptStreamError("node code does not match the tree counts")
        bits = decode_block(code, t).astype(bool)
        out = np.empty(v.count, dtype=np.int64)
        # children in pre-order: left subtree codes come first
        if one is v.left:
            out[bits] = expand(one)
            out[~bits] = expand(zero)
        else:
            out[~bits] = expand(zero)
            out[bits] = expand(one)
        return out

    seq = expand(tree.root)
    if next(it, None) is not None:
        raise CorruptStreamError("more node codes than internal nodes")
    return seq
