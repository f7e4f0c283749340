"""CFG helpers: successors, predecessors, orderings and the dominator tree."""
from __future__ import annotations


def successors(f) -> dict:
    return {b.label: [t.label for t in b.term.targets()] for b in f.blocks}


def predecessors(f, succs=None) -> dict:
    succs = succs if succs is not None else successors(f)
    preds = {label: [] for label in succs}
    for label, ss in succs.items():
        for s in ss:
            if s in preds:
                preds[s].append(label)
    return preds


def reverse_postorder(entry: str, succs: dict) -> list:
    seen = {entry}
    order = []
    # iterative DFS; each frame is (node, iterator over successors)
    stack = [(entry, iter(succs.get(entry, ())))]
    while stack:
        node, it = stack[-1]
        for s in it:
            if s not in seen and s in succs:
                seen.add(s)
                stack.append((s, iter(succs[s])))
                break
        else:
            stack.pop()
            order.append(node)
    order.reverse()
    return order


class DomTree:
    """Dominator tree via the Cooper/Harvey/Kennedy iterative algorithm.

    Only blocks reachable from the entry appear in ``idom``.
    """

    def __init__(self, entry: str, succs: dict, preds: dict = None):
        self.entry = entry
        self.rpo = reverse_postorder(entry, succs)
        preds = preds if preds is not None else _preds(succs)
        index = {b: i for i, b in enumerate(self.rpo)}
        idom = {entry: entry}
        changed = True
        while changed:
            changed = False
            for b in self.rpo[1:]:
                new = None
                for p in preds.get(b, ()):
                    if p not in idom:
                        continue
                    new = p if new is None else _intersect(p, new, idom, index)
                if idom.get(b) != new:
                    idom[b] = new
                    changed = True
        self.idom = idom
        self.index = index
        self.depth = {}
        for b in self.rpo:
            self.depth[b] = 0 if b == entry else self.depth[idom[b]] + 1

    def reachable(self, b) -> bool:
        return b in self.idom

    def dominates(self, a, b) -> bool:
        """Reflexive dominance; False when either block is unreachable."""
        if a not in self.idom or b not in self.idom:
            return False
        da = self.depth[a]
        while self.depth[b] > da:
            b = self.idom[b]
        return a == b

    def strictly_dominates(self, a, b) -> bool:
        return a != b and self.dominates(a, b)

    def lca(self, a, b):
        while a != b:
            if self.depth[a] > self.depth[b]:
                a = self.idom[a]
            elif self.depth[b] > self.depth[a]:
                b = self.idom[b]
            else:
                a, b = self.idom[a], self.idom[b]
        return a


def _preds(succs):
    preds = {b: [] for b in succs}
    for b, ss in succs.items():
        for s in ss:
            preds.setdefault(s, []).append(b)
    return preds


def _intersect(a, b, idom, index):
    while a != b:
        while index[a] > index[b]:
            a = idom[a]
        while index[b] > index[a]:
            b = idom[b]
    return a


def domtree(f) -> DomTree:
    succs = successors(f)
    return DomTree(f.entry, succs, predecessors(f, succs))
