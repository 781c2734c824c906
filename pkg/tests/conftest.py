from collections import deque

import numpy as np
import pytest

from treeharmonic.tree_core import TreeParams, enumerate_ball


class ExplicitBall:
    """Adjacency-list ball built by growing the tree from the root.

    Independent of the word encoding: vertices are integers in BFS order and
    each non-root vertex gets q children (the root q+1).
    """

    def __init__(self, q: int, R: int):
        self.q = q
        self.adj = {0: []}
        self.depth = {0: 0}
        frontier = [0]
        nxt = 1
        for d in range(R):
            new = []
            for v in frontier:
                for _ in range(q + 1 if v == 0 else q):
                    self.adj[nxt] = [v]
                    self.adj[v].append(nxt)
                    self.depth[nxt] = d + 1
                    new.append(nxt)
                    nxt += 1
            frontier = new

    def bfs(self, src: int) -> dict[int, int]:
        dist = {src: 0}
        dq = deque([src])
        while dq:
            v = dq.popleft()
            for w in self.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    dq.append(w)
        return dist


def word_graph(params: TreeParams, R: int):
    """Adjacency over canonical words, edges parent <-> child."""
    words = enumerate_ball(params, R)
    index = {w: i for i, w in enumerate(words)}
    adj = {i: [] for i in range(len(words))}
    for w, i in index.items():
        if w:
            j = index[w[:-1]]
            adj[i].append(j)
            adj[j].append(i)
    return words, index, adj


def dense_laplacian(params: TreeParams, R: int) -> np.ndarray:
    """Rows for vertices of B_{R-1}, columns for B_R, straight from the definition."""
    words, index, adj = word_graph(params, R)
    n_in = sum(1 for w in words if len(w) <= R - 1)
    M = np.zeros((n_in, len(words)))
    for i in range(n_in):
        M[i, i] = 1.0
        for j in adj[i]:
            M[i, j] -= 1.0 / (params.q + 1)
    return M


@pytest.fixture
def q2():
    return TreeParams(2)


@pytest.fixture
def q3():
    return TreeParams(3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
