"""Directed networks: adjacency validation, Laplacian, spectrum, generators, edge lists.

Orientation convention: ``A[i, j] > 0`` means an edge from node ``j`` into node
``i``. With that convention ``L = A - diag(row sums of A)`` has zero row sums,
so the all-ones vector is a right eigenvector with eigenvalue 0 and the
homogeneous state is conserved by diffusion.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class EdgeListError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def validate_adjacency(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("adjacency entries must be finite")
    if np.any(A < 0):
        raise ValueError("adjacency entries must be nonnegative")
    if np.any(np.diag(A) != 0):
        raise ValueError("self-loops are not allowed (nonzero diagonal)")
    return A


def directed_laplacian(A) -> np.ndarray:
    """``L_ij = A_ij - delta_ij * k_i`` with ``k_i`` the weighted in-degree of node i."""
    A = validate_adjacency(A)
    return A - np.diag(A.sum(axis=1))


def spectrum(L) -> np.ndarray:
    """All eigenvalues of ``L``, sorted by descending real part, then descending imaginary part.

    Uses LAPACK's dense nonsymmetric solver (Hessenberg reduction + shifted QR).
    """
    L = np.asarray(L, dtype=float)
    if not np.all(np.isfinite(L)):
        raise ValueError("Laplacian entries must be finite")
    try:
        eig = np.linalg.eigvals(L)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigensolver did not converge: {exc}") from exc
    eig = eig.astype(complex)
    order = np.lexsort((-eig.imag, -eig.real))
    return eig[order]


def newman_watts_directed(n: int, k: int, p: float, seed: int) -> np.ndarray:
    """Directed Newman-Watts small-world network.

    Node ``i`` sends an edge to each of its ``k`` clockwise neighbours
    ``i+1, ..., i+k (mod n)``. Then every ordered pair ``(src, dst)`` not
    already linked by the ring gets an extra shortcut with probability ``p``,
    drawn independently. The ring keeps the result strongly connected.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n}")
    if int(k) != k or not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    n, k = int(n), int(k)
    A = np.zeros((n, n))
    src = np.arange(n)
    for m in range(1, k + 1):
        A[(src + m) % n, src] = 1.0
    rng = np.random.default_rng(seed)
    # one draw per ordered pair in a fixed order, so the graph depends only on the seed
    draws = rng.random((n, n))
    shortcut = (draws < p) & (A == 0)
    np.fill_diagonal(shortcut, False)
    A[shortcut] = 1.0
    return A


def symmetrize(A) -> np.ndarray:
    A = validate_adjacency(A)
    return (A + A.T) / 2.0


def read_edge_list(text: str) -> np.ndarray:
    """Parse the ``n=<count>`` / ``src dst weight`` edge-list format.

    The header is optional; without it ``n`` is one more than the largest index.
    A listed edge ``src -> dst`` is stored at ``A[dst, src]``.
    """
    n = None
    edges: dict[tuple[int, int], float] = {}
    seen_edge = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.replace(" ", "").startswith("n="):
            if n is not None or seen_edge:
                raise EdgeListError("header 'n=' must appear once, before any edge", lineno)
            try:
                n = int(line.split("=", 1)[1])
            except ValueError:
                raise EdgeListError(f"bad node count in {raw.strip()!r}", lineno) from None
            if n < 1:
                raise EdgeListError("node count must be positive", lineno)
            continue
        parts = line.split()
        if len(parts) != 3:
            raise EdgeListError(f"expected 'src dst weight', got {raw.strip()!r}", lineno)
        try:
            src, dst, weight = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise EdgeListError(f"cannot parse {raw.strip()!r}", lineno) from None
        if src < 0 or dst < 0:
            raise EdgeListError("node indices must be nonnegative", lineno)
        if n is not None and max(src, dst) >= n:
            raise EdgeListError(f"node index out of range for n={n}", lineno)
        if src == dst:
            raise EdgeListError("self-loops are not allowed", lineno)
        if not np.isfinite(weight) or weight < 0:
            raise EdgeListError("weight must be finite and nonnegative", lineno)
        if (src, dst) in edges:
            raise EdgeListError(f"duplicate edge {src} -> {dst}", lineno)
        edges[(src, dst)] = weight
        seen_edge = True
    if n is None:
        if not edges:
            raise EdgeListError("empty edge list without 'n=' header")
        n = 1 + max(max(s, d) for s, d in edges)
    A = np.zeros((n, n))
    for (src, dst), w in edges.items():
        A[dst, src] = w
    return A


def write_edge_list(A) -> str:
    """Serialize ``A`` so that ``read_edge_list(write_edge_list(A))`` equals ``A`` exactly."""
    A = validate_adjacency(A)
    lines = [f"n={A.shape[0]}"]
    dst, src = np.nonzero(A)
    for s, d in sorted(zip(src.tolist(), dst.tolist())):
        lines.append(f"{s} {d} {float(A[d, s])!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class DirectedNetwork:
    """An adjacency matrix bundled with its Laplacian and sorted spectrum."""

    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = validate_adjacency(self.adjacency)
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @cached_property
    def laplacian(self) -> np.ndarray:
        L = directed_laplacian(self.adjacency)
        L.setflags(write=False)
        return L

    @cached_property
    def spectrum(self) -> np.ndarray:
        return spectrum(self.laplacian)

    def symmetrized(self) -> "DirectedNetwork":
        return DirectedNetwork(symmetrize(self.adjacency))
