"""Social-ownership-assessment multigraph and its normalized propagation operator.

The data model is a two-node-type multigraph: ``n`` users and ``m`` items with
three weighted relations stored sparsely,

* ``S`` (n x n)  symmetric user-user ties ("who is friends with whom"),
* ``O`` (n x m)  ownership shares ("who contributed to which item"),
* ``A`` (n x m)  assessment grades ("who graded which item, and how").

A grade of exactly 0 is meaningful (the item *was* graded, with zero) and is
kept as an explicit stored entry, distinct from a structurally absent entry
(no assessment at all).  Degree normalization counts stored entries, so an
explicit zero contributes to a node's degree but not to the weighted sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DuplicateEntryError, ValidationError

Triple = tuple[str, str, float]


@dataclass(frozen=True)
class SoanGraph:
    """Immutable container for the three relations over users and items.

    Matrices are CSR with canonically sorted indices; explicit zeros are
    preserved.  ``user_ids[i]`` / ``item_ids[j]`` give the external string
    identifier of row ``i`` / column ``j``.
    """

    n: int
    m: int
    S: sp.csr_matrix
    O: sp.csr_matrix
    A: sp.csr_matrix
    user_ids: tuple[str, ...]
    item_ids: tuple[str, ...]

    def assessment_entries(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stored assessment triples as (user_idx, item_idx, grade) arrays."""
        coo = self.A.tocoo()
        return coo.row, coo.col, coo.data


@dataclass(frozen=True)
class PropagationMatrix:
    """Row-normalized propagation operator used by the graph convolution.

    ``N`` is the (n+m) x (n+m) sparse matrix obtained by dividing each row of
    the combined adjacency (social block, ownership+assessment block, plus
    identity self-loops) by that row's count of stored entries.  ``degrees``
    holds those counts; the self-loop guarantees every degree is >= 1.

    Users occupy rows 0..n-1, items rows n..n+m-1.
    """

    N: sp.csr_matrix
    degrees: np.ndarray
    n: int
    m: int

    @property
    def size(self) -> int:
        return self.n + self.m


@dataclass(frozen=True)
class GroundTruth:
    """True valuations per item, each in [0, 1]; ``mask`` marks known entries."""

    v: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        if v.ndim != 1 or mask.shape != v.shape:
            raise ValidationError("ground truth vector and mask must be 1-d and same length")
        known = v[mask]
        if known.size and (not np.all(np.isfinite(known)) or known.min() < 0.0 or known.max() > 1.0):
            raise ValidationError("known ground-truth values must be finite and in [0, 1]")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def full(cls, values: Sequence[float]) -> "GroundTruth":
        v = np.asarray(values, dtype=np.float64)
        return cls(v, np.ones(v.shape, dtype=bool))

    def __len__(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True)
class Split:
    """Disjoint train/test item index sets (sorted tuples)."""

    train: tuple[int, ...]
    test: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "train", tuple(sorted(int(i) for i in self.train)))
        object.__setattr__(self, "test", tuple(sorted(int(i) for i in self.test)))
        if set(self.train) & set(self.test):
            raise ValidationError("train and test splits overlap")


@dataclass(frozen=True)
class Dataset:
    """A graph, its ground truth, and (optionally) a train/test split."""

    graph: SoanGraph
    truth: GroundTruth
    split: Optional[Split] = None

    def __post_init__(self):
        if len(self.truth) != self.graph.m:
            raise ValidationError(
                f"truth length {len(self.truth)} does not match item count {self.graph.m}"
            )
        if self.split is not None:
            for ids in (self.split.train, self.split.test):
                for i in ids:
                    if not (0 <= i < self.graph.m):
                        raise ValidationError(f"split references unknown item index {i}")
                    if not self.truth.mask[i]:
                        raise ValidationError(f"split item {i} has no known ground-truth value")


def _check_weight(value: float, kind: str, triple) -> float:
    w = float(value)
    if not np.isfinite(w) or w < 0.0 or w > 1.0:
        raise ValidationError(f"{kind} weight out of range [0, 1] in entry {triple!r}")
    return w


def _index_map(ids: set[str]) -> tuple[dict[str, int], tuple[str, ...]]:
    ordered = tuple(sorted(ids))
    return {s: i for i, s in enumerate(ordered)}, ordered


def _csr(rows, cols, vals, shape) -> sp.csr_matrix:
    coo = sp.coo_matrix(
        (np.asarray(vals, dtype=np.float64),
         (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=shape,
    )
    mat = coo.tocsr()
    mat.sort_indices()
    return mat


def build_graph(
    assessments: Iterable[Triple],
    ownerships: Iterable[Triple] = (),
    social: Iterable[Triple] = (),
    users: Iterable[str] = (),
    items: Iterable[str] = (),
) -> SoanGraph:
    """Assemble a :class:`SoanGraph` from edge lists with string identifiers.

    Identifiers are mapped to contiguous 0-based indices by lexicographic
    order, so the layout is deterministic and independent of edge order.
    Social edges are symmetrized (both directions stored).  Duplicate edges,
    self-edges in the social list, and weights outside [0, 1] are rejected.

    ``users`` / ``items`` may declare identifiers that appear in no edge.
    """
    assessments = list(assessments)
    ownerships = list(ownerships)
    social = list(social)

    user_set = set(users)
    item_set = set(items)
    for u, i, _ in assessments:
        user_set.add(str(u))
        item_set.add(str(i))
    for u, i, _ in ownerships:
        user_set.add(str(u))
        item_set.add(str(i))
    for a, b, _ in social:
        user_set.add(str(a))
        user_set.add(str(b))

    uidx, user_ids = _index_map(user_set)
    iidx, item_ids = _index_map(item_set)
    n, m = len(user_ids), len(item_ids)

    def bipartite(entries, kind):
        rows, cols, vals, seen = [], [], [], set()
        for u, i, w in entries:
            key = (str(u), str(i))
            if key in seen:
                raise DuplicateEntryError(f"duplicate {kind} entry for {key!r}")
            seen.add(key)
            rows.append(uidx[key[0]])
            cols.append(iidx[key[1]])
            vals.append(_check_weight(w, kind, (u, i, w)))
        return _csr(rows, cols, vals, (n, m))

    A = bipartite(assessments, "assessment")
    O = bipartite(ownerships, "ownership")

    rows, cols, vals, seen = [], [], [], set()
    for a, b, w in social:
        a, b = str(a), str(b)
        if a == b:
            raise ValidationError(f"self-edge in social list: {(a, b, w)!r}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise DuplicateEntryError(f"duplicate social entry for {key!r}")
        seen.add(key)
        weight = _check_weight(w, "social", (a, b, w))
        rows.extend((uidx[a], uidx[b]))
        cols.extend((uidx[b], uidx[a]))
        vals.extend((weight, weight))
    S = _csr(rows, cols, vals, (n, n))

    return SoanGraph(n=n, m=m, S=S, O=O, A=A, user_ids=user_ids, item_ids=item_ids)


def from_matrices(
    S: sp.spmatrix,
    O: sp.spmatrix,
    A: sp.spmatrix,
    user_ids: Sequence[str],
    item_ids: Sequence[str],
) -> SoanGraph:
    """Wrap already-built sparse relations, enforcing the graph invariants."""
    n, m = len(user_ids), len(item_ids)
    S = sp.csr_matrix(S, copy=True)
    O = sp.csr_matrix(O, copy=True)
    A = sp.csr_matrix(A, copy=True)
    for mat in (S, O, A):
        mat.sort_indices()
    if S.shape != (n, n) or O.shape != (n, m) or A.shape != (n, m):
        raise ValidationError(
            f"relation shapes {S.shape}, {O.shape}, {A.shape} disagree with n={n}, m={m}"
        )
    graph = SoanGraph(n=n, m=m, S=S, O=O, A=A,
                      user_ids=tuple(user_ids), item_ids=tuple(item_ids))
    report = validate(graph)
    if not report.ok:
        raise ValidationError("; ".join(report.errors))
    return graph


def propagation_matrix(graph: SoanGraph) -> PropagationMatrix:
    """Build the row-normalized operator from the combined adjacency.

    The user-item block is ``P = O + A`` entrywise (a user who both owns and
    assesses an item contributes the sum of the two weights, as a single
    stored entry).  The combined matrix is ``[[S, P], [P^T, 0]] + I`` and
    every row is divided by its count of stored entries.
    """
    n, m, size = graph.n, graph.m, graph.n + graph.m

    oc = graph.O.tocoo()
    ac = graph.A.tocoo()
    P = sp.coo_matrix(
        (np.concatenate([oc.data, ac.data]),
         (np.concatenate([oc.row, ac.row]), np.concatenate([oc.col, ac.col]))),
        shape=(n, m),
    )
    P.sum_duplicates()  # merges own+assess on the same item into one entry

    sc = graph.S.tocoo()
    rows = np.concatenate([sc.row, P.row, P.col + n, np.arange(size)])
    cols = np.concatenate([sc.col, P.col + n, P.row, np.arange(size)])
    vals = np.concatenate([sc.data, P.data, P.data, np.ones(size)])

    degrees = np.bincount(rows, minlength=size)  # self-loop guarantees >= 1
    N = sp.coo_matrix((vals / degrees[rows], (rows, cols)), shape=(size, size)).tocsr()
    N.sort_indices()
    return PropagationMatrix(N=N, degrees=degrees, n=n, m=m)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`: fatal structural errors plus warnings."""

    errors: list[str]
    warnings: list[str]

    @property
    def ok(self) -> bool:
        return not self.errors


def _structural_pattern(mat: sp.csr_matrix) -> sp.csr_matrix:
    pat = mat.copy()
    pat.data = np.ones_like(pat.data)
    return pat


def validate(graph: SoanGraph) -> ValidationReport:
    """Check structural invariants; isolation is reported but not fatal."""
    errors: list[str] = []
    warnings: list[str] = []
    n, m = graph.n, graph.m

    if graph.S.shape != (n, n):
        errors.append(f"S has shape {graph.S.shape}, expected {(n, n)}")
    for name, mat in (("O", graph.O), ("A", graph.A)):
        if mat.shape != (n, m):
            errors.append(f"{name} has shape {mat.shape}, expected {(n, m)}")
    if errors:
        return ValidationReport(errors, warnings)

    for name, mat in (("S", graph.S), ("O", graph.O), ("A", graph.A)):
        if mat.nnz and (not np.all(np.isfinite(mat.data)) or mat.data.min() < 0.0 or mat.data.max() > 1.0):
            errors.append(f"{name} contains weights outside [0, 1]")

    if np.count_nonzero(graph.S.diagonal()):
        errors.append("S has nonzero diagonal entries (self-friendship)")
    spat = _structural_pattern(graph.S)
    if (spat != spat.T).nnz or (graph.S != graph.S.T).nnz:
        errors.append("S is not symmetric")

    if not errors:
        opat = _structural_pattern(graph.O)
        apat = _structural_pattern(graph.A)
        item_links = np.asarray((opat.sum(axis=0) + apat.sum(axis=0))).ravel()
        for j in np.nonzero(item_links == 0)[0]:
            warnings.append(f"item {graph.item_ids[j]!r} has no assessments and no owners")
        user_links = (
            np.asarray(spat.sum(axis=1)).ravel()
            + np.asarray(opat.sum(axis=1)).ravel()
            + np.asarray(apat.sum(axis=1)).ravel()
        )
        for u in np.nonzero(user_links == 0)[0]:
            warnings.append(f"user {graph.user_ids[u]!r} has no edges")

    return ValidationReport(errors, warnings)


def _triples(mat: sp.spmatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    coo = mat.tocoo()
    order = np.lexsort((coo.col, coo.row))
    return coo.row[order], coo.col[order], coo.data[order]


def graphs_equal(a: SoanGraph, b: SoanGraph) -> bool:
    """Exact equality: identifiers, structural patterns, and stored weights."""
    if (a.n, a.m, a.user_ids, a.item_ids) != (b.n, b.m, b.user_ids, b.item_ids):
        return False
    for ma, mb in ((a.S, b.S), (a.O, b.O), (a.A, b.A)):
        ra, ca, va = _triples(ma)
        rb, cb, vb = _triples(mb)
        if len(va) != len(vb):
            return False
        if not (np.array_equal(ra, rb) and np.array_equal(ca, cb) and np.array_equal(va, vb)):
            return False
    return True


def datasets_equal(a: Dataset, b: Dataset) -> bool:
    """Exact dataset equality (graph, known truth values, split)."""
    if not graphs_equal(a.graph, b.graph):
        return False
    if not np.array_equal(a.truth.mask, b.truth.mask):
        return False
    if not np.array_equal(a.truth.v[a.truth.mask], b.truth.v[b.truth.mask]):
        return False
    return a.split == b.split
