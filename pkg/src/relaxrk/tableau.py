"""Butcher tableaux, a small registry of explicit methods, and order verification.

A Runge-Kutta method is held as a plain (A, b, c) coefficient triple.  Order is
verified against the classical rooted-tree order conditions

    b . phi(t) = 1 / density(t)   for every rooted tree t with order(t) <= p,

so transcribed coefficient sets are gated by an independent check rather than
trusted.  Tableaux can also be read from a plain text file (see
:func:`load_tableau_file`) so methods outside the registry can be analyzed.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

#: residual threshold below which an order condition counts as satisfied
ORDER_RESIDUAL_TOL = 1e-10

#: tolerance for the consistency check c_j = sum_i a_ji
C_CONSISTENCY_TOL = 1e-13


@dataclass(frozen=True)
class ButcherTableau:
    """Coefficients (A, b, c) of a Runge-Kutta method.

    Arrays are stored read-only.  If ``c`` is omitted it is filled in from the
    row sums of ``A``, which is the standard convention for all methods here.
    """

    name: str
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if b.shape != (A.shape[0],):
            raise ValueError(f"b must have length {A.shape[0]}, got {b.shape}")
        if self.c is None:
            c = A.sum(axis=1)
        else:
            c = np.array(self.c, dtype=float)
            if c.shape != b.shape:
                raise ValueError(f"c must have length {b.shape[0]}, got {c.shape}")
        for arr in (A, b, c):
            arr.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def explicit(self) -> bool:
        """True when A is strictly lower triangular."""
        return bool(np.all(np.triu(self.A) == 0.0))


@dataclass(frozen=True)
class RootedTree:
    """Unordered rooted tree; children are kept in a canonical sorted order."""

    children: tuple["RootedTree", ...] = ()

    @property
    def order(self) -> int:
        """Number of nodes."""
        return 1 + sum(child.order for child in self.children)

    @property
    def density(self) -> int:
        """Product of the orders of all subtrees rooted at each node."""
        d = self.order
        for child in self.children:
            d *= child.density
        return d

    def encoding(self):
        """Canonical nested-tuple form, also used as the sort key."""
        return tuple(child.encoding() for child in self.children)

    def __repr__(self):
        if not self.children:
            return "t"
        return "[" + ",".join(repr(c) for c in self.children) + "]"


def make_tree(children=()) -> RootedTree:
    """Build a tree from an iterable of child subtrees, canonicalizing order."""
    kids = tuple(sorted(children, key=RootedTree.encoding))
    return RootedTree(kids)


def _partitions(n: int):
    """Non-increasing integer partitions of n."""
    if n == 0:
        yield ()
        return
    for first in range(n, 0, -1):
        for rest in _partitions(n - first):
            if not rest or first >= rest[0]:
                yield (first,) + rest


@lru_cache(maxsize=None)
def rooted_trees(order: int) -> tuple[RootedTree, ...]:
    """All unordered rooted trees with exactly ``order`` nodes.

    The counts for order 1, 2, 3, ... are 1, 1, 2, 4, 9, 20, 48, ...
    """
    if order < 1:
        raise ValueError("tree order must be >= 1")
    if order == 1:
        return (make_tree(),)
    found = set()
    for parts in _partitions(order - 1):
        pools = [
            itertools.combinations_with_replacement(rooted_trees(v), k)
            for v, k in sorted(Counter(parts).items())
        ]
        for combo in itertools.product(*pools):
            found.add(make_tree(itertools.chain.from_iterable(combo)))
    return tuple(sorted(found, key=RootedTree.encoding))


def elementary_weights(tree: RootedTree, A: np.ndarray) -> np.ndarray:
    """Per-stage elementary weight vector phi(t) for the given tableau matrix.

    phi of the single node is the all-ones vector, and grafting subtrees
    multiplies componentwise by A @ phi(subtree).
    """
    phi = np.ones(A.shape[0])
    for child in tree.children:
        phi = phi * (A @ elementary_weights(child, A))
    return phi


def order_via_trees(tab: ButcherTableau, max_order: int = 5):
    """Verify the classical order of a tableau via rooted-tree conditions.

    Returns ``(order, residuals)`` where ``order`` is the largest p <= max_order
    such that every condition of order <= p has residual below
    ``ORDER_RESIDUAL_TOL``, and ``residuals`` is a list of (tree, residual)
    pairs covering all trees up to ``max_order``.
    """
    residuals = []
    order = 0
    counting = True
    for n in range(1, max_order + 1):
        level_ok = True
        for tree in rooted_trees(n):
            res = abs(float(tab.b @ elementary_weights(tree, tab.A)) - 1.0 / tree.density)
            residuals.append((tree, res))
            if res > ORDER_RESIDUAL_TOL:
                level_ok = False
        if counting and level_ok:
            order = n
        else:
            counting = False
    return order, residuals


@dataclass(frozen=True)
class TableauDiagnostics:
    """Result of :func:`validate`: structural flags plus verified order."""

    c_consistent: bool
    explicit: bool
    nonneg_weights: bool
    positivity_sum: float
    order: int
    residuals: tuple = field(repr=False)


def validate(tab: ButcherTableau, max_order: int = 5) -> TableauDiagnostics:
    """Run structural checks and the order conditions on a tableau.

    ``positivity_sum`` is sum_ij b_i a_ij; a positive value is what makes the
    relaxation parameter of a conservative problem well defined.
    """
    c_consistent = bool(np.max(np.abs(tab.c - tab.A.sum(axis=1))) <= C_CONSISTENCY_TOL)
    nonneg = bool(np.all(tab.b >= 0.0))
    positivity_sum = float(tab.b @ tab.A.sum(axis=1))
    order, residuals = order_via_trees(tab, max_order=max_order)
    return TableauDiagnostics(
        c_consistent=c_consistent,
        explicit=tab.explicit,
        nonneg_weights=nonneg,
        positivity_sum=positivity_sum,
        order=order,
        residuals=tuple(residuals),
    )


def _ssprk22() -> ButcherTableau:
    # Heun form; SSP coefficient 1
    A = np.zeros((2, 2))
    A[1, 0] = 1.0
    b = np.array([0.5, 0.5])
    return ButcherTableau("SSPRK(2,2)", A, b)


def _ssprk33() -> ButcherTableau:
    # Shu & Osher, J. Comput. Phys. 77 (1988)
    A = np.zeros((3, 3))
    A[1, 0] = 1.0
    A[2, :2] = [0.25, 0.25]
    b = np.array([1 / 6, 1 / 6, 2 / 3])
    return ButcherTableau("SSPRK(3,3)", A, b)


def _ssprk104() -> ButcherTableau:
    # Ketcheson, SIAM J. Sci. Comput. 30 (2008); low-storage method written
    # out in Butcher form.
    A = np.zeros((10, 10))
    for i in range(1, 5):
        A[i, :i] = 1 / 6
    A[5, :5] = 1 / 15
    for i in range(6, 10):
        A[i, :5] = 1 / 15
        A[i, 5:i] = 1 / 6
    b = np.full(10, 0.1)
    return ButcherTableau("SSPRK(10,4)", A, b)


def _rk44() -> ButcherTableau:
    # the classical fourth-order method
    A = np.zeros((4, 4))
    A[1, 0] = 0.5
    A[2, 1] = 0.5
    A[3, 2] = 1.0
    b = np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6])
    return ButcherTableau("RK(4,4)", A, b)


def _bsrk85() -> ButcherTableau:
    # Fifth-order member of the Bogacki & Shampine (4,5) pair, Comput. Math.
    # Appl. 32 (1996).  The embedded fourth-order weights are not carried.
    A = np.zeros((8, 8))
    A[1, 0] = 1 / 6
    A[2, :2] = [2 / 27, 4 / 27]
    A[3, :3] = [183 / 1372, -162 / 343, 1053 / 1372]
    A[4, :4] = [68 / 297, -4 / 11, 42 / 143, 1960 / 3861]
    A[5, :5] = [597 / 22528, 81 / 352, 63099 / 585728, 58653 / 366080, 4617 / 20480]
    A[6, :6] = [
        174197 / 959244,
        -30942 / 79937,
        8152137 / 19744439,
        666106 / 1039181,
        -29421 / 29068,
        482048 / 414219,
    ]
    A[7, :7] = [
        587 / 8064,
        0.0,
        4440339 / 15491840,
        24353 / 124800,
        387 / 44800,
        2152 / 5985,
        7267 / 94080,
    ]
    b = np.array(
        [
            587 / 8064,
            0.0,
            4440339 / 15491840,
            24353 / 124800,
            387 / 44800,
            2152 / 5985,
            7267 / 94080,
            0.0,
        ]
    )
    return ButcherTableau("BSRK(8,5)", A, b)


_REGISTRY = {
    "SSPRK(2,2)": _ssprk22,
    "SSPRK(3,3)": _ssprk33,
    "SSPRK(10,4)": _ssprk104,
    "RK(4,4)": _rk44,
    "BSRK(8,5)": _bsrk85,
}

#: names accepted by :func:`builtin`, in listing order
REGISTRY_NAMES = tuple(_REGISTRY)

#: classical order of each registry method, fixed by the order-condition gate
REGISTRY_ORDERS = {
    "SSPRK(2,2)": 2,
    "SSPRK(3,3)": 3,
    "SSPRK(10,4)": 4,
    "RK(4,4)": 4,
    "BSRK(8,5)": 5,
}


def builtin(name: str) -> ButcherTableau:
    """Return a registry tableau by name.

    Raises KeyError listing the valid names when the name is unknown.
    """
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown method {name!r}; available: {', '.join(REGISTRY_NAMES)}"
        ) from None
    return factory()


def load_tableau_file(path, name: str | None = None) -> ButcherTableau:
    """Read a tableau from a plain text file.

    Format: first line is the stage count s, followed by s lines holding the
    rows of A (s entries each), one line with b, and optionally one line with
    c.  Entries are whitespace-separated decimals; ``#`` starts a comment and
    blank lines are skipped.  When the c line is absent c is taken as the row
    sums of A.
    """
    path = Path(path)
    rows = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError(f"{path}: empty tableau file")
    if len(rows[0]) != 1:
        raise ValueError(f"{path}: first line must hold the stage count only")
    try:
        s = int(rows[0][0])
    except ValueError:
        raise ValueError(f"{path}: stage count {rows[0][0]!r} is not an integer") from None
    if s < 1:
        raise ValueError(f"{path}: stage count must be positive, got {s}")
    body = rows[1:]
    if len(body) not in (s + 1, s + 2):
        raise ValueError(
            f"{path}: expected {s} rows of A plus b (and optional c), got {len(body)} data lines"
        )
    try:
        values = [[float(tok) for tok in line] for line in body]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    for i, line in enumerate(values):
        if len(line) != s:
            raise ValueError(f"{path}: data line {i + 1} has {len(line)} entries, expected {s}")
    A = np.array(values[:s])
    b = np.array(values[s])
    c = np.array(values[s + 1]) if len(values) == s + 2 else None
    return ButcherTableau(name or path.stem, A, b, c)
