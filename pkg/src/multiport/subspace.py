"""
Subspace and affine-space arithmetic over the complex field.

Vectors live on finite, labeled index sets.  A :class:`Subspace` stores an
orthonormal row basis whose columns follow the canonical order of its
:class:`IndexSet`; an :class:`AffineSpace` is a particular vector plus a
translate.  Operations on spaces with different index sets follow the
padding conventions of implicit linear algebra: sums pad with the zero
space, intersections pad with the full space.

Every rank decision goes through one rule: a singular value ``s`` counts as
zero iff ``s <= tol * max(m, n) * s_max``.  ``tol`` is passed explicitly to
each operation (default :data:`TOL`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Union

import numpy as np

TOL = 1e-10


class Kind(enum.IntEnum):
    V = 0
    I = 1


class Label(NamedTuple):
    """A variable: the voltage or current of one edge."""

    edge: str
    kind: Kind

    def __str__(self) -> str:
        return f"{'v' if self.kind is Kind.V else 'i'}({self.edge})"

    @classmethod
    def parse(cls, text: str) -> "Label":
        text = text.strip()
        if len(text) < 4 or text[1] != "(" or text[-1] != ")" or text[0] not in "vi":
            raise ValueError(f"bad label {text!r}")
        return cls(text[2:-1], Kind.V if text[0] == "v" else Kind.I)


def vlabel(edge: str) -> Label:
    return Label(edge, Kind.V)


def ilabel(edge: str) -> Label:
    return Label(edge, Kind.I)


class IndexSet:
    """Ordered set of distinct labels; order is always the sorted order."""

    __slots__ = ("labels", "_pos")

    def __init__(self, labels: Iterable = ()):
        ordered = tuple(sorted(labels))
        for a, b in zip(ordered, ordered[1:]):
            if a == b:
                raise ValueError(f"duplicate label {a}")
        self.labels = ordered
        self._pos = {lab: k for k, lab in enumerate(ordered)}

    @classmethod
    def pairs(cls, edges: Iterable[str]) -> "IndexSet":
        """Voltage and current labels of every edge."""
        edges = list(edges)
        return cls([vlabel(e) for e in edges] + [ilabel(e) for e in edges])

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label) -> bool:
        return label in self._pos

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexSet) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return "IndexSet([" + ", ".join(str(lab) for lab in self.labels) + "])"

    def position(self, label) -> int:
        return self._pos[label]

    def positions(self, labels: Iterable) -> np.ndarray:
        return np.array([self._pos[lab] for lab in labels], dtype=np.intp)

    def union(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(set(self.labels) | set(other.labels))

    def intersection(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(lab for lab in self.labels if lab in other)

    def difference(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(lab for lab in self.labels if lab not in other)

    def issubset(self, other: "IndexSet") -> bool:
        return all(lab in other for lab in self.labels)

    def edges(self) -> tuple[str, ...]:
        return tuple(sorted({lab.edge for lab in self.labels}))

    def voltages(self) -> "IndexSet":
        return IndexSet(lab for lab in self.labels if lab.kind is Kind.V)

    def currents(self) -> "IndexSet":
        return IndexSet(lab for lab in self.labels if lab.kind is Kind.I)

    def is_pair_set(self) -> bool:
        try:
            return self == IndexSet.pairs(self.edges())
        except (AttributeError, TypeError):
            return False


def _as_index(labels) -> IndexSet:
    return labels if isinstance(labels, IndexSet) else IndexSet(labels)


def rank_of(singular_values: np.ndarray, shape: tuple[int, int], tol: float = TOL,
            scale: float = 0.0) -> int:
    """Numerical rank under the global relative tolerance rule.

    ``scale`` is an optional reference magnitude for matrices built from
    products, whose largest singular value may itself be pure rounding noise.
    """
    s = np.asarray(singular_values)
    ref = max(float(s[0]) if s.size else 0.0, scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * max(shape) * ref))


def _row_basis(rows: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (as rows) of the row space of ``rows``."""
    m, n = rows.shape
    if m == 0 or n == 0:
        return np.zeros((0, n), dtype=complex)
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    return vh[: rank_of(s, rows.shape, tol)]


def _null_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal rows spanning {x : rows @ x = 0}."""
    m, n = rows.shape
    if m == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(rows, full_matrices=True)
    r = rank_of(s, rows.shape, tol)
    # rows @ conj(vh[k]) = 0 for k >= r, so the null vectors are conj(vh[r:])
    return vh[r:].conj()


def lstsq_consistent(a: np.ndarray, b: np.ndarray, tol: float = TOL, scale: float = 0.0):
    """Minimum-norm solution of ``a x = b`` and whether the system is consistent.

    Consistency is rank(a) == rank(a|b), decided through the residual of the
    projection of ``b`` on the column space of ``a``, using the same relative
    threshold as :func:`rank_of`.

    ``scale`` is passed to :func:`rank_of`.  Returns ``(x, consistent, rank)``.
    """
    m, n = a.shape
    b = np.asarray(b, dtype=complex)
    if m == 0:
        return np.zeros(n, dtype=complex), True, 0
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    r = rank_of(s, a.shape, tol, scale)
    coeff = u[:, :r].conj().T @ b
    x = vh[:r].conj().T @ (coeff / s[:r])
    resid = np.linalg.norm(b - u[:, :r] @ coeff)
    ref = max(s[0] if s.size else 0.0, scale, np.linalg.norm(b))
    consistent = resid <= tol * max(m, n + 1) * ref
    return x, bool(consistent), r


def rref(m: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Reduced row echelon form with partial pivoting; zero rows are dropped."""
    a = np.array(m, dtype=complex)
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return a[:0]
    thresh = tol * max(rows, cols) * max(np.abs(a).max(), 1.0)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= thresh:
            a[r:, c] = 0.0
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        for k in range(rows):
            if k != r and a[k, c] != 0.0:
                a[k] -= a[k, c] * a[r]
        a[r, c] = 1.0
        r += 1
    return clean(a[:r], thresh)


def clean(a: np.ndarray, atol: float) -> np.ndarray:
    """Snap real/imaginary parts below ``atol`` to +0.0."""
    a = np.array(a, dtype=complex)
    re, im = a.real.copy(), a.imag.copy()
    re[np.abs(re) <= atol] = 0.0
    im[np.abs(im) <= atol] = 0.0
    return (re + 0.0) + 1j * (im + 0.0)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _canonical_columns(labels, matrix) -> tuple[IndexSet, np.ndarray]:
    """Reorder the columns of ``matrix`` from ``labels`` order into canonical order."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if isinstance(labels, IndexSet):
        index = labels
        if matrix.shape[1] != len(index):
            raise ValueError("column count does not match index")
        return index, matrix
    labels = list(labels)
    index = IndexSet(labels)
    if matrix.shape[1] != len(labels):
        if matrix.size == 0:
            matrix = matrix.reshape(-1, len(labels))
        else:
            raise ValueError("column count does not match labels")
    src = {lab: k for k, lab in enumerate(labels)}
    perm = np.array([src[lab] for lab in index.labels], dtype=np.intp)
    return index, matrix[:, perm] if len(perm) else matrix


def _embed(a: np.ndarray, src: IndexSet, dst: IndexSet) -> np.ndarray:
    """Zero-pad the columns of ``a`` from ``src`` into ``dst``."""
    out = np.zeros((a.shape[0], len(dst)), dtype=complex)
    if len(src):
        out[:, dst.positions(src)] = a
    return out


@dataclass(frozen=True, eq=False)
class Subspace:
    """A vector space on ``index``; ``basis`` has orthonormal rows."""

    index: IndexSet
    basis: np.ndarray

    def __post_init__(self):
        n = len(self.index)
        b = _frozen(self.basis)
        b = b.reshape(-1, n) if n else _frozen(np.zeros((0, 0), dtype=complex))
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, labels, rows, tol: float = TOL) -> "Subspace":
        """Span of the rows of ``rows``; columns are given in ``labels`` order."""
        index, rows = _canonical_columns(labels, rows)
        return cls(index, _row_basis(rows, tol))

    @classmethod
    def from_constraints(cls, labels, c, tol: float = TOL) -> "Subspace":
        """Solution space of ``c @ x = 0``."""
        index, c = _canonical_columns(labels, c)
        return cls(index, _null_rows(c, tol))

    @classmethod
    def zero(cls, labels) -> "Subspace":
        index = _as_index(labels)
        return cls(index, np.zeros((0, len(index))))

    @classmethod
    def full(cls, labels) -> "Subspace":
        index = _as_index(labels)
        return cls(index, np.eye(len(index)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, index={self.index!r})"

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return (x @ self.basis.conj().T) @ self.basis

    def distance(self, x: np.ndarray) -> float:
        """Norm of the component of ``x`` orthogonal to this space."""
        x = np.asarray(x, dtype=complex)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x: np.ndarray, tol: float = 1e-8) -> bool:
        x = np.asarray(x, dtype=complex)
        return self.distance(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def constraints(self, tol: float = TOL) -> np.ndarray:
        """A full-row-rank matrix ``c`` with this space as ``{x : c x = 0}``."""
        return orthogonal_complement(self, tol).basis.conj()

    def residual(self, other: "Subspace") -> float:
        """Symmetric containment residual; 0 for equal spaces."""
        if self.index != other.index:
            return float("inf")
        res = 0.0
        for a, b in ((self, other), (other, self)):
            for row in a.basis:
                res = max(res, b.distance(row) / max(np.linalg.norm(row), 1e-300))
        if self.dim != other.dim:
            res = max(res, 1.0)
        return res

    def equals(self, other: "Subspace", tol: float = 1e-8) -> bool:
        return self.residual(other) <= tol

    def rref(self, tol: float = TOL) -> np.ndarray:
        return rref(self.basis, tol)


@dataclass(frozen=True)
class Void:
    """The empty result of an affine operation; a value, not an error."""

    index: IndexSet
    reason: str = ""

    def equals(self, other, tol: float = 1e-8) -> bool:
        return isinstance(other, Void) and other.index == self.index


@dataclass(frozen=True, eq=False)
class AffineSpace:
    """``particular + translate``.  The particular vector is kept orthogonal
    to the translate so that equal spaces carry equal representatives."""

    particular: np.ndarray
    translate: Subspace

    def __post_init__(self):
        p = np.asarray(self.particular, dtype=complex).reshape(len(self.translate.index))
        p = p - self.translate.project(p)
        object.__setattr__(self, "particular", _frozen(p))

    @classmethod
    def from_constraints(cls, labels, c, s, tol: float = TOL) -> Union["AffineSpace", Void]:
        """Solution set of ``c @ x = s``."""
        index, c = _canonical_columns(labels, c)
        s = np.asarray(s, dtype=complex).reshape(c.shape[0])
        x, ok, _ = lstsq_consistent(c, s, tol)
        if not ok:
            return Void(index, "inconsistent constraints")
        return cls(x, Subspace(index, _null_rows(c, tol)))

    @classmethod
    def point(cls, labels, x) -> "AffineSpace":
        index, x = _canonical_columns(labels, np.asarray(x, dtype=complex).reshape(1, -1))
        return cls(x[0], Subspace.zero(index))

    @classmethod
    def of(cls, v: Subspace) -> "AffineSpace":
        return cls(np.zeros(len(v.index)), v)

    @property
    def index(self) -> IndexSet:
        return self.translate.index

    def __repr__(self) -> str:
        return f"AffineSpace(dim={self.translate.dim}, index={self.index!r})"

    def constraints(self, tol: float = TOL) -> tuple[np.ndarray, np.ndarray]:
        c = self.translate.constraints(tol)
        return c, c @ self.particular

    def distance(self, x: np.ndarray) -> float:
        return self.translate.distance(np.asarray(x, dtype=complex) - self.particular)

    def contains(self, x: np.ndarray, tol: float = 1e-8) -> bool:
        x = np.asarray(x, dtype=complex)
        return self.distance(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def residual(self, other) -> float:
        if isinstance(other, Void):
            return float("inf")
        res = self.translate.residual(other.translate)
        if np.isinf(res):
            return res
        d = self.particular - other.particular
        scale = max(1.0, np.linalg.norm(self.particular), np.linalg.norm(other.particular))
        return max(res, self.translate.distance(d) / scale)

    def equals(self, other, tol: float = 1e-8) -> bool:
        return self.residual(other) <= tol


Space = Union[Subspace, AffineSpace]
MaybeVoid = Union[Subspace, AffineSpace, Void]


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def orthogonal_complement(v: Subspace, tol: float = TOL) -> Subspace:
    """``{g : <f, g> = 0 for all f in v}`` with ``<f, g> = sum f conj(g)``."""
    n = len(v.index)
    if v.dim == 0:
        return Subspace(v.index, np.eye(n))
    _, _, vh = np.linalg.svd(v.basis, full_matrices=True)
    # rows of a unitary vh are orthonormal under <f, g>; vh[:dim] spans v
    return Subspace(v.index, vh[v.dim:])


def subspace_sum(v1: Subspace, v2: Subspace, tol: float = TOL) -> Subspace:
    """Sum on the union of the index sets (each side padded with zeros)."""
    index = v1.index.union(v2.index)
    rows = np.vstack([_embed(v1.basis, v1.index, index), _embed(v2.basis, v2.index, index)])
    return Subspace(index, _row_basis(rows, tol))


def intersection(k1, k2, tol: float = TOL):
    """Intersection on the union of the index sets (each side padded with F).

    Subspace inputs give a Subspace.  If either input is affine the result
    is an AffineSpace or :class:`Void`.
    """
    if isinstance(k1, Void) or isinstance(k2, Void):
        return Void(k1.index.union(k2.index), "void operand")
    index = k1.index.union(k2.index)
    blocks, rhs = [], []
    for k in (k1, k2):
        t = k.translate if isinstance(k, AffineSpace) else k
        c = t.constraints(tol)
        blocks.append(_embed(c, t.index, index))
        if isinstance(k, AffineSpace):
            rhs.append(c @ k.particular)
        else:
            rhs.append(np.zeros(c.shape[0], dtype=complex))
    c = np.vstack(blocks)
    translate = Subspace(index, _null_rows(c, tol))
    if isinstance(k1, Subspace) and isinstance(k2, Subspace):
        return translate
    x, ok, _ = lstsq_consistent(c, np.concatenate(rhs), tol)
    if not ok:
        return Void(index, "empty intersection")
    return AffineSpace(x, translate)


def _check_subset(t: IndexSet, index: IndexSet) -> None:
    if not t.issubset(index):
        missing = ", ".join(str(lab) for lab in t.difference(index))
        raise ValueError(f"labels not in index: {missing}")


def restriction(k, t, tol: float = TOL):
    """Coordinate projection onto ``t``."""
    if isinstance(k, Void):
        return Void(_as_index(t), k.reason)
    t = _as_index(t)
    _check_subset(t, k.index)
    cols = k.index.positions(t.labels)
    if isinstance(k, AffineSpace):
        return AffineSpace(k.particular[cols], restriction(k.translate, t, tol))
    return Subspace(t, _row_basis(k.basis[:, cols], tol))


def contraction(k, t, tol: float = TOL):
    """Members vanishing outside ``t``, projected onto ``t``."""
    if isinstance(k, Void):
        return Void(_as_index(t), k.reason)
    t = _as_index(t)
    _check_subset(t, k.index)
    out = k.index.difference(t)
    if isinstance(k, AffineSpace):
        zero_out = AffineSpace.point(out, np.zeros(len(out)))
        return restriction(intersection(k, zero_out, tol), t, tol)
    cols_out = k.index.positions(out.labels)
    cols_in = k.index.positions(t.labels)
    b = k.basis
    if len(out) == 0:
        return Subspace(t, _row_basis(b[:, cols_in], tol))
    # coefficient rows c with c @ b[:, out] = 0
    m = b[:, cols_out]
    u, s, _ = np.linalg.svd(m, full_matrices=True)
    r = rank_of(s, m.shape, tol)
    coeff = u[:, r:].conj().T
    return Subspace(t, _row_basis(coeff @ b[:, cols_in], tol))


def sign_flip(k, t, tol: float = TOL):
    """Negate the coordinates in ``t`` (an involution)."""
    if isinstance(k, Void):
        return k
    t = _as_index(t)
    _check_subset(t, k.index)
    d = np.ones(len(k.index))
    d[k.index.positions(t.labels)] = -1.0
    if isinstance(k, AffineSpace):
        return AffineSpace(k.particular * d, Subspace(k.index, k.translate.basis * d))
    return Subspace(k.index, k.basis * d)


def relabel(k, mapping: Mapping, tol: float = TOL):
    """Rename labels through ``mapping`` (unlisted labels keep their name)."""
    old = k.index.labels
    new = [mapping.get(lab, lab) for lab in old]
    if len(set(new)) != len(new):
        raise ValueError("relabel map is not injective on the index")
    if isinstance(k, Void):
        return Void(IndexSet(new), k.reason)
    if isinstance(k, AffineSpace):
        index, rows = _canonical_columns(new, np.vstack([k.particular, k.translate.basis]))
        return AffineSpace(rows[0], Subspace(index, rows[1:]))
    index, rows = _canonical_columns(new, k.basis)
    return Subspace(index, rows)


def matched_composition(k1, k2, tol: float = TOL):
    """``{(f_S, g_Q) : (f_S, h_P) in k1, (h_P, g_Q) in k2}``."""
    shared = k1.index.intersection(k2.index)
    keep = k1.index.union(k2.index).difference(shared)
    return restriction(intersection(k1, k2, tol), keep, tol)


def skewed_composition(k1, k2, tol: float = TOL):
    """Matched composition with the shared coordinates of ``k2`` negated."""
    shared = k1.index.intersection(k2.index)
    return matched_composition(k1, sign_flip(k2, shared), tol)


def direct_sum(*spaces, tol: float = TOL):
    """Direct sum of spaces on pairwise disjoint index sets."""
    labels: list = []
    for k in spaces:
        labels.extend(k.index.labels)
    index = IndexSet(labels)  # raises on overlap
    if any(isinstance(k, Void) for k in spaces):
        return Void(index, "void operand")
    blocks = []
    p = np.zeros(len(index), dtype=complex)
    affine = False
    for k in spaces:
        t = k.translate if isinstance(k, AffineSpace) else k
        blocks.append(_embed(t.basis, t.index, index))
        if isinstance(k, AffineSpace):
            affine = True
            p[index.positions(k.index.labels)] = k.particular
    basis = np.vstack(blocks) if blocks else np.zeros((0, len(index)))
    v = Subspace(index, basis)
    return AffineSpace(p, v) if affine else v


def adjoint(k, tol: float = TOL) -> Subspace:
    """``(V*)_{(-S")S}`` of the translate ``V`` of ``k``.

    Take the orthogonal complement, then give each edge the new voltage
    equal to the old current and the new current equal to minus the old
    voltage.
    """
    v = k.translate if isinstance(k, AffineSpace) else k
    if not v.index.is_pair_set():
        raise ValueError("adjoint needs a voltage/current pair index")
    comp = orthogonal_complement(v, tol)
    comp = sign_flip(comp, v.index.voltages())
    swap = {lab: Label(lab.edge, Kind.I if lab.kind is Kind.V else Kind.V) for lab in v.index}
    return relabel(comp, swap)


# --------------------------------------------------------------------------
# canonical JSON form
# --------------------------------------------------------------------------

def complex_to_json(z: complex) -> dict:
    z = complex(z)
    return {"re": float(z.real) + 0.0, "im": float(z.imag) + 0.0}


def complex_from_json(d) -> complex:
    return complex(float(d["re"]), float(d["im"]))


def subspace_to_json(v: Subspace, tol: float = TOL) -> dict:
    return {
        "labels": [str(lab) for lab in v.index.labels],
        "rows": [[complex_to_json(z) for z in row] for row in v.rref(tol)],
    }


def subspace_from_json(d: Mapping, tol: float = TOL) -> Subspace:
    labels = [Label.parse(s) for s in d["labels"]]
    rows = np.array([[complex_from_json(z) for z in row] for row in d["rows"]],
                    dtype=complex).reshape(-1, len(labels))
    return Subspace.span(labels, rows, tol)


__all__ = [
    "TOL", "Kind", "Label", "vlabel", "ilabel", "IndexSet", "Subspace", "AffineSpace", "Void",
    "orthogonal_complement", "subspace_sum", "intersection", "restriction", "contraction",
    "sign_flip", "relabel", "matched_composition", "skewed_composition", "direct_sum",
    "adjoint", "rank_of", "lstsq_consistent", "rref", "subspace_to_json", "subspace_from_json",
]
