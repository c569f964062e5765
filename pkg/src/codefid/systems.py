"""Dense linear algebra over labeled tensor-product systems.

Operators carry an explicit list of labeled subsystems.  Binary operations
pad their operands with identities and reorder subsystems to a canonical
(lexicographic) order, so products of operators on overlapping system sets
can be written without bookkeeping at the call site.

Two scalar paths coexist: complex128 for numeric work, and exact rational
entries (``fractions.Fraction`` held in object arrays) for the operators
whose entries are rational (basis projectors, symmetric/antisymmetric
projectors, maximally entangled states, and everything built from them).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-12


class LabelError(ValueError):
    """Raised when subsystem labels collide or are missing."""


@dataclass(frozen=True)
class SystemShape:
    """An ordered list of (label, dimension) subsystems."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = [lbl for lbl, _ in self.subsystems]
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate subsystem labels in {labels}")
        for lbl, d in self.subsystems:
            if d < 1:
                raise ValueError(f"subsystem {lbl!r} has dimension {d} < 1")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    @property
    def dim(self) -> int:
        out = 1
        for _, d in self.subsystems:
            out *= d
        return out

    def dim_of(self, label: str) -> int:
        for lbl, d in self.subsystems:
            if lbl == label:
                return d
        raise LabelError(f"unknown label {label!r} in shape {self.labels}")

    def axis_of(self, label: str) -> int:
        for i, (lbl, _) in enumerate(self.subsystems):
            if lbl == label:
                return i
        raise LabelError(f"unknown label {label!r} in shape {self.labels}")

    def restricted(self, keep: Sequence[str]) -> "SystemShape":
        keep = set(keep)
        return SystemShape(tuple(s for s in self.subsystems if s[0] in keep))

    def sorted(self) -> "SystemShape":
        return SystemShape(tuple(sorted(self.subsystems)))


def shape(*subsystems: tuple[str, int]) -> SystemShape:
    return SystemShape(tuple(subsystems))


class LabeledOperator:
    """A square operator on the tensor product of labeled subsystems."""

    __slots__ = ("shape", "entries")

    def __init__(self, shp: SystemShape, entries: np.ndarray):
        d = shp.dim
        entries = np.asarray(entries)
        if entries.shape != (d, d):
            raise ValueError(f"entries of shape {entries.shape} do not match total dim {d}")
        if entries.dtype != object:
            entries = entries.astype(np.complex128)
        self.shape = shp
        self.entries = entries

    # -- basic properties -------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.entries.dtype == object

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def labels(self) -> tuple[str, ...]:
        return self.shape.labels

    def to_numeric(self) -> "LabeledOperator":
        if not self.is_exact:
            return self
        return LabeledOperator(self.shape, self.entries.astype(np.complex128))

    def copy(self) -> "LabeledOperator":
        return LabeledOperator(self.shape, self.entries.copy())

    def __repr__(self):
        kind = "exact" if self.is_exact else "complex"
        sub = ",".join(f"{l}:{d}" for l, d in self.shape.subsystems)
        return f"<LabeledOperator [{sub}] {kind}>"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "LabeledOperator") -> "LabeledOperator":
        a, b = align(self, other)
        return LabeledOperator(a.shape, a.entries + b.entries)

    def __sub__(self, other: "LabeledOperator") -> "LabeledOperator":
        a, b = align(self, other)
        return LabeledOperator(a.shape, a.entries - b.entries)

    def __neg__(self) -> "LabeledOperator":
        return LabeledOperator(self.shape, -self.entries)

    def __mul__(self, scalar) -> "LabeledOperator":
        if isinstance(scalar, LabeledOperator):
            raise TypeError("use @ for operator products")
        if self.is_exact and not isinstance(scalar, (int, Fraction)):
            return LabeledOperator(self.shape, self.entries.astype(np.complex128) * scalar)
        return LabeledOperator(self.shape, self.entries * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "LabeledOperator":
        if self.is_exact:
            return self * Fraction(scalar) ** -1 if isinstance(scalar, (int, Fraction)) else self * (1.0 / scalar)
        return LabeledOperator(self.shape, self.entries / scalar)

    def __matmul__(self, other: "LabeledOperator") -> "LabeledOperator":
        a, b = align(self, other)
        return LabeledOperator(a.shape, a.entries @ b.entries)

    def adjoint(self) -> "LabeledOperator":
        if self.is_exact:
            return LabeledOperator(self.shape, self.entries.T.copy())
        return LabeledOperator(self.shape, self.entries.conj().T)

    def conj(self) -> "LabeledOperator":
        if self.is_exact:
            return self.copy()
        return LabeledOperator(self.shape, self.entries.conj())

    def transpose(self) -> "LabeledOperator":
        """Full transpose (all subsystems)."""
        return LabeledOperator(self.shape, self.entries.T.copy())

    def trace(self):
        return np.trace(self.entries)

    # -- structure ---------------------------------------------------------

    def tensor_form(self) -> np.ndarray:
        dims = self.shape.dims
        return self.entries.reshape(dims + dims)

    def permuted(self, new_labels: Sequence[str]) -> "LabeledOperator":
        """Reorder subsystems to the given label order."""
        if set(new_labels) != set(self.labels) or len(new_labels) != len(self.labels):
            raise LabelError(f"permutation {new_labels} does not match {self.labels}")
        if tuple(new_labels) == self.labels:
            return self
        k = len(self.labels)
        perm = [self.shape.axis_of(lbl) for lbl in new_labels]
        t = self.tensor_form().transpose(perm + [p + k for p in perm])
        new_shape = SystemShape(tuple((lbl, self.shape.dim_of(lbl)) for lbl in new_labels))
        return LabeledOperator(new_shape, t.reshape(self.dim, self.dim).copy())

    def max_abs(self) -> float:
        if self.is_exact:
            if self.entries.size == 0:
                return 0.0
            return float(max(abs(v) for v in self.entries.flat))
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0


def _identity_entries(d: int, exact: bool) -> np.ndarray:
    if exact:
        e = np.zeros((d, d), dtype=object)
        e[:, :] = Fraction(0)
        for i in range(d):
            e[i, i] = Fraction(1)
        return e
    return np.eye(d, dtype=np.complex128)


def identity(shp: SystemShape, exact: bool = False) -> LabeledOperator:
    return LabeledOperator(shp, _identity_entries(shp.dim, exact))


def zeros(shp: SystemShape, exact: bool = False) -> LabeledOperator:
    d = shp.dim
    if exact:
        e = np.empty((d, d), dtype=object)
        e[:, :] = Fraction(0)
        return LabeledOperator(shp, e)
    return LabeledOperator(shp, np.zeros((d, d), dtype=np.complex128))


def tensor(a: LabeledOperator, b: LabeledOperator) -> LabeledOperator:
    """Kronecker product; subsystem lists are concatenated."""
    common = set(a.labels) & set(b.labels)
    if common:
        raise LabelError(f"label collision in tensor product: {sorted(common)}")
    shp = SystemShape(a.shape.subsystems + b.shape.subsystems)
    ea, eb = _match_dtypes(a, b)
    return LabeledOperator(shp, np.kron(ea, eb))


def _match_dtypes(a: LabeledOperator, b: LabeledOperator):
    if a.is_exact == b.is_exact:
        return a.entries, b.entries
    if a.is_exact:
        return a.entries.astype(np.complex128), b.entries
    return a.entries, b.entries.astype(np.complex128)


def align(a: LabeledOperator, b: LabeledOperator) -> tuple[LabeledOperator, LabeledOperator]:
    """Embed both operands into the sorted union of their systems."""
    union = {}
    for lbl, d in a.shape.subsystems + b.shape.subsystems:
        if lbl in union and union[lbl] != d:
            raise LabelError(f"label {lbl!r} carries dims {union[lbl]} and {d}")
        union[lbl] = d
    target = SystemShape(tuple(sorted(union.items())))
    exact = a.is_exact and b.is_exact
    return embed(a, target, exact=exact), embed(b, target, exact=exact)


def embed(x: LabeledOperator, target: SystemShape, exact: bool | None = None) -> LabeledOperator:
    """Pad with identities on missing subsystems and permute to target order."""
    if exact is None:
        exact = x.is_exact
    missing = [s for s in target.subsystems if s[0] not in x.labels]
    for lbl in x.labels:
        if lbl not in target.labels:
            raise LabelError(f"operator label {lbl!r} not present in target shape")
    y = x if (x.is_exact == exact or not x.is_exact) else x.to_numeric()
    if not exact and y.is_exact:
        y = y.to_numeric()
    if missing:
        pad = identity(SystemShape(tuple(missing)), exact=exact and y.is_exact)
        y = tensor(y, pad)
    return y.permuted(target.labels)


def partial_trace(x: LabeledOperator, over: Iterable[str]) -> LabeledOperator:
    """Trace out the listed subsystems; remaining order is preserved."""
    over = list(over)
    for lbl in over:
        x.shape.axis_of(lbl)
    if not over:
        return x.copy()
    t = x.tensor_form()
    k = len(x.labels)
    axes = sorted((x.shape.axis_of(lbl) for lbl in over), reverse=True)
    for ax in axes:
        t = np.trace(t, axis1=ax, axis2=ax + k)
        k -= 1
    keep = tuple(s for s in x.shape.subsystems if s[0] not in set(over))
    new_shape = SystemShape(keep)
    d = new_shape.dim
    if k == 0:
        ent = np.array([[t]], dtype=x.entries.dtype)
        return LabeledOperator(new_shape, ent)
    return LabeledOperator(new_shape, np.asarray(t).reshape(d, d))


def partial_transpose(x: LabeledOperator, over: Iterable[str]) -> LabeledOperator:
    """Transpose the listed subsystems in place."""
    over = set(over)
    for lbl in over:
        x.shape.axis_of(lbl)
    k = len(x.labels)
    t = x.tensor_form()
    perm = list(range(2 * k))
    for lbl in over:
        ax = x.shape.axis_of(lbl)
        perm[ax], perm[ax + k] = perm[ax + k], perm[ax]
    t = t.transpose(perm)
    return LabeledOperator(x.shape, t.reshape(x.dim, x.dim).copy())


def trace_product(a: LabeledOperator, b: LabeledOperator):
    """Tr[a b] with implicit identity padding."""
    x, y = align(a, b)
    return np.trace(x.entries @ y.entries)


def relabel(x: LabeledOperator, mapping: dict[str, str]) -> LabeledOperator:
    """Rename subsystems without touching entries."""
    subs = tuple((mapping.get(lbl, lbl), d) for lbl, d in x.shape.subsystems)
    return LabeledOperator(SystemShape(subs), x.entries)


def merge_labels(x: LabeledOperator, groups: Sequence[tuple[str, Sequence[str]]]) -> LabeledOperator:
    """Flatten groups of adjacent-ordered subsystems into single labels.

    Each group lists the member labels in the order they should be packed;
    the operator is permuted so groups are contiguous, then relabeled.
    """
    order = [lbl for _, members in groups for lbl in members]
    y = x.permuted(order)
    subs = []
    for new_lbl, members in groups:
        d = 1
        for lbl in members:
            d *= x.shape.dim_of(lbl)
        subs.append((new_lbl, d))
    return LabeledOperator(SystemShape(tuple(subs)), y.entries)


# -- canonical states and projectors ----------------------------------------


def basis_proj(shp: SystemShape, i: int, exact: bool = False) -> LabeledOperator:
    out = zeros(shp, exact=exact)
    out.entries[i, i] = Fraction(1) if exact else 1.0
    return out


def max_entangled(d: int, labels: tuple[str, str] = ("Q~", "Q"), exact: bool = False) -> LabeledOperator:
    """Projector onto the isotropic maximally entangled state of a d x d pair."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    shp = shape((labels[0], d), (labels[1], d))
    val = Fraction(1, d) if exact else 1.0 / d
    ent = zeros(shp, exact=exact).entries
    for i in range(d):
        for j in range(d):
            ent[i * d + i, j * d + j] = val
    return LabeledOperator(shp, ent)


def swap_operator(d: int, labels: tuple[str, str] = ("Q~", "Q"), exact: bool = False) -> LabeledOperator:
    shp = shape((labels[0], d), (labels[1], d))
    ent = zeros(shp, exact=exact).entries
    one = Fraction(1) if exact else 1.0
    for i in range(d):
        for j in range(d):
            ent[i * d + j, j * d + i] = one
    return LabeledOperator(shp, ent)


def sym_antisym(d: int, labels: tuple[str, str] = ("Q~", "Q"), exact: bool = False):
    """Projectors onto the symmetric and antisymmetric subspaces of a d x d pair."""
    eye = identity(shape((labels[0], d), (labels[1], d)), exact=exact)
    f = swap_operator(d, labels, exact=exact)
    half = Fraction(1, 2) if exact else 0.5
    s = (eye + f) * half
    a = (eye - f) * half
    return s, a


# -- spectra and positivity ---------------------------------------------------


def hermitize(x: LabeledOperator, tol: float = HERMITICITY_TOL) -> LabeledOperator:
    """Symmetrize (X + X†)/2; error if the asymmetry exceeds tol."""
    if x.is_exact:
        if not np.array_equal(x.entries, x.entries.T):
            raise ValueError("exact operator is not symmetric")
        return x
    gap = float(np.max(np.abs(x.entries - x.entries.conj().T))) if x.dim else 0.0
    scale = max(1.0, x.max_abs())
    if gap > tol * scale:
        raise ValueError(f"operator is not Hermitian: asymmetry {gap:.3e}")
    return LabeledOperator(x.shape, (x.entries + x.entries.conj().T) / 2)


def eigvals_hermitian(x: LabeledOperator) -> np.ndarray:
    h = hermitize(x.to_numeric())
    return np.linalg.eigvalsh(h.entries)


def min_eig(x: LabeledOperator) -> float:
    return float(eigvals_hermitian(x)[0])


def is_ppt(x: LabeledOperator, cut: Iterable[str], tol: float = 1e-10) -> bool:
    """True iff the partial transpose over one side of the cut is PSD up to tol."""
    cut = set(cut)
    rest = set(x.labels) - cut
    if not cut or not rest or not cut <= set(x.labels):
        raise LabelError(f"cut {sorted(cut)} does not partition labels {x.labels}")
    return min_eig(partial_transpose(x, cut)) >= -tol


def is_psd_exact(x: LabeledOperator) -> bool:
    """Exact PSD test for real-rational symmetric operators (fraction-pivot LDL)."""
    if not x.is_exact:
        raise ValueError("exact PSD test requires rational entries")
    if not np.array_equal(x.entries, x.entries.T):
        return False
    n = x.dim
    a = [[Fraction(v) for v in row] for row in x.entries.tolist()]
    for k in range(n):
        piv = a[k][k]
        if piv < 0:
            return False
        if piv == 0:
            if any(a[k][j] != 0 for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] / piv
            row_k = a[k]
            row_i = a[i]
            for j in range(k, n):
                row_i[j] -= f * row_k[j]
    return True


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a complex Gaussian matrix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def allclose(a: LabeledOperator, b: LabeledOperator, tol: float = 1e-12) -> bool:
    x, y = align(a, b)
    if x.is_exact and y.is_exact:
        return bool(np.array_equal(x.entries, y.entries))
    diff = x.to_numeric().entries - y.to_numeric().entries
    return float(np.max(np.abs(diff))) <= tol if diff.size else True
