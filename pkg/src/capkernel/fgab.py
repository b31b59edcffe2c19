"""Finitely generated abelian groups given by integer presentations.

Conventions: elements are integer row vectors over the generators, a
presentation ``Z^g / rowspan(relations)`` has one relation per row, and a
homomorphism is the matrix whose i-th row is the image of the i-th source
generator, so ``phi(x) = x * A``.
"""

from dataclasses import dataclass
from math import gcd, prod

from . import kernels
from .errors import IllFormedHom, NotComposable


# ---------------------------------------------------------------------------
# integer matrix helpers

def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(m, n):
    return [[0] * n for _ in range(m)]


def mat_mul(A, B, ncols=None):
    if not A:
        return []
    if ncols is None:
        ncols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * ncols
        for k, a in enumerate(row):
            if a:
                bk = B[k]
                for j in range(ncols):
                    if bk[j]:
                        acc[j] += a * bk[j]
        out.append(acc)
    return out


def vec_mat(v, A, ncols):
    acc = [0] * ncols
    for k, a in enumerate(v):
        if a:
            row = A[k]
            for j in range(ncols):
                if row[j]:
                    acc[j] += a * row[j]
    return acc


def smith_normal_form(M, ncols=None):
    """Return ``(U, D, V)`` with ``U * M * V == D`` exactly.

    U and V are unimodular and D is diagonal with nonnegative entries
    d1 | d2 | ... .  ``ncols`` is only needed for a matrix with no rows.
    """
    M = [list(map(int, r)) for r in M]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    if not M or not ncols:
        return identity(len(M)), [[0] * ncols for _ in M], identity(ncols)
    return kernels.snf(M, ncols)


def hermite_normal_form(M, ncols):
    """Row HNF with transform; see :func:`capkernel.kernels.hnf`."""
    M = [list(map(int, r)) for r in M]
    if not M:
        return [], [], []
    return kernels.hnf(M, ncols)


def hnf_basis(rows, ncols):
    """Canonical (HNF) basis of the lattice spanned by ``rows``."""
    H, _, piv = hermite_normal_form(rows, ncols)
    return [H[i] for i in range(len(piv))]


def left_kernel(rows, ncols):
    """HNF basis of ``{x : x * M == 0}`` for M given by ``rows``."""
    m = len(rows)
    if m == 0:
        return []
    H, U, piv = hermite_normal_form(rows, ncols)
    ker = [U[i] for i in range(len(piv), m)]
    return hnf_basis(ker, m) if ker else []


def solve_left(rows, ncols, v):
    """Integer x with ``x * M == v``, or None when no solution exists."""
    m = len(rows)
    v = list(v)
    if m == 0:
        return [] if not any(v) else None
    H, U, piv = hermite_normal_form(rows, ncols)
    y = [0] * m
    res = v[:]
    for i, c in enumerate(piv):
        p = H[i][c]
        if res[c] % p:
            return None
        q = res[c] // p
        if q:
            y[i] = q
            hi = H[i]
            for j in range(c, ncols):
                if hi[j]:
                    res[j] -= q * hi[j]
    if any(res):
        return None
    return vec_mat(y, U, m)


def unimodular_inverse(V):
    n = len(V)
    if n == 0:
        return []
    H, U, piv = hermite_normal_form(V, n)
    if len(piv) != n or any(H[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return U


def determinant(M):
    """Exact determinant of a square integer matrix."""
    n = len(M)
    if n == 0:
        return 1
    return kernels._pure._bareiss_det([list(map(int, r)) for r in M])


def _lcm(a, b):
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------

class FGAbGroup:
    """``Z^ngens / rowspan(relations)`` with an eagerly computed Smith form.

    ``invariants`` are the torsion invariant factors d1 | d2 | ... (all >= 2)
    and ``free_rank`` the rank of the free part.  Smith coordinates are the
    coordinates of an element along the invariant-factor basis; torsion
    coordinates are reduced modulo their invariant factor.
    """

    __slots__ = ("ngens", "relations", "invariants", "free_rank", "_mods",
                 "_to", "_from", "_rel_hnf", "_rel_piv")

    def __init__(self, ngens, relations=()):
        ngens = int(ngens)
        rels = [tuple(int(x) for x in r) for r in relations]
        for r in rels:
            if len(r) != ngens:
                raise ValueError(f"relation {r} does not have {ngens} entries")
        rels = [r for r in rels if any(r)]
        self.ngens = ngens
        self.relations = tuple(rels)
        U, D, V = smith_normal_form(rels, ngens)
        diag = [D[i][i] if i < len(D) else 0 for i in range(ngens)]
        cols = [i for i, d in enumerate(diag) if d != 1]
        self._mods = tuple(diag[i] for i in cols)
        self.invariants = tuple(d for d in self._mods if d)
        self.free_rank = sum(1 for d in self._mods if d == 0)
        self._to = [[V[r][c] for c in cols] for r in range(ngens)]
        Vinv = unimodular_inverse(V)
        self._from = [list(Vinv[c]) for c in cols]
        H, _, piv = hermite_normal_form(rels, ngens)
        self._rel_hnf = [H[i] for i in range(len(piv))]
        self._rel_piv = piv

    # constructors -------------------------------------------------------
    @classmethod
    def trivial(cls):
        return cls(0)

    @classmethod
    def cyclic(cls, n):
        return cls(1, [[n]] if n else [])

    @classmethod
    def from_invariants(cls, invariants, free_rank=0):
        k = len(invariants) + free_rank
        rels = [[d if j == i else 0 for j in range(k)] for i, d in enumerate(invariants)]
        return cls(k, rels)

    # structure ------------------------------------------------------------
    @property
    def mods(self):
        return self._mods

    @property
    def smith_rank(self):
        return len(self._mods)

    @property
    def is_finite(self):
        return self.free_rank == 0

    @property
    def order(self):
        """Group order, or None for an infinite group."""
        return prod(self.invariants) if self.free_rank == 0 else None

    @property
    def is_trivial(self):
        return not self._mods

    def exponent(self):
        if self.free_rank:
            return None
        return self.invariants[-1] if self.invariants else 1

    def is_killed_by(self, n):
        return self.free_rank == 0 and all(n % d == 0 for d in self.invariants)

    def same_presentation(self, other):
        return self is other or (self.ngens == other.ngens and self.relations == other.relations)

    def isomorphic(self, other):
        return self.invariants == other.invariants and self.free_rank == other.free_rank

    # coordinates ----------------------------------------------------------
    def smith(self, x):
        y = vec_mat(x, self._to, len(self._mods))
        return tuple(v % d if d else v for v, d in zip(y, self._mods))

    def from_smith(self, y):
        return vec_mat(y, self._from, self.ngens)

    def reduce(self, x):
        """Canonical representative of x modulo the relation lattice."""
        x = [int(v) for v in x]
        for row, c in zip(self._rel_hnf, self._rel_piv):
            q = x[c] // row[c]
            if q:
                for j in range(c, self.ngens):
                    if row[j]:
                        x[j] -= q * row[j]
        return tuple(x)

    def is_zero(self, x):
        return not any(self.smith(x))

    def element(self, x):
        return ElementCoords(self, x)

    def zero(self):
        return ElementCoords(self, [0] * self.ngens)

    def gens(self):
        return [ElementCoords(self, row) for row in identity(self.ngens)]

    def smith_generators(self):
        """Generator coordinates of the invariant-factor basis."""
        return [tuple(r) for r in self._from]

    def element_order(self, x):
        y = self.smith(x)
        o = 1
        for v, d in zip(y, self._mods):
            if d == 0:
                if v:
                    return None
            elif v:
                o = _lcm(o, d // gcd(d, v))
        return o

    def elements(self):
        """All elements (finite groups only), as generator coordinates."""
        if self.free_rank:
            raise ValueError("cannot enumerate an infinite group")
        out = [[0] * len(self._mods)]
        for i, d in enumerate(self._mods):
            out = [y[:i] + [v] + y[i + 1:] for y in out for v in range(d)]
        return [self.reduce(self.from_smith(y)) for y in out]

    # subgroups --------------------------------------------------------------
    def _lattice(self, gens):
        k = len(self._mods)
        rows = [list(self.smith(g)) for g in gens]
        rows += [[d if j == i else 0 for j in range(k)] for i, d in enumerate(self._mods) if d]
        return hnf_basis(rows, k) if rows and k else []

    def subgroup_contains(self, gens, x):
        k = len(self._mods)
        if k == 0:
            return True
        return solve_left(self._lattice(gens), k, list(self.smith(x))) is not None

    def subgroup_order(self, gens):
        if self.free_rank:
            # order is finite only if the generated subgroup is torsion
            for g in gens:
                if self.element_order(g) is None:
                    return None
        k = len(self._mods)
        if k == 0:
            return 1
        L = self._lattice(gens)
        tors = [i for i, d in enumerate(self._mods) if d]
        # generated subgroup sits inside the torsion part here
        sub = [[row[i] for i in tors] for row in L]
        sub = hnf_basis(sub, len(tors)) if sub else []
        det = abs(determinant(sub)) if len(sub) == len(tors) else 0
        return prod(self._mods[i] for i in tors) // det

    def subgroups_equal(self, gens_a, gens_b):
        """Mutual containment, then an order comparison for finite groups."""
        if not all(self.subgroup_contains(gens_b, g) for g in gens_a):
            return False
        if not all(self.subgroup_contains(gens_a, g) for g in gens_b):
            return False
        if self.free_rank == 0:
            return self.subgroup_order(gens_a) == self.subgroup_order(gens_b)
        return True

    # presentation ------------------------------------------------------------
    def describe(self):
        parts = [f"Z/{d}" for d in self.invariants] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "0"

    def dump(self):
        lines = [f"generators: {self.ngens}", "relations:"]
        lines += ["  [" + " ".join(str(v) for v in r) + "]" for r in self.relations]
        lines.append(f"invariants: {list(self.invariants)}  free rank: {self.free_rank}")
        return "\n".join(lines)

    def __repr__(self):
        return f"FGAbGroup({self.describe()})"

    def __str__(self):
        return self.describe()


class ElementCoords:
    """An element of an FGAbGroup, stored as its canonical representative."""

    __slots__ = ("group", "coords")

    def __init__(self, group, coords):
        if len(coords) != group.ngens:
            raise ValueError("coordinate length does not match the group")
        self.group = group
        self.coords = group.reduce(coords)

    def _check(self, other):
        if not self.group.same_presentation(other.group):
            raise ValueError("elements of different groups")

    def __eq__(self, other):
        if not isinstance(other, ElementCoords):
            return NotImplemented
        return self.group.same_presentation(other.group) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __add__(self, other):
        self._check(other)
        return ElementCoords(self.group, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        self._check(other)
        return ElementCoords(self.group, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return ElementCoords(self.group, [-a for a in self.coords])

    def __mul__(self, k):
        return ElementCoords(self.group, [k * a for a in self.coords])

    __rmul__ = __mul__

    def is_zero(self):
        return self.group.is_zero(self.coords)

    def order(self):
        return self.group.element_order(self.coords)

    def smith(self):
        return self.group.smith(self.coords)

    def __repr__(self):
        return f"ElementCoords({list(self.coords)})"


class FGAbHom:
    """Homomorphism ``source -> target`` given on generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, check=True):
        matrix = [list(map(int, r)) for r in matrix]
        if len(matrix) != source.ngens or any(len(r) != target.ngens for r in matrix):
            raise ValueError("matrix shape does not match source/target generators")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            for r in source.relations:
                img = vec_mat(r, matrix, target.ngens)
                if not target.is_zero(img):
                    raise IllFormedHom(f"relation {list(r)} maps to nonzero {img}")

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, zero_matrix(source.ngens, target.ngens), check=False)

    @classmethod
    def identity(cls, group):
        return cls(group, group, identity(group.ngens), check=False)

    def __call__(self, x):
        if isinstance(x, ElementCoords):
            return ElementCoords(self.target, vec_mat(x.coords, self.matrix, self.target.ngens))
        return tuple(vec_mat(x, self.matrix, self.target.ngens))

    def compose(self, inner):
        """``self o inner``."""
        if not inner.target.same_presentation(self.source):
            raise NotComposable("target of inner map is not the source of the outer map")
        return FGAbHom(inner.source, self.target,
                       mat_mul(inner.matrix, self.matrix, self.target.ngens), check=False)

    def __neg__(self):
        return FGAbHom(self.source, self.target, [[-v for v in r] for r in self.matrix], check=False)

    def __add__(self, other):
        return FGAbHom(self.source, self.target,
                       [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)],
                       check=False)

    def is_zero(self):
        return all(self.target.is_zero(r) for r in self.matrix)

    def equals(self, other):
        return all(self.target.is_zero([a - b for a, b in zip(r, s)])
                   for r, s in zip(self.matrix, other.matrix))

    def smith_matrix(self):
        S, T = self.source, self.target
        return [list(T.smith(vec_mat(row, self.matrix, T.ngens))) for row in S._from]

    def _kernel_lattice(self):
        S, T = self.source, self.target
        ks, kt = S.smith_rank, T.smith_rank
        As = self.smith_matrix()
        stacked = [row[:] for row in As]
        stacked += [[d if j == i else 0 for j in range(kt)] for i, d in enumerate(T.mods) if d]
        if ks == 0:
            return []
        if kt == 0:
            return identity(ks)
        ker = left_kernel(stacked, kt)
        proj = [row[:ks] for row in ker]
        return hnf_basis(proj, ks) if proj else []

    def kernel(self):
        """``(Ker, embedding)`` with Ker presented on an HNF lattice basis."""
        S = self.source
        ks = S.smith_rank
        basis = self._kernel_lattice()
        rels = []
        for i, d in enumerate(S.mods):
            if d:
                target_vec = [d if j == i else 0 for j in range(ks)]
                coeffs = solve_left(basis, ks, target_vec)
                if coeffs is None:
                    raise IllFormedHom("torsion relation of the source is not in the kernel")
                rels.append(coeffs)
        K = FGAbGroup(len(basis), rels)
        emb = FGAbHom(K, S, [S.from_smith(b) for b in basis], check=False)
        return K, emb

    def image(self):
        """``(Im, embedding)``; Im is presented as source-smith-gens / kernel lattice."""
        S, T = self.source, self.target
        basis = self._kernel_lattice()
        Im = FGAbGroup(S.smith_rank, basis)
        emb = FGAbHom(Im, T, [vec_mat(r, self.matrix, T.ngens) for r in S._from], check=False)
        return Im, emb

    def cokernel(self):
        T = self.target
        C = FGAbGroup(T.ngens, list(T.relations) + [r for r in self.matrix])
        return C, FGAbHom(T, C, identity(T.ngens), check=False)

    def lift(self, y):
        """Some x with ``self(x) == y`` in the target, or None."""
        S, T = self.source, self.target
        kt = T.smith_rank
        ys = list(T.smith(y))
        if kt == 0:
            return tuple([0] * S.ngens)
        As = self.smith_matrix()
        stacked = As + [[d if j == i else 0 for j in range(kt)] for i, d in enumerate(T.mods) if d]
        sol = solve_left(stacked, kt, ys)
        if sol is None:
            return None
        return tuple(S.reduce(S.from_smith(sol[:S.smith_rank])))

    def is_injective(self):
        K, _ = self.kernel()
        return K.is_trivial

    def is_surjective(self):
        C, _ = self.cokernel()
        return C.is_trivial

    def is_isomorphism(self):
        return self.is_injective() and self.is_surjective()

    def dump(self):
        return "\n".join("  [" + " ".join(str(v) for v in r) + "]" for r in self.matrix)

    def __repr__(self):
        return f"FGAbHom({self.source.describe()} -> {self.target.describe()})"


# ---------------------------------------------------------------------------
# constructions

def group_from_presentation(gens, rels):
    return FGAbGroup(gens, rels)


def hom_kernel_image_cokernel(phi):
    K, k_emb = phi.kernel()
    Im, i_emb = phi.image()
    C, c_proj = phi.cokernel()
    return (K, k_emb), (Im, i_emb), (C, c_proj)


def multiplication_by(A, n):
    return FGAbHom(A, A, [[n if i == j else 0 for j in range(A.ngens)] for i in range(A.ngens)],
                   check=False)


def n_torsion(A, n):
    """``(A_n, embedding)``: kernel of multiplication by n on A."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return multiplication_by(A, n).kernel()


def mod_n(A, n):
    """``(A/n, projection)``: cokernel of multiplication by n on A."""
    if n < 1:
        raise ValueError("n must be >= 1")
    Q = FGAbGroup(A.ngens, list(A.relations) +
                  [[n if i == j else 0 for j in range(A.ngens)] for i in range(A.ngens)])
    return Q, FGAbHom(A, Q, identity(A.ngens), check=False)


def simplify(A):
    """``(S, to_S, from_S)`` with S the invariant-factor presentation of A."""
    S = FGAbGroup.from_invariants(A.invariants, A.free_rank)
    to_s = FGAbHom(A, S, A._to, check=False)
    from_s = FGAbHom(S, A, A._from, check=False)
    return S, to_s, from_s


def direct_sum(groups):
    n = sum(G.ngens for G in groups)
    rels = []
    off = 0
    for G in groups:
        for r in G.relations:
            rels.append([0] * off + list(r) + [0] * (n - off - G.ngens))
        off += G.ngens
    return FGAbGroup(n, rels)


def free_group(n):
    return FGAbGroup(n)


def pushforward(emb, sub_gens):
    """Images of subgroup generators under an embedding."""
    return [emb(g) for g in sub_gens]


@dataclass(frozen=True)
class InducedMaps:
    torsion: FGAbHom          # psi_n : A_n -> B_n
    cotorsion: FGAbHom        # psi/n : A/n -> B/n
    source_torsion_embedding: FGAbHom
    target_torsion_embedding: FGAbHom
    source_projection: FGAbHom
    target_projection: FGAbHom


def induced_maps(psi, n):
    An, iA = n_torsion(psi.source, n)
    Bn, iB = n_torsion(psi.target, n)
    rows = []
    for row in iA.matrix:
        v = vec_mat(row, psi.matrix, psi.target.ngens)
        y = iB.lift(v)
        if y is None:
            raise IllFormedHom("image of an n-torsion element is not n-torsion")
        rows.append(y)
    psi_n = FGAbHom(An, Bn, rows)
    Aq, pA = mod_n(psi.source, n)
    Bq, pB = mod_n(psi.target, n)
    psi_q = FGAbHom(Aq, Bq, psi.matrix)
    return InducedMaps(psi_n, psi_q, iA, iB, pA, pB)


def torsion_kernel_identity(psi, n):
    """Check ``Ker(psi_n) == (Ker psi)_n`` as subgroups of the source."""
    maps = induced_maps(psi, n)
    K1, e1 = maps.torsion.kernel()
    lhs = [maps.source_torsion_embedding(e1(g)) for g in identity(K1.ngens)]
    Kpsi, ek = psi.kernel()
    Kn, en = n_torsion(Kpsi, n)
    rhs = [ek(en(g)) for g in identity(Kn.ngens)]
    return psi.source.subgroups_equal(lhs, rhs)


def cotorsion_comparison(psi, n):
    """Compare ``(Ker psi)/n`` with ``Ker(psi/n)``.

    Returns ``(orders, comparison_is_iso)`` where the comparison map is the
    one induced by ``Ker psi -> source``.
    """
    maps = induced_maps(psi, n)
    Kq, eq = maps.cotorsion.kernel()
    Kpsi, ek = psi.kernel()
    Kpsi_q, _ = mod_n(Kpsi, n)
    rows = []
    for g in identity(Kpsi.ngens):
        v = ek(g)  # in source generators == source/n generators
        y = eq.lift(v)
        if y is None:
            raise IllFormedHom("kernel element does not land in Ker(psi/n)")
        rows.append(y)
    comp = FGAbHom(Kpsi_q, Kq, rows)
    return (Kpsi_q.order, Kq.order), comp.is_isomorphism()


@dataclass(frozen=True)
class ExactnessVerdict:
    node: int
    composition_zero: bool
    kernel_equals_image: bool
    kernel_order: object
    image_order: object

    @property
    def exact(self):
        return self.composition_zero and self.kernel_equals_image


def check_exact(seq):
    """Exactness verdict at every interior node of a chain of maps.

    Node i (1-based) is the target of ``seq[i-1]`` and the source of
    ``seq[i]``.
    """
    for f, g in zip(seq, seq[1:]):
        if not f.target.same_presentation(g.source):
            raise NotComposable("consecutive maps do not share a group")
    verdicts = []
    for i, (f, g) in enumerate(zip(seq, seq[1:]), start=1):
        M = f.target
        comp_zero = g.compose(f).is_zero()
        K, ek = g.kernel()
        ker_gens = [ek(r) for r in identity(K.ngens)]
        im_gens = [tuple(r) for r in f.matrix]
        equal = M.subgroups_equal(ker_gens, im_gens)
        verdicts.append(ExactnessVerdict(
            i, comp_zero, equal,
            M.subgroup_order(ker_gens), M.subgroup_order(im_gens)))
    return verdicts
