"""Cohomology of a finite group in degrees 0..2.

Cochains of degree i are functions on Delta^i, stored as one flat vector
over ``|Delta|^i`` copies of the module's generators, tuples taken in
``itertools.product`` order.  Two complexes are built on the same groups:
the inhomogeneous bar complex and the Cech complex of the split covering,
together with the explicit chain isomorphism between them.
"""

from dataclasses import dataclass
from itertools import product

from .errors import DegreeOutOfRange, NotEquivariant
from .fgab import (FGAbGroup, FGAbHom, direct_sum, identity, mat_mul, n_torsion,
                   vec_mat)

MAX_DEGREE = 3


class FiniteGroup:
    """Group law on labels ``0..n-1`` with 0 the identity."""

    __slots__ = ("order", "table", "inverse_table")

    def __init__(self, table):
        table = [list(map(int, r)) for r in table]
        n = len(table)
        if n == 0 or any(len(r) != n for r in table):
            raise ValueError("multiplication table must be a nonempty square")
        if any(not 0 <= v < n for r in table for v in r):
            raise ValueError("table entries must be labels 0..n-1")
        for a in range(n):
            if table[0][a] != a or table[a][0] != a:
                raise ValueError("label 0 is not the identity")
        inv = []
        for a in range(n):
            hits = [b for b in range(n) if table[a][b] == 0]
            if len(hits) != 1 or table[hits[0]][a] != 0:
                raise ValueError(f"element {a} has no two-sided inverse")
            inv.append(hits[0])
        for a, b, c in product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise ValueError(f"table is not associative at {(a, b, c)}")
        self.order = n
        self.table = tuple(tuple(r) for r in table)
        self.inverse_table = tuple(inv)

    @classmethod
    def cyclic(cls, n):
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse_table[a]

    def elements(self):
        return range(self.order)

    def element_order(self, a):
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def is_cyclic(self):
        return any(self.element_order(a) == self.order for a in self.elements())

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


class GModule:
    """An FGAbGroup with a left action; ``delta . x = x * action[delta]``."""

    __slots__ = ("group", "underlying", "action")

    def __init__(self, group, underlying, action, check=True):
        if len(action) != group.order:
            raise ValueError("need one action matrix per group element")
        self.group = group
        self.underlying = underlying
        self.action = [FGAbHom(underlying, underlying, A, check=check) for A in action]
        if check:
            self._verify()

    def _verify(self):
        M = self.underlying
        if not self.action[0].equals(FGAbHom.identity(M)):
            raise NotEquivariant("identity element does not act trivially")
        for a in self.group.elements():
            for b in self.group.elements():
                lhs = self.action[self.group.mul(a, b)]
                rhs = self.action[a].compose(self.action[b])
                if not lhs.equals(rhs):
                    raise NotEquivariant(f"action is not multiplicative at {(a, b)}")

    @classmethod
    def trivial(cls, group, underlying):
        return cls(group, underlying, [identity(underlying.ngens)] * group.order, check=False)

    def act(self, delta, x):
        return self.underlying.reduce(vec_mat(x, self.action[delta].matrix, self.underlying.ngens))

    def invariants(self):
        """``(M^Delta, embedding)`` as the kernel of ``x -> (delta.x - x)_delta``."""
        M = self.underlying
        n, g = self.group.order, M.ngens
        target = direct_sum([M] * n)
        rows = []
        for x in identity(g):
            row = []
            for d in self.group.elements():
                row += [a - b for a, b in zip(self.act(d, x), x)]
            rows.append(row)
        return FGAbHom(M, target, rows, check=False).kernel()

    def restrict(self, emb):
        """Induced module on a stable subgroup given by an embedding into M."""
        S = emb.source
        action = []
        for d in self.group.elements():
            rows = []
            for s in identity(S.ngens):
                v = self.act(d, emb(s))
                y = emb.lift(v)
                if y is None:
                    raise NotEquivariant("subgroup is not stable under the action")
                rows.append(y)
            action.append(rows)
        return GModule(self.group, S, action, check=False)

    def n_torsion(self, n):
        """``(M_n as a GModule, embedding into M)``."""
        Mn, emb = n_torsion(self.underlying, n)
        return self.restrict(emb), emb


def _tuples(n, i):
    return list(product(range(n), repeat=i))


def _index(n, t):
    k = 0
    for v in t:
        k = k * n + v
    return k


def cochain_group(M, i):
    return direct_sum([M.underlying] * (M.group.order ** i))


class Cochain:
    """Degree-i cochain Delta^i -> M with canonical values."""

    __slots__ = ("module", "degree", "vector")

    def __init__(self, module, degree, vector):
        if not 0 <= degree <= MAX_DEGREE:
            raise DegreeOutOfRange(f"degree {degree} outside 0..{MAX_DEGREE}")
        g = module.underlying.ngens
        size = module.group.order ** degree * g
        if len(vector) != size:
            raise ValueError("cochain vector has the wrong length")
        M = module.underlying
        vals = []
        for k in range(0, size, g) if g else ():
            vals.extend(M.reduce(vector[k:k + g]))
        self.module = module
        self.degree = degree
        self.vector = tuple(vals)

    @classmethod
    def from_function(cls, module, degree, fn):
        vec = []
        for t in _tuples(module.group.order, degree):
            vec.extend(fn(*t))
        return cls(module, degree, vec)

    def value(self, *t):
        g = self.module.underlying.ngens
        k = _index(self.module.group.order, t) * g
        return self.vector[k:k + g]

    def table(self):
        return {t: self.value(*t) for t in _tuples(self.module.group.order, self.degree)}

    def is_zero(self):
        return not any(self.vector)

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.vector == other.vector)

    def __hash__(self):
        return hash((self.degree, self.vector))

    def __add__(self, other):
        return Cochain(self.module, self.degree, [a + b for a, b in zip(self.vector, other.vector)])

    def __sub__(self, other):
        return Cochain(self.module, self.degree, [a - b for a, b in zip(self.vector, other.vector)])

    def dump(self):
        lines = [f"degree {self.degree} cochain"]
        for t, v in self.table().items():
            lines.append(f"  {t}: {list(v)}")
        return "\n".join(lines)

    def __repr__(self):
        return f"Cochain(degree={self.degree}, values={self.table()})"


# ---------------------------------------------------------------------------
# differentials

def _bar_values(M, i, val):
    """(dc) for a cochain given as a value function ``val(tuple) -> coords``."""
    G = M.group
    g = M.underlying.ngens
    out = []
    for t in _tuples(G.order, i + 1):
        acc = list(M.act(t[0], val(t[1:])))
        for j in range(1, i + 1):
            merged = t[:j - 1] + (G.mul(t[j - 1], t[j]),) + t[j + 1:]
            s = -1 if j % 2 else 1
            acc = [a + s * b for a, b in zip(acc, val(merged))]
        s = -1 if (i + 1) % 2 else 1
        acc = [a + s * b for a, b in zip(acc, val(t[:i]))]
        out.extend(acc)
    assert len(out) == G.order ** (i + 1) * g
    return out


def _cech_values(M, i, val):
    """Cech differential of the split complex in the same coordinates."""
    G = M.group
    out = []
    for t in _tuples(G.order, i + 1):
        g1 = t[0]
        gi = G.inv(g1)
        shifted = tuple(G.mul(gi, x) for x in t[1:])
        acc = list(M.act(g1, val(shifted)))
        for j in range(1, i + 2):
            s = -1 if j % 2 else 1
            acc = [a + s * b for a, b in zip(acc, val(t[:j - 1] + t[j:]))]
        out.extend(acc)
    return out


def _as_matrix(M, i, values_fn):
    G = M.group
    g = M.underlying.ngens
    n = G.order
    rows = []
    for t in _tuples(n, i):
        for k in range(g):
            def val(s, t=t, k=k):
                if s == t:
                    return [1 if j == k else 0 for j in range(g)]
                return [0] * g
            rows.append(values_fn(M, i, val))
    return rows


def _check_degree(i):
    if not 0 <= i < MAX_DEGREE:
        raise DegreeOutOfRange(f"differential out of degree {i} is not available")


def bar_differential(c):
    """Bar coboundary of a Cochain."""
    _check_degree(c.degree)
    M = c.module
    return Cochain(M, c.degree + 1, _bar_values(M, c.degree, lambda t: c.value(*t)))


def cech_differential(c):
    _check_degree(c.degree)
    M = c.module
    return Cochain(M, c.degree + 1, _cech_values(M, c.degree, lambda t: c.value(*t)))


def bar_differential_hom(M, i):
    _check_degree(i)
    return FGAbHom(cochain_group(M, i), cochain_group(M, i + 1),
                   _as_matrix(M, i, _bar_values), check=False)


def cech_differential_hom(M, i):
    _check_degree(i)
    return FGAbHom(cochain_group(M, i), cochain_group(M, i + 1),
                   _as_matrix(M, i, _cech_values), check=False)


# ---------------------------------------------------------------------------

class CohomologyGroup:
    """``H^i = Z^i / B^i`` presented on the generators of the cocycle group."""

    def __init__(self, module, degree, d_in, d_out):
        self.module = module
        self.degree = degree
        Z, z_emb = d_out.kernel()
        rels = list(Z.relations)
        if d_in is not None:
            for row in d_in.matrix:
                y = z_emb.lift(row)
                if y is None:
                    raise ValueError("coboundary is not a cocycle")
                rels.append(y)
        self.cocycles = Z
        self.cocycle_embedding = z_emb
        self.group = FGAbGroup(Z.ngens, rels)

    def class_of(self, cochain):
        """Coordinates of a cocycle's class; raises if it is not a cocycle."""
        y = self.cocycle_embedding.lift(list(cochain.vector))
        if y is None:
            raise ValueError("cochain is not a cocycle")
        return self.group.reduce(y)

    def representative(self, coords):
        return Cochain(self.module, self.degree, self.cocycle_embedding(list(coords)))

    def generator_representatives(self):
        """Cocycle representatives of the invariant-factor generators."""
        return [self.representative(g) for g in self.group.smith_generators()]

    def cohomology_class(self, cochain):
        return CohomologyClass(self.degree, cochain, self, self.class_of(cochain))

    def __repr__(self):
        return f"H^{self.degree} = {self.group.describe()}"


@dataclass(frozen=True)
class CohomologyClass:
    degree: int
    representative: Cochain
    parent: CohomologyGroup
    coords: tuple

    def is_zero(self):
        return self.parent.group.is_zero(self.coords)


def cohomology(M, i):
    """``H^i(Delta, M)`` from the bar complex, i in {0, 1, 2}."""
    if not 0 <= i <= 2:
        raise DegreeOutOfRange(f"cohomology in degree {i} is not supported")
    d_in = bar_differential_hom(M, i - 1) if i > 0 else None
    d_out = bar_differential_hom(M, i)
    return CohomologyGroup(M, i, d_in, d_out)


def cech_cohomology(M, i):
    if not 0 <= i <= 2:
        raise DegreeOutOfRange(f"cohomology in degree {i} is not supported")
    d_in = cech_differential_hom(M, i - 1) if i > 0 else None
    d_out = cech_differential_hom(M, i)
    return CohomologyGroup(M, i, d_in, d_out)


def check_equivariant(phi, M, N):
    for d in M.group.elements():
        for x in identity(M.underlying.ngens):
            lhs = N.act(d, phi(x))
            rhs = phi(M.act(d, x))
            if not N.underlying.is_zero([a - b for a, b in zip(lhs, rhs)]):
                raise NotEquivariant(f"map does not commute with element {d}")


def cochain_map(phi, M, N, i):
    """Apply a module map pointwise to degree-i cochains."""
    blocks = M.group.order ** i
    gm, gn = M.underlying.ngens, N.underlying.ngens
    rows = []
    for b in range(blocks):
        for r in phi.matrix:
            rows.append([0] * (b * gn) + list(r) + [0] * ((blocks - b - 1) * gn))
    assert len(rows) == blocks * gm
    return FGAbHom(cochain_group(M, i), cochain_group(N, i), rows, check=False)


def induced_cohomology_map(phi, M, N, i, HM=None, HN=None):
    """``H^i(Delta, M) -> H^i(Delta, N)`` induced by an equivariant ``phi``."""
    check_equivariant(phi, M, N)
    HM = HM or cohomology(M, i)
    HN = HN or cohomology(N, i)
    cm = cochain_map(phi, M, N, i)
    rows = []
    for z in identity(HM.group.ngens):
        c = HM.cocycle_embedding(z)
        rows.append(HN.class_of(Cochain(N, i, cm(c))))
    return FGAbHom(HM.group, HN.group, rows)


# ---------------------------------------------------------------------------
# Cech complex of the split covering

def cech_to_bar(M, i):
    """``Phi(s)(h1..hi) = s(h1, h1h2, ..., h1...hi)`` as a cochain-group map."""
    G = M.group
    g = M.underlying.ngens
    n = G.order
    C = cochain_group(M, i)
    rows = [[0] * C.ngens for _ in range(C.ngens)]
    for h in _tuples(n, i):
        acc, partial = 0, []
        for x in h:
            acc = G.mul(acc, x)
            partial.append(acc)
        src = _index(n, tuple(partial))
        dst = _index(n, h)
        for k in range(g):
            rows[src * g + k][dst * g + k] = 1
    return FGAbHom(C, C, rows, check=False)


def bar_to_cech(M, i):
    """Inverse of :func:`cech_to_bar`: ``c(g1, g1^-1 g2, ..., g_{i-1}^-1 g_i)``."""
    G = M.group
    g = M.underlying.ngens
    n = G.order
    C = cochain_group(M, i)
    rows = [[0] * C.ngens for _ in range(C.ngens)]
    for t in _tuples(n, i):
        prev, steps = 0, []
        for x in t:
            steps.append(G.mul(G.inv(prev), x))
            prev = x
        src = _index(n, tuple(steps))
        dst = _index(n, t)
        for k in range(g):
            rows[src * g + k][dst * g + k] = 1
    return FGAbHom(C, C, rows, check=False)


@dataclass
class CechComparison:
    degree: int
    cech: CohomologyGroup
    bar: CohomologyGroup
    comparison: FGAbHom        # Cech H^i -> bar H^i
    chain_map_commutes: bool
    inverse_is_inverse: bool
    is_isomorphism: bool

    @property
    def ok(self):
        return self.chain_map_commutes and self.inverse_is_inverse and self.is_isomorphism


def cech_complex_split(M, degrees=(0, 1, 2)):
    """Cech cohomology of the split covering and its comparison with the bar complex."""
    out = {}
    for i in degrees:
        phi = cech_to_bar(M, i)
        psi = bar_to_cech(M, i)
        C = cochain_group(M, i)
        # Phi . dCech == dBar . Phi
        phi_next = cech_to_bar(M, i + 1)
        lhs = cech_differential_hom(M, i)
        lhs = FGAbHom(C, cochain_group(M, i + 1), mat_mul(lhs.matrix, phi_next.matrix), check=False)
        rhs = FGAbHom(C, cochain_group(M, i + 1),
                      mat_mul(phi.matrix, bar_differential_hom(M, i).matrix), check=False)
        commutes = lhs.equals(rhs)
        inverse = phi.compose(psi).equals(FGAbHom.identity(C)) and \
            psi.compose(phi).equals(FGAbHom.identity(C))
        Hc = cech_cohomology(M, i)
        Hb = cohomology(M, i)
        rows = []
        for z in identity(Hc.group.ngens):
            c = Hc.cocycle_embedding(z)
            rows.append(Hb.class_of(Cochain(M, i, phi(c))))
        comp = FGAbHom(Hc.group, Hb.group, rows)
        out[i] = CechComparison(i, Hc, Hb, comp, commutes, inverse, comp.is_isomorphism())
    return out


def equalizer_kernel(M):
    """``Ker[F(p2) - F(p1)]`` on ``F(X) = M`` under the splitting."""
    d0 = cech_differential_hom(M, 0)
    return d0.kernel()


@dataclass(frozen=True)
class TorsionCompatibility:
    n: int
    left_order: object
    right_order: object
    equal: bool


def torsion_compatibility_check(M, n):
    """Compare ``H0(M_n)`` with ``H0(M)_n`` inside ``M_n``."""
    Mn, emb = M.n_torsion(n)
    inv_n, e1 = equalizer_kernel(Mn)
    left = [e1(g) for g in identity(inv_n.ngens)]
    inv, e2 = equalizer_kernel(M)
    tors, e3 = n_torsion(inv, n)
    right = []
    for g in identity(tors.ngens):
        y = emb.lift(e2(e3(g)))
        if y is None:
            raise ValueError("n-torsion invariant is not in M_n")
        right.append(y)
    A = Mn.underlying
    return TorsionCompatibility(n, A.subgroup_order(left), A.subgroup_order(right),
                                A.subgroups_equal(left, right))
