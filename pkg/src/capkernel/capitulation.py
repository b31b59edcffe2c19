"""Capitulation kernels and the five-term exact sequence of a Galois covering.

For K/F Galois with group Delta of order n and Sigma containing every
ramified prime, the pipeline builds

    0 -> (U_F cap U_K^n)/U_F^n -> H1(Delta, mu_n) -> Ker j
      -> Psi/(U_F U_K^n) -> H2(Delta, mu_n)

with every map realized by an explicit formula and every node checked for
exactness.  Multiplicative unit data is carried in exponent coordinates
``(a, e_1, ..., e_r)`` over ``<zeta> x <u_1, ..., u_r>``.
"""

import random
from dataclasses import dataclass, field
from math import gcd

from .classunits import (ClassGroupData, SigmaSet, SUnitLattice, UnitsModN,
                         ValidationEntry, element_factorization)
from .cohom import (Cochain, FiniteGroup, GModule, cech_complex_split, cohomology,
                    induced_cohomology_map)
from .errors import (CapkernelError, ExactnessFailure, InternalOverflow, NotAnNthPower,
                     NotAUnit, PrecisionExhausted, ResolventDegenerate, ValidationError)
from .fgab import (FGAbGroup, FGAbHom, check_exact, direct_sum, identity, simplify)
from .nfield import (FieldAutomorphism, FieldElement, FieldEmbedding, IdealHNF,
                     NumberField, PrimeIdeal, factor_rational_prime,
                     ideal_norm_to_base)

RESOLVENT_RETRIES = 50
FUZZ_ROUNDS = 20


# ---------------------------------------------------------------------------
# covering datum

@dataclass
class CoveringDatum:
    name: str
    F: NumberField
    K: NumberField
    embedding: FieldEmbedding
    group: FiniteGroup
    automorphisms: list
    sigma_F: SigmaSet
    sigma_K: SigmaSet
    class_F: ClassGroupData
    class_K: ClassGroupData
    units_F: SUnitLattice
    units_K: SUnitLattice
    seed: int
    expectations: dict = field(default_factory=dict)
    validation: list = field(default_factory=list)

    @property
    def n(self):
        return self.group.order


class _Collector:
    """Runs validation steps and aggregates failures."""

    def __init__(self):
        self.entries = []
        self.failures = []

    def run(self, name, fn, *args):
        try:
            out = fn(*args)
        except (PrecisionExhausted, InternalOverflow):
            raise
        except (CapkernelError, ValueError, ArithmeticError) as exc:
            msg = f"{name}: {type(exc).__name__}: {exc}"
            self.entries.append(ValidationEntry(name, False, str(exc)))
            self.failures.append(msg)
            return None
        self.entries.append(ValidationEntry(name, True, ""))
        return out

    def stop_if_failed(self, what):
        if self.failures:
            raise ValidationError(f"fixture validation failed ({what})", list(self.failures))


def _element(field, coords):
    from .nfield import _integerize
    num, den = _integerize(coords)
    return FieldElement(field, num, den)


def _prime(field, spec):
    gen = _element(field, spec.generator)
    P = PrimeIdeal(field, spec.p, gen, verify=True)
    if field.index % spec.p:
        known = [Q for Q, _, _ in factor_rational_prime(field, spec.p)]
        for Q in known:
            if Q == P:
                return Q
        raise ValidationError(f"{P} is not a prime of {field.name} above {spec.p}", [str(P)])
    return P


def build_covering_datum(fx, options):
    c = _Collector()
    for which in ("F", "K"):
        if which not in fx.fields:
            raise ValidationError(f"missing [field {which}] section", [f"field {which}"])

    def make_field(which):
        blk = fx.fields[which]
        return NumberField(blk.polynomial, blk.basis or None, name=which,
                           claimed_discriminant=blk.discriminant,
                           claimed_signature=blk.signature)

    F = c.run("field F", make_field, "F")
    K = c.run("field K", make_field, "K")
    c.stop_if_failed("fields")

    def supplied(field, specs):
        by_p = {}
        for s in specs:
            P = PrimeIdeal(field, s.p, _element(field, s.generator), verify=True)
            by_p.setdefault(s.p, []).append(P)
        field.supplied_primes.update(by_p)
    c.run("primes F", supplied, F, fx.primes["F"])
    c.run("primes K", supplied, K, fx.primes["K"])

    if fx.embedding is None:
        raise ValidationError("missing [embedding] section", ["embedding"])
    emb = c.run("embedding", lambda: FieldEmbedding(F, K, _element(K, fx.embedding)))
    c.stop_if_failed("embedding")

    def make_group():
        if fx.table is None:
            raise ValidationError("missing galois table", [])
        G = FiniteGroup(fx.table)
        if G.order != emb.relative_degree:
            raise ValidationError(f"group order {G.order} != [K:F] = {emb.relative_degree}", [])
        if G.order < 2:
            raise ValidationError("the covering must have degree at least 2", [])
        return G
    G = c.run("galois group", make_group)

    def make_auts():
        auts = [FieldAutomorphism(K, _element(K, a)) for a in fx.automorphisms]
        if len(auts) != G.order:
            raise ValidationError("one automorphism per group element is required", [])
        if not auts[0].is_identity():
            raise ValidationError("automorphism 0 must be the identity", [])
        if len(set(auts)) != len(auts):
            raise ValidationError("automorphisms are not pairwise distinct", [])
        base_gen = emb(F.theta())
        for i, s in enumerate(auts):
            if s(base_gen) != base_gen:
                raise ValidationError(f"automorphism {i} moves the base field", [str(s.image)])
        for a in G.elements():
            for b in G.elements():
                if auts[G.mul(a, b)] != auts[a].compose(auts[b]):
                    raise ValidationError(f"automorphisms violate the table at {(a, b)}", [])
        return auts
    auts = c.run("automorphisms", make_auts) if G is not None else None
    c.stop_if_failed("galois")

    sigma_F = c.run("sigma F", lambda: SigmaSet(F, [_prime(F, s) for s in fx.sigma.F]))
    sigma_K = c.run("sigma K", lambda: SigmaSet(K, [_prime(K, s) for s in fx.sigma.K]))
    c.stop_if_failed("sigma")

    def check_sigma_above():
        want = set()
        for P in sigma_F:
            for Q, _, _ in factor_rational_prime(K, P.p):
                if emb.contraction(Q) == P:
                    want.add(Q)
        have = set(sigma_K.primes)
        if want != have:
            raise ValidationError("Sigma_K is not the set of primes above Sigma_F",
                                  [f"expected {sorted(map(repr, want))}"])
    c.run("sigma above", check_sigma_above)

    def check_ramification():
        n = G.order
        disc_ratio = K.discriminant // (F.discriminant ** n)
        if K.discriminant % (F.discriminant ** n):
            raise ValidationError("discriminant of K is not divisible by disc(F)^n", [])
        from .classunits import _prime_divisors
        bad = []
        for p in _prime_divisors(disc_ratio) if abs(disc_ratio) > 1 else []:
            for q, eq, _ in factor_rational_prime(F, p):
                for Q, eQ, _ in factor_rational_prime(K, p):
                    if emb.contraction(Q) == q and eQ // eq > 1 and q not in sigma_F:
                        bad.append(repr(q))
        r1F = F.signature[0]
        if r1F and K.signature[0] < n * r1F and fx.sigma.infinite_ramification != "allowed":
            bad.append("an undeclared ramified real place of F")
        if bad:
            raise ValidationError("ramified primes outside Sigma", sorted(set(bad)))
    c.run("ramification in sigma", check_ramification)

    def make_class(which, field_, sigma):
        blk = fx.classgroups[which]
        fb = [_prime(field_, s) for s in blk.primes]
        wits = [_element(field_, r.witness) for r in blk.relations]
        data = ClassGroupData(field_, sigma, fb, [r.exponents for r in blk.relations], wits)
        data.validate(options.height)
        return data
    cl_F = c.run("class group F", make_class, "F", F, sigma_F)
    cl_K = c.run("class group K", make_class, "K", K, sigma_K)

    def make_units(which, field_, sigma):
        blk = fx.units.get(which)
        if blk is None or blk.torsion is None:
            raise ValidationError(f"missing [units {which}] torsion generator", [])
        lat = SUnitLattice(field_, sigma, _element(field_, blk.torsion), blk.w,
                           [_element(field_, u) for u in blk.free], blk.rank,
                           precision_ceiling=options.precision_ceiling)
        return lat.validate()
    U_F = c.run("units F", make_units, "F", F, sigma_F)
    U_K = c.run("units K", make_units, "K", K, sigma_K)
    c.stop_if_failed("certificates")

    entries = list(c.entries)
    for tag, obj in (("class group F", cl_F), ("class group K", cl_K),
                     ("units F", U_F), ("units K", U_K)):
        entries += [ValidationEntry(f"{tag}: {e.check}", e.passed, e.detail) for e in obj.report]
    seed = options.seed if options.seed is not None else fx.seed
    return CoveringDatum(fx.name, F, K, emb, G, auts, sigma_F, sigma_K, cl_F, cl_K,
                         U_F, U_K, seed, dict(fx.expectations), entries)


# ---------------------------------------------------------------------------
# helpers

def ideal_from_vector(cl, vec):
    acc = cl.field.unit_ideal()
    for P, v in zip(cl.factor_base, vec):
        if v:
            acc = acc * (P ** v)
    return acc


def strip_sigma(I, sigma):
    """Remove the Sigma-part of a fractional ideal."""
    for P in sigma:
        v = P.ideal_valuation(I)
        if v:
            I = I * (P ** (-v))
    return I


def unit_module(cov):
    """``U_K`` as a Delta-module in exponent coordinates."""
    U = cov.units_K
    action = [U.action_matrix(s) for s in cov.automorphisms]
    return GModule(cov.group, U.group, action)


@dataclass
class RootsOfUnity:
    m: int                      # |mu_n(K)| = gcd(n, w)
    zeta: FieldElement          # generator of mu_n(K)
    module: GModule
    inclusion: FGAbHom          # mu_n -> U_K in exponent coordinates

    def coord(self, x, lattice):
        """Exponent of x in mu_n, or None when x is not in mu_n."""
        if self.m == 1:
            return 0 if x.is_one() else None
        a = lattice.torsion_exponent(x)
        step = lattice.w // self.m
        if a is None or a % step:
            return None
        return a // step


def roots_of_unity(cov):
    U = cov.units_K
    m = gcd(cov.n, U.w)
    step = U.w // m
    zeta = U.zeta ** step
    Mu = FGAbGroup.cyclic(m) if m > 1 else FGAbGroup.trivial()
    action = []
    for s in cov.automorphisms:
        if m == 1:
            action.append([])
            continue
        a = U.torsion_exponent(s(zeta))
        if a is None or a % step:
            raise NotAUnit("automorphism does not preserve mu_n")
        action.append([[a // step]])
    M = GModule(cov.group, Mu, action)
    rows = [[step] + [0] * U.rank] if m > 1 else []
    inc = FGAbHom(Mu, U.group, rows)
    return RootsOfUnity(m, zeta, M, inc)


# ---------------------------------------------------------------------------
# Ker j

@dataclass
class CapitulationResult:
    j: FGAbHom
    kernel: FGAbGroup
    embedding: FGAbHom                # Ker j -> Cl_F
    generator_vectors: list           # F factor-base vectors of invariant generators
    witnesses: list                   # x in K with a O_K = (x) up to Sigma
    killed_by_n: bool


def extension_matrix(cov):
    rows = []
    for P in cov.class_F.factor_base:
        A = cov.embedding(P)
        rows.append(list(cov.class_K.dlog(A).coords))
    return FGAbHom(cov.class_F.group, cov.class_K.group, rows)


def capitulation_kernel(cov):
    j = extension_matrix(cov)
    Kj, emb = j.kernel()
    S, _, from_s = simplify(Kj)
    vectors, witnesses = [], []
    for row in from_s.matrix:
        vec = list(cov.class_F.group.reduce(emb(row)))
        a = ideal_from_vector(cov.class_F, vec)
        x = cov.class_K.principal_generator(cov.embedding(a))
        vectors.append(vec)
        witnesses.append(x)
    killed = Kj.is_killed_by(cov.n)
    return CapitulationResult(j, Kj, emb, vectors, witnesses, killed)


# ---------------------------------------------------------------------------
# H1(Delta, U_K) and the comparison with Ker j

@dataclass
class ComparisonResult:
    h1: object                        # CohomologyGroup
    to_kernel: FGAbHom                # H1(U_K) -> Ker j
    is_isomorphism: bool
    orders_match: bool


def descend_cocycle(cov, values, rng):
    """Ideal class of F attached to a unit 1-cocycle via the resolvent."""
    K = cov.K
    for _ in range(RESOLVENT_RETRIES):
        theta = FieldElement(K, [rng.randint(-4, 4) for _ in range(K.degree)])
        b = K.zero()
        for d, s in enumerate(cov.automorphisms):
            b = b + values[d] * s(theta)
        if not b.is_zero():
            break
    else:
        raise ResolventDegenerate("resolvent vanished for every trial element")
    for d, s in enumerate(cov.automorphisms):
        if values[d] != b / s(b):
            raise ResolventDegenerate("resolvent does not split the cocycle")
    x = b.inverse()
    X = strip_sigma(IdealHNF.from_generators(K, [x]), cov.sigma_K)
    a = cov.embedding.contraction(X)
    if cov.embedding(a) != X:
        raise ResolventDegenerate("ideal of the resolvent does not descend")
    return a, x


def h1_units_and_comparison(cov, cap, rng):
    M = unit_module(cov)
    H1 = cohomology(M, 1)
    U = cov.units_K
    rows = []
    for z in identity(H1.group.ngens):
        c = H1.representative(z)
        values = [U.build(c.value(d)) for d in cov.group.elements()]
        a, _ = descend_cocycle(cov, values, rng)
        cls = cov.class_F.dlog(a)
        y = cap.embedding.lift(cls.coords)
        if y is None:
            raise ExactnessFailure("descended class is not in Ker j", node="comparison",
                                   witnesses={"ideal": repr(a)})
        rows.append(y)
    comp = FGAbHom(H1.group, cap.kernel, rows)
    iso = comp.is_isomorphism()
    return ComparisonResult(H1, comp, iso, H1.group.order == cap.kernel.order)


# ---------------------------------------------------------------------------
# units: term1 and Psi

@dataclass
class UnitTerms:
    UF_mod: UnitsModN
    UK_mod: UnitsModN
    restriction: FGAbHom              # U_F/n -> U_K/n
    term1: FGAbGroup
    term1_embedding: FGAbHom          # term1 -> U_F/n
    term1_enumeration_agrees: bool
    psi: FGAbGroup                    # Psi / U_K^n
    psi_embedding: FGAbHom            # -> U_K/n
    term4: FGAbGroup
    psi_is_everything: bool
    psi_contains_base: bool
    unit_index: object                # [U_K : U_F U_K^n]


def _unit_from_coords(lattice, coords):
    return lattice.build(list(coords))


def unit_terms(cov):
    n = cov.n
    UF, UK = cov.units_F, cov.units_K
    F_mod, K_mod = UF.mod_n(n), UK.mod_n(n)
    F_gens = [UF.zeta] + UF.free
    rows = [list(K_mod.coords(cov.embedding(g))) for g in F_gens]
    res = FGAbHom(F_mod.group, K_mod.group, rows)
    T1, t1_emb = res.kernel()

    # independent check: enumerate U_F/U_F^n and test n-th powers in K
    agrees = True
    for x in F_mod.group.elements():
        u = cov.embedding(_unit_from_coords(UF, x))
        is_pow, _ = UK.is_nth_power(u, n)
        if is_pow != K_mod.group.is_zero(res(x)):
            agrees = False
        if is_pow != F_mod.group.subgroup_contains(
                [t1_emb(g) for g in identity(T1.ngens)], x):
            agrees = False

    Q = K_mod.group
    M = unit_module(cov)
    blocks = []
    for s in cov.group.elements():
        A = M.action[s].matrix
        blocks.append([[int(i == j) - A[i][j] for j in range(Q.ngens)] for i in range(Q.ngens)])
    target = direct_sum([Q] * cov.group.order)
    phi_rows = [sum((blk[i] for blk in blocks), []) for i in range(Q.ngens)]
    phi = FGAbHom(Q, target, phi_rows)
    Psi, psi_emb = phi.kernel()
    lifted = []
    contains = True
    for r in rows:
        y = psi_emb.lift(r)
        if y is None:
            contains = False
            y = [0] * Psi.ngens
        lifted.append(list(y))
    T4 = FGAbGroup(Psi.ngens, list(Psi.relations) + lifted)
    everything = psi_emb.is_surjective()
    index_group = FGAbGroup(Q.ngens, list(Q.relations) + rows)
    return UnitTerms(F_mod, K_mod, res, T1, t1_emb, agrees, Psi, psi_emb, T4,
                     everything, contains, index_group.order)


def psi_group(cov):
    t = unit_terms(cov)
    return t.psi, t.psi_embedding, t.term4


def term1(cov):
    return unit_terms(cov).term1


# ---------------------------------------------------------------------------
# the four maps

def kummer_cocycle(cov, mu, v):
    """``c(delta) = delta(v)/v`` as a mu_n-valued 1-cochain."""
    vals = []
    for s in cov.automorphisms:
        q = s(v) / v
        k = mu.coord(q, cov.units_K)
        if k is None:
            raise NotAnNthPower(f"delta(v)/v = {q} is not an n-th root of unity")
        vals.append([k] if mu.m > 1 else [])
    return Cochain.from_function(mu.module, 1, lambda d: vals[d])


def map1_kummer(cov, units, mu, H1mu, rng=None, witness_shift=0):
    rows, witnesses = [], []
    n = cov.n
    for g in identity(units.term1.ngens):
        x = units.term1_embedding(g)
        u = cov.embedding(_unit_from_coords(cov.units_F, x))
        ok, v = cov.units_K.is_nth_power(u, n)
        if not ok:
            raise NotAnNthPower(f"{u} is not an n-th power in K")
        if witness_shift:
            v = v * mu.zeta ** witness_shift
        c = kummer_cocycle(cov, mu, v)
        rows.append(H1mu.class_of(c))
        witnesses.append((u, v))
    return FGAbHom(units.term1, H1mu.group, rows), witnesses


def map2_inclusion(cov, mu, H1mu, comparison):
    M = unit_module(cov)
    ind = induced_cohomology_map(mu.inclusion, mu.module, M, 1, HM=H1mu, HN=comparison.h1)
    return comparison.to_kernel.compose(ind)


def snake_unit(cov, vec, x=None, alpha=None):
    """``u = x^n / alpha`` for a capitulating class with F-vector vec."""
    n = cov.n
    a = ideal_from_vector(cov.class_F, vec)
    if x is None:
        x = cov.class_K.principal_generator(cov.embedding(a))
    if alpha is None:
        alpha = cov.class_F.generator_from_vector([n * v for v in vec])
    u = x ** n / cov.embedding(alpha)
    cov.units_K.check_unit(u)
    return u


def _psi_class(units, cov, u):
    q = units.UK_mod.coords(u)
    y = units.psi_embedding.lift(q)
    if y is None:
        raise ExactnessFailure("snake unit is not in Psi", node=3, witnesses={"u": repr(u)})
    return units.term4.reduce(y)


def map3_snake(cov, cap, units):
    rows, witnesses = [], []
    for g in identity(cap.kernel.ngens):
        vec = list(cov.class_F.group.reduce(cap.embedding(g)))
        u = snake_unit(cov, vec)
        rows.append(_psi_class(units, cov, u))
        witnesses.append(u)
    return FGAbHom(cap.kernel, units.term4, rows), witnesses


def transgression_cocycle(cov, mu, u, shifts=None):
    """``c(d, t) = b_d * d(b_t) / b_{dt}`` with ``b_d^n = d(u)/u``."""
    n = cov.n
    G = cov.group
    b = []
    for i, s in enumerate(cov.automorphisms):
        if i == 0:
            b.append(cov.K.one())
            continue
        ok, r = cov.units_K.is_nth_power(s(u) / u, n)
        if not ok:
            raise NotAnNthPower(f"delta(u)/u is not an n-th power for delta = {i}")
        b.append(r)
    if shifts is not None:
        b = [bi * mu.zeta ** k for bi, k in zip(b, shifts)]
    table = {}
    for d in G.elements():
        for t in G.elements():
            val = b[d] * cov.automorphisms[d](b[t]) / b[G.mul(d, t)]
            k = mu.coord(val, cov.units_K)
            if k is None or not (val ** n).is_one():
                raise ExactnessFailure("transgression value is not in mu_n", node=4,
                                       witnesses={"value": repr(val)})
            table[(d, t)] = [k] if mu.m > 1 else []
    return Cochain.from_function(mu.module, 2, lambda d, t: table[(d, t)])


def map4_transgression(cov, mu, units, H2mu):
    rows = []
    for g in identity(units.term4.ngens):
        q = units.psi_embedding(g)
        u = _unit_from_coords(cov.units_K, q)
        c = transgression_cocycle(cov, mu, u)
        rows.append(H2mu.class_of(c))
    return FGAbHom(units.term4, H2mu.group, rows)


# ---------------------------------------------------------------------------
# point-level identities

def rescores_check(cov):
    """``N_{K/F}(a O_K) == a^n`` and its class equals n times [a], per generator."""
    n = cov.n
    results = []
    for i, P in enumerate(cov.class_F.factor_base):
        N = ideal_norm_to_base(cov.embedding, cov.embedding(P))
        exact = N == P ** n
        cls = cov.class_F.dlog(N)
        want = cov.class_F.group.element([n * int(k == i) for k in range(len(cov.class_F.factor_base))])
        results.append(exact and cls == want)
    return all(results), results


def norm_unit_identity(cov):
    """``prod_delta delta(u) == u^n`` for every base-field unit generator."""
    out = []
    for g in [cov.units_F.zeta] + cov.units_F.free:
        u = cov.embedding(g)
        prod_ = cov.K.one()
        for s in cov.automorphisms:
            prod_ = prod_ * s(u)
        out.append(prod_ == u ** cov.n)
    return all(out), out


# ---------------------------------------------------------------------------
# well-definedness fuzzing

def _random_unit(lattice, rng, bound=2):
    coords = [rng.randrange(lattice.w)] + [rng.randint(-bound, bound) for _ in range(lattice.rank)]
    return lattice.build(coords)


def _smooth_element(cl, rng, tries=200):
    F = cl.field
    primes = {P.p for P in cl.factor_base} | set(cl.sigma.rational_primes)
    for _ in range(tries):
        b = FieldElement(F, [rng.randint(-3, 3) for _ in range(F.degree)])
        if b.is_zero():
            continue
        nm = abs(b.norm().numerator)
        for p in primes:
            while nm % p == 0:
                nm //= p
        if nm == 1:
            return b
    return F.one()


def fuzz_map3(cov, cap, units, map3, rng, rounds=FUZZ_ROUNDS):
    n = cov.n
    stable = True
    for gi, g in enumerate(identity(cap.kernel.ngens)):
        vec = list(cov.class_F.group.reduce(cap.embedding(g)))
        want = units.term4.reduce(map3.matrix[gi])
        for _ in range(rounds):
            beta = _smooth_element(cov.class_F, rng)
            a = ideal_from_vector(cov.class_F, vec) * beta
            A = cov.embedding(a)
            x = cov.class_K.principal_generator(A) * _random_unit(cov.units_K, rng)
            alpha = cov.class_F.principal_generator(a ** n) * _random_unit(cov.units_F, rng)
            u = x ** n / cov.embedding(alpha)
            cov.units_K.check_unit(u)
            got = _psi_class(units, cov, u)
            if not units.term4.is_zero([p - q for p, q in zip(got, want)]):
                stable = False
    return stable


def fuzz_map4(cov, mu, units, H2mu, map4, rng, rounds=FUZZ_ROUNDS):
    n = cov.n
    stable = True
    for gi, g in enumerate(identity(units.term4.ngens)):
        want = H2mu.group.reduce(map4.matrix[gi])
        q = units.psi_embedding(g)
        base = _unit_from_coords(cov.units_K, q)
        for _ in range(rounds):
            w = cov.embedding(_random_unit(cov.units_F, rng))
            t = _random_unit(cov.units_K, rng)
            u = base * w * t ** n
            shifts = [0] + [rng.randrange(mu.m) for _ in range(cov.n - 1)]
            c = transgression_cocycle(cov, mu, u, shifts)
            got = H2mu.class_of(c)
            if not H2mu.group.is_zero([p - r for p, r in zip(got, want)]):
                stable = False
    return stable


def fuzz_map1(cov, units, mu, H1mu, map1, rng, rounds=FUZZ_ROUNDS):
    if mu.m == 1:
        return True
    for _ in range(rounds):
        shifted, _ = map1_kummer(cov, units, mu, H1mu, witness_shift=rng.randrange(mu.m))
        if not shifted.equals(map1):
            return False
    return True


# ---------------------------------------------------------------------------
# the full sequence

@dataclass
class SequenceReport:
    name: str
    n: int
    seed: int
    terms: dict                       # name -> FGAbGroup
    maps: dict                        # name -> FGAbHom
    verdicts: list                    # ExactnessVerdict per node
    torsion_ok: dict                  # name -> killed by n
    cross_check: dict
    kernel_vs_psi: dict
    rescores: dict
    norm_identity: dict
    fuzzing: dict
    units: dict
    class_groups: dict
    kernel_witnesses: list
    cech: dict
    validation: list
    expectations: dict
    convention: str
    precision_used: int
    exact: bool

    def failures(self):
        out = []
        for v in self.verdicts:
            if not v.exact:
                out.append(f"node {v.node}")
        for k, ok in self.torsion_ok.items():
            if not ok:
                out.append(f"{k} not killed by n")
        for k, ok in self.cross_check.items():
            if ok is False:
                out.append(f"cross-check {k}")
        for k, ok in self.kernel_vs_psi.items():
            if ok is False:
                out.append(f"kernel_vs_psi {k}")
        if not self.rescores["ok"]:
            out.append("norm of extended classes")
        if not self.norm_identity["ok"]:
            out.append("norm-unit identity")
        for k, ok in self.fuzzing.items():
            if not ok:
                out.append(f"fuzzing {k}")
        for k, v in self.expectations.items():
            if not v["ok"]:
                out.append(f"expectation {k}")
        return out


TERM_NAMES = ("term1", "term2", "term3", "term4", "term5")


def _expectation_checks(cov, terms, extra):
    out = {}
    computed = {k: list(terms[k].invariants) for k in TERM_NAMES}
    computed["kernel"] = list(terms["term3"].invariants)
    computed["class_group_F"] = list(cov.class_F.group.invariants)
    computed["class_group_K"] = list(cov.class_K.group.invariants)
    computed.update(extra)
    for key, want in cov.expectations.items():
        got = computed.get(key)
        out[key] = {"expected": want, "computed": got, "ok": got == want}
    return out


def _cech_all(modules):
    out = {}
    for name, M in modules.items():
        res = cech_complex_split(M)
        out[name] = all(r.ok for r in res.values())
    return out


def verify_sequence(cov, strict=True, fuzz_rounds=FUZZ_ROUNDS):
    rng = random.Random(cov.seed)
    n = cov.n
    cap = capitulation_kernel(cov)
    mu = roots_of_unity(cov)
    H1mu = cohomology(mu.module, 1)
    H2mu = cohomology(mu.module, 2)
    comparison = h1_units_and_comparison(cov, cap, rng)
    units = unit_terms(cov)

    m1, m1_witnesses = map1_kummer(cov, units, mu, H1mu)
    m2 = map2_inclusion(cov, mu, H1mu, comparison)
    m3, m3_witnesses = map3_snake(cov, cap, units)
    m4 = map4_transgression(cov, mu, units, H2mu)
    zero_in = FGAbHom.zero(FGAbGroup.trivial(), units.term1)
    seq = [zero_in, m1, m2, m3, m4]
    verdicts = check_exact(seq)
    convention = "u = x^n/alpha; c = b_d d(b_t) / b_dt"
    if not all(v.exact for v in verdicts):
        flipped = check_exact([zero_in, m1, m2, -m3, -m4])
        if all(v.exact for v in flipped):
            verdicts, convention = flipped, "u = alpha/x^n; inverted transgression"

    terms = {"term1": units.term1, "term2": H1mu.group, "term3": cap.kernel,
             "term4": units.term4, "term5": H2mu.group}
    torsion_ok = {k: g.is_killed_by(n) for k, g in terms.items()}
    torsion_ok["kernel"] = cap.killed_by_n

    cross = {
        "h1_units_order_equals_kernel_order": comparison.orders_match,
        "h1_units_comparison_is_isomorphism": comparison.is_isomorphism,
        "term1_enumeration": units.term1_enumeration_agrees,
        "psi_contains_base_units": units.psi_contains_base,
    }
    kernel_vs_psi = {}
    if n % 2 == 1 and mu.m == 1:
        kernel_vs_psi = {
            "applies": True,
            "kernel_isomorphic_to_psi_quotient": m3.is_isomorphism(),
            "kernel_bounded_by_unit_index": (units.unit_index is not None and
                                             cap.kernel.order <= units.unit_index),
        }
    resc_ok, resc = rescores_check(cov)
    norm_ok, norms = norm_unit_identity(cov)
    fuzz = {
        "map1": fuzz_map1(cov, units, mu, H1mu, m1, rng, fuzz_rounds),
        "map3": fuzz_map3(cov, cap, units, m3, rng, fuzz_rounds),
        "map4": fuzz_map4(cov, mu, units, H2mu, m4, rng, fuzz_rounds),
    }
    cech = _cech_all({"mu_n": mu.module, "units_K": unit_module(cov)})
    extra = {
        "h1_units": list(comparison.h1.group.invariants),
        "w_K": [cov.units_K.w],
        "rank_K": [cov.units_K.rank],
        "unit_index": [units.unit_index] if units.unit_index is not None else None,
        "exact": "yes" if all(v.exact for v in verdicts) else "no",
    }
    expectations = _expectation_checks(cov, terms, extra)
    report = SequenceReport(
        name=cov.name, n=n, seed=cov.seed, terms=terms,
        maps={"map1": m1, "map2": m2, "map3": m3, "map4": m4, "j": cap.j},
        verdicts=verdicts, torsion_ok=torsion_ok, cross_check=cross, kernel_vs_psi=kernel_vs_psi,
        rescores={"ok": resc_ok, "per_generator": resc},
        norm_identity={"ok": norm_ok, "per_generator": norms},
        fuzzing=fuzz,
        units={"w_K": cov.units_K.w, "rank_K": cov.units_K.rank, "w_F": cov.units_F.w,
               "rank_F": cov.units_F.rank, "mu_n_order": mu.m,
               "psi_is_all_units": units.psi_is_everything,
               "unit_index": units.unit_index},
        class_groups={"F": cov.class_F.group, "K": cov.class_K.group},
        kernel_witnesses=list(zip(cap.generator_vectors, cap.witnesses)),
        cech=cech,
        validation=cov.validation,
        expectations=expectations,
        convention=convention,
        precision_used=max(cov.units_K.max_precision_used, cov.units_F.max_precision_used),
        exact=all(v.exact for v in verdicts),
    )
    report.map_witnesses = {"map1": m1_witnesses, "map3": m3_witnesses}
    fails = report.failures()
    if strict and fails:
        bad = next((v for v in verdicts if not v.exact), None)
        raise ExactnessFailure("; ".join(fails), node=bad.node if bad else None,
                               witnesses={"report": report})
    return report
