"""Verified Sigma-class groups and Sigma-unit lattices.

Class groups and unit generators are input certificates.  Everything that
can be checked exactly is checked: witness identities, Minkowski coverage,
unit supports, ranks, torsion order.  A bounded saturation sweep looks for
principal ideals the relation lattice fails to explain.
"""

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from math import factorial, gcd

import mpmath
import sympy
from mpmath import iv

from . import kernels
from .errors import (CoverageGap, NotAUnit, NotAnNthPower, NotSmooth,
                     PrecisionExhausted, RecoveryFailure, SaturationViolation, SolveFailure,
                     WitnessMismatch)
from .fgab import FGAbGroup, FGAbHom, mod_n, solve_left
from .nfield import FieldElement, IdealHNF, factor_rational_prime

DEFAULT_HEIGHT = 12
MAX_BOX_POINTS = 10 ** 6
DEFAULT_PRECISION = 64
DEFAULT_PRECISION_CEILING = 1024


def minkowski_bound(field):
    """Minkowski bound of the field as an mpmath float (80 digits)."""
    d = field.degree
    r2 = field.signature[1]
    with mpmath.workdps(80):
        return (mpmath.mpf(4) / mpmath.pi) ** r2 * mpmath.mpf(factorial(d)) / \
            mpmath.mpf(d) ** d * mpmath.sqrt(abs(field.discriminant))


def _prime_divisors(n):
    return sorted(int(q) for q in sympy.factorint(abs(int(n))))


class SigmaSet:
    """The finite primes of Sigma for one field (archimedean places implicit)."""

    def __init__(self, field, primes):
        self.field = field
        self.primes = list(primes)
        self._keys = {P: i for i, P in enumerate(self.primes)}
        self.rational_primes = sorted({P.p for P in self.primes})

    def __contains__(self, P):
        return P in self._keys

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


def _factor_supported(field, I, allowed_primes):
    """Valuations of I at every prime above the primes dividing its norm."""
    # valuations can cancel in N(I), so use the integral part and the denominator
    lat_norm = I.norm() * I.den ** field.degree
    ps = set(_prime_divisors(int(lat_norm))) | set(_prime_divisors(I.den))
    ps |= set(allowed_primes)
    out = []
    for p in sorted(ps):
        for P, _, _ in factor_rational_prime(field, p):
            v = P.ideal_valuation(I)
            if v:
                out.append((P, v))
    return out


def element_factorization(field, a, extra_primes=()):
    I = IdealHNF.from_generators(field, [a])
    return _factor_supported(field, I, extra_primes)


def _float_places(field):
    """Approximate complex roots, one per archimedean place (real first)."""
    if field.degree == 1:
        return [(0j, False)]
    coeffs = list(reversed(field.poly))
    with mpmath.workdps(30):
        roots = [complex(z) for z in mpmath.polyroots(coeffs, maxsteps=200, extraprec=60)]
    r1 = field.signature[0]
    order = sorted(roots, key=lambda z: abs(z.imag))
    real = [complex(z.real, 0) for z in order[:r1]]
    cplx = [z for z in order[r1:] if z.imag > 0]
    return [(z, False) for z in real] + [(z, True) for z in cplx]


def t2_reduced_basis(field, rows):
    """LLL-reduce lattice rows (integral-basis coordinates) for the T2 form."""
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix
    d = field.degree
    if d == 1:
        return [list(r) for r in rows]
    places = _float_places(field)
    emb = []
    for r in rows:
        pc = [float(c) for c in FieldElement(field, r).power_coords()]
        vals = []
        for z, is_cplx in places:
            s = sum(c * z ** k for k, c in enumerate(pc))
            if is_cplx:
                vals += [s.real * 2 ** 0.5, s.imag * 2 ** 0.5]
            else:
                vals.append(s.real)
        emb.append(vals)
    top = max(abs(v) for row in emb for v in row) or 1.0
    scale = 2 ** 30 / top
    aug = [[int(i == j) for j in range(d)] + [int(round(v * scale)) for v in emb[i]]
           for i in range(d)]
    red = DomainMatrix([[ZZ(v) for v in r] for r in aug], (d, 2 * d), ZZ).lll()
    U = [[int(v) for v in r[:d]] for r in red.to_Matrix().tolist()]
    return [[sum(U[i][k] * rows[k][j] for k in range(d)) for j in range(d)] for i in range(d)]


# ---------------------------------------------------------------------------

@dataclass
class ValidationEntry:
    check: str
    passed: bool
    detail: str = ""


class ClassGroupData:
    """Presentation of Cl_{K,Sigma} on a factor base, with witnesses."""

    def __init__(self, field, sigma, factor_base, relations, witnesses):
        self.field = field
        self.sigma = sigma
        self.factor_base = list(factor_base)
        self.relations = [list(map(int, r)) for r in relations]
        self.witnesses = list(witnesses)
        k = len(self.factor_base)
        if any(len(r) != k for r in self.relations):
            raise WitnessMismatch("relation length does not match the factor base")
        if len(self.witnesses) != len(self.relations):
            raise WitnessMismatch("one witness per relation is required")
        self.group = FGAbGroup(k, self.relations)
        self._index = {P: i for i, P in enumerate(self.factor_base)}
        self.report = []
        self._rng = random.Random(0)

    # validation -----------------------------------------------------------
    def exponent_vector(self, I):
        """Factor-base exponents of I, or None when I is not smooth."""
        vec = [0] * len(self.factor_base)
        for P, v in _factor_supported(self.field, I, ()):
            if P in self.sigma:
                continue
            i = self._index.get(P)
            if i is None:
                return None
            vec[i] = v
        return vec

    def verify_witnesses(self):
        for r, (row, alpha) in enumerate(zip(self.relations, self.witnesses)):
            if alpha.is_zero():
                raise WitnessMismatch(f"relation {r}: witness is zero")
            I = IdealHNF.from_generators(self.field, [alpha])
            vec = self.exponent_vector(I)
            if vec is None or vec != row:
                raise WitnessMismatch(
                    f"relation {r}: ({alpha}) has exponents {vec}, claimed {row}")
        self.report.append(ValidationEntry("witnesses", True, f"{len(self.relations)} relations"))

    def verify_coverage(self, bound=None):
        bound = minkowski_bound(self.field) if bound is None else bound
        limit = int(mpmath.floor(bound * (1 + mpmath.mpf(10) ** -40)))
        for p in sympy.primerange(2, limit + 1):
            for P, _, f in factor_rational_prime(self.field, int(p)):
                if p ** f <= limit and P not in self._index and P not in self.sigma:
                    raise CoverageGap(f"prime {P} of norm {p ** f} <= {limit} is missing")
        for P in self.factor_base:
            if P in self.sigma:
                raise CoverageGap(f"factor-base prime {P} lies in Sigma")
        self.report.append(ValidationEntry("minkowski_coverage", True, f"bound {limit}"))

    def saturation_sweep(self, height=DEFAULT_HEIGHT):
        """Every smooth element of the box must factor into the relation lattice."""
        if self.group.is_trivial:
            self.report.append(ValidationEntry("saturation", True,
                                               "vacuous: claimed group is trivial; "
                                               "completeness not proven"))
            return 0
        d = self.field.degree
        h = height
        while h > 0 and (2 * h + 1) ** d > MAX_BOX_POINTS:
            h -= 1
        primes = sorted({P.p for P in self.factor_base} | set(self.sigma.rational_primes))
        found = kernels.smooth_norms_in_box(self.field.regrep, h, primes)
        k = len(self.factor_base)
        checked = 0
        for x, _ in found:
            a = FieldElement(self.field, x)
            vec = self.exponent_vector(IdealHNF.from_generators(self.field, [a]))
            if vec is None:
                continue
            checked += 1
            if k and solve_left(self.relations, k, vec) is None:
                raise SaturationViolation(
                    f"({a}) has exponents {vec} outside the relation lattice")
        self.report.append(ValidationEntry("saturation", True,
                                           f"height {h}, {checked} smooth principal ideals; "
                                           "refutes only, completeness not proven"))
        return checked

    def validate(self, height=DEFAULT_HEIGHT):
        self.verify_witnesses()
        self.verify_coverage()
        self.saturation_sweep(height)
        return self

    # discrete logarithms ----------------------------------------------------
    def _smoothing_candidates(self, J, attempts=40):
        """Small elements of J: T2-reduced basis, then small combinations."""
        basis = t2_reduced_basis(self.field, [list(r) for r in J.rows])
        d = self.field.degree
        seen = set()
        for b in basis:
            seen.add(tuple(b))
            yield b
        span = 1 if d > 3 else 2
        combos = sorted(product(range(-span, span + 1), repeat=d),
                        key=lambda c: sum(abs(x) for x in c))
        for coeffs in combos[:729]:
            v = tuple(sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(d))
            if any(v) and v not in seen:
                seen.add(v)
                yield list(v)
        rng = self._rng
        for _ in range(attempts):
            coeffs = [rng.randint(-3, 3) for _ in range(d)]
            v = [sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(d)]
            if any(v):
                yield v

    def _smooth_cofactor(self, J):
        """``(beta, C)`` with ``(beta) = J*C`` and C smooth, J integral."""
        Jinv = J.inverse()
        for v in self._smoothing_candidates(J):
            beta = FieldElement(self.field, v, J.den)
            C = IdealHNF.from_generators(self.field, [beta]) * Jinv
            vec = self.exponent_vector(C)
            if vec is not None:
                return beta, C, vec
        raise NotSmooth(f"no smooth cofactor found for {J}")

    def class_vector(self, I):
        """Factor-base vector whose class equals [I] (smoothing if needed)."""
        vec = self.exponent_vector(I)
        if vec is not None:
            return vec
        _, _, cvec = self._smooth_cofactor(I)
        return [-v for v in cvec]

    def dlog(self, I):
        if self.group.is_trivial:
            return self.group.zero()
        return self.group.element(self.class_vector(I))

    def is_principal(self, I):
        return self.dlog(I).is_zero()

    def generator_from_vector(self, vec):
        """Product of witness powers whose ideal has factor-base exponents vec."""
        k = len(self.factor_base)
        if not any(vec):
            return self.field.one()
        coeffs = solve_left(self.relations, k, list(vec)) if self.relations else None
        if coeffs is None:
            raise SolveFailure(f"exponent vector {list(vec)} is not in the relation lattice")
        x = self.field.one()
        for c, alpha in zip(coeffs, self.witnesses):
            if c:
                x = x * alpha ** c
        return x

    def principal_generator(self, I):
        """x with (x) = I up to Sigma; I must have trivial class."""
        vec = self.exponent_vector(I)
        if vec is not None:
            x = self.generator_from_vector(vec)
        else:
            beta, C, cvec = self._smooth_cofactor(I)
            x = beta / self.generator_from_vector(cvec)
        self.verify_generator(x, I)
        return x

    def verify_generator(self, x, I):
        ratio = IdealHNF.from_generators(self.field, [x]) / I
        for P, v in _factor_supported(self.field, ratio, ()):
            if P not in self.sigma:
                raise SolveFailure(f"generator {x} differs from {I} at {P}")
        return True


def validate_class_group(data, height=DEFAULT_HEIGHT):
    data.validate(height)
    return data.group, data.report


def class_dlog(data, I):
    return data.dlog(I)


def principal_generator(data, I):
    return data.principal_generator(I)


# ---------------------------------------------------------------------------
# Sigma-units

@dataclass(frozen=True)
class UnitExponentVector:
    torsion: int
    free: tuple

    def as_list(self):
        return [self.torsion] + list(self.free)


def _c_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _c_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


class SUnitLattice:
    """``<zeta> x <u_1, ..., u_r>`` with exact verification."""

    def __init__(self, field, sigma, torsion, w, free, claimed_rank=None,
                 precision_ceiling=DEFAULT_PRECISION_CEILING):
        self.field = field
        self.sigma = sigma
        self.zeta = torsion
        self.w = int(w)
        self.free = list(free)
        self.rank = len(self.free)
        self.claimed_rank = claimed_rank
        self.precision_ceiling = precision_ceiling
        self.max_precision_used = 0
        r1, r2 = field.signature
        self.expected_rank = r1 + r2 - 1 + len(sigma)
        self._roots = {}
        self._gen_logs = {}
        self.report = []
        self.group = FGAbGroup(self.rank + 1, [[self.w] + [0] * self.rank])

    # validation -------------------------------------------------------------
    def validate(self):
        F = self.field
        bound = 2 * F.degree ** 2
        z = self.zeta
        k, cur = 1, z
        while not cur.is_one():
            cur = cur * z
            k += 1
            if k > bound:
                raise NotAUnit(f"torsion generator {z} has no order <= {bound}")
        if k != self.w:
            raise NotAUnit(f"torsion generator has order {k}, claimed {self.w}")
        for q in _prime_divisors(self.w) if self.w > 1 else []:
            if (z ** (self.w // q)).is_one():
                raise NotAUnit(f"torsion generator is not primitive at {q}")
        self.report.append(ValidationEntry("torsion_order", True, f"w = {self.w}"))
        self.report.append(ValidationEntry("torsion_maximal", True, self._check_torsion_maximal()))
        for u in self.free:
            self.check_unit(u)
        self.report.append(ValidationEntry("sigma_units", True, f"{self.rank} generators"))
        if self.rank != self.expected_rank:
            raise NotAUnit(f"rank {self.rank} differs from the Dirichlet rank {self.expected_rank}")
        if self.claimed_rank is not None and self.claimed_rank != self.rank:
            raise NotAUnit(f"claimed rank {self.claimed_rank} != {self.rank} generators")
        self.report.append(ValidationEntry("dirichlet_rank", True, f"rank {self.rank}"))
        self._check_independent()
        self.report.append(ValidationEntry("independence", True, "regulator matrix nonsingular"))
        return self

    def _check_torsion_maximal(self, prime_bound=5000):
        """Rule out a root of unity of order w*q in the field for every prime q.

        If zeta_m lies in the field then m | p^f - 1 for each prime of residue
        degree f above p, p not dividing m; one prime breaking this excludes m.
        """
        F = self.field
        d = F.degree
        witnesses = []
        for q in sympy.primerange(2, 2 * d + 2):
            m = self.w * q
            if d % int(sympy.totient(m)):
                continue
            for p in sympy.primerange(2, prime_bound):
                if m % p == 0 or F.discriminant % p == 0 or F.index % p == 0:
                    continue
                fs = [f for _, _, f in factor_rational_prime(F, p)]
                if any((p ** f - 1) % m for f in fs):
                    witnesses.append(f"{m} excluded at p = {p}")
                    break
            else:
                raise NotAUnit(f"could not exclude a root of unity of order {m}")
        return "; ".join(witnesses) or "no larger order fits the degree"

    def check_unit(self, u):
        if u.is_zero():
            raise NotAUnit("zero is not a unit")
        nm = u.norm()
        allowed = set(self.sigma.rational_primes)
        for q in _prime_divisors(nm.numerator) + _prime_divisors(nm.denominator):
            if q not in allowed:
                raise NotAUnit(f"{u} has norm {nm}, divisible by {q} outside Sigma")
        for P, v in element_factorization(self.field, u, allowed):
            if P not in self.sigma:
                raise NotAUnit(f"{u} has valuation {v} at {P} outside Sigma")
        return True

    def _check_independent(self):
        if self.rank == 0:
            return
        prec = min(DEFAULT_PRECISION, self.precision_ceiling)
        M = None
        while prec <= self.precision_ceiling:
            M = self._log_matrix(prec) or M
            if M is not None and _interval_solve(M, [iv.mpf(0)] * self.rank, prec) is not None:
                return
            prec *= 2
        # a regulator that vanishes to working precision means a real dependence;
        # anything else is undecided at this ceiling
        if M is not None and prec // 2 >= DEFAULT_PRECISION:
            with mpmath.workprec(prec):
                det = mpmath.det(mpmath.matrix([[x.mid for x in row] for row in M]))
            if abs(det) < mpmath.mpf(2) ** (-(prec // 4)):
                raise NotAUnit("free generators are multiplicatively dependent")
        raise PrecisionExhausted(
            f"independence of free generators undecided at precision {self.precision_ceiling}")

    # logarithmic embedding ----------------------------------------------------
    def _root_enclosures(self, prec):
        if prec in self._roots:
            return self._roots[prec]
        F = self.field
        d = F.degree
        if d == 1:
            self._roots[prec] = [((iv.mpf(0), iv.mpf(0)), False)]
            return self._roots[prec]
        coeffs = list(reversed(F.poly))
        with mpmath.workprec(prec + 40):
            roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=prec + 40)
            encl = []
            for z in roots:
                fz = mpmath.polyval(coeffs, z)
                dcoeffs = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
                dfz = mpmath.polyval(dcoeffs, z)
                rad = d * abs(fz) / abs(dfz) + mpmath.mpf(2) ** (-(prec + 30))
                encl.append((z, rad))
        # discs must be pairwise disjoint for the enclosures to separate the roots
        for i in range(d):
            for j in range(i + 1, d):
                if abs(encl[i][0] - encl[j][0]) <= encl[i][1] + encl[j][1]:
                    return None
        r1 = F.signature[0]
        order = sorted(range(d), key=lambda i: abs(mpmath.im(encl[i][0])))
        real = order[:r1]
        cplx = [i for i in order[r1:] if mpmath.im(encl[i][0]) > 0]
        places = []
        iv.prec = prec
        for i in real + cplx:
            z, rad = encl[i]
            re = iv.mpf([mpmath.re(z) - rad, mpmath.re(z) + rad])
            im = iv.mpf([mpmath.im(z) - rad, mpmath.im(z) + rad]) if i in cplx else \
                iv.mpf([-rad, rad])
            places.append(((re, im), i in cplx))
        self._roots[prec] = places
        return places

    def _log_vector(self, a, prec):
        """Interval log vector: r1+r2-1 archimedean coordinates, then Sigma valuations."""
        places = self._root_enclosures(prec)
        if places is None:
            return None
        iv.prec = prec
        pc = a.power_coords()
        out = []
        for (z, is_cplx) in places[:-1] if places else []:
            acc = (iv.mpf(0), iv.mpf(0))
            zp = (iv.mpf(1), iv.mpf(0))
            for c in pc:
                if c:
                    cc = iv.mpf(c.numerator) / c.denominator
                    acc = _c_add(acc, (cc * zp[0], cc * zp[1]))
                zp = _c_mul(zp, z)
            mag2 = acc[0] ** 2 + acc[1] ** 2
            if mag2.a <= 0:
                return None
            lg = iv.log(mag2)
            out.append(lg if is_cplx else lg / 2)
        for P in self.sigma:
            out.append(iv.mpf(P.element_valuation(a)))
        return out

    def _log_matrix(self, prec):
        key = prec
        if key not in self._gen_logs:
            rows = []
            for u in self.free:
                v = self._log_vector(u, prec)
                if v is None:
                    return None
                rows.append(v)
            self._gen_logs[key] = rows
        return self._gen_logs[key]

    # exponent recovery ------------------------------------------------------
    def torsion_exponent(self, q):
        cur = self.field.one()
        for a in range(self.w):
            if cur == q:
                return a
            cur = cur * self.zeta
        return None

    def build(self, exps):
        """Element with exponent vector ``(a, e_1, ..., e_r)``."""
        a, *es = list(exps)
        x = self.zeta ** (a % self.w) if self.w > 1 else self.field.one()
        for e, u in zip(es, self.free):
            if e:
                x = x * u ** e
        return x

    def _try(self, u, es):
        rest = self.field.one()
        for e, g in zip(es, self.free):
            if e:
                rest = rest * g ** e
        a = self.torsion_exponent(u / rest)
        if a is None:
            return None
        return UnitExponentVector(a, tuple(es))

    def recover(self, u):
        self.check_unit(u)
        if self.rank == 0:
            a = self.torsion_exponent(u)
            if a is None:
                raise RecoveryFailure(f"{u} is not a power of the torsion generator")
            return UnitExponentVector(a, ())
        prec = min(DEFAULT_PRECISION, self.precision_ceiling)
        while prec <= self.precision_ceiling:
            self.max_precision_used = max(self.max_precision_used, prec)
            M = self._log_matrix(prec)
            target = self._log_vector(u, prec) if M is not None else None
            sol = _interval_solve(M, target, prec) if target is not None else None
            if sol is not None:
                centre = [int(mpmath.nint(s.mid)) for s in sol]
                got = self._try(u, centre)
                if got is not None:
                    return got
                ranges = []
                for s, c in zip(sol, centre):
                    lo = int(mpmath.ceil(s.a))
                    hi = int(mpmath.floor(s.b))
                    cands = sorted(set(range(lo, hi + 1)) | {c - 1, c, c + 1})
                    ranges.append(cands if len(cands) <= 5 else [c - 1, c, c + 1])
                for es in product(*ranges):
                    got = self._try(u, list(es))
                    if got is not None:
                        return got
            prec *= 2
        raise PrecisionExhausted(f"exponent recovery for {u} failed at precision {self.precision_ceiling}")

    def coords(self, u):
        return self.recover(u).as_list()

    def is_nth_power(self, u, n):
        """``(True, v)`` with ``v**n == u``, or ``(False, None)``."""
        ex = self.recover(u)
        g = gcd(n, self.w)
        if any(e % n for e in ex.free) or ex.torsion % g:
            return False, None
        m = self.w // g
        b = 0
        if m > 1:
            b = (ex.torsion // g) * pow(n // g, -1, m) % m
        v = self.build([b] + [e // n for e in ex.free])
        if v ** n != u:
            raise NotAnNthPower(f"constructed root of {u} does not verify")
        return True, v

    def mod_n(self, n):
        return UnitsModN(self, n)

    def action_matrix(self, sigma):
        """Integer matrix of an automorphism on exponent coordinates (rows = images)."""
        rows = []
        rows.append(self.coords(sigma(self.zeta)))
        for u in self.free:
            rows.append(self.coords(sigma(u)))
        return rows


def _interval_solve(M, b, prec):
    """Solve ``x * M = b`` (rows of M are unknowns' coefficients) in intervals."""
    if M is None:
        return None
    n = len(M)
    if n == 0:
        return []
    iv.prec = prec
    # transpose: A x = b with A[i][j] = M[j][i]
    A = [[M[j][i] for j in range(n)] + [b[i]] for i in range(n)]
    for c in range(n):
        best, bestmag = None, None
        for r in range(c, n):
            x = A[r][c]
            if x.a > 0 or x.b < 0:
                mag = min(abs(x.a), abs(x.b))
                if best is None or mag > bestmag:
                    best, bestmag = r, mag
        if best is None:
            return None
        A[c], A[best] = A[best], A[c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    sol = [None] * n
    for r in range(n - 1, -1, -1):
        s = A[r][n]
        for j in range(r + 1, n):
            s = s - A[r][j] * sol[j]
        sol[r] = s / A[r][r]
    return sol


def recover_exponents(lattice, u):
    return lattice.recover(u)


def is_nth_power(lattice, u, n):
    return lattice.is_nth_power(u, n)


class UnitsModN:
    """``U / U^n`` with exponent coordinates and designated subgroups."""

    def __init__(self, lattice, n):
        self.lattice = lattice
        self.n = n
        self.group, self.projection = mod_n(lattice.group, n)

    def coords(self, u):
        return self.group.reduce(self.lattice.coords(u))

    def subgroup(self, elements):
        """``(generator coords, quotient group, projection to the quotient)``."""
        gens = [self.coords(u) for u in elements]
        src = FGAbGroup(len(gens))
        inc = FGAbHom(src, self.group, gens, check=False)
        Q, proj = inc.cokernel()
        return gens, Q, proj


def subgroup_mod_n_machinery(lattice, n, elements=()):
    m = UnitsModN(lattice, n)
    gens, Q, proj = m.subgroup(elements)
    return m.group, gens, Q
