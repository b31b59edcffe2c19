"""Exact arithmetic in a number field given by a monic integer polynomial.

Elements are integer vectors over a fixed integral basis B with a positive
denominator.  Ideals are integral lattices over B in Hermite normal form,
again with a denominator.  Polynomials are coefficient lists in ascending
degree.
"""

from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd

import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_from_int_poly

from .errors import (DivisionByZero, IndexDivisor, NotPrime, NotSmooth,
                     ValidationError)
from .fgab import determinant, hnf_basis, left_kernel, solve_left


def _lcm(a, b):
    return a // gcd(a, b) * b


def _content(vals):
    return reduce(gcd, vals, 0)


def _rat_inverse(M):
    """Inverse of a square rational matrix (Gauss-Jordan on Fractions)."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [x / p for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                q = A[r][c]
                A[r] = [x - q * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def _rat_vec_mat(v, M):
    n = len(M[0]) if M else 0
    out = [Fraction(0)] * n
    for a, row in zip(v, M):
        if a:
            for j, m in enumerate(row):
                if m:
                    out[j] += a * m
    return out


def _integerize(vec):
    """``(num, den)`` for a rational vector."""
    den = 1
    for x in vec:
        den = _lcm(den, Fraction(x).denominator)
    return [int(Fraction(x) * den) for x in vec], den


def _nullspace_mod_p(rows, p):
    """Basis of ``{x mod p : x * M == 0 mod p}`` as integer vectors."""
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix
    m = len(rows)
    if m == 0:
        return []
    K = GF(p)
    # left kernel of M == right kernel of M^T
    cols = len(rows[0])
    T = DomainMatrix([[K(rows[i][j] % p) for i in range(m)] for j in range(cols)], (cols, m), K)
    basis = T.nullspace().to_Matrix().tolist() if m else []
    return [[int(x) % p for x in vec] for vec in basis]


class NumberField:
    """K = Q[x]/(f) with integral basis B (rows over the power basis)."""

    def __init__(self, poly, basis=None, name="K", claimed_discriminant=None,
                 claimed_signature=None):
        poly = [int(c) for c in poly]
        while len(poly) > 1 and poly[-1] == 0:
            poly.pop()
        d = len(poly) - 1
        if d < 1 or poly[-1] != 1:
            raise ValidationError(f"{name}: defining polynomial must be monic of degree >= 1",
                                  [f"polynomial {poly}"])
        self.name = name
        self.poly = tuple(poly)
        self.degree = d
        x = sympy.Symbol("x")
        self._sympoly = sympy.Poly(list(reversed(poly)), x, domain="ZZ")
        if d > 1 and not self._sympoly.is_irreducible:
            raise ValidationError(f"{name}: defining polynomial is reducible",
                                  [str(self._sympoly.as_expr())])
        if basis is None:
            basis = [[int(i == j) for j in range(d)] for i in range(d)]
        self.basis = [[Fraction(v) for v in row] for row in basis]
        if len(self.basis) != d or any(len(r) != d for r in self.basis):
            raise ValidationError(f"{name}: integral basis must be {d} x {d}", [])
        try:
            self._basis_inv = _rat_inverse(self.basis)
        except DivisionByZero:
            raise ValidationError(f"{name}: integral basis is singular", []) from None
        self._power_cache = self._powers_of_theta(2 * d - 1)
        self.mult_table = self._build_table()
        self._check_ring_axioms()
        self.regrep = [[self.mult_table[i][k] for i in range(d)] for k in range(d)]
        one, den = _integerize(_rat_vec_mat([1] + [0] * (d - 1), self._basis_inv))
        if den != 1:
            raise ValidationError(f"{name}: 1 is not in the span of the basis", [])
        self._one = tuple(one)
        self.discriminant = determinant([[self._trace_from_table(self.mult_table[i][j])
                                          for j in range(d)] for i in range(d)])
        if claimed_discriminant is not None and int(claimed_discriminant) != self.discriminant:
            raise ValidationError(f"{name}: discriminant mismatch",
                                  [f"computed {self.discriminant} != claimed {claimed_discriminant}"])
        index = Fraction(1, 1) / abs(self._rational_det(self.basis))
        if index.denominator != 1:
            raise ValidationError(f"{name}: Z[theta] is not contained in the basis lattice", [])
        self.index = int(index)
        self.signature = self._signature()
        if claimed_signature is not None and tuple(claimed_signature) != self.signature:
            raise ValidationError(f"{name}: signature mismatch",
                                  [f"computed {self.signature} != claimed {tuple(claimed_signature)}"])
        self.supplied_primes = {}
        self._factor_cache = {}

    # construction helpers --------------------------------------------------
    def _powers_of_theta(self, top):
        d = self.degree
        f = self.poly
        pw = []
        cur = [1] + [0] * (d - 1) if d > 1 else [1]
        for _ in range(top + 1):
            pw.append(cur)
            # multiply by x and reduce by f
            nxt = [0] + cur[:-1] if d > 1 else [0]
            lead = cur[-1]
            if lead:
                nxt = [a - lead * c for a, c in zip(nxt, f[:d])]
            cur = nxt
        return pw

    def _poly_product(self, a, b):
        d = self.degree
        acc = [Fraction(0)] * d
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    t = ai * bj
                    for k, v in enumerate(self._power_cache[i + j]):
                        if v:
                            acc[k] += t * v
        return acc

    def _build_table(self):
        d = self.degree
        table = []
        for i in range(d):
            row = []
            for j in range(d):
                pv = self._poly_product(self.basis[i], self.basis[j])
                coords = _rat_vec_mat(pv, self._basis_inv)
                if any(c.denominator != 1 for c in coords):
                    raise ValidationError(f"{self.name}: basis does not span a ring",
                                          [f"b{i}*b{j} = {coords}"])
                row.append(tuple(int(c) for c in coords))
            table.append(row)
        return table

    def _check_ring_axioms(self):
        d = self.degree
        T = self.mult_table
        for i, j in product(range(d), repeat=2):
            if T[i][j] != T[j][i]:
                raise ValidationError(f"{self.name}: multiplication not commutative", [])
        for i, j, k in product(range(d), repeat=3):
            if self._mul_coords(T[i][j], self._unit_vec(k)) != self._mul_coords(self._unit_vec(i), T[j][k]):
                raise ValidationError(f"{self.name}: multiplication not associative", [])

    def _unit_vec(self, k):
        return tuple(int(i == k) for i in range(self.degree))

    @staticmethod
    def _rational_det(M):
        n = len(M)
        den = 1
        for row in M:
            for x in row:
                den = _lcm(den, Fraction(x).denominator)
        iM = [[int(Fraction(x) * den) for x in row] for row in M]
        return Fraction(determinant(iM), den ** n)

    def _trace_from_table(self, v):
        d = self.degree
        if not hasattr(self, "_basis_traces"):
            self._basis_traces = [sum(self.mult_table[i][k][i] for i in range(d)) for k in range(d)]
        return sum(a * t for a, t in zip(v, self._basis_traces))

    def _signature(self):
        if self.degree == 1:
            return (1, 0)
        r1 = self._sympoly.count_roots()
        return (r1, (self.degree - r1) // 2)

    # element plumbing ------------------------------------------------------
    def _mul_coords(self, a, b):
        d = self.degree
        T = self.mult_table
        acc = [0] * d
        for i, ai in enumerate(a):
            if not ai:
                continue
            Ti = T[i]
            for j, bj in enumerate(b):
                if bj:
                    t = ai * bj
                    for k, v in enumerate(Ti[j]):
                        if v:
                            acc[k] += t * v
        return tuple(acc)

    def mult_matrix(self, coords):
        """Integer matrix of y -> y*a for integral coordinates of a."""
        d = self.degree
        M = [[0] * d for _ in range(d)]
        for k, a in enumerate(coords):
            if a:
                R = self.regrep[k]
                for i in range(d):
                    for j in range(d):
                        if R[i][j]:
                            M[i][j] += a * R[i][j]
        return M

    def element(self, num, den=1):
        return FieldElement(self, num, den)

    def from_rational_coords(self, coords):
        num, den = _integerize(coords)
        return FieldElement(self, num, den)

    def from_power_basis(self, coeffs):
        """Element from rational coefficients over 1, theta, theta^2, ..."""
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > self.degree:
            red = [Fraction(0)] * self.degree
            for k, c in enumerate(coeffs):
                if c:
                    pw = self._power_cache[k] if k < len(self._power_cache) else \
                        (self.theta() ** k).power_coords()
                    for j, v in enumerate(pw):
                        red[j] += c * v
            coeffs = red
        coeffs = coeffs + [0] * (self.degree - len(coeffs))
        return self.from_rational_coords(_rat_vec_mat([Fraction(c) for c in coeffs], self._basis_inv))

    def one(self):
        return FieldElement(self, self._one)

    def zero(self):
        return FieldElement(self, [0] * self.degree)

    def rational(self, q):
        q = Fraction(q)
        return FieldElement(self, [q.numerator * c for c in self._one], q.denominator)

    def theta(self):
        return self.from_power_basis([0, 1] if self.degree > 1 else [0])

    def basis_elements(self):
        return [FieldElement(self, self._unit_vec(k)) for k in range(self.degree)]

    def random_element(self, rng, height):
        return FieldElement(self, [rng.randint(-height, height) for _ in range(self.degree)])

    def evaluate_poly(self, coeffs, x):
        acc = self.zero()
        for c in reversed(coeffs):
            acc = acc * x + self.rational(c)
        return acc

    # ideals ------------------------------------------------------------------
    def unit_ideal(self):
        return IdealHNF(self, [list(self._unit_vec(k)) for k in range(self.degree)])

    def principal_ideal(self, a):
        return IdealHNF.from_generators(self, [a])

    def ideal(self, generators):
        return IdealHNF.from_generators(self, generators)

    def factor_rational_prime(self, p):
        return factor_rational_prime(self, p)

    def __repr__(self):
        return f"NumberField({self.name}, f={list(self.poly)})"


class FieldElement:
    """``num / den`` over the integral basis, with ``gcd(num, den) == 1``."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den=1):
        num = [int(v) for v in num]
        den = int(den)
        if len(num) != field.degree:
            raise ValueError("coordinate vector has the wrong length")
        if den == 0:
            raise DivisionByZero("zero denominator")
        if den < 0:
            num, den = [-v for v in num], -den
        g = gcd(den, _content(num))
        if g > 1:
            num = [v // g for v in num]
            den //= g
        if not any(num):
            den = 1
        self.field = field
        self.num = tuple(num)
        self.den = den

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        den = _lcm(self.den, other.den)
        a, b = den // self.den, den // other.den
        return FieldElement(self.field, [a * x + b * y for x, y in zip(self.num, other.num)], den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-x for x in self.num], self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, self.field._mul_coords(self.num, other.num),
                            self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if not any(self.num):
            raise DivisionByZero("inverse of zero")
        M = self.field.mult_matrix(self.num)
        inv = _rat_inverse(M)
        y = _rat_vec_mat(self.field._one, inv)
        num, den = _integerize(y)
        return FieldElement(self.field, [v * self.den for v in num], den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # invariants ---------------------------------------------------------------
    def is_zero(self):
        return not any(self.num)

    def is_one(self):
        return self.den == 1 and self.num == self.field._one

    def is_integral(self):
        return self.den == 1

    def regular_matrix(self):
        """Rational matrix of multiplication by self."""
        M = self.field.mult_matrix(self.num)
        return [[Fraction(v, self.den) for v in row] for row in M]

    def norm(self):
        d = self.field.degree
        return Fraction(determinant(self.field.mult_matrix(self.num)), self.den ** d)

    def trace(self):
        return Fraction(self.field._trace_from_table(self.num), self.den)

    def power_coords(self):
        """Rational coefficients over the power basis."""
        return [x / self.den for x in _rat_vec_mat(self.num, self.field.basis)]

    def coords(self):
        return [Fraction(v, self.den) for v in self.num]

    def __repr__(self):
        if self.den == 1:
            return f"[{' '.join(map(str, self.num))}]"
        return f"[{' '.join(map(str, self.num))}]/{self.den}"

    def dump(self):
        pc = " ".join(str(c) for c in self.power_coords())
        return f"basis: {self!r}  power: ({pc})"


def element_arith(a, b, op):
    """Dispatch for add/mul/inv/norm/trace."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "norm":
        return a.norm()
    if op == "trace":
        return a.trace()
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------

class FieldAutomorphism:
    """Automorphism of K given by the image of theta."""

    __slots__ = ("field", "image", "matrix")

    def __init__(self, field, image):
        if not isinstance(image, FieldElement):
            image = FieldElement(field, image)
        self.field = field
        self.image = image
        fval = field.evaluate_poly(field.poly, image)
        if not fval.is_zero():
            raise ValidationError("automorphism image is not a root of the defining polynomial",
                                  [f"f({image}) = {fval}"])
        rows = []
        powers = [field.one()]
        for _ in range(field.degree - 1):
            powers.append(powers[-1] * image)
        for b in field.basis:
            acc = field.zero()
            for c, pw in zip(b, powers):
                if c:
                    acc = acc + pw * c
            if acc.den != 1:
                raise ValidationError("automorphism does not preserve the integral basis lattice",
                                      [f"image {acc}"])
            rows.append(list(acc.num))
        if determinant(rows) == 0:
            raise ValidationError("automorphism matrix is singular", [])
        self.matrix = rows
        for i, j in product(range(field.degree), repeat=2):
            bi, bj = field._unit_vec(i), field._unit_vec(j)
            lhs = self._apply_coords(field._mul_coords(bi, bj))
            rhs = field._mul_coords(self._apply_coords(bi), self._apply_coords(bj))
            if lhs != rhs:
                raise ValidationError("automorphism is not multiplicative", [f"basis pair {(i, j)}"])

    def _apply_coords(self, v):
        d = self.field.degree
        out = [0] * d
        for a, row in zip(v, self.matrix):
            if a:
                for j in range(d):
                    if row[j]:
                        out[j] += a * row[j]
        return tuple(out)

    def __call__(self, x):
        if isinstance(x, FieldElement):
            return FieldElement(self.field, self._apply_coords(x.num), x.den)
        if isinstance(x, IdealHNF):
            return IdealHNF(self.field, [self._apply_coords(r) for r in x.rows], x.den, check=False)
        raise TypeError("can only apply to elements and ideals")

    def compose(self, other):
        """``self o other``."""
        return FieldAutomorphism(self.field, self(other.image))

    def is_identity(self):
        return self.image == self.field.theta()

    def order(self, bound=64):
        k, cur = 1, self
        while not cur.is_identity():
            cur = self.compose(cur)
            k += 1
            if k > bound:
                raise ValidationError("automorphism order exceeds bound", [])
        return k

    def __eq__(self, other):
        return isinstance(other, FieldAutomorphism) and self.image == other.image

    def __hash__(self):
        return hash(self.image)


def apply_automorphism(sigma, a):
    return sigma(a)


# ---------------------------------------------------------------------------

class IdealHNF:
    """Fractional ideal ``L / den`` with L an integral lattice in HNF."""

    __slots__ = ("field", "rows", "den")

    def __init__(self, field, rows, den=1, check=True):
        d = field.degree
        rows = [[int(v) for v in r] for r in rows]
        H = hnf_basis(rows, d) if rows else []
        if len(H) != d:
            raise ValueError("ideal lattice is not of full rank")
        den = int(den)
        if den <= 0:
            raise ValueError("ideal denominator must be positive")
        g = gcd(den, _content([v for r in H for v in r]))
        if g > 1:
            H = [[v // g for v in r] for r in H]
            den //= g
        self.field = field
        self.rows = tuple(tuple(r) for r in H)
        self.den = den
        if check:
            for r in self.rows:
                for k in range(d):
                    prod_ = field._mul_coords(r, field._unit_vec(k))
                    if solve_left(H, d, prod_) is None:
                        raise ValueError("lattice is not closed under multiplication by O")

    @classmethod
    def from_generators(cls, field, gens):
        """O-module generated by field elements."""
        gens = [g if isinstance(g, FieldElement) else FieldElement(field, g) for g in gens]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            raise ValueError("zero ideal")
        den = reduce(_lcm, (g.den for g in gens), 1)
        rows = []
        for g in gens:
            v = [x * (den // g.den) for x in g.num]
            for k in range(field.degree):
                rows.append(field._mul_coords(v, field._unit_vec(k)))
        return cls(field, rows, den, check=False)

    # basic invariants ---------------------------------------------------------
    def is_integral(self):
        return self.den == 1

    def norm(self):
        num = 1
        for i, r in enumerate(self.rows):
            num *= r[i]
        return Fraction(num, self.den ** self.field.degree)

    def is_unit_ideal(self):
        return self.den == 1 and all(r[i] == 1 for i, r in enumerate(self.rows))

    def generators(self):
        return [FieldElement(self.field, r, self.den) for r in self.rows]

    def __eq__(self, other):
        return (isinstance(other, IdealHNF) and self.field is other.field
                and self.rows == other.rows and self.den == other.den)

    def __hash__(self):
        return hash((self.rows, self.den))

    def __repr__(self):
        body = "; ".join(" ".join(map(str, r)) for r in self.rows)
        return f"Ideal([{body}]" + (f"/{self.den})" if self.den != 1 else ")")

    # arithmetic ---------------------------------------------------------------
    def __mul__(self, other):
        F = self.field
        if isinstance(other, FieldElement):
            other = IdealHNF.from_generators(F, [other])
        rows = [F._mul_coords(a, b) for a in self.rows for b in other.rows]
        return IdealHNF(F, rows, self.den * other.den, check=False)

    def __add__(self, other):
        den = _lcm(self.den, other.den)
        a, b = den // self.den, den // other.den
        rows = [[a * v for v in r] for r in self.rows] + [[b * v for v in r] for r in other.rows]
        return IdealHNF(self.field, rows, den, check=False)

    def inverse(self):
        """``{x : x*I in O}`` via the Smith form of the stacked multiplication matrices."""
        from .fgab import smith_normal_form
        F = self.field
        d = F.degree
        W = [[] for _ in range(d)]
        for r in self.rows:
            M = F.mult_matrix(r)
            for i in range(d):
                W[i].extend(M[i])
        U, D, V = smith_normal_form(W)
        diag = [D[i][i] for i in range(d)]
        if any(v == 0 for v in diag):
            raise DivisionByZero("ideal is degenerate")
        L = reduce(_lcm, diag, 1)
        rows = [[(L // diag[i]) * u for u in U[i]] for i in range(d)]
        inv = IdealHNF(F, rows, L, check=False)
        if self.den != 1:
            inv = inv * F.rational(self.den)
        return inv

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.unit_ideal()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def contains(self, a):
        if not isinstance(a, FieldElement):
            a = FieldElement(self.field, a)
        # a in L/den  <=>  a*den in L
        if a.is_zero():
            return True
        scaled = [x * self.den for x in a.num]
        if any(v % a.den for v in scaled):
            return False
        target = [v // a.den for v in scaled]
        return solve_left([list(r) for r in self.rows], self.field.degree, target) is not None

    def contains_ideal(self, other):
        return all(self.contains(g) for g in other.generators())

    def valuation(self, P):
        if not isinstance(P, PrimeIdeal):
            raise NotPrime("valuation requires a PrimeIdeal")
        return P.ideal_valuation(self)

    def reduce_element(self, a):
        """Canonical representative of an integral element modulo an integral ideal."""
        x = list(a.num)
        for r_i, r in enumerate(self.rows):
            q = x[r_i] // r[r_i]
            if q:
                x = [xi - q * ri for xi, ri in zip(x, r)]
        return FieldElement(self.field, x)


def ideal_ops(I, J, op):
    if op == "product":
        return I * J
    if op == "norm":
        return I.norm()
    if op == "equals":
        return I == J
    if op == "contains_element":
        return I.contains(J)
    if op == "valuation_at_prime":
        return I.valuation(J)
    raise ValueError(f"unknown operation {op!r}")


class PrimeIdeal(IdealHNF):
    """Prime ideal ``(p, pi)`` with stored residue data."""

    __slots__ = ("p", "e", "f", "generator", "_tau")

    def __init__(self, field, p, generator, e=None, f=None, verify=False):
        if not isinstance(generator, FieldElement):
            generator = FieldElement(field, generator)
        base = IdealHNF.from_generators(field, [field.rational(p), generator])
        super().__init__(field, base.rows, base.den, check=False)
        self.p = p
        self.generator = generator
        nm = self.norm()
        if nm.denominator != 1:
            raise NotPrime("prime ideal must be integral")
        nm = int(nm)
        ff = 0
        while nm % p == 0:
            nm //= p
            ff += 1
        if nm != 1 or ff == 0:
            raise NotPrime(f"norm of ({p}, {generator}) is not a power of {p}")
        if f is not None and f != ff:
            raise NotPrime(f"residue degree {ff} does not match the claimed {f}")
        self.f = ff
        if verify:
            self._verify_residue_field()
        self._tau = self._anti_uniformizer()
        self.e = e if e is not None else self.element_valuation(field.rational(p))

    def _anti_uniformizer(self):
        F = self.field
        p = self.p
        # beta with beta * P in pO and beta not in pO
        M = F.mult_matrix(self.generator.num if self.generator.den == 1 else
                          [v * self.generator.den for v in self.generator.num])
        for vec in _nullspace_mod_p(M, p):
            if any(vec):
                return tuple(vec)
        raise NotPrime("no anti-uniformizer found")

    def _residue_positions(self):
        return [i for i, r in enumerate(self.rows) if r[i] != 1]

    def _reduce_mod(self, x):
        x = list(x)
        for i, r in enumerate(self.rows):
            q = x[i] // r[i]
            if q:
                x = [a - q * b for a, b in zip(x, r)]
        return x

    def _verify_residue_field(self):
        """O/P is a field: Frobenius is injective with one-dimensional fixed space."""
        F = self.field
        p = self.p
        pos = self._residue_positions()
        f = len(pos)
        if any(self.rows[i][i] != p for i in pos):
            raise NotPrime("quotient is not an F_p-vector space")
        frob = []
        for i in pos:
            b = FieldElement(F, F._unit_vec(i))
            img = self._reduce_mod((b ** p).num)
            frob.append([img[j] % p for j in pos])
        from sympy import GF
        from sympy.polys.matrices import DomainMatrix
        K = GF(p)
        A = DomainMatrix([[K(v) for v in row] for row in frob], (f, f), K)
        if A.rank() != f:
            raise NotPrime("residue ring is not reduced")
        I = DomainMatrix.eye(f, K)
        if (A - I).rank() != f - 1:
            raise NotPrime("residue ring is not a field")

    def element_valuation(self, a):
        if a.is_zero():
            raise DivisionByZero("valuation of zero")
        F = self.field
        p = self.p
        v = 0
        x = list(a.num)
        while True:
            y = F._mul_coords(x, self._tau)
            if any(c % p for c in y):
                break
            x = [c // p for c in y]
            v += 1
        d = a.den
        vp = 0
        while d % p == 0:
            d //= p
            vp += 1
        return v - vp * self.e if vp else v

    def ideal_valuation(self, I):
        vmin = min(self.element_valuation(g) for g in
                   (FieldElement(self.field, r) for r in I.rows))
        d = I.den
        vp = 0
        while d % self.p == 0:
            d //= self.p
            vp += 1
        return vmin - vp * self.e

    def valuation_of(self, x):
        if isinstance(x, IdealHNF):
            return self.ideal_valuation(x)
        return self.element_valuation(x)

    def __repr__(self):
        return f"Prime(p={self.p}, gen={self.generator}, e={self.e}, f={self.f})"


def _poly_to_element(field, coeffs):
    return field.from_power_basis([Fraction(c) for c in coeffs])


def factor_rational_prime(field, p):
    """``[(P, e, f), ...]`` with ``prod P^e == pO``."""
    if p in field._factor_cache:
        return field._factor_cache[p]
    if p in field.supplied_primes:
        result = [(P, P.e, P.f) for P in field.supplied_primes[p]]
    elif field.index % p == 0:
        raise IndexDivisor(f"{p} divides the index of Z[theta] in {field.name}")
    elif field.degree == 1:
        P = PrimeIdeal(field, p, field.rational(p), e=1, f=1)
        result = [(P, 1, 1)]
    else:
        desc = gf_from_int_poly(list(reversed(field.poly)), p)
        _, factors = gf_factor(desc, p, ZZ)
        result = []
        for g, e in factors:
            coeffs = [int(c) for c in reversed(g)]
            gen = _poly_to_element(field, coeffs)
            if gen.is_zero():
                gen = field.rational(p)
            P = PrimeIdeal(field, p, gen, e=int(e), f=len(coeffs) - 1)
            result.append((P, int(e), len(coeffs) - 1))
    if sum(e * f for _, e, f in result) != field.degree:
        raise NotPrime(f"sum of e*f over primes above {p} is not the degree")
    prod_ = field.unit_ideal()
    for P, e, _ in result:
        prod_ = prod_ * (P ** e)
    if prod_ != field.principal_ideal(field.rational(p)):
        raise NotPrime(f"product of primes above {p} is not {p}O")
    field._factor_cache[p] = result
    return result


def _prime_divisors(n):
    return sorted(int(q) for q in sympy.factorint(abs(int(n))))


def factor_ideal(I):
    """``{P: v}`` over primes dividing the norm (and denominator) of I."""
    F = I.field
    nm = I.norm()
    ps = set(_prime_divisors(nm.numerator)) | set(_prime_divisors(nm.denominator))
    out = []
    for p in sorted(ps):
        for P, _, _ in factor_rational_prime(F, p):
            v = P.ideal_valuation(I)
            if v:
                out.append((P, v))
    return out


def ideal_from_factorization(field, factors):
    acc = field.unit_ideal()
    for P, v in factors:
        acc = acc * (P ** v)
    return acc


# ---------------------------------------------------------------------------

class FieldEmbedding:
    """Embedding F -> K given by the image of F's generator."""

    def __init__(self, base, ext, image):
        if not isinstance(image, FieldElement):
            image = FieldElement(ext, image)
        self.base = base
        self.ext = ext
        self.image = image
        if base.degree > 1:
            val = ext.evaluate_poly(base.poly, image)
            if not val.is_zero():
                raise ValidationError("embedding image is not a root of the base polynomial",
                                      [f"f_F({image}) = {val}"])
        if ext.degree % base.degree:
            raise ValidationError("base degree does not divide extension degree", [])
        powers = [ext.one()]
        for _ in range(base.degree - 1):
            powers.append(powers[-1] * image)
        rows = []
        for b in base.basis:
            acc = ext.zero()
            for c, pw in zip(b, powers):
                if c:
                    acc = acc + pw * c
            if acc.den != 1:
                raise ValidationError("embedding does not map integers to integers", [])
            rows.append(list(acc.num))
        self.matrix = rows
        self.relative_degree = ext.degree // base.degree

    def __call__(self, a):
        if isinstance(a, FieldElement):
            d = self.ext.degree
            out = [0] * d
            for x, row in zip(a.num, self.matrix):
                if x:
                    for j in range(d):
                        out[j] += x * row[j]
            return FieldElement(self.ext, out, a.den)
        if isinstance(a, IdealHNF):
            return extend_ideal(self, a)
        raise TypeError("can only embed elements and ideals")

    def preimage(self, b):
        """The F-element mapping to b, or None when b is not in F."""
        sol = solve_left(self.matrix, self.ext.degree, list(b.num))
        if sol is None:
            return None
        return FieldElement(self.base, sol, b.den)

    def contraction(self, A):
        """``A cap F`` as an ideal of F."""
        dF, dK = self.base.degree, self.ext.degree
        stacked = [list(r) for r in self.matrix] + [[-v for v in r] for r in A.rows]
        ker = left_kernel(stacked, dK)
        proj = [r[:dF] for r in ker]
        return IdealHNF(self.base, proj, A.den, check=False)


def extend_ideal(emb, a):
    """``a O_K`` for an ideal a of the base field."""
    return IdealHNF.from_generators(emb.ext, [emb(g) for g in a.generators()])


def ideal_norm_to_base(emb, A):
    """Relative norm ideal, computed prime by prime."""
    acc = emb.base.unit_ideal()
    try:
        factors = factor_ideal(A)
    except IndexDivisor as exc:
        raise NotSmooth(str(exc)) from exc
    for P, v in factors:
        p_base = emb.contraction(P)
        base_primes = [Q for Q, _, _ in factor_rational_prime(emb.base, P.p) if Q == p_base]
        if not base_primes:
            raise NotSmooth(f"contraction of {P} is not a known prime")
        q = base_primes[0]
        rel_f = P.f // q.f
        acc = acc * (q ** (rel_f * v))
    return acc


def contraction(emb, A):
    return emb.contraction(A)
