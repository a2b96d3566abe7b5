"""Finite fields F_p and F_{p^k} with exact, seeded, deterministic arithmetic.

Prime-field elements are plain ints in [0, p); extension elements are tuples
of length k holding the coefficients of the residue polynomial (ascending
powers of the generator).  Both forms are canonical, so == and hashing work.

All randomized subroutines (modulus search, equal-degree splitting) take
explicit seeds; nothing reads global RNG state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from . import _backend
from .errors import CompositeModulus, FieldMismatch

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n below 3.3e24."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Raw dense polynomial arithmetic over F_p.  Coefficient lists are ascending,
# trimmed (no trailing zeros); [] is the zero polynomial.  These run the hot
# univariate paths, so they work on lists of ints instead of UniPoly objects.
# ---------------------------------------------------------------------------


def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def _padd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % p
    return _trim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % p
    return _trim(out)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim([v % p for v in out])


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    if da < db:
        return [], _trim(a)
    inv = pow(b[-1], p - 2, p)
    q = [0] * (da - db + 1)
    for i in range(da - db, -1, -1):
        c = a[i + db] % p
        if c:
            c = c * inv % p
            q[i] = c
            for j in range(db + 1):
                a[i + j] = (a[i + j] - c * b[j]) % p
    return _trim(q), _trim(a)


def _pmod(a, b, p):
    return _pdivmod(a, b, p)[1]


def _pmonic(a, p):
    if not a:
        return []
    inv = pow(a[-1], p - 2, p)
    return [v * inv % p for v in a]


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return _pmonic(a, p)


def _pxgcd(a, b, p):
    """Extended gcd: returns (g, u, v) with u*a + v*b = g, g monic."""
    r0, r1 = list(a), list(b)
    u0, u1 = [1], []
    v0, v1 = [], [1]
    while r1:
        q, r = _pdivmod(r0, r1, p)
        r0, r1 = r1, r
        u0, u1 = u1, _psub(u0, _pmul(q, u1, p), p)
        v0, v1 = v1, _psub(v0, _pmul(q, v1, p), p)
    if r0:
        inv = pow(r0[-1], p - 2, p)
        r0 = [c * inv % p for c in r0]
        u0 = [c * inv % p for c in u0]
        v0 = [c * inv % p for c in v0]
    return r0, u0, v0


def _pmulmod(a, b, m, p):
    return _pmod(_pmul(a, b, p), m, p)


def _ppowmod(a, e, m, p):
    acc = [1]
    a = _pmod(a, m, p)
    while e:
        if e & 1:
            acc = _pmulmod(acc, a, m, p)
        a = _pmulmod(a, a, m, p)
        e >>= 1
    return acc


def _pcompose_mod(a, b, m, p):
    """a(b) mod m by Horner."""
    acc = []
    for c in reversed(a):
        acc = _pmulmod(acc, b, m, p)
        if c:
            acc = _padd(acc, [c], p)
    return acc


def _peval(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def _pderiv(a, p):
    return _trim([i * c % p for i, c in enumerate(a)][1:])


def _small_prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _pirreducible(f, p) -> bool:
    """Distinct-degree irreducibility test for monic f over F_p."""
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    xp = _ppowmod(x, p, f, p)
    frob = {1: xp}

    def frob_power(j):
        # x^(p^j) mod f by binary composition
        if j in frob:
            return frob[j]
        half = frob_power(j // 2)
        val = _pcompose_mod(half, half, f, p)
        if j % 2:
            val = _pcompose_mod(val, frob[1], f, p)
        frob[j] = val
        return val

    if _trim(_psub(frob_power(k), x, p)):
        return False
    for q in _small_prime_factors(k):
        g = _pgcd(_psub(frob_power(k // q), x, p), f, p)
        if len(g) - 1 != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Field contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldCtx:
    """A prime field (k == 1) or an extension F_{p^k} = F_p[t]/(modulus).

    ``modulus`` is the monic modulus as an ascending coefficient tuple of
    length k+1; it must be irreducible (verified on construction).
    """

    p: int
    k: int = 1
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise CompositeModulus(f"{self.p} is not prime")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if self.k == 1:
            if self.modulus is not None:
                raise ValueError("prime fields take no modulus")
        else:
            m = self.modulus
            if m is None or len(m) != self.k + 1 or m[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if any(not (0 <= c < self.p) for c in m):
                raise ValueError("modulus coefficients not reduced mod p")
            if not _pirreducible(list(m), self.p):
                raise CompositeModulus("modulus is reducible over F_p")

    # -- basic constants ----------------------------------------------------

    @property
    def order(self) -> int:
        return self.p**self.k

    def zero(self):
        return 0 if self.k == 1 else (0,) * self.k

    def one(self):
        return 1 if self.k == 1 else (1,) + (0,) * (self.k - 1)

    @cached_property
    def _redtable(self):
        # t^(k+i) mod modulus for i = 0..k-2, used to fold products
        k, p = self.k, self.p
        m = list(self.modulus)
        rows = []
        cur = [(-c) % p for c in m[:-1]]  # t^k
        rows.append(tuple(cur))
        for _ in range(k - 2):
            nxt = [0] + cur[:-1]
            lead = cur[-1]
            if lead:
                for i in range(k):
                    nxt[i] = (nxt[i] - lead * m[i]) % p
            else:
                nxt = [v % p for v in nxt]
            cur = nxt
            rows.append(tuple(cur))
        return tuple(rows)

    # -- element arithmetic ---------------------------------------------

    def element(self, v) -> object:
        """Canonicalize an int (prime subfield) or coefficient sequence."""
        if isinstance(v, int):
            v %= self.p
            return v if self.k == 1 else (v,) + (0,) * (self.k - 1)
        seq = [int(c) % self.p for c in v]
        if len(seq) > self.k:
            raise ValueError("element longer than extension degree")
        if self.k == 1:
            return seq[0] if seq else 0
        return tuple(seq) + (0,) * (self.k - len(seq))

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        if self.k == 1:
            return (a - b) % self.p
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        if self.k == 1:
            return -a % self.p
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p = self.p
        if self.k == 1:
            return a * b % p
        k = self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                prod[i + j] += x * y
        out = [v % p for v in prod[:k]]
        red = self._redtable
        for i in range(k, 2 * k - 1):
            c = prod[i] % p
            if c:
                row = red[i - k]
                for j in range(k):
                    out[j] = (out[j] + c * row[j]) % p
        return tuple(out)

    def scale(self, c: int, a):
        """Multiply by a prime-subfield scalar."""
        p = self.p
        c %= p
        if self.k == 1:
            return c * a % p
        return tuple(c * x % p for x in a)

    def inv(self, a):
        if self.k == 1:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, self.p - 2, self.p)
        lst = _trim(list(a))
        if not lst:
            raise ZeroDivisionError("inverse of zero")
        g, u, _ = _pxgcd(lst, list(self.modulus), self.p)
        if len(g) != 1:
            raise ZeroDivisionError("element not invertible")
        return self.element(u)

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.k == 1:
            return pow(a, e, self.p)
        acc = self.one()
        while e:
            if e & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            e >>= 1
        return acc

    def is_zero(self, a) -> bool:
        if self.k == 1:
            return a == 0
        return not any(a)

    def embed(self, a):
        """Image of a prime-field element in this field."""
        return self.element(int(a))

    def random_element(self, rng: random.Random):
        if self.k == 1:
            return rng.randrange(self.p)
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    # -- serialization ----------------------------------------------------

    def elem_to_jsonable(self, a):
        return a if self.k == 1 else list(a)

    def elem_from_jsonable(self, v):
        return self.element(v if isinstance(v, int) else list(v))

    def to_jsonable(self) -> dict:
        out = {"p": self.p, "k": self.k}
        if self.modulus is not None:
            out["modulus"] = list(self.modulus)
        return out

    @classmethod
    def from_jsonable(cls, d: dict) -> "FieldCtx":
        mod = d.get("modulus")
        return cls(d["p"], d.get("k", 1), tuple(mod) if mod else None)


def make_prime_field(p: int) -> FieldCtx:
    """F_p with deterministic primality validation."""
    return FieldCtx(p)


def make_extension(base: FieldCtx, k: int, seed: int) -> FieldCtx:
    """F_{p^k} over a prime base, modulus found by seeded random search."""
    if base.k != 1:
        raise FieldMismatch("extensions are built over prime fields")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    if k == 1:
        return base
    rng = random.Random(seed)
    p = base.p
    while True:
        cand = [rng.randrange(p) for _ in range(k)] + [1]
        if _pirreducible(cand, p):
            return FieldCtx(p, k, tuple(cand))


# ---------------------------------------------------------------------------
# Univariate polynomials over a FieldCtx
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial; coeffs ascending, trimmed, canonical."""

    ctx: FieldCtx
    coeffs: tuple

    @classmethod
    def make(cls, ctx: FieldCtx, coeffs) -> "UniPoly":
        vals = [ctx.element(c) for c in coeffs]
        while vals and ctx.is_zero(vals[-1]):
            vals.pop()
        return cls(ctx, tuple(vals))

    @classmethod
    def x(cls, ctx: FieldCtx) -> "UniPoly":
        return cls.make(ctx, [0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "UniPoly"):
        if self.ctx != other.ctx:
            raise FieldMismatch("polynomials over different contexts")

    def __add__(self, other):
        self._check(other)
        c = _glist(self)
        return _from_glist(self.ctx, _gadd(c, _glist(other), self.ctx))

    def __sub__(self, other):
        self._check(other)
        return _from_glist(self.ctx, _gsub(_glist(self), _glist(other), self.ctx))

    def __mul__(self, other):
        self._check(other)
        return _from_glist(self.ctx, _gmul(_glist(self), _glist(other), self.ctx))

    def __divmod__(self, other):
        self._check(other)
        q, r = _gdivmod(_glist(self), _glist(other), self.ctx)
        return _from_glist(self.ctx, q), _from_glist(self.ctx, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = self.ctx.inv(self.coeffs[-1])
        return UniPoly(self.ctx, tuple(self.ctx.mul(inv, c) for c in self.coeffs))

    def gcd(self, other: "UniPoly") -> "UniPoly":
        self._check(other)
        a, b = _glist(self), _glist(other)
        ctx = self.ctx
        while b:
            a, b = b, _gdivmod(a, b, ctx)[1]
        return _from_glist(ctx, a).monic()

    def derivative(self) -> "UniPoly":
        ctx = self.ctx
        out = [ctx.scale(i, c) for i, c in enumerate(self.coeffs)][1:]
        return UniPoly.make(ctx, out)

    def evaluate(self, x):
        ctx = self.ctx
        x = ctx.element(x) if isinstance(x, int) else x
        acc = ctx.zero()
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, x), c)
        return acc

    def lift(self, ctx: FieldCtx) -> "UniPoly":
        """Reinterpret a prime-field polynomial over an extension of same p."""
        if self.ctx.k != 1 or ctx.p != self.ctx.p:
            raise FieldMismatch("lift expects a prime-field polynomial")
        return UniPoly(ctx, tuple(ctx.embed(c) for c in self.coeffs))


def _glist(f: UniPoly) -> list:
    return list(f.coeffs)


def _from_glist(ctx, c) -> UniPoly:
    return UniPoly(ctx, tuple(c))


def _gtrim(c, ctx):
    while c and ctx.is_zero(c[-1]):
        c.pop()
    return c


def _gadd(a, b, ctx):
    n = max(len(a), len(b))
    z = ctx.zero()
    out = [z] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = ctx.add(out[i], v)
    return _gtrim(out, ctx)


def _gsub(a, b, ctx):
    n = max(len(a), len(b))
    z = ctx.zero()
    out = [z] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = ctx.sub(out[i], v)
    return _gtrim(out, ctx)


def _gmul(a, b, ctx):
    if not a or not b:
        return []
    z = ctx.zero()
    out = [z] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if ctx.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return _gtrim(out, ctx)


def _gdivmod(a, b, ctx):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    if da < db:
        return [], _gtrim(a, ctx)
    inv = ctx.inv(b[-1])
    z = ctx.zero()
    q = [z] * (da - db + 1)
    for i in range(da - db, -1, -1):
        c = ctx.mul(a[i + db], inv)
        if ctx.is_zero(c):
            continue
        q[i] = c
        for j in range(db + 1):
            a[i + j] = ctx.sub(a[i + j], ctx.mul(c, b[j]))
    return _gtrim(q, ctx), _gtrim(a, ctx)


def _gpowmod(a, e, m, ctx):
    acc = [ctx.one()]
    a = _gdivmod(a, m, ctx)[1]
    while e:
        if e & 1:
            acc = _gdivmod(_gmul(acc, a, ctx), m, ctx)[1]
        a = _gdivmod(_gmul(a, a, ctx), m, ctx)[1]
        e >>= 1
    return acc


# ---------------------------------------------------------------------------
# Factorization over F_p and root finding in F_{p^k}
# ---------------------------------------------------------------------------


def _squarefree_part(f, p):
    """Monic squarefree part of f over F_p (p larger than deg f)."""
    d = _pderiv(f, p)
    if not d:
        raise ValueError("polynomial is a p-th power; degree >= p unsupported")
    return _pmonic(_pdivmod(f, _pgcd(f, d, p), p)[0], p)


def _ddf(f, p):
    """Distinct-degree split of monic squarefree f: list of (factor, degree)."""
    out = []
    fcur = list(f)
    x = [0, 1]
    xp = _ppowmod(x, p, fcur, p)
    h = list(xp)  # x^(p^j) mod fcur, starting at j = 1
    j = 1
    while len(fcur) - 1 >= 2 * j:
        g = _pgcd(_psub(h, x, p), fcur, p)
        if len(g) > 1:
            out.append((g, j))
            fcur = _pmonic(_pdivmod(fcur, g, p)[0], p)
            if len(fcur) == 1:
                return out
            xp = _pmod(xp, fcur, p)
            h = _pmod(h, fcur, p)
        j += 1
        if len(fcur) - 1 < 2 * j:
            break
        h = _pcompose_mod(h, xp, fcur, p)
    if len(fcur) > 1:
        out.append((fcur, len(fcur) - 1))
    return out


def _eds(f, e, p, rng):
    """Cantor-Zassenhaus split of f (product of degree-e irreducibles), odd p."""
    n = len(f) - 1
    if n == e:
        return [f]
    exp = (p**e - 1) // 2
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        if not _trim(list(a)):
            continue
        w = _ppowmod(a, exp, f, p)
        g = _pgcd(_psub(w, [1], p), f, p)
        if 0 < len(g) - 1 < n:
            rest = _pdivmod(f, g, p)[0]
            return _eds(g, e, p, rng) + _eds(rest, e, p, rng)


def irreducible_factors(f: UniPoly, seed: int = 0) -> list[UniPoly]:
    """Monic irreducible factors (without multiplicity) of a prime-field poly."""
    ctx = f.ctx
    if ctx.k != 1:
        raise FieldMismatch("factorization implemented over prime fields")
    if f.degree < 1:
        return []
    p = ctx.p
    rng = random.Random(seed)
    sqf = _squarefree_part(list(f.coeffs), p)
    out = []
    for grp, e in _ddf(sqf, p):
        if len(grp) - 1 == e:
            out.append(grp)
        else:
            out.extend(_eds(grp, e, p, rng))
    out.sort(key=lambda c: (len(c), c))
    return [UniPoly.make(ctx, c) for c in out]


class _Frobenius:
    """Cached Frobenius data for one extension context."""

    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        self.p = ctx.p
        self.mod = list(ctx.modulus)
        self._pow = {1: _ppowmod([0, 1], ctx.p, self.mod, ctx.p)}

    def power(self, j: int):
        """t^(p^j) mod modulus."""
        if j == 0:
            return [0, 1]
        if j in self._pow:
            return self._pow[j]
        half = self.power(j // 2)
        val = _pcompose_mod(half, half, self.mod, self.p)
        if j % 2:
            val = _pcompose_mod(val, self._pow[1], self.mod, self.p)
        self._pow[j] = val
        return val

    def apply(self, a, j: int = 1):
        """a^(p^j) for an element a of ctx."""
        lst = _trim(list(a))
        return self.ctx.element(_pcompose_mod(lst, self.power(j), self.mod, self.p))


def _fp_nullspace(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Kernel basis of a small matrix over F_p (local, self-contained)."""
    buf = _backend.make_buffer([v for row in rows for v in row])
    rank = _backend.rref(buf, len(rows), ncols, p)
    pivots = []
    j = 0
    for i in range(rank):
        while j < ncols and not buf[i * ncols + j]:
            j += 1
        pivots.append(j)
        j += 1
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = -buf[i * ncols + free] % p
        basis.append(vec)
    return basis


def _subfield_basis(frob: _Frobenius, e: int) -> list:
    """F_p-basis of the fixed field of Frobenius^e inside ctx."""
    ctx = frob.ctx
    k, p = ctx.k, ctx.p
    phe = frob.power(e)
    cols = []
    cur = [1]
    cols.append(cur)
    for _ in range(k - 1):
        cur = _pmulmod(cur, phe, frob.mod, p)
        cols.append(cur)
    rows = []
    for i in range(k):  # rows of (A - I)^T gives same kernel as columns arranged
        row = []
        for j in range(k):
            c = cols[j][i] if i < len(cols[j]) else 0
            if i == j:
                c = (c - 1) % p
            row.append(c)
        rows.append(row)
    vecs = _fp_nullspace(rows, k, p)
    return [ctx.element(v) for v in vecs]


def _minimal_poly(frob: _Frobenius, z, bound: int):
    """Monic minimal polynomial of z over F_p, degree <= bound."""
    ctx = frob.ctx
    k, p = ctx.k, ctx.p
    pows = [ctx.one()]
    for _ in range(bound):
        pows.append(ctx.mul(pows[-1], z))
    for deg in range(1, bound + 1):
        rows = [list(pows[i]) for i in range(deg + 1)]
        # dependency c_0..c_deg with c_deg = 1: solve on transposed system
        vecs = _fp_nullspace([[rows[i][j] for i in range(deg + 1)] for j in range(k)], deg + 1, p)
        for v in vecs:
            if v[deg] % p:
                inv = pow(v[deg], p - 2, p)
                return [c * inv % p for c in v]
    raise ArithmeticError("minimal polynomial search failed")


def _one_root_in_ctx(g: list[int], ctx: FieldCtx, frob: _Frobenius, rng: random.Random):
    """One root in ctx of an irreducible prime-field g whose degree divides k."""
    p = ctx.p
    e = len(g) - 1
    if e == 1:
        return ctx.embed(-g[0] % p)
    if ctx.modulus is not None and list(ctx.modulus) == _pmonic(g, p):
        return ctx.element([0, 1])
    # locate the degree-e subfield, present it as F_p[x]/(mu), solve there
    basis = _subfield_basis(frob, e)
    if len(basis) != e:
        raise ArithmeticError("subfield dimension mismatch")
    while True:
        z = ctx.zero()
        for b in basis:
            z = ctx.add(z, ctx.scale(rng.randrange(p), b))
        mu = _minimal_poly(frob, z, e)
        if len(mu) - 1 == e:
            break
    sub = FieldCtx(p, e, tuple(mu))
    root_sub = _root_in_own_splitting(g, sub, rng)
    # map back: generator of sub corresponds to z
    out = ctx.zero()
    for c in reversed(root_sub):
        out = ctx.add(ctx.mul(out, z), ctx.embed(c))
    return out


def _root_in_own_splitting(g: list[int], K: FieldCtx, rng: random.Random):
    """A root of irreducible g (deg e = [K:F_p]) inside K, by CZ splitting."""
    e = len(g) - 1
    cur = [K.embed(c) for c in g]
    exp = (K.order - 1) // 2
    while len(cur) - 1 > 1:
        shift = K.random_element(rng)
        base = [shift, K.one()]
        w = _gpowmod(base, exp, cur, K)
        w = _gsub(w, [K.one()], K)
        h = _ggcd_monic(w, cur, K)
        dh = len(h) - 1
        if 0 < dh < len(cur) - 1:
            rest = _gdivmod(cur, h, K)[0]
            cur = h if dh <= len(rest) - 1 else rest
    inv = K.inv(cur[1])
    return K.neg(K.mul(cur[0], inv))


def _ggcd_monic(a, b, ctx):
    while b:
        a, b = b, _gdivmod(a, b, ctx)[1]
    if a:
        inv = ctx.inv(a[-1])
        a = [ctx.mul(inv, c) for c in a]
    return a


def _factor_multiplicity(f, g, p):
    m = 0
    while True:
        q, r = _pdivmod(f, g, p)
        if r:
            return f, m
        f = q
        m += 1


def find_roots(f: UniPoly, ctx: FieldCtx, seed: int = 0):
    """All roots of f in ctx with multiplicities, canonically ordered.

    Returns a tuple of (root, multiplicity) pairs.  f must be a nonzero
    polynomial over the prime subfield of ctx, or over ctx itself.
    """
    if f.is_zero():
        raise ValueError("zero polynomial has every element as a root")
    if f.ctx.p != ctx.p:
        raise FieldMismatch("root field has different characteristic")
    rng = random.Random(seed)
    if f.ctx.k == 1:
        found = _roots_prime_coeffs(f, ctx, rng)
    elif f.ctx == ctx:
        found = _roots_generic(f, ctx, rng)
    else:
        raise FieldMismatch("coefficients must lie in F_p or in ctx itself")
    found.sort(key=lambda rm: _sort_key(rm[0]))
    return tuple(found)


def _sort_key(elem):
    return (elem,) if isinstance(elem, int) else tuple(elem)


def _roots_prime_coeffs(f: UniPoly, ctx: FieldCtx, rng) -> list:
    p = ctx.p
    coeffs = [int(c) for c in f.coeffs]
    if ctx.k == 1 and p <= 64:
        out = []
        for r in range(p):
            if _peval(coeffs, r, p) == 0:
                rem, m = _factor_multiplicity(coeffs, [-r % p, 1], p)
                out.append((r, m))
        return out
    sqf = _squarefree_part(coeffs, p)
    out = []
    factors = []
    if ctx.k == 1:
        xq = _ppowmod([0, 1], p, sqf, p)
        lin = _pgcd(_psub(xq, [0, 1], p), sqf, p)
        if len(lin) > 1:
            factors = _eds(lin, 1, p, rng) if len(lin) - 1 > 1 else [lin]
    else:
        for g in _ddf(sqf, p):
            grp, e = g
            if ctx.k % e == 0:
                pieces = [grp] if len(grp) - 1 == e else _eds(grp, e, p, rng)
                factors.extend(pieces)
    frob = _Frobenius(ctx) if ctx.k > 1 else None
    for g in factors:
        _, mult = _factor_multiplicity(coeffs, g, p)
        e = len(g) - 1
        if ctx.k == 1:
            out.append((-g[0] % p, mult))
            continue
        r = _one_root_in_ctx(g, ctx, frob, rng)
        orbit = [r]
        for _ in range(e - 1):
            orbit.append(frob.apply(orbit[-1]))
        for r in orbit:
            out.append((r, mult))
    return out


def _roots_generic(f: UniPoly, ctx: FieldCtx, rng) -> list:
    """Roots of an extension-coefficient polynomial, in its own field."""
    if ctx.order <= 4096:
        out = []
        for tup in _all_elements(ctx):
            if ctx.is_zero(f.evaluate(tup)):
                m = 0
                cur = f
                lin = UniPoly.make(ctx, [ctx.neg(tup), ctx.one()])
                while True:
                    q, r = divmod(cur, lin)
                    if not r.is_zero():
                        break
                    cur, m = q, m + 1
                out.append((tup, m))
        return out
    coeffs = _glist(f)
    d = _gtrim([ctx.scale(i, c) for i, c in enumerate(coeffs)][1:], ctx)
    if not d:
        raise ValueError("derivative vanished; unsupported p-th power input")
    sqf = _gdivmod(coeffs, _ggcd_monic(list(coeffs), d, ctx), ctx)[0]
    xq = _gpowmod([ctx.zero(), ctx.one()], ctx.order, sqf, ctx)
    lin = _ggcd_monic(_gsub(xq, [ctx.zero(), ctx.one()], ctx), sqf, ctx)
    roots = _split_linear(lin, ctx, rng)
    out = []
    for r in roots:
        linp = [ctx.neg(r), ctx.one()]
        cur, m = coeffs, 0
        while True:
            q, rem = _gdivmod(cur, linp, ctx)
            if rem:
                break
            cur, m = q, m + 1
        out.append((r, m))
    return out


def _split_linear(f, ctx, rng) -> list:
    """Roots of a monic product of distinct linear factors over ctx, odd p."""
    deg = len(f) - 1
    if deg <= 0:
        return []
    if deg == 1:
        return [ctx.neg(f[0])]
    exp = (ctx.order - 1) // 2
    while True:
        a = ctx.random_element(rng)
        w = _gpowmod([a, ctx.one()], exp, f, ctx)
        w = _gsub(w, [ctx.one()], ctx)
        g = _ggcd_monic(w, f, ctx)
        if 0 < len(g) - 1 < deg:
            rest = _gdivmod(f, g, ctx)[0]
            return _split_linear(g, ctx, rng) + _split_linear(rest, ctx, rng)


def _all_elements(ctx):
    if ctx.k == 1:
        yield from range(ctx.p)
        return
    import itertools

    for tup in itertools.product(range(ctx.p), repeat=ctx.k):
        yield tup


def resultant(f: UniPoly, g: UniPoly):
    """Resultant of two univariate polynomials by the Euclidean PRS."""
    f._check(g)
    ctx = f.ctx
    a, b = _glist(f), _glist(g)
    if not a or not b:
        return ctx.zero()
    acc = ctx.one()
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            return ctx.mul(acc, ctx.pow(b[0], da))
        r = _gdivmod(a, b, ctx)[1]
        dr = len(r) - 1
        if (da * db) % 2:
            acc = ctx.neg(acc)
        acc = ctx.mul(acc, ctx.pow(b[-1], da - dr))
        if not r:
            return ctx.zero()
        a, b = b, r
