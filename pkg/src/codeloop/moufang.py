"""The code loop on the conjugacy class of sigma.

Loop elements are stored as canonical H3-coset data ``(xbits, t)``, the
coset of ``g^x u^t``.  Two products are available:

* the coset action ``a o b = rep(r_a * rho([r_b, sigma]))``, used for all
  arithmetic (scalar via ``TrialityGroup`` objects, batched via packed codes);
* ``conjugation_product``, which conjugates involutions ``sigma^g`` inside
  G x| S and serves as an independent oracle.

Batched routines work on *loop codes* ``x | t << n``.  Tables, permutations
and the exchange format use *table indices* instead: elements sorted by
(xbits read big-endian with x_1 most significant, then t), so that index 0
is the unit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable

import numpy as np

from .cubic import CubicSpace
from .errors import CapacityError, ContextError, ParseError, StructuralError
from .f2algebra import BitVec, iter_bits, reverse_bits
from .report import Report, rng_for
from .triality import RHO, SIGMA, Holomorph, TrialityGroup, core_N

TABLE_LIMIT = 1 << 10
FORCE_TABLE_LIMIT = 1 << 13
GAMMA_TABLE_LIMIT = 1 << 17
MOUFANG_BUDGET = 1 << 24
CHUNK = 1 << 18


@dataclass(frozen=True)
class LoopElement:
    xbits: BitVec
    t: int
    loop: "CodeLoop | None" = field(default=None, compare=False, repr=False)

    @property
    def code(self) -> int:
        return self.xbits.bits | self.t << self.xbits.length

    def __mul__(self, other: "LoopElement") -> "LoopElement":
        return self.loop.mul(self, other)

    def __str__(self) -> str:
        return f"({self.xbits or '-'}, {self.t})"


class CodeLoop:
    """The Moufang loop sigma^G of a triality group, of order 2^(n+1)."""

    def __init__(self, group: TrialityGroup):
        self.group = group
        self.n = group.n
        self.order = 1 << (self.n + 1)
        self._s = 1 << self.n

    @classmethod
    def from_space(cls, space: CubicSpace) -> "CodeLoop":
        return cls(TrialityGroup(space))

    @property
    def space(self) -> CubicSpace:
        return self.group.space

    def __repr__(self) -> str:
        label = f" {self.space.name}" if self.space.name else ""
        return f"<CodeLoop{label} order={self.order}>"

    # elements -------------------------------------------------------------

    def element(self, xbits, t: int = 0) -> LoopElement:
        if not isinstance(xbits, BitVec):
            xbits = BitVec(self.n, int(xbits))
        elif xbits.length != self.n:
            raise ContextError(f"xbits of length {xbits.length} in a loop with n={self.n}")
        return LoopElement(xbits, t & 1, self)

    def one(self) -> LoopElement:
        return self.element(0, 0)

    def s_elem(self) -> LoopElement:
        return self.element(0, 1)

    def basis(self, i: int) -> LoopElement:
        """x_{i+1} = sigma^{g_{i+1}}."""
        return self.element(1 << i, 0)

    def from_code(self, code: int) -> LoopElement:
        code = int(code)
        return self.element(code & (self._s - 1), code >> self.n)

    def elements(self) -> list[LoopElement]:
        """All elements in table order."""
        return [self.from_code(c) for c in self.table_order]

    def _own(self, *elems: LoopElement) -> None:
        for e in elems:
            if e.loop is not self and (e.loop is None or e.loop.group is not self.group):
                raise ContextError("element belongs to a different loop")

    # scalar arithmetic ----------------------------------------------------

    def lift(self, a: LoopElement):
        return self.group.coset_rep_element(a.xbits.bits, a.t)

    def gamma(self, b: LoopElement):
        """rho([r_b, sigma]): right multiplication by b as an element of G."""
        G = self.group
        return G.apply(RHO, G.bracket_sigma(self.lift(b)))

    def mul(self, a: LoopElement, b: LoopElement) -> LoopElement:
        self._own(a, b)
        x, t = self.group.canonical_coset_rep(self.group.mul(self.lift(a), self.gamma(b)))
        return self.element(x, t)

    def _in_a(self, e: LoopElement, what: str) -> int:
        if e.xbits.bits:
            raise StructuralError(f"{what} {e} lies outside {{one, s}}")
        return e.t

    def inv(self, a: LoopElement) -> LoopElement:
        if self._in_a(self.mul(a, a), "square"):
            return self.mul(a, self.s_elem())
        return a

    def power(self, a: LoopElement, k: int) -> LoopElement:
        if k < 0:
            return self.power(self.inv(a), -k)
        sq = self.mul(a, a)
        self._in_a(sq, "square")
        # a^2 is central of order <= 2, so a^k = a^(k mod 2) (a^2)^(k div 2)
        base = a if k % 2 else self.one()
        return self.mul(base, sq) if (k // 2) % 2 else base

    def ldiv(self, y: LoopElement, a: LoopElement) -> LoopElement:
        """The unique d with y o d = a."""
        for t in (0, 1):
            d = self.element(y.xbits.bits ^ a.xbits.bits, t)
            if self.mul(y, d) == a:
                return d
        raise StructuralError(f"no left quotient {y} \\ {a} over the xbits sum")

    def rdiv(self, a: LoopElement, x: LoopElement) -> LoopElement:
        """The unique d with d o x = a."""
        for t in (0, 1):
            d = self.element(a.xbits.bits ^ x.xbits.bits, t)
            if self.mul(d, x) == a:
                return d
        raise StructuralError(f"no right quotient {a} / {x} over the xbits sum")

    def commutator(self, a: LoopElement, b: LoopElement) -> LoopElement:
        """The unique d with (b o a) o d = a o b."""
        return self.ldiv(self.mul(b, a), self.mul(a, b))

    def associator(self, a: LoopElement, b: LoopElement, c: LoopElement) -> LoopElement:
        left = self.mul(self.mul(a, b), c)
        right = self.mul(a, self.mul(b, c))
        return self.mul(self.inv(left), right)

    # batched arithmetic on loop codes ------------------------------------

    def _lift_codes(self, a):
        a = np.asarray(a, dtype=np.int64)
        n = self.n
        return (a & (self._s - 1)) | ((a >> n) << 3 * n)

    @cached_property
    def _gamma_table(self) -> np.ndarray:
        G = self.group
        lifts = self._lift_codes(np.arange(self.order, dtype=np.int64))
        return G.apply_codes(RHO, G.bracket_sigma_codes(lifts))

    def _gamma_codes(self, b):
        b = np.asarray(b, dtype=np.int64)
        if self.order <= GAMMA_TABLE_LIMIT:
            return self._gamma_table[b]
        G = self.group
        return G.apply_codes(RHO, G.bracket_sigma_codes(self._lift_codes(b)))

    def mul_codes(self, a, b) -> np.ndarray:
        G = self.group
        prod = G.mul_codes(self._lift_codes(a), self._gamma_codes(b))
        x, t = G.coset_rep_codes(prod)
        return x | (t << self.n)

    def square_codes(self, a) -> np.ndarray:
        return self.mul_codes(a, a)

    def _check_in_a(self, c, what: str) -> None:
        bad = np.nonzero(np.asarray(c) & (self._s - 1))[0]
        if bad.size:
            raise StructuralError(f"{what} {self.from_code(np.asarray(c)[bad[0]])} lies outside {{one, s}}")

    def inv_codes(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        sq = self.square_codes(a)
        self._check_in_a(sq, "square")
        return np.where(sq == 0, a, self.mul_codes(a, self._s))

    def ldiv_codes(self, y, a) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        a = np.asarray(a, dtype=np.int64)
        d = (y ^ a) & (self._s - 1)
        ok0 = self.mul_codes(y, d) == a
        d = np.where(ok0, d, d | self._s)
        if not (ok0 | (self.mul_codes(y, d) == a)).all():
            raise StructuralError("left division failed over the xbits sum")
        return d

    def rdiv_codes(self, a, x) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        x = np.asarray(x, dtype=np.int64)
        d = (a ^ x) & (self._s - 1)
        ok0 = self.mul_codes(d, x) == a
        d = np.where(ok0, d, d | self._s)
        if not (ok0 | (self.mul_codes(d, x) == a)).all():
            raise StructuralError("right division failed over the xbits sum")
        return d

    def commutator_codes(self, a, b) -> np.ndarray:
        return self.ldiv_codes(self.mul_codes(b, a), self.mul_codes(a, b))

    def associator_codes(self, a, b, c) -> np.ndarray:
        left = self.mul_codes(self.mul_codes(a, b), c)
        right = self.mul_codes(a, self.mul_codes(b, c))
        return self.mul_codes(self.inv_codes(left), right)

    def random_codes(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.integers(0, self.order, count, dtype=np.int64)

    # table order ----------------------------------------------------------

    @cached_property
    def table_order(self) -> np.ndarray:
        """Loop code of the element at each table index."""
        idx = np.arange(self.order, dtype=np.int64)
        xs = np.array([reverse_bits(int(i), self.n) for i in idx >> 1], dtype=np.int64)
        return xs | ((idx & 1) << self.n)

    @cached_property
    def table_index(self) -> np.ndarray:
        """Table index of each loop code."""
        out = np.empty(self.order, dtype=np.int64)
        out[self.table_order] = np.arange(self.order)
        return out

    def index_of(self, a: LoopElement) -> int:
        return int(self.table_index[a.code])

    def cayley_table(self, force: bool = False) -> np.ndarray:
        """0-based table indices; entry [i, j] is the index of e_i o e_j."""
        limit = FORCE_TABLE_LIMIT if force else TABLE_LIMIT
        if self.order > limit:
            raise CapacityError(f"loop of order {self.order} exceeds the table limit {limit}")
        return self._table

    @cached_property
    def _table(self) -> np.ndarray:
        order, codes = self.order, self.table_order
        dtype = np.int16 if order <= 1 << 15 else np.int32
        out = np.empty((order, order), dtype=dtype)
        rows = max(1, CHUNK // order)
        for r0 in range(0, order, rows):
            block = self.mul_codes(codes[r0 : r0 + rows, None], codes[None, :])
            out[r0 : r0 + rows] = self.table_index[block]
        return out

    # multiplication permutations -----------------------------------------

    def right_mult_perm(self, a: LoopElement) -> np.ndarray:
        """Table-index permutation b -> b o a."""
        return self.cayley_table()[:, self.index_of(a)].astype(np.int64)

    def left_mult_perm(self, a: LoopElement) -> np.ndarray:
        """Table-index permutation b -> a o b."""
        return self.cayley_table()[self.index_of(a)].astype(np.int64)

    # conjugation oracle ---------------------------------------------------

    @cached_property
    def _holomorph(self) -> Holomorph:
        return Holomorph(self.group)

    def involution_of(self, a: LoopElement):
        """sigma^{r_a} in G x| S."""
        H = self._holomorph
        return H.conj(H.of_map(SIGMA), H.of_group(self.lift(a)))

    @cached_property
    def _class_lookup(self) -> dict:
        return {self.involution_of(e).g.key(): e for e in self.elements()}

    def conjugation_product(self, a: LoopElement, b: LoopElement) -> LoopElement:
        """b^(rho a rho sigma), read back as a loop element."""
        H = self._holomorph
        w = H.product(H.of_map(RHO), self.involution_of(a), H.of_map(RHO), H.of_map(SIGMA))
        c = H.conj(self.involution_of(b), w)
        if c.s != SIGMA or c.g.key() not in self._class_lookup:
            raise StructuralError(f"conjugate of {b} left the class of sigma")
        return self._class_lookup[c.g.key()]

    def conjugation_table(self, limit: int = 1 << 6) -> np.ndarray:
        if self.order > limit:
            raise CapacityError(f"conjugation oracle limited to order {limit}")
        elems = self.elements()
        out = np.empty((self.order, self.order), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                out[i, j] = self.index_of(self.conjugation_product(a, b))
        return out


# --------------------------------------------------------------------------
# table-level checks (independent of how the table was produced)


def table_inverse_perms(perms: np.ndarray) -> np.ndarray:
    out = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    out[rows, perms] = np.arange(perms.shape[1])[None, :]
    return out


def compose(*perms: np.ndarray) -> np.ndarray:
    """Left-to-right composition of (batches of) permutations: apply the first one first."""
    out = perms[0]
    for p in perms[1:]:
        out = np.take_along_axis(p, out, axis=-1)
    return out


def latin_check(table: np.ndarray, report: Report | None = None) -> Report:
    report = report or Report("latin")
    m = table.shape[0]
    target = np.arange(m)
    rows_ok = (np.sort(table, axis=1) == target).all(axis=1)
    cols_ok = (np.sort(table, axis=0) == target[:, None]).all(axis=0)
    report.check("rows are permutations").record(int(rows_ok.sum()), m, _first(~rows_ok))
    report.check("columns are permutations").record(int(cols_ok.sum()), m, _first(~cols_ok))
    report.add("index 0 is a two-sided unit",
               bool((table[0] == target).all() and (table[:, 0] == target).all()))
    return report


def moufang_table_check(table: np.ndarray, report: Report | None = None) -> Report:
    """x(y(xz)) = ((xy)x)z over all triples of a materialized table."""
    report = report or Report("moufang-table")
    m = table.shape[0]
    chk = report.check("moufang identity (exhaustive)")
    t = table.astype(np.int64)
    for x in range(m):
        # rows y, columns z
        left = t[x][t[:, t[x]]]  # x (y (x z))
        right = t[t[t[x], x]]  # ((x y) x) z
        bad = np.argwhere(left != right)
        chk.record(m * m - len(bad), m * m, None if len(bad) == 0 else (x, int(bad[0][0]), int(bad[0][1])))
    return report


def associativity_table_check(table: np.ndarray) -> tuple[bool, tuple | None]:
    t = table.astype(np.int64)
    for a in range(t.shape[0]):
        left = t[t[a]]  # (ab)c, rows b
        right = t[a][t]  # a(bc)
        bad = np.argwhere(left != right)
        if len(bad):
            return False, (a, int(bad[0][0]), int(bad[0][1]))
    return True, None


def _first(mask) -> int | None:
    idx = np.nonzero(mask)[0]
    return None if idx.size == 0 else int(idx[0])


# --------------------------------------------------------------------------
# verification suites


def _triples(L: CodeLoop, limit: int, samples: int, rng) -> tuple[tuple[np.ndarray, ...], str]:
    if L.order ** 3 <= limit:
        a, b, c = np.meshgrid(*(np.arange(L.order),) * 3, indexing="ij")
        return (a.ravel(), b.ravel(), c.ravel()), "exhaustive"
    return tuple(L.random_codes(rng, samples) for _ in range(3)), "sampled"


def _chunks(arrays, size: int = CHUNK):
    total = arrays[0].size
    for k in range(0, total, size):
        yield tuple(a[k : k + size] for a in arrays)


def is_moufang(L: CodeLoop, mode: str = "auto", samples: int = 1_000_000, seed: int = 0,
               budget: int = MOUFANG_BUDGET) -> Report:
    """The Moufang identity x(y(xz)) = ((xy)x)z."""
    if mode == "auto":
        mode = "exhaustive" if L.order ** 3 <= budget else "sampled"
    if mode == "exhaustive":
        if L.order ** 3 > budget:
            raise CapacityError(f"{L.order}^3 triples exceed the budget {budget}")
        report = moufang_table_check(L._table, Report("moufang", "exhaustive"))
        c = report.checks[0]
        if c.witness is not None:
            c.witness = tuple(str(L.from_code(L.table_order[i])) for i in c.witness)
        return report
    report = Report("moufang", "sampled", seed=seed)
    chk = report.check("moufang identity (sampled)")
    rng = rng_for(seed, "moufang")
    mul = L.mul_codes
    for x, y, z in _chunks(tuple(L.random_codes(rng, samples) for _ in range(3))):
        left = mul(x, mul(y, mul(x, z)))
        right = mul(mul(mul(x, y), x), z)
        bad = np.nonzero(left != right)[0]
        w = None if bad.size == 0 else tuple(str(L.from_code(v[bad[0]])) for v in (x, y, z))
        chk.record(x.size - bad.size, x.size, w)
    return report


def loop_axioms_report(L: CodeLoop, samples: int = 1_000_000, seed: int = 0, force: bool = False) -> Report:
    """Latin square property where the table is materialized, then Moufang."""
    report = Report("loop-axioms", seed=seed)
    if L.order <= (FORCE_TABLE_LIMIT if force else TABLE_LIMIT):
        latin_check(L.cayley_table(force=force), report)
    else:
        report.notes.append(f"order {L.order} above the table limit; Latin check by division on samples")
        rng = rng_for(seed, "latin")
        a, b = L.random_codes(rng, samples), L.random_codes(rng, samples)
        c = L.mul_codes(a, b)
        # unique solvability: the quotient of c by a (resp. b) is b (resp. a)
        ok = (L.ldiv_codes(a, c) == b) & (L.rdiv_codes(c, b) == a)
        report.check("division recovers factors (sampled)").record(int(ok.sum()), samples, _first(~ok))
    moufang = is_moufang(L, samples=samples, seed=seed)
    report.checks += moufang.checks
    report.mode = moufang.mode
    return report


def structure_report(L: CodeLoop, limit: int = 1 << 18, samples: int = 100_000, seed: int = 0) -> Report:
    """Squares, commutators and associators against the cubic maps on all (or sampled) elements."""
    sp = L.space
    rng = rng_for(seed, "structure")
    (a, b, c), how = _triples(L, limit, samples, rng)
    report = Report("structure", how, seed=seed)
    n, mask = L.n, L._s - 1
    for name, got, want in (
        ("a o a = s^sigma(a)", lambda a, b, c: L.square_codes(a), lambda a, b, c: sp.eval_sigma(a & mask)),
        ("[a,b] = s^kappa(a,b)", lambda a, b, c: L.commutator_codes(a, b),
         lambda a, b, c: sp.eval_kappa(a & mask, b & mask)),
        ("(a,b,c) = s^alpha(a,b,c)", L.associator_codes,
         lambda a, b, c: sp.eval_alpha(a & mask, b & mask, c & mask)),
    ):
        chk = report.check(name)
        for aa, bb, cc in _chunks((a, b, c)):
            g = got(aa, bb, cc)
            w = np.asarray(want(aa, bb, cc), dtype=np.int64) << n
            bad = np.nonzero(g != w)[0]
            chk.record(aa.size - bad.size, aa.size,
                       None if bad.size == 0 else tuple(str(L.from_code(v[bad[0]])) for v in (aa, bb, cc)))
    return report


def center(L: CodeLoop, limit: int = 1 << 8, samples: int = 256, seed: int = 0) -> list[LoopElement]:
    """Elements z with [x,z] = (x,y,z) = (x,z,y) = (z,x,y) = 1 for all x, y.

    Exhaustive over (x, y) when order <= ``limit``; otherwise every candidate
    is tested against ``samples`` random pairs and eliminated on failure.
    """
    cands = np.arange(L.order, dtype=np.int64)
    if L.order <= limit:
        xs, ys = (v.ravel() for v in np.meshgrid(cands, cands, indexing="ij"))
    else:
        rng = rng_for(seed, "center")
        xs, ys = L.random_codes(rng, samples), L.random_codes(rng, samples)
    alive = cands
    # small pair batches first: most candidates fail immediately
    start, width = 0, 4
    while start < xs.size and alive.size:
        x, y = xs[start : start + width], ys[start : start + width]
        for z0 in range(0, alive.size, max(1, CHUNK // x.size)):
            zc = alive[z0 : z0 + max(1, CHUNK // x.size), None]
            xc, yc = x[None, :], y[None, :]
            fail = (L.commutator_codes(xc, zc) | L.associator_codes(xc, yc, zc)
                    | L.associator_codes(xc, zc, yc) | L.associator_codes(zc, xc, yc)) != 0
            alive[z0 : z0 + zc.shape[0]] = np.where(fail.any(axis=1), -1, zc[:, 0])
        alive = alive[alive >= 0]
        start, width = start + width, width * 4
    keep = [L.from_code(z) for z in alive]
    return sorted(keep, key=L.index_of)


def small_frattini_check(L: CodeLoop, samples: int = 100_000, seed: int = 0, limit: int = 1 << 16) -> Report:
    """s is central, squares lie in {one, s}, and L/<s> multiplies by XOR."""
    rng = rng_for(seed, "small-frattini")
    report = Report("small-frattini", seed=seed)
    s, mask = L._s, L._s - 1
    allc = np.arange(L.order, dtype=np.int64)
    if L.order ** 2 <= limit:
        a, b = (v.ravel() for v in np.meshgrid(allc, allc, indexing="ij"))
        how = "exhaustive"
    else:
        a, b = L.random_codes(rng, samples), L.random_codes(rng, samples)
        how = "sampled"
    report.mode = how
    sv = np.full(a.shape, s)
    cen = (L.mul_codes(sv, a) == L.mul_codes(a, sv)) & (L.associator_codes(a, b, sv) == 0) \
        & (L.associator_codes(a, sv, b) == 0) & (L.associator_codes(sv, a, b) == 0)
    report.check(f"s in Z(L) ({how})").record(int(cen.sum()), a.size, _pair(L, a, b, ~cen))
    sq = L.square_codes(allc)
    in_a = (sq & mask) == 0
    report.check("squares in {one, s} (all elements)").record(int(in_a.sum()), L.order, _first(~in_a))
    prod = L.mul_codes(a, b)
    xor = (prod & mask) == ((a ^ b) & mask)
    report.check(f"quotient product is XOR ({how})").record(int(xor.sum()), a.size, _pair(L, a, b, ~xor))
    ss = L.mul_codes(s, s)
    report.add("s o s = one", int(ss) == 0, str(L.from_code(ss)))
    return report


def _pair(L, a, b, bad):
    idx = np.nonzero(bad)[0]
    return None if idx.size == 0 else (str(L.from_code(a[idx[0]])), str(L.from_code(b[idx[0]])))


def recovered_constants(L: CodeLoop) -> CubicSpace:
    """Structure constants read off squares, commutators and associators of the x_i."""
    n = L.n
    x = [L.basis(i) for i in range(n)]
    sigma = tuple(L._in_a(L.mul(a, a), "square") for a in x)
    kappa = frozenset((i, j) for i, j in itertools.combinations(range(n), 2)
                      if L._in_a(L.commutator(x[i], x[j]), "commutator"))
    alpha = frozenset((i, j, k) for i, j, k in itertools.combinations(range(n), 3)
                      if L._in_a(L.associator(x[i], x[j], x[k]), "associator"))
    return CubicSpace(n, sigma, kappa, alpha, name=f"recovered:{L.space.name}")


def recovery_report(L: CodeLoop) -> Report:
    report = Report("recovery")
    got, want = recovered_constants(L), L.space
    report.add("sigma", got.sigma == want.sigma, got.sigma)
    report.add("kappa", got.kappa == want.kappa, sorted(got.kappa ^ want.kappa))
    report.add("alpha", got.alpha == want.alpha, sorted(got.alpha ^ want.alpha))
    n = L.n
    report.data["constants"] = n + n * (n - 1) // 2 + n * (n - 1) * (n - 2) // 6
    return report


def is_associative(L: CodeLoop, force: bool = False) -> tuple[bool, tuple[LoopElement, ...] | None]:
    """Exhaustive associativity over the table; witness triple on failure.

    Basis triples (x_i, x_j, x_k) are tried first so that a failure is
    reported on the smallest generators that witness it.
    """
    for i, j, k in itertools.combinations(range(L.n), 3):
        trip = (L.basis(i), L.basis(j), L.basis(k))
        if L.associator(*trip) != L.one():
            return False, trip
    ok, w = associativity_table_check(L.cayley_table(force=force))
    if ok:
        return True, None
    return False, tuple(L.from_code(L.table_order[i]) for i in w)


def mult_identities_report(L: CodeLoop, mode: str = "auto", samples: int = 10_000, seed: int = 0,
                           exhaustive_order: int = 64, points: int = 4) -> Report:
    """Commutator identities of right and left multiplications.

    (i) [R_x,R_y] = R_[x,y]; (ii) [R_y,L_z] = R_{y^-1,z} with
    R_{y,z} = R_y R_z R_{yz}^-1; (iii) [[R_x,L_y],R_z] = R_(x,y,z).
    Permutations compose left to right and [P,Q] = P^-1 Q^-1 P Q.
    """
    if mode == "auto":
        mode = "exhaustive" if L.order <= exhaustive_order else "sampled"
    if L.order <= TABLE_LIMIT:
        return _mult_identities_perms(L, mode, samples, seed)
    return _mult_identities_points(L, samples, seed, points)


verify_mult_identities = mult_identities_report


def _mult_identities_perms(L: CodeLoop, mode: str, samples: int, seed: int) -> Report:
    T = L.cayley_table().astype(np.int64)
    m = L.order
    R, Lm = T.T.copy(), T
    Ri, Li = table_inverse_perms(R), table_inverse_perms(Lm)
    inv = np.argmax(T == 0, axis=1)
    ldiv = Li  # ldiv[y][a]: the d with y d = a

    def comm(a, b):
        return ldiv[T[b, a], T[a, b]]

    def assoc(a, b, c):
        return T[inv[T[T[a, b], c]], T[a, T[b, c]]]

    report = Report("mult-identities", mode, seed=None if mode == "exhaustive" else seed)
    rng = rng_for(seed, "mult-identities")
    if mode == "exhaustive":
        idx = np.arange(m)
        pairs = tuple(v.ravel() for v in np.meshgrid(idx, idx, indexing="ij"))
        trip = tuple(v.ravel() for v in np.meshgrid(idx, idx, idx, indexing="ij"))
    else:
        pairs = tuple(rng.integers(0, m, samples) for _ in range(2))
        trip = tuple(rng.integers(0, m, samples) for _ in range(3))

    def tally(name, lhs, rhs, *args):
        bad = np.nonzero((lhs != rhs).any(axis=1))[0]
        w = None if bad.size == 0 else tuple(str(L.from_code(L.table_order[v[bad[0]]])) for v in args)
        report.check(name).record(lhs.shape[0] - bad.size, lhs.shape[0], w)

    rows = max(1, CHUNK // m)
    for x, y in _chunks(pairs, rows):
        tally("(i) [R_x,R_y] = R_[x,y]", compose(Ri[x], Ri[y], R[x], R[y]), R[comm(x, y)], x, y)
        y_, z = x, y
        yi = inv[y_]
        rhs = compose(R[yi], R[z], Ri[T[yi, z]])
        tally("(ii) [R_y,L_z] = R_{y^-1,z}", compose(Ri[y_], Li[z], R[y_], Lm[z]), rhs, y_, z)
    for x, y, z in _chunks(trip, rows):
        K = compose(Ri[x], Li[y], R[x], Lm[y])
        lhs = compose(table_inverse_perms(K), Ri[z], K, R[z])
        tally("(iii) [[R_x,L_y],R_z] = R_(x,y,z)", lhs, R[assoc(x, y, z)], x, y, z)
    return report


def _mult_identities_points(L: CodeLoop, samples: int, seed: int, points: int) -> Report:
    """Identities rearranged without permutation inverses, checked at sample points.

    P^-1 Q^-1 P Q = W is equivalent to PQ = QPW, so each identity becomes an
    equation between images of a point a.
    """
    rng = rng_for(seed, "mult-identities")
    report = Report("mult-identities", "sampled-points", seed=seed)
    report.notes.append(f"order {L.order} above the table limit; permutations evaluated at {points} points per triple")
    mul, k = L.mul_codes, samples * points
    x, y, z, a = (np.repeat(L.random_codes(rng, samples), points) if i < 3 else L.random_codes(rng, k)
                  for i in range(4))

    def tally(name, lhs, rhs):
        bad = np.nonzero(lhs != rhs)[0]
        w = None if bad.size == 0 else tuple(str(L.from_code(v[bad[0]])) for v in (x, y, z, a))
        report.check(name).record(k - bad.size, k, w)

    c = L.commutator_codes(x, y)
    tally("(i) [R_x,R_y] = R_[x,y]", mul(mul(a, x), y), mul(mul(mul(a, y), x), c))
    yi = L.inv_codes(y)
    w = mul(yi, z)
    tally("(ii) [R_y,L_z] = R_{y^-1,z}", mul(mul(z, mul(a, y)), w), mul(mul(mul(mul(z, a), y), yi), z))

    def K(p):
        return mul(y, mul(L.ldiv_codes(y, L.rdiv_codes(p, x)), x))

    d = L.associator_codes(x, y, z)
    tally("(iii) [[R_x,L_y],R_z] = R_(x,y,z)", mul(K(a), z), mul(K(mul(a, z)), d))
    return report


def mlt_bound_check(L: CodeLoop, max_n: int = 3) -> Report:
    """|Mlt(L)| divides |G|/|N|, where N is the core of H3 in G."""
    if L.n > max_n:
        raise CapacityError(f"multiplication group closure limited to n <= {max_n}")
    T = L.cayley_table().astype(np.int64)
    gens = {tuple(p) for p in np.concatenate([T, T.T])}
    seen = set(gens) | {tuple(range(L.order))}
    frontier = list(seen)
    gl = [np.array(g) for g in gens]
    while frontier:
        nxt = []
        for p in frontier:
            pa = np.array(p)
            for g in gl:
                q = tuple(g[pa])
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    N = core_N(L.group)
    size, bound = len(seen), L.group.order // len(N)
    report = Report("mlt-bound")
    report.data.update({"|Mlt(L)|": size, "|G|/|N|": bound, "|N|": len(N)})
    report.add("|Mlt(L)| divides |G|/|N|", bound % size == 0, (size, bound))
    si = L.index_of(L.s_elem())
    rs, ls = T[:, si], T[si]
    report.add("R_s = L_s", bool(np.array_equal(rs, ls)))
    report.add("R_s is a fixed-point-free involution",
               bool((rs[rs] == np.arange(L.order)).all() and (rs != np.arange(L.order)).all()))
    report.add("R_s central in Mlt(L)", all(np.array_equal(g[rs], rs[g]) for g in gl))
    report.notes.append("embedding Mlt(L) -> G/N not constructed; order divisibility only")
    return report


def dual_construction_report(L: CodeLoop, limit: int = 1 << 6) -> Report:
    """Coset-action table against the conjugation oracle."""
    report = Report("dual-construction")
    a, b = L.cayley_table(), L.conjugation_table(limit)
    bad = np.argwhere(a != b)
    w = None if len(bad) == 0 else tuple(str(L.from_code(L.table_order[i])) for i in bad[0])
    report.check("coset product = conjugation product").record(a.size - len(bad), a.size, w)
    return report


def diassociativity_report(L: CodeLoop, samples: int = 1000, seed: int = 0, max_len: int = 4) -> Report:
    """All bracketings of every word of length <= max_len in {a, b} agree."""
    rng = rng_for(seed, "diassociativity")
    a, b = L.random_codes(rng, samples), L.random_codes(rng, samples)
    report = Report("diassociativity", "sampled", seed=seed)
    chk = report.check(f"bracketings of words of length <= {max_len}")

    def evals(word):
        if len(word) == 1:
            return [word[0]]
        out = []
        for k in range(1, len(word)):
            for left in evals(word[:k]):
                for right in evals(word[k:]):
                    out.append(L.mul_codes(left, right))
        return out

    for length in range(2, max_len + 1):
        for letters in itertools.product((a, b), repeat=length):
            vals = evals(list(letters))
            ok = np.all([v == vals[0] for v in vals], axis=0)
            chk.record(int(ok.sum()), samples, _pair(L, a, b, ~ok))
    return report


# --------------------------------------------------------------------------
# Cayley table exchange format


@dataclass(frozen=True)
class CayleyTable:
    legend: tuple[tuple[str, int], ...]
    table: np.ndarray  # 0-based

    @property
    def order(self) -> int:
        return len(self.legend)


def _xbits_text(L: CodeLoop, code: int) -> str:
    return str(BitVec(L.n, int(code) & (L._s - 1))) or "-"


def export_cayley(L: CodeLoop, sink: IO[str], force: bool = False) -> None:
    table = L.cayley_table(force=force)
    m = L.order
    sink.write(f"order {m}\nlegend\n")
    for i, c in enumerate(L.table_order):
        sink.write(f"{i + 1} {_xbits_text(L, c)} {int(c) >> L.n}\n")
    for row in table:
        sink.write(" ".join(map(str, (row.astype(np.int64) + 1).tolist())) + "\n")


def read_cayley(lines: Iterable[str]) -> CayleyTable:
    it = iter(enumerate((ln.rstrip("\n") for ln in lines), start=1))

    def nxt():
        for lineno, line in it:
            if line.strip():
                return lineno, line.split()
        raise ParseError("unexpected end of table")

    lineno, head = nxt()
    if len(head) != 2 or head[0] != "order" or not head[1].isdigit():
        raise ParseError("expected 'order m'", lineno)
    m = int(head[1])
    lineno, tok = nxt()
    if tok != ["legend"]:
        raise ParseError("expected 'legend'", lineno)
    legend = []
    for i in range(m):
        lineno, tok = nxt()
        if len(tok) != 3 or tok[0] != str(i + 1) or tok[2] not in ("0", "1"):
            raise ParseError("expected 'index xbits t'", lineno)
        legend.append(("" if tok[1] == "-" else tok[1], int(tok[2])))
    table = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        lineno, tok = nxt()
        if len(tok) != m:
            raise ParseError(f"row has {len(tok)} entries, expected {m}", lineno)
        try:
            row = [int(v) for v in tok]
        except ValueError:
            raise ParseError("non-integer table entry", lineno) from None
        if min(row) < 1 or max(row) > m:
            raise ParseError("table entry out of range", lineno)
        table[i] = row
    return CayleyTable(tuple(legend), table - 1)


def is_cyclic_group_table(table: np.ndarray) -> bool:
    """True if some element generates the whole (associative) table."""
    m = table.shape[0]
    if not associativity_table_check(table)[0]:
        return False
    for g in range(m):
        p, seen = g, {0}
        while p not in seen:
            seen.add(p)
            p = int(table[p, g])
        if len(seen) == m:
            return True
    return False
