"""The group G of order 2^(3n+2) built from a cubic space, with triality.

Elements are in normal form ``g^x f^y h^z u^t1 v^t2`` where ``x, y, z`` are
packed n-bit ints (bit i is the exponent of the generator with index i+1)
and ``t1, t2`` are bits.  For bulk work an element is packed into one int64
code::

    code = x | y << n | z << 2n | t1 << 3n | t2 << (3n + 1)

Three multiplications live here and are tested against each other:

* ``Collector``: adjacent-swap collection straight from the defining
  relations.  Slow; it is the reference.
* ``TrialityGroup.mul``: closed-form product on Python ints.
* ``TrialityGroup.mul_codes``: the same closed form on numpy arrays.

Automorphisms act through ``TrialityMap`` values, elements of S3 generated
by sigma and rho.  A map applied to an element is the composite function;
``(m1 * m2)(a) == m1(m2(a))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .cubic import CubicSpace
from .errors import CapacityError, ContextError, DimensionError
from .f2algebra import BitVec, iter_bits, parity, span_array
from .report import Report, rng_for

TABLE_MAX_N = 16
CODE_MAX_N = 20
ENUM_LIMIT = 1 << 11
ASSOC_BUDGET = 1 << 25


# --------------------------------------------------------------------------
# S3 = <sigma, rho>


@dataclass(frozen=True)
class TrialityMap:
    """The automorphism rho^r o sigma^s (sigma applied first)."""

    r: int = 0
    s: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r", self.r % 3)
        object.__setattr__(self, "s", self.s % 2)

    def __mul__(self, other: "TrialityMap") -> "TrialityMap":
        # sigma o rho^k = rho^-k o sigma
        sign = -1 if self.s else 1
        return TrialityMap(self.r + sign * other.r, self.s + other.s)

    def inverse(self) -> "TrialityMap":
        if self.s:
            return self
        return TrialityMap(-self.r, 0)

    def __pow__(self, k: int) -> "TrialityMap":
        out = IDENTITY_MAP
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    @property
    def word(self) -> str:
        parts = ["rho"] * self.r + ["sigma"] * self.s
        return "*".join(parts) or "id"

    def __repr__(self) -> str:
        return f"TrialityMap({self.word})"

    def factors(self) -> list[str]:
        """Primitive maps in the order they are applied."""
        return ["sigma"] * self.s + ["rho"] * self.r

    @classmethod
    def all(cls) -> list["TrialityMap"]:
        return [cls(r, s) for s in (0, 1) for r in range(3)]


IDENTITY_MAP = TrialityMap()
SIGMA = TrialityMap(0, 1)
RHO = TrialityMap(1, 0)


def involution(i: int) -> TrialityMap:
    """sigma_1 = sigma, sigma_2 = rho^-1 sigma rho, sigma_3 = rho sigma rho^-1."""
    if i == 1:
        return SIGMA
    if i == 2:
        return RHO.inverse() * SIGMA * RHO
    if i == 3:
        return RHO * SIGMA * RHO.inverse()
    raise ValueError(f"no involution sigma_{i}")


# --------------------------------------------------------------------------
# elements


@dataclass(frozen=True, slots=True)
class GroupElement:
    x: int
    y: int
    z: int
    t1: int
    t2: int
    group: "TrialityGroup | None" = field(default=None, compare=False, repr=False)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.mul(self, other)

    def vectors(self) -> tuple[BitVec, BitVec, BitVec]:
        n = self.group.n
        return BitVec(n, self.x), BitVec(n, self.y), BitVec(n, self.z)

    def key(self) -> tuple[int, int, int, int, int]:
        return (self.x, self.y, self.z, self.t1, self.t2)


# letters of generator words: g_i -> i, f_i -> n+i, h_i -> 2n+i, u -> 3n, v -> 3n+1
Word = Sequence[tuple[int, int]]


def letter_name(n: int, letter: int) -> str:
    kind, idx = divmod(letter, n) if n else (3, 0)
    if letter >= 3 * n:
        return "u" if letter == 3 * n else "v"
    return f"{'gfh'[kind]}{idx + 1}"


# --------------------------------------------------------------------------
# reference collector


class Collector:
    """Adjacent-swap collection over the ordered generators.

    Words are lists of letters (each generator has order dividing 4 and all
    exponents are 0/1 in normal form).  ``overrides`` replaces the value of
    a commutator ``[b, a]`` for letters ``b > a``; it exists to build
    deliberately inconsistent presentations for negative controls.
    """

    def __init__(self, space: CubicSpace, overrides: dict | None = None):
        self.space = space
        self.n = space.n
        self.overrides = dict(overrides or {})

    def square(self, a: int) -> list[int]:
        n = self.n
        if a < n:
            return [3 * n] if self.space.sigma[a] else []
        if a < 2 * n:
            return [3 * n + 1] if self.space.sigma[a - n] else []
        return []

    def commutator(self, b: int, a: int) -> list[int]:
        """Word for [b, a] with b > a in the collection order."""
        if (b, a) in self.overrides:
            return list(self.overrides[(b, a)])
        n, sp = self.n, self.space
        u, v = 3 * n, 3 * n + 1
        if b >= 3 * n:
            return []
        kb, ib = divmod(b, n)
        ka, ia = divmod(a, n)
        if kb == 0:  # g_j, g_i
            return [u] if sp.kappa_c(ia, ib) else []
        if kb == 1 and ka == 1:
            return [v] if sp.kappa_c(ia, ib) else []
        if kb == 1 and ka == 0:  # [f_j, g_i] = [g_i, f_j]
            word = [2 * n + k for k in range(n) if sp.alpha_c(ia, ib, k)]
            return word + ([u, v] if sp.kappa_c(ia, ib) else [])
        if kb == 2 and ka == 0:
            return [u] if ia == ib else []
        if kb == 2 and ka == 1:
            return [v] if ia == ib else []
        return []

    def collect(self, word: list[int]) -> list[int]:
        w = list(word)
        i = 0
        while i < len(w) - 1:
            a, b = w[i], w[i + 1]
            if a < b:
                i += 1
                continue
            if a == b:
                w[i:i + 2] = self.square(a)
            else:
                w[i:i + 2] = [b, a] + self.commutator(a, b)
            i = max(i - 1, 0)
        return w

    def word_of(self, e: GroupElement) -> list[int]:
        n = self.n
        w = [i for i in iter_bits(e.x)]
        w += [n + i for i in iter_bits(e.y)]
        w += [2 * n + i for i in iter_bits(e.z)]
        return w + [3 * n] * e.t1 + [3 * n + 1] * e.t2

    def exponents(self, word: list[int]) -> tuple[int, int, int, int, int]:
        n = self.n
        x = y = z = t1 = t2 = 0
        for a in word:
            if a < n:
                x |= 1 << a
            elif a < 2 * n:
                y |= 1 << (a - n)
            elif a < 3 * n:
                z |= 1 << (a - 2 * n)
            elif a == 3 * n:
                t1 = 1
            else:
                t2 = 1
        return x, y, z, t1, t2

    def mul(self, a: GroupElement, b: GroupElement) -> tuple[int, int, int, int, int]:
        return self.exponents(self.collect(self.word_of(a) + self.word_of(b)))


# --------------------------------------------------------------------------
# the group


class TrialityGroup:
    """G with generators g_i, f_i, h_i, u, v defined by the cubic space constants.

    Pass ``collector`` to route ``mul`` through a (possibly corrupted)
    reference collector instead of the closed form.
    """

    def __init__(self, space: CubicSpace, collector: Collector | None = None):
        self.space = space
        self.n = space.n
        self.collector = collector
        n = self.n
        self._mask = (1 << n) - 1
        self.order = 1 << (3 * n + 2)
        self._tables = n <= TABLE_MAX_N
        if self._tables:
            self._build_tables()

    def __repr__(self) -> str:
        label = f" {self.space.name}" if self.space.name else ""
        return f"<TrialityGroup{label} n={self.n} order=2^{3 * self.n + 2}>"

    # construction -----------------------------------------------------------

    def _build_tables(self) -> None:
        sp, n = self.space, self.n
        ap = sp.alpha_pairs
        self._alpha_np = [span_array(list(ap[i])) for i in range(n)]
        self._kappa_np = span_array(list(sp.kappa_rows))
        self._kappa_low_np = span_array(list(sp.kappa_upper))
        q = np.zeros(1, dtype=np.int64)
        for j in range(n):
            q = np.concatenate([q, q ^ self._alpha_np[j][: 1 << j]])
        self._quad_np = q
        self._alpha_t = [t.tolist() for t in self._alpha_np]
        self._kappa_t = self._kappa_np.tolist()
        self._kappa_low_t = self._kappa_low_np.tolist()
        self._quad_t = self._quad_np.tolist()
        self._alpha2_np = None
        if n <= 8:
            size = 1 << n
            xs = np.arange(size, dtype=np.int64)
            a2 = np.zeros((size, size), dtype=np.int64)
            for i in range(n):
                a2 ^= ((xs[:, None] >> i) & 1) * self._alpha_np[i][None, :]
            self._alpha2_np = a2

    def element(self, x: int = 0, y: int = 0, z: int = 0, t1: int = 0, t2: int = 0) -> GroupElement:
        if isinstance(x, BitVec):
            x, y, z = (v.bits if isinstance(v, BitVec) else v for v in (x, y, z))
        for v in (x, y, z):
            if v < 0 or v >> self.n:
                raise DimensionError(f"exponent vector {v:#x} exceeds n={self.n}")
        return GroupElement(x, y, z, t1 & 1, t2 & 1, self)

    def _make(self, x, y, z, t1, t2) -> GroupElement:
        return GroupElement(x, y, z, t1, t2, self)

    def identity(self) -> GroupElement:
        return self._make(0, 0, 0, 0, 0)

    def g(self, i: int) -> GroupElement:
        return self._make(1 << i, 0, 0, 0, 0)

    def f(self, i: int) -> GroupElement:
        return self._make(0, 1 << i, 0, 0, 0)

    def h(self, i: int) -> GroupElement:
        return self._make(0, 0, 1 << i, 0, 0)

    @property
    def u(self) -> GroupElement:
        return self._make(0, 0, 0, 1, 0)

    @property
    def v(self) -> GroupElement:
        return self._make(0, 0, 0, 0, 1)

    def generator(self, letter: int) -> GroupElement:
        n = self.n
        if letter < n:
            return self.g(letter)
        if letter < 2 * n:
            return self.f(letter - n)
        if letter < 3 * n:
            return self.h(letter - 2 * n)
        return self.u if letter == 3 * n else self.v

    def generators(self) -> list[GroupElement]:
        return [self.generator(a) for a in range(3 * self.n + 2)]

    def _own(self, *elems: GroupElement) -> None:
        for e in elems:
            if e.group is not self:
                raise ContextError("element belongs to a different group")

    # scalar arithmetic ------------------------------------------------------

    def _alpha_vec(self, xp: int, y: int) -> int:
        if self._tables:
            acc = 0
            for i in iter_bits(xp):
                acc ^= self._alpha_t[i][y]
            return acc
        return self.space.alpha_vector(xp, y)

    def _kappa_vec(self, y: int) -> int:
        if self._tables:
            return self._kappa_t[y]
        acc = 0
        for j in iter_bits(y):
            acc ^= self.space.kappa_rows[j]
        return acc

    def _kappa_low(self, xp: int) -> int:
        if self._tables:
            return self._kappa_low_t[xp]
        acc = 0
        for j in iter_bits(xp):
            acc ^= self.space.kappa_upper[j]
        return acc

    def _quad(self, x: int) -> int:
        if self._tables:
            return self._quad_t[x]
        return self.space.quad_vector(x)

    def _cocycle(self, x: int, xp: int) -> int:
        """Exponent of u in g^x g^x' = g^(x+x') u^c."""
        return ((x & self._kappa_low(xp)).bit_count() ^ (x & xp & self.space.sigma_mask).bit_count()) & 1

    def _product(self, a, b) -> tuple[int, int, int, int, int]:
        x, y, z, a1, a2 = a
        xp, yp, zp, b1, b2 = b
        av = self._alpha_vec(xp, y)
        bil = (xp & self._kappa_vec(y)).bit_count()
        t1 = (
            a1 ^ b1 ^ (z & xp).bit_count() ^ self._cocycle(x, xp) ^ bil
            ^ (y & self._quad(xp)).bit_count()
        ) & 1
        t2 = (
            a2 ^ b2 ^ (z & yp).bit_count() ^ self._cocycle(y, yp) ^ bil
            ^ (xp & self._quad(y)).bit_count() ^ (av & yp).bit_count()
        ) & 1
        return x ^ xp, y ^ yp, z ^ zp ^ av, t1, t2

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._own(a, b)
        if self.collector is not None:
            return self._make(*self.collector.mul(a, b))
        return self._make(*self._product(a.key(), b.key()))

    def inv(self, a: GroupElement) -> GroupElement:
        """Inverse via b0 = g^x f^y h^(z + alpha(x, y, .)), corrected by a central factor."""
        self._own(a)
        if self.collector is not None:
            for b in self._inverse_candidates(a):
                if self.mul(a, b) == self.identity():
                    return b
            raise ContextError("element has no inverse under the collector")
        b0 = (a.x, a.y, a.z ^ self._alpha_vec(a.x, a.y), 0, 0)
        c = self._product(a.key(), b0)
        return self._make(b0[0], b0[1], b0[2], c[3], c[4])

    def _inverse_candidates(self, a):
        for zz in range(1 << self.n):
            for t1 in (0, 1):
                for t2 in (0, 1):
                    yield self._make(a.x, a.y, zz, t1, t2)

    def commutator(self, a: GroupElement, b: GroupElement) -> GroupElement:
        """[a, b] = a^-1 b^-1 a b."""
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def conj(self, a: GroupElement, b: GroupElement) -> GroupElement:
        """a^b = b^-1 a b."""
        return self.mul(self.mul(self.inv(b), a), b)

    def power(self, a: GroupElement, k: int) -> GroupElement:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity()
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def product(self, elems) -> GroupElement:
        out = self.identity()
        for e in elems:
            out = self.mul(out, e)
        return out

    def evaluate(self, word: Word, images: Callable[[int], GroupElement] | None = None) -> GroupElement:
        """Evaluate a word of (letter, +-1) pairs under a generator assignment."""
        images = images or self.generator
        out = self.identity()
        for letter, e in word:
            img = images(letter)
            out = self.mul(out, img if e > 0 else self.inv(img))
        return out

    # automorphisms ----------------------------------------------------------

    def generator_image(self, name: str, letter: int) -> GroupElement:
        """Image of one generator under the primitive map sigma or rho."""
        n = self.n
        if letter >= 2 * n and letter < 3 * n:
            return self.generator(letter)
        if name == "sigma":
            if letter < n:
                return self.f(letter)
            if letter < 2 * n:
                return self.g(letter - n)
            return self.v if letter == 3 * n else self.u
        if name == "rho":
            if letter < n:
                return self.f(letter)
            if letter < 2 * n:
                i = letter - n
                return self.inv(self.mul(self.g(i), self.f(i)))
            return self.v if letter == 3 * n else self.mul(self.u, self.v)
        raise ValueError(f"unknown primitive map {name!r}")

    @cached_property
    def _images(self) -> dict[str, list[GroupElement]]:
        return {name: [self.generator_image(name, a) for a in range(3 * self.n + 2)] for name in ("sigma", "rho")}

    def _apply_primitive(self, name: str, a: GroupElement) -> GroupElement:
        imgs = self._images[name]
        n = self.n
        out = self.identity()
        for i in iter_bits(a.x):
            out = self.mul(out, imgs[i])
        for i in iter_bits(a.y):
            out = self.mul(out, imgs[n + i])
        for i in iter_bits(a.z):
            out = self.mul(out, imgs[2 * n + i])
        if a.t1:
            out = self.mul(out, imgs[3 * n])
        if a.t2:
            out = self.mul(out, imgs[3 * n + 1])
        return out

    def apply(self, m: TrialityMap, a: GroupElement) -> GroupElement:
        """Image of ``a`` under ``m``, rebuilt from the images of its generator word."""
        self._own(a)
        for name in m.factors():
            a = self._apply_primitive(name, a)
        return a

    def bracket_sigma(self, a: GroupElement) -> GroupElement:
        """[a, sigma] = a^-1 a^sigma."""
        return self.mul(self.inv(a), self.apply(SIGMA, a))

    def check_triality(self, a: GroupElement) -> bool:
        c = self.bracket_sigma(a)
        c1 = self.apply(RHO, c)
        c2 = self.apply(RHO, c1)
        return self.mul(self.mul(c, c1), c2) == self.identity()

    # subgroups and cosets ---------------------------------------------------

    def h3_twist(self, x: int) -> int:
        """u/v parity of (g_1 f_1)^x_1 ... (g_n f_n)^x_n in sorted normal form.

        Equals sum_{i<j<k} x_i x_j x_k alpha_ijk.
        """
        return (x & self._quad(x)).bit_count() & 1

    def subgroup_membership(self, a: GroupElement, which: str) -> bool:
        """H1 = <g_i, h_i, u>, H2 = <f_i, h_i, v>, H3 = <g_i f_i, h_i, uv> = C_G(sigma).

        In the sorted normal form H3 is {x = y, t1 + t2 = h3_twist(x)}; the
        plain condition t1 = t2 only holds in the interleaved form
        g_1^x_1 f_1^y_1 ... g_n^x_n f_n^y_n.
        """
        self._own(a)
        if which == "H1":
            return a.y == 0 and a.t2 == 0
        if which == "H2":
            return a.x == 0 and a.t1 == 0
        if which == "H3":
            return a.x == a.y and a.t1 ^ a.t2 == self.h3_twist(a.x)
        raise ValueError(f"unknown subgroup {which!r}")

    def canonical_coset_rep(self, a: GroupElement) -> tuple[int, int]:
        """(x', t) with H3 a = H3 g^x' u^t.

        Left-multiplies by g_i f_i for each set y_i, then by h_k for each
        remaining z_k, then by uv if the v exponent is still set.
        """
        self._own(a)
        for i in iter_bits(a.y):
            a = self.mul(self.mul(self.g(i), self.f(i)), a)
        for k in iter_bits(a.z):
            a = self.mul(self.h(k), a)
        if a.t2:
            a = self.mul(self.mul(self.u, self.v), a)
        assert a.y == 0 and a.z == 0 and a.t2 == 0
        return a.x, a.t1

    def coset_rep_element(self, x: int, t: int) -> GroupElement:
        return self._make(x, 0, 0, t, 0)

    # packed codes -----------------------------------------------------------

    def encode(self, a: GroupElement) -> int:
        n = self.n
        return a.x | a.y << n | a.z << 2 * n | a.t1 << 3 * n | a.t2 << (3 * n + 1)

    def decode(self, code: int) -> GroupElement:
        n, m = self.n, self._mask
        code = int(code)
        return self._make(code & m, (code >> n) & m, (code >> 2 * n) & m, (code >> 3 * n) & 1, (code >> (3 * n + 1)) & 1)

    def all_codes(self) -> np.ndarray:
        if 3 * self.n + 2 > 30:
            raise CapacityError(f"cannot enumerate 2^{3 * self.n + 2} elements")
        return np.arange(self.order, dtype=np.int64)

    def random_codes(self, rng: np.random.Generator, count: int) -> np.ndarray:
        self._need_codes()
        return rng.integers(0, self.order, count, dtype=np.int64)

    def _need_codes(self) -> None:
        if self.n > CODE_MAX_N:
            raise CapacityError(f"packed codes need n <= {CODE_MAX_N}")

    def _split(self, c):
        n, m = self.n, self._mask
        return c & m, (c >> n) & m, (c >> 2 * n) & m, (c >> 3 * n) & 1, (c >> (3 * n + 1)) & 1

    def _join(self, x, y, z, t1, t2):
        n = self.n
        return x | (y << n) | (z << 2 * n) | (t1 << 3 * n) | (t2 << (3 * n + 1))

    def _alpha_vec_np(self, xp, y):
        if self._alpha2_np is not None:
            return self._alpha2_np[xp, y]
        acc = np.zeros(np.broadcast(xp, y).shape, dtype=np.int64)
        for i in range(self.n):
            acc ^= self._alpha_np[i][y] * ((xp >> i) & 1)
        return acc

    def mul_codes(self, a, b) -> np.ndarray:
        """Closed-form product on arrays of packed codes (broadcasting)."""
        self._need_codes()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.collector is not None or not self._tables:
            f = np.vectorize(lambda p, q: self.encode(self.mul(self.decode(p), self.decode(q))), otypes=[np.int64])
            return f(a, b)
        x, y, z, a1, a2 = self._split(a)
        xp, yp, zp, b1, b2 = self._split(b)
        smask = self.space.sigma_mask
        av = self._alpha_vec_np(xp, y)
        bil = np.bitwise_count(xp & self._kappa_np[y])
        c_g = np.bitwise_count(x & self._kappa_low_np[xp]) ^ np.bitwise_count(x & xp & smask)
        c_f = np.bitwise_count(y & self._kappa_low_np[yp]) ^ np.bitwise_count(y & yp & smask)
        t1 = a1 ^ b1 ^ ((np.bitwise_count(z & xp) ^ c_g ^ bil ^ np.bitwise_count(y & self._quad_np[xp])) & 1)
        t2 = a2 ^ b2 ^ (
            (np.bitwise_count(z & yp) ^ c_f ^ bil ^ np.bitwise_count(xp & self._quad_np[y]) ^ np.bitwise_count(av & yp))
            & 1
        )
        return self._join(x ^ xp, y ^ yp, z ^ zp ^ av, t1.astype(np.int64), t2.astype(np.int64))

    def inv_codes(self, a) -> np.ndarray:
        self._need_codes()
        a = np.asarray(a, dtype=np.int64)
        if self.collector is not None or not self._tables:
            return np.vectorize(lambda p: self.encode(self.inv(self.decode(p))), otypes=[np.int64])(a)
        x, y, z, _, _ = self._split(a)
        b0 = self._join(x, y, z ^ self._alpha_vec_np(x, y), 0, 0)
        return b0 | (self.mul_codes(a, b0) & self._t_mask)

    @cached_property
    def _t_mask(self) -> int:
        return 3 << (3 * self.n)

    @cached_property
    def _image_codes(self) -> dict[str, np.ndarray]:
        return {k: np.array([self.encode(e) for e in v], dtype=np.int64) for k, v in self._images.items()}

    def apply_codes(self, m: TrialityMap, a) -> np.ndarray:
        """Generator-by-generator image, vectorized over an array of codes."""
        a = np.asarray(a, dtype=np.int64)
        for name in m.factors():
            imgs = self._image_codes[name]
            out = np.zeros_like(a)
            for letter in range(3 * self.n + 2):
                bit = (a >> letter) & 1
                if bit.any():
                    out = np.where(bit == 1, self.mul_codes(out, imgs[letter]), out)
            a = out
        return a

    def bracket_sigma_codes(self, a) -> np.ndarray:
        return self.mul_codes(self.inv_codes(a), self.apply_codes(SIGMA, a))

    def triality_codes(self, a) -> np.ndarray:
        """Boolean array: does the triality identity hold at each element."""
        c = self.bracket_sigma_codes(a)
        c1 = self.apply_codes(RHO, c)
        c2 = self.apply_codes(RHO, c1)
        return self.mul_codes(self.mul_codes(c, c1), c2) == 0

    def membership_codes(self, a, which: str) -> np.ndarray:
        x, y, _, t1, t2 = self._split(np.asarray(a, dtype=np.int64))
        if which == "H1":
            return (y == 0) & (t2 == 0)
        if which == "H2":
            return (x == 0) & (t1 == 0)
        if which == "H3":
            twist = np.bitwise_count(x & self._quad_np[x]) & 1
            return (x == y) & ((t1 ^ t2) == twist)
        raise ValueError(f"unknown subgroup {which!r}")

    @cached_property
    def _left_h3_table(self) -> np.ndarray:
        """Entry y: product of g_i f_i over set y_i, as used by coset reduction."""
        size = 1 << self.n
        out = np.zeros(size, dtype=np.int64)
        gf = [self.encode(self.mul(self.g(i), self.f(i))) for i in range(self.n)]
        for y in range(1, size):
            low = (y & -y).bit_length() - 1
            out[y] = self.mul_codes(gf[low], out[y & (y - 1)])
        return out

    def coset_rep_codes(self, a) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized canonical coset representatives: arrays (x', t)."""
        a = np.asarray(a, dtype=np.int64)
        _, y, _, _, _ = self._split(a)
        b = self.mul_codes(self._left_h3_table[y], a)
        x, y2, z, t1, t2 = self._split(b)
        t = t1 ^ (np.bitwise_count(z & x) & 1) ^ t2
        return x, t.astype(np.int64)

    def cayley_codes(self) -> np.ndarray:
        codes = self.all_codes()
        if self.order > 1 << 12:
            raise CapacityError(f"Cayley table of order {self.order} is too large")
        return self.mul_codes(codes[:, None], codes[None, :])


# --------------------------------------------------------------------------
# extended group G x| S (automorphisms act on the right: g^s = s(g))


@dataclass(frozen=True)
class ExtElement:
    """The element s.g of G x| S, where s acts as the map ``s``."""

    s: TrialityMap
    g: GroupElement


class Holomorph:
    """G extended by S = <sigma, rho> with s^-1 g s = s(g)."""

    def __init__(self, G: TrialityGroup):
        self.G = G

    def one(self) -> ExtElement:
        return ExtElement(IDENTITY_MAP, self.G.identity())

    def of_map(self, s: TrialityMap) -> ExtElement:
        return ExtElement(s, self.G.identity())

    def of_group(self, g: GroupElement) -> ExtElement:
        return ExtElement(IDENTITY_MAP, g)

    def mul(self, a: ExtElement, b: ExtElement) -> ExtElement:
        # s1 g1 s2 g2 = (s1 s2)(g1^{s2} g2); acting first by s1 then s2 is s2 o s1
        G = self.G
        return ExtElement(b.s * a.s, G.mul(G.apply(b.s, a.g), b.g))

    def inv(self, a: ExtElement) -> ExtElement:
        G = self.G
        si = a.s.inverse()
        return ExtElement(si, G.apply(si, G.inv(a.g)))

    def conj(self, a: ExtElement, b: ExtElement) -> ExtElement:
        """a^b = b^-1 a b."""
        return self.mul(self.mul(self.inv(b), a), b)

    def product(self, *elems: ExtElement) -> ExtElement:
        out = self.one()
        for e in elems:
            out = self.mul(out, e)
        return out

    def act(self, a: ExtElement, x: GroupElement) -> GroupElement:
        """Conjugation action x -> a^-1 x a, written back into G."""
        G = self.G
        return G.mul(G.mul(G.inv(a.g), G.apply(a.s, x)), a.g)

    def is_trivial_on(self, a: ExtElement, points) -> tuple[bool, GroupElement | None]:
        for p in points:
            if self.act(a, p) != p:
                return False, p
        return True, None


# --------------------------------------------------------------------------
# verification suites


def relations(n: int, space: CubicSpace) -> list[tuple[str, list, list]]:
    """Defining relations as (name, lhs word, rhs word) over generator letters."""
    u, v = 3 * n, 3 * n + 1

    def g(i):
        return i

    def f(i):
        return n + i

    def h(i):
        return 2 * n + i

    def comm(a, b):
        return [(a, -1), (b, -1), (a, 1), (b, 1)]

    def pos(*letters):
        return [(a, 1) for a in letters]

    rels = []
    for i in range(n):
        s = space.sigma[i]
        rels.append((f"g{i + 1}^2", pos(g(i), g(i)), pos(u) if s else []))
        rels.append((f"f{i + 1}^2", pos(f(i), f(i)), pos(v) if s else []))
        rels.append((f"h{i + 1}^2", pos(h(i), h(i)), []))
    rels.append(("u^2", pos(u, u), []))
    rels.append(("v^2", pos(v, v), []))
    for i, j in itertools.permutations(range(n), 2):
        k = space.kappa_c(i, j)
        rels.append((f"[g{i + 1},g{j + 1}]", comm(g(i), g(j)), pos(u) if k else []))
        rels.append((f"[f{i + 1},f{j + 1}]", comm(f(i), f(j)), pos(v) if k else []))
    for i, j in itertools.product(range(n), repeat=2):
        k = space.kappa_c(i, j)
        rhs = pos(u, v) if k else []
        rhs += pos(*[h(m) for m in range(n) if space.alpha_c(i, j, m)])
        rels.append((f"[g{i + 1},f{j + 1}]", comm(g(i), f(j)), rhs))
        d = pos(u) if i == j else []
        rels.append((f"[g{i + 1},h{j + 1}]", comm(g(i), h(j)), d))
        rels.append((f"[f{i + 1},h{j + 1}]", comm(f(i), h(j)), pos(v) if i == j else []))
        rels.append((f"[h{i + 1},h{j + 1}]", comm(h(i), h(j)), []))
    for a in range(3 * n):
        rels.append((f"[{letter_name(n, a)},u]", comm(a, u), []))
        rels.append((f"[{letter_name(n, a)},v]", comm(a, v), []))
    rels.append(("[u,v]", comm(u, v), []))
    return rels


def _sample_or_all(G: TrialityGroup, limit: int, samples: int, rng) -> tuple[np.ndarray, str]:
    if G.order <= limit:
        return G.all_codes(), "exhaustive"
    return G.random_codes(rng, samples), "sampled"


def verify_presentation(
    G: TrialityGroup,
    samples: int = 100_000,
    seed: int = 0,
    assoc_budget: int = ASSOC_BUDGET,
    map_limit: int = 1 << 11,
) -> Report:
    """Relations, associativity, and the laws of sigma and rho.

    Associativity is exhaustive when |G|^3 fits ``assoc_budget``; sigma and
    rho are checked on every element while |G| <= ``map_limit``, otherwise
    on the generators plus ``samples`` random elements.
    """
    report = Report("presentation", seed=seed)
    rng = rng_for(seed, "presentation")
    n = G.n
    rels = relations(n, G.space)
    for name, lhs, rhs in rels:
        left, right = G.evaluate(lhs), G.evaluate(rhs)
        report.add("relations", left == right, name)

    # sigma and rho carry every relation to a true relation
    for mname in ("sigma", "rho"):
        imgs = G._images[mname]
        for name, lhs, rhs in rels:
            left = G.evaluate(lhs, imgs.__getitem__)
            right = G.evaluate(rhs, imgs.__getitem__)
            report.add(f"{mname}-preserves-relations", left == right, name)

    _check_associativity(G, report, rng, samples, assoc_budget)

    codes, how = _sample_or_all(G, map_limit, samples, rng)
    codes = np.concatenate([codes, np.array([G.encode(e) for e in G.generators()], dtype=np.int64)])
    for label, m, k in (("sigma^2", SIGMA, 2), ("rho^3", RHO, 3), ("(sigma*rho)^2", SIGMA * RHO, 2)):
        img = codes
        for _ in range(k):
            img = G.apply_codes(m, img)
        bad = np.nonzero(img != codes)[0]
        report.check(f"{label}=id ({how})").record(codes.size - bad.size, codes.size, _w(G, codes, bad))
    report.mode = "exhaustive" if G.order ** 3 <= assoc_budget and how == "exhaustive" else "mixed"
    return report


def _w(G, codes, bad):
    return None if bad.size == 0 else G.decode(codes[bad[0]]).key()


def _check_associativity(G: TrialityGroup, report: Report, rng, samples: int, budget: int) -> None:
    chk = report.check("associativity")
    if G.order ** 3 <= budget:
        table = G.cayley_codes()
        idx = np.arange(G.order)
        for a in range(G.order):
            left = table[table[a][:, None], idx[None, :]]  # (ab)c
            right = table[a][table]  # a(bc)
            bad = np.argwhere(left != right)
            chk.record(G.order ** 2 - len(bad), G.order ** 2, None if len(bad) == 0 else (
                G.decode(a).key(), G.decode(bad[0][0]).key(), G.decode(bad[0][1]).key()))
        chk.name = "associativity (exhaustive)"
    else:
        a, b, c = (G.random_codes(rng, samples) for _ in range(3))
        left = G.mul_codes(G.mul_codes(a, b), c)
        right = G.mul_codes(a, G.mul_codes(b, c))
        bad = np.nonzero(left != right)[0]
        w = None if bad.size == 0 else tuple(G.decode(t[bad[0]]).key() for t in (a, b, c))
        chk.record(samples - bad.size, samples, w)
        chk.name = "associativity (sampled)"


def triality_report(G: TrialityGroup, limit: int = 1 << 14, samples: int = 100_000, seed: int = 0) -> Report:
    rng = rng_for(seed, "triality")
    codes, how = _sample_or_all(G, limit, samples, rng)
    ok = G.triality_codes(codes)
    report = Report("triality", how, seed=seed)
    bad = np.nonzero(~ok)[0]
    report.check("triality-identity").record(codes.size - bad.size, codes.size, _w(G, codes, bad))
    return report


def parker_check(
    G: TrialityGroup,
    samples: int = 1000,
    seed: int = 0,
    pairs: Sequence[tuple[int, int]] | None = None,
    exhaustive: bool = False,
) -> Report:
    """(tau_i tau_j)^3 acts trivially for conjugates tau_i of sigma_i, i != j.

    Triviality is tested on all generators of G, which decides it.  Pairs
    with i == j fall outside the criterion and are counted as skipped.
    """
    H = Holomorph(G)
    rng = rng_for(seed, "parker")
    report = Report("parker", "exhaustive" if exhaustive else "sampled", seed=seed)
    chk = report.check("(tau_i tau_j)^3 = id")
    gens = G.generators()
    index_pairs = list(pairs) if pairs is not None else [(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i != j]
    if exhaustive:
        if G.order > 64:
            raise CapacityError("exhaustive Parker check is limited to |G| <= 64")
        elems = [G.decode(c) for c in G.all_codes()]
        trials = ((i, j, a, b) for i, j in index_pairs for a in elems for b in elems)
    else:
        def draw():
            for k in range(samples):
                i, j = index_pairs[k % len(index_pairs)]
                a, b = (G.decode(c) for c in G.random_codes(rng, 2))
                yield i, j, a, b
        trials = draw()
    for i, j, a, b in trials:
        if i == j:
            chk.skipped += 1
            continue
        ti = H.conj(H.of_map(involution(i)), H.of_group(a))
        tj = H.conj(H.of_map(involution(j)), H.of_group(b))
        p = H.mul(ti, tj)
        cube = H.product(p, p, p)
        ok, where = H.is_trivial_on(cube, gens)
        chk.record(int(ok), 1, None if ok else (i, j, a.key(), b.key(), where.key()))
    return report


def index_check(G: TrialityGroup, enum_limit: int = 1 << 20) -> Report:
    """|G : H3| = |H2 : H2 n H3| = 2^(n+1), with intersections <h_1..h_n>."""
    n = G.n
    report = Report("index")
    order = 1 << (3 * n + 2)
    # each membership predicate fixes n+1 bits of the normal form
    h_order = order >> (n + 1)
    inter = 1 << n
    report.add("|G| = 2^(3n+2)", G.order == order, G.order)
    report.add("|G:H3| = |H2:H2nH3| = 2^(n+1)", order // h_order == h_order // inter == 1 << (n + 1))
    report.data.update({"|G|": order, "|H_i|": h_order, "|H_i n H_j|": inter, "index": order // h_order})
    if order <= enum_limit:
        report.mode = "coordinates+enumeration"
        codes = G.all_codes()
        mem = {k: G.membership_codes(codes, k) for k in ("H1", "H2", "H3")}
        for k, m in mem.items():
            report.add(f"|{k}| by enumeration", int(m.sum()) == h_order, int(m.sum()))
        _, _, z, _, _ = G._split(codes)
        hsub = codes == (z << 2 * n)
        for a, b in (("H1", "H2"), ("H1", "H3"), ("H2", "H3")):
            both = mem[a] & mem[b]
            report.add(f"{a} n {b} = <h_1..h_n>", bool(np.array_equal(both, hsub)), int(both.sum()))
    else:
        report.mode = "coordinates"
    return report


def centralizer_check(G: TrialityGroup, limit: int = 1 << 14, samples: int = 100_000, seed: int = 0) -> Report:
    rng = rng_for(seed, "centralizer")
    codes, how = _sample_or_all(G, limit, samples, rng)
    fixed = G.apply_codes(SIGMA, codes) == codes
    in_h3 = G.membership_codes(codes, "H3")
    report = Report("centralizer", how, seed=seed)
    bad = np.nonzero(fixed != in_h3)[0]
    report.check("fixed points of sigma = H3").record(codes.size - bad.size, codes.size, _w(G, codes, bad))
    report.data["fixed"] = int(fixed.sum())
    return report


def core_N(G: TrialityGroup, limit: int = ENUM_LIMIT) -> np.ndarray:
    """Codes of the largest normal subgroup of G inside H3, by enumeration."""
    if G.order > limit:
        raise CapacityError(f"|G| = {G.order} exceeds the enumeration limit {limit}")
    codes = G.all_codes()
    h3 = codes[G.membership_codes(codes, "H3")]
    ginv = G.inv_codes(codes)
    conj = G.mul_codes(G.mul_codes(ginv[:, None], h3[None, :]), codes[:, None])
    keep = G.membership_codes(conj, "H3").all(axis=0)
    return np.sort(h3[keep])


def coset_reps_report(G: TrialityGroup, limit: int = 1 << 11) -> Report:
    """Each H3-coset contains exactly one g^x u^t."""
    report = Report("coset-representatives")
    if G.order > limit:
        raise CapacityError("coset enumeration limited")
    codes = G.all_codes()
    x, t = G.coset_rep_codes(codes)
    reps = G._join(x, 0 * x, 0 * x, t, 0 * t)
    h3 = codes[G.membership_codes(codes, "H3")]
    # H3 * rep must equal the set of elements mapping to that rep
    for r in np.unique(reps):
        coset = np.sort(G.mul_codes(h3, r))
        members = np.sort(codes[reps == r])
        report.add("coset = H3 * rep", np.array_equal(coset, members), int(r))
    report.add("number of cosets", np.unique(reps).size == 1 << (G.n + 1), int(np.unique(reps).size))
    return report
