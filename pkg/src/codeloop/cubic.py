"""Symplectic cubic spaces given by structure constants.

Indices are 0-based in the API; the text format uses 1-based indices.
Vectors of V are packed ints (bit ``i`` is the coefficient of ``b_{i+1}``)
or ``BitVec``s.  The evaluators also accept integer numpy arrays, which is
how the exhaustive checks run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .codes import DoublyEvenCode
from .errors import DimensionError, ParseError
from .f2algebra import BitVec, iter_bits, parity
from .report import Report, rng_for

DEFAULT_TRIPLE_LIMIT = 1 << 21


@dataclass(frozen=True)
class CubicSpace:
    """Structure constants sigma_i, kappa_ij (i<j), alpha_ijk (i<j<k).

    ``kappa`` and ``alpha`` hold the strictly increasing index tuples whose
    constant is 1; everything else is 0.  Symmetric and alternating
    extensions are computed on lookup.
    """

    n: int
    sigma: tuple[int, ...] = ()
    kappa: frozenset = frozenset()
    alpha: frozenset = frozenset()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("negative dimension")
        sigma = tuple(int(s) & 1 for s in self.sigma) or (0,) * self.n
        if len(sigma) != self.n:
            raise DimensionError(f"{len(sigma)} sigma constants for dimension {self.n}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "kappa", frozenset(tuple(t) for t in self.kappa))
        object.__setattr__(self, "alpha", frozenset(tuple(t) for t in self.alpha))
        for t in self.kappa:
            if len(t) != 2 or not 0 <= t[0] < t[1] < self.n:
                raise DimensionError(f"bad kappa index {t}")
        for t in self.alpha:
            if len(t) != 3 or not 0 <= t[0] < t[1] < t[2] < self.n:
                raise DimensionError(f"bad alpha index {t}")

    # constants -------------------------------------------------------------

    def sigma_c(self, i: int) -> int:
        return self.sigma[i]

    def kappa_c(self, i: int, j: int) -> int:
        if i == j:
            return 0
        return int((min(i, j), max(i, j)) in self.kappa)

    def alpha_c(self, i: int, j: int, k: int) -> int:
        if i == j or j == k or i == k:
            return 0
        return int(tuple(sorted((i, j, k))) in self.alpha)

    # derived bit masks -----------------------------------------------------

    @cached_property
    def sigma_mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.sigma) if s)

    @cached_property
    def kappa_rows(self) -> tuple[int, ...]:
        """Row i: mask of j with kappa_ij = 1 (symmetric)."""
        rows = [0] * self.n
        for i, j in self.kappa:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return tuple(rows)

    @cached_property
    def kappa_upper(self) -> tuple[int, ...]:
        return tuple(r & ~((2 << i) - 1) for i, r in enumerate(self.kappa_rows))

    @cached_property
    def alpha_pairs(self) -> tuple[tuple[int, ...], ...]:
        """Entry (i, j): mask of k with alpha_ijk = 1 (fully alternating)."""
        m = [[0] * self.n for _ in range(self.n)]
        for i, j, k in self.alpha:
            for a, b, c in itertools.permutations((i, j, k)):
                m[a][b] |= 1 << c
        return tuple(tuple(r) for r in m)

    # evaluation ------------------------------------------------------------

    def _coerce(self, *vs):
        out = []
        for v in vs:
            if isinstance(v, BitVec):
                if v.length != self.n:
                    raise DimensionError(f"vector of length {v.length} in a space of dimension {self.n}")
                v = v.bits
            elif isinstance(v, (int, np.integer)):
                v = int(v)
                if v < 0 or v >> self.n:
                    raise DimensionError(f"vector {v:#x} exceeds dimension {self.n}")
            out.append(v)
        return out

    def quad_vector(self, x):
        """Vector whose k-th coordinate is sum_{i<j} x_i x_j alpha_ijk."""
        (x,) = self._coerce(x)
        ap = self.alpha_pairs
        if isinstance(x, int):
            acc = 0
            bits = list(iter_bits(x))
            for a, i in enumerate(bits):
                for j in bits[a + 1:]:
                    acc ^= ap[i][j]
            return acc
        acc = np.zeros_like(x)
        for i, j in itertools.combinations(range(self.n), 2):
            if ap[i][j]:
                acc ^= ((x >> i) & (x >> j) & 1) * ap[i][j]
        return acc

    def bilinear_kappa(self, x, y):
        """sum_{i,j} x_i y_j kappa_ij: the bilinear form with the kappa constants."""
        x, y = self._coerce(x, y)
        if isinstance(x, int) and isinstance(y, int):
            acc = 0
            for i in iter_bits(x):
                acc ^= self.kappa_rows[i]
            return parity(acc & y)
        acc = 0
        for i in range(self.n):
            if self.kappa_rows[i]:
                acc = acc ^ (((x >> i) & 1) * self.kappa_rows[i])
        return parity(acc & y)

    def eval_sigma(self, x):
        """Cubic polynomial in the coordinates with the stored constants."""
        (x,) = self._coerce(x)
        val = parity(x & self.sigma_mask)
        if isinstance(x, int):
            bits = list(iter_bits(x))
            for i in bits:
                val ^= parity(x & self.kappa_upper[i])
            ap = self.alpha_pairs
            for a, i in enumerate(bits):
                upper = x & ~((2 << i) - 1)
                for j in bits[a + 1:]:
                    val ^= parity(ap[i][j] & upper & ~((2 << j) - 1))
            return val
        for i in range(self.n):
            if self.kappa_upper[i]:
                val = val ^ (((x >> i) & 1) * parity(x & self.kappa_upper[i]))
        for i, j in itertools.combinations(range(self.n), 2):
            up = self.alpha_pairs[i][j] & ~((2 << j) - 1)
            if up:
                val = val ^ (((x >> i) & (x >> j) & 1) * parity(x & up))
        return val

    def eval_kappa(self, x, y):
        """Polarization of sigma, written out in closed form."""
        x, y = self._coerce(x, y)
        return (
            self.bilinear_kappa(x, y)
            ^ parity(y & self.quad_vector(x))
            ^ parity(x & self.quad_vector(y))
        )

    def alpha_vector(self, x, y):
        """Vector whose k-th coordinate is alpha(x, y, b_k)."""
        x, y = self._coerce(x, y)
        ap = self.alpha_pairs
        if isinstance(x, int) and isinstance(y, int):
            acc = 0
            ybits = list(iter_bits(y))
            for i in iter_bits(x):
                row = ap[i]
                for j in ybits:
                    acc ^= row[j]
            return acc
        acc = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        for i, j in itertools.permutations(range(self.n), 2):
            if ap[i][j]:
                acc ^= ((x >> i) & (y >> j) & 1) * ap[i][j]
        return acc

    def eval_alpha(self, x, y, z):
        x, y, z = self._coerce(x, y, z)
        return parity(self.alpha_vector(x, y) & z)

    # conversions -----------------------------------------------------------

    def constants(self) -> tuple[tuple[int, ...], dict, dict]:
        """All constants with ordered indices, zeros included."""
        kappa = {t: int(t in self.kappa) for t in itertools.combinations(range(self.n), 2)}
        alpha = {t: int(t in self.alpha) for t in itertools.combinations(range(self.n), 3)}
        return self.sigma, kappa, alpha

    def with_flipped(self, kappa=(), alpha=(), sigma=()) -> "CubicSpace":
        """Copy with the listed constants toggled (test fixtures, negative controls)."""
        s = list(self.sigma)
        for i in sigma:
            s[i] ^= 1
        return CubicSpace(
            self.n,
            tuple(s),
            self.kappa.symmetric_difference(map(tuple, kappa)),
            self.alpha.symmetric_difference(map(tuple, alpha)),
            self.name,
        )


def from_code(code: DoublyEvenCode) -> CubicSpace:
    rows = code.basis.ints()
    n = len(rows)
    sigma = tuple((r.bit_count() // 4) & 1 for r in rows)
    kappa = {(i, j) for i, j in itertools.combinations(range(n), 2) if ((rows[i] & rows[j]).bit_count() // 2) & 1}
    alpha = {t for t in itertools.combinations(range(n), 3) if (rows[t[0]] & rows[t[1]] & rows[t[2]]).bit_count() & 1}
    return CubicSpace(n, sigma, frozenset(kappa), frozenset(alpha), code.name)


def random_space(n: int, rng: np.random.Generator, density: float = 0.5) -> CubicSpace:
    sigma = tuple(int(b) for b in rng.random(n) < density)
    kappa = frozenset(t for t in itertools.combinations(range(n), 2) if rng.random() < density)
    alpha = frozenset(t for t in itertools.combinations(range(n), 3) if rng.random() < density)
    return CubicSpace(n, sigma, kappa, alpha, f"random_{n}")


# module-level forms of the methods
def eval_sigma(space: CubicSpace, x):
    return space.eval_sigma(x)


def eval_kappa(space: CubicSpace, x, y):
    return space.eval_kappa(x, y)


def eval_alpha(space: CubicSpace, x, y, z):
    return space.eval_alpha(x, y, z)


def validate_axioms(
    space: CubicSpace,
    mode: str = "exhaustive",
    count: int = 10_000,
    seed: int = 0,
    limit: int = DEFAULT_TRIPLE_LIMIT,
) -> Report:
    """Check the polarization relations and their consequences.

    In exhaustive mode all triples (x, y, z) are used and the additivity of
    alpha in its first slot is tested against every basis vector t.  Sampled
    mode draws ``count`` random quadruples instead.
    """
    n = space.n
    size = 1 << n
    report = Report("cubic-axioms", mode)
    if mode == "exhaustive":
        if size ** 3 * max(n, 1) > limit:
            raise ValueError(f"exhaustive axiom check needs {size ** 3 * max(n, 1)} evaluations, limit {limit}")
        x, y, z = (a.ravel() for a in np.meshgrid(*(np.arange(size, dtype=np.int64),) * 3, indexing="ij"))
        ts = [np.full_like(x, 1 << k) for k in range(n)]
    elif mode == "sampled":
        report.seed = seed
        rng = rng_for(seed, "cubic-axioms")
        x, y, z, t = (rng.integers(0, size, count, dtype=np.int64) for _ in range(4))
        ts = [t]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    def tally(name, lhs, rhs, *args):
        bad = np.nonzero(np.asarray(lhs != rhs).reshape(-1))[0]
        witness = tuple(int(a[bad[0]]) for a in args) if bad.size else None
        report.check(name).record(x.size - bad.size, x.size, witness)

    sig = space.eval_sigma
    kap = space.eval_kappa
    alp = space.eval_alpha
    tally("sigma-polarization", sig(x ^ y), sig(x) ^ sig(y) ^ kap(x, y), x, y)
    tally("kappa-polarization", kap(x ^ y, z), kap(x, z) ^ kap(y, z) ^ alp(x, y, z), x, y, z)
    for t in ts:
        tally("alpha-additivity", alp(x ^ y, z, t), alp(x, z, t) ^ alp(y, z, t), x, y, z, t)
    tally("kappa-alternating", kap(x, x), 0, x)
    tally("kappa-symmetric", kap(x, y), kap(y, x), x, y)
    tally("alpha-alternating", alp(x, x, z) | alp(x, y, x) | alp(x, y, y), 0, x, y, z)
    a = alp(x, y, z)
    tally("alpha-symmetric", (a ^ alp(y, x, z)) | (a ^ alp(x, z, y)), 0, x, y, z)
    seven = sig(x ^ y ^ z) ^ sig(x ^ y) ^ sig(y ^ z) ^ sig(x ^ z) ^ sig(x) ^ sig(y) ^ sig(z)
    tally("seven-term", a, seven, x, y, z)
    return report


def parse_cubic(text: str, name: str = "") -> CubicSpace:
    n = None
    sigma = None
    kappa: dict = {}
    alpha: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "dim":
            if n is not None:
                raise ParseError("duplicate dim line", lineno)
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError("expected 'dim <n>'", lineno)
            n = int(args[0])
            continue
        if n is None:
            raise ParseError("'dim' must come first", lineno)
        if key == "sigma":
            bits = "".join(args)
            if sigma is not None:
                raise ParseError("duplicate sigma line", lineno)
            if len(bits) != n or set(bits) - {"0", "1"}:
                raise ParseError(f"sigma needs {n} bits", lineno)
            sigma = tuple(int(b) for b in bits)
        elif key in ("kappa", "alpha"):
            arity = 2 if key == "kappa" else 3
            if len(args) != arity + 1 or not all(a.isdigit() for a in args):
                raise ParseError(f"expected '{key}' with {arity} indices and a value", lineno)
            *idx, v = (int(a) for a in args)
            if v not in (0, 1):
                raise ParseError(f"value must be 0 or 1, got {v}", lineno)
            if any(not 1 <= i <= n for i in idx):
                raise ParseError(f"index out of range 1..{n}", lineno)
            if len(set(idx)) != arity:
                raise ParseError("repeated index", lineno)
            if list(idx) != sorted(idx):
                raise ParseError("indices must be strictly increasing", lineno)
            table = kappa if key == "kappa" else alpha
            t = tuple(i - 1 for i in idx)
            if t in table:
                raise ParseError(f"duplicate {key} entry", lineno)
            table[t] = v
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno)
    if n is None:
        raise ParseError("missing 'dim' line")
    return CubicSpace(
        n,
        sigma or (0,) * n,
        frozenset(t for t, v in kappa.items() if v),
        frozenset(t for t, v in alpha.items() if v),
        name,
    )


def serialize_cubic(space: CubicSpace) -> str:
    lines = [f"dim {space.n}"]
    if space.n:
        lines.append("sigma " + "".join(map(str, space.sigma)))
    lines += [f"kappa {i + 1} {j + 1} 1" for i, j in sorted(space.kappa)]
    lines += [f"alpha {i + 1} {j + 1} {k + 1} 1" for i, j, k in sorted(space.alpha)]
    return "\n".join(lines) + "\n"
