"""Index-set combinatorics of blocked vectors over F_q, with a toy code.

A vector of F_q^{mn} is read as n blocks of m symbols.  Each nonzero block
belongs to exactly one index set I_l, determined by its highest nonzero
symbol position; the weighted sum 2|I_1| + 3|I_2| + ... + (m+1)|I_m| is
subadditive under differences and obeys containment relations that drive
the minimum-distance argument.  Both facts are verified here exhaustively
at desk scale, together with a toy realization of the evaluation maps: all
polynomials of degree <= r over F_q expanded at chosen evaluation points
via Hasse (binomial-weighted) derivative coefficients, which stay correct
in positive characteristic where ordinary derivatives degenerate.

Block symbol order: position l of block i holds the expansion coefficient
f^{(m-l)} at point i, so the last symbol is the plain value f(P_i).
Getting this order wrong silently breaks the profile identity; a dedicated
unit test pins it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Sequence

import numpy as np

from .numerics import DomainError

ENUMERATION_GUARD = 10 ** 7
_PRIMES_SMALL = (2, 3, 5, 7)


@dataclass(frozen=True)
class IndexedVector:
    """An element of F_q^{mn} organized as n blocks of m symbols (0-based i)."""

    q: int
    m: int
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.blocks) != self.n:
            raise DomainError("block count must equal n")
        for block in self.blocks:
            if len(block) != self.m:
                raise DomainError("every block must hold m symbols")
            if any(not 0 <= sym < self.q for sym in block):
                raise DomainError("symbols must lie in [0, q)")

    @classmethod
    def zero(cls, q: int, m: int, n: int) -> "IndexedVector":
        return cls(q=q, m=m, n=n, blocks=tuple((0,) * m for _ in range(n)))

    @classmethod
    def from_array(cls, q: int, arr: np.ndarray) -> "IndexedVector":
        n, m = arr.shape
        return cls(q=q, m=m, n=n,
                   blocks=tuple(tuple(int(s) for s in row) for row in arr))

    def to_array(self) -> np.ndarray:
        return np.array(self.blocks, dtype=np.int64)

    def __sub__(self, other: "IndexedVector") -> "IndexedVector":
        if (self.q, self.m, self.n) != (other.q, other.m, other.n):
            raise DomainError("vector shapes differ")
        return IndexedVector.from_array(
            self.q, (self.to_array() - other.to_array()) % self.q)


def block_levels(arr: np.ndarray) -> np.ndarray:
    """Level of each block: highest 1-based nonzero symbol position, else 0."""
    nz = arr != 0
    rev = nz[..., ::-1]
    has = rev.any(axis=-1)
    first = rev.argmax(axis=-1)
    return np.where(has, arr.shape[-1] - first, 0)


def index_sets(v: IndexedVector) -> tuple[frozenset[int], ...]:
    """(I_1, ..., I_m) as 0-based block-index sets; zero blocks in none."""
    levels = block_levels(v.to_array())
    return tuple(frozenset(np.flatnonzero(levels == l).tolist())
                 for l in range(1, v.m + 1))


def weighted_index_sum(v: IndexedVector) -> int:
    """2|I_1| + 3|I_2| + ... + (m+1)|I_m|."""
    levels = block_levels(v.to_array())
    return int(sum((l + 1) * int((levels == l).sum()) for l in range(1, v.m + 1)))


def check_subadditivity(a: IndexedVector, b: IndexedVector) -> bool:
    """Weighted sum of a - b never exceeds the sum of the two weighted sums."""
    return weighted_index_sum(a - b) <= weighted_index_sum(a) + weighted_index_sum(b)


def check_containments(a: IndexedVector, b: IndexedVector) -> bool:
    """I_l(a-b) within I_l(a), I_l(b), and the higher-level intersections."""
    if (a.q, a.m, a.n) != (b.q, b.m, b.n):
        raise DomainError("vector shapes differ")
    sets_a, sets_b, sets_d = index_sets(a), index_sets(b), index_sets(a - b)
    m = a.m
    for l in range(1, m + 1):
        allowed = set(sets_a[l - 1]) | set(sets_b[l - 1])
        for nu in range(l + 1, m + 1):
            allowed |= set(sets_a[nu - 1]) & set(sets_b[nu - 1])
        if not set(sets_d[l - 1]) <= allowed:
            return False
    return True


def batch_check_lemmas(arr_a: np.ndarray, arr_b: np.ndarray, q: int
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (subadditivity_ok, containments_ok) over a pair batch.

    Arrays have shape (N, n, m); returns two boolean arrays of length N.
    """
    m = arr_a.shape[-1]
    lev_a = block_levels(arr_a)
    lev_b = block_levels(arr_b)
    lev_d = block_levels((arr_a - arr_b) % q)

    def weighted(lev: np.ndarray) -> np.ndarray:
        total = np.zeros(lev.shape[0], dtype=np.int64)
        for l in range(1, m + 1):
            total += (l + 1) * (lev == l).sum(axis=-1)
        return total

    sub_ok = weighted(lev_d) <= weighted(lev_a) + weighted(lev_b)

    cont_ok = np.ones(arr_a.shape[0], dtype=bool)
    for l in range(1, m + 1):
        in_dl = lev_d == l
        allowed = (lev_a == l) | (lev_b == l) | ((lev_a == lev_b) & (lev_a > l))
        cont_ok &= ~(in_dl & ~allowed).any(axis=-1)
    return sub_ok, cont_ok


# ----------------------------------------------------------------------
# the box M and its cardinality
# ----------------------------------------------------------------------

def _floors(xs: Sequence, n: int) -> list[int]:
    floors = []
    for x in xs:
        fx = Fraction(x)
        if fx < 0:
            raise DomainError("xs must be nonnegative")
        floors.append(int(fx * n // 1))
    return floors


def m_set_lower_bound(xs: Sequence, q: int, m: int, n: int) -> int:
    """Exact product-of-binomials lower bound on |M(xs; 0)|, as a big integer.

    Counts the vectors whose level profile is exactly (floor(x_l n))_l; the
    box M contains these, so the product never overcounts.  Returns 0 when
    the floors cannot fit inside n blocks.
    """
    if len(xs) != m:
        raise DomainError("xs must have length m")
    if sum(Fraction(x) for x in xs) > 1:
        raise DomainError("m_set_lower_bound requires sum(xs) <= 1")
    floors = _floors(xs, n)
    total = 1
    remaining = n
    for l in range(m, 0, -1):
        k = floors[l - 1]
        if k < 0 or k > remaining:
            return 0
        total *= comb(remaining, k) * (q - 1) ** k * q ** ((l - 1) * k)
        remaining -= k
    return total


def _all_vectors(q: int, m: int, n: int) -> np.ndarray:
    count = q ** (m * n)
    if count > ENUMERATION_GUARD:
        raise DomainError(
            f"q^(mn) = {count} exceeds the exhaustive-search guard {ENUMERATION_GUARD}"
        )
    digits = np.arange(count, dtype=np.int64)[:, None] // \
        (q ** np.arange(m * n, dtype=np.int64))[None, :] % q
    return digits.reshape(count, n, m)


def m_set_size_brute(q: int, m: int, n: int, xs: Sequence,
                     c: IndexedVector | None = None) -> int:
    """|M(xs; c)| by direct enumeration of all q^(mn) vectors."""
    floors = _floors(xs, n)
    vectors = _all_vectors(q, m, n)
    if c is not None:
        vectors = (vectors - c.to_array()[None]) % q
    levels = block_levels(vectors)
    ok = np.ones(len(vectors), dtype=bool)
    for l in range(1, m + 1):
        ok &= (levels == l).sum(axis=-1) <= floors[l - 1]
    return int(ok.sum())


def covering_translate(q: int, m: int, n: int, xs: Sequence,
                       subset: Sequence[IndexedVector]
                       ) -> tuple[IndexedVector, int]:
    """Translate c maximizing how much of ``subset`` lands in the box M.

    Exhausts all q^(mn) candidate translates and asserts the averaging
    lower bound |N_c| >= |subset| |M(xs; 0)| / q^(mn) before returning.
    """
    if not subset:
        raise DomainError("subset must be nonempty")
    floors = _floors(xs, n)
    candidates = _all_vectors(q, m, n)
    rows = np.stack([v.to_array() for v in subset])
    best_idx, best_count = 0, -1
    for idx in range(len(candidates)):
        shifted = (rows - candidates[idx][None]) % q
        levels = block_levels(shifted)
        ok = np.ones(len(rows), dtype=bool)
        for l in range(1, m + 1):
            ok &= (levels == l).sum(axis=-1) <= floors[l - 1]
        count = int(ok.sum())
        if count > best_count:
            best_idx, best_count = idx, count
    m_size = m_set_size_brute(q, m, n, xs)
    total = q ** (m * n)
    if best_count * total < len(subset) * m_size:
        raise ArithmeticError("covering translate fell below the averaging bound")
    return IndexedVector.from_array(q, candidates[best_idx]), best_count


# ----------------------------------------------------------------------
# toy evaluation code via Hasse expansion coefficients
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ToyCode:
    """All polynomials of degree <= r with their block and top expansions.

    ``phi[i]`` holds the n blocks (f^{(m-1)}, ..., f^{(0)}) at each
    evaluation point for polynomial index i; ``psi[i]`` holds the order-m
    coefficients.  Polynomial index i has coefficient of x^k equal to
    ``coeffs[i, k]``.
    """

    q: int
    m: int
    r: int
    eval_points: tuple[int, ...]
    coeffs: np.ndarray
    phi: np.ndarray
    psi: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eval_points)

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    def poly_index(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.r + 1:
            raise DomainError("polynomial degree exceeds the code's bound")
        index = 0
        for k, c in enumerate(coeffs):
            index += (c % self.q) * self.q ** k
        return index

    def phi_vector(self, index: int) -> IndexedVector:
        return IndexedVector.from_array(self.q, self.phi[index])


def _hasse_weights(q: int, r: int, m: int, point: int) -> np.ndarray:
    """W[k, l] = C(k, l) point^(k-l) mod q: expansion weights at one point."""
    W = np.zeros((r + 1, m + 1), dtype=np.int64)
    for k in range(r + 1):
        for l in range(min(k, m) + 1):
            W[k, l] = (comb(k, l) * pow(point, k - l, q)) % q
    return W


def build_toy_code(q: int, eval_points: Sequence[int], m: int, r: int,
                   linearity_seed: int = 0) -> ToyCode:
    """Enumerate all degree <= r polynomials and their expansions.

    Verifies additivity of both maps on 100 random pairs before returning.
    """
    if q not in _PRIMES_SMALL:
        raise DomainError(f"toy codes support prime q in {_PRIMES_SMALL}")
    points = tuple(int(a) for a in eval_points)
    if len(set(points)) != len(points):
        raise DomainError("evaluation points must be distinct")
    if not points or len(points) > q:
        raise DomainError("need 1 <= n <= q evaluation points")
    if any(not 0 <= a < q for a in points):
        raise DomainError("evaluation points must lie in [0, q)")
    if m < 1:
        raise DomainError("m must be >= 1")
    if r > 12 or q ** (r + 1) > ENUMERATION_GUARD:
        raise DomainError("toy code size guard exceeded (r <= 12, q^(r+1) <= 1e7)")

    size = q ** (r + 1)
    coeffs = (np.arange(size, dtype=np.int64)[:, None]
              // (q ** np.arange(r + 1, dtype=np.int64))[None, :]) % q
    n = len(points)
    phi = np.zeros((size, n, m), dtype=np.int64)
    psi = np.zeros((size, n), dtype=np.int64)
    for i, a in enumerate(points):
        H = coeffs @ _hasse_weights(q, r, m, a) % q  # columns: f^(0) .. f^(m)
        phi[:, i, :] = H[:, m - 1::-1]
        psi[:, i] = H[:, m]

    rng = random.Random(linearity_seed)
    for _ in range(100):
        ia, ib = rng.randrange(size), rng.randrange(size)
        isum = 0
        for k in range(r + 1):
            isum += int((coeffs[ia, k] + coeffs[ib, k]) % q) * q ** k
        if not (np.array_equal(phi[isum], (phi[ia] + phi[ib]) % q)
                and np.array_equal(psi[isum], (psi[ia] + psi[ib]) % q)):
            raise ArithmeticError("expansion maps failed the additivity check")

    return ToyCode(q=q, m=m, r=r, eval_points=points,
                   coeffs=coeffs, phi=phi, psi=psi)


def _as_index(code: ToyCode, f) -> int:
    index = code.poly_index(f) if not isinstance(f, (int, np.integer)) else int(f)
    if not 0 <= index < code.size:
        raise DomainError("polynomial index out of range")
    if index == 0:
        raise DomainError("the zero polynomial is excluded")
    return index


def root_multiplicities(code: ToyCode, index: int) -> list[int]:
    """Multiplicity of each evaluation point as a root of polynomial index."""
    out = []
    for a in code.eval_points:
        poly = [int(c) for c in code.coeffs[index]]
        while poly and poly[-1] == 0:
            poly.pop()
        mult = 0
        while poly:
            value = 0
            for c in reversed(poly):
                value = (value * a + c) % code.q
            if value != 0:
                break
            # synthetic division by (x - a)
            quotient = []
            carry = 0
            for c in reversed(poly):
                carry = (carry * a + c) % code.q
                quotient.append(carry)
            quotient.pop()  # drop the remainder (zero here)
            poly = list(reversed(quotient))
            mult += 1
        out.append(mult)
    return out


def check_zero_divisor_profile(code: ToyCode, f) -> bool:
    """Zero-multiplicity profile of f matches the index-set sizes of its blocks."""
    index = _as_index(code, f)
    m = code.m
    mults = root_multiplicities(code, index)
    j_counts = [0] * (m + 1)
    for v in mults:
        if v <= m:
            j_counts[m - v] += 1
    vec = code.phi_vector(index)
    sets = index_sets(vec)
    for l in range(1, m + 1):
        if j_counts[l] != len(sets[l - 1]):
            return False
    weighted_j = sum((l + 1) * j_counts[l] for l in range(1, m + 1))
    return weighted_j == weighted_index_sum(vec)


def check_weight_inequality(code: ToyCode, f) -> bool:
    """(m+1)n - deg(truncated zero divisor) <= wt(psi(f)) + weighted profile."""
    index = _as_index(code, f)
    m, n = code.m, code.n
    mults = root_multiplicities(code, index)
    trunc_degree = sum(min(m + 1, v) for v in mults)
    j_counts = [0] * (m + 1)
    for v in mults:
        if v <= m:
            j_counts[m - v] += 1
    weighted_j = sum((l + 1) * j_counts[l] for l in range(1, m + 1))
    weight = int((code.psi[index] != 0).sum())
    return (m + 1) * n - trunc_degree <= weight + weighted_j


# ----------------------------------------------------------------------
# verification suite
# ----------------------------------------------------------------------

def run_vector_verification(seed: int = 0, random_pairs: int = 10 ** 5,
                            random_polys: int = 10 ** 4) -> dict:
    """Exhaustive and randomized checks; returns a JSON-ready report."""
    rng = random.Random(seed)
    report = {"checks": [], "passed": True, "first_counterexample": None}

    def record(name: str, total: int, failures: int, detail=None):
        report["checks"].append({"name": name, "total": total, "failures": failures})
        if failures and report["first_counterexample"] is None:
            report["first_counterexample"] = {"check": name, "detail": detail}
        if failures:
            report["passed"] = False

    # exhaustive pair lemmas at q=2, m=2, n=3
    vectors = _all_vectors(2, 2, 3)
    count = len(vectors)
    arr_a = np.repeat(vectors, count, axis=0)
    arr_b = np.tile(vectors, (count, 1, 1))
    sub_ok, cont_ok = batch_check_lemmas(arr_a, arr_b, 2)
    record("subadditivity_exhaustive_q2m2n3", count * count, int((~sub_ok).sum()),
           detail=_first_failure(arr_a, arr_b, sub_ok))
    record("containments_exhaustive_q2m2n3", count * count, int((~cont_ok).sum()),
           detail=_first_failure(arr_a, arr_b, cont_ok))

    # randomized pair lemmas at q=3, m=3, n=4
    shape = (random_pairs, 4, 3)
    arr_a = np.array([[rng.randrange(3) for _ in range(12)]
                      for _ in range(random_pairs)], dtype=np.int64).reshape(shape)
    arr_b = np.array([[rng.randrange(3) for _ in range(12)]
                      for _ in range(random_pairs)], dtype=np.int64).reshape(shape)
    sub_ok, cont_ok = batch_check_lemmas(arr_a, arr_b, 3)
    record("subadditivity_random_q3m3n4", random_pairs, int((~sub_ok).sum()),
           detail=_first_failure(arr_a, arr_b, sub_ok))
    record("containments_random_q3m3n4", random_pairs, int((~cont_ok).sum()),
           detail=_first_failure(arr_a, arr_b, cont_ok))

    # zero-divisor profile: exhaustive small grid, then randomized larger one
    code = build_toy_code(2, (0, 1), 2, 4)
    failures = sum(not check_zero_divisor_profile(code, i)
                   for i in range(1, code.size))
    record("zero_divisor_profile_exhaustive_q2m2n2r4", code.size - 1, failures)

    code5 = build_toy_code(5, (0, 1, 2, 3, 4), 2, 6)
    sample = [rng.randrange(1, code5.size) for _ in range(random_polys)]
    failures = sum(not check_zero_divisor_profile(code5, i) for i in sample)
    record("zero_divisor_profile_random_q5m2n5r6", random_polys, failures)

    # weight inequality: exhaustive
    code_w = build_toy_code(2, (0, 1), 1, 3)
    failures = sum(not check_weight_inequality(code_w, i)
                   for i in range(1, code_w.size))
    record("weight_inequality_exhaustive_q2m1n2r3", code_w.size - 1, failures)
    failures = sum(not check_weight_inequality(code5, i) for i in sample)
    record("weight_inequality_random_q5m2n5r6", random_polys, failures)

    # translation invariance of the box size
    xs = (Fraction(1, 3), Fraction(1, 3))
    base = m_set_size_brute(2, 2, 3, xs)
    failures = 0
    for _ in range(20):
        c = IndexedVector.from_array(2, np.array(
            [[rng.randrange(2) for _ in range(2)] for _ in range(3)]))
        if m_set_size_brute(2, 2, 3, xs, c) != base:
            failures += 1
    record("m_set_translation_invariance_q2m2n3", 20, failures)

    # product formula is a lower bound for the box size
    formula = m_set_lower_bound(xs, 2, 2, 3)
    record("m_set_formula_lower_bound_q2m2n3", 1, int(not base >= formula),
           detail={"formula": formula, "brute": base})

    # covering translate on the image of a toy code (q=2, m=1, n=2, r=2)
    code_c = build_toy_code(2, (0, 1), 1, 2)
    subset = [code_c.phi_vector(i) for i in range(code_c.size)]
    _, hit = covering_translate(2, 1, code_c.n, (Fraction(1, 3),), subset)
    m_size = m_set_size_brute(2, 1, code_c.n, (Fraction(1, 3),))
    needed = -(-len(subset) * m_size // 2 ** code_c.n)  # ceil
    record("covering_translate_toy_image", 1, int(not hit >= needed),
           detail={"hit": hit, "needed": needed})

    # covering translate with an arbitrary subset at q=2, m=2, n=3
    pool = _all_vectors(2, 2, 3)
    picks = [IndexedVector.from_array(2, pool[rng.randrange(len(pool))])
             for _ in range(8)]
    xs23 = (Fraction(1, 3), Fraction(1, 3))
    _, hit = covering_translate(2, 2, 3, xs23, picks)
    m_size = m_set_size_brute(2, 2, 3, xs23)
    needed = -(-len(picks) * m_size // 2 ** 6)
    record("covering_translate_random_subset", 1, int(not hit >= needed),
           detail={"hit": hit, "needed": needed})

    return report


def _first_failure(arr_a, arr_b, ok: np.ndarray):
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return {"a": arr_a[i].tolist(), "b": arr_b[i].tolist()}
