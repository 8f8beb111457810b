"""Exact desk-scale divisor model of the rational function field F_q(x).

The model enumerates places (monic irreducible polynomials plus the place
at infinity) up to a degree cap and supports exhaustive enumeration of
positive divisors, truncation at the rational places, j-profiles, the
membership predicate for the distinguished divisor family, and two routes
to its cardinality: a product-of-binomials formula and brute-force
enumeration.  Genus 0 and class number 1 are fixed facts of this model;
the counting identities verified here do not depend on either.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Iterator, NamedTuple, Sequence

from .numerics import DomainError

SUPPORTED_Q = (2, 3, 5)
MAX_DEGREE_CAP = 8


# ----------------------------------------------------------------------
# polynomials over F_q (ascending coefficient tuples, monic)
# ----------------------------------------------------------------------

def _poly_mod(a: tuple[int, ...], b: tuple[int, ...], q: int) -> tuple[int, ...]:
    """Remainder of a modulo monic b, coefficients ascending."""
    r = list(a)
    db = len(b) - 1
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        lead = r[-1]
        shift = len(r) - 1 - db
        for i, c in enumerate(b):
            r[shift + i] = (r[shift + i] - lead * c) % q
        while r and r[-1] == 0:
            r.pop()
    return tuple(r)


def necklace_count(q: int, d: int) -> int:
    """Number of degree-d monic irreducible polynomials over F_q."""
    def mobius(n: int) -> int:
        result, p = 1, 2
        while p * p <= n:
            if n % p == 0:
                n //= p
                if n % p == 0:
                    return 0
                result = -result
            p += 1
        return -result if n > 1 else result

    total = 0
    e = 1
    while e <= d:
        if d % e == 0:
            total += mobius(e) * q ** (d // e)
        e += 1
    return total // d


@dataclass(frozen=True, order=True)
class Place:
    """A place of F_q(x): a monic irreducible polynomial, or infinity."""

    degree: int
    is_infinite: bool
    poly: tuple[int, ...] | None  # ascending coefficients incl. leading 1

    def label(self) -> str:
        if self.is_infinite:
            return "inf"
        terms = []
        for i, c in enumerate(self.poly):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("x" if c == 1 else f"{c}x")
            else:
                terms.append(f"x^{i}" if c == 1 else f"{c}x^{i}")
        return "+".join(reversed(terms)) or "0"


class FunctionFieldModel:
    """Places of F_q(x) up to a degree cap, with counting caches."""

    def __init__(self, q: int, max_degree: int, places: tuple[Place, ...]):
        self.q = q
        self.max_degree = max_degree
        self.places = places
        self.rational_places = tuple(p for p in places if p.degree == 1)
        self.genus = 0
        self.class_number = 1
        self._divisor_lists: dict[int, tuple["Divisor", ...]] = {}
        self._off_rational_counts: dict[int, int] = {}
        self._support_census: dict[int, Counter] = {}
        self._profile_census: dict[tuple[int, int], Counter] = {}

    @property
    def n(self) -> int:
        return len(self.rational_places)

    @property
    def infinite_place(self) -> Place:
        return self.rational_places[-1]

    def finite_place(self, coeffs: Sequence[int]) -> Place:
        key = tuple(c % self.q for c in coeffs)
        for place in self.places:
            if not place.is_infinite and place.poly == key:
                return place
        raise DomainError(f"no place with polynomial coefficients {key}")

    def places_of_degree(self, d: int) -> tuple[Place, ...]:
        return tuple(p for p in self.places if p.degree == d)

    def require_cap(self, degree: int) -> None:
        if degree > self.max_degree:
            raise DomainError(
                f"model degree cap {self.max_degree} is too small for degree {degree}"
            )

    # -- enumeration ---------------------------------------------------
    def divisors_of_degree(self, degree: int) -> tuple["Divisor", ...]:
        self.require_cap(degree)
        if degree not in self._divisor_lists:
            self._divisor_lists[degree] = tuple(_enumerate(self.places, degree))
        return self._divisor_lists[degree]

    def off_rational_count(self, degree: int) -> int:
        """Positive divisors of this degree supported off the rational places."""
        if degree < 0:
            return 0
        self.require_cap(degree)
        if degree not in self._off_rational_counts:
            off = tuple(p for p in self.places if p.degree >= 2)
            self._off_rational_counts[degree] = sum(1 for _ in _enumerate(off, degree))
        return self._off_rational_counts[degree]


def enumerate_places(q: int, max_degree: int) -> FunctionFieldModel:
    """All places of degree <= max_degree, by exhaustive irreducibility tests."""
    if q not in SUPPORTED_Q:
        raise DomainError(f"supported field sizes are {SUPPORTED_Q}, got {q}")
    if not 1 <= max_degree <= MAX_DEGREE_CAP:
        raise DomainError(f"max_degree must be in [1, {MAX_DEGREE_CAP}]")
    irreducible: dict[int, list[tuple[int, ...]]] = {}
    for d in range(1, max_degree + 1):
        found = []
        for low in product(range(q), repeat=d):
            poly = low + (1,)
            if d == 1:
                found.append(poly)
                continue
            divisor_found = False
            for e in range(1, d // 2 + 1):
                for irr in irreducible[e]:
                    if not _poly_mod(poly, irr, q):
                        divisor_found = True
                        break
                if divisor_found:
                    break
            if not divisor_found:
                found.append(poly)
        irreducible[d] = found
    places = []
    for d in range(1, max_degree + 1):
        for poly in irreducible[d]:
            places.append(Place(degree=d, is_infinite=False, poly=poly))
        if d == 1:
            places.append(Place(degree=1, is_infinite=True, poly=None))
    places.sort()
    return FunctionFieldModel(q=q, max_degree=max_degree, places=tuple(places))


@dataclass(frozen=True)
class Divisor:
    """A positive divisor: places with multiplicities >= 1."""

    support: tuple[tuple[Place, int], ...]

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[Place, int]]) -> "Divisor":
        cleaned = {}
        for place, mult in pairs:
            if mult < 0:
                raise DomainError("divisor multiplicities must be nonnegative")
            if mult:
                cleaned[place] = cleaned.get(place, 0) + mult
        return cls(support=tuple(sorted(cleaned.items())))

    @classmethod
    def zero(cls) -> "Divisor":
        return cls(support=())

    @property
    def degree(self) -> int:
        return sum(place.degree * mult for place, mult in self.support)

    def multiplicity(self, place: Place) -> int:
        for p, mult in self.support:
            if p == place:
                return mult
        return 0


def _enumerate(places: Sequence[Place], degree: int) -> Iterator[Divisor]:
    stack: list[tuple[Place, int]] = []

    def rec(index: int, remaining: int) -> Iterator[Divisor]:
        if remaining == 0:
            yield Divisor(support=tuple(stack))
            return
        if index == len(places):
            return
        place = places[index]
        yield from rec(index + 1, remaining)
        for mult in range(1, remaining // place.degree + 1):
            stack.append((place, mult))
            yield from rec(index + 1, remaining - mult * place.degree)
            stack.pop()

    yield from rec(0, degree)


def random_divisor(model: FunctionFieldModel, degree: int,
                   rng: random.Random) -> Divisor:
    pool = model.divisors_of_degree(degree)
    return pool[rng.randrange(len(pool))]


# ----------------------------------------------------------------------
# truncation, profiles, membership
# ----------------------------------------------------------------------

def truncated_divisor(D: Divisor, m: int, model: FunctionFieldModel) -> Divisor:
    """Restriction to the rational places with multiplicities capped at m+1."""
    if m < 1:
        raise DomainError("m must be >= 1")
    pairs = []
    for place in model.rational_places:
        mult = min(m + 1, D.multiplicity(place))
        if mult:
            pairs.append((place, mult))
    return Divisor.from_pairs(pairs)


class JProfile(NamedTuple):
    counts: tuple[int, ...]  # j_0 .. j_m: places with multiplicity m - l
    weighted: int            # 2 j_1 + 3 j_2 + ... + (m+1) j_m


def j_profile(D: Divisor, m: int, model: FunctionFieldModel) -> JProfile:
    if m < 1:
        raise DomainError("m must be >= 1")
    counts = [0] * (m + 1)
    for place in model.rational_places:
        v = D.multiplicity(place)
        if v <= m:
            counts[m - v] += 1
    weighted = sum((l + 1) * counts[l] for l in range(1, m + 1))
    return JProfile(counts=tuple(counts), weighted=weighted)


def degree_identity_check(D: Divisor, m: int, model: FunctionFieldModel) -> bool:
    """deg(trunc) + sum (l+1) j_l == (m+1) n, for every positive divisor."""
    profile = j_profile(D, m, model)
    trunc = truncated_divisor(D, m, model)
    weighted_all = sum((l + 1) * profile.counts[l] for l in range(m + 1))
    return trunc.degree + weighted_all == (m + 1) * model.n


def _j_caps(Xs: Sequence[int]) -> list[int]:
    m = len(Xs)
    caps = []
    for l in range(1, m + 1):
        if l == m:
            caps.append(2 * Xs[m - 1])
        else:
            caps.append(2 * Xs[l - 1] + sum(Xs[l:]))
    return caps


def vm_member(D: Divisor, r: int, s: int, Xs: Sequence[int], m: int,
              model: FunctionFieldModel) -> bool:
    """Membership in the distinguished divisor family at (r, s; X)."""
    if not (r >= s >= 0):
        raise DomainError("vm_member requires r >= s >= 0")
    if any(x < 0 for x in Xs):
        raise DomainError("vm_member requires Xs >= 0")
    if len(Xs) != m:
        raise DomainError("Xs must have length m")
    if D.degree != r:
        return False
    profile = j_profile(D, m, model)
    if truncated_divisor(D, m, model).degree < s:
        return False
    caps = _j_caps(Xs)
    for l in range(1, m + 1):
        if profile.counts[l] > caps[l - 1]:
            return False
    budget = 2 * sum((l + 1) * x for l, x in enumerate(Xs, start=1))
    return profile.weighted <= budget


# ----------------------------------------------------------------------
# counting: exact-support constants, the product formula, and brute force
# ----------------------------------------------------------------------

def _support_census(model: FunctionFieldModel, degree: int) -> Counter:
    if degree not in model._support_census:
        tally: Counter = Counter()
        rational = set(model.rational_places)
        for D in model.divisors_of_degree(degree):
            support = frozenset(p for p, _ in D.support if p in rational)
            tally[support] += 1
        model._support_census[degree] = tally
    return model._support_census[degree]


def count_exact_support(a: int, b: int, m: int, model: FunctionFieldModel) -> int:
    """Degree-a positive divisors whose rational support is exactly a b-set.

    Counted by brute-force enumeration.  The count is independent of which
    b-subset of rational places is fixed; this is asserted on three
    deterministically sampled subsets before returning.  The truncation
    order m plays no role in the count and is accepted only for signature
    uniformity.
    """
    del m
    if not (a >= b >= 0):
        raise DomainError("count_exact_support requires a >= b >= 0")
    if b > model.n:
        raise DomainError("count_exact_support requires b <= n")
    model.require_cap(a)
    census = _support_census(model, a)
    rng = random.Random((a, b, model.q))
    rational = list(model.rational_places)
    counts = []
    for _ in range(3):
        subset = frozenset(rng.sample(rational, b))
        counts.append(census.get(subset, 0))
    if len(set(counts)) != 1:
        raise ArithmeticError(
            f"exact-support count depends on the chosen subset: {counts}"
        )
    return counts[0]


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n or n < 0:
        return 0
    return comb(n, k)


def profile_census(model: FunctionFieldModel, m: int, r: int) -> Counter:
    """Counter over (deg trunc, (j_1..j_m)) for all degree-r divisors."""
    key = (m, r)
    if key not in model._profile_census:
        tally: Counter = Counter()
        for D in model.divisors_of_degree(r):
            profile = j_profile(D, m, model)
            t = truncated_divisor(D, m, model).degree
            tally[(t, profile.counts[1:])] += 1
        model._profile_census[key] = tally
    return model._profile_census[key]


class UCount(NamedTuple):
    formula: int
    brute: int
    nonempty_predicted: bool


def count_u(r: int, t: int, js: Sequence[int], m: int,
            model: FunctionFieldModel) -> UCount:
    """Two routes to |{D >= 0 : deg D = r, deg trunc = t, j-profile = js}|.

    ``formula`` multiplies the placement binomials by the exact-support
    constant; ``brute`` enumerates.  ``nonempty_predicted`` evaluates the
    closed-form emptiness criterion, including the genus-0 side condition
    that a positive divisor of degree r - t off the rational places exists
    iff r - t is 0 or at least 2.
    """
    if not (r >= t >= 0):
        raise DomainError("count_u requires r >= t >= 0")
    if len(js) != m:
        raise DomainError("js must have length m")
    if any(j < 0 for j in js):
        raise DomainError("count_u requires js >= 0")
    model.require_cap(r)
    n = model.n
    sj = sum(js)
    swj = sum(l * j for l, j in enumerate(js, start=1))

    formula = 1
    remaining = n
    for l in range(m, 0, -1):
        formula *= _binom(remaining, js[l - 1])
        remaining -= js[l - 1]
    t0 = t - m * n + swj
    formula *= _binom(n - sj, t0)
    if formula:
        a, b = r - m * n + swj, t0
        if b < 0 or a < b or b > n:
            formula = 0
        else:
            formula *= count_exact_support(a, b, m, model)

    brute = profile_census(model, m, r).get((t, tuple(js)), 0)

    lower = m * n - swj
    upper = (m + 1) * n - (sj + swj)
    nonempty = lower <= t <= upper
    if nonempty and t == lower and r - t == 1:
        nonempty = False
    return UCount(formula=formula, brute=brute, nonempty_predicted=nonempty)


def vm_partition(r: int, s: int, Xs: Sequence[int], m: int,
                 model: FunctionFieldModel) -> dict[tuple[int, tuple[int, ...]], int]:
    """Member counts of the distinguished family keyed by (t, j-tuple).

    The keys witness that the family decomposes as a disjoint union over
    profile cells; summing the values gives the brute-force cardinality.
    """
    caps = _j_caps(Xs)
    budget = 2 * sum((l + 1) * x for l, x in enumerate(Xs, start=1))
    out = {}
    for (t, js), count in sorted(profile_census(model, m, r).items()):
        if t < s:
            continue
        if any(j > cap for j, cap in zip(js, caps)):
            continue
        if sum((l + 1) * j for l, j in enumerate(js, start=1)) > budget:
            continue
        out[(t, js)] = count
    return out


def count_vm(r: int, s: int, Xs: Sequence[int], m: int,
             model: FunctionFieldModel) -> tuple[int, int]:
    """(sum of the formula over the profile cells, brute-force count).

    s exceeding r gives an empty family (the truncated degree cannot
    exceed the degree), reported as (0, 0) rather than an error.
    """
    if r < 0 or s < 0:
        raise DomainError("count_vm requires r >= 0 and s >= 0")
    if s > r:
        return 0, 0
    if len(Xs) != m:
        raise DomainError("Xs must have length m")
    if any(x < 0 for x in Xs):
        raise DomainError("count_vm requires Xs >= 0")
    model.require_cap(r)
    n = model.n
    caps = _j_caps(Xs)
    budget = 2 * sum((l + 1) * x for l, x in enumerate(Xs, start=1))

    sum_formula = 0
    for js in product(*(range(cap + 1) for cap in caps)):
        if sum((l + 1) * j for l, j in enumerate(js, start=1)) > budget:
            continue
        swj = sum(l * j for l, j in enumerate(js, start=1))
        sj = sum(js)
        t_lo = max(s, m * n - swj)
        t_hi = min(r, (m + 1) * n - (sj + swj))
        for t in range(t_lo, t_hi + 1):
            sum_formula += count_u(r, t, js, m, model).formula

    brute = sum(vm_partition(r, s, Xs, m, model).values())
    return sum_formula, brute


# ----------------------------------------------------------------------
# verification grid
# ----------------------------------------------------------------------

GRID_RMAX = {2: 5, 3: 4}


def run_divisor_verification(j_limit: int = 3, x_limit: int = 3) -> dict:
    """Exhaustive formula-vs-brute grids; returns a JSON-ready report."""
    report = {
        "grids": [],
        "total_checks": 0,
        "mismatches": [],
        "passed": True,
    }
    for q, rmax in GRID_RMAX.items():
        model = enumerate_places(q, rmax)
        for m in (1, 2):
            grid = {"q": q, "m": m, "r_max": rmax,
                    "count_u_checks": 0, "count_vm_checks": 0,
                    "emptiness_checks": 0}
            for r in range(rmax + 1):
                for t in range(r + 1):
                    for js in product(range(j_limit + 1), repeat=m):
                        result = count_u(r, t, js, m, model)
                        grid["count_u_checks"] += 1
                        grid["emptiness_checks"] += 1
                        report["total_checks"] += 2
                        if result.formula != result.brute:
                            report["mismatches"].append({
                                "kind": "count_u", "q": q, "m": m, "r": r,
                                "t": t, "js": list(js),
                                "formula": result.formula, "brute": result.brute,
                            })
                        if result.nonempty_predicted != (result.brute > 0):
                            report["mismatches"].append({
                                "kind": "emptiness", "q": q, "m": m, "r": r,
                                "t": t, "js": list(js),
                                "predicted": result.nonempty_predicted,
                                "brute": result.brute,
                            })
                for s in range(r + 1):
                    for Xs in product(range(x_limit + 1), repeat=m):
                        sum_formula, brute = count_vm(r, s, Xs, m, model)
                        grid["count_vm_checks"] += 1
                        report["total_checks"] += 1
                        if sum_formula != brute:
                            report["mismatches"].append({
                                "kind": "count_vm", "q": q, "m": m, "r": r,
                                "s": s, "Xs": list(Xs),
                                "formula": sum_formula, "brute": brute,
                            })
            report["grids"].append(grid)

    # reduced third-order grid: the counting formula only
    model = enumerate_places(2, 4)
    grid = {"q": 2, "m": 3, "r_max": 4,
            "count_u_checks": 0, "count_vm_checks": 0, "emptiness_checks": 0}
    for r in range(5):
        for t in range(r + 1):
            for js in product(range(3), repeat=3):
                result = count_u(r, t, js, 3, model)
                grid["count_u_checks"] += 1
                grid["emptiness_checks"] += 1
                report["total_checks"] += 2
                if result.formula != result.brute:
                    report["mismatches"].append({
                        "kind": "count_u", "q": 2, "m": 3, "r": r, "t": t,
                        "js": list(js), "formula": result.formula,
                        "brute": result.brute,
                    })
                if result.nonempty_predicted != (result.brute > 0):
                    report["mismatches"].append({
                        "kind": "emptiness", "q": 2, "m": 3, "r": r, "t": t,
                        "js": list(js), "predicted": result.nonempty_predicted,
                        "brute": result.brute,
                    })
        for s in range(r + 1):
            for Xs in product(range(2), repeat=3):
                sum_formula, brute = count_vm(r, s, Xs, 3, model)
                grid["count_vm_checks"] += 1
                report["total_checks"] += 1
                if sum_formula != brute:
                    report["mismatches"].append({
                        "kind": "count_vm", "q": 2, "m": 3, "r": r, "s": s,
                        "Xs": list(Xs), "formula": sum_formula, "brute": brute,
                    })
    report["grids"].append(grid)

    report["passed"] = not report["mismatches"]
    return report
