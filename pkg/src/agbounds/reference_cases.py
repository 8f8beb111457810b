"""Benchmark cases with known reference digit strings.

Each case fixes a field size q, the profile value gamma (gamma_1 = gamma,
all higher gamma_l zero), two exact rational relative-distance inputs, the
known truncated decimal expansions of the linear bound at each input, the
x-vectors that certify a strictly positive general-over-linear gain, the
gain margins, and the competing-bound constants the linear bound must beat.
All decimal expansions are truncated, not rounded; comparisons use the
first 18 fractional digits to absorb the ambiguity of a truncated 20th.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class DeltaCase:
    delta: Fraction
    delta_digits: str
    r_lin_digits: str
    xs: tuple[Fraction, ...]
    gain_margin: Fraction
    competitor_digits: str
    competitor_margin: Fraction


@dataclass(frozen=True)
class ReferenceCase:
    label: str
    q: int
    gamma: Fraction
    runtime_hint_seconds: int
    cases: tuple[DeltaCase, DeltaCase]


def _f(text: str) -> Fraction:
    return Fraction(text)


_DEN_64 = 46065097831342932365531985486767649347321318605709
_DEN_49 = 18755194537338788993696079784908084949457099261873
_DEN_2_21 = 99621193732964014413326435515634059733734238550355

REFERENCE_CASES: dict[str, ReferenceCase] = {
    "7.1": ReferenceCase(
        label="7.1",
        q=64,
        gamma=Fraction(7),
        runtime_hint_seconds=60,
        cases=(
            DeltaCase(
                delta=Fraction(
                    13763868443250238929521503984833381597731412559044, _DEN_64),
                delta_digits="0.29879169026501515839",
                r_lin_digits="0.55835395724081743804",
                xs=(_f("3.41e-16"), _f("1.0634e-23"), _f("1.93e-31")),
                gain_margin=_f("2.711029e-17"),
                competitor_digits="0.55835371587781529071",
                competitor_margin=_f("2.4136300214732e-7"),
            ),
            DeltaCase(
                delta=Fraction(
                    32301229388092693436010481501934267749589906046665, _DEN_64),
                delta_digits="0.70120830973498484160",
                r_lin_digits="0.15593754394482448829",
                xs=(_f("3.89e-18"), _f("1.98e-26"), _f("5.87e-35")),
                gain_margin=_f("2.592642e-19"),
                competitor_digits="0.15593709640785805503",
                competitor_margin=_f("4.4753696643325e-7"),
            ),
        ),
    ),
    "7.2": ReferenceCase(
        label="7.2",
        q=49,
        gamma=Fraction(6),
        runtime_hint_seconds=60,
        cases=(
            DeltaCase(
                delta=Fraction(
                    7334559589562321721169749749908497945081695123431, _DEN_49),
                delta_digits="0.39106816913897159912",
                r_lin_digits="0.44226758374884970747",
                xs=(_f("1.93e-13"), _f("1.53e-19"), _f("7.08e-26")),
                gain_margin=_f("1.857062e-14"),
                competitor_digits="0.44226734872224546020",
                competitor_margin=_f("2.3502660424726e-7"),
            ),
            DeltaCase(
                delta=Fraction(
                    11420634947776467272526330034999587004375404138442, _DEN_49),
                delta_digits="0.60893183086102840087",
                r_lin_digits="0.22440401150099750683",
                xs=(_f("5.86e-14"), _f("3.207e-20"), _f("1.02e-26")),
                gain_margin=_f("5.258306e-15"),
                competitor_digits="0.22440368700019503856",
                competitor_margin=_f("3.2450080246826e-7"),
            ),
        ),
    ),
    "7.3": ReferenceCase(
        label="7.3",
        q=2 ** 21,
        gamma=Fraction(32766, 130),
        runtime_hint_seconds=300,
        cases=(
            DeltaCase(
                delta=Fraction(
                    1034323484865452473463726110309814032498446010098, _DEN_2_21),
                delta_digits="0.01038256465424386359",
                r_lin_digits="0.98564990803085654673",
                xs=(_f("6.29e-65"), _f("7.09e-97")),
                gain_margin=_f("1.261672e-66"),
                competitor_digits="0.98564990803085654665",
                competitor_margin=_f("7e-20"),
            ),
            DeltaCase(
                delta=Fraction(
                    98586870248098561939862709405324245701235792540257, _DEN_2_21),
                delta_digits="0.98961743534575613640",
                r_lin_digits="0.00641503733934427410",
                xs=(_f("6.5e-86"), _f("2.4e-127")),
                gain_margin=_f("9.103449e-88"),
                competitor_digits="0.00641503733934427385",
                competitor_margin=_f("2.4e-19"),
            ),
        ),
    ),
}


def seed_vectors_for(q: int, m: int) -> list[tuple[Fraction, ...]]:
    """Curated x-vector seeds for the optimizer when q matches a case."""
    seeds = []
    for case in REFERENCE_CASES.values():
        if case.q != q:
            continue
        for sub in case.cases:
            xs = list(sub.xs[:m])
            while len(xs) < m:
                xs.append(Fraction(0))
            seeds.append(tuple(xs))
    return seeds
