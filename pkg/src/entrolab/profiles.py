"""Set-function algebra over a fixed variable universe.

A universe is an ordered tuple of distinct variable labels.  Every nonempty
subset of the universe is identified with a bitmask: the i-th variable is in
the subset iff the i-th bit of the mask is set, e.g. with universe
``(X, Y, A, B)`` the mask ``0b0101 = 5`` denotes the subset ``{X, A}``.

On top of that convention this module provides

- :class:`Profile` -- an exact rational value for every nonempty subset
  (the entropy profile of an n-tuple, or any polymatroid rank function),
- :class:`LinComb` -- a rational linear combination of joint-entropy terms
  ``H(S)`` plus a constant; every information quantity expands to one,
- :class:`Inequality` -- a LinComb constrained to be ``>= 0`` or ``== 0``,
- the elemental Shannon inequalities, polymatroid checking and the six
  canonical Ingleton forms on four variables.

Entropies are measured in bits throughout.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence, Union

Scalar = Union[int, Fraction]

GE = ">=0"
EQ = "=0"


class UniverseMismatch(ValueError):
    """Two objects built over different variable universes were combined."""


class ProfileFormatError(ValueError):
    """A profile file does not conform to the text format."""


def check_names(names: Sequence[str]) -> tuple[str, ...]:
    names = tuple(names)
    if not names:
        raise ValueError("universe must contain at least one variable")
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate variable labels in {names}")
    for name in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise ValueError(f"invalid variable label {name!r}")
    return names


def mask_of(labels: Iterable[str], names: Sequence[str]) -> int:
    """Bitmask of a collection of labels within the universe `names`."""
    mask = 0
    for lab in labels:
        try:
            mask |= 1 << names.index(lab)
        except ValueError:
            raise UniverseMismatch(f"unknown variable {lab!r} in universe {tuple(names)}") from None
    return mask


def labels_of(mask: int, names: Sequence[str]) -> tuple[str, ...]:
    return tuple(names[i] for i in range(len(names)) if mask >> i & 1)


def subset_text(mask: int, names: Sequence[str]) -> str:
    return ",".join(labels_of(mask, names))


def nonempty_subsets(n: int) -> range:
    return range(1, 1 << n)


@dataclass(frozen=True)
class VarSet:
    """A subset of the universe ``{0..n-1}``, stored as a bitmask."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bitmask {self.bits:#b} out of range for n={self.n}")

    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.bits >> i & 1)

    def labels(self, names: Sequence[str]) -> tuple[str, ...]:
        return labels_of(self.bits, names)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __or__(self, other: "VarSet") -> "VarSet":
        if self.n != other.n:
            raise UniverseMismatch("VarSet sizes differ")
        return VarSet(self.bits | other.bits, self.n)

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)


class LinComb:
    """Rational linear combination of joint-entropy terms plus a constant.

    Zero coefficients are never stored; two LinCombs are equal iff their
    universes, term maps and constants are equal.
    """

    __slots__ = ("names", "terms", "constant")

    def __init__(
        self,
        names: Sequence[str],
        terms: Mapping[int, Scalar] | None = None,
        constant: Scalar = 0,
    ) -> None:
        self.names = check_names(names)
        full = (1 << len(self.names)) - 1
        clean: dict[int, Fraction] = {}
        for mask, coeff in (terms or {}).items():
            if not 0 < mask <= full:
                raise ValueError(f"term mask {mask} outside universe of size {len(self.names)}")
            c = Fraction(coeff)
            if c:
                clean[mask] = c
        self.terms = clean
        self.constant = Fraction(constant)

    @classmethod
    def entropy(cls, names: Sequence[str], labels: Iterable[str]) -> "LinComb":
        names = check_names(names)
        mask = mask_of(labels, names)
        return cls(names, {mask: Fraction(1)} if mask else {})

    def _require_same_universe(self, other: "LinComb") -> None:
        if self.names != other.names:
            raise UniverseMismatch(f"universe {self.names} != {other.names}")

    def __add__(self, other: "LinComb") -> "LinComb":
        self._require_same_universe(other)
        terms = dict(self.terms)
        for mask, coeff in other.terms.items():
            terms[mask] = terms.get(mask, Fraction(0)) + coeff
        return LinComb(self.names, terms, self.constant + other.constant)

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (-other)

    def __neg__(self) -> "LinComb":
        return self * -1

    def __mul__(self, scalar: Scalar) -> "LinComb":
        c = Fraction(scalar)
        return LinComb(self.names, {m: v * c for m, v in self.terms.items()}, self.constant * c)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinComb):
            return NotImplemented
        return (
            self.names == other.names
            and self.terms == other.terms
            and self.constant == other.constant
        )

    def __hash__(self) -> int:
        return hash((self.names, frozenset(self.terms.items()), self.constant))

    def __bool__(self) -> bool:
        return bool(self.terms) or bool(self.constant)

    def __repr__(self) -> str:
        from .exprlang import format_lincomb

        return f"LinComb({format_lincomb(self)!r})"

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.terms))

    def restricted_equal(self, other: "LinComb") -> bool:
        return self == other

    def extended(self, names: Sequence[str]) -> "LinComb":
        """Re-express over a larger universe that contains this one's labels.

        Variable order may differ; masks are re-encoded label-wise.
        """
        names = check_names(names)
        terms: dict[int, Fraction] = {}
        for mask, coeff in self.terms.items():
            new_mask = mask_of(labels_of(mask, self.names), names)
            terms[new_mask] = terms.get(new_mask, Fraction(0)) + coeff
        return LinComb(names, terms, self.constant)


@dataclass(frozen=True)
class Inequality:
    """``lhs >= 0`` or ``lhs == 0`` over a universe; relations are closed."""

    lhs: LinComb
    relation: str
    label: str

    def __post_init__(self) -> None:
        if self.relation not in (GE, EQ):
            raise ValueError(f"relation must be {GE!r} or {EQ!r}, got {self.relation!r}")


class Profile:
    """Exact rational set function on the nonempty subsets of a universe.

    Exactly ``2**n - 1`` entries; the empty set evaluates to 0 implicitly.
    """

    __slots__ = ("names", "values")

    def __init__(self, names: Sequence[str], values: Mapping[int, Scalar]) -> None:
        self.names = check_names(names)
        n = len(self.names)
        expected = set(nonempty_subsets(n))
        got = set(values)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise ValueError(
                f"profile must assign every nonempty subset exactly once; "
                f"missing masks {missing[:4]}..., extra {extra[:4]}..."
                if len(missing) > 4 or len(extra) > 4
                else f"profile subsets mismatch: missing {missing}, extra {extra}"
            )
        self.values = {mask: Fraction(v) for mask, v in values.items()}

    def __getitem__(self, mask: int) -> Fraction:
        if mask == 0:
            return Fraction(0)
        return self.values[mask]

    def get_labels(self, labels: Iterable[str]) -> Fraction:
        return self[mask_of(labels, self.names)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Profile):
            return NotImplemented
        return self.names == other.names and self.values == other.values

    def __repr__(self) -> str:
        return f"Profile(names={self.names}, n={len(self.names)})"

    def scaled(self, factor: Scalar) -> "Profile":
        f = Fraction(factor)
        return Profile(self.names, {m: v * f for m, v in self.values.items()})


class NumericProfile:
    """Float-valued profile with a stated absolute error bound per entry.

    Produced by the distribution engine, where masses are exact rationals but
    entropies are irrational in general; ``tol`` documents the bound on the
    absolute error of every entry, in bits.
    """

    __slots__ = ("names", "values", "tol")

    def __init__(self, names: Sequence[str], values: Mapping[int, float], tol: float) -> None:
        self.names = check_names(names)
        n = len(self.names)
        if set(values) != set(nonempty_subsets(n)):
            raise ValueError("numeric profile must assign every nonempty subset")
        if not tol > 0:
            raise ValueError("tol must be positive")
        self.values = {mask: float(v) for mask, v in values.items()}
        self.tol = float(tol)

    def __getitem__(self, mask: int) -> float:
        if mask == 0:
            return 0.0
        return self.values[mask]

    def get_labels(self, labels: Iterable[str]) -> float:
        return self[mask_of(labels, self.names)]

    def __repr__(self) -> str:
        return f"NumericProfile(names={self.names}, tol={self.tol:g})"


AnyProfile = Union[Profile, NumericProfile]


def evaluate(lc: LinComb, profile: AnyProfile):
    """Inner product of a LinComb with a profile, plus the constant.

    Exact :class:`Fraction` for :class:`Profile`, float for
    :class:`NumericProfile`.  Raises :class:`UniverseMismatch` if the
    universes differ.
    """
    if lc.names != profile.names:
        raise UniverseMismatch(f"universe {lc.names} != {profile.names}")
    if isinstance(profile, Profile):
        total = lc.constant
        for mask, coeff in lc.terms.items():
            total += coeff * profile[mask]
        return total
    total_f = float(lc.constant)
    for mask, coeff in lc.terms.items():
        total_f += float(coeff) * profile[mask]
    return total_f


def _elemental_masks(n: int) -> list[tuple[str, tuple[tuple[int, int], ...]]]:
    """Elemental inequalities as (kind-tag, ((mask, coeff), ...)) records."""
    full = (1 << n) - 1
    out: list[tuple[str, tuple[tuple[int, int], ...]]] = []
    for i in range(n):
        rest = full ^ (1 << i)
        if rest:
            out.append(("cond_entropy", ((full, 1), (rest, -1))))
        else:
            out.append(("cond_entropy", ((full, 1),)))
    for i in range(n - 1):
        for j in range(i + 1, n):
            a, b = 1 << i, 1 << j
            others = [k for k in range(n) if k != i and k != j]
            for sub in range(1 << len(others)):
                k_mask = 0
                for t, var in enumerate(others):
                    if sub >> t & 1:
                        k_mask |= 1 << var
                entry = [(a | k_mask, 1), (b | k_mask, 1), (a | b | k_mask, -1)]
                if k_mask:
                    entry.append((k_mask, -1))
                out.append(("cond_mutual", tuple(entry)))
    return out


@functools.lru_cache(maxsize=64)
def elemental_inequalities(names: tuple[str, ...]) -> tuple[Inequality, ...]:
    """The minimal generating set of Shannon inequalities for a universe.

    ``n`` conditional entropies ``H(X_i | rest) >= 0`` followed by
    ``C(n,2) * 2**(n-2)`` conditional mutual informations
    ``I(X_i : X_j | X_K) >= 0`` in canonical (i, j, K-bitmask) order.
    """
    names = check_names(names)
    n = len(names)
    if not 1 <= n <= 16:
        raise ValueError(f"n={n} outside supported range 1..16")
    out = []
    for kind, entries in _elemental_masks(n):
        lc = LinComb(names, dict(entries))
        if kind == "cond_entropy":
            full_mask = entries[0][0]
            var = full_mask & ~(entries[1][0] if len(entries) > 1 else 0)
            rest = full_mask ^ var
            if rest:
                label = f"H({subset_text(var, names)}|{subset_text(rest, names)})"
            else:
                label = f"H({subset_text(var, names)})"
        else:
            ab = [m for m, c in entries if c == 1]
            k_mask = ab[0] & ab[1]
            a = ab[0] ^ k_mask
            b = ab[1] ^ k_mask
            if k_mask:
                label = f"I({subset_text(a, names)}:{subset_text(b, names)}|{subset_text(k_mask, names)})"
            else:
                label = f"I({subset_text(a, names)}:{subset_text(b, names)})"
        out.append(Inequality(lc, GE, label))
    assert len(out) == elemental_count(n)
    return tuple(out)


def elemental_count(n: int) -> int:
    if n == 1:
        return 1
    return n + comb(n, 2) * (1 << (n - 2))


def polymatroid_violation(profile: AnyProfile, tol: float = 0.0) -> Inequality | None:
    """First violated elemental inequality, or None if the profile is a
    polymatroid.  ``tol`` gives slack for float-valued profiles."""
    for ineq in elemental_inequalities(profile.names):
        value = evaluate(ineq.lhs, profile)
        if value < -tol:
            return ineq
    return None


def is_polymatroid(profile: AnyProfile, tol: float | None = None) -> bool:
    """True iff all elemental inequalities hold (within tol for floats)."""
    if tol is None:
        tol = 4.0 * profile.tol if isinstance(profile, NumericProfile) else 0.0
    return polymatroid_violation(profile, tol) is None


def mutual_information_lincomb(
    names: Sequence[str], left: int, right: int, cond: int = 0
) -> LinComb:
    """``I(left : right | cond)`` as a LinComb over bitmask arguments."""
    terms: dict[int, Fraction] = {}
    for mask, sign in (
        (left | cond, 1),
        (right | cond, 1),
        (left | right | cond, -1),
        (cond, -1),
    ):
        if mask:
            terms[mask] = terms.get(mask, Fraction(0)) + sign
    return LinComb(names, terms)


def ingleton_deficit(names: Sequence[str], perm: Sequence[str]) -> LinComb:
    """``I(X:Y|A) + I(X:Y|B) + I(A:B) - I(X:Y)`` for perm ``(X, Y, A, B)``.

    Nonnegative iff the Ingleton inequality holds in this orientation.
    """
    names = check_names(names)
    perm = tuple(perm)
    if len(perm) != 4 or len(set(perm)) != 4:
        raise ValueError(f"perm must name 4 distinct variables, got {perm}")
    x, y, a, b = (mask_of([p], names) for p in perm)
    lc = mutual_information_lincomb(names, x, y, a)
    lc = lc + mutual_information_lincomb(names, x, y, b)
    lc = lc + mutual_information_lincomb(names, a, b)
    lc = lc - mutual_information_lincomb(names, x, y)
    return lc


def ingleton_gap(profile: AnyProfile, perm: Sequence[str]):
    """RHS - LHS of the Ingleton inequality under perm; negative = violated."""
    return evaluate(ingleton_deficit(profile.names, perm), profile)


def ingleton_forms(names: Sequence[str]) -> tuple[tuple[tuple[str, str, str, str], LinComb], ...]:
    """The six inequivalent Ingleton orientations of a 4-variable universe.

    The 24 orderings collapse under the X<->Y and A<->B symmetries into 6
    classes; a class is picked by choosing the unordered pair playing the
    {A, B} role.  Representatives list each pair in universe order.
    """
    names = check_names(names)
    if len(names) != 4:
        raise ValueError("ingleton_forms requires exactly 4 variables")
    forms = []
    for i in range(3):
        for j in range(i + 1, 4):
            ab = (names[i], names[j])
            xy = tuple(nm for nm in names if nm not in ab)
            perm = (xy[0], xy[1], ab[0], ab[1])
            forms.append((perm, ingleton_deficit(names, perm)))
    return tuple(forms)


def parse_rational(text: str) -> Fraction:
    """Exact rational from an integer, fraction `p/q`, or decimal literal."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


def format_rational(value: Fraction) -> str:
    return str(value)


def write_profile(profile: Profile) -> str:
    """Render a profile in the text format (one line per nonempty subset)."""
    lines = ["vars: " + " ".join(profile.names)]
    for mask in nonempty_subsets(len(profile.names)):
        lines.append(f"{subset_text(mask, profile.names)} : {format_rational(profile.values[mask])}")
    return "\n".join(lines) + "\n"


def read_profile(text: str) -> Profile:
    """Parse the profile text format; every nonempty subset must be present."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("vars:"):
        raise ProfileFormatError("profile file must start with a 'vars:' header")
    names = check_names(lines[0][len("vars:"):].split())
    values: dict[int, Fraction] = {}
    for ln in lines[1:]:
        if ":" not in ln:
            raise ProfileFormatError(f"bad profile line {ln!r}")
        subset, _, val = ln.partition(":")
        labels = [s.strip() for s in subset.split(",")]
        mask = mask_of(labels, names)
        if mask in values:
            raise ProfileFormatError(f"duplicate subset {subset.strip()!r}")
        values[mask] = parse_rational(val)
    missing = [m for m in nonempty_subsets(len(names)) if m not in values]
    if missing:
        raise ProfileFormatError(
            f"missing subsets: {', '.join(subset_text(m, names) for m in missing)}"
        )
    return Profile(names, values)
