"""Weight-homogeneous cochains on a finite index window, and the differential.

A q-cochain of weight d with adjoint coefficients stores one exact rational
per strictly increasing index tuple (i_1 < ... < i_q); the full value is

    c(e_{i_1}, ..., e_{i_q}) = c_{i_1..i_q} * e_{i_1+...+i_q+d}

and tuples are admissible only when every argument index and the output index
i_1+...+i_q+d lie in the window.  Trivial coefficients drop the output
generator: values are scalars, and entries live on tuples summing to -d.
Antisymmetric completion is always computed, never stored, so equality
testing is exact on the canonical form.

The differential follows one master convention for all degrees,

    (delta c)(x_1, ..., x_{q+1}) =
        sum_{s<t} (-1)^{s+t-1} c([x_s,x_t], x_1, ..., ^x_s, ..., ^x_t, ...)
      + sum_s    (-1)^s       [x_s, c(x_1, ..., ^x_s, ...)]

(1-indexed, hats mark omissions; trivial coefficients drop the second sum).
The global sign is chosen so that for a weight-0 2-cochain the component of
delta c(e_i,e_j,e_k) on e_{i+j+k} is literally

    (j-i)c_{i+j,k} + (k-j)c_{j+k,i} + (i-k)c_{k+i,j}
      + (j-i+k)c_{k,j} + (j-i-k)c_{k,i} - (i+j-k)c_{i,j},

which is the six-term equation every downstream derivation specializes.  One
consequence worth knowing: for a diagonal 1-cochain b(e_i) = b_i e_i,

    delta b(e_i, e_j) = (j - i)(b_{i+j} - b_i - b_j) e_{i+j}.

Window truncation is interior-only: delta is evaluated only on tuples whose
every intermediate index (pairwise bracket targets, intermediate cochain
outputs) stays inside the window; the remaining tuples are omitted from the
result and recorded on it, so no equation is ever fabricated with missing
terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .algebra import CENTRAL, Element, GradedLieAlgebra, Window
from .errors import FormatError, OutOfWindowError

ADJOINT = "adjoint"
TRIVIAL = "trivial"


class _Omit(Exception):
    """Internal: evaluation left the window; omit the output tuple."""


def _sort_with_sign(args):
    """Sort integer arguments, tracking the permutation sign; None on repeats."""
    args = list(args)
    sign = 1
    # insertion sort; argument counts are at most 3
    for i in range(1, len(args)):
        j = i
        while j > 0 and args[j - 1] > args[j]:
            args[j - 1], args[j] = args[j], args[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(args, args[1:]):
        if a == b:
            return None, 0
    return tuple(args), sign


def basis_tuples(degree: int, weight: int, window: Window, coeffs: str = ADJOINT):
    """Lexicographically ordered admissible tuples for C^q_d on the window."""
    if degree < 0 or degree > 3:
        raise ValueError("cochain degrees run from 0 to 3")
    if degree == 0:
        if coeffs == ADJOINT:
            return [()] if weight in window else []
        return [()] if weight == 0 else []
    out = []
    for t in combinations(window.indices(), degree):
        s = sum(t)
        if coeffs == ADJOINT:
            if s + weight in window:
                out.append(t)
        else:
            if s + weight == 0:
                out.append(t)
    return out


@dataclass(frozen=True)
class CochainBasis:
    """Deterministic enumeration of the admissible tuples of C^q_d."""

    degree: int
    weight: int
    window: Window
    coeffs: str = ADJOINT
    tuples: tuple = field(default=None)

    def __post_init__(self):
        if self.tuples is None:
            object.__setattr__(
                self, "tuples",
                tuple(basis_tuples(self.degree, self.weight, self.window, self.coeffs)),
            )

    @property
    def dimension(self) -> int:
        return len(self.tuples)

    def index(self):
        return {t: i for i, t in enumerate(self.tuples)}


@dataclass(frozen=True)
class Cochain:
    """Single-weight cochain; entries only at admissible strictly increasing tuples."""

    degree: int
    weight: int
    window: Window
    coeffs: str = ADJOINT
    entries: dict = field(default_factory=dict)
    omitted: tuple = ()

    def __post_init__(self):
        if self.coeffs not in (ADJOINT, TRIVIAL):
            raise ValueError(f"unknown coefficients {self.coeffs!r}")
        clean = {}
        for t, v in self.entries.items():
            t = tuple(t)
            if not self.admissible(t):
                raise OutOfWindowError(f"tuple {t} not admissible for C^{self.degree}_{self.weight} on {self.window}")
            v = Fraction(v)
            if v != 0:
                clean[t] = v
        object.__setattr__(self, "entries", clean)

    def admissible(self, t) -> bool:
        if len(t) != self.degree:
            return False
        if any(a not in self.window for a in t):
            return False
        if any(a >= b for a, b in zip(t, t[1:])):
            return False
        s = sum(t)
        if self.coeffs == ADJOINT:
            return s + self.weight in self.window
        return s + self.weight == 0

    # -- vector space structure ------------------------------------------

    def _like(self, entries, omitted=None):
        return Cochain(self.degree, self.weight, self.window, self.coeffs, entries,
                       self.omitted if omitted is None else omitted)

    def _check_compatible(self, other):
        if (self.degree, self.weight, self.window, self.coeffs) != (
                other.degree, other.weight, other.window, other.coeffs):
            raise ValueError("cochain shape mismatch")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_compatible(other)
        out = dict(self.entries)
        for t, v in other.entries.items():
            out[t] = out.get(t, Fraction(0)) + v
        return self._like(out, omitted=tuple(sorted(set(self.omitted) | set(other.omitted))))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._like({t: -v for t, v in self.entries.items()})

    def __rmul__(self, scale):
        scale = Fraction(scale)
        if scale == 0:
            return self._like({})
        return self._like({t: scale * v for t, v in self.entries.items()})

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, Cochain)
                and (self.degree, self.weight, self.window, self.coeffs) ==
                    (other.degree, other.weight, other.window, other.coeffs)
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.degree, self.weight, self.window, self.coeffs,
                     frozenset(self.entries.items())))

    # -- evaluation -------------------------------------------------------

    def component(self, *args) -> Fraction:
        """Scalar coefficient at possibly unsorted arguments (antisymmetrized)."""
        for a in args:
            if a not in self.window:
                raise OutOfWindowError(f"argument index {a} outside window {self.window}")
        t, sign = _sort_with_sign(args)
        if t is None:
            return Fraction(0)
        if not self.admissible(t):
            raise OutOfWindowError(
                f"tuple {t} has no admissible output in C^{self.degree}_{self.weight} on {self.window}")
        return sign * self.entries.get(t, Fraction(0))

    def evaluate(self, *args):
        """Full value: an Element for adjoint coefficients, a scalar otherwise."""
        v = self.component(*args)
        if self.coeffs == TRIVIAL:
            return v
        out = sum(args) + self.weight
        return Element({out: v})

    def restrict(self, sub: Window) -> "Cochain":
        """Entries whose tuple and output index lie inside the subwindow."""
        keep = {}
        for t, v in self.entries.items():
            if all(a in sub for a in t):
                if self.coeffs == TRIVIAL or sum(t) + self.weight in sub:
                    keep[t] = v
        return Cochain(self.degree, self.weight, sub, self.coeffs, keep)

    @classmethod
    def from_function(cls, fn, degree, weight, window, coeffs=ADJOINT) -> "Cochain":
        """Canonicalize a tuple function into a cochain, rejecting non-alternating data."""
        entries = {}
        for t in basis_tuples(degree, weight, window, coeffs):
            entries[t] = Fraction(fn(*t))
        from itertools import permutations

        for t in list(entries)[:64]:
            base = entries[t]
            for perm in permutations(t):
                expect = _sort_with_sign(perm)[1] * base
                if Fraction(fn(*perm)) != expect:
                    raise ValueError(f"function is not antisymmetric at {perm}")
            if degree >= 2:
                rep = (t[0],) * degree
                if Fraction(fn(*rep)) != 0:
                    raise ValueError(f"function does not vanish on repeated arguments {rep}")
        return cls(degree, weight, window, coeffs, entries)


def zero_cochain(degree, weight, window, coeffs=ADJOINT) -> Cochain:
    return Cochain(degree, weight, window, coeffs)


# -- the differential ------------------------------------------------------


def delta_terms(alg: GradedLieAlgebra, degree: int, weight: int, window: Window,
                coeffs: str, out_tuple):
    """Symbolic expansion of delta at out_tuple over the entries of a q-cochain.

    Returns a list of (reference tuple, coefficient) pairs such that for any
    cochain c of the given shape, delta(c) at out_tuple equals the sum of
    coefficient * c[reference tuple].  Raises _Omit when the expansion would
    reference an index outside the window; the caller omits that tuple.
    """
    q = degree
    d = weight
    xs = list(out_tuple)
    terms = []

    def emit(sign, coeff, args):
        t, perm_sign = _sort_with_sign(args)
        if t is None:
            return
        terms.append((t, sign * perm_sign * coeff))

    # bracket-composition terms: (-1)^{s+t-1} c([x_s,x_t], rest)
    for s in range(q + 1):
        for t in range(s + 1, q + 1):
            sign = -1 if (s + t) % 2 == 0 else 1  # (-1)^{(s+1)+(t+1)-1}
            rest = [xs[u] for u in range(q + 1) if u != s and u != t]
            bracket = alg.bracket_generators(xs[s], xs[t])
            for key, coeff in bracket.terms.items():
                if key == CENTRAL:
                    raise ValueError(
                        "differential needs bracket values inside the indexed span; "
                        "central targets are not supported as cochain arguments")
                if key not in window:
                    raise _Omit
                emit(sign, coeff, [key] + rest)
    if coeffs == ADJOINT:
        # action terms: (-1)^s [x_s, c(rest)]
        out_index = sum(xs) + d
        for s in range(q + 1):
            sign = -1 if s % 2 == 0 else 1  # (-1)^{s+1} for 1-indexed s
            rest = [xs[u] for u in range(q + 1) if u != s]
            inner = sum(rest) + d
            if inner not in window:
                raise _Omit
            bracket = alg.bracket_generators(xs[s], inner)
            for key, coeff in bracket.terms.items():
                if key == CENTRAL:
                    raise ValueError(
                        "differential needs bracket values inside the indexed span; "
                        "central targets are not supported as cochain arguments")
                if key != out_index:
                    raise ValueError(
                        f"bracket is not graded: [e_{xs[s]}, e_{inner}] hit e_{key}")
                emit(sign, coeff, rest)
    # merge duplicate references
    merged = {}
    for t, v in terms:
        merged[t] = merged.get(t, Fraction(0)) + v
    return [(t, v) for t, v in merged.items() if v != 0]


def _delta_component(alg: GradedLieAlgebra, c: Cochain, out_tuple):
    """Scalar coefficient of delta(c) at out_tuple; raises _Omit on window exit."""
    total = Fraction(0)
    for ref, coeff in delta_terms(alg, c.degree, c.weight, c.window, c.coeffs, out_tuple):
        v = c.entries.get(ref)
        if v:
            total += coeff * v
    return total


def differential(alg: GradedLieAlgebra, c: Cochain) -> Cochain:
    """delta(c), same weight, degree q+1, interior-only.

    Output tuples whose evaluation would reference an index outside the window
    are omitted and listed on the result's `omitted` attribute.
    """
    if c.degree > 2:
        raise ValueError("differential supports cochain degrees 0..2")
    entries = {}
    omitted = []
    for t in basis_tuples(c.degree + 1, c.weight, c.window, c.coeffs):
        try:
            v = _delta_component(alg, c, t)
        except _Omit:
            omitted.append(t)
            continue
        if v != 0:
            entries[t] = v
    return Cochain(c.degree + 1, c.weight, c.window, c.coeffs, entries, tuple(omitted))


def trivial_coefficient_differential(alg: GradedLieAlgebra, c: Cochain) -> Cochain:
    """delta for trivial coefficients: only the bracket-composition terms remain."""
    if c.coeffs != TRIVIAL:
        raise ValueError("expected a trivial-coefficient cochain")
    return differential(alg, c)


# -- mixed-weight cochains --------------------------------------------------


@dataclass(frozen=True)
class MixedCochain:
    """Cochain with entries of several weights: tuple -> {output index: scalar}."""

    degree: int
    window: Window
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for t, outs in self.entries.items():
            t = tuple(t)
            if any(a not in self.window for a in t):
                raise OutOfWindowError(f"tuple {t} outside window {self.window}")
            if any(a >= b for a, b in zip(t, t[1:])):
                raise ValueError(f"tuple {t} is not strictly increasing")
            kept = {}
            for out, v in outs.items():
                if out not in self.window:
                    raise OutOfWindowError(f"output index {out} outside window {self.window}")
                v = Fraction(v)
                if v != 0:
                    kept[out] = v
            if kept:
                clean[t] = kept
        object.__setattr__(self, "entries", clean)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def weights(self):
        ws = set()
        for t, outs in self.entries.items():
            for out in outs:
                ws.add(out - sum(t))
        return sorted(ws)

    def evaluate(self, *args) -> Element:
        for a in args:
            if a not in self.window:
                raise OutOfWindowError(f"argument index {a} outside window {self.window}")
        t, sign = _sort_with_sign(args)
        if t is None:
            return Element.zero()
        outs = self.entries.get(t, {})
        return Element({out: sign * v for out, v in outs.items()})

    def __add__(self, other: "MixedCochain") -> "MixedCochain":
        if (self.degree, self.window) != (other.degree, other.window):
            raise ValueError("mixed cochain shape mismatch")
        out = {t: dict(o) for t, o in self.entries.items()}
        for t, outs in other.entries.items():
            tgt = out.setdefault(t, {})
            for o, v in outs.items():
                tgt[o] = tgt.get(o, Fraction(0)) + v
        return MixedCochain(self.degree, self.window, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MixedCochain(self.degree, self.window,
                            {t: {o: -v for o, v in outs.items()}
                             for t, outs in self.entries.items()})

    def __rmul__(self, scale):
        scale = Fraction(scale)
        return MixedCochain(self.degree, self.window,
                            {t: {o: scale * v for o, v in outs.items()}
                             for t, outs in self.entries.items()})

    def __eq__(self, other):
        return (isinstance(other, MixedCochain)
                and (self.degree, self.window) == (other.degree, other.window)
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.degree, self.window,
                     frozenset((t, frozenset(o.items())) for t, o in self.entries.items())))

    def restrict(self, sub: Window) -> "MixedCochain":
        keep = {}
        for t, outs in self.entries.items():
            if all(a in sub for a in t):
                kept = {o: v for o, v in outs.items() if o in sub}
                if kept:
                    keep[t] = kept
        return MixedCochain(self.degree, sub, keep)

    @classmethod
    def from_cochain(cls, c: Cochain) -> "MixedCochain":
        if c.coeffs != ADJOINT:
            raise ValueError("only adjoint cochains carry output indices")
        entries = {t: {sum(t) + c.weight: v} for t, v in c.entries.items()}
        return cls(c.degree, c.window, entries)

    @classmethod
    def from_components(cls, degree, window, components) -> "MixedCochain":
        out = cls(degree, window)
        for c in components:
            out = out + cls.from_cochain(c)
        return out


def weight_components(c: MixedCochain) -> dict:
    """Split by output-degree minus input-degree-sum; reassembly is exact."""
    buckets: dict[int, dict] = {}
    for t, outs in c.entries.items():
        s = sum(t)
        for out, v in outs.items():
            buckets.setdefault(out - s, {})[t] = v
    return {
        d: Cochain(c.degree, d, c.window, ADJOINT, entries)
        for d, entries in sorted(buckets.items())
    }


def never_leaves_window(indices, weight: int, window: Window) -> bool:
    """Conservative two-stage interiority: every subset sum (and every subset
    sum shifted by the weight) that any differential composition could
    materialize stays inside the window."""
    idx = list(indices)
    n = len(idx)
    for r in range(1, n + 1):
        for sub in combinations(idx, r):
            s = sum(sub)
            if r >= 2 and s not in window:
                return False
            if s + weight not in window:
                return False
    return True


# -- serialization -----------------------------------------------------------


def cochain_to_text(c: Cochain) -> str:
    """Text form: header then one '(i,j) -> p/q' record per entry."""
    lines = [
        f"degree: {c.degree}",
        f"weight: {c.weight}",
        f"window: {c.window.lo}:{c.window.hi}",
        f"coefficients: {c.coeffs}",
    ]
    for t in sorted(c.entries):
        key = "(" + ",".join(str(a) for a in t) + ")"
        lines.append(f"{key} -> {c.entries[t]}")
    return "\n".join(lines) + "\n"


def parse_window(text: str) -> Window:
    try:
        lo_s, _, hi_s = text.strip().partition(":")
        return Window(int(lo_s), int(hi_s))
    except ValueError as exc:
        raise FormatError(f"bad window {text!r}: {exc}") from None


def cochain_from_text(text: str) -> Cochain:
    header = {}
    records = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" in line:
            lhs, _, rhs = line.partition("->")
            lhs = lhs.strip()
            if not (lhs.startswith("(") and lhs.endswith(")")):
                raise FormatError(f"line {lineno}: bad tuple {lhs!r}")
            inner = lhs[1:-1].strip()
            try:
                t = tuple(int(x) for x in inner.split(",")) if inner else ()
            except ValueError:
                raise FormatError(f"line {lineno}: bad tuple {lhs!r}") from None
            if t in records:
                raise FormatError(f"line {lineno}: duplicate tuple {t}")
            try:
                records[t] = Fraction(rhs.strip())
            except (ValueError, ZeroDivisionError):
                raise FormatError(f"line {lineno}: bad rational {rhs.strip()!r}") from None
            continue
        key, sep, value = line.partition(":")
        if not sep or key.strip() not in ("degree", "weight", "window", "coefficients"):
            raise FormatError(f"line {lineno}: unrecognized line {line!r}")
        header[key.strip()] = value.strip()
    for need in ("degree", "weight", "window", "coefficients"):
        if need not in header:
            raise FormatError(f"missing header line {need!r}")
    try:
        degree = int(header["degree"])
        weight = int(header["weight"])
    except ValueError:
        raise FormatError("degree and weight must be integers") from None
    window = parse_window(header["window"])
    coeffs = header["coefficients"]
    try:
        return Cochain(degree, weight, window, coeffs, records)
    except (ValueError, OutOfWindowError) as exc:
        raise FormatError(str(exc)) from None
