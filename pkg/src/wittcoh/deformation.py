"""Order-by-order formal deformations over K[t]/(t^{N+1}).

A deformed bracket is mu_0 + t mu_1 + ... + t^N mu_N with mu_0 a graded Lie
algebra on the window and each layer an antisymmetric 2-cochain of arbitrary
mixed weight.  The three staple computations:

* jacobi_defect expands the Jacobi identity of the deformed bracket order by
  order; cleanliness at order 1 is exactly delta(mu_1) = 0;
* conjugate transports a bracket along phi = id + t^1 phi_1 + ... (unipotent,
  hence invertible over the truncated base): mu'(x,y) = phi^{-1} mu(phi x, phi y);
* trivialize peels a Jacobi-clean deformation one order at a time, solving
  delta(b_s) = mu_s on the core comparison tuples and conjugating by
  id + t^s b_s; under the sign convention of `cochains.differential` that
  replaces mu_s by mu_s - delta(b_s) at order s.

Window bookkeeping is strictly honest: any evaluation that would reference an
index outside the window drops that entry (or triple) and the drop is
recorded, so every stored value is the exact global one.  Reading a dropped
pair later raises instead of faking a zero, and the defect/solve routines
skip such data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import CENTRAL, Element, GradedLieAlgebra, Window
from .cochains import ADJOINT, Cochain, MixedCochain, weight_components
from .cohomology import coboundary_primitive
from .errors import BoundaryError, FormatError, NotACocycleError, OutOfWindowError


@dataclass(frozen=True)
class TruncatedBase:
    """The local base K[t]/(t^{N+1}); its maximal ideal is (t), and evaluation
    at t = 0 is the augmentation back to the scalar field."""

    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be nonnegative")


def zero_layer(window: Window) -> MixedCochain:
    return MixedCochain(2, window)


@dataclass(frozen=True)
class DeformedBracket:
    base: TruncatedBase
    algebra: GradedLieAlgebra
    window: Window
    layers: tuple = ()
    omitted_pairs: frozenset = frozenset()

    def __post_init__(self):
        if len(self.layers) != self.base.order:
            raise ValueError(
                f"expected {self.base.order} layers, got {len(self.layers)}")
        for mu in self.layers:
            if mu.degree != 2 or mu.window != self.window:
                raise ValueError("layers must be 2-cochains on the bracket window")

    @classmethod
    def trivial(cls, algebra: GradedLieAlgebra, window: Window, order: int) -> "DeformedBracket":
        return cls(TruncatedBase(order), algebra, window,
                   tuple(zero_layer(window) for _ in range(order)))

    def layer(self, s: int) -> MixedCochain:
        if s == 0:
            raise ValueError("order 0 is the underlying algebra")
        return self.layers[s - 1]

    def evaluate_order(self, s: int, x: Element, y: Element) -> Element:
        """Bilinear evaluation of mu_s; raises OutOfWindowError on leaks."""
        if s == 0:
            out = self.algebra.bracket(x, y)
            for key in out.terms:
                if key != CENTRAL and key not in self.window:
                    raise OutOfWindowError(f"bracket target {key} outside {self.window}")
            return out
        mu = self.layers[s - 1]
        out = Element.zero()
        for kx, vx in x.terms.items():
            for ky, vy in y.terms.items():
                if CENTRAL in (kx, ky):
                    continue  # layers act on the indexed span; the center is rigid here
                if kx != ky and (min(kx, ky), max(kx, ky)) in self.omitted_pairs:
                    raise OutOfWindowError(
                        f"layer value at ({kx},{ky}) was lost to the window edge")
                out = out + (vx * vy) * mu.evaluate(kx, ky)
        return out


@dataclass(frozen=True)
class Equivalence:
    """phi = id + t phi_1 + ... + t^N phi_N, a unipotent change of basis."""

    base: TruncatedBase
    window: Window
    layers: tuple = ()
    direction: str = "forward"

    def __post_init__(self):
        if len(self.layers) != self.base.order:
            raise ValueError(
                f"expected {self.base.order} layers, got {len(self.layers)}")
        for phi in self.layers:
            if phi.degree != 1 or phi.window != self.window:
                raise ValueError("equivalence layers must be 1-cochains on the window")

    @classmethod
    def identity(cls, window: Window, order: int) -> "Equivalence":
        return cls(TruncatedBase(order), window,
                   tuple(MixedCochain(1, window) for _ in range(order)))

    @classmethod
    def single(cls, window: Window, order: int, s: int, phi_s: MixedCochain) -> "Equivalence":
        layers = [MixedCochain(1, window) for _ in range(order)]
        layers[s - 1] = phi_s
        return cls(TruncatedBase(order), window, tuple(layers))

    def apply_order(self, s: int, x: Element) -> Element:
        """phi_s applied to an element (phi_0 = id)."""
        if s == 0:
            return x
        phi = self.layers[s - 1]
        out = Element.zero()
        for k, v in x.terms.items():
            if k == CENTRAL:
                if s == 0:
                    out = out + Element({CENTRAL: v})
                continue  # the center is not moved by these equivalences
            out = out + v * phi.evaluate(k)
        return out

    def inverse_order(self, s: int, x: Element) -> Element:
        """psi_s applied to x, where psi = phi^{-1}: psi_s = -phi_s - sum psi_p phi_{s-p}."""
        if s == 0:
            return x
        out = -self.apply_order(s, x)
        for p in range(1, s):
            out = out - self.inverse_order(p, self.apply_order(s - p, x))
        return out


def invert(e: Equivalence) -> Equivalence:
    """The inverse series psi = id - phi_1 t + ...; generators whose inverse
    layers leak out of the window are dropped (same policy as compose)."""
    N = e.base.order
    window = e.window
    layers = []
    for s in range(1, N + 1):
        entries = {}
        for i in window.indices():
            try:
                val = e.inverse_order(s, Element.basis(i))
            except OutOfWindowError:
                continue
            outs = {k: v for k, v in val.terms.items() if k != CENTRAL}
            if any(k not in window for k in outs):
                continue
            if outs:
                entries[(i,)] = outs
        layers.append(MixedCochain(1, window, entries))
    return Equivalence(e.base, window, tuple(layers), direction="inverse")


def compose(outer: Equivalence, inner: Equivalence) -> Equivalence:
    """The equivalence x -> outer(inner(x)), truncated at the common order.

    Generators whose composite leaks out of the window are dropped from the
    composed layers; conjugation by the composition is only compared on
    entries both sides carry.
    """
    if outer.base != inner.base or outer.window != inner.window:
        raise ValueError("equivalence shape mismatch")
    N = outer.base.order
    window = outer.window
    layers = []
    for s in range(1, N + 1):
        entries = {}
        for i in window.indices():
            try:
                total = Element.zero()
                for u in range(s + 1):
                    total = total + outer.apply_order(u, inner.apply_order(s - u, Element.basis(i)))
            except OutOfWindowError:
                continue
            outs = {k: v for k, v in total.terms.items() if k != CENTRAL}
            if any(k not in window for k in outs):
                continue
            if outs:
                entries[(i,)] = outs
        layers.append(MixedCochain(1, window, entries))
    return Equivalence(outer.base, window, tuple(layers))


# -- Jacobi defects ------------------------------------------------------------


@dataclass(frozen=True)
class OrderDefect:
    order: int
    clean: bool
    triple: tuple | None = None
    defect: Element | None = None
    skipped: int = 0


@dataclass(frozen=True)
class DefectReport:
    window: Window
    orders: tuple = ()

    @property
    def clean(self) -> bool:
        return all(o.clean for o in self.orders)

    def first_unclean(self):
        for o in self.orders:
            if not o.clean:
                return o
        return None

    def __str__(self):
        lines = [f"jacobi defects on {self.window}:"]
        for o in self.orders:
            if o.clean:
                lines.append(f"  order {o.order}: clean ({o.skipped} boundary triples skipped)")
            else:
                lines.append(f"  order {o.order}: defect at {o.triple}: {o.defect}")
        return "\n".join(lines)


def jacobi_defect(d: DeformedBracket, window: Window) -> DefectReport:
    """Expand the Jacobi identity of mu_0 + sum t^s mu_s order by order.

    Order 0 is the Jacobi identity of the underlying bracket itself (central
    terms included); for each order s = 1..N the first triple with a nonzero
    defect is reported, and order-1 cleanliness is equivalent to
    delta(mu_1) = 0 on the interior triples.
    """
    if window.lo < d.window.lo or window.hi > d.window.hi:
        raise BoundaryError(f"check window {window} exceeds bracket window {d.window}")
    N = d.base.order
    orders = []
    idx = list(window.indices())
    for s in range(0, N + 1):
        found = None
        skipped = 0
        for ai in range(len(idx)):
            for bi in range(ai + 1, len(idx)):
                for ci in range(bi + 1, len(idx)):
                    x, y, z = idx[ai], idx[bi], idx[ci]
                    ex, ey, ez = Element.basis(x), Element.basis(y), Element.basis(z)
                    try:
                        total = Element.zero()
                        for p in range(s + 1):
                            q = s - p
                            total = total + d.evaluate_order(p, d.evaluate_order(q, ex, ey), ez)
                            total = total + d.evaluate_order(p, d.evaluate_order(q, ey, ez), ex)
                            total = total + d.evaluate_order(p, d.evaluate_order(q, ez, ex), ey)
                    except OutOfWindowError:
                        skipped += 1
                        continue
                    if not total.is_zero and found is None:
                        found = ((x, y, z), total)
            if found:
                break
        if found:
            orders.append(OrderDefect(s, False, found[0], found[1], skipped))
        else:
            orders.append(OrderDefect(s, True, skipped=skipped))
    return DefectReport(window, tuple(orders))


# -- the infinitesimal part ------------------------------------------------------


@dataclass(frozen=True)
class InfinitesimalReport:
    cochain: MixedCochain
    is_cocycle: bool
    first_violation: tuple | None
    weights: tuple
    components: dict


def infinitesimal(d: DeformedBracket) -> InfinitesimalReport:
    """mu_1 with its cocycle verdict and weight decomposition.

    Any genuine deformation has delta(mu_1) = 0; a nonzero differential means
    the data fails to be a deformation already at order 1.  Equations that
    reference a pair lost to the window edge are skipped rather than read as
    zero.
    """
    from .cochains import _Omit, basis_tuples, delta_terms

    if d.base.order < 1:
        raise ValueError("need at least one layer")
    mu1 = d.layers[0]
    comps = weight_components(mu1)
    violation = None
    for wt in sorted(comps):
        comp = comps[wt]
        for t in basis_tuples(3, wt, d.window, ADJOINT):
            try:
                terms = delta_terms(d.algebra, 2, wt, d.window, ADJOINT, t)
            except _Omit:
                continue
            if any(ref in d.omitted_pairs for ref, _ in terms):
                continue
            total = sum((coeff * comp.entries.get(ref, Fraction(0)) for ref, coeff in terms),
                        Fraction(0))
            if total != 0:
                violation = t
                break
        if violation:
            break
    return InfinitesimalReport(
        cochain=mu1,
        is_cocycle=violation is None,
        first_violation=violation,
        weights=tuple(sorted(comps)),
        components=comps,
    )


# -- conjugation -------------------------------------------------------------------


def conjugate(d: DeformedBracket, e: Equivalence) -> DeformedBracket:
    """phi^{-1}[phi(x), phi(y)] expanded through the truncation order.

    Entries whose evaluation would leave the window are omitted from every
    layer and the pair is recorded in omitted_pairs; all stored entries are
    exact.
    """
    if e.base != d.base or e.window != d.window:
        raise ValueError("equivalence and bracket must share base and window")
    N = d.base.order
    window = d.window
    # smallest order with a nonzero equivalence layer; psi_u = 0 for 0 < u < m0
    m0 = next((s for s in range(1, N + 1) if not e.layers[s - 1].is_zero), N + 1)
    new_entries: list[dict] = [dict() for _ in range(N)]
    omitted = set(d.omitted_pairs)
    for i in window.indices():
        for j in window.indices():
            if i >= j:
                continue
            ei, ej = Element.basis(i), Element.basis(j)
            try:
                # B_m = sum_{r+v+w=m} mu_r(phi_v e_i, phi_w e_j), computed only
                # for the orders a nonzero psi_u will consume
                b_cache: dict[int, Element] = {}

                def b_order(m):
                    if m not in b_cache:
                        total = Element.zero()
                        for r in range(m + 1):
                            for v in range(m - r + 1):
                                w = m - r - v
                                total = total + d.evaluate_order(
                                    r, e.apply_order(v, ei), e.apply_order(w, ej))
                        b_cache[m] = total
                    return b_cache[m]

                values = []
                for s in range(1, N + 1):
                    total = b_order(s)
                    for u in range(m0, s + 1):
                        total = total + e.inverse_order(u, b_order(s - u))
                    for key in total.terms:
                        if key == CENTRAL:
                            raise ValueError("central targets are not deformed here")
                        if key not in window:
                            raise OutOfWindowError(f"target {key} escaped {window}")
                    values.append(total)
            except OutOfWindowError:
                omitted.add((i, j))
                continue
            for s, val in enumerate(values):
                outs = dict(val.terms)
                if outs:
                    new_entries[s][(i, j)] = outs
    layers = tuple(MixedCochain(2, window, entries) for entries in new_entries)
    return DeformedBracket(d.base, d.algebra, window, layers, frozenset(omitted))


# -- trivialization -------------------------------------------------------------------


@dataclass(frozen=True)
class TrivializationResult:
    trivialized: bool
    equivalence: Equivalence | None
    conjugated: DeformedBracket | None
    verification_core: Window | None
    obstruction_order: int | None = None
    obstruction: Cochain | None = None

    def __str__(self):
        if self.trivialized:
            return (f"trivialized: all layers vanish on the core "
                    f"{self.verification_core} (exact)")
        return (f"obstructed at order {self.obstruction_order}: no primitive for the "
                f"weight-{self.obstruction.weight} component")


def trivialize(d: DeformedBracket, window: Window, margin: int) -> TrivializationResult:
    """Peel a Jacobi-clean deformation down to the trivial one, order by order.

    At stage s the current mu_s is matched by delta(b_s) on the core
    comparison tuples and the bracket is conjugated by id + t^s b_s, which
    changes nothing below order s; each cleared order therefore stays cleared,
    and on success the conjugated layers vanish exactly on the margin core
    (verified entry by entry).  A component with no primitive aborts with the
    obstruction representative instead.
    """
    report = jacobi_defect(d, window)
    if not report.clean:
        bad = report.first_unclean()
        raise NotACocycleError(bad.triple,
                               f"jacobi defect at order {bad.order}; not a deformation")
    N = d.base.order
    current = d
    total_eq = Equivalence.identity(d.window, N)
    for s in range(1, N + 1):
        mu_s = current.layers[s - 1]
        if not mu_s.is_zero:
            comps = weight_components(mu_s)
            parts = []
            for wt in sorted(comps):
                prim = coboundary_primitive(d.algebra, comps[wt], margin,
                                            exclude=current.omitted_pairs)
                if prim is None:
                    return TrivializationResult(
                        trivialized=False, equivalence=None, conjugated=None,
                        verification_core=None, obstruction_order=s,
                        obstruction=comps[wt])
                parts.append(prim)
            b_s = MixedCochain.from_components(1, d.window, parts)
            e_s = Equivalence.single(d.window, N, s, b_s)
            current = conjugate(current, e_s)
            total_eq = compose(e_s, total_eq)
    core = d.window.core(margin)
    for s in range(1, N + 1):
        leftover = current.layers[s - 1].restrict(core)
        if not leftover.is_zero:
            raise AssertionError(
                f"trivialization left a nonzero order-{s} layer on {core}")
    return TrivializationResult(
        trivialized=True, equivalence=total_eq, conjugated=current,
        verification_core=core)


# -- deformation documents -------------------------------------------------------------


def parse_deformation(text: str, algebra_loader=None) -> DeformedBracket:
    """Parse a deformation document.

    Grammar ('#' comments and blank lines ignored):

        algebra: witt | virasoro
        order: <N>
        window: <lo>:<hi>
        layer: <s>
        (i,j) -> <out>:<p/q>[, <out>:<p/q>]...

    Records after a `layer: s` line populate mu_s; every layer index must lie
    in 1..N.  `algebra_loader`, when given, maps the algebra name to a custom
    algebra instead of the built-ins.
    """
    from .algebra import make_virasoro, make_witt
    from .cochains import parse_window

    header = {}
    layer_entries: dict[int, dict] = {}
    active = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" in line:
            if active is None:
                raise FormatError(f"line {lineno}: bracket record before any layer line")
            lhs, _, rhs = line.partition("->")
            lhs = lhs.strip()
            if not (lhs.startswith("(") and lhs.endswith(")")):
                raise FormatError(f"line {lineno}: bad pair {lhs!r}")
            try:
                i_s, j_s = lhs[1:-1].split(",")
                i, j = int(i_s), int(j_s)
            except ValueError:
                raise FormatError(f"line {lineno}: bad pair {lhs!r}") from None
            if i >= j:
                raise FormatError(f"line {lineno}: pair must satisfy i < j")
            outs = layer_entries[active].setdefault((i, j), {})
            for tok in rhs.split(","):
                out_s, _, coeff_s = tok.partition(":")
                try:
                    out = int(out_s.strip())
                    coeff = Fraction(coeff_s.strip())
                except (ValueError, ZeroDivisionError):
                    raise FormatError(f"line {lineno}: bad term {tok.strip()!r}") from None
                if out in outs:
                    raise FormatError(f"line {lineno}: repeated output {out}")
                outs[out] = coeff
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in ("algebra", "order", "window", "layer"):
            raise FormatError(f"line {lineno}: unrecognized line {line!r}")
        if key == "layer":
            try:
                active = int(value.strip())
            except ValueError:
                raise FormatError(f"line {lineno}: bad layer index {value.strip()!r}") from None
            if active in layer_entries:
                raise FormatError(f"line {lineno}: duplicate layer {active}")
            layer_entries[active] = {}
        else:
            if key in header:
                raise FormatError(f"line {lineno}: duplicate header {key!r}")
            header[key] = value.strip()

    for need in ("algebra", "order", "window"):
        if need not in header:
            raise FormatError(f"missing header line {need!r}")
    try:
        order = int(header["order"])
    except ValueError:
        raise FormatError("order must be an integer") from None
    window = parse_window(header["window"])
    name = header["algebra"]
    if algebra_loader is not None:
        algebra = algebra_loader(name)
    elif name == "witt":
        algebra = make_witt()
    elif name == "virasoro":
        algebra = make_virasoro()
    else:
        raise FormatError(f"unknown algebra {name!r} (expected witt or virasoro)")
    bad = [s for s in layer_entries if not 1 <= s <= order]
    if bad:
        raise FormatError(f"layer index {bad[0]} outside 1..{order}")
    layers = []
    for s in range(1, order + 1):
        try:
            layers.append(MixedCochain(2, window, layer_entries.get(s, {})))
        except (OutOfWindowError, ValueError) as exc:
            raise FormatError(f"layer {s}: {exc}") from None
    return DeformedBracket(TruncatedBase(order), algebra, window, tuple(layers))


def render_deformation(d: DeformedBracket) -> str:
    lines = [
        f"algebra: {d.algebra.name}",
        f"order: {d.base.order}",
        f"window: {d.window.lo}:{d.window.hi}",
    ]
    for s in range(1, d.base.order + 1):
        mu = d.layers[s - 1]
        lines.append(f"layer: {s}")
        for t in sorted(mu.entries):
            outs = ", ".join(f"{o}:{v}" for o, v in sorted(mu.entries[t].items()))
            lines.append(f"({t[0]},{t[1]}) -> {outs}")
    return "\n".join(lines) + "\n"
