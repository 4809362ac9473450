"""Windowed cohomology: H^q_d on a finite window with boundary filtering.

Truncating an infinite index set to a window creates boundary artifacts, so
every computation here separates three regions:

* unknowns live on the full window;
* cocycle equations use only output tuples whose evaluation never references
  an index outside the window (interior-only);
* class survival is decided on the margin-shrunk core: a cocycle counts
  toward dim_stable only if its restriction to the core comparison set is not
  matched there by the restriction of some coboundary.

The comparison set is the core-admissible output tuples that are also legal
for the incoming differential, so no coboundary value is ever fabricated.
For weights |d| <= margin that is exactly the set of core-admissible tuples.

Alongside the dimension counts the module houses the two constructive moves
that drive everything downstream: reduction of an arbitrary cocycle to weight
zero via b(e_i) = sum_{d != 0} c_{i,0;d}/d e_{i+d}, and the unique diagonal
normalization that clears the (i,1) column and the (-2,2) entry of a weight-0
cocycle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .algebra import GradedLieAlgebra, Window, make_witt
from .cochains import (
    ADJOINT,
    TRIVIAL,
    Cochain,
    CochainBasis,
    MixedCochain,
    _Omit,
    basis_tuples,
    delta_terms,
    differential,
    weight_components,
)
from .errors import BoundaryError, ConfigError, NotACocycleError
from .linalg import SparseMatrix, _eliminate, _int_row, kernel_basis, solve_affine


@dataclass(frozen=True)
class CohomologyReport:
    algebra: str
    degree: int
    weight: int
    window: Window
    margin: int
    coeffs: str
    dim_cocycles: int
    dim_coboundaries: int
    dim_stable: int
    representatives: tuple = ()
    stabilization: tuple = ()
    omitted_triples: int = 0

    def to_json_dict(self) -> dict:
        from .cochains import cochain_to_text

        return {
            "algebra": self.algebra,
            "degree": self.degree,
            "weight": self.weight,
            "window": f"{self.window.lo}:{self.window.hi}",
            "margin": self.margin,
            "coefficients": self.coeffs,
            "dim_cocycles": self.dim_cocycles,
            "dim_coboundaries": self.dim_coboundaries,
            "dim_stable": self.dim_stable,
            "representatives": [cochain_to_text(r) for r in self.representatives],
            "stabilization": [[f"{w.lo}:{w.hi}", n] for w, n in self.stabilization],
            "omitted_triples": self.omitted_triples,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CohomologyReport":
        from .cochains import cochain_from_text, parse_window

        return cls(
            algebra=data["algebra"],
            degree=data["degree"],
            weight=data["weight"],
            window=parse_window(data["window"]),
            margin=data["margin"],
            coeffs=data["coefficients"],
            dim_cocycles=data["dim_cocycles"],
            dim_coboundaries=data["dim_coboundaries"],
            dim_stable=data["dim_stable"],
            representatives=tuple(cochain_from_text(t) for t in data["representatives"]),
            stabilization=tuple((parse_window(w), n) for w, n in data["stabilization"]),
            omitted_triples=data["omitted_triples"],
        )


def _check_window(window: Window, margin: int):
    if margin < 2:
        raise ConfigError(f"margin must be at least 2, got {margin}")
    if window.lo + margin > window.hi - margin:
        raise ConfigError(f"window {window} too small for margin {margin}")


def cocycle_matrix(alg: GradedLieAlgebra, q: int, d: int, window: Window,
                   coeffs: str = ADJOINT):
    """(matrix of delta on C^q_d over interior tuples, domain basis, omitted count)."""
    basis = CochainBasis(q, d, window, coeffs)
    col = basis.index()
    entries = {}
    n_rows = 0
    omitted = 0
    for t in basis_tuples(q + 1, d, window, coeffs):
        try:
            terms = delta_terms(alg, q, d, window, coeffs, t)
        except _Omit:
            omitted += 1
            continue
        for ref, coeff in terms:
            entries[(n_rows, col[ref])] = coeff
        n_rows += 1
    return SparseMatrix(n_rows, basis.dimension, entries), basis, omitted


def _delta_legal(alg, q_prev, d, window, coeffs, t) -> bool:
    try:
        delta_terms(alg, q_prev, d, window, coeffs, t)
        return True
    except _Omit:
        return False


def comparison_tuples(alg: GradedLieAlgebra, q: int, d: int, window: Window,
                      margin: int, coeffs: str = ADJOINT):
    """Core-admissible q-tuples on which cocycles and coboundaries are compared."""
    core = window.core(margin)
    out = []
    for t in basis_tuples(q, d, core, coeffs):
        if q == 0 or _delta_legal(alg, q - 1, d, window, coeffs, t):
            out.append(t)
    return out


def _rows_rank(rows, n_cols) -> int:
    dicts = [{c: v for c, v in enumerate(row) if v} for row in rows]
    piv, _ = _eliminate([_int_row(r) for r in dicts], n_cols)
    return len(piv)


def coboundary_primitive(alg: GradedLieAlgebra, c: Cochain, margin: int, exclude=frozenset()):
    """Solve delta(b) = c on the core comparison tuples; None when obstructed.

    Tuples in `exclude` carry no trustworthy value of c and are dropped from
    the equation set.
    """
    q = c.degree
    if q < 1:
        raise ValueError("0-cochains have no primitives")
    d, window, coeffs = c.weight, c.window, c.coeffs
    prev = CochainBasis(q - 1, d, window, coeffs)
    col = prev.index()
    rows = [t for t in comparison_tuples(alg, q, d, window, margin, coeffs)
            if t not in exclude]
    entries = {}
    rhs = []
    for r, t in enumerate(rows):
        for ref, coeff in delta_terms(alg, q - 1, d, window, coeffs, t):
            entries[(r, col[ref])] = coeff
        rhs.append(c.entries.get(t, Fraction(0)))
    m = SparseMatrix(len(rows), prev.dimension, entries)
    x = solve_affine(m, rhs)
    if x is None:
        return None
    return Cochain(q - 1, d, window, coeffs,
                   {t: x[i] for i, t in enumerate(prev.tuples) if x[i]})


def _lex_normalize(c: Cochain) -> Cochain:
    if c.is_zero:
        return c
    first = min(c.entries)
    return (Fraction(1) / c.entries[first]) * c


def cohomology_dim(alg: GradedLieAlgebra, q: int, d: int, window: Window,
                   margin: int, coeffs: str = ADJOINT) -> CohomologyReport:
    """Stable dimension of H^q_d on the window, with surviving representatives.

    dim_cocycles and dim_coboundaries are both measured on the core comparison
    set; dim_stable is their difference, so it counts cocycle classes whose
    core restriction no coboundary can reproduce.
    """
    if q not in (0, 1, 2):
        raise ConfigError(f"degree must be 0, 1 or 2, got {q}")
    _check_window(window, margin)

    matrix, basis, omitted = cocycle_matrix(alg, q, d, window, coeffs)
    kernel = kernel_basis(matrix)

    comp = comparison_tuples(alg, q, d, window, margin, coeffs)
    comp_col = {t: i for i, t in enumerate(comp)}
    n_comp = len(comp)

    def restrict_vec(vec):
        out = [Fraction(0)] * n_comp
        for i, t in enumerate(basis.tuples):
            j = comp_col.get(t)
            if j is not None and vec[i]:
                out[j] = vec[i]
        return out

    z_rows = [restrict_vec(v) for v in kernel]
    dim_v = _rows_rank(z_rows, n_comp)

    w_rows = []
    if q >= 1:
        prev = CochainBasis(q - 1, d, window, coeffs)
        for bt in prev.tuples:
            b = Cochain(q - 1, d, window, coeffs, {bt: 1})
            db = differential(alg, b)
            w_rows.append([db.entries.get(t, Fraction(0)) for t in comp])
    dim_w = _rows_rank(w_rows, n_comp)
    dim_vw = _rows_rank(z_rows + w_rows, n_comp)
    dim_meet = dim_v + dim_w - dim_vw
    dim_stable = dim_v - dim_meet

    representatives = []
    if dim_stable > 0:
        chosen_rows = list(w_rows)
        rank_now = dim_w
        for vec, row in zip(kernel, z_rows):
            r2 = _rows_rank(chosen_rows + [row], n_comp)
            if r2 > rank_now:
                rank_now = r2
                chosen_rows.append(row)
                rep = Cochain(q, d, window, coeffs,
                              {t: vec[i] for i, t in enumerate(basis.tuples) if vec[i]})
                representatives.append(_lex_normalize(rep))
            if len(representatives) == dim_stable:
                break

    return CohomologyReport(
        algebra=alg.name, degree=q, weight=d, window=window, margin=margin,
        coeffs=coeffs, dim_cocycles=dim_v, dim_coboundaries=dim_meet,
        dim_stable=dim_stable, representatives=tuple(representatives),
        stabilization=((window, dim_stable),), omitted_triples=omitted,
    )


def stability_scan(alg: GradedLieAlgebra, q: int, d: int, windows, margin: int,
                   coeffs: str = ADJOINT) -> CohomologyReport:
    """Run cohomology_dim over several windows; report the largest, with the series."""
    series = []
    final = None
    for window in windows:
        final = cohomology_dim(alg, q, d, window, margin, coeffs)
        series.append((window, final.dim_stable))
    if final is None:
        raise ConfigError("no windows given")
    return replace(final, stabilization=tuple(series))


# -- constructive weight reduction -------------------------------------------


def _as_mixed(c, window) -> MixedCochain:
    if isinstance(c, Cochain):
        return MixedCochain.from_cochain(c)
    if isinstance(c, MixedCochain):
        return c
    raise TypeError(f"expected a cochain, got {type(c).__name__}")


def _check_cocycle(alg, mixed: MixedCochain):
    for d, part in weight_components(mixed).items():
        dc = differential(alg, part)
        for t in sorted(dc.entries):
            raise NotACocycleError(t, f"weight {d} component fails the cocycle condition")


def reduce_to_weight_zero(alg: GradedLieAlgebra, c, window: Window):
    """Strip the nonzero-weight part of a cocycle by an explicit coboundary.

    Returns (b, residual) with b(e_i) = sum_{d != 0} c_{i,0;d}/d e_{i+d} and
    residual = c - delta(b); on the core of the window the residual is pure
    weight zero (in particular b(e_0) = 0 holds componentwise, since the
    d-component of b(e_0) is c_{0,0;d}/d and c vanishes on repeated
    arguments).
    """
    mixed = _as_mixed(c, window)
    _check_cocycle(alg, mixed)
    parts = weight_components(mixed)
    b_parts = []
    residual_parts = []
    for d, part in parts.items():
        if d == 0:
            residual_parts.append(part)
            continue
        entries = {}
        for i in window.indices():
            if i == 0 or i + d not in window:
                continue
            v = part.component(i, 0)
            if v:
                entries[(i,)] = v / Fraction(d)
        b_d = Cochain(1, d, window, ADJOINT, entries)
        b_parts.append(b_d)
        residual_parts.append(part - differential(alg, b_d))
    b = MixedCochain.from_components(1, window, b_parts)
    residual = MixedCochain.from_components(2, window, residual_parts)
    return b, residual


def residual_weights_on_core(residual: MixedCochain, window: Window, margin: int):
    """Weights present in the residual once restricted to the core window."""
    return residual.restrict(window.core(margin)).weights()


# -- diagonal normalization (weight zero) --------------------------------------


def normalize_weight_zero(alg: GradedLieAlgebra, c: Cochain, window: Window):
    """The unique diagonal coboundary shift enforcing c(e_i, e_1) = 0 and c(e_{-2}, e_2) = 0.

    Construction order: b_1 = 0; then b_0, b_{-1}, b_{-2}, ... from the (i,1)
    column going down; then b_2 from the (-2,2) entry; then b_3, b_4, ...
    going up.  Each b_i is forced, so the output is the unique normalized
    representative of the class of c.
    """
    if c.weight != 0 or c.coeffs != ADJOINT or c.degree != 2:
        raise ValueError("normalization applies to weight-0 adjoint 2-cochains")
    if c.window != window:
        raise ValueError("cochain window mismatch")
    dc = differential(alg, c)
    for t in sorted(dc.entries):
        raise NotACocycleError(t)
    for need in (-2, -1, 0, 1, 2):
        if need not in window:
            raise BoundaryError(f"window {window} lacks index {need} needed to determine b_2")

    b_vals = {1: Fraction(0)}
    b_vals[0] = -c.component(0, 1)
    for i in range(-1, window.lo - 1, -1):
        b_vals[i] = b_vals[i + 1] - c.component(i, 1) / Fraction(1 - i)
    b_vals[2] = b_vals[0] - b_vals[-2] - c.component(-2, 2) / Fraction(4)
    for i in range(2, window.hi):
        b_vals[i + 1] = b_vals[i] + c.component(i, 1) / Fraction(1 - i)

    b = Cochain(1, 0, window, ADJOINT, {(i,): v for i, v in b_vals.items() if v})
    c_norm = c - differential(alg, b)

    for i in range(window.lo, window.hi):
        if i != 1 and c_norm.component(i, 1) != 0:
            raise AssertionError(f"normalization failed to clear ({i},1)")
    if c_norm.component(-2, 2) != 0:
        raise AssertionError("normalization failed to clear (-2,2)")
    return b, c_norm


# -- the central extension ------------------------------------------------------


def central_extension_dim(window: Window, margin: int) -> CohomologyReport:
    """H^2 of witt with trivial coefficients in weight 0 on the window.

    The surviving representative is renormalized by the coboundary direction
    (the one generated by e_0 -> 1, whose value at (e_{-n}, e_n) is 2n) so
    that it vanishes at (e_{-1}, e_1); what remains is proportional to
    n^3 - n along the antidiagonal.
    """
    witt = make_witt()
    report = cohomology_dim(witt, 2, 0, window, margin, coeffs=TRIVIAL)
    fixed = []
    for rep in report.representatives:
        v = rep.component(-1, 1)
        if v:
            direction = Cochain(
                2, 0, window, TRIVIAL,
                {(-n, n): 2 * n for n in range(1, window.hi + 1) if -n in window},
            )
            rep = rep - (v / Fraction(2)) * direction
        fixed.append(_lex_normalize(rep))
    return replace(report, representatives=tuple(fixed))


def report_to_json(report: CohomologyReport) -> str:
    return json.dumps(report.to_json_dict(), sort_keys=True, indent=2)
