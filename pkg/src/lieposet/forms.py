"""One-forms on (type-A) Lie poset algebras and their dφ analysis.

The skew form dφ(x, y) = -φ([x, y]) drives everything here: kernels in
the full and trace-zero algebras, the sampled index, regularity,
Frobenius and contact decisions, principal elements and spectra, and
the support-graph combinatorics (small forms, sink/source partition).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import linalg
from .algebras import AlgebraElement, PosetLieAlgebra
from .linalg import RatMatrix, ShapeError

INDEX_TRIALS = 5
INDEX_COEFF_BOUND = 1 << 20


class FormError(ValueError):
    """Invalid one-form input."""


class NotFrobeniusError(ValueError):
    """A principal element was requested for a non-Frobenius form."""


class OneForm:
    """Rational functional with poset support; pairs may be diagonal."""

    def __init__(self, poset, coeffs):
        self.poset = poset
        clean = {}
        for pair, c in coeffs.items():
            p, q = int(pair[0]), int(pair[1])
            c = Fraction(c)
            if not c:
                continue
            if p == q:
                if not 1 <= p <= poset.n:
                    raise FormError(f"diagonal pair ({p},{p}) out of range")
            elif (p, q) not in poset.relations:
                raise FormError(f"support pair ({p},{q}) is not a relation of the host poset")
            clean[(p, q)] = c
        self.coeffs = clean

    @classmethod
    def from_support(cls, poset, pairs, coeffs=None):
        table = {}
        for pair in pairs:
            key = (int(pair[0]), int(pair[1]))
            c = Fraction(1) if coeffs is None else Fraction(coeffs.get(key, coeffs.get(pair, 1)))
            table[key] = table.get(key, Fraction(0)) + c
        return cls(poset, table)

    @property
    def support(self):
        return frozenset(self.coeffs)

    @property
    def strict_support(self):
        return frozenset(pq for pq in self.coeffs if pq[0] != pq[1])

    @property
    def diagonal_support(self):
        return frozenset(pq for pq in self.coeffs if pq[0] == pq[1])

    def coefficient(self, p, q):
        return self.coeffs.get((p, q), Fraction(0))

    def __add__(self, other):
        self._compatible(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return OneForm(self.poset, out)

    def __sub__(self, other):
        self._compatible(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) - c
        return OneForm(self.poset, out)

    def subtract_pair(self, p, q, amount=1):
        out = dict(self.coeffs)
        out[(p, q)] = out.get((p, q), Fraction(0)) - Fraction(amount)
        return OneForm(self.poset, out)

    def without_diagonal(self):
        return OneForm(self.poset, {k: c for k, c in self.coeffs.items() if k[0] != k[1]})

    def translate(self, mapping, new_poset):
        out = {}
        for (p, q), c in self.coeffs.items():
            key = (mapping[p], mapping[q])
            if key[0] > key[1]:
                raise FormError(f"translation reverses pair ({p},{q})")
            out[key] = out.get(key, Fraction(0)) + c
        return OneForm(new_poset, out)

    def _compatible(self, other):
        if other.poset != self.poset:
            raise FormError("forms live on different posets")

    def __eq__(self, other):
        return (
            isinstance(other, OneForm)
            and self.poset == other.poset
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        terms = ", ".join(
            f"E*{pq}" if c == 1 else f"{c}*E*{pq}" for pq, c in sorted(self.coeffs.items())
        )
        return f"OneForm({terms or '0'})"

    def evaluate_coords(self, coords):
        return sum(
            (c * coords.get(pq, Fraction(0)) for pq, c in self.coeffs.items()),
            Fraction(0),
        )

    def evaluate(self, elem):
        return self.evaluate_coords(elem.matrix_coords)

    def to_json(self):
        support = sorted(self.coeffs)
        data = {"support": [list(pq) for pq in support]}
        if any(c != 1 for c in self.coeffs.values()):
            data["coeffs"] = {f"{p},{q}": str(self.coeffs[(p, q)]) for p, q in support}
        return data

    @classmethod
    def from_json(cls, poset, data):
        try:
            pairs = [(int(p), int(q)) for p, q in data["support"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormError(f"malformed one-form JSON: {exc}") from exc
        coeffs = None
        if "coeffs" in data:
            coeffs = {}
            for key, val in data["coeffs"].items():
                p, q = (int(x) for x in key.split(","))
                coeffs[(p, q)] = Fraction(val)
        return cls.from_support(poset, pairs, coeffs)


def phi_on_basis(algebra, form):
    """φ evaluated on every basis vector, as a Fraction list."""
    if isinstance(algebra, PosetLieAlgebra):
        out = []
        for j in range(algebra.dim):
            coords = algebra.to_matrix_coords(algebra._unit(j))
            out.append(form.evaluate_coords(coords))
        return out
    raise ShapeError("poset one-forms apply to poset algebras only")


def functional_on_basis(algebra, values):
    """A plain dual vector for custom algebras: values per basis index."""
    if len(values) != algebra.dim:
        raise ShapeError("functional length mismatch")
    return [Fraction(v) for v in values]


def dphi_matrix(algebra, form_or_values):
    """Skew matrix M[i][j] = -φ([b_i, b_j])."""
    values = _as_values(algebra, form_or_values)
    n = algebra.dim
    m = RatMatrix.zeros(n, n)
    for (i, j), entry in algebra.table.items():
        v = -sum((c * values[k] for k, c in entry.items()), Fraction(0))
        if v:
            m.rows[i][j] = v
            m.rows[j][i] = -v
    return m


def _as_values(algebra, form_or_values):
    if isinstance(form_or_values, OneForm):
        return phi_on_basis(algebra, form_or_values)
    return functional_on_basis(algebra, list(form_or_values))


def _dphi_int_rows(algebra, values):
    """Integer-scaled dφ rows (row scaling preserves rank and kernel)."""
    n = algebra.dim
    rows = [[0] * n for _ in range(n)]
    for (i, j), entry in algebra.table.items():
        v = -sum((c * values[k] for k, c in entry.items()), Fraction(0))
        if v:
            rows[i][j] = v
            rows[j][i] = -v
    out = []
    for row in rows:
        d = 1
        for x in row:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
        out.append([int(x * d) for x in row])
    return out


@dataclass
class KernelReport:
    space: str  # "g", "gA", or "custom"
    dimension: int
    vectors: list  # coordinate vectors in the algebra basis
    coords: list  # matrix-coordinate dicts (poset algebras) or None entries

    def generator_coords(self):
        if self.dimension != 1:
            raise ValueError("kernel is not one-dimensional")
        return self.coords[0]

    def to_json(self):
        return {
            "space": self.space,
            "dimension": self.dimension,
            "generators": [
                None
                if c is None
                else {f"{p},{q}": str(v) for (p, q), v in sorted(c.items())}
                for c in self.coords
            ],
        }


def kernel(algebra, form_or_values, restrict_to_gA=False):
    """Exact kernel of dφ; optionally intersected with the trace-zero part."""
    m = dphi_matrix(algebra, form_or_values)
    rows = m.rows
    if restrict_to_gA:
        if not isinstance(algebra, PosetLieAlgebra) or algebra.kind != "g":
            raise ShapeError("trace restriction applies to full poset algebras")
        trace_row = []
        for j in range(algebra.dim):
            lab = algebra.labels[j]
            trace_row.append(Fraction(1) if lab[0] == "d" else Fraction(0))
        rows = rows + [trace_row]
    basis = linalg.kernel_basis(RatMatrix(rows))
    if isinstance(algebra, PosetLieAlgebra):
        coords = [algebra.to_matrix_coords(v) for v in basis]
        space = "gA" if (algebra.kind == "gA" or restrict_to_gA) else "g"
    else:
        coords = [None] * len(basis)
        space = "custom"
    return KernelReport(space, len(basis), basis, coords)


def in_kernel(algebra, form_or_values, elem):
    """Membership test: φ([b_j, x]) = 0 for every basis vector b_j."""
    values = _as_values(algebra, form_or_values)
    vec = elem.vec if isinstance(elem, AlgebraElement) else elem
    for j in range(algebra.dim):
        total = Fraction(0)
        for i, c in enumerate(vec):
            if c:
                for k, ck in algebra.bracket_basis(j, i).items():
                    total += c * ck * values[k]
        if total:
            return False
    return True


def index(algebra, trials=INDEX_TRIALS, seed=0, coeff_bound=INDEX_COEFF_BOUND):
    """Sampled index: minimum corank of dφ over random integer forms.

    Coefficients are uniform in [1, coeff_bound]; with the default five
    trials the Schwartz-Zippel failure bound is far below 1e-4. Coranks
    have the parity of dim, so a trial reaching that floor ends the
    search early; a mod-p rank certifies that case cheaply before any
    exact elimination runs.
    """
    n = algebra.dim
    if n == 0:
        return 0
    if algebra.is_abelian():
        return n
    rng = random.Random(seed)
    parity_floor = n % 2
    best = n
    for _ in range(trials):
        values = [Fraction(rng.randint(1, coeff_bound)) for _ in range(n)]
        int_rows = _dphi_int_rows(algebra, values)
        corank = n - linalg.rank_mod_p(int_rows, n)
        if corank > parity_floor:
            # mod-p rank is only a lower bound; confirm exactly
            corank = n - linalg.rank(RatMatrix(int_rows))
        best = min(best, corank)
        if best == parity_floor:
            break
    return best


def is_regular(algebra, form_or_values, trials=INDEX_TRIALS, seed=0):
    report = kernel(algebra, form_or_values)
    return report.dimension == index(algebra, trials=trials, seed=seed)


@dataclass
class ContactResult:
    is_contact: bool
    reason: str
    reeb: AlgebraElement | None = None
    kernel: KernelReport | None = None

    def __bool__(self):
        return self.is_contact


def is_contact_form(algebra, form_or_values, trials=INDEX_TRIALS, seed=0):
    """Kernel-generator contact test; returns the Reeb vector when true."""
    n = algebra.dim
    if n % 2 == 0:
        return ContactResult(False, "even dimension")
    report = kernel(algebra, form_or_values)
    if report.dimension != 1:
        return ContactResult(False, f"kernel dimension {report.dimension} != 1", kernel=report)
    if index(algebra, trials=trials, seed=seed) != 1:
        return ContactResult(False, "index != 1", kernel=report)
    gen = algebra.element(report.vectors[0])
    values = _as_values(algebra, form_or_values)
    phi_b = sum((c * values[i] for i, c in enumerate(gen.vec)), Fraction(0))
    if phi_b == 0:
        return ContactResult(False, "form vanishes on the kernel generator", kernel=report)
    reeb = (Fraction(1) / abs(phi_b)) * gen
    return ContactResult(True, "contact", reeb=reeb, kernel=report)


def is_contact_form_volume(algebra, form_or_values):
    """Independent oracle: the bordered skew determinant is nonzero.

    Builds [[0, φ(b_j)], [-φ(b_i), dφ(b_i, b_j)]] and tests its
    determinant; this realizes the top volume-form condition directly.
    """
    n = algebra.dim
    if n % 2 == 0:
        raise ShapeError("volume-form test requires odd dimension")
    values = _as_values(algebra, form_or_values)
    m = dphi_matrix(algebra, values)
    rows = [[Fraction(0)] + values]
    for i in range(n):
        rows.append([-values[i]] + m.rows[i])
    return linalg.determinant(RatMatrix(rows)) != 0


def principal_element(algebra, form_or_values):
    """The unique x with φ([x, y]) = φ(y) for all y (Frobenius forms only)."""
    values = _as_values(algebra, form_or_values)
    m = dphi_matrix(algebra, values)
    # φ([x, b_j]) = Σ_i x_i φ([b_i, b_j]) = Σ_i (-M[i][j]) x_i = (M x)_j by skewness
    sol = linalg.solve(m, values)
    if sol is None or linalg.rank(m) < algebra.dim:
        raise NotFrobeniusError("dφ is singular; the form is not Frobenius")
    return algebra.element(sol)


def is_binary_spectrum(algebra, form_or_values):
    """char_poly(ad(x̂)) == λ^(d/2) (λ-1)^(d/2); false for odd dimension."""
    d = algebra.dim
    if d % 2 == 1:
        return False
    x_hat = principal_element(algebra, form_or_values)
    coeffs = linalg.char_poly(algebra.ad_matrix(x_hat))
    half = d // 2
    expected = [Fraction(1)]
    for _ in range(half):
        nxt = expected + [Fraction(0)]
        for k in range(len(expected)):
            nxt[k + 1] -= expected[k]
        expected = nxt
    expected = expected + [Fraction(0)] * half  # multiply by λ^{d/2}
    return coeffs == expected


def spectrum(algebra, form_or_values):
    """Characteristic polynomial of ad of the principal element."""
    x_hat = principal_element(algebra, form_or_values)
    return linalg.char_poly(algebra.ad_matrix(x_hat))


@dataclass(frozen=True)
class FormGraph:
    edges: frozenset  # directed (p, q) strict support pairs
    sinks: frozenset
    sources: frozenset
    interior: frozenset  # neither pure sink nor pure source


def form_graph(poset, form):
    edges = form.strict_support
    has_in = {p: False for p in poset.elements}
    has_out = {p: False for p in poset.elements}
    for p, q in edges:
        has_out[p] = True
        has_in[q] = True
    sinks = frozenset(p for p in poset.elements if has_in[p] and not has_out[p])
    sources = frozenset(p for p in poset.elements if has_out[p] and not has_in[p])
    interior = frozenset(p for p in poset.elements if p not in sinks and p not in sources)
    return FormGraph(frozenset(edges), sinks, sources, interior)


def udo_partition(poset, form):
    g = form_graph(poset, form)
    return g.sinks, g.sources, g.interior


def is_small(poset, form):
    """Strict support is a spanning tree of the comparability graph."""
    edges = form.strict_support
    if len(edges) != poset.n - 1:
        return False
    parent = {p: p for p in poset.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in edges:
        rp, rq = find(p), find(q)
        if rp == rq:
            return False
        parent[rp] = rq
    return True


def restrict_element(elem, label_map, target_algebra):
    """Restriction of an element to a sub-poset's algebra.

    ``label_map`` sends the target poset's labels to the host labels;
    matrix coordinates at pairs inside the image are kept.
    """
    coords = elem.matrix_coords
    inv = {v: k for k, v in label_map.items()}
    out = {}
    for (p, q), c in coords.items():
        if p in inv and q in inv:
            out[(inv[p], inv[q])] = c
    if target_algebra.kind == "g":
        return target_algebra.element_from_coords(out)
    raise ShapeError("restriction targets the full incidence algebra")
