"""Finite quotients of finitely presented Lambda(G)-modules and their sizes.

A presentation is a relation matrix over Lambda(G): X = Lambda^g / sum Lambda r_k.
For a level n the double coinvariants

    (X_{H_n})_{Gamma_n} = X / (omega_n(S) X + omega_n(T) X)

form a finite group (for the modules treated here) with a Z/p^N-basis
``generator (x) T^j S^i``, 0 <= i, j < p^n.  Its relation matrix is assembled
from the products T^j S^i r_k reduced modulo omega_n(S) and omega_n(T), and
its size is read off a Smith-type form over Z/p^N.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ParameterError, TruncationError
from .skew import SkewElement, TruncationBox, mul, omega_coeffs, reduce_mod_omega_S


@dataclass(frozen=True)
class ElementarySpec:
    """Exponents (m_1, ..., m_s) of an elementary module sum Lambda/p^(m_i)."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(m) for m in self.exponents)
        if not exps or any(m < 1 for m in exps):
            raise ParameterError(f"elementary exponents must be positive and nonempty, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def mu_G(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True, eq=False)
class ModulePresentation:
    """Left module with ``generators`` generators and one row per relation."""

    box: TruncationBox
    generators: int
    relations: tuple[tuple[SkewElement, ...], ...]

    def __post_init__(self):
        if self.generators < 1:
            raise ParameterError("a presentation needs at least one generator")
        rels = tuple(tuple(row) for row in self.relations)
        for row in rels:
            if len(row) != self.generators:
                raise ParameterError(f"relation has {len(row)} entries, expected {self.generators}")
            for entry in row:
                if entry.box != self.box:
                    raise ParameterError("relation entries must share the presentation box")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def from_terms(cls, box: TruncationBox, generators: int, relations) -> ModulePresentation:
        """``relations``: rows of per-generator ``{(j, i): c}`` dicts."""
        rows = [tuple(SkewElement.from_terms(box, terms) for terms in row) for row in relations]
        return cls(box, generators, tuple(rows))

    def direct_sum(self, other: ModulePresentation) -> ModulePresentation:
        if not self.box.same_ring(other.box):
            raise ParameterError("direct sum needs presentations over the same ring")
        box = TruncationBox(
            self.box.p,
            max(self.box.N, other.box.N),
            max(self.box.D_S, other.box.D_S),
            max(self.box.D_T, other.box.D_T),
            self.box.u,
        )
        zero = SkewElement.zero(box)
        rows = [tuple(r.to_box(box) for r in row) + (zero,) * other.generators for row in self.relations]
        rows += [(zero,) * self.generators + tuple(r.to_box(box) for r in row) for row in other.relations]
        return ModulePresentation(box, self.generators + other.generators, tuple(rows))

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        relations = []
        for row in self.relations:
            recs = []
            for g, entry in enumerate(row):
                for rec in entry.to_records():
                    recs.append({**rec, "g": g} if self.generators > 1 else rec)
            relations.append(recs)
        b = self.box
        return {
            "p": b.p,
            "N": b.N,
            "q_u": b.u,
            "D_S": b.D_S,
            "D_T": b.D_T,
            "generators": self.generators,
            "relations": relations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ModulePresentation:
        try:
            box = TruncationBox(int(data["p"]), int(data["N"]), int(data["D_S"]), int(data["D_T"]), int(data["q_u"]))
            g = int(data["generators"])
            raw = data["relations"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed presentation: {exc}") from exc
        if not isinstance(raw, list):
            raise ParameterError("'relations' must be a list")
        rows = []
        for rel in raw:
            if not isinstance(rel, list):
                raise ParameterError("each relation must be a list of {t, s, c[, g]} records")
            per_gen: list[list[dict]] = [[] for _ in range(g)]
            for rec in rel:
                try:
                    k = int(rec.get("g", 0))
                    per_gen[k].append({"t": int(rec["t"]), "s": int(rec["s"]), "c": int(rec["c"])})
                except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
                    raise ParameterError(f"malformed relation record {rec!r}") from exc
                if rec["t"] >= box.D_T or rec["s"] >= box.D_S or rec["t"] < 0 or rec["s"] < 0:
                    raise ParameterError(f"record {rec!r} lies outside the box")
            rows.append(tuple(SkewElement.from_records(box, recs) for recs in per_gen))
        return cls(box, g, tuple(rows))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ModulePresentation:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def elementary_presentation(box: TruncationBox, spec: ElementarySpec) -> ModulePresentation:
    """sum_i Lambda/p^(m_i): one generator and the relation p^(m_i) each."""
    g = len(spec.exponents)
    rows = []
    for k, m in enumerate(spec.exponents):
        rows.append(tuple(SkewElement.constant(box, box.p**m if c == k else 0) for c in range(g)))
    return ModulePresentation(box, g, tuple(rows))


def default_precision(n: int, max_exponent: int = 1) -> int:
    return max(4, 1 + max_exponent + n)


# ---------------------------------------------------------------------------
# linear algebra over Z/p^N


def smith_exponents(M, p: int, N: int) -> tuple[list[int], bool]:
    """Valuations of the Smith form of the row span of ``M`` over Z/p^N.

    One valuation per column, ascending; columns without a pivot report N.
    The flag is False when some column reaches N, in which case the cokernel
    size is only a lower bound at this precision.
    """
    mod = p**N
    M = np.asarray(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return [N] * cols, cols == 0
    work = _as_storage(M, mod)
    pivots = sorted(int(v) for v in _kernels.smith_valuations(work, p, N))
    vals = pivots + [N] * (cols - len(pivots))
    return vals, len(pivots) == cols


def _as_storage(M, mod: int) -> np.ndarray:
    dtype = _kernels.coefficient_dtype(mod)
    if dtype is object or M.dtype == object:
        out = np.frompyfunc(int, 1, 1)(np.array(M, dtype=object)) % mod
        return out if dtype is object else np.ascontiguousarray(out.astype(np.int64))
    return np.ascontiguousarray(M.astype(np.int64) % mod)


def cokernel_exponent(M, p: int, N: int) -> tuple[int, bool]:
    """log_p of the size of (Z/p^N)^cols / rowspan(M), and the stability flag."""
    vals, stable = smith_exponents(M, p, N)
    return sum(min(v, N) for v in vals), stable


# ---------------------------------------------------------------------------
# level relation matrices


def _mul_t_mod_omega(base: np.ndarray, w: np.ndarray, mod: int) -> np.ndarray:
    """Multiply T-polynomials on the last axis by T modulo omega(T)."""
    lead = base[..., -1]
    out = np.zeros_like(base)
    out[..., 1:] = base[..., :-1]
    out = (out - lead[..., None] * w) % mod
    return out


def _t_reduce(coords: np.ndarray, n_t: int, p: int, mod: int) -> np.ndarray:
    """Reduce T-polynomials (last axis) modulo omega_{n_t}(T); returns length p^n_t."""
    Pt = p**n_t
    w = np.array(omega_coeffs(p, n_t)[:Pt], dtype=object)
    L = coords.shape[-1]
    R = np.zeros(coords.shape[:-1] + (max(L, Pt),), dtype=object)
    R[..., :L] = coords
    for deg in range(R.shape[-1] - 1, Pt - 1, -1):
        lead = R[..., deg].copy()
        R[..., deg - Pt : deg] = (R[..., deg - Pt : deg] - lead[..., None] * w) % mod
        R[..., deg] = 0
    return R[..., :Pt] % mod


def level_matrix(X: ModulePresentation, n_s: int, n_t: int, N: int) -> np.ndarray:
    """Relation matrix of X / (omega_{n_s}(S) X + omega_{n_t}(T) X) over Z/p^N.

    Columns are indexed ``(generator, j, i)`` for the basis T^j S^i, i < p^n_s,
    j < p^n_t; rows are T^j S^i r_k for the same (j, i) and every relation k.
    Products run in a widened box so nothing is lost to truncation.
    """
    p = X.box.p
    Ps, Pt = p**n_s, p**n_t
    mod = p**N
    dtype = _kernels.coefficient_dtype(mod)
    g = X.generators
    cols = g * Ps * Pt
    if not X.relations:
        return np.zeros((0, cols), dtype=dtype)
    deg_t = max((e.t_degree() for row in X.relations for e in row), default=0)
    work = TruncationBox(p, N, max(X.box.D_S, N * Ps), max(deg_t, 0) + 1, X.box.u)
    S = SkewElement.S(work)
    w = np.array(omega_coeffs(p, n_t)[:Pt], dtype=object)
    out = []
    for row in X.relations:
        ys = [entry.to_box(work) for entry in row]
        for _ in range(Ps):
            coords = np.stack([np.array(reduce_mod_omega_S(y, n_s).coords, dtype=object) for y in ys])
            base = _t_reduce(coords, n_t, p, mod)  # (g, Ps, Pt)
            for _ in range(Pt):
                out.append(base.transpose(0, 2, 1).reshape(cols))
                base = _mul_t_mod_omega(base, w, mod)
            ys = [mul(S, y) for y in ys]
    M = np.array(out, dtype=object) % mod
    return M if dtype is object else M.astype(np.int64)


def level_relation_matrix(X: ModulePresentation, n: int, N: int | None = None) -> np.ndarray:
    """Relation matrix of the level-n double coinvariants over Z/p^N."""
    if n < 0:
        raise ParameterError("level n must be >= 0")
    p = X.box.p
    if p**n > X.box.D_S or p**n > X.box.D_T:
        raise TruncationError(f"p^n = {p ** n} exceeds the box bounds ({X.box.D_S}, {X.box.D_T})")
    return level_matrix(X, n, n, N if N is not None else X.box.N)


def e_exponent(X: ModulePresentation, n: int, N: int | None = None) -> tuple[int, bool]:
    """p-exponent of #(X_{H_n})_{Gamma_n}, with a precision-stability flag.

    Computed at N and again at N + 2; stable means both runs had every Smith
    valuation below the precision ceiling and agree.
    """
    if N is None:
        N = max(X.box.N, default_precision(n))
    e, stable = cokernel_exponent(level_relation_matrix(X, n, N), X.box.p, N)
    e2, stable2 = cokernel_exponent(level_relation_matrix(X, n, N + 2), X.box.p, N + 2)
    return e, stable and stable2 and e == e2


def elementary_e(spec: ElementarySpec, p: int, n: int) -> int:
    return spec.mu_G * p ** (2 * n)


# ---------------------------------------------------------------------------
# growth of A_{H_m}


@dataclass
class GrowthFit:
    """Exponents a_m of #A_{H_m} and the fit a_m = mu_A p^m + nu_A."""

    p: int
    exponents: list[int]
    stable: list[bool]
    mu_A: int | Fraction
    nu_A: int | Fraction
    m0: int | None
    consistent: bool

    @property
    def finite(self) -> bool:
        return all(self.stable)


def h_coinvariant_exponent(A: ModulePresentation, m: int, N: int | None = None, k_max: int | None = None):
    """p-exponent of #A_{H_m} = A / omega_m(S) A, or (lower bound, False).

    A_{H_m} is a Lambda(Gamma)-module; when it is finite, omega_K(T) kills it
    for K large and #A_{H_m}/omega_K(T) stops growing.  By Nakayama one
    repeated value already certifies that, so K is raised until two
    consecutive exponents agree.
    """
    p = A.box.p
    if N is None:
        N = max(A.box.N, default_precision(m))
    if k_max is None:
        k_max = m + 3
    prev = None
    for K in range(0, k_max + 1):
        e, stable = cokernel_exponent(level_matrix(A, m, K, N), p, N)
        e2, stable2 = cokernel_exponent(level_matrix(A, m, K, N + 2), p, N + 2)
        ok = stable and stable2 and e == e2
        if not ok:
            return e, False
        if prev is not None and e == prev:
            return e, True
        prev = e
    return prev, False


def finite_part_growth(A: ModulePresentation, m_max: int, N: int | None = None) -> GrowthFit:
    """Exponents a_m for m = 0..m_max and the exact fit from the last two levels."""
    if m_max < 1:
        raise ParameterError("need m_max >= 1 to fit two parameters")
    p = A.box.p
    exps, flags = [], []
    for m in range(m_max + 1):
        e, ok = h_coinvariant_exponent(A, m, N)
        exps.append(e)
        flags.append(ok)
    hi, lo = exps[-1], exps[-2]
    mu = Fraction(hi - lo, p**m_max - p ** (m_max - 1))
    nu = hi - mu * p**m_max
    mu = int(mu) if mu.denominator == 1 else mu
    nu = int(nu) if Fraction(nu).denominator == 1 else nu
    m0 = None
    for start in range(m_max, -1, -1):
        if all(exps[m] == mu * p**m + nu for m in range(start, m_max + 1)):
            m0 = start
        else:
            break
    consistent = isinstance(mu, int) and all(flags)
    return GrowthFit(p, exps, flags, mu, nu, m0, consistent)


# ---------------------------------------------------------------------------
# bounds report

REPORT_HEADER = ["n", "e_n", "lower", "upper", "stable", "pass"]


@dataclass
class GrowthReport:
    levels: list[int] = field(default_factory=list)
    e: list[int] = field(default_factory=list)
    predicted_lower: list[int] = field(default_factory=list)
    predicted_upper: list[int] = field(default_factory=list)
    stable: list[bool] = field(default_factory=list)
    verdict: list[bool] = field(default_factory=list)

    def rows(self):
        return zip(self.levels, self.e, self.predicted_lower, self.predicted_upper, self.stable, self.verdict)

    @property
    def all_stable(self) -> bool:
        return all(self.stable)

    @property
    def all_pass(self) -> bool:
        return all(v for v, s in zip(self.verdict, self.stable) if s)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for n, e, lo, hi, st, ok in self.rows():
            w.writerow([n, e, lo, hi, str(st).lower(), str(ok).lower()])
        return buf.getvalue()

    def to_json(self) -> str:
        recs = [dict(zip(REPORT_HEADER, row)) for row in self.rows()]
        return json.dumps(recs, indent=1) + "\n"


def bounds_report(
    X: ModulePresentation,
    spec: ElementarySpec,
    mu_A: int,
    nu_A: int,
    nu_B: int,
    n_max: int,
    N: int | None = None,
    max_precision: int | None = None,
) -> GrowthReport:
    """Measured e_n against mu_G p^2n <= e_n <= mu_G p^2n + mu_A p^n + nu_A + nu_B.

    Each level starts at precision ``N`` (default policy otherwise) and, while
    unstable, is retried two digits higher until ``max_precision``.
    """
    p = X.box.p
    report = GrowthReport()
    for n in range(n_max + 1):
        prec = N if N is not None else max(X.box.N, default_precision(n, max(spec.exponents)))
        cap = max(prec, max_precision or prec)
        e, stable = e_exponent(X, n, prec)
        while not stable and prec + 2 <= cap:
            prec += 2
            e, stable = e_exponent(X, n, prec)
        lower = spec.mu_G * p ** (2 * n)
        upper = lower + mu_A * p**n + nu_A + nu_B
        report.levels.append(n)
        report.e.append(e)
        report.predicted_lower.append(lower)
        report.predicted_upper.append(upper)
        report.stable.append(stable)
        report.verdict.append(lower <= e <= upper)
    return report


# ---------------------------------------------------------------------------
# growth spec files and shipped fixtures


@dataclass(frozen=True, eq=False)
class GrowthSpec:
    """A presentation together with its declared pseudo-isomorphism data."""

    presentation: ModulePresentation
    elementary: ElementarySpec
    mu_A: int
    nu_A: int
    nu_B: int
    name: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> GrowthSpec:
        pres = ModulePresentation.from_dict(data)
        try:
            spec = ElementarySpec(tuple(data["elementary"]))
            mu_A, nu_A, nu_B = int(data["mu_A"]), int(data["nu_A"]), int(data["nu_B"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"missing or malformed pseudo-isomorphism data: {exc}") from exc
        return cls(pres, spec, mu_A, nu_A, nu_B, str(data.get("name", "")))

    @classmethod
    def from_json(cls, text: str) -> GrowthSpec:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ParameterError("growth spec must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, path) -> GrowthSpec:
        return cls.from_json(Path(path).read_text())

    def report(self, n_max: int, N: int | None = None, max_precision: int | None = None) -> GrowthReport:
        return bounds_report(
            self.presentation, self.elementary, self.mu_A, self.nu_A, self.nu_B, n_max, N, max_precision
        )


def fixture_names() -> list[str]:
    root = resources.files("zpzp") / "fixtures"
    return sorted(f.name[:-5] for f in root.iterdir() if f.name.endswith(".json"))


def fixture_text(name: str) -> str:
    path = resources.files("zpzp") / "fixtures" / f"{name}.json"
    if not path.is_file():
        raise ParameterError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return path.read_text()


def load_presentation(name: str) -> ModulePresentation:
    return ModulePresentation.from_json(fixture_text(name))


def load_growth_spec(name: str) -> GrowthSpec:
    return GrowthSpec.from_json(fixture_text(name))
