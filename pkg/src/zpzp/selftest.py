"""Randomised property checks of the truncated skew arithmetic.

Every check takes a multiplication routine so that a deliberately broken
product can be swapped in; the suite must then fail.  Output depends only on
the parameters and the seed.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .skew import (
    SkewElement,
    TruncationBox,
    group_word,
    mul,
    omega,
    reduce_mod_omega_S,
)

Multiply = Callable[[SkewElement, SkewElement], SkewElement]


def reversed_product(a: SkewElement, b: SkewElement) -> SkewElement:
    """A wrong product (operands swapped), used to show the suite has teeth."""
    return mul(b, a)


def random_element(box: TruncationBox, rng: np.random.Generator, t_len: int, s_len: int) -> SkewElement:
    """Random element with T-degree < t_len and S-degree < s_len."""
    t_len, s_len = min(t_len, box.D_T), min(s_len, box.D_S)
    arr = np.zeros((box.D_T, box.D_S), dtype=object)
    vals = rng.integers(0, box.modulus, size=(t_len, s_len))
    mask = rng.random((t_len, s_len)) < 0.6
    arr[:t_len, :s_len] = np.where(mask, vals, 0)
    return SkewElement(box, arr)


@dataclass
class PropertyResult:
    name: str
    trials: int = 0
    failures: int = 0
    first_failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.trials > 0 and self.failures == 0

    def record(self, ok: bool, detail: str) -> None:
        self.trials += 1
        if not ok:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<22} trials={self.trials:<4} failures={self.failures:<4} {status}"


def _levels(box: TruncationBox) -> list[int]:
    """Levels m >= 1 whose omega_m(S) fits in the box."""
    out, m = [], 1
    while box.p**m < box.D_S:
        out.append(m)
        m += 1
    return out


def check_associativity(box, rng, trials, multiply: Multiply = mul) -> PropertyResult:
    """(ab)c = a(bc) computed in a doubled box, then cut to ``box``."""
    res = PropertyResult("associativity")
    guard = box.guard(2)
    t_len = max(1, (box.D_T + 2) // 3)
    for k in range(trials):
        a, b, c = (random_element(guard, rng, t_len, box.D_S) for _ in range(3))
        left = multiply(multiply(a, b), c).to_box(box)
        right = multiply(a, multiply(b, c)).to_box(box)
        res.record(left == right, f"trial {k}: a={a!r} b={b!r} c={c!r}")
    return res


def check_group_relation(box, rng, trials, multiply: Multiply = mul) -> PropertyResult:
    """(1+S)^a (1+T)^b = (1+T)^b (1+S)^(a q^b), starting with a = b = 1."""
    res = PropertyResult("group_relation")
    q = box.q
    cases = [(1, 1)] + [
        (int(rng.integers(0, 3 * box.p**2)), int(rng.integers(0, box.D_T))) for _ in range(trials - 1)
    ]
    for a, b in cases:
        lhs = multiply(group_word(box, 0, a), group_word(box, b, 0))
        rhs = group_word(box, b, a * q**b)
        res.record(lhs == rhs, f"(1+S)^{a} (1+T)^{b} with q={q}")
    return res


def _unit_factor(box: TruncationBox, m: int, power: int) -> SkewElement:
    """sum_(k < power) (1+S)^(k p^m), so that omega_m(S) times it is (1+S)^(power p^m) - 1."""
    out = SkewElement.zero(box)
    for k in range(power):
        out = out + group_word(box, 0, k * box.p**m)
    return out


def check_two_sided(box, rng, trials, multiply: Multiply = mul) -> PropertyResult:
    """omega_m(S) g lies in Lambda omega_m(S), with explicit witnesses for S, T and 1+T."""
    res = PropertyResult("two_sidedness")
    for m in _levels(box):
        work = box.reduction_box(m)
        w = omega(work, m, "S")
        one, S, T = SkewElement.one(work), SkewElement.S(work), SkewElement.T(work)
        # omega(S) (1+T) = (1+T) omega((1+S)^q - 1) = (1+T) U omega(S)
        shifted = multiply(one + T, _unit_factor(work, m, box.q))
        witnesses = {"S": (S, S), "1+T": (one + T, shifted), "T": (T, shifted - one)}
        for name, (g, g_prime) in witnesses.items():
            ok = multiply(w, g) == multiply(g_prime, w)
            res.record(ok, f"m={m}: omega*{name} != {name}'*omega")
        for k in range(max(0, trials // len(_levels(box)) - len(witnesses))):
            g = random_element(work, rng, box.D_T, box.D_S)
            ok = reduce_mod_omega_S(multiply(w, g), m).is_zero()
            res.record(ok, f"m={m} trial {k}: omega*g not in Lambda*omega for g={g!r}")
    return res


def check_round_trip(box, rng, trials, multiply: Multiply = mul) -> PropertyResult:
    """r - lift(reduce(r)) reduces to zero, and reduction is Lambda(Gamma)-linear."""
    res = PropertyResult("round_trip")
    levels = _levels(box)
    for k in range(trials):
        m = levels[k % len(levels)]
        work = box.reduction_box(m)
        r = random_element(work, rng, max(1, box.D_T // 2), work.D_S)
        coords = reduce_mod_omega_S(r, m)
        residual = r - coords.lift()
        ok = reduce_mod_omega_S(residual, m).is_zero()
        G = [int(x) for x in rng.integers(0, box.modulus, size=max(1, box.D_T - box.D_T // 2))]
        GT = SkewElement.from_t_poly(work, G)
        ok = ok and reduce_mod_omega_S(multiply(GT, r), m) == coords.left_multiply(G)
        res.record(ok, f"m={m} trial {k}: r={r!r}")
    return res


def check_rewrite(box, rng, trials, multiply: Multiply = mul) -> PropertyResult:
    """(1+S)^a (1+T) = (1+T) (1+S)^(a q mod p^m) modulo Lambda omega_m(S); first case a=8, m=2."""
    res = PropertyResult("coset_rewrite")
    levels = _levels(box)
    cases = [(8, 2)] if 2 in levels else []
    while len(cases) < trials:
        m = levels[len(cases) % len(levels)]
        cases.append((int(rng.integers(0, 3 * box.p**m)), m))
    for a, m in cases:
        work = box.reduction_box(m)
        one_t = SkewElement.one(work) + SkewElement.T(work)
        target = a * box.q % box.p**m
        lhs = reduce_mod_omega_S(multiply(group_word(work, 0, a), one_t), m)
        rhs = reduce_mod_omega_S(multiply(one_t, group_word(work, 0, target)), m)
        res.record(lhs == rhs, f"(1+S)^{a}(1+T) vs (1+T)(1+S)^{target} mod omega_{m}")
    return res


PROPERTIES = (
    check_associativity,
    check_group_relation,
    check_two_sided,
    check_round_trip,
    check_rewrite,
)


@dataclass
class SelftestReport:
    box: TruncationBox
    trials: int
    seed: int
    results: list[PropertyResult] = field(default_factory=list)
    extra_lines: list[str] = field(default_factory=list)
    extra_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.extra_ok and all(r.passed for r in self.results)

    def render(self) -> str:
        b = self.box
        lines = [f"selftest p={b.p} u={b.u} q={b.q} N={b.N} D_S={b.D_S} D_T={b.D_T} trials={self.trials} seed={self.seed}"]
        lines += [r.line() for r in self.results]
        lines += self.extra_lines
        for r in self.results:
            if r.first_failure:
                lines.append(f"first failure in {r.name}: {r.first_failure}")
        if not self.passed:
            lines.append(f"reproduce with --seed {self.seed}")
        lines.append("result=" + ("pass" if self.passed else "fail"))
        return "\n".join(lines) + "\n"


def run_selftest(
    p: int = 3,
    u: int = 1,
    N: int = 2,
    D_S: int = 10,
    D_T: int = 4,
    trials: int = 100,
    seed: int = 0,
    multiply: Multiply = mul,
) -> SelftestReport:
    box = TruncationBox(p, N, D_S, D_T, u)
    report = SelftestReport(box, trials, seed)
    for index, check in enumerate(PROPERTIES):
        rng = np.random.default_rng([seed, index])
        report.results.append(check(box, rng, trials, multiply))
    return report


def omega_injectivity(p: int = 3, m: int = 1, s_len: int = 3, t_len: int = 2, D_S: int = 20, D_T: int = 8):
    """Exhaustive check that omega_m(S) f = 0 mod p forces f = 0 mod p.

    Runs over every f with coefficients mod p supported on T^j S^i, i < s_len,
    j < t_len.  Returns (number of elements checked, list of counterexamples).
    """
    box = TruncationBox(p, 1, D_S, D_T)
    w = omega(box, m, "S")
    checked, bad = 0, []
    for digits in itertools.product(range(p), repeat=s_len * t_len):
        arr = np.zeros((D_T, D_S), dtype=np.int64)
        arr[:t_len, :s_len] = np.array(digits).reshape(t_len, s_len)
        f = SkewElement(box, arr)
        checked += 1
        if mul(w, f).is_zero() and not f.is_zero():
            bad.append(f)
    return checked, bad
