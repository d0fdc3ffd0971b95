"""Randomized property suites shared by ``padop selftest`` and the test suite.

Each suite draws from its own ``random.Random(f"{seed}:{name}")`` stream, so
suites are independent of each other and of execution order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import derivations as dv
from .errors import PadopError, RepeatedEigenvalues, SpectrumNotSplit
from .funcalc import (
    ClampFunction,
    PPolynomial,
    funcalc_spectral,
    mahler_from_samples,
    operator_root,
    poly_eval,
    poly_norm_check,
)
from .linalg import PMatrix, eig_symmetric, ldu_decompose
from .padic import ZERO, PadicScalar, default_prec
from .sampling import (
    distinct_spectrum,
    random_block_shape,
    random_matrix,
    random_scalar,
    random_symmetric_split,
    random_zp,
)


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    stats: dict = field(default_factory=dict)
    first_failure: str | None = None

    def record(self, ok: bool, detail: str = "") -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail or f"case {self.cases}"

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def as_dict(self) -> dict:
        return {"cases": self.cases, "failures": self.failures, "passed": self.passed,
                "stats": self.stats, "first_failure": self.first_failure}


def suite_rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


def _is_scalar_matrix(M: PMatrix) -> bool:
    n = M.n
    d0 = M[0, 0]
    return all(M[i, j].is_zero() for i in range(n) for j in range(n) if i != j) and \
        all((M[i, i] - d0).is_zero() for i in range(n))


def inner_recovery(rng, primes=(5, 7), sizes=(2, 3, 4), count=100) -> SuiteResult:
    """``solve_inner(ad B)`` recovers ``B`` up to a scalar, residual zero at precision."""
    res = SuiteResult("inner_recovery")
    algs = {}
    worst_cert = ZERO
    N = default_prec()
    for i in range(count):
        p, n = rng.choice(primes), rng.choice(sizes)
        alg = algs.get((p, n)) or algs.setdefault((p, n), dv.full_algebra(p, n))
        B0 = random_matrix(rng, p, n)
        out = dv.solve_inner(dv.DerivationMap.ad(B0), alg)
        ok = out.status == "inner" and out.residual == ZERO and out.certified >= N - 2
        ok = ok and _is_scalar_matrix(out.witness - B0)
        worst_cert = min(worst_cert, out.certified)
        res.record(ok, f"p={p} n={n} case {i}: status={out.status}")
    res.stats["min_residual_valuation"] = worst_cert if worst_cert != ZERO else "ZERO"
    return res


def derivation_dimensions(rng, p=5, full_sizes=(2, 3, 4), diag_sizes=(2, 3, 4, 5, 6)) -> SuiteResult:
    res = SuiteResult("derivation_dimensions")
    dims = {}
    for n in full_sizes:
        d = dv.derivation_space_dim(dv.full_algebra(p, n))
        dims[f"Mat_{n}"] = d
        res.record(d == n * n - 1, f"Mat_{n}: dimension {d}")
    for m in diag_sizes:
        d = dv.derivation_space_dim(dv.diagonal_algebra(p, m))
        dims[f"diag_{m}"] = d
        res.record(d == 0, f"diagonal {m}: dimension {d}")
    res.stats["dimensions"] = dims
    return res


def center_annihilation(rng, primes=(5, 7), total_max=6, count=50) -> SuiteResult:
    """Every derivation of a block algebra kills its center."""
    res = SuiteResult("center_annihilation")
    derivs = 0
    for i in range(count):
        p = rng.choice(primes)
        shape = random_block_shape(rng, total_max)
        alg = dv.block_algebra(p, shape)
        space = dv.derivation_space(alg)
        derivs += len(space)
        ok = all(dv.annihilates_center(D, alg) for D in space)
        ok = ok and len(space) == sum(k * k - 1 for k in shape)
        res.record(ok, f"shape {shape}")
    res.stats["derivations_checked"] = derivs
    return res


def _random_in(rng, alg, blocks, support) -> PMatrix:
    p = alg.p
    coords = [random_scalar(rng, p, 0, 2).raw for _ in range(alg.dim)]
    X = dv.from_sparse(p, alg.n, alg.element(coords))
    mask = PMatrix.zeros(p, alg.n)
    for k in support:
        mask = mask + blocks[k].projection
    return mask @ X


def carrier_law(rng, primes=(5, 7), total_max=6, count=200) -> SuiteResult:
    """``B Q = 0`` exactly when ``C_B C_Q = 0`` for block-supported B in alg, Q in the commutant."""
    res = SuiteResult("carrier_law")
    cache = {}
    zero_products = 0
    for i in range(count):
        p = rng.choice(primes)
        shape = random_block_shape(rng, total_max)
        if len(shape) < 2:
            shape = shape + [1]
        mult = rng.choice((1, 1, 2)) if sum(shape) <= 3 else 1
        key = (p, tuple(shape), mult)
        if key not in cache:
            alg = dv.block_algebra(p, shape, mult)
            cache[key] = (alg, dv.commutant(alg), alg.blocks())
        alg, comm, blocks = cache[key]
        sb = [k for k in range(len(blocks)) if rng.random() < 0.5]
        sq = [k for k in range(len(blocks)) if rng.random() < 0.5]
        B = _random_in(rng, alg, blocks, sb)
        Q = _random_in(rng, comm, blocks, sq)
        lhs = (B @ Q).is_zero()
        rhs = (dv.central_carrier(B, alg) @ dv.central_carrier(Q, alg)).is_zero()
        carrier_ok = (dv.central_carrier(B, alg) @ B).equals(B)
        zero_products += lhs
        res.record(lhs == rhs and carrier_ok, f"shape {shape} x{mult}: BQ=0 {lhs}, CbCq=0 {rhs}")
    res.stats["zero_products"] = zero_products
    return res


def decomposition(rng, primes=(5, 7), n_max=8, count=1000) -> SuiteResult:
    """``P_r A P_c = C T E`` with unit-ball triangular factors."""
    res = SuiteResult("decomposition")
    deficient = 0
    for i in range(count):
        p = primes[i % len(primes)]
        n = rng.randint(1, n_max)
        if rng.random() < 0.2 and n > 1:
            k = rng.randint(1, n - 1)
            A = random_matrix(rng, p, n, m=k) @ random_matrix(rng, p, k, m=n)
            deficient += 1
        else:
            A = random_matrix(rng, p, n, 0, 3, zero_rate=0.15)
        dec = ldu_decompose(A)
        eye = PMatrix.identity(p, n)
        ok = dec.product().equals(dec.permute(A))
        ok = ok and (dec.C - eye).norm() >= 0 and (dec.E - eye).norm() >= 0
        diag = [dec.T[j, j].norm() for j in range(n)]
        ok = ok and all(a <= b for a, b in zip(diag, diag[1:]))
        res.record(ok, f"p={p} n={n} case {i}")
    res.stats["rank_deficient_cases"] = deficient
    return res


def _random_poly(rng, p: int, deg_max: int = 4) -> PPolynomial:
    deg = rng.randint(1, deg_max)
    return PPolynomial(p, [random_scalar(rng, p, -1, 2, zero_rate=0.2) for _ in range(deg)] + [random_scalar(rng, p, -1, 2)])


def norm_bounds(rng, primes=(5, 7), n_max=5, count=500) -> SuiteResult:
    """Polynomial and Mahler-series norm bounds on symmetric split operators."""
    res = SuiteResult("norm_bounds")
    agree = 0
    for i in range(count):
        p = rng.choice(primes)
        n = rng.randint(2, n_max)
        A, _ = random_symmetric_split(rng, p, n)
        S = _random_poly(rng, p)
        value = poly_eval(S, A)
        ok = poly_norm_check(S, A, value).holds
        f = mahler_from_samples([S(PadicScalar.from_int(x, p)) for x in range(S.degree + 1)], p)
        spectral = funcalc_spectral(f, A)
        ok = ok and spectral.check.holds
        same = spectral.value.equals(value)
        agree += same
        res.record(ok and same, f"p={p} n={n} case {i}")
    res.stats["two_route_agreement"] = agree
    return res


def _symmetric_candidate(rng, p: int, n: int):
    """A random symmetric matrix with split simple spectrum, or None after some tries."""
    for _ in range(40):
        M = random_matrix(rng, p, n, 0, 2, zero_rate=0.1)
        A = M + M.T
        try:
            return A, eig_symmetric(A)
        except (SpectrumNotSplit, RepeatedEigenvalues):
            continue
    return None


def eigen_isometry(rng, primes=(5, 7), n_max=5, count=200) -> SuiteResult:
    res = SuiteResult("eigen_isometry")
    iso = 0
    generic = 0
    for i in range(count):
        p = rng.choice(primes)
        n = rng.randint(2, n_max)
        found = _symmetric_candidate(rng, p, n) if i % 2 else None
        if found is None:
            A, _ = random_symmetric_split(rng, p, n)
            eig = eig_symmetric(A)
        else:
            (A, eig), generic = found, generic + 1
        ok = eig.reconstruct().equals(A)
        if eig.isometric:
            iso += 1
            ok = ok and (eig.C @ eig.C.T).equals(PMatrix.identity(p, n).to_ext(eig.d) if eig.d != "1" else PMatrix.identity(p, n))
        res.record(ok, f"p={p} n={n} case {i}")
    res.stats["isometric_rate"] = f"{iso}/{res.cases}"
    res.stats["generic_symmetric_cases"] = generic
    return res


def operator_roots(rng, primes=(5, 7), n_max=4, orders=(2, 3), count=100) -> SuiteResult:
    res = SuiteResult("operator_roots")
    for i in range(count):
        p = rng.choice(primes)
        k = rng.choice(orders)
        n = rng.randint(2, n_max)
        A, _ = random_symmetric_split(rng, p, n, valuations=(0, 1), power=k)
        out = operator_root(A, k)
        ok = out.power_residual == ZERO and out.commutator == ZERO and out.poly_residual == ZERO
        res.record(ok, f"p={p} n={n} order {k} case {i}")
    return res


def mahler_truncation(rng, p=5, K=25, points=1000) -> SuiteResult:
    """Truncation error of the Mahler series of ``x**p`` against the coefficient tail."""
    res = SuiteResult("mahler_truncation")
    f = mahler_from_samples([PadicScalar.from_int(x**p, p) for x in range(K + 1)], p)
    tails = [f.tail_exponent(k) for k in range(K + 1)]
    for _ in range(points):
        x = random_zp(rng, p)
        fx = x**p
        partial = x * 0
        binom = x * 0 + 1
        ok = True
        for k in range(K + 1):
            if k:
                binom = binom * (x - (k - 1)) / k
            partial = partial + f.coeffs[k] * binom
            if (fx - partial).norm() < tails[k]:
                ok = False
        res.record(ok, f"x = {x!r}")
    res.stats["coefficient_exponents"] = [c.norm() if not c.is_zero() else "ZERO" for c in f.coeffs[: p + 2]]
    return res


def clamp_checks(rng, primes=(5, 7), per_valuation=8, matrices=20, n_max=4) -> SuiteResult:
    res = SuiteResult("clamp")
    for p in primes:
        cl = ClampFunction(p)
        for v in range(-8, 9):
            for _ in range(per_valuation):
                t = random_scalar(rng, p, v, v)
                c = cl(t)
                k = max(0, -v)
                expect = t if k == 0 else t * PadicScalar(p, 2 * k - 1, 1)
                ok = c.norm() >= 0 and (cl(c) - c).is_zero() and (c - expect).is_zero()
                if v >= 0:
                    ok = ok and (c - t).is_zero()
                res.record(ok, f"p={p} v={v}")
        series = cl.mahler_series(12)
        for _ in range(matrices):
            A, _ = random_symmetric_split(rng, p, rng.randint(2, n_max))
            out = funcalc_spectral(series, A)
            res.record(out.value.equals(A) and out.check.holds, f"p={p} spectral clamp")
    return res


def functional_checks(rng, primes=(5, 7), n_max=4, count=100) -> SuiteResult:
    """Evaluation functionals on diagonal algebras: f(rho(A)) = rho(f(A)) and rho(D A) = 0."""
    res = SuiteResult("functionals")
    for i in range(count):
        p = rng.choice(primes)
        n = rng.randint(2, n_max)
        j = rng.randrange(n)
        rho = dv.SymmetricFunctional.coordinate(p, n, j)
        spectrum = distinct_spectrum(rng, p, n, (0, 1))
        A = PMatrix.diag(p, spectrum)
        S = _random_poly(rng, p, 3)
        f = mahler_from_samples([S(PadicScalar.from_int(x, p)) for x in range(S.degree + 1)], p)
        fA = funcalc_spectral(f, A).value
        ok = (rho(fA) - f(rho(A))).is_zero()
        ok = ok and rho.is_definite_on(A) and rho.is_symmetric()
        B = random_matrix(rng, p, n)
        B0 = PMatrix.diag(p, distinct_spectrum(rng, p, n, (0, 1)))
        D = dv.DerivationMap.ad(B)
        ok = ok and rho(D(B0 @ B0)).is_zero()
        res.record(ok, f"p={p} n={n} case {i}")
    return res


#: Suite name -> (callable, full-size keyword arguments).
SUITES = {
    "inner_recovery": inner_recovery,
    "derivation_dimensions": derivation_dimensions,
    "center_annihilation": center_annihilation,
    "carrier_law": carrier_law,
    "decomposition": decomposition,
    "norm_bounds": norm_bounds,
    "eigen_isometry": eigen_isometry,
    "operator_roots": operator_roots,
    "mahler_truncation": mahler_truncation,
    "clamp": clamp_checks,
    "functionals": functional_checks,
}


def run_suites(seed: int = 42, p: int | None = None, n_max: int | None = None, quick: bool = False,
               names=None) -> dict[str, SuiteResult]:
    """Run the suites with their full case counts (or a tenth of them with ``quick``)."""
    primes = (p,) if p is not None else (5, 7)
    scale = 10 if quick else 1

    def cap(k: int) -> int:
        return k if n_max is None else max(2, min(k, n_max))

    def cnt(k: int) -> int:
        return max(1, k // scale)

    plans = {
        "inner_recovery": dict(primes=primes, sizes=tuple(sorted({cap(2), cap(3), cap(4)})), count=cnt(100)),
        "derivation_dimensions": dict(p=primes[0], full_sizes=tuple(sorted({cap(k) for k in (2, 3, 4)})),
                                      diag_sizes=tuple(sorted({cap(k) for k in (2, 3, 4, 5, 6)}))),
        "center_annihilation": dict(primes=primes, total_max=cap(6), count=cnt(50)),
        "carrier_law": dict(primes=primes, total_max=cap(6), count=cnt(200)),
        "decomposition": dict(primes=primes, n_max=cap(8), count=cnt(1000)),
        "norm_bounds": dict(primes=primes, n_max=cap(5), count=cnt(500)),
        "eigen_isometry": dict(primes=primes, n_max=cap(5), count=cnt(200)),
        "operator_roots": dict(primes=primes, n_max=cap(4), count=cnt(100)),
        "mahler_truncation": dict(p=primes[0], points=cnt(1000)),
        "clamp": dict(primes=primes, per_valuation=max(1, 8 // scale), matrices=cnt(20), n_max=cap(4)),
        "functionals": dict(primes=primes, n_max=cap(4), count=cnt(100)),
    }
    out = {}
    for name, fn in SUITES.items():
        if names is not None and name not in names:
            continue
        rng = suite_rng(seed, name)
        try:
            out[name] = fn(rng, **plans[name])
        except PadopError as exc:
            r = SuiteResult(name)
            r.record(False, f"{exc.name}: {exc}")
            out[name] = r
    return out
