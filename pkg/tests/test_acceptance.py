"""The twelve acceptance criteria, at their stated sizes and tolerances.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import json
import time

import pytest

from padop import cli, padic
from padop.suites import run_suites

SEED = 42
N = 32

#: criterion number -> (passed, detail)
RESULTS: dict[int, tuple[bool, str]] = {}

CRITERIA = {
    1: ("inner_recovery", "inner-derivation recovery"),
    2: ("derivation_dimensions", "derivation-space dimensions"),
    3: ("center_annihilation", "center annihilation"),
    4: ("carrier_law", "carrier law"),
    5: ("decomposition", "decomposition reconstruction"),
    6: ("norm_bounds", "norm bounds"),
    7: ("eigen_isometry", "eigendecomposition isometry"),
    8: ("operator_roots", "operator roots"),
    9: ("mahler_truncation", "Mahler truncation bound"),
    10: ("clamp", "clamp function"),
    11: ("functionals", "functional checks"),
    12: (None, "determinism"),
}


def summary_lines() -> list[str]:
    lines = []
    for k, (_, title) in CRITERIA.items():
        if k in RESULTS:
            ok, detail = RESULTS[k]
            lines.append(f"{'PASS' if ok else 'FAIL'} criterion {k:2d} ({title}): {detail}")
        else:
            lines.append(f"SKIP criterion {k:2d} ({title}): not run")
    return lines


@pytest.fixture(scope="module")
def suites():
    prec = padic.default_prec()
    padic.set_default_prec(N)
    t0 = time.perf_counter()
    out = run_suites(seed=SEED)
    out["_elapsed"] = time.perf_counter() - t0
    yield out
    padic.set_default_prec(prec)


def _check(suites, k):
    name, _ = CRITERIA[k]
    r = suites[name]
    detail = f"{r.cases} cases, {r.failures} failures"
    if r.stats:
        detail += ", " + ", ".join(f"{key}={val}" for key, val in r.stats.items())
    if r.first_failure:
        detail += f"; first failure: {r.first_failure}"
    RESULTS[k] = (r.passed, detail)
    assert r.passed, detail
    return r


def test_c01_inner_recovery(suites):
    r = _check(suites, 1)
    assert r.cases == 100
    v = r.stats["min_residual_valuation"]
    assert v == "ZERO" or v >= N - 2


def test_c02_derivation_dimensions(suites):
    r = _check(suites, 2)
    dims = r.stats["dimensions"]
    assert [dims[f"Mat_{n}"] for n in (2, 3, 4)] == [3, 8, 15]
    assert all(dims[f"diag_{m}"] == 0 for m in range(2, 7))


def test_c03_center_annihilation(suites):
    assert _check(suites, 3).cases == 50


def test_c04_carrier_law(suites):
    r = _check(suites, 4)
    assert r.cases == 200
    assert 0 < r.stats["zero_products"] < 200  # both sides of the equivalence exercised


def test_c05_decomposition(suites):
    r = _check(suites, 5)
    assert r.cases == 1000


def test_c06_norm_bounds(suites):
    r = _check(suites, 6)
    assert r.cases == 500


def test_c07_eigen_isometry(suites):
    r = _check(suites, 7)
    assert r.cases == 200


def test_c08_operator_roots(suites):
    assert _check(suites, 8).cases == 100


def test_c09_mahler_truncation(suites):
    assert _check(suites, 9).cases == 1000


def test_c10_clamp(suites):
    _check(suites, 10)


def test_c11_functionals(suites):
    assert _check(suites, 11).cases == 100


def test_c12_determinism(tmp_path, suites):
    outs = []
    for i in range(2):
        path = tmp_path / f"selftest{i}.json"
        code = cli.main(["selftest", "--seed", str(SEED), "--out", str(path)])
        outs.append((code, path.read_bytes()))
    same = outs[0][1] == outs[1][1]
    passed = json.loads(outs[0][1])["result"]["all_passed"]
    RESULTS[12] = (same and outs[0][0] == 0, f"two selftest reports {'byte-identical' if same else 'DIFFER'}, "
                                             f"{len(outs[0][1])} bytes, all suites passed={passed}; "
                                             f"suite run took {suites['_elapsed']:.1f}s")
    assert same and outs[0][0] == 0 and passed


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
