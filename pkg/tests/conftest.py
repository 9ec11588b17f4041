import time
import zlib
from collections import defaultdict

import numpy as np
import pytest
from scipy.linalg import expm

from reeblift import SymplecticPath, select_params, verify_theorems
from reeblift.errors import RefinementNeeded
from reeblift.sp2_index import rotation_interval

CRITERIA = {
    1: "n=2, eps=1/2: 1.5 < rho_sys < 2 and dynamically convex with minimum index 3, under 30 s",
    2: "theorem windows on (2, 1/2), (3, 1/4), (4, 1/4), under 60 s per cell",
    3: "all eight map statements pass for every selected parameter set, witness exact",
    4: "round-sphere reference values are exact",
    5: "oracle equivalence on 100 Hamiltonians and 24 index cases, under 2 min",
    6: "cutoff inequalities on 10^4-point grids for four band widths",
    7: "index naturality, loop shift and singleton table",
    8: "return time equals pi + action on a 20-radius sweep",
}

GRID = [(2, 0.5), (3, 0.25), (4, 0.25)]

_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        for mark in item.iter_markers("criterion"):
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        for key, value in report.user_properties:
            if key == "criterion":
                _outcomes[value].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        runs = _outcomes.get(n)
        if runs is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status} - {text}")


@pytest.fixture(scope="session")
def theorem_runs():
    """verify_theorems on the acceptance grid, with wall-clock times."""
    runs = {}
    for n, eps in GRID:
        t0 = time.perf_counter()
        rep = verify_theorems(n, eps)
        runs[(n, eps)] = (rep, time.perf_counter() - t0)
    return runs


@pytest.fixture(scope="session")
def selected_params():
    return {(n, eps): select_params(n, eps) for n, eps in GRID}


# random symplectic data ----------------------------------------------------


def random_sl2_generator(rng, scale=1.5):
    a, b, c = rng.normal(0.0, scale, 3)
    return np.array([[a, b], [c, -a]])


def random_sp2(rng, max_cond=100.0):
    """Random element of Sp(2) with condition number below ``max_cond``."""
    while True:
        m = expm(random_sl2_generator(rng, 0.8))
        if np.linalg.cond(m) < max_cond:
            return m


def sampled_path(func, n_samples=256):
    """Sample func on a grid fine enough for the winding increments."""
    while True:
        try:
            path = SymplecticPath.from_function(func, n_samples)
            rotation_interval(path)
            return path
        except RefinementNeeded:
            n_samples *= 2


def random_path(rng):
    """``t -> expm(t X1) expm(t^2 X2)``."""
    x1, x2 = random_sl2_generator(rng), random_sl2_generator(rng)
    return lambda t: expm(t * x1) @ expm(t * t * x2)


def random_loop(rng, m):
    """``t -> R(2 pi m t) expm(sin(2 pi t) Y)``, a loop of Maslov index m."""
    y = random_sl2_generator(rng, 0.7)

    def loop(t):
        c, s = np.cos(2 * np.pi * m * t), np.sin(2 * np.pi * m * t)
        return np.array([[c, -s], [s, c]]) @ expm(np.sin(2 * np.pi * t) * y)

    return loop


@pytest.fixture
def rng(request):
    # stable per-test seed
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))
