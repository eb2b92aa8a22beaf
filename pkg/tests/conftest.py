import random
from importlib import resources

import pytest
from hypothesis import strategies as st

from polarlab.gf2 import BitMatrix, rank
from polarlab.kernel import Kernel

# acceptance results collected by test_acceptance.py: number -> (ok, detail)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def fixture_kernel(name: str) -> Kernel:
    return Kernel.from_text(resources.files("polarlab").joinpath(f"data/{name}.txt").read_text())


def random_kernel(ell: int, rng: random.Random) -> Kernel:
    while True:
        rows = tuple(rng.getrandbits(ell) for _ in range(ell))
        m = BitMatrix(ell, ell, rows)
        if rank(m) == ell:
            return Kernel(m)


@st.composite
def kernels(draw, min_ell=2, max_ell=8):
    ell = draw(st.integers(min_ell, max_ell))
    rows = tuple(draw(st.lists(st.integers(0, (1 << ell) - 1), min_size=ell, max_size=ell)))
    m = BitMatrix(ell, ell, rows)
    if rank(m) != ell:
        # make it invertible without losing the drawn structure: add the identity
        rows = tuple(r ^ (1 << i) for i, r in enumerate(rows))
        m = BitMatrix(ell, ell, rows)
    if rank(m) != ell:
        m = BitMatrix.identity(ell)
    return Kernel(m)


def corpus() -> list[tuple[str, Kernel]]:
    """Kernels with l <= 16 used by property checks."""
    from polarlab.bch import bch_kernel
    from polarlab.search import greedy_gv_construct

    out = [(name, fixture_kernel(name)) for name in
           ("g2", "example1_f", "shorten5", "shorten5_result", "kernel16")]
    out += [(f"bch_m{m}", bch_kernel(m).kernel) for m in (2, 3, 4)]
    out += [(f"gv_{ell}", greedy_gv_construct(ell)) for ell in (4, 6, 8)]
    rng = random.Random(7)
    out += [(f"random_{ell}_{t}", random_kernel(ell, rng)) for ell in (3, 5, 8, 12) for t in range(2)]
    out.append(("identity_4", Kernel.identity(4)))
    return out


@pytest.fixture(scope="session")
def kernel_corpus():
    return corpus()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
