import pytest

from zpzp.selftest import (
    PROPERTIES,
    omega_injectivity,
    random_element,
    reversed_product,
    run_selftest,
)
from zpzp.skew import SkewElement, TruncationBox, mul


def test_default_suite_passes():
    report = run_selftest(3, 1, 2, 10, 4, 100, 42)
    assert report.passed
    assert [r.trials for r in report.results] == [100] * len(PROPERTIES)


@pytest.mark.parametrize("p,u,N,D_S,D_T", [(3, 2, 3, 10, 4), (5, 1, 2, 12, 3), (5, 3, 3, 6, 4), (7, 1, 2, 8, 3)])
def test_other_parameters_pass(p, u, N, D_S, D_T):
    assert run_selftest(p, u, N, D_S, D_T, 15, 3).passed


def test_wrong_product_is_caught():
    report = run_selftest(3, 1, 2, 10, 4, 20, 42, multiply=reversed_product)
    assert not report.passed
    text = report.render()
    assert "reproduce with --seed 42" in text and text.endswith("result=fail\n")


def test_truncating_inputs_is_caught():
    """A product that cuts T-degree before multiplying misses lowered terms."""

    def cut_first(a, b):
        box = a.box
        small = box.with_(D_T=2)
        return mul(a.to_box(small), b.to_box(small)).to_box(box)

    assert not run_selftest(3, 1, 2, 10, 4, 30, 1, multiply=cut_first).passed


def test_seed_determinism():
    a = run_selftest(3, 1, 2, 10, 4, 25, 7).render()
    b = run_selftest(3, 1, 2, 10, 4, 25, 7).render()
    assert a == b


def test_random_element_respects_support():
    import numpy as np

    box = TruncationBox(3, 2, 10, 4)
    x = random_element(box, np.random.default_rng(0), 2, 3)
    assert isinstance(x, SkewElement)
    assert x.t_degree() <= 1 and x.s_degree() <= 2


def test_omega_injectivity_exhaustive():
    checked, bad = omega_injectivity()
    assert checked == 3**6 and bad == []
