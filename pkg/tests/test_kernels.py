import json
import os
import subprocess
import sys

import numpy as np
import pytest

from zpzp import _kernels
from zpzp.skew import TruncationBox, product_tensor

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def random_pair(box, rng):
    shape = (box.D_T, box.D_S)
    return (rng.integers(0, box.modulus, size=shape), rng.integers(0, box.modulus, size=shape))


@needs_numba
@pytest.mark.parametrize("p,N,D_S,D_T,u", [(3, 2, 10, 4, 1), (5, 3, 7, 5, 2), (3, 9, 12, 6, 2), (7, 1, 8, 3, 1)])
def test_skew_product_parity(p, N, D_S, D_T, u):
    box = TruncationBox(p, N, D_S, D_T, u)
    O = np.ascontiguousarray(product_tensor(box))
    rng = np.random.default_rng(1)
    for _ in range(5):
        A, B = random_pair(box, rng)
        fast = _kernels.skew_product_numba(A, B, O, box.modulus)
        slow = _kernels.skew_product_numpy(A, B, O, box.modulus)
        assert np.array_equal(fast, slow)


@needs_numba
@pytest.mark.parametrize("shape", [(4, 4), (7, 3), (3, 7), (12, 9)])
def test_smith_parity(shape):
    rng = np.random.default_rng(sum(shape))
    for p, N in ((3, 5), (5, 3)):
        for _ in range(10):
            M = rng.integers(0, p**N, size=shape) * rng.choice([1, p, p * p], size=shape)
            M %= p**N
            fast = sorted(_kernels.smith_valuations_numba(M, p, N).tolist())
            slow = sorted(_kernels.smith_valuations_numpy(M, p, N).tolist())
            assert fast == slow


@needs_numba
def test_det_mod_prime_parity():
    rng = np.random.default_rng(7)
    prime = 2**31 - 1
    for n in (1, 5, 20):
        M = rng.integers(0, 2, size=(n, n))
        assert _kernels.det_mod_prime_numba(M, prime) == _kernels.det_mod_prime_numpy(M, prime)


def test_dtype_threshold():
    assert _kernels.coefficient_dtype(_kernels.INT64_MODULUS_LIMIT - 1) is np.int64
    assert _kernels.coefficient_dtype(_kernels.INT64_MODULUS_LIMIT) is object


def test_env_flag_selects_numpy_backend():
    code = (
        "import json, zpzp\n"
        "from zpzp.coinvariants import e_exponent, load_presentation\n"
        "from zpzp.orbit import det_blocks, det_exact, build_matrix, OrbitMatrixParams\n"
        "prm = OrbitMatrixParams(5, 2, 3, 1)\n"
        "print(json.dumps([zpzp.BACKEND, e_exponent(load_presentation('elementary_p3_m1'), 1)[0],"
        " det_exact(build_matrix(prm)), det_blocks(prm)]))\n"
    )
    out = {}
    for flag in ("1", "0"):
        env = {**os.environ, "ZPZP_DISABLE_NUMBA": flag}
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[flag] = json.loads(res.stdout)
    assert out["1"][0] == "numpy"
    if _kernels.HAVE_NUMBA:
        assert out["0"][0] == "numba"
    assert out["1"][1:] == out["0"][1:] == [9, 81, 81]


def test_dtype_accounts_for_box_size():
    assert TruncationBox(3, 10, 10, 4).dtype is np.int64
    big = TruncationBox(3, 15, 3000, 40)
    assert big.dtype is object
    assert _kernels.coefficient_dtype(3**15, 3000 * 40) is object
