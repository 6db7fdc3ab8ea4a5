import numpy as np
import pytest

from shc import _accel, kernels, oracle
from shc.perturb import spawn_center_fixed_points

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _run(kernel, cycle, loops, split=True):
    it = oracle.Itinerary.of(*loops)
    fp = oracle.fixed_point(oracle.loop_return_map(cycle, it))
    arr = np.array(loops, dtype=np.int64)
    return oracle._trace_arrays(oracle.pack(cycle), arr, fp, split, kernel)


@needs_numba
@pytest.mark.parametrize("split", [True, False])
def test_trace_kernels_agree(c0, random_cycles, split):
    for c in [c0] + random_cycles[:6]:
        for loops in ([(10, 4)], [(6, 5), (7, 4)]):
            a = _run(kernels.trace_py, c, loops, split)
            b = _run(kernels.trace_jit, c, loops, split)
            for x, y in zip(a[1:], b[1:]):
                assert np.array_equal(x, y)
            assert np.allclose(a[0], b[0], rtol=1e-12, atol=1e-15)


@needs_numba
def test_bump_kernels_agree():
    p = spawn_center_fixed_points(0.05, 200, 0.01)
    res = p.width / (4 * p.frequency) / 3
    a = kernels.bump_scan_py(p.support[0], p.width, p.amplitude, float(p.frequency), res)
    b = kernels.bump_scan_jit(p.support[0], p.width, p.amplitude, float(p.frequency), res)
    assert a[0] == b[0]
    assert a[1] == pytest.approx(b[1], rel=1e-12)


def test_record_layout(c0):
    pts, kind, region, step, fail = _run(kernels.trace_py, c0, [(10, 4)])
    assert len(pts) == 17
    assert kind.tolist() == [0, 1] + [2] * 4 + [3] + [4] * 10
    assert region[5] == kernels.REGION_K2 and region[-1] == kernels.REGION_K1
    assert np.all(fail == -1)


def test_env_flag(monkeypatch):
    import importlib
    monkeypatch.setenv("SHC_NUMBA", "0")
    mod = importlib.reload(_accel)
    assert mod.NUMBA_ENABLED is False
    monkeypatch.setenv("SHC_NUMBA", "1")
    mod = importlib.reload(_accel)
    assert mod.NUMBA_ENABLED is _accel.HAVE_NUMBA
