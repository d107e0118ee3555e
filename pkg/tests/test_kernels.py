import os
import subprocess
import sys

import numpy as np
import pytest

from finitepsido import _kernels_py, kernels
from finitepsido.group import Group

compiled = kernels.compiled_impl
needs_compiled = pytest.mark.skipif(compiled is None, reason="extension not built")


def _data(G, rng):
    n = G.order
    F = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return F, H


def reference_twisted(F, H, G):
    n = G.order
    P, S = G.pairing_matrix, G.sub_table
    out = np.zeros((n, n), dtype=complex)
    for xi in range(n):
        for u in range(n):
            out[xi, u] = sum(F[z, y] * H[S[xi, z], S[u, y]] * P[S[xi, z], y]
                             for z in range(n) for y in range(n))
    return out / n


def test_python_twisted_matches_definition():
    G = Group((2, 3))
    F, H = _data(G, np.random.default_rng(0))
    out = _kernels_py.twisted_convolution(F, H, G.pairing_matrix, G.sub_table)
    assert np.abs(out - reference_twisted(F, H, G)).max() < 1e-12


@needs_compiled
@pytest.mark.parametrize("moduli", [(5,), (12,), (4, 6), (2, 2, 3)])
def test_backends_agree(moduli):
    G = Group(moduli)
    rng = np.random.default_rng(1)
    F, H = _data(G, rng)
    P, S = G.pairing_matrix, G.sub_table
    for name, args in [("twisted_convolution", (F, H, P, S)),
                       ("diagonal_envelope", (F, S)),
                       ("phase_stft", (F, H, P, S))]:
        a = getattr(compiled, name)(*args)
        b = getattr(_kernels_py, name)(*args)
        assert a.shape == b.shape
        assert np.abs(a - b).max() < 1e-12, name
    V = rng.standard_normal((G.order,) * 4) + 1j * rng.standard_normal((G.order,) * 4)
    assert np.allclose(compiled.envelope_sup(V), _kernels_py.envelope_sup(V), rtol=1e-15, atol=0)


def test_wrapper_coerces_inputs():
    G = Group((4,))
    A = np.eye(4, dtype=np.float32)[:, ::-1]          # non-contiguous, real
    d = kernels.diagonal_envelope(A, G.sub_table.astype(np.int32))
    assert d.shape == (4,)


def test_pure_python_switch():
    env = dict(os.environ, FINITEPSIDO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from finitepsido import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "benchmark.py"
    spec = importlib.util.spec_from_file_location("benchmark", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    if kernels.compiled_impl is None:
        pytest.skip("extension not built")
    assert mod.main(["--sizes", "4", "--repeat", "1"]) == 0
    assert "phase_stft" in capsys.readouterr().out
