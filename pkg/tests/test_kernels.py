"""The compiled enumeration kernel and its pure-Python twin must be
bit-for-bit interchangeable: same iteration order, same accumulation order,
identical floats out."""

import os
import subprocess
import sys

import numpy as np
import pytest

from wigmore import _kernels_py
from wigmore._backend import BACKEND

from conftest import random_net

try:
    from wigmore import _kernels_cy
except ImportError:  # pure-python build
    _kernels_cy = None

requires_compiled = pytest.mark.skipif(
    _kernels_cy is None, reason="compiled kernel not built"
)


def run_kernel(mod, net, evidence):
    flat = net.flat()
    ev = net.evidence_vector(evidence)
    sums = np.zeros(int(flat.sums_off[-1]), dtype=np.float64)
    total = mod.enumerate_accumulate(
        flat.cards,
        flat.parents_off,
        flat.parents_flat,
        flat.strides_flat,
        flat.cpt_off,
        flat.cpt_flat,
        flat.sums_off,
        ev,
        sums,
    )
    return total, sums


def test_backend_reports_a_known_kernel():
    assert BACKEND in ("cython", "python")


@requires_compiled
def test_kernels_bit_identical_across_random_nets():
    rng = np.random.default_rng(23)
    for _ in range(40):
        net = random_net(rng, max_nodes=9, allow_ternary=True)
        names = list(net.variable_names)
        evidence = {}
        for name in names:
            if rng.random() < 0.3:
                states = net.variable(name).states
                evidence[name] = states[int(rng.integers(0, len(states)))]
        t_py, s_py = run_kernel(_kernels_py, net, evidence)
        t_cy, s_cy = run_kernel(_kernels_cy, net, evidence)
        assert t_py == t_cy  # bit-for-bit, not approx
        assert np.array_equal(s_py, s_cy)


@requires_compiled
def test_kernels_bit_identical_on_fully_observed_net():
    rng = np.random.default_rng(29)
    net = random_net(rng, max_nodes=6)
    evidence = {n: "true" for n in net.variable_names}
    t_py, _ = run_kernel(_kernels_py, net, evidence)
    t_cy, _ = run_kernel(_kernels_cy, net, evidence)
    assert t_py == t_cy


def test_env_var_forces_pure_python():
    env = dict(os.environ, WIGMORE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from wigmore._backend import BACKEND; print(BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_inference_results_backend_independent():
    # The public API must not care which kernel is underneath.
    from wigmore.bayesnet import enumerate_joint

    rng = np.random.default_rng(31)
    net = random_net(rng, max_nodes=8)
    res = enumerate_joint(net, {net.variable_names[-1]: "true"})
    code = (
        "import numpy as np\n"
        "from conftest import random_net\n"
        "from wigmore.bayesnet import enumerate_joint\n"
        "rng = np.random.default_rng(31)\n"
        "net = random_net(rng, max_nodes=8)\n"
        "res = enumerate_joint(net, {net.variable_names[-1]: 'true'})\n"
        "print(repr(res.p_evidence))\n"
    )
    env = dict(os.environ, WIGMORE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env=env,
        check=True,
        cwd=os.path.dirname(os.path.abspath(__file__)),
    )
    assert out.stdout.strip() == repr(res.p_evidence)
