"""Numba and pure-numpy kernel backends must agree bitwise.

The backend is frozen at import time, so the fallback side runs in a
subprocess with FISHERDOC_NUMBA=0 and reports sha256 digests of every kernel
output; see backend_probe.py for what gets hashed.
"""

import json
import os
import subprocess
import sys

import pytest

from fisherdoc import accel

import backend_probe

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))


def _subprocess_digest(numba_flag):
    env = dict(os.environ, FISHERDOC_NUMBA=numba_flag)
    out = subprocess.run(
        [sys.executable, os.path.join(TESTS_DIR, "backend_probe.py")],
        env=env, capture_output=True, text=True, check=True, cwd=TESTS_DIR)
    return json.loads(out.stdout)


def test_backend_flag_selects_fallback():
    env = dict(os.environ, FISHERDOC_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c",
         "from fisherdoc import accel; print(accel.backend_name())"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.skipif(not accel.USE_NUMBA,
                    reason="numba backend not active in this process")
def test_backends_agree_bitwise():
    compiled = backend_probe.kernel_digest()
    interpreted = _subprocess_digest("0")
    assert [tuple(p) for p in interpreted] == compiled


def test_fallback_digest_is_deterministic():
    a = _subprocess_digest("0")
    b = _subprocess_digest("0")
    assert a == b
