import json
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor

import pytest

from reslab import selftest


def test_all_checks_pass():
    res = selftest.run_selftest(0)
    assert [r.name for r in res] == [name for name, _ in selftest.CHECKS]
    bad = [(r.name, r.detail) for r in res if not r.passed]
    assert not bad


def test_threaded_matches_serial():
    serial = selftest.run_selftest(3)
    with ThreadPoolExecutor(4) as pool:
        threaded = selftest.run_selftest(3, pool.map)
    assert serial == threaded


def test_crash_is_reported(monkeypatch):
    def broken(rng):
        raise RuntimeError("nope")
    monkeypatch.setattr(selftest, "CHECKS", [("broken", broken)] + list(selftest.CHECKS[:1]))
    res = selftest.run_selftest(0)
    assert not res[0].passed and "RuntimeError" in res[0].detail
    assert res[1].passed


@pytest.mark.slow
def test_pure_python_backend(tmp_path):
    env = dict(os.environ, RESLAB_PURE_PYTHON="1")
    out = str(tmp_path / "o")
    proc = subprocess.run([sys.executable, "-m", "reslab.cli", "selftest", "--out", out],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "backend=python" in proc.stdout
    assert json.load(open(os.path.join(out, "summary.json")))["status"] == "pass"
