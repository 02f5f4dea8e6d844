import socket
import time

import numpy as np
import pytest

from emodesk.voice.dsp import AudioClip

SR = 16000
_SUITE_STARTED = time.perf_counter()
_SUITE_BUDGET_S = 120.0


def tone(freq_hz: float, dur_s: float = 0.8, amp: float = 0.4, phase: float = 0.0, sr: int = SR) -> AudioClip:
    t = np.arange(int(sr * dur_s)) / sr
    return AudioClip(samples=amp * np.sin(2 * np.pi * freq_hz * t + phase), sample_rate_hz=sr)


def silence(dur_s: float = 0.5, sr: int = SR) -> AudioClip:
    return AudioClip(samples=np.zeros(int(sr * dur_s)), sample_rate_hz=sr)


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::", 1)[-1]
        status = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
        print(f"\n[acceptance] {status} {name}", flush=True)


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _SUITE_STARTED
    status = "PASS" if elapsed < _SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(
        f"[acceptance] {status} full_suite_runtime ({elapsed:.1f} s, budget {_SUITE_BUDGET_S:.0f} s)"
    )
