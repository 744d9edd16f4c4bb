import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.signal
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

SR = 16000


def sine(freq, duration=1.0, sr=SR, amp=0.5, phase=0.0):
    t = np.arange(int(round(duration * sr))) / sr
    return amp * np.sin(2 * np.pi * freq * t + phase)


def vowel(duration=1.0, f0=120.0, resonators=((700, 80), (1200, 90))):
    """Pulse train through second-order resonators."""
    n = int(duration * SR)
    x = np.zeros(n)
    x[::int(round(SR / f0))] = 1.0
    for freq, bw in resonators:
        r = np.exp(-np.pi * bw / SR)
        theta = 2 * np.pi * freq / SR
        x = scipy.signal.lfilter([1.0], [1.0, -2 * r * np.cos(theta), r * r], x)
    return 0.8 * x / np.abs(x).max()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
