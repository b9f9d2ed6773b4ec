import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable

from braggbell import params


@pytest.fixture
def rubidium():
    return params.rubidium_preset()


@pytest.fixture
def rubidium_derived(rubidium):
    return params.derive(rubidium)


@pytest.fixture
def at_ratio():
    """Rubidium with the coupling rescaled to an exact chi*n0/w_rec."""

    def _make(ratio, l0=2, n0=1):
        from dataclasses import replace

        p = replace(params.rubidium_preset(), l0=l0, n0=n0)
        return params.with_regime_ratio(p, ratio)

    return _make
