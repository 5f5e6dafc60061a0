
import pytest

from heckerank2 import build_mul_table, registry_get
from heckerank2.parabolic import theta_table


@pytest.fixture(scope="session")
def g4():
    return build_mul_table("G4")


@pytest.fixture(scope="session")
def g4_right():
    p = registry_get("G4")
    return build_mul_table(p, side="right")


@pytest.fixture(scope="session")
def exact_tables():
    """Reference tables on the a_0 = 1 slice, built once per session."""
    return {g: build_mul_table(g) for g in ("G7", "G8", "G13")}


@pytest.fixture(scope="session")
def modular_tables():
    return {g: build_mul_table(g, mode="modular", seed=7) for g in ("G7", "G8", "G13")}


@pytest.fixture(scope="session")
def theta_g5():
    return theta_table("G5")


@pytest.fixture(scope="session")
def theta_g6():
    return theta_table("G6")


@pytest.fixture
def tmp_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("HECKERANK2_CACHE", str(tmp_path))
    return tmp_path
