import os

import galois
import pytest
from hypothesis import settings

from construction_engine import ConstructionSpec, FamilyType, construction_engine
from curve_service import CurveKind, EllipticModel, FiberedCurveSpec, curve_service
from galois_field import make_field

# Primeira chamada ao galois compila kernels JIT; sem deadline
settings.register_profile("ci", settings(max_examples=300, deadline=None))
settings.register_profile("dev", settings(max_examples=40, deadline=None))
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture(scope="session")
def gf5():
    return make_field(5)


@pytest.fixture(scope="session")
def gf9():
    return make_field(3, 2)


@pytest.fixture(scope="session")
def gf13():
    return make_field(13)


@pytest.fixture(scope="session")
def gf16():
    return make_field(2, 4)


@pytest.fixture(scope="session")
def baseline_flagship():
    spec = ConstructionSpec(family=FamilyType.BASELINE, p=3, m=2, r=3, b=8, M=7, N=6)
    return construction_engine.build(spec)


@pytest.fixture(scope="session")
def tamo_barg_13():
    spec = ConstructionSpec(family=FamilyType.TAMO_BARG, p=13, r=3, b=3, N=1)
    return construction_engine.build(spec)


@pytest.fixture(scope="session")
def cyclic_13():
    spec = ConstructionSpec(family=FamilyType.CYCLIC, p=13, r=3, c=2, dd=12)
    return construction_engine.build(spec)


@pytest.fixture(scope="session")
def refined_9():
    spec = ConstructionSpec(family=FamilyType.P1XP1_REFINED, p=3, m=2, r=3, alpha=2, dd=8)
    return construction_engine.build(spec)


@pytest.fixture(scope="session")
def ulmer_3():
    return construction_engine.build(ConstructionSpec(family=FamilyType.ULMER, p=3, d=4))


@pytest.fixture(scope="session")
def legendre_fibers():
    """Primeiro primo p > 3 com duas fibras de Legendre válidas: (p, t_values)"""
    candidates = [(int(p), 1) for p in galois.primes(199) if p > 3]
    found = curve_service.scan_fields(
        lambda field: FiberedCurveSpec(CurveKind.ELLIPTIC_MULTISECTION, field, 3, model=EllipticModel.LEGENDRE),
        candidates, min_fibers=2)
    assert found is not None
    field, fibers = found
    return field.p, [fiber.t.enc for fiber in fibers]
