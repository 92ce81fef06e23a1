import pytest

from wsvar import _kernels
from wsvar.seqspec import ReciprocalSums, validate_spec


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    _kernels.warmup()


@pytest.fixture(scope="session")
def lam_i():
    return ReciprocalSums(validate_spec("i", "lambda", 256))


@pytest.fixture(scope="session")
def lam_const():
    return ReciprocalSums(validate_spec("1", "lambda", 256))


@pytest.fixture(scope="session")
def lam_sqrt():
    return ReciprocalSums(validate_spec("sqrt(i)", "lambda", 256))


@pytest.fixture(scope="session")
def q_sqrt():
    return validate_spec("sqrt(n)", "q", 512)


@pytest.fixture(scope="session")
def delta_2_sqrt():
    return validate_spec("2^sqrt(n)", "delta", 512)


@pytest.fixture(scope="session")
def delta_2n():
    return validate_spec("2^n", "delta", 512)
