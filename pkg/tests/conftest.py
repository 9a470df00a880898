import pytest

from restricta import primes


@pytest.fixture(scope="session")
def table_1e4():
    return primes.sieve_primes(10**4)


@pytest.fixture(scope="session")
def table_1e6():
    return primes.sieve_primes(10**6)
