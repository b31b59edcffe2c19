import functools

import pytest

from capkernel.capitulation import verify_sequence
from capkernel.fixtures import BuildOptions, build_covering, bundled_fixture, parse_file

FIXTURES = ("q_to_qi", "fixture_a", "fixture_b", "q_to_cubic7")


@functools.lru_cache(maxsize=None)
def covering(name):
    return build_covering(parse_file(bundled_fixture(name)), BuildOptions())


@functools.lru_cache(maxsize=None)
def sequence(name):
    return verify_sequence(covering(name), strict=False)


@pytest.fixture(params=FIXTURES)
def fixture_name(request):
    return request.param
