# type: ignore

# Tests that take an `instance_seed` argument are repeated over several
# randomly generated problem instances. The number of instances can be
# configured using `--instances` and its default value is 3.


def pytest_addoption(parser):
    parser.addoption(
        "--instances",
        action="store",
        default="3",
        help="Number of random instances used by randomized tests.",
    )


def pytest_generate_tests(metafunc):
    if "instance_seed" in metafunc.fixturenames:
        count = int(metafunc.config.getoption("instances"))
        metafunc.parametrize("instance_seed", list(range(count)))
