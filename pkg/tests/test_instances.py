import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minergy.errors import InstanceParseError
from minergy.instances import load_instance, parse_instance, serialize_instance
from minergy.model import NetworkInstance


def test_basic():
    inst = parse_instance("# three sensors\n3\n1.0 1.0\n2.0 1.0\n\n3.5 2.0\n")
    assert inst.positions == (1.0, 2.0, 3.5) and inst.data == (1.0, 1.0, 2.0)


def test_shorthand():
    assert parse_instance("regular 4 2.5") == NetworkInstance.regular(4, 2.5)
    assert parse_instance("regular 3\n") == NetworkInstance.regular(3)


@pytest.mark.parametrize("text,line,fragment", [
    ("", 1, "empty"),
    ("3\n1 1\n2 1\n", 4, "expected 3"),
    ("2\n2 1\n1 1\n", 3, "strictly above"),
    ("2\n1 1\n2 0\n", 3, "positive"),
    ("2\n1 1\n2 x\n", 3, "non-numeric"),
    ("two\n", 1, "sensor count"),
    ("# c\nregular 3 1\n1 1\n", 3, "unexpected"),
    ("regular 0", 1, "at least one"),
    ("2\n-1 1\n2 1\n", 2, "strictly above"),
])
def test_errors_name_the_line(text, line, fragment):
    with pytest.raises(InstanceParseError) as exc:
        parse_instance(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)
    assert str(exc.value).startswith(f"line {line}:")


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12))
def test_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    inst = NetworkInstance(tuple(np.cumsum(rng.uniform(1e-3, 5, n))), tuple(rng.uniform(1e-3, 5, n)))
    assert parse_instance(serialize_instance(inst)) == inst


def test_load(tmp_path):
    path = tmp_path / "line.txt"
    path.write_text(serialize_instance(NetworkInstance.regular(5)))
    assert load_instance(path).is_regular
