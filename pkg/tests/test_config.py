import pytest
from hypothesis import given, strategies as st

from wpfp import config
from wpfp.errors import ConfigError

keys = st.from_regex(r"[a-z][a-z0-9_]{0,10}", fullmatch=True)
values = st.from_regex(r"[A-Za-z0-9_.+\-]{1,12}", fullmatch=True)


def test_parse_comments_and_blanks():
    text = "# header\n\nalpha = 1.5   # trailing\n  beta=2\n"
    assert config.parse_text(text) == {"alpha": "1.5", "beta": "2"}


@pytest.mark.parametrize("text, fragment", [
    ("alpha 1\n", "expected"), ("= 1\n", "empty key"), ("a = 1\na = 2\n", "duplicate"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        config.parse_text(text)


@given(st.dictionaries(keys, values, max_size=8))
def test_round_trip(entries):
    text = "\n".join(f"{k} = {v}" for k, v in entries.items())
    assert config.parse_text(text) == entries


def test_read_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        config.read_file(tmp_path / "absent.cfg")


def test_override():
    assert config.parse_override(" dt = 0.5") == ("dt", "0.5")
    with pytest.raises(ConfigError):
        config.parse_override("dt")
    with pytest.raises(ConfigError):
        config.parse_override("=3")


def test_conversions():
    assert config.to_float("a", "1e-3") == 1e-3
    assert config.to_int("n", "64") == 64
    assert config.to_int("n", "1e2") == 100
    assert config.to_bool("b", "Yes") is True
    assert config.to_bool("b", "off") is False
    for fn, bad in ((config.to_float, "x"), (config.to_int, "1.5"), (config.to_int, "x"),
                    (config.to_bool, "maybe")):
        with pytest.raises(ConfigError):
            fn("k", bad)
