import pytest

from decaylaw.config import RunConfig, as_dict, auto_points, defaults_for, dumps, load, loads, parse_window
from decaylaw.errors import ConfigError


def test_round_trip_canonical():
    cfg = defaults_for("curve").merged(RunConfig(s_r=100.0, points=17, unnormalized=True))
    text = dumps(cfg)
    again = loads(text)
    assert again == cfg
    assert dumps(again) == text


def test_comments_blank_lines_and_dashes():
    cfg = loads("# header\n\ns-r = 10   # trailing\nspacing=log\n")
    assert cfg.s_r == 10.0 and cfg.spacing == "log"
    assert as_dict(cfg) == {"s_r": 10.0, "spacing": "log"}


def test_precedence():
    base = defaults_for("tail")
    file_cfg = loads("s_r = 10\npoints = 50\n")
    flags = RunConfig(points=7)
    merged = base.merged(file_cfg).merged(flags)
    assert merged.s_r == 10.0 and merged.points == 7 and merged.command == "tail"


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("s_r = 10\npoints = many\n", 2, 10),
        ("s_r = 10\n  bogus = 1\n", 2, 3),
        ("spacing = cubic\n", 1, 11),
        ("s_r = 1\ns_r = 2\n", 2, 1),
        ("just words\n", 1, 1),
        ("s_r =\n", 1, 6),
    ],
)
def test_errors_carry_position(text, line, column):
    with pytest.raises(ConfigError) as info:
        loads(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert str(info.value).startswith(f"line {line}, column {column}:")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "absent.cfg")


def test_non_finite_rejected():
    with pytest.raises(ConfigError):
        loads("s_r = inf\n")


def test_window_parsing():
    assert parse_window("100:1000") == (100.0, 1000.0)
    for bad in ("1000:100", "abc", "0:5"):
        with pytest.raises(ConfigError):
            parse_window(bad)


def test_auto_points_scales_with_s_r():
    small = auto_points(RunConfig(s_r=10.0, x_min=0.0, x_max=5.0))
    big = auto_points(RunConfig(s_r=1000.0, x_min=0.0, x_max=30.0))
    assert small == 4096
    assert big > 16 * 1000 / 6.3 * 30 - 1
