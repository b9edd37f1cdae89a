import math

import numpy as np
import pytest

from ssmeasure import estimate_centered, load_config, parse_config, sierpinski
from ssmeasure.errors import ConfigError

GASKET = """\
name: gasket
maps:
  - ratio: 0.3
    translation: [0, 0]
  - ratio: 0.3
    translation: [0.7, 0]
  - ratio: 0.3
    matrix: [[1, 0], [0, 1]]
    translation: [0.35, 0.606217782649107]
known:
  c: 0.4
  R: 1.0
"""


def test_matches_builtin():
    system = parse_config(GASKET)
    builtin = sierpinski(0.3)
    assert system.name == "gasket" and system.m == 3
    assert system.constants.c_lo == 0.4
    a = estimate_centered(system, 4)
    b = estimate_centered(builtin, 4)
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_rotation(tmp_path):
    path = tmp_path / "rot.yaml"
    path.write_text("maps:\n"
                    "  - {ratio: 0.3, translation: [0, 0]}\n"
                    "  - {ratio: 0.3, rotation_deg: 90, translation: [1, 0]}\n"
                    "  - {ratio: 0.25, translation: [0.4, 0.6]}\n")
    system = load_config(path)
    np.testing.assert_allclose(system.maps[1].orthogonal, [[0, -1], [1, 0]], atol=1e-15)
    assert system.constants.c_hi - system.constants.c_lo < 1e-10


@pytest.mark.parametrize("text, line, field", [
    ("maps:\n  - ratio: 1.5\n    translation: [0]\n  - ratio: 0.2\n    translation: [1]\n",
     2, "maps[0]"),
    ("maps:\n  - ratio: 0.2\n    translation: [0]\n  - ratio: abc\n    translation: [1]\n",
     4, "maps[1].ratio"),
    ("maps:\n  - ratio: 0.2\n    translation: [0]\n  - ratio: 0.2\n    colour: red\n",
     5, "maps[1].colour"),
    ("maps:\n  - ratio: 0.2\n", 2, "maps[0].translation"),
    ("maps:\n  - ratio: 0.2\n    matrix: [[1, 1], [0, 1]]\n    translation: [0, 0]\n"
     "  - ratio: 0.2\n    translation: [1, 1]\n", 3, "maps[0].matrix"),
    ("name: x\n", 1, "maps"),
    ("maps:\n  - ratio: 0.2\n    translation: [0]\n  - ratio: 0.2\n    translation: [1]\n"
     "known:\n  c: 0.6\n", 7, "known"),
])
def test_errors_carry_line_and_field(text, line, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line and info.value.field == field
    assert f"line {line}" in str(info.value)


def test_bad_yaml():
    with pytest.raises(ConfigError) as info:
        parse_config("maps: [\n  - ratio")
    assert info.value.line is not None


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.yaml")


def test_rotation_needs_2d():
    with pytest.raises(ConfigError):
        parse_config("maps:\n  - {ratio: 0.2, rotation_deg: 10, translation: [0]}\n"
                     "  - {ratio: 0.2, translation: [1]}\n")
