import json

import pytest

from antihom.errors import ConfigError
from antihom.materials import load_materials, load_stack, load_template, resolve


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return p


def test_bundled_table_flags_chromium():
    mats = load_materials()
    assert mats["Cr"].placeholder
    assert "PLACEHOLDER" in mats["Cr"].note
    assert not mats["SiN"].placeholder


def test_placeholder_needs_opt_in():
    mats = load_materials()
    with pytest.raises(ConfigError, match="placeholder"):
        resolve(mats, "Cr", 810.0)
    assert resolve(mats, "Cr", 810.0, allow_placeholder=True) == complex(mats["Cr"].n, mats["Cr"].k)


def test_wavelength_mismatch():
    with pytest.raises(ConfigError):
        resolve(load_materials(), "SiN", 633.0)


def test_stack_file(tmp_path):
    p = write(tmp_path, "s.json", [{"material": "SiN", "thickness_nm": 100}, {"n": 1.5, "k": 0.01, "thickness_nm": 20}])
    stack = load_stack(p, 810.0, load_materials())
    assert [lay.thickness_nm for lay in stack.layers] == [100.0, 20.0]
    assert stack.layers[1].index == complex(1.5, 0.01)


def test_stack_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_stack(tmp_path / "missing.json", 810.0)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_stack(bad, 810.0)
    with pytest.raises(ConfigError):
        load_stack(write(tmp_path, "u.json", [{"material": "Unobtainium", "thickness_nm": 1}]), 810.0, load_materials())
    with pytest.raises(ConfigError):
        load_stack(write(tmp_path, "f.json", [{"n": 2, "thickness_nm": "x"}]), 810.0)


def test_template_file(tmp_path):
    own = write(tmp_path, "m.json", {"Cr": {"n": 3.6, "k": 4.3, "wavelength_nm": 810}, "SiN": {"n": 2.1, "wavelength_nm": 810}})
    tpl = write(tmp_path, "t.json", {
        "layers": [
            {"material": "Cr", "thickness_nm": "x"},
            {"material": "SiN", "thickness_nm": "y"},
            {"material": "Cr", "thickness_nm": "x"},
        ],
        "bounds": {"x": [1, 20], "y": [100, 300]},
    })
    template = load_template(tpl, 810.0, load_materials(own))
    assert template.param_names == ["x", "y"]
    stack = template.build({"x": 5.0, "y": 195.0})
    assert stack.total_thickness_nm == 205.0
