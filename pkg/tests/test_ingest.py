import json
import logging

import numpy as np
import pytest

from loadshare import MoebiusMap, ParseError, ValidationError, read_config, read_samples


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_three_rows_rejected(tmp_path):
    p = write(tmp_path, "s.csv", "0,0\n1,0.25\n2,0.3333333333\n")
    with pytest.raises(ValidationError, match="3 rows"):
        read_samples(p)


def test_moebius_samples_round_trip(tmp_path):
    h = MoebiusMap(0.5, 1.0, 2.0)
    x = np.linspace(0.0, 2.0, 9)
    body = "F_k,F_j\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(x, h(x)))
    table = read_samples(write(tmp_path, "s.csv", body))
    assert len(table) == 9 and not table.origin_injected
    T = table.to_map()
    g = np.linspace(0.0, 2.0, 2001)
    assert np.max(np.abs(T(g) - h(g))) < 1e-3
    # interpolant passes through the knots
    np.testing.assert_allclose(T(table.f_k), table.f_j, atol=1e-9)


def test_duplicates_averaged(tmp_path, caplog):
    body = "1,0.2\n1,0.3\n2,0.4\n3,0.5\n4,0.55\n"
    with caplog.at_level(logging.WARNING, logger="loadshare"):
        table = read_samples(write(tmp_path, "s.csv", body))
    assert table.duplicates_merged == 1
    assert table.rows[1] == (1.0, 0.25)
    assert table.origin_injected
    events = {getattr(r, "event", None) for r in caplog.records}
    assert {"duplicates_merged", "origin_injected"} <= events


def test_unsorted_rows_sorted(tmp_path):
    table = read_samples(write(tmp_path, "s.csv", "3,0.5\n0,0\n1,0.25\n2,0.4\n"))
    assert table.f_k.tolist() == [0.0, 1.0, 2.0, 3.0]


def test_units_comment(tmp_path):
    table = read_samples(write(tmp_path, "s.csv", "# units: N\nF_k,F_j\n0,0\n1,0.2\n2,0.3\n3,0.35\n"))
    assert table.units == "N"


def test_parse_error_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        read_samples(write(tmp_path, "s.csv", "F_k,F_j\n0,0\n1,abc\n"))
    assert exc.value.line == 3
    with pytest.raises(ParseError):
        read_samples(write(tmp_path, "s.csv", "0,0,1\n"))


def test_negative_rejected(tmp_path):
    with pytest.raises(ValidationError):
        read_samples(write(tmp_path, "s.csv", "0,0\n1,-0.2\n2,0.3\n3,0.4\n"))


def test_empty_file(tmp_path):
    with pytest.raises(ValidationError):
        read_samples(write(tmp_path, "s.csv", ""))


def test_config_defaults(tmp_path):
    doc = {"arms": {"j": 1, "k": 4}, "pair": ["j", "k"], "sweep": {"M_min": 0, "M_max": 10, "count": 11}}
    cfg = read_config(write(tmp_path, "c.json", json.dumps(doc)))
    assert cfg.numeric() == {"tol": 1e-10, "n_max": 64, "grid_size": 257, "ref_force": 1.0}
    assert cfg.j_index == 0 and cfg.k_index == 1
    assert cfg.moments().tolist() == list(np.linspace(0, 10, 11))


def test_config_sweep_list_form(tmp_path):
    doc = {"arms": {"j": 1, "k": 4}, "pair": ["j", "k"], "sweep": [0, 10, 11],
           "numeric": {"tol": 1e-12, "grid_size": 129}}
    cfg = read_config(write(tmp_path, "c.json", json.dumps(doc)))
    assert cfg.count == 11 and cfg.tol == 1e-12 and cfg.grid_size == 129


@pytest.mark.parametrize("doc", [
    {"arms": {"j": 1, "k": 4}, "pair": ["j", "x"], "sweep": [0, 10, 11]},
    {"arms": {"j": -1, "k": 4}, "pair": ["j", "k"], "sweep": [0, 10, 11]},
    {"arms": {"j": 1, "k": 4}, "pair": ["j", "k"], "sweep": [5, 1, 11]},
    {"arms": {"j": 1, "k": 4}, "pair": ["j", "k"], "sweep": [0, 10, 1]},
    {"arms": {"j": 1}, "pair": ["j", "j"], "sweep": [0, 10, 11]},
    {"arms": {"j": 1, "k": 4}, "pair": ["j", "k"], "sweep": [0, 10, 11], "numeric": {"bogus": 1}},
])
def test_config_invalid(tmp_path, doc):
    with pytest.raises(ValidationError):
        read_config(write(tmp_path, "c.json", json.dumps(doc)))


def test_config_parse_error(tmp_path):
    with pytest.raises(ParseError):
        read_config(write(tmp_path, "c.json", "{not json"))
