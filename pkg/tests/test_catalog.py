import json

import numpy as np
import pytest

from neargroup.catalog import Catalog, recheck, solution_from_json, solution_to_json
from neargroup.first_class import catalog as first_catalog


def test_second_round_trip(row_solution):
    sol = row_solution(3)
    back = solution_from_json(json.loads(json.dumps(solution_to_json(sol))))
    assert np.allclose(back.b, sol.b)
    assert back.instance.a_exp == sol.instance.a_exp
    ok, r = recheck(back)
    assert ok and r < 1e-9


def test_first_round_trip():
    sol = first_catalog(3)[1]
    back = solution_from_json(solution_to_json(sol))
    assert recheck(back)[0]


def test_catalog_file(tmp_path, row_solution):
    cat = Catalog([row_solution(0), row_solution(3)] + first_catalog(2), seed=42)
    path = tmp_path / "cat.json"
    cat.dump(str(path))
    back = Catalog.load(str(path))
    assert len(back.solutions) == 5 and back.seed == 42


def test_tampered_catalog_rejected(tmp_path, row_solution):
    cat = Catalog([row_solution(3)])
    data = cat.to_json()
    data["solutions"][0]["b"][1]["re"] += 1e-3
    with pytest.raises(ValueError):
        Catalog.from_json(data)
    assert len(Catalog.from_json(data, verify=False).solutions) == 1
