import numpy as np
import pandas as pd

import database


def report_rows(count, scale=1.0):
    k = np.arange(1, count + 1)
    return pd.DataFrame({
        "k": k,
        "mean_lambda": scale * k,
        "theorem1": 0.5 * scale * k,
        "classical": 0.4 * scale * k,
        "melas": np.nan,
        "polya": np.nan,
        "margin_ratio": 2.0,
        "asymptotic_ratio": 1.1,
        "violation": False,
    })


def test_database_is_created_on_demand(tmp_path):
    path = tmp_path / "nested" / "polyspec.db"
    assert database.ensure_db_exists(path) == path
    assert path.exists()
    assert database.get_rows(path=path).empty


def test_save_and_filter(tmp_db):
    assert database.save_report(report_rows(3), "aaa", "interval(L=1)", 2) == 3
    database.save_report(report_rows(2), "bbb", "ball(R=1,n=2)", 1)

    assert len(database.get_rows(path=tmp_db)) == 5
    assert list(database.get_rows(run_hash="aaa", path=tmp_db)["k"]) == [1, 2, 3]
    assert set(database.get_rows(domain="ball", path=tmp_db)["run_hash"]) == {"bbb"}
    assert len(database.get_rows(domain=["interval(L=1)", "ball(R=1,n=2)"], path=tmp_db)) == 5
    assert set(database.get_rows(l=2, path=tmp_db)["run_hash"]) == {"aaa"}


def test_missing_bounds_are_stored_as_null(tmp_db):
    database.save_report(report_rows(2), "aaa", "interval(L=1)", 2)
    stored = database.get_rows(path=tmp_db)
    assert stored["melas"].isna().all()
    assert "violation" not in stored.columns


def test_saving_a_run_again_replaces_its_rows(tmp_db):
    database.save_report(report_rows(3), "aaa", "interval(L=1)", 1)
    database.save_report(report_rows(3, scale=2.0), "aaa", "interval(L=1)", 1)
    stored = database.get_rows(run_hash="aaa", path=tmp_db)
    assert list(stored["mean_lambda"]) == [2.0, 4.0, 6.0]
