import pandas as pd
import pytest

from psiprio.reports import read_report, records_frame, write_report


@pytest.fixture
def frame():
    return pd.DataFrame({"kind": ["relation", "relation"], "step": [0, 1],
                         "env": ["{}", "{x}"], "left": ["out(x,x).0", "0"]})


@pytest.mark.parametrize("suffix", [".ndjson", ".jsonl", ".csv", ".xlsx"])
def test_written_reports_read_back(tmp_path, frame, suffix):
    ruta = write_report(frame, tmp_path / "informes" / f"r{suffix}")
    assert ruta.exists()
    leido = read_report(ruta)
    assert list(leido.columns) == list(frame.columns)
    assert list(leido["env"]) == ["{}", "{x}"]
    assert [int(s) for s in leido["step"]] == [0, 1]


def test_unknown_format(tmp_path, frame):
    with pytest.raises(ValueError):
        write_report(frame, tmp_path / "r.parquet")
    with pytest.raises(ValueError):
        read_report(tmp_path / "r")


def test_records_frame_flattens_actions():
    df = records_frame([{"source": "out(x,x).0", "action": {"kind": "out", "subject": "x"}, "target": "0"}])
    assert {"action.kind", "action.subject"} <= set(df.columns)
    assert df.loc[0, "action.kind"] == "out"
