import json
import os
import subprocess

import pytest

import emgvalid


def test_version():
    assert emgvalid.SCHEMA_VERSION == 1
    assert emgvalid.__version__


def test_stats_and_leakage():
    s = emgvalid.descriptive_stats([1.0, 2.0, 3.0, 4.0])
    assert s["mean"] == pytest.approx(2.5)
    aux = emgvalid.assess_auxiliary([50.0, 50.0])
    assert aux["verdict"] == "PASS"


def test_agreement_metrics():
    assert emgvalid.pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.98198, abs=1e-5)
    assert emgvalid.mape([100, 200], [110, 180]) == pytest.approx(10.0)
    ba = emgvalid.bland_altman([4, 5, 6], [1, 2, 3])
    assert ba["bias"] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        emgvalid.pearson([1, 1, 1], [1, 2, 3])


def test_frame_codec_and_stream():
    raw = emgvalid.encode_frame(7, 1234, [1, 2, 3, 4, 5, 6, 7, 8])
    assert len(raw) == 25
    frame = emgvalid.decode_frame(raw)
    assert frame["seq"] == 7
    data, ledger = emgvalid.emulate(2000, drop=0.01, seed=4)
    report = emgvalid.analyze_stream(data)
    assert report["lost"] == ledger["counts"]["interior_dropped"]


def test_cli_roundtrip(tmp_path):
    code, out, _ = emgvalid.run_cli(["--version"])
    assert code == 0 and "emgvalid" in out
    code, _, err = emgvalid.run_cli(["nonsense"])
    assert code == 1


def test_cli_binary(tmp_path):
    exe = os.environ.get("EMGVALID_CLI")
    if not exe:
        pytest.skip("EMGVALID_CLI not set")
    subprocess.run([exe, "synth", "--seed", "7", "--out", str(tmp_path)], check=True)
    proc = subprocess.run([exe, "mech", str(tmp_path / "mech" / "linear_fd.csv"), "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "PASS"
