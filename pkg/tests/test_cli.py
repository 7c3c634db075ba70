import json

import numpy as np
import pytest

from bwetools.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main
from bwetools.demo import synthetic_speech
from bwetools.signal import degrade, load_wav, save_wav


@pytest.fixture(scope="module")
def clip_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("audio") / "clip.wav"
    save_wav(path, synthetic_speech(duration=1.0, seed=0))
    return path


@pytest.fixture(scope="module")
def speech_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("audio") / "speech.wav"
    save_wav(path, synthetic_speech(duration=3.0, seed=0))
    return path


class TestDegradeCommand:
    def test_basic(self, clip_path, tmp_path, capsys):
        out = tmp_path / "low.wav"
        assert main(["degrade", str(clip_path), "8000", str(out)]) == EXIT_OK
        original = load_wav(clip_path)
        degraded = load_wav(out)
        assert len(degraded) == len(original)
        assert degraded.rate == original.rate

    def test_low_rate_above_input(self, clip_path, tmp_path):
        out = tmp_path / "low.wav"
        assert main(["degrade", str(clip_path), "96000", str(out)]) == EXIT_USAGE

    def test_missing_input(self, tmp_path):
        assert main(["degrade", str(tmp_path / "nope.wav"), "8000", str(tmp_path / "o.wav")]) == EXIT_IO

    def test_input_untouched(self, clip_path, tmp_path):
        before = clip_path.read_bytes()
        main(["degrade", str(clip_path), "8000", str(tmp_path / "o.wav")])
        assert clip_path.read_bytes() == before


class TestFeaturesCommand:
    def test_mrld_outputs(self, clip_path, tmp_path, capsys):
        out_dir = tmp_path / "mrld"
        assert main(["features", str(clip_path), "mrld", str(out_dir)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["meta"]["windows"] == [64, 128, 256, 512, 1024]
        assert len(list(out_dir.glob("mrld_ch*.csv"))) == 5
        assert (out_dir / "mrld_meta.json").exists()

    def test_msdfa_shape(self, clip_path, tmp_path, capsys):
        out_dir = tmp_path / "msdfa"
        assert main(["features", str(clip_path), "msdfa", str(out_dir)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["shape"] == [5, 64, 64]

    def test_unknown_extractor(self, clip_path, tmp_path):
        assert main(["features", str(clip_path), "hilbert", str(tmp_path)]) == EXIT_USAGE

    def test_poincare(self, clip_path, tmp_path, capsys):
        assert main(["features", str(clip_path), "poincare", str(tmp_path / "p")]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["sd1"] >= 0 and doc["sd2"] >= 0

    def test_rp(self, clip_path, tmp_path, capsys):
        assert main(["features", str(clip_path), "rp", str(tmp_path / "r")]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["shape"][0] == doc["shape"][1] <= 512

    def test_mrad_mrpd(self, clip_path, tmp_path, capsys):
        assert main(["features", str(clip_path), "mrad_mrpd", str(tmp_path / "m")]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["resolutions"]) == 3


class TestCompareCommand:
    def test_identity_report(self, speech_path, capsys):
        assert main(["compare", str(speech_path), str(speech_path)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["lsd"] == 0.0
        assert doc["si_sdr"] == 200.0
        assert doc["stoi"] >= 0.999

    def test_degraded_report_schema(self, speech_path, tmp_path, capsys):
        low = tmp_path / "low.wav"
        main(["degrade", str(speech_path), "8000", str(low)])
        capsys.readouterr()
        assert main(["compare", str(speech_path), str(low)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        for key in ("lsd", "si_sdr", "si_snr", "stoi"):
            assert np.isfinite(doc[key])

    def test_table_direction(self, speech_path, tmp_path, capsys):
        values = {}
        for rate in (4000, 8000):
            low = tmp_path / f"low{rate}.wav"
            main(["degrade", str(speech_path), str(rate), str(low)])
            capsys.readouterr()
            main(["compare", str(speech_path), str(low)])
            values[rate] = json.loads(capsys.readouterr().out)
        assert values[4000]["lsd"] > values[8000]["lsd"]

    def test_rate_mismatch(self, speech_path, tmp_path, capsys):
        other = tmp_path / "other.wav"
        save_wav(other, synthetic_speech(duration=1.0, rate=32000))
        assert main(["compare", str(speech_path), str(other)]) == EXIT_USAGE

    def test_byte_identical_rerun(self, speech_path, tmp_path, capsys):
        low = tmp_path / "low.wav"
        main(["degrade", str(speech_path), "8000", str(low)])
        capsys.readouterr()
        main(["compare", str(speech_path), str(low)])
        first = capsys.readouterr().out
        main(["compare", str(speech_path), str(low)])
        second = capsys.readouterr().out
        assert first == second


class TestNetinfoCommand:
    def test_mrld(self, capsys):
        assert main(["netinfo", "mrld"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert 200_200 <= doc["total_params"] <= 270_825

    def test_msdfa(self, capsys):
        assert main(["netinfo", "msdfa"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert 210_545 <= doc["total_params"] <= 284_855

    def test_generator(self, capsys):
        assert main(["netinfo", "generator"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["conformer_blocks"] == 4
        assert doc["heads"] == 8

    def test_unknown(self, capsys):
        assert main(["netinfo", "mpd"]) == EXIT_USAGE


class TestConfig:
    def test_config_overrides_defaults(self, clip_path, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"side": 8}))
        out_dir = tmp_path / "msdfa"
        assert (
            main(["--config", str(cfg), "features", str(clip_path), "msdfa", str(out_dir)])
            == EXIT_OK
        )
        doc = json.loads(capsys.readouterr().out)
        assert doc["shape"] == [5, 8, 8]

    def test_bad_config(self, clip_path, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("not json")
        assert main(["--config", str(cfg), "netinfo", "mrld"]) == EXIT_USAGE
