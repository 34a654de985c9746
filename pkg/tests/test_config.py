"""Flat config files and override precedence."""

import json

import numpy as np
import pytest

from birdbox import audio
from birdbox.cli import main
from birdbox.config import load_config, overlay
from birdbox.errors import ConfigurationError


class TestLoadConfig:
    def test_parses_key_values_and_comments(self, tmp_path):
        path = tmp_path / "birdbox.conf"
        path.write_text(
            "# runtime settings\n"
            "listen = 127.0.0.1:9999\n"
            "capacity = 50   # ring size\n"
            "\n"
            "gate_threshold=0.6\n"
        )
        values = load_config(path)
        assert values == {"listen": "127.0.0.1:9999", "capacity": "50",
                          "gate_threshold": "0.6"}

    def test_bad_line_rejected(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("this is not a setting\n")
        with pytest.raises(ConfigurationError):
            load_config(path)


class TestOverlay:
    DEFAULTS = {"listen": "0.0.0.0:8080", "capacity": 1000, "gate_threshold": 0.8}

    def test_file_overrides_defaults(self):
        merged = overlay(self.DEFAULTS, {"capacity": "50"}, {})
        assert merged["capacity"] == 50
        assert merged["listen"] == "0.0.0.0:8080"

    def test_cli_overrides_file(self):
        merged = overlay(self.DEFAULTS, {"capacity": "50"}, {"capacity": 7})
        assert merged["capacity"] == 7

    def test_unset_cli_values_ignored(self):
        merged = overlay(self.DEFAULTS, {"gate_threshold": "0.5"},
                         {"gate_threshold": None})
        assert merged["gate_threshold"] == 0.5

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigurationError):
            overlay(self.DEFAULTS, {"tyop": "1"}, {})

    def test_type_coercion_follows_default(self):
        merged = overlay(self.DEFAULTS, {"gate_threshold": "0.25", "capacity": "9"}, {})
        assert isinstance(merged["gate_threshold"], float)
        assert isinstance(merged["capacity"], int)


class TestRunWithConfig:
    def test_config_file_changes_gating(self, tmp_path, capsys):
        t = np.arange(48000 * 3) / 48000
        loud = np.concatenate([0.3 * np.sin(2 * np.pi * 1500 * t)] * 2)
        wav = tmp_path / "r.wav"
        wav.write_bytes(audio.encode_wav(audio.AudioClip(loud, 48000)))

        def gated_in(extra):
            code = main(["run", "--replay", str(wav), "--stub-backends",
                         "--listen", "127.0.0.1:0"] + extra)
            assert code == 0
            out = capsys.readouterr().out
            return json.loads(out.strip().splitlines()[-1])["segments_gated_in"]

        assert gated_in([]) == 2  # loud blocks pass the default 0.01 level
        config = tmp_path / "strict.conf"
        config.write_text("gate_level = 5.0\n")  # far above any real RMS
        assert gated_in(["--config", str(config)]) == 0
        # explicit flag beats the file
        assert gated_in(["--config", str(config), "--gate-level", "0.01"]) == 2
