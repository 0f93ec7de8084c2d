import csv
import json

import pytest

from fdo_spectra.cli import EXIT_CERTIFICATE, EXIT_OK, EXIT_RESOLUTION, EXIT_USAGE, main, run
from fdo_spectra.config import ConfigError, default_config, parse_config

SPEC_EXAMPLE = {"potential": {"p": 2, "beta": 0}, "grid": {"L": 40, "N": 1024},
                "lambdas": [25, 50, 100], "command": "bounds", "output_dir": "out"}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestParseConfig:
    def test_valid_example(self):
        cfg = parse_config(json.dumps(SPEC_EXAMPLE).encode())
        assert cfg.command == "bounds"
        assert cfg.grid.N == 1024 and cfg.lambdas == (25.0, 50.0, 100.0)
        assert str(cfg.output_dir) == "out" and cfg.emit_svg is False

    @pytest.mark.parametrize("mutate,path", [
        (lambda d: d["grid"].update(N=1023), "grid.N"),
        (lambda d: d["grid"].update(N=4), "grid.N"),
        (lambda d: d["grid"].update(L=-1), "grid.L"),
        (lambda d: d["potential"].update(p=0, beta=0), "potential"),
        (lambda d: d["potential"].update(q=1), "potential.q"),
        (lambda d: d.update(extra=1), "extra"),
        (lambda d: d.update(lambdas=[50, 25]), "lambdas[1]"),
        (lambda d: d.update(lambdas=[1, "x"]), "lambdas[1]"),
        (lambda d: d.update(lambdas=[]), "lambdas"),
        (lambda d: d.pop("grid"), "grid"),
        (lambda d: d.update(command="plot"), "command"),
        (lambda d: d.update(epsilon_override=2.0), "epsilon_override"),
        (lambda d: d.update(emit_svg="yes"), "emit_svg"),
    ])
    def test_rejections(self, mutate, path):
        doc = json.loads(json.dumps(SPEC_EXAMPLE))
        mutate(doc)
        with pytest.raises(ConfigError) as info:
            parse_config(json.dumps(doc))
        assert info.value.path == path
        assert path in str(info.value)

    def test_malformed(self):
        with pytest.raises(ConfigError):
            parse_config(b"{not json")
        with pytest.raises(ConfigError):
            parse_config(b"\xff\xfe")
        with pytest.raises(ConfigError):
            parse_config(b"[1, 2]")

    def test_defaults(self):
        cfg = default_config("verify")
        assert cfg.command == "verify" and cfg.grid.N == 256


class TestRun:
    def test_verify_defaults(self, tmp_path):
        assert main(["verify", "--output-dir", str(tmp_path)]) == EXIT_OK
        rows = read_csv(tmp_path / "verify.csv")
        assert rows[0] == ["check_name", "value", "threshold", "pass"]
        assert len(rows) > 40
        for name, value, threshold, ok in rows[1:]:
            assert ok == "true" and float(value) < float(threshold), name

    def test_resolution_exit(self, tmp_path):
        doc = dict(SPEC_EXAMPLE, lambdas=[25, 50, 1e4], output_dir=str(tmp_path))
        assert main(["bounds", "--config", write(tmp_path, doc)]) == EXIT_RESOLUTION
        assert not (tmp_path / "bounds.csv").exists()
        assert not list(tmp_path.glob(".*.tmp"))

    def test_certificate_exit(self, tmp_path):
        doc = {"potential": {"p": 2, "beta": 1}, "grid": {"L": 6, "N": 512}, "lambdas": [50, 100],
               "a_override": 2.0, "epsilon_override": 1.0, "output_dir": str(tmp_path)}
        assert main(["bounds", "--config", write(tmp_path, doc)]) == EXIT_CERTIFICATE

    def test_usage_errors(self, tmp_path, capsys):
        assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE
        bad = write(tmp_path, dict(SPEC_EXAMPLE, lambdas=[]))
        assert main(["bounds", "--config", bad]) == EXIT_USAGE
        assert main(["spectrum", "--config", write(tmp_path, SPEC_EXAMPLE)]) == EXIT_USAGE
        with pytest.raises(SystemExit):
            main(["dance"])

    def test_spectrum_deterministic(self, tmp_path):
        doc = {"potential": {"p": 2, "beta": 1}, "grid": {"L": 1, "N": 8}, "lambdas": [1.2]}
        outputs = []
        for i in range(2):
            out = tmp_path / f"run{i}"
            assert main(["spectrum", "--config", write(tmp_path, doc), "--output-dir", str(out)]) == EXIT_OK
            outputs.append(((out / "spectrum.csv").read_bytes(), (out / "eigenvalues.csv").read_bytes()))
        assert outputs[0] == outputs[1]
        rows = read_csv(tmp_path / "run0" / "eigenvalues.csv")
        assert rows[0] == ["index", "eigenvalue"] and len(rows) == 9

    def test_bounds_and_svg(self, tmp_path):
        doc = {"potential": {"p": 2, "beta": 0}, "grid": {"L": 20, "N": 512}, "lambdas": [20, 30, 40]}
        assert main(["bounds", "--config", write(tmp_path, doc), "--output-dir", str(tmp_path),
                     "--emit-svg"]) == EXIT_OK
        rows = read_csv(tmp_path / "bounds.csv")
        assert rows[0][:4] == ["lambda", "lower", "riesz", "upper"]
        assert all(r[-1] == "true" for r in rows[1:])
        assert (tmp_path / "bounds.svg").read_text().startswith("<svg")

    def test_phasespace_and_asymptotics(self, tmp_path):
        cfg = parse_config(json.dumps({"potential": {"p": 1, "beta": 0}, "grid": {"L": 20, "N": 256},
                                       "lambdas": [1e3, 1e4, 1e5], "output_dir": str(tmp_path)}))
        assert run(cfg, "phasespace") == EXIT_OK
        assert run(cfg, "asymptotics") == EXIT_OK
        rows = read_csv(tmp_path / "asymptotics.csv")
        assert [r[-1] for r in rows[1:]] == ["true"] * 3
        ratios = [float(r[3]) for r in rows[1:]]
        assert ratios == sorted(ratios)

    def test_threads_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FDO_THREADS", "2")
        cfg = parse_config(json.dumps({"potential": {"p": 2, "beta": 0}, "grid": {"L": 20, "N": 256},
                                       "lambdas": [10, 100, 1000], "output_dir": str(tmp_path)}))
        assert run(cfg, "phasespace") == EXIT_OK
        first = (tmp_path / "phasespace.csv").read_bytes()
        monkeypatch.setenv("FDO_THREADS", "1")
        assert run(cfg, "phasespace") == EXIT_OK
        assert (tmp_path / "phasespace.csv").read_bytes() == first
