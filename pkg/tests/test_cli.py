import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from slabiso import cli
from slabiso.cli import EXIT_CERT, EXIT_ERROR, EXIT_OK, main


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestQ3:
    def test_verify_default(self, tmp_path):
        path = tmp_path / "report.json"
        assert main(["q3", "verify-appendix", "-o", str(path)]) == EXIT_OK
        report = json.loads(path.read_text())
        assert report["verdict"] == "VERIFIED"
        assert report["N0"] == 647 and report["N1"] == 535
        assert report["wall_time_s"] is None

    def test_coarse_mesh_fails_certification(self, capsys):
        code, out, _ = _run(["q3", "verify-appendix", "--eps", "3e-3"], capsys)
        assert code == EXIT_CERT
        assert json.loads(out)["verdict"] != "VERIFIED"

    def test_output_independent_of_threads(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SLABISO_THREADS", raising=False)
        texts = []
        for threads in ("1", "4"):
            path = tmp_path / f"r{threads}.json"
            assert main(["--threads", threads, "q3", "verify-appendix", "-o", str(path)]) == EXIT_OK
            texts.append(path.read_bytes())
        monkeypatch.setenv("SLABISO_THREADS", "3")
        path = tmp_path / "env.json"
        assert main(["q3", "verify-appendix", "-o", str(path)]) == EXIT_OK
        texts.append(path.read_bytes())
        assert texts[0] == texts[1] == texts[2]

    def test_gnuplot_needs_output(self, capsys):
        code, _, err = _run(["q3", "verify-appendix", "--gnuplot"], capsys)
        assert code == EXIT_ERROR and "--output" in err

    def test_gnuplot_files(self, tmp_path):
        path = tmp_path / "report.json"
        assert main(["q3", "verify-appendix", "-o", str(path), "--gnuplot"]) == EXIT_OK
        curves = tmp_path / "report_curves.csv"
        script = tmp_path / "report_curves.gp"
        assert curves.exists() and script.exists()
        assert '"report_curves.csv"' in script.read_text()

    def test_ranges(self, capsys):
        code, out, _ = _run(["q3", "ranges", "--beta", "1"], capsys)
        data = json.loads(out)
        assert code == EXIT_OK
        assert data["sphere"][0] == 0
        assert data["sphere"][1] == pytest.approx(0.120582, abs=1e-6)

    def test_ranges_sweep(self, capsys):
        code, out, _ = _run(["q3", "ranges", "--sweep", "4"], capsys)
        rows = list(csv.reader(io.StringIO(out)))
        assert code == EXIT_OK and len(rows) == 5 and rows[0][0] == "beta"
        assert float(rows[-1][0]) == 1.0

    def test_one_sided(self, capsys):
        code, out, _ = _run(["q3", "one-sided"], capsys)
        data = json.loads(out)
        assert code == EXIT_OK
        assert data["x0"] == pytest.approx(1.046172, abs=1e-6)
        assert data["v_min"] == pytest.approx(0.120582, abs=1e-6)


class TestCubeND:
    def test_check(self, tmp_path, capsys):
        table = tmp_path / "nd.csv"
        code, out, _ = _run(["cube-nd", "check", "--n-max", "12", "--csv", str(table), "--gnuplot"], capsys)
        assert code == EXIT_OK
        verdicts = json.loads(out)
        assert [v["monotone_on_integers"] for v in verdicts] == [n >= 10 for n in range(2, 13)]
        assert table.read_text().startswith("n,k,value\n")
        assert (tmp_path / "nd.gp").exists()

    def test_too_small(self, capsys):
        code, _, err = _run(["cube-nd", "check", "--n-max", "5"], capsys)
        assert code == EXIT_ERROR and err


class TestUnduloidShape:
    def test_torus_quarter_circle(self, tmp_path):
        path = tmp_path / "shape.csv"
        code = main(["unduloid", "shape", "--profile", "torus2", "--v0", "0",
                     "--v1", repr(math.pi / 16), "--samples", "500", "-o", str(path)])
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(path.read_text())))
        assert rows[0] == ["t", "s", "v"]
        body = [[float(x) for x in row] for row in rows[1:]]
        assert len(body) == 500
        # every sample lies on one circle centred on the t = 0 axis
        t0, s0, _ = body[0]
        t1, s1, _ = body[-1]
        centre = (t1 * t1 + s1 * s1 - s0 * s0) / (2 * (s0 - s1)) if s0 != s1 else 0.0
        radius = abs(s0 + centre)
        for t, s, _ in body:
            assert math.hypot(t, s + centre) == pytest.approx(radius, abs=1e-9)

    def test_bad_pair(self, capsys):
        code, _, err = _run(["unduloid", "shape", "--v0", "0.3", "--v1", "0.2"], capsys)
        assert code == EXIT_ERROR and err

    def test_too_few_samples(self, capsys):
        code, _, _ = _run(["unduloid", "shape", "--v0", "0.0", "--v1", "0.1", "--samples", "1"], capsys)
        assert code == EXIT_ERROR


class TestUsage:
    @pytest.mark.parametrize("argv", [
        ["bogus"],
        ["q3"],
        ["q3", "ranges", "--beta", "-1"],
        ["gauss", "profile"],
        ["q3", "verify-appendix", "--eps", "abc"],
    ])
    def test_usage_errors_exit_one(self, argv, capsys):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_ERROR

    def test_float_format(self):
        assert cli.fmt(0.1) == "0.10000000000000001"
        assert float(cli.fmt(math.pi)) == math.pi

    @pytest.mark.skipif(shutil.which("slabiso") is None, reason="console script not installed")
    def test_console_script(self):
        proc = subprocess.run(["slabiso", "q3", "one-sided"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "v_min" in json.loads(proc.stdout)


@pytest.mark.slow
class TestGauss:
    def test_thresholds_supercritical(self, capsys):
        code, out, _ = _run(["gauss", "thresholds", "--T", "3.5"], capsys)
        data = json.loads(out)
        assert code == EXIT_OK
        assert data["regime"] == "supercritical" and data["v_h_estimate"] == 0

    def test_thresholds_subcritical(self, capsys):
        code, out, _ = _run(["gauss", "thresholds", "--T", "2"], capsys)
        assert code == EXIT_OK and json.loads(out)["regime"] == "subcritical"

    def test_profile_table(self, capsys):
        code, out, _ = _run(["gauss", "profile", "--T", "2", "--samples", "5"], capsys)
        rows = list(csv.reader(io.StringIO(out)))
        assert code == EXIT_OK
        assert rows[0] == ["vbar", "area", "kind", "v0", "v1", "lambda"]
        assert len(rows) == 6 and all(r[2] == "horizontal" for r in rows[1:])
