from unittest import mock

import pytest
import typer
from typer.testing import CliRunner

from hfbem._console import console_factory
from hfbem._logging import LogLevel
from hfbem.cli import app
from hfbem.cli import diag_layer
from hfbem.cli import diag_shadow
from hfbem.cli import load_config_with_error_handling
from hfbem.cli import oracle_circle
from hfbem.cli import solve
from hfbem.cli import sweep
from hfbem.cli import sweep_table
from hfbem.experiments import STATUS_FAILED
from hfbem.experiments import ErrorRecord
from hfbem.experiments import ShadowSample
from hfbem.types import Method
from tests.helpers import StringIo
from tests.helpers import asset_filename

runner = CliRunner()


@pytest.mark.parametrize(
    ["filename", "message"],
    [
        pytest.param("gone", "ERROR: failed to find", id="missing"),
        pytest.param("bad_key.conf", "ERROR: ", id="unknown-key"),
        pytest.param("bad_list.yaml", "ERROR: ", id="not-a-mapping"),
    ]
)
def test_load_config_with_error(filename, message) -> None:
    with (
        mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout,
        pytest.raises(typer.Exit) as err,
    ):
        load_config_with_error_handling(asset_filename(filename))

    assert err.value.exit_code == 1
    output = mock_stdout.getvalue()
    assert output.startswith(message)


def test_load_config_unknown_key_message() -> None:
    with (
        mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout,
        pytest.raises(typer.Exit),
    ):
        load_config_with_error_handling(asset_filename("bad_key.conf"))
    assert "unknown key 'wavenumber'" in mock_stdout.getvalue()


def test_sweep_table() -> None:
    records = [
        ErrorRecord(k=50.0, d=4, method=Method.COV, dim=30, rel_l2_error=0.0123, log10_error=-2.5),
        ErrorRecord(k=50.0, d=8, method=Method.COV, dim=54, rel_l2_error=1e-5, log10_error=-5.25,
                    ill_conditioned=True),
        ErrorRecord(k=800.0, d=4, method=Method.COV, status=STATUS_FAILED, error="too big"),
    ]
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        console_factory().print(sweep_table(records))
    output = mock_stdout.getvalue()
    assert "rel. L2 error" in output
    assert "1.230e-02" in output
    assert "-5.250" in output
    assert "ok (lstsq)" in output
    assert "failed" in output
    assert len(output.splitlines()) == 7


def test_sweep(tmp_path) -> None:
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        sweep(asset_filename("circle_small.conf"), out=str(tmp_path), log_level=LogLevel.WARN)
    output = mock_stdout.getvalue()
    assert f"Wrote results to {tmp_path}" in output
    assert "rel. L2 error" in output
    assert (tmp_path / "sweep.csv").exists()
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 5


def test_sweep_failed_cells(tmp_path) -> None:
    config = tmp_path / "large.conf"
    config.write_text(f"k = 10, 500\ndegrees = [2]\nppw = 10\noutput_dir = {tmp_path / 'out'}\n")
    with (
        mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout,
        pytest.raises(typer.Exit) as err,
    ):
        sweep(str(config), log_level=LogLevel.WARN)
    assert err.value.exit_code == 1
    output = mock_stdout.getvalue()
    assert "ERROR: 1 of 2 cells failed" in output
    assert (tmp_path / "out" / "failures.csv").exists()


def test_oracle_circle(tmp_path) -> None:
    out = tmp_path / "circle.csv"
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        oracle_circle(10.0, str(out), log_level=LogLevel.WARN)
    assert f"Wrote 120 samples to {out}" in mock_stdout.getvalue()
    lines = out.read_text().splitlines()
    assert lines[0] == "t,re_eta,im_eta,re_eta_slow,im_eta_slow"
    assert len(lines) == 121


def test_oracle_circle_error(tmp_path) -> None:
    with (
        mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout,
        pytest.raises(typer.Exit) as err,
    ):
        oracle_circle(10.0, str(tmp_path / "circle.csv"), radius=0.0, log_level=LogLevel.WARN)
    assert err.value.exit_code == 1
    assert mock_stdout.getvalue().startswith("ERROR: radius must be positive")


def test_solve(tmp_path) -> None:
    density = tmp_path / "density.csv"
    galerkin = tmp_path / "galerkin.csv"
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        solve(20.0, 4, ppw=10.0, dump_density=str(density), dump_galerkin=str(galerkin), log_level=LogLevel.WARN)
    output = mock_stdout.getvalue()
    assert "circle(r=1) k=20 cov d=4: dim 30, N=200" in output
    assert "relative L2 error" in output
    assert density.read_text().startswith("t,re_eta,im_eta,re_eta_slow,im_eta_slow\n")
    sections = galerkin.read_text().split("\n\n")
    assert len(sections) == 2
    assert sections[1].splitlines()[0] == "region,label,a,b,coefficient_l2"
    assert len(sections[1].splitlines()) == 7


def test_solve_large_wavenumber() -> None:
    with (
        mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout,
        pytest.raises(typer.Exit) as err,
    ):
        solve(500.0, 4, log_level=LogLevel.WARN)
    assert err.value.exit_code == 1
    assert "--allow-large" in mock_stdout.getvalue()


def test_diag_layer() -> None:
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        diag_layer(50.0, factor=1.0, log_level=LogLevel.WARN)
    output = mock_stdout.getvalue()
    assert "layer width" in output
    assert "width ratio 1.000 (k^(1/3) scaling predicts 1.000)" in output


@pytest.mark.parametrize(
    ["values", "message", "exit_code"],
    [
        pytest.param([0.3, 0.2, 0.1], "deep-shadow density decreases with k", None, id="decreasing"),
        pytest.param([0.3, 0.3, 0.1], "ERROR: deep-shadow density does not decrease", 1, id="flat"),
    ]
)
def test_diag_shadow(values, message, exit_code) -> None:
    samples = [ShadowSample(k=k, max_envelope=v) for k, v in zip([50.0, 100.0, 200.0], values)]
    with (
        mock.patch("hfbem.cli.shadow_decay", return_value=samples) as mock_decay,
        mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout,
    ):
        if exit_code is None:
            diag_shadow([200.0, 50.0, 100.0], log_level=LogLevel.WARN)
        else:
            with pytest.raises(typer.Exit) as err:
                diag_shadow([200.0, 50.0, 100.0], log_level=LogLevel.WARN)
            assert err.value.exit_code == exit_code
    assert mock_decay.call_args.args[2] == [50.0, 100.0, 200.0]
    output = mock_stdout.getvalue()
    assert "max |eta_slow|" in output
    assert message in output


def test_app_help() -> None:
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    for command in ("sweep", "oracle", "diag", "solve"):
        assert command in result.output


def test_app_oracle(tmp_path) -> None:
    out = tmp_path / "circle.csv"
    result = runner.invoke(app, ["oracle", "circle", "--k", "5", "--out", str(out), "--ppw", "8"])
    assert result.exit_code == 0, result.output
    assert "Wrote 40 samples" in result.output
    assert out.exists()


def test_app_rejects_bad_option() -> None:
    result = runner.invoke(app, ["solve", "--k", "20", "--degree", "0"])
    assert result.exit_code != 0
