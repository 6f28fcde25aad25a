from unittest import mock

import pytest
import typer

from hfbem._exceptions import AssemblyError
from hfbem._exceptions import ConfigurationError
from hfbem._exceptions import HfbemError
from hfbem._exceptions import InvalidArgumentError
from hfbem._exceptions import NumericError
from hfbem._exceptions import ResourceError
from hfbem._exceptions import SolverError
from hfbem._exceptions import handle_exceptions
from tests.helpers import StringIo


@pytest.mark.parametrize(
    ["exception", "message"],
    [
        pytest.param(ValueError("My party"), "My party", id="ValueError"),
        pytest.param(ConfigurationError("need xi <= xi_prime"), "need xi <= xi_prime", id="ConfigurationError"),
        pytest.param(KeyError(), "KeyError", id="no-message"),
        pytest.param(InvalidArgumentError("[bold]k[/bold] must be positive"), "[bold]k[/bold]", id="markup"),
    ]
)
def test_handle_exceptions(exception, message):
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        with pytest.raises(typer.Exit) as ex:
            handle_exceptions(exception)
        assert ex.value.exit_code == 1
        output = mock_stdout.getvalue()
        assert output.startswith("ERROR:")
        assert message in output


def test_handle_exceptions_message():
    with mock.patch('sys.stdout', new_callable=StringIo) as mock_stdout:
        with pytest.raises(typer.Exit):
            handle_exceptions(ValueError("hidden"), "sweep failed")
        assert "ERROR: sweep failed" in mock_stdout.getvalue()
        assert "hidden" not in mock_stdout.getvalue()


def test_resource_error():
    ex = ResourceError(24000, 20000)
    assert ex.nodes == 24000
    assert ex.cap == 20000
    assert str(ex) == (
        "grid needs 24000 nodes, above the cap of 20000; use a smaller wavenumber or ppw, or pass --allow-large"
    )

    ex = ResourceError(0, 20000, reason="k=800 is above 400")
    assert str(ex).startswith("k=800 is above 400; ")


def test_solver_error():
    ex = SolverError(12.5, 3.2e15)
    assert ex.k == 12.5
    assert "k=12.5" in str(ex)
    assert "3.200e+15" in str(ex)
    assert "Neumann eigenvalue" in str(ex)


def test_assembly_error():
    ex = AssemblyError([1, 2, 3, 4, 5, 6, 7], [0, 0, 0, 0, 0, 0, 9])
    assert str(ex) == "non-finite kernel values at node pairs (1, 0), (2, 0), (3, 0), (4, 0), (5, 0) and 2 more"
    assert ex.cols[-1] == 9


def test_hierarchy():
    assert issubclass(InvalidArgumentError, ValueError)
    assert issubclass(NumericError, ArithmeticError)
    for cls in (InvalidArgumentError, NumericError, ConfigurationError, SolverError, ResourceError):
        assert issubclass(cls, HfbemError)
