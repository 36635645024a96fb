import pathlib

import pytest

from qirvm import default_registry, find_entry, parse_module

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

TELEPORT_LL = (FIXTURES / "teleport.ll").read_text()
QPE_LL = (FIXTURES / "qpe_phi_third_k5.ll").read_text()


@pytest.fixture
def teleport_module():
    return parse_module(TELEPORT_LL)


@pytest.fixture
def teleport_entry(teleport_module):
    return find_entry(teleport_module)


@pytest.fixture
def qpe_module():
    return parse_module(QPE_LL)


@pytest.fixture
def registry():
    return default_registry()


def make_program(body, declarations="", attrs=None, extra=""):
    """Assemble a minimal module around a main-function body."""
    if attrs is None:
        attrs = '"entry_point"'
    return f"""\
source_filename = "test"

%Qubit = type opaque
%Result = type opaque

define void @main() #0 {{
{body}
}}

{declarations}

attributes #0 = {{ {attrs} }}
{extra}
"""
