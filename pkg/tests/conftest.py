import pytest

from cau.deepstack import call_deep
from cau.frontend.parser import parse_term


@pytest.hookimpl(tryfirst=True)
def pytest_pyfunc_call(pyfuncitem):
    """Run each test body on a big-stack thread: traversals recurse deeply."""
    args = {name: pyfuncitem.funcargs[name] for name in pyfuncitem._fixtureinfo.argnames}
    call_deep(pyfuncitem.obj, **args)
    return True


@pytest.fixture
def term():
    """Parse surface syntax with the prelude in scope."""
    return parse_term
