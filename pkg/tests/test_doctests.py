import doctest

import pytest

import schubflip.fliporbits
import schubflip.words


@pytest.mark.parametrize("module", [schubflip.words, schubflip.fliporbits])
def test_module_examples(module):
    result = doctest.testmod(module)
    assert result.failed == 0 and result.attempted > 0
