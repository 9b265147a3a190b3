import csv

import pytest

def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run acceptance-scale tests')

def pytest_collection_modifyitems(config, items):
    if(config.getoption('--runslow')): return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if('slow' in item.keywords): item.add_marker(skip_slow)

def read_rows(path):
    """
    Rows of a CSV file written by qdiff, as dicts of strings (comment lines skipped).
    """
    with open(path, newline='') as istr:
        lines = [line for line in istr if(not line.startswith('#'))]
    return list(csv.DictReader(lines))

@pytest.fixture
def rows():
    return read_rows
