import argparse
import pathlib

import numpy as np
import pytest

from qdiff.utils.io import config_record, format_value, read_csv, write_csv
from qdiff.utils.logging import AverageSummaryWriter, MinimalProgress, Progress, RunLogger, SimpleProgress, TQDMProgress
from qdiff.utils.misc import as_step_count, odd_lattice_size, path_replace, site_offsets

class RecordingWriter:
    def __init__(self):
        self.scalars = []
        self.closed = False

    def add_scalar(self, tag, scalar_value, global_step=None):
        self.scalars.append((tag, scalar_value, global_step))

    def close(self):
        self.closed = True

def test_summary_writer_averages_over_periods():
    writer = RecordingWriter()
    summary = AverageSummaryWriter(writer=writer, default_period=2)
    summary.add_scalar('sigma', 1.0, 0)
    assert writer.scalars == []
    summary.add_scalar('sigma', 3.0, 1)
    summary.add_scalar('D', 0.5, 2, period=1)
    assert writer.scalars == [('sigma', 2.0, 1), ('D', 0.5, 2)]

    # A partial buffer is written at close, at the last step it received
    summary.add_scalar('sigma', 5.0, 2)
    summary.add_scalar('M', 1.0, 0, period=3)
    summary.add_scalar('M', 2.0, 1, period=3)
    summary.close()
    assert writer.scalars[2:] == [('sigma', 5.0, 2), ('M', 1.5, 1)]
    assert writer.closed

def test_run_logger_forwards_periods():
    writer = RecordingWriter()
    logger = RunLogger(quiet=True, summary_writer=AverageSummaryWriter(writer=writer))
    logger.scalar('D', 1.0, 0)
    for step in range(4):
        logger.scalar('moment', float(step), step, period=4)
    logger.close()
    assert writer.scalars == [('D', 1.0, 0), ('moment', 1.5, 3)]
    assert writer.closed

def test_run_logger(capsys):
    logger = RunLogger(display='simple', quiet=False)
    logger.log("hello")
    assert 'hello' in capsys.readouterr().out
    with logger.progress(2, desc='realizations') as progress:
        progress.update()
        progress.update()
    assert 'realizations 2/2' in capsys.readouterr().out
    logger.scalar('D', 1.0, 0) # no summary writer: ignored
    logger.close()

    quiet = RunLogger(display='tqdm', quiet=True)
    quiet.log("hidden")
    assert isinstance(quiet.progress(3), MinimalProgress)
    assert capsys.readouterr().out == ''

def test_progress_classes():
    assert Progress.get_progress_cls('tqdm') is TQDMProgress
    assert Progress.get_progress_cls('simple') is SimpleProgress
    with pytest.raises(AssertionError):
        Progress.get_progress_cls('fancy')

def test_format_value():
    assert format_value(None) == ''
    assert format_value(True) == 'True'
    assert format_value(np.int64(3)) == '3'
    assert format_value(0.1) == '0.10000000000000001'
    assert format_value(np.nan) == 'nan'
    assert format_value(-np.inf) == '-inf'
    assert format_value('Good') == 'Good'

def test_csv_with_provenance(tmp_path):
    path = tmp_path / 'table.csv'
    write_csv(path, ['t', 'C'], [[0.0, 1.0], [0.5, 0.25]], config={'seed': 1})
    lines = path.read_text().splitlines()
    assert lines[0] == '# config: {"seed": 1}'
    assert lines[1] == 't,C'
    header, values = read_csv(path)
    assert header == ['t', 'C']
    np.testing.assert_array_equal(values, [[0.0, 1.0], [0.5, 0.25]])

def test_config_record_skips_presentation_arguments():
    args = argparse.Namespace(W=1.0, out=pathlib.Path('runs'), workers=4, quiet=True, display='tqdm', no_summary=True, config=None, seed=3)
    assert config_record(args, dt=0.1) == {'W': 1.0, 'seed': 3, 'dt': 0.1}

def test_misc_helpers():
    assert path_replace('runs/[now]_host', '[now]', 'today') == pathlib.Path('runs/today_host')
    assert odd_lattice_size(3.2) == 9
    np.testing.assert_array_equal(site_offsets(5), [-2, -1, 0, 1, 2])
    assert as_step_count(0.3 / 0.1) == 3
    assert as_step_count(2.5) is None
