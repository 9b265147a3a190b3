from abc import ABCMeta, abstractmethod
from datetime import datetime

import numpy as np
import tqdm

class AverageSummaryWriter:
    """
    Wraps a TensorBoard writer; scalars logged under a tag are buffered and
    their mean is written every `period` values. Buffers that are not full
    when the writer is closed are written at the last step they received.
    """
    def __init__(self, writer=None, log_dir=None, default_period=1):
        if(writer is None):
            from tensorboardX import SummaryWriter
            writer = SummaryWriter(log_dir)
        else: assert log_dir is None

        self.writer = writer
        self.default_period = default_period

        self._values = {}
        self._last_steps = {}

    def add_scalar(self, tag, scalar_value, global_step=None, period=None):
        values = self._values.setdefault(tag, [])
        values.append(scalar_value)
        self._last_steps[tag] = global_step

        if(period is None): period = self.default_period
        if(len(values) >= period): self._write(tag)

    def _write(self, tag):
        # Logs the average and clears the buffer
        values = self._values[tag]
        self.writer.add_scalar(tag=tag, scalar_value=float(np.mean(values)), global_step=self._last_steps[tag])
        values.clear()

    def close(self):
        for tag, values in self._values.items():
            if(values): self._write(tag)
        self.writer.close()

class Progress(metaclass=ABCMeta):
    def __init__(self, total, desc=''):
        self.total = total
        self.desc = desc

    def __enter__(self):
        return self

    def __exit__(self, type, value, traceback):
        pass

    @abstractmethod
    def update(self, **logged_items):
        pass

    @staticmethod
    def get_progress_cls(display):
        """
        Retrieves correct class based on display
        """
        progress_cls = None
        if display=="tqdm": progress_cls = TQDMProgress
        elif display=="simple": progress_cls = SimpleProgress
        elif display=="minimal": progress_cls = MinimalProgress
        assert progress_cls is not None, "the `display` parameter is invalid"
        return progress_cls

class TQDMProgress(Progress):
    def __enter__(self):
        self.pbar = tqdm.tqdm(total=self.total, unit="real", desc=self.desc) # Do not forget to close it at the end
        return self

    def update(self, **logged_items):
        if(logged_items): self.pbar.set_postfix(logged_items, refresh=False)
        self.pbar.update()

    def __exit__(self, type, value, traceback):
        self.pbar.close()

class SimpleProgress(Progress):
    def __enter__(self):
        self.i = 0
        return self

    def update(self, **logged_items):
        self.i += 1
        postfix = " ".join(("%s: %g" % (k, logged_items[k])) for k in sorted(logged_items))
        print(('%s %i/%i %s' % (self.desc, self.i, self.total, postfix)).strip(), flush=True)

class MinimalProgress(Progress):
    def update(self, **logged_items):
        pass

class RunLogger:
    """
    Console messages, progress bars and (optionally) TensorBoard scalars for one command run.
    """
    def __init__(self, display='minimal', quiet=False, summary_writer=None):
        self.display = display
        self.quiet = quiet
        self.summary_writer = summary_writer # AverageSummaryWriter, or None for no summary

    @classmethod
    def from_args(cls, args, summary_dir=None):
        summary_writer = None
        if(not args.no_summary and (summary_dir is not None)): summary_writer = AverageSummaryWriter(log_dir=str(summary_dir))
        return cls(display=args.display, quiet=args.quiet, summary_writer=summary_writer)

    def log(self, message):
        if(not self.quiet): print(("[%s] %s" % (datetime.now(), message)), flush=True)

    def progress(self, total, desc=''):
        display = 'minimal' if(self.quiet) else self.display
        return Progress.get_progress_cls(display)(total, desc)

    def scalar(self, tag, value, step, period=None):
        if(self.summary_writer is not None): self.summary_writer.add_scalar(tag, value, step, period=period)

    def close(self):
        if(self.summary_writer is not None): self.summary_writer.close()
