from ..physics.theory import TheoryParams, theory_record
from ..utils.io import config_record, write_csv

def _show(value):
    if(value is None): return 'n/a'
    if(isinstance(value, float)): return '%.6g' % value
    return str(value)

def main(args):
    params = TheoryParams.from_args(args)
    record = theory_record(params)

    args.out.mkdir(parents=True, exist_ok=True)
    header = list(record)
    write_csv(args.out / 'theory.csv', header, [[record[key] for key in header]], config=config_record(args, kernel=params.kernel.describe()))

    print("kernel: %s, T = %g" % (params.kernel, params.tunneling_T), flush=True)
    for key in header:
        print(("%16s: %s" % (key, _show(record[key]))), flush=True)
    if(not record['valid_regime']):
        print("warning: T/W = %s is outside the T << W regime of the prediction" % _show(record['T_over_W']), flush=True)
