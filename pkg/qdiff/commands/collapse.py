from ..ensemble.sweep import flank_slopes, scaling_sweep, SMALL_X_RANGE, LARGE_X_RANGE
from ..utils.errors import NumericalValidityError
from ..utils.io import config_record, write_csv
from ..utils.logging import RunLogger

def main(args):
    args.out.mkdir(parents=True, exist_ok=True)
    logger = RunLogger.from_args(args, summary_dir=(args.out / 'summary'))
    record = config_record(args)

    sim_options = {'boundary_mass_limit': args.boundary_mass_limit, 'override_dt': args.override_dt}
    try:
        points = scaling_sweep(args.shape, args.taus, args.Ws, args.T, args.realizations, args.seed, workers=args.workers, logger=logger, sim_options=sim_options)
    finally:
        logger.close()

    header = ['x', 'tau', 'W', 'f_numeric', 'f_numeric_err', 'f_theory', 'flag']
    rows = [[p.x, p.tau, p.W, p.f_numeric, p.f_numeric_err, p.f_theory, p.flag] for p in points]
    write_csv(args.out / 'collapse.csv', header, rows, config=record)

    slopes = flank_slopes(points)
    ranges = {'small': SMALL_X_RANGE, 'large': LARGE_X_RANGE}
    write_csv(args.out / 'slopes.csv', ['flank', 'x_lo', 'x_hi', 'slope', 'n_points'], [[flank, *ranges[flank], *slopes[flank]] for flank in ['small', 'large']], config=record)

    for p in points:
        print("x = %-8g tau = %-6g W = %-6g f_numeric = %-10.4g f_theory = %-10.4g %s" % (p.x, p.tau, p.W, p.f_numeric, p.f_theory, p.flag), flush=True)
    for flank in ['small', 'large']:
        slope, n_points = slopes[flank]
        if(slope is None): print("%s-x flank: no slope fitted (%i point(s))" % (flank, n_points), flush=True)
        else: print("%s-x flank: log-log slope %.3f over %i points" % (flank, slope, n_points), flush=True)

    if(not any(p.is_valid() for p in points)):
        raise NumericalValidityError("every sweep point failed; see the flags in %s" % (args.out / 'collapse.csv'))
