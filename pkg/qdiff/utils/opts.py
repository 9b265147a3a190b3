import argparse
import json
import os
import pathlib
import pprint
import socket # for `gethostname`
from datetime import datetime

from .errors import ConfigError
from .misc import path_replace

SHAPES = ['triangular', 'exponential', 'white', 'tabulated']
COMMANDS = ['theory', 'dephasing', 'simulate', 'collapse']

# Destinations that are never read from a config file
_NOT_CONFIGURABLE = {'command', 'config', 'help'}

class ArgumentParser(argparse.ArgumentParser):
    """
    Parser whose errors raise ConfigError (exit code 1) rather than exiting with code 2.
    """
    def error(self, message):
        raise ConfigError("%s: %s" % (self.prog, message))

def _add_noise_args(parser):
    group = parser.add_argument_group(title='Noise', description='arguments relative to the on-site noise')
    group.add_argument('--shape', help='shape of the noise correlation kernel', choices=SHAPES, default='triangular')
    group.add_argument('--W', help='noise magnitude, sqrt(C(0)) (0 gives the noiseless lattice)', type=float, default=20.0)
    group.add_argument('--tau', help='noise correlation time', type=float, default=0.01)
    group.add_argument('--gamma', help='strength of white noise, C(t) = gamma delta(t) (--shape white)', type=float, default=None)
    group.add_argument('--table', help='CSV file of (t, C(t)) pairs starting at t = 0 (--shape tabulated)', type=pathlib.Path, default=None)

def _add_tunneling_arg(parser, default=1.0):
    group = parser.add_argument_group(title='Lattice', description='arguments relative to the tight-binding lattice')
    group.add_argument('--T', help='tunneling amplitude between neighboring sites', type=float, default=default)
    return group

def _add_numerics_args(parser, with_lattice=True):
    group = parser.add_argument_group(title='Numerics', description='arguments relative to time integration')
    if(with_lattice):
        group.add_argument('--dt', help='time step (default: largest step allowed by min(tau/10, 0.1/W, 0.1/T))', type=float, default=None)
        group.add_argument('--tmax', help='total simulated time (default: long enough for a diffusive fit window)', type=float, default=None)
        group.add_argument('--sites', help='number of lattice sites, odd (default: sized from the predicted spreading)', type=int, default=None)
        group.add_argument('--snapshot_interval', help='time between two recorded profiles (default: tmax / 200)', type=float, default=None)
    group.add_argument('--boundary_mass_limit', help='probability on the two edge sites above which a run is cut short', type=float, default=1e-6)
    group.add_argument('--override_dt', help='accept a dt above the accuracy heuristic', action='store_true')

def _add_ensemble_args(parser, realizations=100):
    group = parser.add_argument_group(title='Ensemble', description='arguments relative to noise realizations')
    group.add_argument('--realizations', help='number of noise realizations', type=int, default=realizations)
    group.add_argument('--seed', help='master seed of the noise streams', type=int, default=0)
    group.add_argument('--workers', help='number of parallel workers (default: available CPUs)', type=int, default=(os.cpu_count() or 1))

def _add_save_args(parser):
    default_out = pathlib.Path('runs') / ('[now]_' + socket.gethostname())

    group = parser.add_argument_group(title='Save', description='arguments relative to output files')
    group.add_argument('--out', help='output directory (\'[now]\' will be intepreted as now in the Y-m-d_H-M-S format)', default=default_out, type=pathlib.Path)
    group.add_argument('--config', help='JSON file of default values for any of the arguments of the subcommand (explicit flags win)', type=pathlib.Path, default=None)
    return group

def _add_display_args(parser):
    group = parser.add_argument_group(title='Display', description='arguments relative to displayed information')
    group.add_argument('--display', help='how to display progress', choices=['minimal', 'simple', 'tqdm'], default='tqdm')
    group.add_argument('--quiet', help='display less information', action='store_true')
    group.add_argument('--no_summary', '-ns', help='do not write TensorBoard summaries', action='store_true')

def build_parser():
    arg_parser = ArgumentParser(prog='qdiff', description='Diffusion of a quantum particle on a lattice with temporally correlated on-site noise.')
    subparsers = arg_parser.add_subparsers(title='commands', dest='command', metavar='{%s}' % ','.join(COMMANDS))
    subparsers.required = True

    parser = subparsers.add_parser('theory', help='predicted diffusion coefficient, its limits and the dephasing time')
    _add_noise_args(parser)
    _add_tunneling_arg(parser)
    _add_save_args(parser)
    _add_display_args(parser)

    parser = subparsers.add_parser('dephasing', help='Monte Carlo dephasing correlation against its closed form')
    _add_noise_args(parser)
    group = parser.add_argument_group(title='Numerics', description='arguments relative to the phase paths')
    group.add_argument('--dt', help='time step of the noise paths (default: tau/20, shortened for large W)', type=float, default=None)
    group.add_argument('--tmax', help='largest lag (default: 10 dephasing times)', type=float, default=None)
    group.add_argument('--samples', help='number of noise paths', type=int, default=10000)
    group.add_argument('--seed', help='master seed of the noise streams', type=int, default=0)
    group.add_argument('--pair_factor', help='also estimate the pair factor Q from independent site pairs', action='store_true')
    _add_save_args(parser)
    _add_display_args(parser)

    parser = subparsers.add_parser('simulate', help='ensemble simulation and diffusion fit')
    _add_noise_args(parser)
    _add_tunneling_arg(parser)
    _add_numerics_args(parser)
    _add_ensemble_args(parser)
    group = _add_save_args(parser)
    group.add_argument('--profiles', help='number of evenly spaced times at which the mean profile is saved', type=int, default=5)
    group.add_argument('--dump_trajectories', help='save sigma^2(t) and the boundary mass of every realization', action='store_true')
    group.add_argument('--dump_noise', help='save the noise paths of the first realization', action='store_true')
    _add_display_args(parser)

    parser = subparsers.add_parser('collapse', help='scaling collapse of D / (T^2 tau) against W tau')
    group = parser.add_argument_group(title='Noise', description='arguments relative to the on-site noise grid')
    group.add_argument('--shape', help='shape of the noise correlation kernel', choices=['triangular', 'exponential'], default='triangular')
    group.add_argument('--taus', help='correlation times of the grid', type=float, nargs='+', default=[0.01, 0.1, 1.0])
    group.add_argument('--Ws', help='noise magnitudes of the grid', type=float, nargs='+', default=[2.0, 5.0, 10.0, 20.0])
    _add_tunneling_arg(parser, default=0.1)
    _add_numerics_args(parser, with_lattice=False)
    _add_ensemble_args(parser, realizations=50)
    _add_save_args(parser)
    _add_display_args(parser)

    arg_parser.commands = subparsers.choices # subcommand name -> parser
    return arg_parser

def _convert(action, value):
    if(value is None or action.type is None):
        return value
    if(action.type in (int, float) and (isinstance(value, bool) or not isinstance(value, (int, float, str)))):
        raise ConfigError("invalid value %r for '%s'" % (value, action.dest))
    if(action.type is int and isinstance(value, float) and not value.is_integer()):
        raise ConfigError("'%s' must be an integer (got %r)" % (action.dest, value))
    try: return action.type(value)
    except (TypeError, ValueError): raise ConfigError("invalid value %r for '%s'" % (value, action.dest))

def _coerce(action, value):
    """
    Checks and converts one config-file value the way the parser would convert the flag.
    """
    if(action.nargs == 0): # store_true
        if(not isinstance(value, bool)): raise ConfigError("'%s' must be true or false (got %r)" % (action.dest, value))
        return value
    if(action.nargs in ('+', '*')):
        if(not isinstance(value, list) or (action.nargs == '+' and not value)):
            raise ConfigError("'%s' must be a non-empty list (got %r)" % (action.dest, value))
        return [_convert(action, v) for v in value]
    if(isinstance(value, (list, dict))): raise ConfigError("'%s' must be a single value (got %r)" % (action.dest, value))
    value = _convert(action, value)
    if(action.choices is not None and value not in action.choices):
        raise ConfigError("'%s' must be one of %s (got %r)" % (action.dest, ', '.join(map(str, action.choices)), value))
    return value

def load_config(path, parser):
    """
    Reads a flat JSON object whose keys are argument names of `parser`; unknown keys are rejected.
    Output:
        dict of converted default values
    """
    try:
        with open(path) as istr: config = json.load(istr)
    except OSError as e: raise ConfigError("cannot read config file '%s': %s" % (path, e))
    except json.JSONDecodeError as e: raise ConfigError("config file '%s' is not valid JSON: %s" % (path, e))
    if(not isinstance(config, dict)): raise ConfigError("config file '%s' must hold a JSON object" % path)

    actions = {action.dest: action for action in parser._actions if action.dest not in _NOT_CONFIGURABLE}
    unknown = sorted(set(config) - set(actions))
    if(unknown): raise ConfigError("unknown key(s) in config file '%s': %s" % (path, ', '.join(unknown)))
    return {key: _coerce(actions[key], value) for key, value in config.items()}

def validate_args(args):
    """
    Range checks that argparse cannot express; run before any computation.
    """
    def positive(name):
        value = getattr(args, name, None)
        if(value is not None and not (value > 0)): raise ConfigError("--%s must be positive (got %s)" % (name, value))

    for name in ['tau', 'T', 'dt', 'snapshot_interval', 'realizations', 'workers', 'samples']: positive(name)
    if(getattr(args, 'W', None) is not None and args.W < 0): raise ConfigError("--W must be non-negative (got %s)" % args.W)
    if(getattr(args, 'gamma', None) is not None and args.gamma < 0): raise ConfigError("--gamma must be non-negative (got %s)" % args.gamma)
    if(getattr(args, 'tmax', None) is not None and args.tmax < 0): raise ConfigError("--tmax must be non-negative (got %s)" % args.tmax)
    if(getattr(args, 'profiles', None) is not None and args.profiles < 0): raise ConfigError("--profiles must be non-negative (got %s)" % args.profiles)
    if(getattr(args, 'sites', None) is not None and (args.sites < 3 or args.sites % 2 == 0)):
        raise ConfigError("--sites must be odd and at least 3 (got %s)" % args.sites)
    if(hasattr(args, 'boundary_mass_limit') and not (0 < args.boundary_mass_limit < 1)):
        raise ConfigError("--boundary_mass_limit must lie in (0, 1) (got %s)" % args.boundary_mass_limit)
    if(getattr(args, 'samples', None) is not None and args.samples < 2):
        raise ConfigError("--samples must be at least 2 (got %s)" % args.samples)
    for name in ['taus', 'Ws']:
        values = getattr(args, name, None)
        if(values is not None and not all(v > 0 for v in values)): raise ConfigError("--%s values must be positive" % name)

    shape = getattr(args, 'shape', None)
    if(shape == 'white' and args.gamma is None): raise ConfigError("--shape white needs --gamma")
    if(shape == 'tabulated' and args.table is None): raise ConfigError("--shape tabulated needs --table")

def get_args(argv=None):
    arg_parser = build_parser()

    # A first pass finds the subcommand and the config file; config values then become defaults of the subcommand
    args = arg_parser.parse_args(argv)
    if(args.config is not None):
        subparser = arg_parser.commands[args.command]
        subparser.set_defaults(**load_config(args.config, subparser))
        args = arg_parser.parse_args(argv)

    validate_args(args)
    args.out = path_replace(args.out, '[now]', datetime.now().strftime('%Y-%m-%d_%H-%M-%S'))

    if not args.quiet:
        print("command-line arguments:")
        pprint.pprint(vars(args), indent=4)
    return args
