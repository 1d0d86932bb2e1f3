"""
Command-line front end.

Exit codes: 0 success or verified, 1 verification false or no witness,
2 usage or data error, 3 budget, deadline or unknown outcome.
"""
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import click
import pydantic

from core.config import app_settings, settings as default_settings
from core.exceptions import AppBaseException, BudgetExceededError, DeadlineExceededError
from core.log_config import configure_logging
from models.patterns import Certificate, PatternKind
from models.schemas import (
    CertificateSchema,
    FinRelStructureSchema,
    NodeMapSchema,
    PfcStructureSchema,
    QfTypeSchema,
    SearchOutcomeSchema,
    SetSystemSchema,
    parse_lang,
)
from models.search import SearchSpec, SearchStatus
from models.tree import TreeShape, parse_node
from services.fuzz_service import FuzzService
from services.oracles import get_oracle
from services.pattern_service import PatternService
from services.pfc_service import (
    PfcService,
    imaginary_cover,
    in_class,
    pasting1_build,
    pasting2_build,
    pfc_amalgamate,
)
from services.search_service import SearchService
from services.transform_service import TRANSFORM_NAMES, TransformService, run_transform
from services.treeidx import qftp
from services.treeops import OP_NAMES, OpDescriptor, build_op

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3


class CliState:
    """Per-invocation settings and output mode, shared by every subcommand."""

    def __init__(self, settings, as_json: bool):
        self.settings = settings
        self.as_json = as_json
        self.patterns = PatternService(settings)

    def emit(self, payload: Any, text: str, out: Path | None = None) -> None:
        """Print ``payload`` as JSON or ``text``; write the JSON to ``out`` too."""
        if hasattr(payload, 'model_dump'):
            payload = payload.model_dump()
        document = json.dumps(payload, indent=2, sort_keys=True)
        if out is not None:
            out.write_text(document + '\n')
            logger.info(f'Wrote {out}')
        click.echo(document if self.as_json else text)


def handled(command: Callable) -> Callable:
    """Translate domain errors into the exit-code contract."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            code = command(*args, **kwargs)
        except (BudgetExceededError, DeadlineExceededError) as e:
            click.echo(f'unknown: {e}', err=True)
            sys.exit(EXIT_UNKNOWN)
        except AppBaseException as e:
            click.echo(f'error ({type(e).__name__}): {e}', err=True)
            sys.exit(EXIT_USAGE)
        except pydantic.ValidationError as e:
            click.echo(f'error: malformed input: {e}', err=True)
            sys.exit(EXIT_USAGE)
        sys.exit(code or EXIT_OK)

    return wrapper


def load_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise click.BadParameter(f'{path} is not valid JSON: {e}') from e


def require_keys(data: Any, *keys: str) -> dict[str, Any]:
    if not isinstance(data, dict):
        raise click.BadParameter('Expected a JSON object')
    missing = [key for key in keys if key not in data]
    if missing:
        raise click.BadParameter(f'Missing keys {missing}')
    return data


def parse_params(pairs: tuple[str, ...]) -> dict[str, Any]:
    """``k=2``, ``bounds=2,3`` or ``bounds=[2,3]`` into a parameter dict."""
    params: dict[str, Any] = {}
    for pair in pairs:
        if '=' not in pair:
            raise click.BadParameter(f"Expected key=value, got '{pair}'", param_hint='--param')
        key, value = pair.split('=', 1)
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            if ',' in value:
                try:
                    params[key] = [int(v) for v in value.split(',')]
                except ValueError as e:
                    raise click.BadParameter(f"Invalid list for '{key}': {value}", param_hint='--param') from e
            else:
                params[key] = value
    return params


def parse_dims(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split('x')
        return int(rows), int(cols)
    except ValueError as e:
        raise click.BadParameter(f"Expected 'RxC', got '{text}'", param_hint='--dims') from e


def read_certificate(path: Path, kind: str | None, params: dict[str, Any]) -> Certificate:
    """
    A certificate file, or a bare tree/array payload claimed as ``kind``.
    """
    data = require_keys(load_json(path))
    if 'payload' not in data:
        if kind is None:
            raise click.BadParameter('A bare payload needs --kind', param_hint='--kind')
        data = {'kind': kind, 'params': params, 'payload': data}
    else:
        if kind is not None:
            data['kind'] = kind
        if params:
            data['params'] = params
        data.pop('verdict', None)
    return CertificateSchema.model_validate(data).to_domain()


def describe(c: Certificate) -> str:
    lines = [f'{c.kind.value} {c.params}: {"verified" if c.ok else "NOT verified"}']
    if c.verdict is not None:
        lines += [f'  {v.describe()}' for v in c.verdict.violations]
        if c.verdict.truncated:
            lines.append('  ... (more violations)')
    if c.provenance is not None:
        p = c.provenance
        lines.append(f'  via {p.transform}' + (f' [{p.case_fired}]' if p.case_fired else ''))
    return '\n'.join(lines)


@click.group()
@click.option('--json', 'as_json', is_flag=True, help='Machine-readable JSON on stdout.')
@click.option('--threads', type=click.IntRange(min=1), default=None, help='Search worker cap.')
@click.option('--budget-seconds', type=click.FloatRange(min=0), envvar='TPKIT_BUDGET_SECONDS', default=None,
              help='Wall-clock deadline for searches (0 disables).')
@click.option('--budget', 'budget_assignments', type=click.IntRange(min=1), default=None,
              help='Assignment budget for searches.')
@click.option('--cap', type=click.IntRange(min=0), default=None, help='Violations reported per verification.')
@click.option('--log-level', default=None, help='Logging level name.')
@click.pass_context
def cli(ctx, as_json, threads, budget_seconds, budget_assignments, cap, log_level):
    """tpkit: tree indices, patterns, transforms and amalgamation."""
    configure_logging(log_level)
    update = {
        'threads': threads,
        'budget_seconds': budget_seconds,
        'budget_assignments': budget_assignments,
        'violation_cap': cap,
    }
    settings = default_settings.model_copy(update={k: v for k, v in update.items() if v is not None})
    ctx.obj = CliState(settings, as_json)


@cli.command('qftp')
@click.argument('nodes', nargs=-1)
@click.option('--lang', default='L0', show_default=True, help='L0 or Ls.')
@click.pass_obj
@handled
def qftp_command(state: CliState, nodes, lang):
    """Quantifier-free type of a tuple of nodes (e.g. 0.1 1 e)."""
    t = qftp([parse_node(n) for n in nodes], parse_lang(lang))
    schema = QfTypeSchema.from_domain(t)
    state.emit(schema, f'{schema.lang} type of arity {schema.arity}: eq={schema.eq} levels={schema.levels}')


@cli.command('op')
@click.argument('name', type=click.Choice(OP_NAMES))
@click.option('--target', default=None, help="Target shape 'BxD' (restriction takes --source only).")
@click.option('--source', default=None, help="Source shape 'BxD' (default: minimal).")
@click.option('--param', 'params', multiple=True, help='Operation parameter key=value.')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def op_command(state: CliState, name, target, source, params, out):
    """Build a tree operation as a node map."""
    nodemap = build_op(OpDescriptor(name, parse_params(params)), TreeShape.parse(target) if target else None,
                       TreeShape.parse(source) if source else None)
    lines = [f'{nodemap.op} {nodemap.params}: {nodemap.target} -> {nodemap.source}']
    state.emit(NodeMapSchema.from_domain(nodemap), '\n'.join(lines), out)


@cli.command('verify')
@click.option('--kind', default=None, help='Pattern kind (default: taken from the certificate).')
@click.option('--tree', '--in', 'path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='Certificate or bare tree/array JSON.')
@click.option('--param', 'params', multiple=True, help='Kind parameter key=value.')
@click.pass_obj
@handled
def verify_command(state: CliState, kind, path, params):
    """Verify a certificate."""
    c = state.patterns.verify(read_certificate(path, kind, parse_params(params)))
    state.emit(CertificateSchema.from_domain(c), describe(c))
    return EXIT_OK if c.ok else EXIT_FALSE


@cli.command('search')
@click.option('--kind', required=True)
@click.option('--shape', default=None, help="Tree shape 'BxD'.")
@click.option('--dims', default=None, help="Array dimensions 'RxC'.")
@click.option('--system', 'system_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--param', 'params', multiple=True)
@click.option('--family', default=None, help='Comma-separated set names to use.')
@click.option('--no-prune', is_flag=True, help='Enumerate complete assignments only.')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def search_command(state: CliState, kind, shape, dims, system_path, params, family, no_prune, out):
    """Look for a witness among the sets of a set system."""
    pattern_kind = PatternKind.parse(kind)
    system = SetSystemSchema.model_validate(load_json(system_path)).to_domain()
    if pattern_kind.uses_array and dims is None:
        raise click.BadParameter(f'{pattern_kind.value} needs --dims', param_hint='--dims')
    if not pattern_kind.uses_array and shape is None:
        raise click.BadParameter(f'{pattern_kind.value} needs --shape', param_hint='--shape')
    spec = SearchSpec(
        kind=pattern_kind,
        params=parse_params(params),
        shape=TreeShape.parse(shape) if not pattern_kind.uses_array else None,
        dims=parse_dims(dims) if pattern_kind.uses_array else None,
        family=tuple(family.split(',')) if family else None,
        prune=not no_prune,
    )
    outcome = SearchService(state.settings, state.patterns).search(spec, system)
    if outcome.status is SearchStatus.FOUND:
        text = f'witness found after {outcome.explored} steps\n{describe(outcome.certificate)}'
    elif outcome.status is SearchStatus.NONE:
        text = f'no witness (exhaustive, space {outcome.space_size})'
    else:
        text = f'unknown: deadline reached after {outcome.explored} steps'
    state.emit(SearchOutcomeSchema.from_domain(outcome), text, out)
    return {SearchStatus.FOUND: EXIT_OK, SearchStatus.NONE: EXIT_FALSE}.get(outcome.status, EXIT_UNKNOWN)


@cli.command('transform')
@click.option('--name', required=True, type=click.Choice(TRANSFORM_NAMES))
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option('--param', 'params', multiple=True, help='m, k, n, target or path_intersect.')
@click.pass_obj
@handled
def transform_command(state: CliState, name, in_path, out, params):
    """Run a transform on a certificate file."""
    c = read_certificate(in_path, None, {})
    result = run_transform(TransformService(state.settings, state.patterns), name, c, parse_params(params))
    state.emit(CertificateSchema.from_domain(result), describe(result), out)


@cli.command('canonical')
@click.option('--kind', required=True)
@click.option('--shape', default=None)
@click.option('--dims', default=None)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def canonical_command(state: CliState, kind, shape, dims, out):
    """Write a standard witness."""
    c = state.patterns.canonical_witness(PatternKind.parse(kind), TreeShape.parse(shape) if shape else None,
                                         parse_dims(dims) if dims else None)
    state.emit(CertificateSchema.from_domain(c), describe(c), out)


@cli.command('fuzz')
@click.option('--suite', type=click.Choice(('all',) + FuzzService.SUITES), default='all', show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--iterations', type=click.IntRange(min=0), default=50, show_default=True)
@click.pass_obj
@handled
def fuzz_command(state: CliState, suite, seed, iterations):
    """Run the property suites; a failing suite prints its seed for replay."""
    service = FuzzService(state.settings)
    reports = service.run_all(seed, iterations) if suite == 'all' else [service.run(suite, seed, iterations)]
    payload = [
        {'suite': r.suite, 'seed': r.seed, 'cases': r.cases, 'ok': r.ok, 'failures': r.failures, 'notes': r.notes}
        for r in reports
    ]
    lines = []
    for r in reports:
        lines.append(f"{r.suite}: {r.cases} cases, {'ok' if r.ok else f'{len(r.failures)} failures (seed {r.seed})'}")
        lines += [f'  {f}' for f in r.failures[:10]]
    state.emit(payload, '\n'.join(lines))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FALSE


@cli.command('serve')
def serve_command():
    """Run the HTTP service."""
    from main import main
    main()


# ---------------------------------------------------------------- pfc


@cli.group('pfc')
def pfc_group():
    """Parametrized amalgamation constructions."""


def _structure(path: Path):
    return PfcStructureSchema.model_validate(load_json(path)).to_domain()


@pfc_group.command('amalgamate')
@click.option('--base', required=True, help='graph or equivalence.')
@click.option('--common', 'common_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--left', 'left_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--right', 'right_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def pfc_amalgamate_command(state: CliState, base, common_path, left_path, right_path, out):
    """Strong amalgam of two extensions of a common part."""
    amalgam = pfc_amalgamate(get_oracle(base), _structure(common_path), _structure(left_path), _structure(right_path))
    payload = {
        'structure': PfcStructureSchema.from_domain(amalgam.structure).model_dump(),
        'left_objects': dict(amalgam.left_objects),
        'right_objects': dict(amalgam.right_objects),
        'right_parameters': dict(amalgam.right_parameters),
    }
    s = amalgam.structure
    state.emit(payload, f'amalgam: {len(s.objects)} objects, {len(s.parameters)} parameters', out)


@pfc_group.command('check')
@click.option('--base', required=True)
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_obj
@handled
def pfc_check_command(state: CliState, base, in_path):
    """Membership of a parametrized structure in the class over a base."""
    member = in_class(_structure(in_path), get_oracle(base))
    state.emit({'member': member}, 'member' if member else 'not a member')
    return EXIT_OK if member else EXIT_FALSE


@pfc_group.command('cover')
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--class-size', type=click.IntRange(min=1), required=True)
@click.option('--relation', default='E', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def pfc_cover_command(state: CliState, in_path, class_size, relation, out):
    """Imaginary cover with classes of a given size."""
    m = FinRelStructureSchema.model_validate(load_json(in_path)).to_domain()
    cover = imaginary_cover(m, class_size, relation)
    state.emit(FinRelStructureSchema.from_domain(cover), f'cover with {len(cover.universe)} elements', out)


@pfc_group.command('tp2-demo')
@click.option('--rows', type=click.IntRange(min=0), required=True)
@click.option('--cols', type=click.IntRange(min=1), required=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def pfc_tp2_demo_command(state: CliState, rows, cols, out):
    """TP2 array read off an amalgam of equivalence relations."""
    c, structure = PfcService(state.settings, state.patterns).tp2_demo(rows, cols)
    payload = {
        'certificate': CertificateSchema.from_domain(c).model_dump(),
        'structure': PfcStructureSchema.from_domain(structure).model_dump(),
    }
    state.emit(payload, describe(c), out)
    return EXIT_OK if c.ok else EXIT_FALSE


@pfc_group.command('pasting1')
@click.option('--base', default=None)
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='{parameters, shared, fragments: [{c, d, new}]}')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def pfc_pasting1_command(state: CliState, base, in_path, out):
    """Paste one new object over several parameters."""
    data = require_keys(load_json(in_path), 'parameters')
    fragments = []
    for f in data.get('fragments', []):
        require_keys(f, 'c', 'd', 'new')
        fragments.append((FinRelStructureSchema.model_validate(f['c']).to_domain(),
                          FinRelStructureSchema.model_validate(f['d']).to_domain(),
                          f['new']))
    result = pasting1_build(data['parameters'], data.get('shared', []), fragments,
                            base=get_oracle(base) if base else None)
    state.emit(PfcStructureSchema.from_domain(result), f'pasted {len(result.parameters)} parameters', out)


@pfc_group.command('pasting2')
@click.option('--base', required=True)
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='{structure, a, b, c, b0, b1, name?}')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
@handled
def pfc_pasting2_command(state: CliState, base, in_path, out):
    """Add a parameter agreeing with two given ones on two object sets."""
    data = require_keys(load_json(in_path), 'structure', 'b0', 'b1')
    m = PfcStructureSchema.model_validate(data['structure']).to_domain()
    result, new = pasting2_build(get_oracle(base), m, data.get('a', []), data.get('b', []), data.get('c', []),
                                 data['b0'], data['b1'], data.get('name', 'b*'))
    state.emit({'structure': PfcStructureSchema.from_domain(result).model_dump(), 'new': new},
               f"added parameter '{new}'", out)


def main():
    cli(prog_name=app_settings.name)


if __name__ == '__main__':
    main()
