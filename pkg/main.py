"""
Gödel Temporal Logic Toolkit
Command-line front end for formula parsing, model checking, validity
checking, proof checking and characteristic formulas
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

# Add current directory to Python path
sys.path.append(str(Path(__file__).parent))

from config import Config
from birel_semantics import extension, load_birel_model, model_to_quasimodel
from calculus import check_proof, load_proof, mutate_line, mutations
from charform import char_laws, check_law
from decide import Verdict, decide
from formula import Formula, closure, parse
from labelled import load_quasimodel, quasimodel_to_dict, quotient, validate_quasimodel
from real_semantics import load_real_model, real_values
from utils import (GTLError, ModelError, Violation, error_handler, format_rational, load_text_file,
                   save_json_file, setup_logging)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


class GTLToolkit:
    """
    Ties the toolkit modules together for the command line
    """

    def __init__(self):
        self.config = Config()
        self._initialize_components()

    def _initialize_components(self):
        """Validate configuration before any command runs"""
        try:
            self.config.validate_config()
            logger.debug(f"Configuration: budget={self.config.SIGMA_BUDGET}, "
                         f"workers={self.config.MAX_WORKERS}, verify={self.config.VERIFY_WITNESS}")
        except Exception as e:
            logger.error(f"Error initializing toolkit: {e}")
            raise

    def evaluate_real(self, model_path: str, formula: Formula,
                      moment: Optional[str] = None) -> Dict[str, Any]:
        model = load_real_model(model_path)
        if moment is not None and moment not in model.flow.moments:
            raise ModelError('unknown-moment', f"{moment!r} is not a moment of the model")
        values = real_values(model, formula)
        shown = [moment] if moment is not None else list(model.flow.moments)
        return {
            'formula': str(formula),
            'values': {t: format_rational(values[t]) for t in shown},
            'globally_true': all(v == 1 for v in values.values()),
        }

    def check_birel(self, model_path: str, formula: Formula) -> Dict[str, Any]:
        model = load_birel_model(model_path)
        points = extension(model, formula)
        ordered = [[w, t] for w in model.worlds for t in model.flow.moments if (w, t) in points]
        return {
            'formula': str(formula),
            'extension': ordered,
            'globally_true': points == model.points,
        }

    def decide(self, formula: Formula, budget: Optional[int] = None,
               witness_path: Optional[str] = None) -> Verdict:
        verdict = decide(formula, budget=budget)
        if witness_path and verdict.witness is not None:
            save_json_file(quasimodel_to_dict(verdict.witness), witness_path)
        return verdict

    def check_proofs(self, paths: Sequence[str], mutate: bool = False) -> List[Dict[str, Any]]:
        reports = []
        for path in paths:
            proof = load_proof(path)
            issue = check_proof(proof)
            report: Dict[str, Any] = {'path': path, 'ok': issue is None,
                                      'issue': None if issue is None else issue.to_dict(),
                                      'message': 'ok' if issue is None else str(issue)}
            if mutate and issue is None:
                report['mutations'] = self._mutation_self_test(proof)
            reports.append(report)
        return reports

    def _mutation_self_test(self, proof) -> Dict[str, Any]:
        """Every single-connective change to a correct proof must be rejected"""
        rejected, accepted = 0, []
        for k, line in enumerate(proof.lines, start=1):
            for f in mutations(line.formula):
                if check_proof(mutate_line(proof, k, f)) is None:
                    accepted.append({'line': k, 'formula': str(f)})
                else:
                    rejected += 1
        return {'rejected': rejected, 'accepted': accepted}

    def quotient_model(self, model_path: str, formula: Formula,
                       output: Optional[str] = None) -> Dict[str, Any]:
        model = load_birel_model(model_path)
        system = model_to_quasimodel(model, closure(formula))
        q = quotient(system)
        violation = validate_quasimodel(q)
        data = quasimodel_to_dict(q)
        if output:
            save_json_file(data, output)
        return {
            'worlds': len(q.worlds),
            'height': q.height(),
            'violation': None if violation is None else violation.to_dict(),
            'message': 'ok' if violation is None else str(violation),
            'quasimodel': data,
        }

    def validate_quasimodel_file(self, path: str) -> Optional[Violation]:
        return validate_quasimodel(load_quasimodel(path))

    def characteristic_laws(self, formula: Formula, check: bool = False,
                            successor: bool = False) -> List[Dict[str, Any]]:
        laws = char_laws(closure(formula), successor_laws=successor)
        reports = []
        for law in laws:
            report: Dict[str, Any] = {'law': str(law)}
            if check:
                report['status'] = check_law(law).status
            reports.append(report)
        return reports


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------

def _emit(args, report: Any, lines: Sequence[str]) -> None:
    if args.format == 'json':
        print(json.dumps(report, indent=2, default=str))
    else:
        for line in lines:
            print(line)


def _yes_no(flag: bool) -> str:
    return 'yes' if flag else 'no'


def _formula(args) -> Formula:
    """The inline formula, or the one in --file when none is given inline"""
    if args.formula is not None:
        if args.file is not None:
            logger.warning(f"Ignoring --file {args.file}; an inline formula was given")
        return parse(args.formula)
    if args.file is not None:
        return parse(load_text_file(args.file))
    raise GTLError(f"{args.command} needs a formula or --file")


@error_handler()
def cmd_parse(toolkit: GTLToolkit, args) -> int:
    f = parse(args.formula)
    _emit(args, {'formula': str(f), 'sigma': closure(f).to_strings()}, [str(f)])
    return EXIT_OK


@error_handler()
def cmd_eval_real(toolkit: GTLToolkit, args) -> int:
    report = toolkit.evaluate_real(args.model, _formula(args), args.moment)
    lines = [f"{t} {v}" for t, v in report['values'].items()]
    lines.append(f"globally-true {_yes_no(report['globally_true'])}")
    _emit(args, report, lines)
    return EXIT_OK if report['globally_true'] else EXIT_FAILED


@error_handler()
def cmd_check_birel(toolkit: GTLToolkit, args) -> int:
    report = toolkit.check_birel(args.model, _formula(args))
    lines = [f"{w} {t}" for w, t in report['extension']]
    lines.append(f"globally-true {_yes_no(report['globally_true'])}")
    _emit(args, report, lines)
    return EXIT_OK if report['globally_true'] else EXIT_FAILED


@error_handler()
def cmd_decide(toolkit: GTLToolkit, args) -> int:
    verdict = toolkit.decide(_formula(args), budget=args.budget, witness_path=args.witness)
    stats = verdict.stats
    lines = [verdict.status,
             f"time={stats.elapsed:.3f} worlds={stats.worlds} moments={stats.moments} rounds={stats.rounds}"]
    _emit(args, verdict.to_dict(include_witness=args.format == 'json'), lines)
    return EXIT_OK if verdict.valid else EXIT_FAILED


@error_handler()
def cmd_check_proof(toolkit: GTLToolkit, args) -> int:
    reports = toolkit.check_proofs(args.paths, mutate=args.mutate)
    lines = []
    failed = False
    for report in reports:
        prefix = f"{report['path']}: " if len(reports) > 1 else ''
        lines.append(prefix + report['message'])
        failed = failed or not report['ok']
        if 'mutations' in report:
            accepted = report['mutations']['accepted']
            lines.append(f"{prefix}mutations rejected={report['mutations']['rejected']} "
                         f"accepted={len(accepted)}")
            for item in accepted:
                lines.append(f"{prefix}accepted mutation line {item['line']}: {item['formula']}")
            failed = failed or bool(accepted)
    _emit(args, reports, lines)
    return EXIT_FAILED if failed else EXIT_OK


@error_handler()
def cmd_quotient(toolkit: GTLToolkit, args) -> int:
    report = toolkit.quotient_model(args.model, _formula(args), args.output)
    if args.format == 'text' and not args.output:
        # without --output the quasimodel itself is the report
        print(json.dumps(report['quasimodel'], indent=2, default=str))
    else:
        _emit(args, report, [f"worlds={report['worlds']} height={report['height']}", report['message']])
    return EXIT_OK if report['violation'] is None else EXIT_FAILED


@error_handler()
def cmd_validate_qm(toolkit: GTLToolkit, args) -> int:
    violation = toolkit.validate_quasimodel_file(args.path)
    report = {'ok': violation is None, 'violation': None if violation is None else violation.to_dict()}
    _emit(args, report, ['ok' if violation is None else str(violation)])
    return EXIT_OK if violation is None else EXIT_FAILED


@error_handler()
def cmd_charform(toolkit: GTLToolkit, args) -> int:
    reports = toolkit.characteristic_laws(_formula(args), check=args.check,
                                          successor=args.successor)
    if args.check:
        lines = [f"{r['status']} {r['law']}" for r in reports]
    else:
        lines = [r['law'] for r in reports]
    _emit(args, reports, lines)
    failed = any(r.get('status') == 'falsifiable' for r in reports)
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    'parse': cmd_parse,
    'eval-real': cmd_eval_real,
    'check-birel': cmd_check_birel,
    'decide': cmd_decide,
    'check-proof': cmd_check_proof,
    'quotient': cmd_quotient,
    'validate-qm': cmd_validate_qm,
    'charform': cmd_charform,
}


def _add_formula_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument('formula', nargs='?', help='Formula (takes precedence over --file)')
    p.add_argument('--file', type=str, help='Read the formula from a file')


def create_argument_parser():
    """Create command line argument parser"""
    parser = argparse.ArgumentParser(
        description='Gödel Temporal Logic Toolkit',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Canonical form of a formula
  python main.py parse "p & q => X p"

  # Decide validity, saving a countermodel if there is one
  python main.py decide "(p => q) | (q => p)"
  python main.py decide "F p => p" --witness witness.json

  # Evaluate in models
  python main.py eval-real model.json "p | !p"
  python main.py check-birel birel.json "G p => p"

  # Check proofs and their mutations
  python main.py check-proof proofs/*.json --mutate

  # Quotient a model and validate the result
  python main.py quotient birel.json "F p" --output qm.json
  python main.py validate-qm qm.json

  # Characteristic formula laws, checked for validity
  python main.py charform p --check
        """
    )
    parser.add_argument('--format', '-f', choices=Config.OUTPUT_FORMATS, default=Config.OUTPUT_FORMAT,
                        help=f'Report format (default: {Config.OUTPUT_FORMAT})')
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='Enable verbose logging')

    # Same options after the subcommand; SUPPRESS keeps the top-level value when absent
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', '-f', choices=Config.OUTPUT_FORMATS, default=argparse.SUPPRESS,
                        help='Report format')
    common.add_argument('--verbose', '-v', action='store_true', default=argparse.SUPPRESS,
                        help='Enable verbose logging')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', parents=[common], help='Print the canonical form of a formula')
    p.add_argument('formula')

    p = sub.add_parser('eval-real', parents=[common], help='Evaluate a formula in a real-valued model')
    p.add_argument('model', help='Real model JSON file')
    _add_formula_arguments(p)
    p.add_argument('--moment', '-m', type=str, help='Only report this moment')

    p = sub.add_parser('check-birel', parents=[common],
                       help='Truth set of a formula in a bi-relational model')
    p.add_argument('model', help='Bi-relational model JSON file')
    _add_formula_arguments(p)

    p = sub.add_parser('decide', parents=[common], help='Decide validity of a formula')
    _add_formula_arguments(p)
    p.add_argument('--budget', '-b', type=int, default=None,
                   help=f'Largest closure size accepted (default: {Config.SIGMA_BUDGET})')
    p.add_argument('--witness', '-w', type=str, help='Write the falsifying quasimodel to this path')

    p = sub.add_parser('check-proof', parents=[common], help='Check proof files')
    p.add_argument('paths', nargs='+')
    p.add_argument('--mutate', action='store_true',
                   help='Also check that every single-connective mutation is rejected')

    p = sub.add_parser('quotient', parents=[common],
                       help='Quotient a bi-relational model over the closure of a formula')
    p.add_argument('model', help='Bi-relational model JSON file')
    _add_formula_arguments(p)
    p.add_argument('--output', '-o', type=str, help='Write the quasimodel JSON to this path')

    p = sub.add_parser('validate-qm', parents=[common], help='Validate a quasimodel file')
    p.add_argument('path')

    p = sub.add_parser('charform', parents=[common],
                       help='Characteristic formula laws over the closure of a formula')
    _add_formula_arguments(p)
    p.add_argument('--check', action='store_true', help='Decide every law')
    p.add_argument('--successor', action='store_true', help='Include the one-step successor laws')

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point"""
    parser = create_argument_parser()
    args = parser.parse_args(argv)

    setup_logging('DEBUG' if args.verbose else Config.LOG_LEVEL)

    try:
        toolkit = GTLToolkit()
    except Exception as e:
        logger.error(f"Application error: {e}")
        return EXIT_ERROR

    return COMMANDS[args.command](toolkit, args)


if __name__ == "__main__":
    sys.exit(main())
