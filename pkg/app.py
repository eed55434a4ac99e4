import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd

from families import tower, tower_formulas
from families.linear import gen_chi, gen_phi_m
from families.translators import translate_fo3_to_fo2, translate_fo_to_fo2
from logic.enumerator import enumerate_sentences, min_distinguishing_size
from logic.errors import (
    GuardExceeded,
    InvariantViolation,
    WorkbenchError,
)
from logic.evaluator import eval_fo, eval_mso
from logic.formula import Formula, Signature, size, uses_sets
from logic.guards import GuardConfig
from logic.structures import (
    parse_assignment,
    parse_interpretation,
    parse_string,
    parse_structure,
)
from logic.syntax import parse, print_formula
from utils.certify_service import CertifyService
from utils.report_service import EXPERIMENTS, ReportService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_INVARIANT = 4

SIGNATURE_SYMBOLS = ("<", "succ", "min", "max")


class UsageError(WorkbenchError, ValueError):
    """Argument de ligne de commande invalide"""


# ---------------------------------------------------------------- littéraux


def parse_signature(text: str) -> Signature:
    """'<,succ,min,max' ou un sous-ensemble contenant <"""
    symbols = {s.strip() for s in text.split(",") if s.strip()}
    unknown = symbols - set(SIGNATURE_SYMBOLS)
    if unknown or "<" not in symbols:
        raise UsageError(f"Signature invalide '{text}' (attendu <,succ,min,max)")
    return Signature(succ="succ" in symbols, min="min" in symbols, max="max" in symbols)


def parse_sets(text: Optional[str]) -> Dict[str, List[int]]:
    """'X=1,5,9;Y=' → {'X': [1, 5, 9], 'Y': []}"""
    sets: Dict[str, List[int]] = {}
    if not text:
        return sets
    for part in text.split(";"):
        name, sep, raw = part.partition("=")
        values = [v.strip() for v in raw.split(",") if v.strip()]
        if not sep or not name.strip() or not all(v.isdigit() for v in values):
            raise UsageError(f"Ensemble invalide: '{part}'")
        sets[name.strip()] = [int(v) for v in values]
    return sets


def parse_structure_argument(text: str):
    if text.strip().startswith("A:"):
        return parse_structure(text)
    return parse_string(text)


def guard_header(guards: GuardConfig) -> List[str]:
    return [f"# guard {key}={value}" for key, value in guards.as_dict().items()]


# ---------------------------------------------------------------- familles


def _ints(args: Sequence[str], count: int, family: str) -> List[int]:
    if len(args) != count or not all(a.isdigit() for a in args):
        raise UsageError(f"{family} attend {count} entier(s), reçu {list(args)}")
    return [int(a) for a in args]


def _letters(letters: Sequence[str]) -> str:
    return " ".join(letters)


def generate(family: str, args: Sequence[str]) -> str:
    """Texte produit par `gen FAMILLE ARGS`"""
    formulas: Dict[str, Callable[..., Formula]] = {
        "chi": lambda l: gen_chi(l),
        "chi-geq": lambda l: gen_chi(l, "at_least"),
        "phi-m": gen_phi_m,
        "equal": tower_formulas.gen_equal,
        "inc": tower_formulas.gen_inc,
        "vh-plus": tower_formulas.gen_vh_plus,
        "Phi": tower_formulas.gen_Phi,
        "Psi": tower_formulas.gen_Psi,
        "ok": tower_formulas.gen_ok,
        "max": tower_formulas.gen_max,
        "xi": tower_formulas.gen_xi,
    }
    if family in formulas:
        (n,) = _ints(args, 1, family)
        return print_formula(formulas[family](n))
    if family == "vh":
        (h,) = _ints(args, 1, family)
        return _letters(tower.build_vh_wh(h).v)
    if family == "wh":
        (h,) = _ints(args, 1, family)
        return _letters(tower.build_vh_wh(h).w)
    if family == "mu":
        h, n = _ints(args, 2, family)
        return _letters(tower.mu(h, n))
    raise UsageError(f"Famille inconnue: {family}")


GEN_FAMILIES = (
    "chi", "chi-geq", "phi-m", "vh", "wh", "mu", "equal", "inc",
    "vh-plus", "Phi", "Psi", "ok", "max", "xi",
)


# ---------------------------------------------------------------- sous-commandes


def cmd_eval(args, guards: GuardConfig) -> List[str]:
    formula = parse(args.formula)
    structure = parse_structure_argument(args.structure)
    if not uses_sets(formula):
        value = eval_fo(formula, structure, parse_assignment(args.assignment), guards=guards)
        return ["true" if value else "false"]
    mode, _, letter = args.mode.partition(":")
    if mode == "restricted" and not letter:
        raise UsageError("--mode restricted:LETTRE attendu")
    witness = parse_sets(args.sets) if mode == "witness" else None
    verdict = eval_mso(
        formula, structure, mode=mode, letter=letter or None, witness=witness, guards=guards
    )
    return [verdict.value]


def cmd_translate(args, guards: GuardConfig) -> List[str]:
    formula = parse(args.formula)
    translator = translate_fo3_to_fo2 if args.direction == "fo3-to-fo2" else translate_fo_to_fo2
    translation = translator(formula, guards)
    stab = translation.stabilization
    return [
        f"# source_size={translation.source_size}",
        f"# threshold D={stab.D} tail={'true' if stab.tail else 'false'}",
        f"# output_size={translation.output_size}",
        print_formula(translation.output),
    ]


def cmd_certify(args, guards: GuardConfig) -> List[str]:
    service = CertifyService(guards)
    df, message, dump = service.process_request(args.formula, args.A, args.B, args.dump_tree)
    lines = guard_header(guards) + message.splitlines()
    if not df.empty:
        lines.append(df.to_csv(index=False).rstrip("\n"))
    if dump is not None:
        lines.append(dump)
    return lines


def cmd_gen(args, guards: GuardConfig) -> List[str]:
    return [generate(args.family, args.args)]


def cmd_enumerate(args, guards: GuardConfig) -> List[str]:
    signature = parse_signature(args.sig)
    lines = guard_header(guards)
    rows = [
        {"taille": size(f), "formule": print_formula(f)}
        for f in enumerate_sentences(signature, args.width, args.max_size, guards)
    ]
    lines.append(pd.DataFrame(rows, columns=["taille", "formule"]).to_csv(index=False).rstrip("\n"))
    return lines


def cmd_min_size(args, guards: GuardConfig) -> List[str]:
    signature = parse_signature(args.sig)
    A = [parse_interpretation(t) for t in args.A]
    B = [parse_interpretation(t) for t in args.B]
    result = min_distinguishing_size(signature, args.width, A, B, args.cap, guards)
    lines = guard_header(guards)
    if result is None:
        lines.append("not_found")
    else:
        lines.append(f"size: {result.size}")
        lines.append(f"formula: {print_formula(result.formula)}")
    return lines


def cmd_report(args, guards: GuardConfig) -> List[str]:
    service = ReportService(guards)
    df, message = service.process_request(
        args.experiment,
        corpus_size=args.corpus_size,
        seed=args.seed,
        m_max=args.m_max,
        h_max=args.h_max,
        plot_path=args.plot,
    )
    if df.empty:
        raise InvariantViolation(message)
    lines = guard_header(guards)
    lines += [f"# fit {line}" for line in message.splitlines()]
    lines.append(df.to_csv(index=False).rstrip("\n"))
    return lines


# ---------------------------------------------------------------- analyseur


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fosuccinct",
        description="Atelier de concision FO/MSO sur les ordres linéaires et les mots",
    )
    parser.add_argument("--guard-scale", type=float, default=None, help="multiplie toutes les gardes")
    parser.add_argument("--config", default=None, help="fichier de configuration (.env)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="évalue une formule sur une structure")
    p.add_argument("formula")
    p.add_argument("structure", help="A:N ou lettres séparées par des espaces")
    p.add_argument("assignment", nargs="?", default=None, help="x=3,y=0,z=7")
    p.add_argument("--mode", default="exhaustive", help="exhaustive | restricted:LETTRE | witness")
    p.add_argument("--sets", default=None, help="X=1,5,9;Y=...")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("translate", help="traduit une phrase vers FO²")
    p.add_argument("direction", choices=["fo3-to-fo2", "fo-to-fo2"])
    p.add_argument("formula")
    p.set_defaults(handler=cmd_translate)

    p = sub.add_parser("certify", help="certificat de borne inférieure de taille")
    p.add_argument("formula")
    p.add_argument("--A", nargs="+", required=True, help="interprétations satisfaisantes")
    p.add_argument("--B", nargs="+", required=True, help="interprétations falsifiantes")
    p.add_argument("--dump-tree", action="store_true")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("gen", help="génère un membre d'une famille")
    p.add_argument("family", choices=GEN_FAMILIES)
    p.add_argument("args", nargs="*")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("enumerate", help="énumère les phrases FO^k par taille")
    p.add_argument("--sig", default="<,succ,min,max")
    p.add_argument("--width", type=int, default=3)
    p.add_argument("--max-size", type=int, required=True)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("min-size", help="taille minimale d'une phrase distinguante")
    p.add_argument("--A", nargs="+", required=True)
    p.add_argument("--B", nargs="+", required=True)
    p.add_argument("--sig", default="<,succ,min,max")
    p.add_argument("--width", type=int, default=3)
    p.add_argument("--cap", type=int, default=7)
    p.set_defaults(handler=cmd_min_size)

    p = sub.add_parser("succinct-report", help="tables de tailles des expériences")
    p.add_argument("--experiment", choices=EXPERIMENTS, required=True)
    p.add_argument("--corpus-size", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m-max", type=int, default=12)
    p.add_argument("--h-max", type=int, default=6)
    p.add_argument("--plot", default=None, help="fichier HTML plotly")
    p.set_defaults(handler=cmd_report)
    return parser


def _guards(args) -> GuardConfig:
    guards = GuardConfig.from_file(args.config) if args.config else GuardConfig.from_env()
    return guards.with_scale(args.guard_scale)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Exécute une sous-commande et retourne le code de sortie"""
    try:
        args = build_parser().parse_args(argv)
        guards = _guards(args)
        logger.info(f"Commande {args.command} (échelle des gardes {guards.scale})")
        for line in args.handler(args, guards):
            print(line)
        return EXIT_OK
    except SystemExit as e:
        # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    except GuardExceeded as e:
        logger.error(f"Garde dépassée: {e}")
        print(f"guard exceeded: {e.guard} requested={e.requested} limit={e.limit}", file=sys.stderr)
        return EXIT_GUARD
    except InvariantViolation as e:
        logger.error(f"Violation d'invariant: {e}")
        print(f"invariant violation: {e}", file=sys.stderr)
        if e.dump:
            print(e.dump, file=sys.stderr)
        return EXIT_INVARIANT
    except (WorkbenchError, ValueError) as e:
        logger.error(f"Erreur: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
