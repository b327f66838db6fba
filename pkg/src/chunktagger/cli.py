"""Command-line surface: train, tag, eval, xval, curve, inspect, serve.

POS-tagged input for `tag` is one sentence per line, ``form/POS`` tokens.
Span files for interactive mode carry one line per sentence with
whitespace-separated ``start-end`` pairs (0-based, half-open); an empty
line means no spans.  Exit codes: 2 usage, 3 data error, 4 infeasible
decode (strict unknown-POS policy included).
"""

from __future__ import annotations

import argparse
import os
import sys

from .corpus import (
    CorpusFormatError,
    Token,
    parse_bracketed,
    serialize_sentence,
)
from .chunker import (
    BoundarySpec,
    ChunkerConfig,
    tag_interactive,
    tag_standalone,
    train,
)
from .encoding import DEPTH2_RELATIONS, RELATIONS, EncodingScheme
from .evaluation import cross_validate, learning_curve, score
from .model import (
    InfeasibleConstraintError,
    ModelError,
    UnknownPosError,
    load_model,
    save_model,
)

USAGE_ERROR = 2
DATA_ERROR = 3
INFEASIBLE = 4


def _default_seed() -> int:
    try:
        return int(os.environ.get("CHUNKTAGGER_SEED", "0"))
    except ValueError:
        return 0


def _add_scheme_flags(p: argparse.ArgumentParser):
    p.add_argument("--dims", default="rtcg", help="tag dimensions, subset of rtcg")
    p.add_argument("--depth", type=int, default=3, choices=(2, 3))
    p.add_argument("--coord-labels", default=None,
                   help="whitespace-separated coordination labels (default: C* prefix rule)")


def _add_config_flags(p: argparse.ArgumentParser):
    _add_scheme_flags(p)
    p.add_argument("--order", type=int, default=3, choices=(1, 2, 3))
    p.add_argument("--mode", default="standalone", choices=("standalone", "interactive"))
    p.add_argument("--no-attach", action="store_true",
                   help="strip postnominal PP / focus-adverb attachments (STRIPPED regime)")
    p.add_argument("--focus-adverb-pos", default="",
                   help="POS tags treated as focus adverbs when stripping")
    strictness = p.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true",
                            help="reject over-deep sentences")
    strictness.add_argument("--lenient", dest="strict", action="store_false",
                            help="flatten over-deep sentences (default)")
    p.set_defaults(strict=False)
    p.add_argument("--unknown", default="unk", choices=("unk", "uniform", "strict"),
                   help="unknown-POS policy at decode time")
    p.add_argument("--seed", type=int, default=_default_seed())


def _scheme(args) -> EncodingScheme:
    coord = frozenset(args.coord_labels.split()) if args.coord_labels else None
    return EncodingScheme(dims=args.dims, depth=args.depth, coord_labels=coord)


def _config(args) -> ChunkerConfig:
    return ChunkerConfig(
        scheme=_scheme(args),
        mode=args.mode,
        attachment="stripped" if args.no_attach else "full",
        unknown_pos_policy=args.unknown,
        order=args.order,
        strict_depth=args.strict,
        focus_adverb_pos=frozenset(args.focus_adverb_pos.split()),
    )


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_text(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _parse_pos_line(line: str, lineno: int):
    tokens = []
    for atom in line.split():
        form, sep, pos = atom.rpartition("/")
        if not sep or not form or not pos:
            raise CorpusFormatError(
                "line %d: %r is not form/POS" % (lineno, atom)
            )
        tokens.append(Token(form, pos))
    return tokens


def _parse_span_line(line: str, lineno: int) -> BoundarySpec:
    spans = []
    for atom in line.split():
        try:
            start, end = atom.split("-")
            spans.append((int(start), int(end)))
        except ValueError:
            raise CorpusFormatError(
                "line %d: %r is not start-end" % (lineno, atom)
            )
    try:
        return BoundarySpec(tuple(spans))
    except ValueError as exc:
        raise CorpusFormatError("line %d: %s" % (lineno, exc))


def cmd_train(args) -> int:
    config = _config(args)
    tb = parse_bracketed(_read_text(args.infile), strict=args.strict)
    model = train(tb, config)
    save_model(model, args.out)
    print(
        "trained %s: %d sentences, %d tags, lambda=(%.4f, %.4f, %.4f), seed=%d"
        % (
            args.out,
            len(tb.sentences),
            len(model.alphabet),
            model.weights.l1,
            model.weights.l2,
            model.weights.l3,
            args.seed,
        )
    )
    if tb.flatten_warnings:
        print("warning: flattened %d over-deep nodes" % tb.flatten_warnings)
    return 0


def cmd_tag(args) -> int:
    model = load_model(args.model)
    lines = _read_text(args.infile).splitlines()
    span_lines = None
    if args.mode == "interactive":
        if not args.spans:
            raise CorpusFormatError("interactive mode requires --spans")
        span_lines = _read_text(args.spans).splitlines()
    out = []
    repairs = 0
    sent_no = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _parse_pos_line(line, lineno)
        if args.mode == "interactive":
            if sent_no >= len(span_lines):
                raise CorpusFormatError(
                    "span file has fewer lines than input sentences"
                )
            boundaries = _parse_span_line(span_lines[sent_no], sent_no + 1)
            boundaries.check_range(len(tokens))
            result = tag_interactive(model, tokens, boundaries, args.unknown)
        else:
            result = tag_standalone(model, tokens, args.unknown)
        repairs += result.repairs
        out.append(serialize_sentence(result.sentence))
        sent_no += 1
    _write_text(args.out, "\n".join(out))
    if repairs:
        print("note: %d decoder repairs" % repairs, file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    scheme = _scheme(args)
    gold = parse_bracketed(_read_text(args.gold), strict=False)
    pred = parse_bracketed(_read_text(args.pred), strict=False)
    report = score(gold, pred, scheme)
    _write_text(args.out, report.render_text() + "\n\n" + report.render_machine())
    return 0


def cmd_xval(args) -> int:
    config = _config(args)
    tb = parse_bracketed(_read_text(args.infile), strict=args.strict)
    result = cross_validate(tb, config, folds=args.folds, seed=args.seed)
    lines = [
        "cross-validation: %d folds, seed=%d, dims=%s, depth=%d, mode=%s"
        % (args.folds, args.seed, args.dims, args.depth, args.mode),
        result.mean.render_text(),
        "",
        result.mean.render_machine(),
    ]
    if args.per_fold:
        for i, fold in enumerate(result.folds):
            lines.append("")
            lines.append("fold %d" % i)
            lines.append(fold.render_text())
    _write_text(args.out, "\n".join(lines))
    return 0


def cmd_curve(args) -> int:
    config = _config(args)
    tb = parse_bracketed(_read_text(args.infile), strict=args.strict)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    curve = learning_curve(tb, config, sizes, seed=args.seed)
    lines = ["# training-sentences  top-level-chunk-precision  (seed=%d)" % args.seed]
    for size in sorted(curve):
        lines.append("%d\t%.4f" % (size, curve[size]))
    _write_text(args.out, "\n".join(lines))
    return 0


def cmd_inspect(args) -> int:
    model = load_model(args.model)
    w = model.weights
    rels = RELATIONS if model.scheme.depth == 3 else DEPTH2_RELATIONS
    by_pos = {}
    pos_tokens = {}
    for (tag_id, pos), n in model.counts.emission.items():
        by_pos.setdefault(pos, set()).add(tag_id)
        pos_tokens[pos] = pos_tokens.get(pos, 0) + n
    total = sum(pos_tokens.values())
    ambiguity = (
        sum(len(by_pos[p]) * n for p, n in pos_tokens.items()) / total if total else 0.0
    )
    print("model file:     %s" % args.model)
    print("dims:           %s" % model.scheme.dims)
    print("depth:          %d (relations: %s)" % (model.scheme.depth, " ".join(rels)))
    print("order:          %d" % model.order)
    print("tagset size:    %d" % len(model.alphabet))
    print("tags per word:  %.1f" % ambiguity)
    print("POS alphabet:   %d" % len(model.pos_alphabet))
    print("lambda:         %.6f %.6f %.6f" % (w.l1, w.l2, w.l3))
    print("training:       %d sentences, %d tokens"
          % (model.counts.n_sequences, model.counts.total - model.counts.n_sequences))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.model, unknown_pos_policy=args.unknown)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chunktagger",
        description="Stochastic partial parser over structural tags",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a bracketed corpus")
    _add_config_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="chunk POS-tagged text")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--mode", default="standalone", choices=("standalone", "interactive"))
    p.add_argument("--spans", default=None, help="span file for interactive mode")
    p.add_argument("--unknown", default="unk", choices=("unk", "uniform", "strict"))
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="score a predicted corpus against gold")
    _add_scheme_flags(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("xval", help="rotating 90/10 cross-validation")
    _add_config_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--per-fold", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_xval)

    p = sub.add_parser("curve", help="learning curve over training sizes")
    _add_config_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--sizes", required=True, help="comma-separated sentence counts")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("inspect", help="print model header and statistics")
    p.add_argument("model")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("serve", help="run the annotation HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--unknown", default="unk", choices=("unk", "uniform", "strict"))
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnknownPosError, InfeasibleConstraintError) as exc:
        print("chunktagger: infeasible decode: %s" % exc, file=sys.stderr)
        return INFEASIBLE
    except (CorpusFormatError, ModelError) as exc:
        print("chunktagger: %s" % exc, file=sys.stderr)
        return DATA_ERROR
    except FileNotFoundError as exc:
        print("chunktagger: %s" % exc, file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print("chunktagger: %s" % exc, file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
