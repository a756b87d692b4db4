"""Command-line entry point.

Conventions: machine-readable output (TSV, JSON) goes to stdout, human
summaries to stderr, so subcommands compose in pipelines. Exit codes: 0 on
success, 1 on usage errors, 2 on data errors (with diagnostics naming the
file and line). Subsampling demands an explicit --seed; without --sample the
full filtered output is written and no randomness is involved.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .annotation import SessionStore, export_annotations
from .core import (
    RETRANSLATION,
    SentencePair,
    TokenSeq,
    load_stream_logs,
    read_stream_logs,
    serialize_stream_log,
)
from .corpus import Corpus, dataset_stats, filter_paths, load_parallel, score_paths
from .errors import MonostreamError
from .latency_stability import (
    al,
    delays_from_log,
    delays_from_trace,
    ne,
    trace_from_log,
    validate_log,
    waitk_path,
)
from .quality import bleu_stream, corpus_bleu, drop_rate, norm_score

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _open_logs(path: str | None):
    if path is None or path == "-":
        return read_stream_logs(sys.stdin, source="<stdin>")
    return iter(load_stream_logs(path))


def _read_token_lines(path) -> list[TokenSeq]:
    with open(path, encoding="utf-8") as fh:
        return [TokenSeq(line.split()) for line in fh]


def _emit(tsv_rows, summary: dict, out_path: str | None) -> None:
    """TSV to --out (or stdout), summary JSON to stdout (or stderr)."""
    text = "".join(f"{a}\t{b}\n" for a, b in tsv_rows)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(json.dumps(summary, ensure_ascii=False, sort_keys=True))
    else:
        sys.stdout.write(text)
        print(json.dumps(summary, ensure_ascii=False, sort_keys=True), file=sys.stderr)


def _cmd_aa(args) -> int:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            summary = score_paths(args.src, args.tgt, args.align, fh, backend=args.backend)
        print(json.dumps(summary, ensure_ascii=False, sort_keys=True))
    else:
        summary = score_paths(args.src, args.tgt, args.align, sys.stdout, backend=args.backend)
        print(json.dumps(summary, ensure_ascii=False, sort_keys=True), file=sys.stderr)
    return 0


def _cmd_filter(args) -> int:
    stats = filter_paths(
        args.src,
        args.tgt,
        args.align,
        args.out_prefix,
        threshold=args.threshold,
        sample_size=args.sample,
        seed=args.seed,
        backend=args.backend,
    )
    payload = json.dumps(stats.to_dict(), ensure_ascii=False, sort_keys=True)
    with open(f"{args.out_prefix}.stats.json", "w", encoding="utf-8") as fh:
        fh.write(payload + "\n")
    print(payload)
    print(
        f"kept {stats.kept}/{stats.total} pairs "
        f"({stats.unscoreable} unscoreable) at threshold {stats.threshold}",
        file=sys.stderr,
    )
    return 0


def _cmd_stats(args) -> int:
    if args.align and not args.tgt:
        raise MonostreamError("--align requires --tgt (alignment bounds need target lengths)")
    if args.tgt:
        corpus, alignments = load_parallel(args.src, args.tgt, args.align)
    else:
        pairs = tuple(
            SentencePair(f"line-{i}", tokens, TokenSeq())
            for i, tokens in enumerate(_read_token_lines(args.src), start=1)
        )
        corpus, alignments = Corpus(pairs, {"source": args.src}), None
    logs = load_stream_logs(args.logs) if args.logs else None
    inputs = {"source": args.src}
    if args.tgt:
        inputs["target"] = args.tgt
    if args.align:
        inputs["alignment"] = args.align
    if args.logs:
        inputs["logs"] = args.logs
    report = dataset_stats(corpus, alignments, logs, inputs=inputs)
    print(report.to_json())
    return 0


def _metric_over_logs(args, metric: str) -> int:
    rows = []
    values: list[Fraction] = []
    for log in _open_logs(args.logs):
        if metric == "AL":
            if log.mode == RETRANSLATION:
                if not args.retrans:
                    raise MonostreamError(
                        f"log {log.id!r} is retranslation mode; pass --retrans for stabilization-based AL"
                    )
                value = al(delays_from_trace(trace_from_log(log)))
            else:
                value = al(delays_from_log(log))
        else:
            value = ne(trace_from_log(log))
        values.append(value)
        rows.append((log.id, str(float(value))))
    if not values:
        raise MonostreamError("no logs in input")
    mean = sum(values) / len(values)
    parameters: dict = {"logs": args.logs or "<stdin>"}
    if metric == "AL":
        parameters["retranslation_extension"] = bool(args.retrans)
    summary = {
        "metric": metric,
        "mean": float(mean),
        "count": len(values),
        "parameters": parameters,
    }
    _emit(rows, summary, args.out)
    return 0


def _bleu_payload(score) -> dict:
    return {
        "score": round(score.score, 4),
        "precisions": [round(p, 6) for p in score.precisions],
        "brevity_penalty": round(score.brevity_penalty, 6),
        "hyp_len": score.hyp_len,
        "ref_len": score.ref_len,
    }


def _cmd_bleu(args) -> int:
    hyps = _read_token_lines(args.hyp)
    refs = _read_token_lines(args.ref)
    score = corpus_bleu(hyps, refs, smoothing=args.smoothing)
    print(json.dumps(_bleu_payload(score), ensure_ascii=False, sort_keys=True))
    print(score.format(), file=sys.stderr)
    return 0


def _cmd_norm(args) -> int:
    print(str(norm_score(args.score, args.base)))
    return 0


def _cmd_drop(args) -> int:
    print(f"{drop_rate(args.high, args.low):.1f}%")
    return 0


def _cmd_bleu_stream(args) -> int:
    score = bleu_stream(
        load_stream_logs(args.system),
        load_stream_logs(args.reference),
        smoothing=args.smoothing,
    )
    print(json.dumps(_bleu_payload(score), ensure_ascii=False, sort_keys=True))
    print(score.format(), file=sys.stderr)
    return 0


def _cmd_waitk_path(args) -> int:
    log = waitk_path(args.src_len, args.tgt_len, args.k, log_id=args.id)
    print(serialize_stream_log(log))
    return 0


def _cmd_validate_log(args) -> int:
    sources = _read_token_lines(args.src) if args.src else None
    total = 0
    bad = 0
    for idx, log in enumerate(_open_logs(args.logs)):
        total += 1
        source = None
        if sources is not None:
            if idx >= len(sources):
                raise MonostreamError(
                    f"{args.logs or '<stdin>'} has more logs than {args.src} has lines"
                )
            source = sources[idx]
        violations = validate_log(log, source)
        if violations:
            bad += 1
            for violation in violations:
                print(f"{log.id}\t{violation}")
    print(f"{total} logs checked, {bad} with violations", file=sys.stderr)
    return DATA_ERROR if bad else 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(journal_dir=args.journal_dir, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_export(args) -> int:
    store = SessionStore.load(args.journal_dir)
    references, logs = export_annotations(store.sessions_in_order())
    ref_path = Path(f"{args.out_prefix}.ref.txt")
    log_path = Path(f"{args.out_prefix}.logs.jsonl")
    ref_path.write_text("".join(line + "\n" for line in references), encoding="utf-8")
    log_path.write_text(
        "".join(serialize_stream_log(log) + "\n" for log in logs), encoding="utf-8"
    )
    print(
        json.dumps(
            {"sessions": len(logs), "references": str(ref_path), "logs": str(log_path)},
            sort_keys=True,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monostream", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("aa", help="score per-pair average anticipation over a corpus")
    p.add_argument("--src", required=True, help="source sentences, one per line")
    p.add_argument("--tgt", required=True, help="target sentences, one per line")
    p.add_argument("--align", required=True, help="Pharaoh alignments, one line per pair")
    p.add_argument("--out", help="write the id/value TSV here instead of stdout")
    p.add_argument("--backend", choices=["numba", "numpy"], help="force a scoring backend")
    p.set_defaults(fn=_cmd_aa)

    p = sub.add_parser("filter", help="extract the monotonic subset of a corpus")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--align", required=True)
    p.add_argument("--out-prefix", required=True, help="writes <prefix>.kept.{src,tgt} and <prefix>.stats.json")
    p.add_argument("--threshold", type=float, default=0.0, help="keep pairs with score <= this (default 0)")
    p.add_argument("--sample", type=int, help="subsample the kept pairs to this count")
    p.add_argument("--seed", type=int, help="RNG seed, required with --sample")
    p.add_argument("--backend", choices=["numba", "numpy"])
    p.set_defaults(fn=_cmd_filter)

    p = sub.add_parser("stats", help="dataset statistics (lengths, anticipation, lagging)")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt")
    p.add_argument("--align")
    p.add_argument("--logs", help="annotation stream logs (JSONL)")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("al", help="average lagging per stream log")
    p.add_argument("--logs", help="JSONL stream logs; default stdin")
    p.add_argument("--out", help="write the TSV here; summary JSON then goes to stdout")
    p.add_argument("--retrans", action="store_true", help="allow retranslation logs via the stabilization extension")
    p.set_defaults(fn=lambda args: _metric_over_logs(args, "AL"))

    p = sub.add_parser("ne", help="normalized erasure per retranslation log")
    p.add_argument("--logs", help="JSONL stream logs; default stdin")
    p.add_argument("--out")
    p.set_defaults(fn=lambda args: _metric_over_logs(args, "NE"), retrans=False)

    p = sub.add_parser("bleu", help="corpus BLEU of pre-tokenized files")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--smoothing", choices=["exp", "none"], default="exp")
    p.set_defaults(fn=_cmd_bleu)

    p = sub.add_parser("norm", help="score normalized by a full-sentence baseline")
    p.add_argument("--score", type=float, required=True)
    p.add_argument("--base", type=float, required=True)
    p.set_defaults(fn=_cmd_norm)

    p = sub.add_parser("drop", help="relative quality drop between two scores")
    p.add_argument("--high", type=float, required=True)
    p.add_argument("--low", type=float, required=True)
    p.set_defaults(fn=_cmd_drop)

    p = sub.add_parser("bleu-stream", help="BLEU over prefix-matched partial outputs")
    p.add_argument("--system", required=True, help="system stream logs (JSONL)")
    p.add_argument("--reference", required=True, help="annotation stream logs (JSONL)")
    p.add_argument("--smoothing", choices=["exp", "none"], default="exp")
    p.set_defaults(fn=_cmd_bleu_stream)

    p = sub.add_parser("waitk-path", help="emit the canonical fixed-latency schedule")
    p.add_argument("--src-len", type=int, required=True)
    p.add_argument("--tgt-len", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--id", help="log id (defaults to a descriptive one)")
    p.set_defaults(fn=_cmd_waitk_path)

    p = sub.add_parser("validate-log", help="check logs against the annotation protocol")
    p.add_argument("--logs", help="JSONL stream logs; default stdin")
    p.add_argument("--src", help="source sentences to check reads against, one per log")
    p.set_defaults(fn=_cmd_validate_log)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--journal-dir", help="event journal directory (or $MONOSTREAM_JOURNAL_DIR)")
    p.add_argument("--static-dir", help="serve these UI assets at /")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("export", help="write annotation references and logs from a journal")
    p.add_argument("--journal-dir", required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(fn=_cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sample", None) is not None and args.seed is None:
        parser.error("--sample requires an explicit --seed")
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 0
    except (MonostreamError, ValueError, OSError) as exc:
        print(f"monostream: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
