"""Command-line entry point exposing every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data error.  Machine-readable
results (JSON unless noted) go to standard output; diagnostics and
progress lines go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import align as align_mod
from . import net as net_mod
from .audio import parse_wav, resample_decimate, write_wav
from .errors import NotFound, VaaniError
from .features import DEFAULT_NUM_BANDS, DEFAULT_SHIFT, DEFAULT_WINDOW, FeatureConfig, extract_features
from .g2p import build_lexicon, format_lexicon, g2p, load_lexicon
from .modelio import ModelBundle, load_model, save_model
from .textnorm import load_abbrev_table, load_number_table, normalize_text
from .vad import DEFAULT_HANGOVER, DEFAULT_THRESHOLD, DEFAULT_WINDOW as VAD_WINDOW, VadConfig, detect_segments, gate_audio


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _emit(obj, sort_keys: bool = True) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False, sort_keys=sort_keys,
                                separators=(",", ":")) + "\n")


def _read_wav(path: str):
    with open(path, "rb") as fh:
        return parse_wav(fh.read())


# -- commands ---------------------------------------------------------------


def cmd_resample(args) -> int:
    buf = resample_decimate(_read_wav(args.infile), args.rate)
    with open(args.out, "wb") as fh:
        fh.write(write_wav(buf))
    _emit({"out": args.out, "rate": buf.sample_rate_hz, "samples": buf.num_frames})
    return 0


def cmd_vad(args) -> int:
    buf = _read_wav(args.infile)
    cfg = VadConfig(args.window, args.threshold, args.hangover)
    segments = detect_segments(buf, cfg)
    if args.gate:
        with open(args.gate, "wb") as fh:
            fh.write(write_wav(gate_audio(buf, segments)))
    if args.format == "tsv":
        for seg in segments:
            sys.stdout.write("%d\t%d\n" % (seg.start_sample, seg.end_sample))
    else:
        _emit([{"start": s.start_sample, "end": s.end_sample} for s in segments],
              sort_keys=False)
    return 0


def cmd_normalize(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        text = fh.read()
    numbers = load_number_table()
    abbrevs = (load_abbrev_table(args.abbrev) if args.abbrev
               else load_abbrev_table())
    if args.numbers and not args.abbrev:
        abbrevs = None  # numbers-only run requested explicitly
    sys.stdout.write(normalize_text(text, numbers=numbers, abbrevs=abbrevs))
    return 0


def cmd_g2p(args) -> int:
    sys.stdout.write(" ".join(g2p(args.word)) + "\n")
    return 0


def cmd_lexicon(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        words = [line.strip() for line in fh if line.strip()]
    result = build_lexicon(words)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_lexicon(result.entries))
    for word, reason in result.failures:
        sys.stderr.write("skipped %s: %s\n" % (word, reason))
    _emit({"entries": len(result.entries), "failures": len(result.failures),
           "out": args.out})
    return 0


def cmd_features(args) -> int:
    cfg = FeatureConfig(args.window, args.shift, args.bands)
    feats = extract_features(_read_wav(args.infile), cfg)
    np.savez(args.out, frames=feats.frames, window=np.array(cfg.window_samples),
             shift=np.array(cfg.shift_samples), bands=np.array(cfg.num_bands))
    _emit({"bands": feats.num_bands, "frames": feats.num_frames, "out": args.out})
    return 0


def _load_training_npz(path):
    data = np.load(path, allow_pickle=False)
    if "features" not in data or "labels" not in data:
        raise VaaniError("training data needs 'features' and 'labels' arrays")
    return data


def cmd_train(args) -> int:
    data = _load_training_npz(args.infile)
    features = np.asarray(data["features"], dtype=np.float64)
    labels = np.asarray(data["labels"], dtype=np.int64)
    num_classes = int(labels.max()) + 1 if labels.size else 1
    dims = (features.shape[1],) + (args.hidden,) * 6 + (num_classes,)
    net = net_mod.NetSpec(dims, (False,) + (True,) * 6).build(args.seed)
    std = np.maximum(features.std(axis=0), 1e-8)
    net_mod.set_input_normalization(net, features.mean(axis=0), std, seed=args.seed)
    prior = None
    if args.prior:
        prior = load_model(args.prior).prior
        if prior is None:
            raise VaaniError("%s holds no co-activation prior" % args.prior)
    result = net_mod.train(net, features, labels, epochs=args.epochs, lr=args.lr,
                           batch_size=args.batch_size, lam=getattr(args, "lambda"),
                           prior=prior, seed=args.seed)
    for m in result.metrics:
        sys.stderr.write("epoch %d loss %.6f acc %.4f\n" % (m.epoch, m.loss, m.accuracy))
    bundle = ModelBundle(
        result.net,
        state_labels=_read_state_labels(args.state_labels),
        prior=net_mod.collect_prior(result.net, features),
    )
    save_model(args.out, bundle)
    final = result.metrics[-1]
    _emit({"accuracy": round(final.accuracy, 6), "epochs": args.epochs,
           "loss": round(final.loss, 6), "out": args.out})
    return 0


def _read_state_labels(path):
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return tuple(line.strip() for line in fh if line.strip())


def _parse_schedule(text):
    if not text:
        return None
    phases = []
    for phase in text.split(";"):
        phases.append([int(layer) for layer in phase.split(",") if layer.strip()])
    return phases


def cmd_adapt(args) -> int:
    bundle = load_model(args.model)
    data = np.load(args.infile, allow_pickle=False)
    if "features" not in data:
        raise VaaniError("adaptation data needs a 'features' array")
    batch = np.asarray(data["features"], dtype=np.float64)
    prior = load_model(args.prior).prior if args.prior else bundle.prior
    if prior is None:
        raise VaaniError("no co-activation prior available")
    result = net_mod.adapt(bundle.net, batch, prior, lam=getattr(args, "lambda"),
                           steps=args.steps, lr=args.lr,
                           layer_schedule=_parse_schedule(args.schedule))
    for i, value in enumerate(result.penalty_trace):
        sys.stderr.write("step %d penalty %.6f\n" % (i, value))
    save_model(args.out, ModelBundle(result.net, bundle.state_labels,
                                     bundle.feature_config, prior))
    _emit({"out": args.out,
           "penalty_first": round(result.penalty_trace[0], 6),
           "penalty_last": round(result.penalty_trace[-1], 6),
           "steps": args.steps})
    return 0


def cmd_align(args) -> int:
    bundle = load_model(args.model)
    if bundle.state_labels is None:
        raise VaaniError("model has no state label table")
    topology = align_mod.topology_from_state_labels(bundle.state_labels)
    lexicon = load_lexicon(args.lexicon)
    with open(args.text, encoding="utf-8") as fh:
        words = fh.read().split()
    phones: list[str] = []
    for word in words:
        if word not in lexicon:
            raise NotFound("word %r missing from lexicon" % word)
        phones.extend(lexicon[word])
    feats = extract_features(_read_wav(args.audio),
                             bundle.feature_config or FeatureConfig())
    posteriors = net_mod.forward(bundle.net, feats.frames).posteriors
    result = align_mod.viterbi_align(posteriors, phones, topology)
    _emit({
        "frames": feats.num_frames,
        "labels": [topology.state_label(s) for s in result.state_ids],
        "log_score": round(result.log_score, 6),
        "state_ids": list(result.state_ids),
    })
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data, model_path=args.model, frontend_dir=args.frontend)
    sys.stderr.write("serving on %s:%d\n" % (args.host, args.port))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_useradd(args) -> int:
    from .service import CorpusStore

    CorpusStore(args.data).add_user(args.user, args.password, args.language)
    _emit({"language_id": args.language, "user_id": args.user})
    return 0


def cmd_import(args) -> int:
    from .service import CorpusStore

    imported, skipped = CorpusStore(args.data).import_manifest(args.manifest,
                                                               args.language)
    _emit({"imported": imported, "skipped": skipped})
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="vaani", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("resample", help="decimate a wav file to a lower rate")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--rate", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_resample)

    p = sub.add_parser("vad", help="detect speech segments")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--window", type=int, default=VAD_WINDOW)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--hangover", type=int, default=DEFAULT_HANGOVER)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--gate", help="write speech-only audio to this wav file")
    p.set_defaults(func=cmd_vad)

    p = sub.add_parser("normalize", help="expand digits and abbreviations")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--numbers", action="store_true",
                   help="convert digit runs (skip abbreviations unless --abbrev)")
    p.add_argument("--abbrev", help="abbreviation table file")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("g2p", help="phones for one word")
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_g2p)

    p = sub.add_parser("lexicon", help="build a pronunciation lexicon")
    p.add_argument("--in", dest="infile", required=True,
                   help="word list, one word per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("features", help="log mel-band energies for a wav file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--shift", type=int, default=DEFAULT_SHIFT)
    p.add_argument("--bands", type=int, default=DEFAULT_NUM_BANDS)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train the acoustic net")
    p.add_argument("--in", dest="infile", required=True,
                   help="npz with 'features' and 'labels'")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--lr", type=float, required=True)
    p.add_argument("--lambda", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--prior", help="model file whose prior joins the loss")
    p.add_argument("--state-labels", help="file with one state label per line")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("adapt", help="unsupervised co-activation adaptation")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True,
                   help="npz with a 'features' array")
    p.add_argument("--out", required=True)
    p.add_argument("--prior", help="model file with the prior (default: --model)")
    p.add_argument("--lambda", type=float, default=0.5)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--schedule", help="layer phases, e.g. '1,2;3,4'")
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("align", help="force-align audio to a sentence")
    p.add_argument("--model", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--audio", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("serve", help="run the corpus service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", required=True)
    p.add_argument("--model")
    p.add_argument("--frontend", help="directory of static UI files")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("useradd", help="create an account")
    p.add_argument("--data", required=True)
    p.add_argument("--user", required=True)
    p.add_argument("--password", required=True)
    p.add_argument("--language", default="hi")
    p.set_defaults(func=cmd_useradd)

    p = sub.add_parser("import", help="bulk-import transcripts from a manifest")
    p.add_argument("--data", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--language", default="hi")
    p.set_defaults(func=cmd_import)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (VaaniError, OSError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
