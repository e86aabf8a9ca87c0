"""Command-line interface.

Exit codes: 0 success, 1 operational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .assessment import (
    RanTrial,
    bundled_fixture_dir,
    evaluate_manifest,
    parse_manifest,
    render_report,
    score_pseudoword,
    score_ran,
)
from .audio import decode_wav
from .classifier import save_color_classifier, train_color_classifier
from .features import MfccConfig, mfcc
from .nnet import TrainConfig
from .service import canonical_json, create_app
from .store import Store
from .synth import COLOR_WORDS, color_tone_dataset, toy_pretrain_clips
from .transcribe import ClassifierTranscriber, HttpTranscriber, MockTranscriber
from .vad import VadConfig, detect_segments
from .w2v import pretrain, save_model, toy_demo_config

DEFAULT_DATA_DIR = os.environ.get("KIDSPEECH_DATA_DIR", "kidspeech-data")


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("config file must hold a JSON object")
    return config


def _mfcc_config(config: dict) -> MfccConfig:
    return MfccConfig(**config.get("mfcc", {}))


def _vad_config(config: dict) -> VadConfig:
    return VadConfig(**config.get("vad", {}))


def _build_transcriber(args, parser: argparse.ArgumentParser, config: dict,
                       default_fixtures=None):
    kind = args.transcriber
    if kind == "mock":
        fixtures = getattr(args, "fixtures", None) or default_fixtures
        if fixtures is None:
            parser.error("--transcriber mock requires --fixtures <tsv>")
        return MockTranscriber.from_file(fixtures)
    if kind == "classifier":
        model = getattr(args, "model", None)
        if model is None:
            parser.error("--transcriber classifier requires --model <checkpoint>")
        return ClassifierTranscriber.from_checkpoint(
            model, vad_cfg=_vad_config(config), mfcc_cfg=_mfcc_config(config))
    if kind == "http":
        if not getattr(args, "endpoint", None):
            parser.error("--transcriber http requires --endpoint <url>")
        return HttpTranscriber(args.endpoint)
    parser.error(f"unknown transcriber {kind!r}")


def _add_transcriber_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--transcriber", choices=("mock", "classifier", "http"),
                     default="mock")
    sub.add_argument("--fixtures", help="mock transcript map (hash<TAB>text)")
    sub.add_argument("--model", help="classifier checkpoint path")
    sub.add_argument("--endpoint", help="http transcriber endpoint URL")


def cmd_mfcc(args, parser) -> int:
    config = _load_config(args.config)
    clip = decode_wav(Path(args.wav).read_bytes())
    matrix = mfcc(clip, _mfcc_config(config))
    for t, row in zip(matrix.frame_times_s, matrix.frames):
        print(f"{t:.3f}\t" + " ".join(f"{v:.6f}" for v in row))
    return 0


def cmd_vad(args, parser) -> int:
    config = _load_config(args.config)
    clip = decode_wav(Path(args.wav).read_bytes())
    for segment in detect_segments(clip, _vad_config(config)):
        print(f"{segment.start_s:.3f}\t{segment.end_s:.3f}")
    return 0


def cmd_train_color(args, parser) -> int:
    clips, labels = color_tone_dataset(clips_per_class=args.clips_per_class,
                                       seed=args.seed)
    cfg = TrainConfig(learning_rate=args.learning_rate, epochs=args.epochs,
                      rng_seed=args.seed)
    network, history, extra = train_color_classifier(clips, labels, COLOR_WORDS, cfg)
    for epoch, (loss, acc) in enumerate(zip(history.losses, history.accuracies), 1):
        print(f"epoch {epoch} loss {loss:.6f} acc {acc:.4f}")
    save_color_classifier(args.out, network, extra)
    print(f"saved {args.out}")
    return 0


def cmd_pretrain_toy(args, parser) -> int:
    clips = toy_pretrain_clips(n_clips=args.clips, seed=args.seed)
    model, history, usage = pretrain(clips, args.steps, toy_demo_config(),
                                     rng_seed=args.seed)
    for line in history.lines():
        print(line)
    used = np.sum(usage.probs > 1.0 / (10 * usage.entries), axis=1)
    print(f"codewords above 1/(10V): {'/'.join(str(int(u)) for u in used)} "
          f"of {usage.entries} per group")
    if args.out:
        save_model(args.out, model)
        print(f"saved {args.out}")
    return 0


def cmd_score_ran(args, parser) -> int:
    config = _load_config(args.config)
    transcriber = _build_transcriber(args, parser, config)
    wav_bytes = Path(args.recording).read_bytes()
    clip = decode_wav(wav_bytes)
    transcript = transcriber.transcribe(wav_bytes)
    expected = tuple(w for w in args.expected.replace(",", " ").split() if w)
    if not expected:
        parser.error("--expected must name at least one word")
    result = score_ran(RanTrial(expected), transcript, clip.duration_s)
    print(canonical_json(result.to_payload()).decode("utf-8"))
    return 0


def cmd_score_pseudo(args, parser) -> int:
    config = _load_config(args.config)
    transcriber = _build_transcriber(args, parser, config)
    wav_bytes = Path(args.recording).read_bytes()
    transcript = transcriber.transcribe(wav_bytes)
    result = score_pseudoword(args.target, transcript.text)
    print(canonical_json(result.to_payload()).decode("utf-8"))
    return 0


def cmd_eval(args, parser) -> int:
    config = _load_config(args.config)
    manifest = args.manifest or bundled_fixture_dir() / "manifest.tsv"
    records = parse_manifest(manifest)
    default_fixtures = Path(manifest).parent / "mock_transcripts.tsv"
    transcriber = _build_transcriber(
        args, parser, config,
        default_fixtures=default_fixtures if default_fixtures.exists() else None)
    report = evaluate_manifest(records, transcriber)
    print(render_report(report))
    return 0


def cmd_serve(args, parser) -> int:
    import uvicorn

    config = _load_config(args.config)
    store = Store(args.data_dir)
    transcriber = _build_transcriber(args, parser, config)
    app = create_app(store, transcriber, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kidspeech",
                                     description="children's speech assessment toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mfcc", help="dump MFCC frames for a WAV file")
    p.add_argument("wav")
    p.add_argument("--config")
    p.set_defaults(func=cmd_mfcc)

    p = sub.add_parser("vad", help="print detected speech segments")
    p.add_argument("wav")
    p.add_argument("--config")
    p.set_defaults(func=cmd_vad)

    p = sub.add_parser("train-color", help="train the color-word classifier on tones")
    p.add_argument("--out", default="color_model.ckpt")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--clips-per-class", type=int, default=8)
    p.set_defaults(func=cmd_train_color)

    p = sub.add_parser("pretrain-toy", help="run the toy pretraining loop")
    p.add_argument("--out")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clips", type=int, default=10)
    p.set_defaults(func=cmd_pretrain_toy)

    p = sub.add_parser("score-ran", help="score a RAN recording")
    p.add_argument("--recording", required=True)
    p.add_argument("--expected", required=True,
                   help="expected words, space or comma separated")
    p.add_argument("--config")
    _add_transcriber_flags(p)
    p.set_defaults(func=cmd_score_ran)

    p = sub.add_parser("score-pseudo", help="score a pseudo-word recording")
    p.add_argument("--recording", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--config")
    _add_transcriber_flags(p)
    p.set_defaults(func=cmd_score_pseudo)

    p = sub.add_parser("eval", help="evaluate a manifest and print PER/WER")
    p.add_argument("manifest", nargs="?",
                   help="manifest TSV (defaults to the bundled demo manifest)")
    p.add_argument("--config")
    _add_transcriber_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the scoring service")
    p.add_argument("--data-dir", default=DEFAULT_DATA_DIR)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", help="directory of UI assets to mount at /ui")
    p.add_argument("--config")
    _add_transcriber_flags(p)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
