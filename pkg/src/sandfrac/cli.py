"""Command-line workflow: synth, prep, select, train, evaluate, volume.

Logs go to standard error; data goes to files or standard output. Exit
codes: 0 success, 2 input problems, 3 configuration problems, 4 numeric
failures. Report-writing commands also render a PNG figure next to each
CSV unless --no-figures is given.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from .builders import build_clustered, build_grid
from .data import (
    WellSeries,
    load_dataset,
    read_locations_csv,
    read_well_csv,
    write_dataset,
)
from .errors import ConfigError, InputError, NumericError, SandfracError
from .fis import MODEL_FORMAT_VERSION, TskModel, infer_batch, model_from_dict, save_model
from .mlp import MLP_FORMAT_VERSION, mlp_from_dict, mlp_infer, mlp_train, save_mlp
from .pipeline import metric_bundle, random_split, spline_resample, wells_to_dataset
from .selection import sfs
from .synth import generate
from .training import TrainConfig, train
from .volume import (
    export_slice,
    load_cubes,
    predict_cube,
    smooth_cube,
    write_cube_attribute,
)

log = logging.getLogger("sandfrac")

MODEL_CHOICES = ("grid", "subtractive", "fcm", "ann")
METRIC_KEYS = ("cc", "rmse", "aem", "si")


def _split_names(text: str | None) -> list[str] | None:
    if text is None:
        return None
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise InputError("empty name list")
    return names


def _sibling(path, suffix: str) -> str:
    return os.path.splitext(str(path))[0] + suffix


def _load_any_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: model document must be a JSON object")
    version = doc.get("version")
    if version == MODEL_FORMAT_VERSION:
        return model_from_dict(doc)
    if version == MLP_FORMAT_VERSION:
        return mlp_from_dict(doc)
    raise InputError(f"{path}: unrecognized model version {version!r}")


def _infer_any(model, x):
    if isinstance(model, TskModel):
        return infer_batch(model, x)
    return mlp_infer(model, x)


def _write_report_csv(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_rmse,test_rmse\n")
        for i, (tr, te) in enumerate(zip(report.train_rmse, report.test_rmse), start=1):
            fh.write("%d,%.17g,%.17g\n" % (i, tr, te))


def _metric_line(scope: str, n: int, metrics: dict) -> str:
    return "%s,%d,%s" % (scope, n, ",".join("%.17g" % metrics[k] for k in METRIC_KEYS))


def cmd_prep(args):
    wells = read_well_csv(args.wells)
    locations = read_locations_csv(args.locations)
    cube = load_cubes(args.cubes)
    geo = cube.geometry
    knots = geo.times()
    cube_attrs = list(cube.attributes)
    merged = []
    n_dropped = 0
    for well in wells:
        if well.well_id not in locations:
            raise InputError(f"well {well.well_id} missing from {args.locations}")
        il, xl = locations[well.well_id]
        if not (0 <= il < geo.n_inline and 0 <= xl < geo.n_crossline):
            raise InputError(
                f"well {well.well_id} location ({il}, {xl}) is outside the cube grid"
            )
        inside = (well.times_ms >= knots[0]) & (well.times_ms <= knots[-1])
        n_dropped += int(np.count_nonzero(~inside))
        if not np.any(inside):
            raise InputError(f"well {well.well_id}: no samples inside the cube time span")
        times = well.times_ms[inside]
        attrs = {}
        for name in cube_attrs:
            trace = cube.trace(name, il, xl)
            if np.any(np.isnan(trace)):
                raise InputError(
                    f"well {well.well_id}: attribute {name!r} trace has null samples"
                )
            attrs[name] = spline_resample(knots, trace, times)
        for name, vals in well.attributes.items():
            if name not in attrs:
                attrs[name] = vals[inside]
        merged.append(
            WellSeries(
                well_id=well.well_id,
                times_ms=times,
                attributes=attrs,
                sand_fraction=well.sand_fraction[inside],
            )
        )
    extra = [n for n in wells[0].attributes if n not in cube_attrs]
    ds = wells_to_dataset(merged, attributes=cube_attrs + extra)
    write_dataset(ds, args.out)
    log.info(
        "merged %d wells into %d rows (%d dropped outside the cube span) -> %s",
        len(merged),
        ds.n_samples,
        n_dropped,
        args.out,
    )


def cmd_train(args):
    if args.model not in MODEL_CHOICES:
        raise ConfigError(
            f"unknown model {args.model!r}; choose from {', '.join(MODEL_CHOICES)}"
        )
    ds = load_dataset(args.data, attributes=_split_names(args.attributes))
    config = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
        split_fraction=args.split,
        patience=args.patience,
        rule_cap=args.rule_cap,
    )
    train_set, test_set = random_split(ds, config.split_fraction, config.seed)
    if args.save_splits:
        os.makedirs(args.save_splits, exist_ok=True)
        write_dataset(train_set, os.path.join(args.save_splits, "train.csv"))
        write_dataset(test_set, os.path.join(args.save_splits, "test.csv"))

    if args.model == "ann":
        best, report = mlp_train(train_set, test_set, n_hidden=args.hidden, config=config)
        save_mlp(best, args.out)
    else:
        if args.model == "grid":
            model = build_grid(train_set, mfs_per_input=args.p, rule_cap=config.rule_cap)
        else:
            model, cluster = build_clustered(
                train_set,
                method=args.model,
                n_clusters=args.clusters,
                radius=args.radius,
                seed=config.seed,
            )
            log.info("%s seeding found %d rules", args.model, cluster.centers.shape[0])
        best, report = train(model, train_set, test_set, config)
        save_model(best, args.out)

    report_path = args.report or _sibling(args.out, "_report.csv")
    _write_report_csv(report, report_path)
    log.info(
        "trained %s model over %d epochs; best epoch %d (test RMSE %.6g) -> %s",
        args.model,
        report.epochs_run,
        report.best_epoch,
        report.best_test_rmse,
        args.out,
    )
    print("set,n_samples,%s" % ",".join(METRIC_KEYS))
    print(_metric_line("train", train_set.n_samples, report.train_metrics))
    print(_metric_line("test", test_set.n_samples, report.test_metrics))
    if not args.no_figures:
        from . import plots

        plots.save_learning_curves(report, _sibling(report_path, ".png"))


def cmd_evaluate(args):
    model = _load_any_model(args.model)
    ds = load_dataset(args.data, attributes=list(model.attribute_names))
    predicted = _infer_any(model, ds.x)
    rows = [{"scope": "overall", "n": ds.n_samples, **metric_bundle(predicted, ds.y)}]
    if args.per_well:
        seen = []
        for wid in ds.well_ids:
            if wid not in seen:
                seen.append(wid)
        for wid in seen:
            mask = ds.well_ids == wid
            rows.append(
                {
                    "scope": str(wid),
                    "n": int(np.count_nonzero(mask)),
                    **metric_bundle(predicted[mask], ds.y[mask]),
                }
            )
    header = "scope,n_samples,%s" % ",".join(METRIC_KEYS)
    lines = [header] + [_metric_line(r["scope"], r["n"], r) for r in rows]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    if not args.no_figures:
        from . import plots

        plots.save_metric_bars(rows, _sibling(args.out, ".png"))


def cmd_volume(args):
    model = _load_any_model(args.model)
    cube = load_cubes(args.cubes)
    pcube = predict_cube(model, cube)
    log.info(
        "predicted %d cells: %d clamped, %d degenerate, %d null inputs",
        pcube.geometry.n_cells,
        pcube.n_clamped,
        pcube.n_degenerate,
        pcube.n_null_input,
    )
    if args.smooth:
        pcube = smooth_cube(pcube)
        log.info("median-smoothed every inline slice")
    write_cube_attribute(args.out, pcube.geometry, "sand_fraction", pcube.values)
    log.info("property cube -> %s", args.out)
    if args.slice is None:
        return

    slice_path = args.slice_out or _sibling(args.out, f"_inline{args.slice}.csv")
    overlay_well = None
    overlay_location = None
    overlay_path = None
    if args.overlay_well:
        if not (args.wells and args.locations):
            raise ConfigError("--overlay-well needs --wells and --locations")
        matches = [w for w in read_well_csv(args.wells) if w.well_id == args.overlay_well]
        if not matches:
            raise InputError(f"well {args.overlay_well!r} not found in {args.wells}")
        overlay_well = matches[0]
        locations = read_locations_csv(args.locations)
        if args.overlay_well not in locations:
            raise InputError(f"well {args.overlay_well!r} not found in {args.locations}")
        overlay_location = locations[args.overlay_well]
        if overlay_location[0] != args.slice:
            log.info(
                "note: well %s sits on inline %d, not the exported inline %d; "
                "overlay predictions come from the well trace",
                args.overlay_well,
                overlay_location[0],
                args.slice,
            )
        overlay_path = args.overlay_out or _sibling(slice_path, "_overlay.csv")
    result = export_slice(
        pcube,
        args.slice,
        slice_path,
        overlay_well=overlay_well,
        overlay_location=overlay_location,
        overlay_path=overlay_path,
    )
    log.info("slice %d -> %s", args.slice, slice_path)
    if overlay_path:
        log.info("overlay -> %s", overlay_path)
    if not args.no_figures:
        from . import plots

        plots.save_slice_image(
            result["grid"],
            pcube.geometry.times(),
            _sibling(slice_path, ".png"),
            overlay=result["overlay"],
        )


def cmd_select(args):
    ds = load_dataset(args.data, attributes=_split_names(args.candidates))
    result = sfs(
        ds,
        n_hidden=args.hidden,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
        split_fraction=args.split,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("stage,attribute_added,cc\n")
        for entry in result.trace:
            fh.write("%d,%s,%.17g\n" % (entry.stage, entry.attribute, entry.cc))
    print("selected: %s" % ",".join(result.selected))
    log.info("selection trace -> %s", args.out)
    if not args.no_figures:
        from . import plots

        plots.save_selection_trace(result.trace, _sibling(args.out, ".png"))


def cmd_synth(args):
    out = generate(
        args.out_dir,
        seed=args.seed,
        n_wells=args.wells,
        n_inline=args.inlines,
        n_crossline=args.crosslines,
        n_t=args.nt,
        t0=args.t0,
        dt=args.dt,
        noise=args.noise,
        fine_divisor=args.fine_divisor,
    )
    for key in ("wells", "locations", "truth"):
        log.info("%s -> %s", key, out[key])
    for path in out["cubes"]:
        log.info("cube -> %s", path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandfrac",
        description="Learn and apply seismic-attribute to sand-fraction mappings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", help="merge well logs with cube attribute traces")
    p.add_argument("--wells", required=True, help="well CSV (well_id,time_ms,...,sand_fraction)")
    p.add_argument("--locations", required=True, help="well location CSV (well_id,inline,crossline)")
    p.add_argument("--cubes", required=True, nargs="+", help="attribute cube files")
    p.add_argument("--out", required=True, help="merged dataset CSV to write")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("train", help="fit a model on a prepared dataset")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--model", required=True, help="grid | subtractive | fcm | ann")
    p.add_argument("--out", default="model.json", help="model file to write")
    p.add_argument("--report", default=None, help="learning-curve CSV (default: <out>_report.csv)")
    p.add_argument("--attributes", default=None, help="comma-separated predictor columns (default: all)")
    p.add_argument("--p", type=int, default=3, help="fuzzy sets per input for the grid model")
    p.add_argument("--clusters", type=int, default=8, help="cluster count for the fcm model")
    p.add_argument("--radius", type=float, default=0.2, help="cluster radius in unit-scaled space")
    p.add_argument("--hidden", type=int, default=10, help="hidden units for the ann model")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.01, help="premise/network learning rate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=0.7, help="training fraction of the split")
    p.add_argument("--patience", type=int, default=None, help="stop after this many epochs without a new best")
    p.add_argument("--rule-cap", type=int, default=10000, help="maximum grid rule count")
    p.add_argument("--save-splits", default=None, help="directory for train.csv/test.csv copies")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a model file against a dataset")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--out", default="metrics.csv", help="metrics CSV to write")
    p.add_argument("--per-well", action="store_true", help="add one row per well")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("volume", help="predict a property cube from attribute cubes")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--cubes", required=True, nargs="+", help="attribute cube files")
    p.add_argument("--out", default="prediction.sfcube", help="property cube file to write")
    p.add_argument("--smooth", action="store_true", help="median-filter each inline slice")
    p.add_argument("--slice", type=int, default=None, help="inline index to export as CSV")
    p.add_argument("--slice-out", default=None, help="slice CSV path (default: <out>_inlineK.csv)")
    p.add_argument("--overlay-well", default=None, help="well id to overlay on the slice export")
    p.add_argument("--wells", default=None, help="well CSV for the overlay")
    p.add_argument("--locations", default=None, help="location CSV for the overlay")
    p.add_argument("--overlay-out", default=None, help="overlay CSV path")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("select", help="forward-select predictor attributes")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--candidates", default=None, help="comma-separated candidate columns (default: all)")
    p.add_argument("--out", default="sfs_trace.csv", help="trace CSV to write")
    p.add_argument("--hidden", type=int, default=10)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("synth", help="generate the synthetic benchmark bundle")
    p.add_argument("--out-dir", required=True, help="directory for the generated files")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--wells", type=int, default=6)
    p.add_argument("--inlines", type=int, default=64)
    p.add_argument("--crosslines", type=int, default=64)
    p.add_argument("--nt", type=int, default=128)
    p.add_argument("--t0", type=float, default=1000.0)
    p.add_argument("--dt", type=float, default=2.0)
    p.add_argument("--noise", type=float, default=0.02)
    p.add_argument("--fine-divisor", type=int, default=4)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        args.func(args)
    except InputError as exc:
        log.error("input error: %s", exc)
        return 2
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return 3
    except NumericError as exc:
        log.error("numeric failure: %s", exc)
        return 4
    except SandfracError as exc:
        log.error("error: %s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 2
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
