"""Batch command line tying the pipeline together.

Subcommands:

``synth``
    Generate a synthetic dyad dataset (recordings + manifest).
``ibs``
    Inter-brain synchrony tables, task-versus-rest tests and PLV plots
    for one dyad and phase.
``fbn``
    Intra-brain functional network metrics, phase-1 versus phase-3
    contrasts and circular graphs.
``classify``
    Per-subject cross-validated motor-imagery decoding with phase
    comparisons; optionally saves session-ready models.
``hub`` / ``client``
    Live collaborative session over TCP (one hub, two clients).

Every command is reproducible from its flags and seed; the only
run-dependent output is the ``metadata.created`` timestamp inside JSON
summaries.  Errors print to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import brain_network as bn
from . import classifier as clf
from . import io as dio
from . import phase_sync as ps
from . import plots
from . import signal_core as sc
from . import stats
from . import synth_eeg as synth
from .cbci_hub import client as hub_client
from .cbci_hub import hub as hub_mod
from .cbci_hub import schedule as sched

DEFAULT_ADDR = "127.0.0.1:7350"


def _created() -> dict:
    return {"created": datetime.now(timezone.utc).isoformat()}


def _parse_addr(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"address must look like host:port, got {text!r}")
    return host or "127.0.0.1", int(port)


def _band_names(arg: str) -> list[str]:
    if arg == "all":
        return list(sc.BAND_NAMES)
    if arg not in sc.BAND_NAMES:
        raise ValueError(f"unknown band {arg!r}; choose from {sc.BAND_NAMES} or 'all'")
    return [arg]


def _dyad_ids(manifest: dict, requested: str | None) -> list[str]:
    known = sorted(manifest.get("dyads", {}))
    if not known:
        raise ValueError("manifest lists no dyads")
    if requested is None:
        return known
    if requested not in manifest["dyads"]:
        raise ValueError(f"dyad {requested!r} not in manifest (have {known})")
    return [requested]


def _phase_entry(manifest: dict, dyad: str, phase: int) -> dict:
    phases = manifest["dyads"][dyad]["phases"]
    key = str(phase)
    if key not in phases:
        raise ValueError(f"{dyad} has no phase {phase} (have {sorted(phases)})")
    return phases[key]


def _load_epochs(root: Path, relpath: str) -> list[sc.Epoch]:
    rec, onsets, labels = dio.read_recording(root / relpath)
    kept, _rejected = sc.preprocess_recording(rec, onsets, labels)
    return kept


def _align_trials(epochs_a, epochs_b):
    common = {e.trial_index for e in epochs_a} & {e.trial_index for e in epochs_b}
    a = [e for e in epochs_a if e.trial_index in common]
    b = [e for e in epochs_b if e.trial_index in common]
    if not a:
        raise ValueError("no artifact-free trials shared by both subjects")
    return a, b


# ---------------------------------------------------------------- synth


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    phase2_gain = args.erd_gain if args.phase2_erd_gain is None else args.phase2_erd_gain
    settings = {
        1: synth.PhaseSettings(0.0, args.erd_gain),
        2: synth.PhaseSettings(args.phase2_kappa, phase2_gain),
        3: synth.PhaseSettings(0.0, args.erd_gain),
    }
    manifest = {
        "dataset": "dyadbci",
        "seed": args.seed,
        "blocks": args.blocks,
        "trials_per_block": args.trials_per_block,
        "sample_rate": synth.SAMPLE_RATE,
        "noise_rms": args.noise_rms,
        "phase_settings": {
            str(p): {"coupling_kappa": s.coupling_kappa, "erd_gain": s.erd_gain}
            for p, s in settings.items()
        },
        "dyads": {},
        "metadata": _created(),
    }
    for i in range(1, args.dyads + 1):
        dyad_id = f"dyad{i:02d}"
        dyad_seed = int(np.random.SeedSequence([args.seed, i]).generate_state(1)[0])
        sessions = synth.generate_experiment(
            dyad_id,
            dyad_seed,
            blocks=args.blocks,
            trials_per_block=args.trials_per_block,
            phase_settings=settings,
            noise_rms=args.noise_rms,
        )
        entry = {"seed": dyad_seed, "phases": {}}
        for phase, session in sorted(sessions.items()):
            rel_a = f"{dyad_id}/phase{phase}_a.csv"
            rel_b = f"{dyad_id}/phase{phase}_b.csv"
            dio.write_recording(
                out / rel_a, session.recording_a, session.trial_onsets, session.labels_a
            )
            dio.write_recording(
                out / rel_b, session.recording_b, session.trial_onsets, session.labels_b
            )
            entry["phases"][str(phase)] = {
                "mode": session.plan.mode,
                "plan_seed": session.plan.seed,
                "labels": list(session.labels),
                "recordings": {"a": rel_a, "b": rel_b},
            }
        manifest["dyads"][dyad_id] = entry
        print(f"{dyad_id}: {len(sessions)} phases x {args.blocks * args.trials_per_block} trials")
    path = dio.write_manifest(out / "manifest.json", manifest)
    print(f"manifest: {path}")
    return 0


# ------------------------------------------------------------------ ibs


def cmd_ibs(args) -> int:
    manifest = dio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    dyad = _dyad_ids(manifest, args.dyad)[0]
    entry = _phase_entry(manifest, dyad, args.phase)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    epochs_a = _load_epochs(root, entry["recordings"]["a"])
    epochs_b = _load_epochs(root, entry["recordings"]["b"])
    epochs_a, epochs_b = _align_trials(epochs_a, epochs_b)
    channels = sc.ELECTRODES
    summary = {
        "dyad": dyad,
        "phase": args.phase,
        "n_trials": len(epochs_a),
        "alpha": args.alpha,
        "fdr": bool(args.fdr),
        "bands": {},
        "metadata": _created(),
    }
    for band_name in _band_names(args.band):
        fband = sc.band(band_name)
        trial_plv = {}
        matrices = {}
        window_rows = []
        traces = {}
        for state in ps.STATES:
            windowed = ps.ibs_windowed(
                epochs_a, epochs_b, fband, state, args.window, args.window
            )
            matrix = np.nanmean(windowed.values, axis=2)
            matrices[state] = matrix
            dio.write_table(
                out / f"ibs_matrix_{band_name}_{state}.csv",
                ["electrode", *channels],
                [[channels[i], *matrix[i]] for i in range(len(channels))],
            )
            trace = np.nanmean(windowed.values, axis=(0, 1))
            traces[state] = (windowed.window_centers, trace)
            window_rows += [
                [state, float(c), float(v)]
                for c, v in zip(windowed.window_centers, trace)
            ]
            ph_a, fs = ps.phase_stack(epochs_a, fband, state)
            ph_b, _ = ps.phase_stack(epochs_b, fband, state)
            if state == "task":
                # equal-length paired samples: last 4 s of the task window
                n_rest = int(round(4.0 * fs))
                ph_a, ph_b = ph_a[:, :, -n_rest:], ph_b[:, :, -n_rest:]
            trial_plv[state] = ps.per_trial_pair_plv(ph_a, ph_b)
        dio.write_table(
            out / f"ibs_windows_{band_name}.csv",
            ["state", "window_center_s", "mean_plv"],
            window_rows,
        )
        plots.plot_windowed_plv(
            out / f"plv_windows_{band_name}.svg",
            traces,
            band_name,
            title=f"{dyad} phase {args.phase}, {band_name} band",
        )
        pair_rows = []
        p_values = []
        for i, ea in enumerate(channels):
            for j, eb in enumerate(channels):
                try:
                    test = stats.paired_t_test(trial_plv["task"][i, j], trial_plv["rest"][i, j])
                    t, df, p = test.statistic, test.df, test.p_value
                except ValueError:
                    t = df = p = float("nan")
                pair_rows.append(
                    [
                        ea,
                        eb,
                        sc.roi_of(ea),
                        sc.roi_of(eb),
                        float(matrices["task"][i, j]),
                        float(matrices["rest"][i, j]),
                        t,
                        df,
                        p,
                    ]
                )
                p_values.append(p)
        p_arr = np.asarray(p_values)
        if args.fdr:
            significant = stats.benjamini_hochberg(
                np.where(np.isfinite(p_arr), p_arr, 1.0), args.alpha
            )
        else:
            significant = np.where(np.isfinite(p_arr), p_arr, 1.0) < args.alpha
        dio.write_table(
            out / f"ibs_pair_tests_{band_name}.csv",
            [
                "electrode_a",
                "electrode_b",
                "roi_a",
                "roi_b",
                "mean_task_plv",
                "mean_rest_plv",
                "t",
                "df",
                "p_value",
                "significant",
            ],
            [row + [bool(sig)] for row, sig in zip(pair_rows, significant)],
        )
        roi_counts = {}
        for row, sig in zip(pair_rows, significant):
            key = (row[2], row[3])
            total, hits = roi_counts.get(key, (0, 0))
            roi_counts[key] = (total + 1, hits + bool(sig))
        dio.write_table(
            out / f"roi_significance_{band_name}.csv",
            ["roi_a", "roi_b", "n_pairs", "n_significant"],
            [[ra, rb, n, k] for (ra, rb), (n, k) in sorted(roi_counts.items())],
        )
        summary["bands"][band_name] = {
            "mean_task_plv": float(np.mean([r[4] for r in pair_rows])),
            "mean_rest_plv": float(np.mean([r[5] for r in pair_rows])),
            "n_significant_pairs": int(np.count_nonzero(significant)),
            "n_pairs": len(pair_rows),
        }
        print(
            f"{band_name}: task {summary['bands'][band_name]['mean_task_plv']:.3f} "
            f"rest {summary['bands'][band_name]['mean_rest_plv']:.3f} "
            f"significant {summary['bands'][band_name]['n_significant_pairs']}/{len(pair_rows)}"
        )
    dio.write_json(out / "summary.json", summary)
    return 0


# ------------------------------------------------------------------ fbn


def cmd_fbn(args) -> int:
    manifest = dio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    dyads = _dyad_ids(manifest, args.dyad)
    bands = _band_names(args.band)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    phases = (1, 3)
    metric_rows = []
    node_rows = []
    by_band_phase: dict[str, dict[int, dict[str, bn.NetworkMetrics]]] = {
        b: {p: {} for p in phases} for b in bands
    }
    n_connected = 0
    for dyad in dyads:
        for phase in phases:
            entry = _phase_entry(manifest, dyad, phase)
            for side in ("a", "b"):
                epochs = _load_epochs(root, entry["recordings"][side])
                subject = f"{dyad}{side}"
                for band_name in bands:
                    conn = bn.intra_brain_connectivity(epochs, sc.band(band_name))
                    graph = bn.threshold_graph(conn, args.tau)
                    try:
                        tau_max = bn.max_connected_threshold(conn)
                    except ValueError:
                        tau_max = float("nan")
                    plots.plot_circular_graph(
                        out / "graphs" / f"{subject}_phase{phase}_{band_name}.svg",
                        conn.weights,
                        graph.adjacency,
                        conn.labels,
                        title=f"{subject} phase {phase}, {band_name}",
                    )
                    connected = bn.is_connected(graph)
                    if connected:
                        n_connected += 1
                        metrics = bn.network_metrics(
                            graph, n_refs=args.n_refs, seed=args.seed
                        )
                    else:
                        metrics = bn.NetworkMetrics(
                            char_path_length=float("nan"),
                            clustering_coeff=float("nan"),
                            small_worldness=float("nan"),
                            degree=bn.degree_centrality(graph),
                            betweenness=bn.betweenness_centrality(graph),
                            labels=graph.labels,
                        )
                    by_band_phase[band_name][phase][subject] = metrics
                    metric_rows.append(
                        [
                            dyad,
                            subject,
                            phase,
                            band_name,
                            connected,
                            tau_max,
                            metrics.char_path_length,
                            metrics.clustering_coeff,
                            metrics.small_worldness,
                        ]
                    )
                    node_rows += [
                        [
                            dyad,
                            subject,
                            phase,
                            band_name,
                            label,
                            float(metrics.degree[k]),
                            float(metrics.betweenness[k]),
                        ]
                        for k, label in enumerate(metrics.labels)
                    ]
    if n_connected == 0:
        raise ValueError(
            f"no connected graphs at tau={args.tau}; lower the threshold"
        )
    dio.write_table(
        out / "fbn_metrics.csv",
        [
            "dyad",
            "subject",
            "phase",
            "band",
            "connected",
            "max_connected_tau",
            "char_path_length",
            "clustering_coeff",
            "small_worldness",
        ],
        metric_rows,
    )
    dio.write_table(
        out / "fbn_node_metrics.csv",
        ["dyad", "subject", "phase", "band", "node", "degree", "betweenness"],
        node_rows,
    )
    summary = {
        "dyads": dyads,
        "tau": args.tau,
        "n_refs": args.n_refs,
        "bands": {},
        "metadata": _created(),
    }
    for band_name in bands:
        comparisons = bn.compare_phases(
            by_band_phase[band_name][1], by_band_phase[band_name][3]
        )
        rows = []
        for c in comparisons:
            test = c.test.to_dict() if c.test else {}
            rows.append(
                [
                    c.metric,
                    c.node or "",
                    c.mean_difference,
                    c.direction,
                    test.get("statistic"),
                    test.get("df"),
                    test.get("p_value"),
                    test.get("n"),
                ]
            )
        dio.write_table(
            out / f"fbn_phase_tests_{band_name}.csv",
            [
                "metric",
                "node",
                "mean_difference",
                "direction",
                "t",
                "df",
                "p_value",
                "n",
            ],
            rows,
        )
        tested = [r for r in rows if r[6] is not None]
        summary["bands"][band_name] = {
            "n_comparisons": len(rows),
            "n_significant": int(
                np.count_nonzero([r[6] < 0.05 for r in tested if np.isfinite(r[6])])
            ),
        }
        print(
            f"{band_name}: {len(rows)} comparisons, "
            f"{summary['bands'][band_name]['n_significant']} below p=0.05"
        )
    dio.write_json(out / "summary.json", summary)
    return 0


# ------------------------------------------------------------- classify


def cmd_classify(args) -> int:
    manifest = dio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    dyads = _dyad_ids(manifest, args.dyad)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = clf.TrainConfig(seed=args.seed)
    fold_rows = []
    acc_by_phase: dict[int, list[float]] = {}
    phases = (1, 2, 3)
    for dyad in dyads:
        for side, slot in (("a", 0), ("b", 1)):
            pooled_X, pooled_y = [], []
            for phase in phases:
                entry = _phase_entry(manifest, dyad, phase)
                epochs = _load_epochs(root, entry["recordings"][side])
                X, y = clf.features_from_epochs(epochs)
                pooled_X.append(X)
                pooled_y += y
                cv = clf.cross_validate(X, y, k=args.folds, cfg=cfg)
                subject = f"{dyad}{side}"
                for fold in cv.folds:
                    fold_rows.append(
                        {
                            "dyad": dyad,
                            "subject": subject,
                            "phase": phase,
                            "fold": fold.fold,
                            "accuracy": fold.accuracy,
                            "macro_f1": fold.macro_f1,
                            "n_validation": fold.n_validation,
                        }
                    )
                    acc_by_phase.setdefault(phase, []).append(fold.accuracy)
                print(
                    f"{subject} phase {phase}: accuracy {cv.mean_accuracy:.3f} "
                    f"macro F1 {cv.macro_f1:.3f}"
                )
            if args.save_models:
                model = clf.train(np.vstack(pooled_X), pooled_y, cfg)
                model_path = out / "models" / f"{dyad}_slot{slot}.json"
                model_path.parent.mkdir(parents=True, exist_ok=True)
                clf.save_model(model_path, model)
                print(f"saved {model_path}")
    dio.write_table(
        out / "accuracy_folds.csv",
        ["dyad", "subject", "phase", "fold", "accuracy", "macro_f1", "n_validation"],
        [
            [r["dyad"], r["subject"], r["phase"], r["fold"], r["accuracy"], r["macro_f1"], r["n_validation"]]
            for r in fold_rows
        ],
    )
    summary_rows = []
    for phase in phases:
        accs = np.asarray(acc_by_phase.get(phase, []))
        f1s = np.asarray([r["macro_f1"] for r in fold_rows if r["phase"] == phase])
        if accs.size:
            summary_rows.append(
                [phase, float(accs.mean()), float(accs.std()), float(f1s.mean())]
            )
    dio.write_table(
        out / "accuracy_summary.csv",
        ["phase", "mean_accuracy", "std_accuracy", "mean_macro_f1"],
        summary_rows,
    )
    test_rows = []
    pairs = [(1, 2), (1, 3), (2, 3)]
    for p1, p2 in pairs:
        if p1 in acc_by_phase and p2 in acc_by_phase:
            test = stats.kruskal_wallis([acc_by_phase[p1], acc_by_phase[p2]])
            test_rows.append(
                [f"phase{p1}_vs_phase{p2}", test.statistic, test.df, test.p_value, test.n]
            )
    if len(acc_by_phase) == 3:
        test = stats.kruskal_wallis([acc_by_phase[p] for p in phases])
        test_rows.append(["all_phases", test.statistic, test.df, test.p_value, test.n])
    dio.write_table(
        out / "phase_tests.csv",
        ["comparison", "H", "df", "p_value", "n"],
        test_rows,
    )
    plots.plot_accuracy_by_phase(
        out / "accuracy_by_phase.svg", fold_rows, title="fold accuracy by phase"
    )
    best = max(summary_rows, key=lambda r: r[1]) if summary_rows else None
    summary = {
        "dyads": dyads,
        "folds": args.folds,
        "per_phase": {
            str(r[0]): {"mean_accuracy": r[1], "std_accuracy": r[2], "mean_macro_f1": r[3]}
            for r in summary_rows
        },
        "best_phase": best[0] if best else None,
        "tests": {
            r[0]: {"H": r[1], "df": r[2], "p_value": r[3]} for r in test_rows
        },
        "metadata": _created(),
    }
    dio.write_json(out / "summary.json", summary)
    if best:
        print(f"best phase: {best[0]} (mean accuracy {best[1]:.3f})")
    return 0


# ------------------------------------------------------------ hub/client


def _plans_from_manifest(manifest: dict, dyad: str) -> dict[int, synth.SessionPlan]:
    plans = {}
    for key, entry in manifest["dyads"][dyad]["phases"].items():
        plans[int(key)] = synth.SessionPlan(
            mode=entry["mode"],
            blocks=manifest["blocks"],
            trials_per_block=manifest["trials_per_block"],
            labels=list(entry["labels"]),
            seed=entry["plan_seed"],
        )
    return plans


def cmd_hub(args) -> int:
    addr = _parse_addr(args.addr)
    manifest = dio.read_manifest(args.manifest)
    dyad = _dyad_ids(manifest, args.dyad)[0]
    schedule = sched.schedule_from_plans(_plans_from_manifest(manifest, dyad))
    if args.max_trials is not None:
        schedule.trials = schedule.trials[: args.max_trials]
    models = {0: clf.load_model(args.models[0]), 1: clf.load_model(args.models[1])}
    print(f"hub: serving {schedule.n_trials} trials for {dyad} on {args.addr}")
    records = hub_mod.run_hub(
        addr,
        schedule,
        models,
        timeout_s=args.timeout,
        real_time=args.real_time,
        free_assignment=args.free_assignment,
        log_path=args.log,
    )
    successes = 0
    for r in records:
        cue = r["cue_label"] or f"{r['cue_a']}/{r['cue_b']}"
        if r["valid"]:
            successes += r["fused"] == "success"
            print(
                f"trial {r['trial_index']:3d} phase {r['phase']} cue {cue}: "
                f"A={r['pred_a']} B={r['pred_b']} -> {r['fused']}"
            )
        else:
            print(
                f"trial {r['trial_index']:3d} phase {r['phase']} cue {cue}: "
                f"invalid ({r['note']})"
            )
    valid = sum(r["valid"] for r in records)
    rate = successes / valid if valid else float("nan")
    print(f"session done: {valid}/{len(records)} valid trials, success rate {rate:.3f}")
    print(f"log: {args.log}")
    return 0


def cmd_client(args) -> int:
    addr = _parse_addr(args.addr)
    manifest = dio.read_manifest(args.manifest)
    root = Path(args.manifest).parent
    dyad = _dyad_ids(manifest, args.dyad)[0]
    side = "a" if args.slot == 0 else "b"
    skip = {int(s) for s in args.skip_trials.split(",") if s.strip()}
    epochs: list[sc.Epoch] = []
    offset = 0
    entry_phases = manifest["dyads"][dyad]["phases"]
    for phase in sorted(int(k) for k in entry_phases):
        entry = entry_phases[str(phase)]
        rec, onsets, labels = dio.read_recording(root / entry["recordings"][side])
        phase_epochs = hub_client.prepare_client_epochs(rec, onsets, labels)
        epochs += [replace(e, trial_index=offset + e.trial_index) for e in phase_epochs]
        offset += len(phase_epochs)
    print(f"client slot {args.slot}: {len(epochs)} epochs ready, connecting to {args.addr}")
    transcript = hub_client.run_client(addr, args.slot, epochs, skip_trials=skip)
    feedback = [t for t in transcript if t["type"] == "feedback"]
    wins = sum(t["success"] for t in feedback)
    print(f"client slot {args.slot}: {len(feedback)} feedbacks, {wins} successes")
    return 0


# ----------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyadbci",
        description="Dyad EEG synthesis, synchrony analysis, decoding and live sessions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dyad dataset")
    p.add_argument("--out", default="dataset", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dyads", type=int, default=10)
    p.add_argument("--blocks", type=int, default=3)
    p.add_argument("--trials-per-block", type=int, default=20)
    p.add_argument("--phase2-kappa", type=float, default=5.0,
                   help="inter-brain coupling strength in phase 2")
    p.add_argument("--erd-gain", type=float, default=0.5,
                   help="task-window power gain on the cued electrodes")
    p.add_argument("--phase2-erd-gain", type=float, default=None,
                   help="override the ERD gain in phase 2")
    p.add_argument("--noise-rms", type=float, default=synth.DEFAULT_NOISE_RMS)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ibs", help="inter-brain synchrony tables and plots")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dyad", default=None)
    p.add_argument("--phase", type=int, default=2)
    p.add_argument("--band", default="all")
    p.add_argument("--out", default="ibs_out")
    p.add_argument("--window", type=float, default=ps.DEFAULT_WINDOW_S,
                   help="PLV window length in seconds")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--fdr", action="store_true",
                   help="Benjamini-Hochberg correction across electrode pairs")
    p.set_defaults(func=cmd_ibs)

    p = sub.add_parser("fbn", help="functional network metrics and phase contrasts")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dyad", default=None, help="restrict to one dyad")
    p.add_argument("--band", default="all")
    p.add_argument("--tau", type=float, default=bn.DEFAULT_TAU)
    p.add_argument("--n-refs", type=int, default=bn.DEFAULT_N_REFS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="fbn_out")
    p.set_defaults(func=cmd_fbn)

    p = sub.add_parser("classify", help="cross-validated decoding per subject and phase")
    p.add_argument("--manifest", required=True)
    p.add_argument("--dyad", default=None)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="classify_out")
    p.add_argument("--save-models", action="store_true",
                   help="save one pooled model per subject slot for live sessions")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("hub", help="serve a live collaborative session")
    p.add_argument("--addr", default=DEFAULT_ADDR)
    p.add_argument("--manifest", required=True)
    p.add_argument("--dyad", default=None)
    p.add_argument("--models", nargs=2, required=True, metavar=("SLOT0", "SLOT1"),
                   help="model JSON files for subject slots 0 and 1")
    p.add_argument("--timeout", type=float, default=hub_mod.DEFAULT_TIMEOUT_S)
    p.add_argument("--real-time", action="store_true",
                   help="pace trials by the schedule clock")
    p.add_argument("--free-assignment", action="store_true",
                   help="count cooperative trials covered in either role order")
    p.add_argument("--max-trials", type=int, default=None)
    p.add_argument("--log", default="session_log.jsonl")
    p.set_defaults(func=cmd_hub)

    p = sub.add_parser("client", help="stream one subject's data to a hub")
    p.add_argument("--addr", default=DEFAULT_ADDR)
    p.add_argument("--slot", type=int, required=True, choices=(0, 1))
    p.add_argument("--manifest", required=True)
    p.add_argument("--dyad", default=None)
    p.add_argument("--skip-trials", default="",
                   help="comma-separated trial indices to leave unanswered")
    p.set_defaults(func=cmd_client)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
