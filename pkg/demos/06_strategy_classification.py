"""
Classifying study strategies, with and without leakage
======================================================

Deep/Surface classification on a 79:21 cohort.  The paper-faithful mode
oversamples the whole dataset before the 80/20 split, so duplicated
minority students can sit in both train and test.  The leakage-safe mode
splits first and oversamples only the training part.
"""

from motivscore.experiment import ExperimentConfig, run_classification_experiment

for mode in ("paper-faithful", "leakage-safe"):
    cfg = ExperimentConfig(task="classification", seed=0, balancing=mode)
    report = run_classification_experiment(cfg)
    s = report.split
    print(f"\n{mode}: {s['n_train']} train / {s['n_test']} test rows,",
          f"test classes {s['test_counts']}")
    print(f"{'model':<6}{'acc':>7}{'prec':>7}{'rec':>7}{'f1':>7}   tp  fp  tn  fn")
    for m in report.models:
        t = m["test"]
        print(f"{m['model']:<6}{t['accuracy']:7.3f}{t['precision']:7.3f}{t['recall']:7.3f}"
              f"{t['f1']:7.3f}  {t['tp']:3d} {t['fp']:3d} {t['tn']:3d} {t['fn']:3d}")
    for w in report.warnings:
        print("warning:", w)
