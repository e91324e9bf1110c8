"""
Predicting grades and flagging at-risk students
===============================================

The regression experiment: a 70/30 split, 10-fold cross-validation of all
five regressors on the training part, test MAE per model, forest feature
importance, and the students whose predicted grade falls below 4.0.
"""

from motivscore.experiment import ExperimentConfig, run_regression_experiment

cfg = ExperimentConfig(task="regression", seed=0, synthetic_n=924)
report = run_regression_experiment(cfg)

print("constant-mean baseline MAE", round(report.split["baseline_mae"], 4))
for m in report.models:
    cv = m["cv"]
    print(f"{m['model']:<4} test MAE {m['test']['mae']:.4f}   "
          f"CV {cv['mean']:.4f} +/- {cv['sd']:.4f}")

print("\ntop features")
for r in report.importance[:4]:
    print(f"  {r['feature']:<18}{r['value']:.3f}")

risk = report.at_risk
print(f"\n{len(risk['flags'])} test students predicted below {risk['threshold']}",
      f"by {risk['model']}")
for flag in risk["flags"][:5]:
    print(f"  record {flag['index']:4d}: {flag['predicted_grade']:.2f}")
