"""Pairwise sufficient conditions versus diagonal dominance along a run."""

from simplexmatch import EnergyContext, ModelSpec, StepSizeRule, run_emdgm, sample_model
from simplexmatch.diagnostics import grampa_pd_certificate, property_report

A, B, perm = sample_model(ModelSpec("CGW", 300, 0.1), seed=4)


def show(k, X, E, gamma):
    r = property_report(X, perm)
    print(f"k={k:2d}  E={E:.3e}  max {r.frac_suffcond_max:.4f}  sum {r.frac_suffcond_sum:.4f}  "
          f"diag-dom {r.frac_diag_dominant_rows:.3f}  overlap {r.overlap_after_rounding:.3f}")


run_emdgm(EnergyContext(A, B), 10, StepSizeRule.dynamic_md(), callback=show)

cert = grampa_pd_certificate(A, 0.2)
print("spectral kernel positive definite:", cert.positive_definite, f"({cert.method}, {cert.precision} bits)")
