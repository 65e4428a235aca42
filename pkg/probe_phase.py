import time

import numpy as np

from toepbound.analysis import GridSpec, SpectrumModel, power_bound, resolvent_condition, spectral_radius
from toepbound.operators import build_operator
from toepbound.symbols import Family, FamilyParams

print("== phase invariance: M-hat and P-hat at beta vs |beta| ==", flush=True)
for family, betas, model_of in [
    (Family.CONJ_SHIFT, [0.6, 0.6j], lambda dim: SpectrumModel.unit_disk()),
    (Family.REAL_PART, [0.8, 0.8j], lambda dim: SpectrumModel.interval()),
]:
    got = {}
    for beta in betas:
        a = build_operator(FamilyParams(family=family, beta=beta), dim=256, mode="closed-form")
        t0 = time.time()
        m = power_bound(a, n_max=32)
        p = resolvent_condition(a, model_of(256), GridSpec.default())
        got[beta] = (m.value, p.value, time.time() - t0)
    (m0, p0, _), (m1, p1, dt) = got[betas[0]], got[betas[1]]
    print(f"  {family.name}: M({betas[0]})={m0:.12f} M({betas[1]})={m1:.12f} |dM|={abs(m0-m1):.3e}", flush=True)
    print(f"  {family.name}: P({betas[0]})={p0:.12f} P({betas[1]})={p1:.12f} |dP|={abs(p0-p1):.3e}  ({dt:.1f}s/beta)", flush=True)

print("== real-part closed-form spectral radius, N=256 ==", flush=True)
for beta in [0.5, 0.8j]:
    a = build_operator(FamilyParams(family=Family.REAL_PART, beta=beta), dim=256, mode="closed-form")
    print(f"  beta={beta}: rho={spectral_radius(a):.12f}", flush=True)
