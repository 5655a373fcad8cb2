"""Generate the synthetic accuracy table bundled as ``results_synthetic.csv``.

The numbers are not measurements. They follow a smooth saturating curve in
model size, add a precision penalty that shrinks for larger models, and
order the modalities voice > face > fusion, which is enough to exercise the
ingestion path and the front extraction end to end.

    python demos/make_synthetic_results.py > src/tinydse/data/results_synthetic.csv
"""

import math

from tinydse.archmodel import default_archs
from tinydse.footprint import DEFAULT_SCHEMES

MODALITY_FLOOR = {"face": 9.5, "voice": 16.0, "fusion": 6.0}
SCHEME_PENALTY = {"float32": 0.0, "fixed8": 0.4, "xnor_3_1": 2.5, "xnor_2_1": 3.5, "xnor_2_2": 2.0}


def eer_pct(k: int, scheme: str, modality: str) -> float:
    base = MODALITY_FLOOR[modality] + 6.0 * math.exp(-0.9 * k)
    penalty = SCHEME_PENALTY[scheme] * (1 + 3.0 * math.exp(-0.8 * k))
    return round(base + penalty, 3)


def main():
    print("arch,scheme,modality,eer_pct,frr_at_far_1_pct,frr_at_far_5_pct,frr_at_far_10_pct")
    for k, name in enumerate(default_archs()):
        for scheme in DEFAULT_SCHEMES:
            for modality in ("face", "voice", "fusion"):
                e = eer_pct(k, scheme.tag, modality)
                frr1 = min(100.0, round(3.2 * e, 3))
                frr5 = round(1.6 * e, 3)
                frr10 = round(0.85 * e, 3)
                print(f"{name},{scheme.tag},{modality},{e:.3f},{frr1:.3f},{frr5:.3f},{frr10:.3f}")


if __name__ == "__main__":
    main()
