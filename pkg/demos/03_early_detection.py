"""How early is the structural signal readable?

Truncates every cascade to a ladder of observation windows measured from
its first tweet, re-extracts features at each cutoff, and cross-validates
the classifier on each snapshot. Classification quality as a function of
how long the articles were watched tells you whether the method needs a
week of diffusion or works within the first hour.

Run with:  python demos/03_early_detection.py
"""

from diffnet.experiments import temporal_sweep
from diffnet.ingest import filter_min_tweets, group_cascades
from diffnet.synth import default_config, generate_corpus

records, labels = generate_corpus(default_config(seed=0))
label_map = {lab.article_id: lab for lab in labels}
cascades, _ = group_cascades(records, label_map)
kept = filter_min_tweets(cascades, 50)
print(f"sweeping {len(kept)} articles over 7 observation windows\n")


def pretty(seconds: int) -> str:
    for unit, size in (("d", 86400), ("h", 3600), ("m", 60)):
        if seconds % size == 0:
            return f"{seconds // size}{unit}"
    return f"{seconds}s"


print(f"{'window':>8} {'AUROC':>8} {'+/-':>8} {'macro F1':>9} {'+/-':>8}")
series = temporal_sweep(kept, seed=0)
for lifetime, report in series:
    print(f"{pretty(lifetime):>8} {report.mean('AUROC'):>8.4f} "
          f"{report.std('AUROC'):>8.4f} {report.mean('macro_f1'):>9.4f} "
          f"{report.std('macro_f1'):>8.4f}")

first = series[0][1].mean("AUROC")
last = series[-1][1].mean("AUROC")
print(f"\nfull-week AUROC {last:.4f} vs first-hour {first:.4f} "
      f"({last - first:+.4f}); most of the signal is present within a day.")
