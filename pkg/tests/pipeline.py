"""The fixture pipeline whose outputs are pinned by tests/golden/."""

from pathlib import Path

from cryptohet.cli import main
from cryptohet.indicators import INDICATORS
from golden_compare import compare

DATA = Path(__file__).resolve().parent / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

STEPS = ("returns", "corr", "concentration", "xcorr", "dist_market_cap", "dist_reddit_subscribers")


def run_pipeline(root: Path) -> dict[str, Path]:
    """Run every step into its own directory under ``root``; return the step dirs."""
    d = {s: root / s for s in STEPS}
    panel = d["returns"] / "returns_panel.csv"
    snapshot = str(DATA / "fixture_snapshot.csv")
    cmds = [
        ["returns", str(DATA / "fixture_prices.csv"), "--align", "union-with-missing", "-o", str(d["returns"])],
        ["corr", str(panel), "--partial-anchor", "bitcoin", "--bins", "50", "--min-overlap", "3",
         "-o", str(d["corr"])],
        ["concentration", snapshot, "--indicators", ",".join(INDICATORS), "-o", str(d["concentration"])],
        ["xcorr", snapshot, "--transform", "both", "-o", str(d["xcorr"])],
        ["dist", snapshot, "--indicator", "market_cap", "--bins", "20", "-o", str(d["dist_market_cap"])],
        ["dist", snapshot, "--indicator", "reddit_subscribers", "--bins", "20",
         "-o", str(d["dist_reddit_subscribers"])],
    ]
    for argv in cmds:
        code = main(argv)
        if code != 0:
            raise RuntimeError(f"{argv[0]} exited with {code}")
    return d


def outputs(dirs: dict[str, Path]) -> dict[str, Path]:
    """Data files by name, leaving out run records and manifests."""
    out = {}
    for d in dirs.values():
        for p in sorted(d.iterdir()):
            if not p.name.endswith((".run.json", ".manifest.json")):
                out[p.name] = p
    return out


def golden_problems(dirs: dict[str, Path]) -> list[str]:
    got = outputs(dirs)
    want = {p.name for p in GOLDEN.iterdir()}
    problems = [f"{n}: not produced" for n in sorted(want - set(got))]
    problems += [f"{n}: no golden file" for n in sorted(set(got) - want)]
    for name in sorted(want & set(got)):
        problems += compare(got[name], GOLDEN / name)
    return problems


def differing_bytes(a: dict[str, Path], b: dict[str, Path]) -> list[str]:
    """Names of files (manifests included) whose bytes differ between two runs."""
    diff = []
    for step in a:
        names = sorted(p.name for p in a[step].iterdir() if not p.name.endswith(".run.json"))
        other = sorted(p.name for p in b[step].iterdir() if not p.name.endswith(".run.json"))
        if names != other:
            diff.append(f"{step}: file sets differ")
            continue
        diff += [n for n in names if (a[step] / n).read_bytes() != (b[step] / n).read_bytes()]
    return diff
