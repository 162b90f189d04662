"""Plateau fidelity of the superposition scenarios over omega_bar_3 in [0.5, 2].

Usage: python scripts/superposition_scan.py [--out DIR]
"""
import argparse
import json

from fockslice import experiments as ex


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--out", default=None)
    args = p.parse_args()
    results = []
    for cfg in ex.fig1_configs():
        if cfg.kind != "superposition_protection":
            continue
        scan = ex.omega_bar_3_scan(cfg)
        results.append(scan)
        print(cfg.name)
        for r in scan["rows"]:
            change = r["plateau_change_last_extension"]
            print(f"  omega_bar_3={r['omega_bar_3']:.1f}  F={r['plateau_fidelity']:.4f}  dim={r['dim']}  "
                  f"converged={r['truncation_converged']}  "
                  f"last-extension change={'-' if change is None else f'{change:.1e}'}")
        print(f"  within {scan['target']} +/- {scan['tolerance']}: {scan['meeting_values']}")
    (ex.output_dir(args.out) / "omega_bar_3_scan.json").write_text(json.dumps(ex._jsonable(results), indent=2))


if __name__ == "__main__":
    main()
