"""Explicit-qubit vs effective absorber dynamics at three decay rates (fixed pump rate).

Usage: python scripts/elimination_scan.py
"""
from fockslice import checks


def main():
    for r in checks.elimination_scan():
        print(f"kappa={r['kappa']:.3g}  omega={r['omega']:.3g}  chi/kappa={r['chi_over_kappa']:.3f}  "
              f"max trace distance={r['max_trace_distance']:.3g}  "
              f"excited population={r['final_excited_population']:.2e}")


if __name__ == "__main__":
    main()
