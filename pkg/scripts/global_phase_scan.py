"""Oracle HD sensitivity with and without the global phase factor.

Vacuum in port 1 and a Kerr state in port 2; prints the best ratio to the SNL
over a (gamma, phi) grid for each convention.

    python scripts/global_phase_scan.py [--beta 2] [--gammas 30] [--phis 256]
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from sksmzi.oracle import Convention, input_state, oracle_sensitivity
from sksmzi.params import InputParams


@dataclass(frozen=True)
class ScanConfig:
    beta: float = 2.0
    gamma_max: float = 0.3
    gammas: int = 30
    phis: int = 256


def scan(cfg: ScanConfig, convention: Convention) -> tuple[float, float, float]:
    snl = 1.0 / cfg.beta
    best = (math.inf, math.nan, math.nan)
    for g in np.linspace(cfg.gamma_max / cfg.gammas, cfg.gamma_max, cfg.gammas):
        p = InputParams(0.0, cfg.beta, gamma=float(g))
        state = input_state(0.0, p)
        for phi in np.linspace(0, 2 * math.pi, cfg.phis, endpoint=False):
            d = oracle_sensitivity("hd", 0.0, p, phi, convention, state=state).delta_phi / snl
            if d < best[0]:
                best = (d, float(g), float(phi))
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--gammas", type=int, default=30)
    ap.add_argument("--phis", type=int, default=256)
    args = ap.parse_args(argv)
    cfg = ScanConfig(beta=args.beta, gammas=args.gammas, phis=args.phis)
    for conv in Convention:
        ratio, g, phi = scan(cfg, conv)
        print(f"{conv.name:22s} min ratio {ratio:.6f} at gamma {g:.4f}, phi {phi:.4f}")


if __name__ == "__main__":
    main()
