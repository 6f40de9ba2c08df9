#!/usr/bin/env python3
"""Regenerate tests/data/jupiter_2017-02-17_2028-12-28.txt without network.

Jupiter barycenter (NAIF 5) relative to the solar system barycenter from the
JPL DE421 kernel shipped in the `skyfield-data` package, rotated to the
ecliptic and mean equinox of J2000 (obliquity 84381.448 arcsec). One record
per day at 00:00 TDB, in the Horizons vector-table line format.

    pip install jplephem skyfield-data
    python3 tools/make_jupiter_fixture.py > tests/data/jupiter_2017-02-17_2028-12-28.txt
"""
import datetime as dt
import os
import sys

import numpy as np
from jplephem.spk import SPK

try:
    import skyfield_data
    default_kernel = os.path.join(os.path.dirname(skyfield_data.__file__), "data", "de421.bsp")
except ImportError:
    default_kernel = "de421.bsp"

AU_KM = 149597870.700
EPS = np.radians(84381.448 / 3600.0)
ROT = np.array([[1, 0, 0],
                [0, np.cos(EPS), np.sin(EPS)],
                [0, -np.sin(EPS), np.cos(EPS)]])
MONTHS = "Jan Feb Mar Apr May Jun Jul Aug Sep Oct Nov Dec".split()


def main():
    kernel = SPK.open(sys.argv[1] if len(sys.argv) > 1 else default_kernel)
    start = dt.date(2017, 2, 17)
    stop = dt.date(2028, 12, 28)
    n = (stop - start).days + 1
    jd0 = 2457801.5  # 2017-02-17 00:00 TDB
    jds = jd0 + np.arange(n)
    pos, vel = kernel[0, 5].compute_and_differentiate(jds)
    pos = (ROT @ pos).T / AU_KM
    vel = (ROT @ vel).T / AU_KM  # km/day -> AU/day
    print("# Jupiter barycenter (5) w.r.t. solar system barycenter (0)")
    print("# source: JPL DE421 via jplephem; ecliptic and mean equinox of J2000; TDB")
    print("# columns: date, X, Y, Z (AU), VX, VY, VZ (AU/day)")
    print(f"# records: {n}")
    for i in range(n):
        d = start + dt.timedelta(days=i)
        tag = f"A.D. {d.year:04d}-{MONTHS[d.month - 1]}-{d.day:02d} 00:00:00.0000"
        fields = ", ".join(f"{v: .15E}" for v in (*pos[i], *vel[i]))
        print(f"{tag}, {fields}")


if __name__ == "__main__":
    main()
