"""Regenerate the fixture files under fixtures/ from the transcribed values."""

from pathlib import Path

import numpy as np

from qmarginals import fileio

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

# bipartite 2x3 instance with a prescribed spectrum
RHO_A_2x3 = np.array([
    [0.52, 0.3923],
    [0.3923, 0.48],
])
RHO_B_2x3 = np.array([
    [0.4922, 0.2729, 0.3138],
    [0.2729, 0.1980, 0.1846],
    [0.3138, 0.1846, 0.3098],
])
SPECTRUM_2x3 = [0.8329, 0.0781, 0.0529, 0.0238, 0.0109, 0.0015]

# low-rank benchmark spectra
SPECTRA = {
    "rank_3x4": ([0.5951, 0.2341, 0.1708],
                 [0.6124, 0.1926, 0.1654, 0.0296]),
    "rank_3x6": ([0.8213, 0.1234, 0.0553],
                 [0.5720, 0.3068, 0.1000, 0.0189, 0.0020, 0.0003]),
    "rank_6x8": ([0.2272, 0.2136, 0.1946, 0.1474, 0.1341, 0.0831],
                 [0.2399, 0.1699, 0.1638, 0.1463, 0.1246, 0.0851, 0.0407, 0.0297]),
}

# tripartite 2x2x2 instance: targets on subsystems {2,3} and {1,2}
RHO_23 = np.array([
    [0.181375, 0.161, 0.1678, 0.1417],
    [0.161, 0.314875, 0.2653, 0.1937],
    [0.1678, 0.2653, 0.307275, 0.1863],
    [0.1417, 0.1937, 0.1863, 0.196475],
])
RHO_12 = np.array([
    [0.214875, 0.1653, 0.1926, 0.1934],
    [0.1653, 0.264475, 0.2166, 0.1888],
    [0.1926, 0.2166, 0.281375, 0.1962],
    [0.1934, 0.1888, 0.1962, 0.239275],
])
SOLUTION_RANK6 = np.array([
    [0.0811, 0.0809, 0.0747, 0.0654, 0.0850, 0.0901, 0.0923, 0.07],
    [0.0809, 0.1338, 0.1189, 0.0906, 0.0898, 0.1076, 0.1003, 0.1011],
    [0.0747, 0.1189, 0.1637, 0.0893, 0.1053, 0.0658, 0.0944, 0.0947],
    [0.0654, 0.0906, 0.0893, 0.1008, 0.0728, 0.1113, 0.1013, 0.0944],
    [0.0850, 0.0898, 0.1053, 0.0728, 0.1003, 0.0801, 0.0931, 0.0763],
    [0.0901, 0.1076, 0.0658, 0.1113, 0.0801, 0.1811, 0.1464, 0.1031],
    [0.0923, 0.1003, 0.0944, 0.1013, 0.0931, 0.1464, 0.1436, 0.097],
    [0.07, 0.1011, 0.0947, 0.0944, 0.0763, 0.1031, 0.097, 0.0957],
])
SPECTRUM_222 = [0.8034, 0.0889, 0.05204, 0.0284, 0.0188, 0.0051, 0.0032, 0.0001]
SOLUTION_SPECTRUM = np.array([
    [0.1507, 0.1056, 0.0999, 0.0769, 0.1047, 0.0966, 0.1264, 0.1293],
    [0.1056, 0.1209, 0.0977, 0.0716, 0.0813, 0.0792, 0.1248, 0.1018],
    [0.0999, 0.0977, 0.1144, 0.0680, 0.0879, 0.0685, 0.1241, 0.1100],
    [0.0769, 0.0716, 0.0680, 0.1274, 0.1053, 0.0559, 0.0836, 0.0821],
    [0.1047, 0.0813, 0.0879, 0.1053, 0.1160, 0.0818, 0.0990, 0.1055],
    [0.0966, 0.0792, 0.0685, 0.0559, 0.0818, 0.0832, 0.0795, 0.0870],
    [0.1264, 0.1248, 0.1241, 0.0836, 0.0990, 0.0795, 0.1549, 0.1297],
    [0.1293, 0.1018, 0.1100, 0.0821, 0.1055, 0.0870, 0.1297, 0.1324],
])

# twofold symmetric extension: the same target on {1,2} and {1,3}
RHO_12_13 = np.array([
    [0.2471, 0.1842, 0.1738, 0.2546],
    [0.1842, 0.2277, 0.1386, 0.2144],
    [0.1738, 0.1386, 0.182, 0.2303],
    [0.2546, 0.2144, 0.2303, 0.3432],
])
SOLUTION_EXTENSION = np.array([
    [0.1302, 0.1096, 0.1111, 0.1071, 0.0615, 0.1156, 0.1151, 0.1470],
    [0.1096, 0.1169, 0.1147, 0.0731, 0.0554, 0.1123, 0.1139, 0.1395],
    [0.1111, 0.1147, 0.1169, 0.0746, 0.0547, 0.1152, 0.1123, 0.1390],
    [0.1071, 0.0731, 0.0746, 0.1108, 0.0483, 0.0839, 0.0832, 0.1021],
    [0.0615, 0.0554, 0.0547, 0.0483, 0.0322, 0.0649, 0.0650, 0.0789],
    [0.1156, 0.1123, 0.1152, 0.0839, 0.0649, 0.1498, 0.1427, 0.1653],
    [0.1151, 0.1139, 0.1123, 0.0832, 0.0650, 0.1427, 0.1408, 0.1641],
    [0.1470, 0.1395, 0.1390, 0.1021, 0.0789, 0.1653, 0.1641, 0.2024],
])


def main():
    b23 = ROOT / "bipartite_2x3"
    b23.mkdir(parents=True, exist_ok=True)
    fileio.write_matrix(b23 / "rho_a.json", RHO_A_2x3, (2,))
    fileio.write_matrix(b23 / "rho_b.json", RHO_B_2x3, (3,))
    fileio.write_spectrum(b23 / "target_spectrum.json", SPECTRUM_2x3)

    for name, (sa, sb) in SPECTRA.items():
        d = ROOT / name
        d.mkdir(parents=True, exist_ok=True)
        fileio.write_spectrum(d / "spectrum_a.json", sa)
        fileio.write_spectrum(d / "spectrum_b.json", sb)

    t222 = ROOT / "tripartite_222"
    t222.mkdir(parents=True, exist_ok=True)
    fileio.write_matrix(t222 / "rho_23.json", RHO_23, (2, 2))
    fileio.write_matrix(t222 / "rho_12.json", RHO_12, (2, 2))
    fileio.write_matrix(t222 / "solution_rank6.json", SOLUTION_RANK6, (2, 2, 2))
    fileio.write_spectrum(t222 / "target_spectrum.json", SPECTRUM_222)
    fileio.write_matrix(t222 / "solution_spectrum.json", SOLUTION_SPECTRUM, (2, 2, 2))

    ext = ROOT / "twofold_extension_222"
    ext.mkdir(parents=True, exist_ok=True)
    fileio.write_matrix(ext / "rho_12_13.json", RHO_12_13, (2, 2))
    fileio.write_matrix(ext / "solution.json", SOLUTION_EXTENSION, (2, 2, 2))
    print(f"fixtures written under {ROOT}")


if __name__ == "__main__":
    main()
