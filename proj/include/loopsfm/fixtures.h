#pragma once

#include <array>
#include <vector>

#include "loopsfm/frames_io.h"

// Data of the published 19-frame worked example for the loop with link
// lengths (2, 3, 4, 1).
namespace loopsfm::fixtures {

inline constexpr std::array<double, 4> kTrueSquaredLengths = {4, 9, 16, 1};

// Projected distances |P'Q'|, |Q'R'|, |R'S'|, |S'P'| for frames 1..19.
inline constexpr std::array<std::array<double, 4>, 19> kPublishedDistances = {{
    {1.95661, 1.44393, 3.13125, 0.961803},
    {1.93014, 2.91888, 3.97348, 0.956746},
    {1.77619, 1.90047, 2.0017, 0.974922},
    {1.91128, 1.42811, 2.28367, 0.998392},
    {1.9462, 2.92254, 3.98388, 0.989842},
    {1.99945, 2.97997, 3.90664, 0.884827},
    {1.81095, 1.96477, 3.02693, 0.865462},
    {1.98808, 2.58903, 3.41279, 0.614607},
    {1.99891, 2.11134, 2.9322, 0.852155},
    {1.98413, 2.76734, 3.58316, 0.929779},
    {1.80399, 2.84376, 3.97649, 0.940047},
    {1.71086, 2.55302, 3.93766, 0.986488},
    {1.75558, 2.47493, 3.85948, 0.949584},
    {1.8613, 1.78228, 2.53998, 0.99849},
    {1.99357, 1.47441, 2.84904, 0.999398},
    {1.75743, 2.2873, 2.61136, 0.990972},
    {1.66138, 1.41837, 2.12216, 0.930475},
    {1.99832, 2.68278, 3.63783, 0.915393},
    {1.84269, 2.09825, 1.97617, 0.831109},
}};

// Published coefficients f0..f19 for frames 1..19, six significant digits.
inline constexpr std::array<std::array<double, 20>, 19> kPublishedCoefficients = {{
    {-2607.53, -407.58, -23.3146, 1006.6, 2345.37, 233.006, 532.301, -54.8179, 785.302, 496.262, -156.663, -64.7885, -342.622, -746.125, -681.854, 3.82831, 2.08493, 9.80471, 0.925065, 1},
    {-2168.92, -6299.13, -4409.23, 3592.69, 14186.1, 1518.94, 237.559, -302.159, 2611.87, 1782.89, -291.517, -3285.47, 190.944, -521.13, -1941.92, 3.72543, 8.51988, 15.7885, 0.915362, 1},
    {533.38, -365.78, -266.823, -160.799, 661.211, 2.17795, -34.0638, -60.0113, 270.887, 181.345, 171.155, -270.569, 171.824, -225.21, -207.536, 3.15486, 3.61179, 4.00681, 0.950472, 1},
    {53.9041, -247.129, -359.916, 178.546, 491.628, -16.0673, 144.302, -91.9577, 292.252, 156.481, 125.421, -114.827, 60.5441, -397.509, -158.64, 3.65301, 2.03949, 5.21517, 0.996787, 1},
    {-2902.02, -6290.81, -4512.79, 3783.09, 14225.6, 1524.72, 243.085, -316.052, 2621.5, 1780.31, -293.861, -3286.55, 199.117, -528.368, -1943.91, 3.78771, 8.54125, 15.8713, 0.979787, 1},
    {5169.05, -8257.51, -4969.48, 2930.08, 15004.1, 1392.25, 138.853, -349.289, 2634.06, 1823.14, 6.09405, -3374.7, 375.802, -742.843, -1903.37, 3.99778, 8.88019, 15.2619, 0.782918, 1},
    {-602.866, -1259.51, -1187.45, 965.538, 3043.3, 299.515, 207.413, -134.336, 826.781, 625.601, -10.2943, -676.524, 29.3802, -480.488, -687.047, 3.27955, 3.86034, 9.16229, 0.749025, 1},
    {7350.53, -5305.18, -3401.72, 939.297, 9075.91, 629.862, 100.648, -241.89, 1679.41, 1301.47, 252.188, -1918.18, 345.7, -832.739, -1316.47, 3.95246, 6.70309, 11.6471, 0.377742, 1},
    {1995.86, -1955.56, -1787.29, 605.637, 3567.26, 192.145, 123.203, -189.57, 875.097, 676.047, 220.221, -793.006, 237.396, -659.423, -682.11, 3.99562, 4.45775, 8.59777, 0.726168, 1},
    {4358.75, -5749.96, -3613.83, 1911.79, 9637.14, 893.417, 77.4807, -320.514, 1900.99, 1323.33, 165.563, -2364.95, 394.058, -710.478, -1358.9, 3.93679, 7.65817, 12.839, 0.864489, 1},
    {-5982.04, -4177.35, -3376.89, 3389.65, 12711.5, 1588.96, 297.994, -213.503, 2495.48, 1678.93, -545.265, -3129.51, 5.43114, -270.197, -1908.32, 3.25437, 8.08695, 15.8124, 0.883689, 1},
    {-10819.7, -705.908, -1668.56, 2962.61, 10568.6, 1436.68, 489.941, -70.8913, 2125.17, 1452.23, -873.882, -2269.53, -357.967, -83.7823, -1847.97, 2.92705, 6.51791, 15.5051, 0.973158, 1},
    {-8864.45, -1201.6, -1728.44, 2732.44, 10033.4, 1248.24, 479.038, -79.981, 1981.56, 1405.98, -731.685, -1999.11, -322.995, -227.646, -1753.4, 3.08205, 6.12529, 14.8956, 0.901709, 1},
    {244.05, -671.446, -712.076, 374.275, 1200.91, 66.9038, 101.217, -132.561, 447.015, 307.911, 141.665, -342.311, 128.759, -405.471, -313.128, 3.46446, 3.17654, 6.45152, 0.996982, 1},
    {-1097.81, -574.514, -478.336, 778.026, 1400.81, 97.6985, 360.299, -112.597, 587.631, 352.713, 36.9919, -120.19, -106.042, -673.335, -423.168, 3.97431, 2.17387, 8.11704, 0.998796, 1},
    {1383.22, -1383.53, -739.243, 110.211, 1890.16, 213.264, -54.2471, -157.639, 619.433, 386.147, 233.334, -792.375, 282.885, -342.499, -388.302, 3.08854, 5.23172, 6.81921, 0.982025, 1},
    {16.9022, -190.213, -227.683, 137.781, 340.682, 10.5107, 74.8051, -69.7569, 207.994, 126.42, 80.2594, -119.161, 52.3718, -234.168, -129.275, 2.76018, 2.01179, 4.50357, 0.865783, 1},
    {2409.01, -5327.86, -3730.86, 2269.42, 10094.4, 891.772, 170.395, -296.226, 1923.24, 1396.35, 51.5129, -2231.98, 285.128, -727.435, -1462.76, 3.99327, 7.19729, 13.2338, 0.837944, 1},
    {1059.24, -592.144, -279.903, -445.314, 1078.64, 4.91514, -69.1469, -36.6278, 364.45, 229.562, 252.165, -365.407, 222.826, -291.145, -311.592, 3.3955, 4.40265, 3.90527, 0.690742, 1},
}};

// Published solution x1..x19 of the 19x19 system.
inline constexpr std::array<double, 19> kPublishedSolution = {
    4.00415,  8.98225,  15.9834,  0.999825, 9.36547,  73.8661,  248.763,
    -5.91918, 29.1833,  57.1582,  -2.78924, 136.854,  2.10081,  9.15377,
    -7655.73, -5115.85, 3834.1,   15333.2,  -13.2689};

// Published x1..x4 when positions are known to three leading digits.
inline constexpr std::array<double, 4> kPublishedNoisySolution = {
    3.88039, 8.55283, 15.1446, 0.976372};

std::vector<FrameRecord> PublishedRecords();

}  // namespace loopsfm::fixtures
