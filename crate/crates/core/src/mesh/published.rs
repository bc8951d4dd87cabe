//! Vertex coordinates and edge lists of the two coarsest composite meshes,
//! as published (six decimals).

pub(super) const T0_VERTICES: [[f64; 2]; 29] = [
    [0.000000, 0.000000],
    [1.000000, 0.000000],
    [1.000000, 1.000000],
    [0.000000, 1.000000],
    [0.500000, 0.500000],
    [0.500000, 0.000000],
    [1.000000, 0.500000],
    [0.500000, 1.000000],
    [0.000000, 0.500000],
    [0.300000, 0.300000],
    [0.750000, 0.250000],
    [0.750000, 0.750000],
    [0.250000, 0.750000],
    [0.250000, 0.000000],
    [0.500000, 0.250000],
    [0.250000, 0.500000],
    [0.000000, 0.250000],
    [0.750000, 0.000000],
    [1.000000, 0.250000],
    [0.750000, 0.500000],
    [1.000000, 0.750000],
    [0.750000, 1.000000],
    [0.500000, 0.750000],
    [0.250000, 1.000000],
    [0.000000, 0.750000],
    [0.125000, 0.625000],
    [0.375000, 0.625000],
    [0.375000, 0.875000],
    [0.125000, 0.875000],
];

pub(super) const T0_EDGES: [[usize; 2]; 46] = [
    [0, 13], [0, 16], [1, 17], [1, 18], [2, 20], [2, 21], [3, 23], [3, 24], [4, 14], [4, 15],
    [4, 19], [4, 22], [4, 26], [5, 13], [5, 14], [5, 17], [6, 18], [6, 19], [6, 20], [7, 21],
    [7, 22], [7, 23], [8, 15], [8, 16], [8, 24], [8, 25], [9, 13], [9, 14], [9, 15], [9, 16],
    [10, 14], [10, 17], [10, 18], [10, 19], [11, 19], [11, 22], [12, 15], [12, 22], [12, 23],
    [12, 24], [12, 27], [12, 28], [15, 25], [15, 26], [22, 27], [24, 28],
];

pub(super) const T1_VERTICES: [[f64; 2]; 97] = [
    [0.000000, 0.000000],
    [1.000000, 0.000000],
    [1.000000, 1.000000],
    [0.000000, 1.000000],
    [0.500000, 0.500000],
    [0.500000, 0.000000],
    [1.000000, 0.500000],
    [0.500000, 1.000000],
    [0.000000, 0.500000],
    [0.275000, 0.275000],
    [0.750000, 0.250000],
    [0.750000, 0.750000],
    [0.250000, 0.750000],
    [0.250000, 0.000000],
    [0.500000, 0.250000],
    [0.250000, 0.500000],
    [0.000000, 0.250000],
    [0.750000, 0.000000],
    [1.000000, 0.250000],
    [0.750000, 0.500000],
    [1.000000, 0.750000],
    [0.750000, 1.000000],
    [0.500000, 0.750000],
    [0.250000, 1.000000],
    [0.000000, 0.750000],
    [0.121919, 0.089779],
    [0.354721, 0.153961],
    [0.409151, 0.365849],
    [0.092957, 0.360058],
    [0.625000, 0.125000],
    [0.875000, 0.125000],
    [0.875000, 0.375000],
    [0.625000, 0.375000],
    [0.625000, 0.625000],
    [0.875000, 0.625000],
    [0.875000, 0.875000],
    [0.625000, 0.875000],
    [0.125000, 0.625000],
    [0.375000, 0.625000],
    [0.375000, 0.875000],
    [0.125000, 0.875000],
    [0.125000, 0.000000],
    [0.264942, 0.157043],
    [0.134151, 0.215849],
    [0.000000, 0.125000],
    [0.375000, 0.000000],
    [0.500000, 0.125000],
    [0.346039, 0.270279],
    [0.500000, 0.375000],
    [0.375000, 0.500000],
    [0.285221, 0.378081],
    [0.125000, 0.500000],
    [0.000000, 0.375000],
    [0.625000, 0.000000],
    [0.750000, 0.125000],
    [0.625000, 0.250000],
    [0.875000, 0.000000],
    [1.000000, 0.125000],
    [0.875000, 0.250000],
    [1.000000, 0.375000],
    [0.875000, 0.500000],
    [0.750000, 0.375000],
    [0.625000, 0.500000],
    [0.750000, 0.625000],
    [0.625000, 0.750000],
    [0.500000, 0.625000],
    [1.000000, 0.625000],
    [0.875000, 0.750000],
    [1.000000, 0.875000],
    [0.875000, 1.000000],
    [0.750000, 0.875000],
    [0.625000, 1.000000],
    [0.500000, 0.875000],
    [0.250000, 0.625000],
    [0.125000, 0.750000],
    [0.000000, 0.625000],
    [0.375000, 0.750000],
    [0.375000, 1.000000],
    [0.250000, 0.875000],
    [0.125000, 1.000000],
    [0.000000, 0.875000],
    [0.062500, 0.562500],
    [0.187500, 0.562500],
    [0.187500, 0.687500],
    [0.062500, 0.687500],
    [0.312500, 0.562500],
    [0.437500, 0.562500],
    [0.437500, 0.687500],
    [0.312500, 0.687500],
    [0.312500, 0.812500],
    [0.437500, 0.812500],
    [0.437500, 0.937500],
    [0.312500, 0.937500],
    [0.062500, 0.812500],
    [0.187500, 0.812500],
    [0.187500, 0.937500],
    [0.062500, 0.937500],
];

pub(super) const T1_EDGES: [[usize; 2]; 168] = [
    [0, 41], [0, 44], [1, 56], [1, 57], [2, 68], [2, 69], [3, 79], [3, 80], [4, 48], [4, 49],
    [4, 62], [4, 65], [4, 86], [5, 45], [5, 46], [5, 53], [6, 59], [6, 60], [6, 66], [7, 71],
    [7, 72], [7, 77], [8, 51], [8, 52], [8, 75], [8, 81], [9, 42], [9, 43], [9, 47], [9, 50],
    [10, 54], [10, 55], [10, 58], [10, 61], [11, 63], [11, 64], [11, 67], [11, 70], [12, 73],
    [12, 74], [12, 76], [12, 78], [12, 89], [12, 94], [13, 41], [13, 42], [13, 45], [14, 46],
    [14, 47], [14, 48], [14, 55], [15, 49], [15, 50], [15, 51], [15, 73], [15, 82], [15, 85],
    [16, 43], [16, 44], [16, 52], [17, 53], [17, 54], [17, 56], [18, 57], [18, 58], [18, 59],
    [19, 60], [19, 61], [19, 62], [19, 63], [20, 66], [20, 67], [20, 68], [21, 69], [21, 70],
    [21, 71], [22, 64], [22, 65], [22, 72], [22, 76], [22, 90], [23, 77], [23, 78], [23, 79],
    [24, 74], [24, 75], [24, 80], [24, 93], [25, 41], [25, 42], [25, 43], [25, 44], [26, 42],
    [26, 45], [26, 46], [26, 47], [27, 47], [27, 48], [27, 49], [27, 50], [28, 43], [28, 50],
    [28, 51], [28, 52], [29, 46], [29, 53], [29, 54], [29, 55], [30, 54], [30, 56], [30, 57],
    [30, 58], [31, 58], [31, 59], [31, 60], [31, 61], [32, 48], [32, 55], [32, 61], [32, 62],
    [33, 62], [33, 65], [34, 60], [34, 63], [35, 67], [35, 70], [36, 64], [36, 72], [37, 51],
    [37, 73], [37, 74], [37, 75], [37, 83], [37, 84], [38, 49], [38, 65], [38, 73], [38, 76],
    [38, 87], [38, 88], [39, 72], [39, 76], [39, 77], [39, 78], [39, 91], [39, 92], [40, 74],
    [40, 78], [40, 79], [40, 80], [40, 95], [40, 96], [49, 85], [49, 86], [51, 81], [51, 82],
    [65, 87], [72, 91], [73, 83], [73, 88], [74, 93], [74, 94], [75, 84], [76, 89], [76, 90],
    [78, 92], [78, 95], [80, 96],
];
