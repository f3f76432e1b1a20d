// Generated by svm_qp.py; do not edit.
pub const N: usize = 20;
pub const D: usize = 10;
pub const C: f64 = 1.0;
pub const X: [[f64; D]; N] = [
    [-1.278362, 1.241698, -0.028966, -0.954587, -0.415539, 1.215067, -0.561923, 0.739712, 0.718009, 0.200224],
    [-0.839205, 0.444701, 0.731207, -0.684688, 0.671384, 0.688174, 0.305202, -1.204357, -2.372262, -1.643813],
    [1.889272, -0.573071, 0.295947, -1.349732, -0.186523, 0.196552, 1.530999, 1.645073, -1.253183, 1.752819],
    [-1.153414, -0.585606, 0.624341, 0.08883, 1.0531, -0.074517, -1.313297, 0.783031, -0.237954, -0.110792],
    [0.700358, 0.097495, 0.539908, 1.320637, 0.81216, 0.790253, 0.545735, 0.865511, -0.826584, -1.760258],
    [-0.6722, 0.608923, 0.978224, -1.525529, -0.666085, -0.326818, -2.764227, 0.391677, 1.231317, 0.73122],
    [0.063084, -0.388223, 1.175957, 0.031113, 1.5729, -0.31118, -0.188364, 1.834155, -0.260477, -0.55028],
    [-0.319331, -0.289748, -2.422839, -0.435885, -0.173305, -1.498977, -0.287874, -1.292114, -0.37218, 1.83472],
    [2.435023, 0.727014, 1.77617, 0.176036, 1.008436, -0.053337, 1.166122, -0.167208, -0.876409, 1.451827],
    [0.002014, -0.906663, 0.63295, -0.55439, -0.06592, -0.717188, 1.075785, 1.980423, -0.051173, 1.132772],
    [1.124145, 0.678584, -1.702156, 0.294142, -0.380619, 0.332447, -0.258655, 2.09021, -1.119064, 1.079022],
    [-0.454257, -0.067617, -0.378446, 0.768578, 0.014665, -0.138027, -0.241163, -0.162161, -1.913177, 0.760006],
    [-1.573413, -0.6764, 0.517351, 0.589843, 0.394583, -1.217242, -0.196787, -0.940899, -1.40604, -0.830105],
    [0.598957, 0.154462, -1.025328, 0.224441, 0.88141, -0.289512, -0.196599, 0.327164, -1.084134, 0.190769],
    [0.252986, 0.515088, -1.873202, -1.45532, 1.204286, 0.974359, 0.46466, 1.082111, 0.291723, -0.299201],
    [0.38374, 0.166774, 0.079328, -1.991595, -1.031657, 0.573195, -1.170598, -2.299586, 1.905675, -1.167587],
    [-0.222529, 1.047411, -1.169303, 0.334783, -0.510556, -0.911425, -0.779028, 0.115852, 1.459179, -1.476121],
    [0.37892, 0.6207, -0.659388, -1.512289, -1.061214, -1.281848, 1.348877, 0.150431, 0.577157, -1.620509],
    [0.127112, -1.197882, -0.641599, 0.173459, -0.487741, -1.025071, 0.127461, -0.093012, -1.149382, 1.806103],
    [-0.434469, -0.903736, 0.235559, -2.111559, -0.339699, 0.124093, -0.620808, -1.050354, 0.33266, -1.203964],
];
pub const Y: [bool; N] = [false, true, true, false, false, false, true, true, true, true, false, true, true, false, false, false, false, true, true, false];
pub const OPTIMUM: f64 = 3.189286716191507;
