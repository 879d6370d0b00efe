// golden: reference soil, l = 0.05, d = 0.01, beta = 10 deg, v = 0.12
#[allow(clippy::excessive_precision)]
const SAND_GOLDEN: f64 = 0.0027852140755864417737;
#[allow(clippy::excessive_precision)]
const CLAY_GOLDEN: f64 = 1.1665364082744208088;
// (rho, g, c, w, l, d, beta_rad, v, sand, clay)
#[allow(clippy::excessive_precision)]
const RANDOM_POINTS: [[f64; 10]; 24] = [
    [2995.02, 0.0105878, 894.797, 0.0721597, 0.252542, 0.107938, 0.746773, 1.94408, 71.992613405836222401, 160.4014149014927585],
    [1206.4, 0.00435746, 1785.24, 0.106753, 0.260912, 0.10885, 0.68301, 0.770422, 6.1484038939257335441, 460.77058571420254684],
    [2914.25, 0.000188304, 1942.44, 0.0194565, 0.382782, 0.148212, 1.3069, 1.47041, 28.940431054772176554, 902.31348195274802761],
    [1122.43, 0.0433036, 1717.84, 0.132353, 0.0466057, 0.0580238, 0.894569, 0.806545, 7.5654259733601552791, 125.84363398195611651],
    [1202.64, 0.578346, 823.302, 0.207933, 0.288, 0.168245, -0.806308, 1.23251, 87.136536498558812118, 181.04785452239876019],
    [2165.65, 0.90319, 1998.43, 0.0315616, 0.485837, 0.0248192, 1.10692, 1.88938, 6.4830213270291447675, 35.167967511783109918],
    [1347.32, 0.0537791, 1008.64, 0.452919, 0.212945, 0.0683393, 0.518464, 0.0223032, 0.79269178013772156172, 143.55425912056324166],
    [1413.35, 0.0389179, 1297.79, 0.268389, 0.440963, 0.17761, 0.67304, 1.94584, 185.38748775333164702, 711.80229817160160909],
    [1377.87, 0.000103044, 443.231, 0.0884606, 0.166048, 0.0459373, -1.32568, 0.916505, 6.9836670970692839724, 94.010057653336573141],
    [2902.03, 4.97107, 1111.4, 0.209174, 0.477785, 0.0976998, 0.434199, 0.475511, 189.14432091109645481, 75.079524566281940483],
    [2567.62, 0.367036, 1216.59, 0.39817, 0.477072, 0.154063, -1.03166, 0.501524, 146.87581594061263484, 360.49032387734369102],
    [2048.74, 0.000499332, 61.3331, 0.382545, 0.244009, 0.13627, 0.217378, 1.55568, 64.700494424679042948, 150.21611251408345064],
    [1787.15, 0.0127896, 1155.47, 0.42778, 0.338379, 0.180444, -0.393245, 0.0885346, 1.3835858322435287382, 536.87466967320854596],
    [1038.89, 6.24691, 1900.5, 0.272091, 0.451149, 0.189018, 0.194087, 1.84388, 152.00471483484220827, 445.72241687399083633],
    [2806.18, 0.000903874, 551.464, 0.449898, 0.0228862, 0.162162, 0.350949, 0.417847, 28.424040617658435172, 284.12931605819980109],
    [1752.59, 2.14329, 906.55, 0.330368, 0.272678, 0.169136, -0.450844, 1.01442, 159.32944130259765879, 190.36098421761009463],
    [2099.67, 3.34348, 282.664, 0.165389, 0.370456, 0.0316488, -1.04388, 0.680814, 38.407479179654466226, 7.6359811890324973672],
    [2627.91, 0.00387303, 907.643, 0.119807, 0.387392, 0.179269, -0.0496968, 0.0820933, 0.043225342645481839558, 263.85003899154351162],
    [2829.46, 0.00602382, 1840.95, 0.358906, 0.431673, 0.076197, 0.0781264, 1.4435, 11.057143924239870313, 820.7202288049779519],
    [2580.44, 0.240276, 1505.53, 0.336196, 0.447091, 0.00937289, 0.763883, 0.141179, 1.0676058763130014993, 60.306681756290391628],
    [1668.9, 0.0161019, 705.414, 0.468252, 0.107461, 0.0818181, 0.587606, 1.98538, 185.46251301532457437, 334.79565440389310773],
    [2543.95, 0.631598, 1218.51, 0.402118, 0.219853, 0.00824973, 1.43341, 0.828161, 9.204094807947897493, 56.473867309375624875],
    [1206.12, 0.110782, 225.723, 0.0753098, 0.0931048, 0.0451308, 1.39558, 1.13596, 10.155918421822948783, 10.859281755145445429],
    [1287.23, 0.705583, 174.25, 0.459898, 0.247419, 0.0828986, 0.0708173, 1.4685, 9.8625665580560433206, 57.909981902982358155],
];
