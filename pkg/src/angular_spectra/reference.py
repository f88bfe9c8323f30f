"""Reference values for the reproduction runs.

Spectra are stored as ``(points, intervals)`` with intervals ascending;
dichotomy spectra as ascending interval lists.  Values are as printed, so
most carry three or four decimals.
"""

HENON_SIGMA1 = 1.33566342
HENON_SIGMA2 = 1.32818438

HENON_VARIATIONAL = {
    50: {"ed": [(0.775, 0.787), (1.467, 1.482)],
         "sigma1": ([0.358], [(1.108, 1.264)]), "sigma2": ([0.487], [(1.211, 1.275)])},
    100: {"ed": [(0.776, 0.785), (1.468, 1.482)],
          "sigma1": ([0.178], [(1.222, 1.307)]), "sigma2": ([0.242], [(1.289, 1.296)])},
    1000: {"ed": [(0.779, 0.784), (1.470, 1.478)],
           "sigma1": ([0.018], [(1.325, 1.333)]), "sigma2": ([0.024], [(1.324, 1.325)])},
    2000: {"ed": [(0.779, 0.784), (1.471, 1.477)],
           "sigma1": ([0.009], [(1.330, 1.331)]), "sigma2": ([0.012], [(1.326, 1.327)])},
}

_AUTO_ED = [(0.781, 0.782), (1.473, 1.474)]
HENON_AUTONOMOUS = {
    50: {"ed": _AUTO_ED, "sigma1": ([1e-16], [(1.328, 1.344)]), "sigma2": ([1e-16], [(1.320, 1.337)])},
    100: {"ed": _AUTO_ED, "sigma1": ([1e-16], [(1.328, 1.341)]), "sigma2": ([1e-16], [(1.321, 1.334)])},
    1000: {"ed": _AUTO_ED, "sigma1": ([1e-16], [(1.335, 1.336)]), "sigma2": ([1e-15], [(1.328, 1.328)])},
    2000: {"ed": _AUTO_ED, "sigma1": ([1e-16], [(1.335, 1.336)]), "sigma2": ([1e-15], [(1.328, 1.328)])},
}

HENON_MULTIHUMP = {
    50: {"ed": [(0.7230, 0.7234), (0.8298, 0.8302), (1.4992, 1.4994)],
         "sigma1": ([0.353, 1.135, 1.260], []), "sigma2": ([0.480, 1.248, 1.264], [])},
    100: {"ed": [(0.7492, 0.7494), (0.8077, 0.8079), (1.4868, 1.4870)],
          "sigma1": ([0.177, 1.229, 1.300], []), "sigma2": ([0.239, 1.295, 1.296], [])},
    200: {"ed": [(0.7634, 0.7662), (0.7935, 0.7966), (1.4775, 1.4827)],
          "sigma1": ([0.088, 1.281, 1.318], []), "sigma2": ([0.120, 1.312, 1.313], [])},
    400: {"ed": [(0.7733, 0.7884), (1.4741, 1.4791)],
          "sigma1": ([0.044], [(1.311, 1.314)]), "sigma2": ([0.060], [(1.320, 1.321)])},
}

LORENZ = {
    0.05: {"ed": [(0.4821, 0.4833), (0.9995, 1.0005), (1.0445, 1.0478)],
           "sigma1": ([0.2039, 0.3803, 0.4234], []), "sigma2": ([0.0689, 0.3604, 0.4188], [])},
    0.1: {"ed": [(0.2325, 0.2332), (0.9995, 1.0007), (1.0928, 1.0971)],
          "sigma1": ([0.3925, 0.7282, 0.8268], []), "sigma2": ([0.1356, 0.7021, 0.8197], [])},
    0.2: {"ed": [(0.0542, 0.0544), (0.9994, 1.0006), (1.1956, 1.2004)],
          "sigma1": ([0.6552, 0.7334, 0.9727], []), "sigma2": ([0.2475, 0.7934, 0.9752], [])},
}

LORENZ_ANGLE_AVERAGE = {0.05: 0.4227, 0.1: 0.8322, 0.2: 1.0993}

LORENZ_CONTINUOUS = {
    0.025: (8.4798, 8.3816),
    0.05: (8.4672, 8.3753),
    0.1: (8.2896, 8.2209),
    0.2: (4.8752, 4.8941),
}
