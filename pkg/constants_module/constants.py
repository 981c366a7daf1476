from __future__ import annotations

# Shared vocabularies and experiment defaults used across modules.
# Reference rows were transcribed from the published SGCN/KASGCN comparison tables.

SGCN = "sgcn"
KASGCN_BSPLINE = "kasgcn-bspline"
KASGCN_FOURIER = "kasgcn-fourier"
KASGCN_LAPLACE = "kasgcn-laplace"
KASGCN_WAVELET = "kasgcn-wavelet"

VARIANTS = [SGCN, KASGCN_BSPLINE, KASGCN_FOURIER, KASGCN_LAPLACE, KASGCN_WAVELET]
KAN_VARIANTS = [KASGCN_BSPLINE, KASGCN_FOURIER, KASGCN_LAPLACE, KASGCN_WAVELET]

VARIANT_TO_KAN_KIND = {
    KASGCN_BSPLINE: "bspline",
    KASGCN_FOURIER: "fourier",
    KASGCN_LAPLACE: "laplace",
    KASGCN_WAVELET: "wavelet",
}

VARIANT_ALIASES = {
    "sgcn": SGCN,
    "kasgcn": KASGCN_BSPLINE,
    "kan": KASGCN_BSPLINE,
    "bspline": KASGCN_BSPLINE,
    "original": KASGCN_BSPLINE,
    "kasgcn-original": KASGCN_BSPLINE,
    "fourier": KASGCN_FOURIER,
    "laplace": KASGCN_LAPLACE,
    "wavelet": KASGCN_WAVELET,
}

TASKS = ["stats", "train", "cluster", "linksign", "similarity", "timesweep", "all"]

# ---- experiment defaults ----
LAYER_DIMS = [32, 32]
WEIGHT_DECAY = 1e-5
LEARNING_RATE = 0.001
LAMB = 1.0
EPOCHS = 1000
SEED = 42
REDUCTION_ITERATIONS = 10
REDUCTION_DIMENSIONS = 15
SPECTRAL_FEATURES = True
NORM = True
NORM_EMBED = True

GRID_SIZE = 5
SPLINE_ORDER = 3
SCALE_NOISE = 0.1
SCALE_BASE = 1.0
SCALE_SPLINE = 1.0
BASE_ACTIVATION = "silu"
GRID_EPS = 0.02
GRID_RANGE = (-1.0, 1.0)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

TEST_SIZE = 0.2
REPEATS = 10
CLUSTER_KS = [5, 10, 15]
TIMESWEEP_LAYERS = [2, 3, 4]

KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6

LOGREG_L2 = 1e-4
LOGREG_MAX_ITER = 1000
LOGREG_GRAD_TOL = 1e-6

SVD_OVERSAMPLES = 10

# Sign labels used by the pair classifier and the link-sign task.
POSITIVE = 1
NEGATIVE = -1
# Pair classifier column order.
CLASS_POSITIVE = 0
CLASS_NEGATIVE = 1
CLASS_NONE = 2

# ---- reference rows ----
# Vertices, edges and cycles cover the whole graph; the remaining columns are measured on the LCC.
GRAPH_STATS_REFERENCE = {
    "BitcoinAlpha": {"vertices": 3775, "edges": 14120, "cycles": 10346, "density": "< 0.01", "triads": 22153,
                     "avg_degree": 7.48, "median_degree": 2, "max_degree": 511, "pct_negative": 8.39},
    "BitcoinOTC": {"vertices": 5875, "edges": 21489, "cycles": 15615, "density": "0.01", "triads": 33493,
                   "avg_degree": 7.31, "median_degree": 2, "max_degree": 795, "pct_negative": 13.57},
    "WikiRFA": {"vertices": 7634, "edges": 167936, "cycles": 160303, "density": "< 0.01", "triads": 1240033,
                "avg_degree": 43.99, "median_degree": 13, "max_degree": 1223, "pct_negative": 22.98},
    "WikiElec": {"vertices": 7066, "edges": 100667, "cycles": 93602, "density": "< 0.01", "triads": 607279,
                 "avg_degree": 28.49, "median_degree": 4, "max_degree": 1065, "pct_negative": 21.94},
    "Chess": {"vertices": 7115, "edges": 55779, "cycles": 48665, "density": "< 0.01", "triads": 108584,
              "avg_degree": 15.67, "median_degree": 7, "max_degree": 181, "pct_negative": 24.15},
    "Congress": {"vertices": 219, "edges": 521, "cycles": 303, "density": "0.021", "triads": 212,
                 "avg_degree": 4.71, "median_degree": 3, "max_degree": 33, "pct_negative": 20.34},
    "PPI": {"vertices": 3058, "edges": 11860, "cycles": 8803, "density": "< 0.01", "triads": 3837,
            "avg_degree": 3.87, "median_degree": 2, "max_degree": 55, "pct_negative": 32.5},
}

# Community detection with K = 5: (pos_in, neg_out) for SGCN and KASGCN.
CLUSTERING_REFERENCE_K5 = {
    "Congress": {SGCN: (0.616, 0.961), KASGCN_BSPLINE: (0.566, 0.9584)},
    "BitcoinAlpha": {SGCN: (0.388, 0.8015), KASGCN_BSPLINE: (0.4093, 0.659)},
}

# Link sign prediction: (auc, f1).
LINKSIGN_REFERENCE = {
    "BitcoinAlpha": {SGCN: (0.783, 0.721), KASGCN_BSPLINE: (0.799, 0.690)},
    "BitcoinOTC": {SGCN: (0.840, 0.792), KASGCN_BSPLINE: (0.859, 0.761)},
    "Congress": {SGCN: (0.570, 0.63), KASGCN_BSPLINE: (0.499, 0.602)},
}

# Average cosine similarity between SGCN and KASGCN embeddings.
SIMILARITY_REFERENCE = {"BitcoinAlpha": -0.02, "BitcoinOTC": 0.01, "WikiElec": 0.072}
