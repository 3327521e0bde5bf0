#pragma once

#include <string>
#include <vector>

#include "hrmc/observed.hpp"
#include "hrmc/rng.hpp"
#include "hrmc/subspace.hpp"
#include "hrmc/types.hpp"

namespace hrmc {

/// Fully known generated instance: the dense matrix, the per-column subspace
/// labels, and the true subspaces.
struct GroundTruth {
    Matrix full;                // n x N
    std::vector<Index> labels;  // subspace index per column, in [0, k)
    std::vector<Subspace> subspaces;
    std::string model;
};

struct SyntheticConfig {
    Index n = 100;
    Index N = 5000;
    Index k = 10;
    Index r = 5;
    /// Subspace draws closer than this (smallest principal angle, radians)
    /// to an already accepted subspace are rejected and redrawn.
    double min_principal_angle = 0.2;
    Index max_redraws = 100;
};

/// k independent r-dimensional Gaussian subspaces with N/k unit-norm columns
/// per subspace drawn from N(0, U U^T).
GroundTruth gen_union_of_subspaces(const SyntheticConfig& cfg, Rng& rng);

struct HopcountConfig {
    Index n_monitors = 75;
    Index n_hosts = 2700;
    Index k_subnets = 12;
    int border_hop_min = 5;  // monitor-to-border hop range (direct backend)
    int border_hop_max = 30;
    int offset_min = 1;  // host-to-border hop range
    int offset_max = 5;
    enum class Backend { Direct, Graph } backend = Backend::Direct;
    Index graph_routers = 200;
    double graph_extra_edge_fraction = 0.3;
    Index max_retries = 20;
};

/// Hop-count matrix from hosts (columns) behind k subnet border routers to
/// n passive monitors (rows). Every subnet block is b_s + d_i * 1, hence has
/// rank at most two. The direct backend draws integer hop vectors from the
/// configured ranges; the graph backend measures BFS distances on a random
/// connected router topology.
GroundTruth gen_hopcount_matrix(const HopcountConfig& cfg, Rng& rng);

/// Keeps each entry independently with probability p0.
ObservedMatrix apply_bernoulli_mask(const Matrix& full, double p0, Rng& rng);
ObservedMatrix apply_bernoulli_mask(const GroundTruth& truth, double p0, Rng& rng);

}  // namespace hrmc
