#include "hrmc/datagen.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace hrmc {

namespace {

Subspace random_subspace(Index n, Index r, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, r);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < r; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    return Subspace(Matrix(qr.householderQ()).leftCols(r));
}

/// Smallest principal angle between two subspaces (the angle that governs
/// how close a pair of columns from the two can get).
double min_principal_angle(const Subspace& a, const Subspace& b) {
    Matrix m = a.basis().transpose() * b.basis();
    Eigen::JacobiSVD<Matrix> svd(m);
    double c = std::clamp(svd.singularValues().maxCoeff(), -1.0, 1.0);
    return std::acos(c);
}

}  // namespace

GroundTruth gen_union_of_subspaces(const SyntheticConfig& cfg, Rng& rng) {
    if (cfg.k < 1 || cfg.n < 1 || cfg.N < 1)
        throw Error("gen_union_of_subspaces: dimensions must be positive");
    if (cfg.r < 1 || cfg.r >= cfg.n)
        throw Error("gen_union_of_subspaces: r must satisfy 1 <= r < n");

    GroundTruth truth;
    truth.model = "union-of-subspaces";
    for (Index i = 0; i < cfg.k; ++i) {
        Index redraws = 0;
        while (true) {
            Subspace s = random_subspace(cfg.n, cfg.r, rng);
            bool separated = true;
            for (const auto& other : truth.subspaces)
                if (min_principal_angle(s, other) < cfg.min_principal_angle) {
                    separated = false;
                    break;
                }
            if (separated) {
                truth.subspaces.push_back(std::move(s));
                break;
            }
            if (++redraws > cfg.max_redraws)
                throw Error("gen_union_of_subspaces: could not draw " +
                            std::to_string(cfg.k) +
                            " subspaces with the requested separation");
        }
    }

    truth.full.resize(cfg.n, cfg.N);
    truth.labels.resize(static_cast<std::size_t>(cfg.N));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Index per = cfg.N / cfg.k, extra = cfg.N % cfg.k;
    Index col = 0;
    for (Index s = 0; s < cfg.k; ++s) {
        Index count = per + (s < extra ? 1 : 0);
        const Matrix& u = truth.subspaces[static_cast<std::size_t>(s)].basis();
        for (Index c = 0; c < count; ++c, ++col) {
            Vector x;
            do {
                Vector g(cfg.r);
                for (Index i = 0; i < cfg.r; ++i) g[i] = gauss(rng);
                x = u * g;
            } while (x.norm() < 1e-12);
            truth.full.col(col) = x / x.norm();
            truth.labels[static_cast<std::size_t>(col)] = s;
        }
    }
    return truth;
}

namespace {

struct RouterGraph {
    std::vector<std::vector<Index>> adj;
};

RouterGraph random_connected_graph(Index routers, double extra_fraction, Rng& rng) {
    RouterGraph g;
    g.adj.resize(static_cast<std::size_t>(routers));
    std::vector<Index> degree(static_cast<std::size_t>(routers), 0);
    // degree-biased attachment keeps the graph connected and gives it a
    // heavy-tailed degree profile
    for (Index v = 1; v < routers; ++v) {
        double total = 0.0;
        for (Index u = 0; u < v; ++u)
            total += static_cast<double>(degree[static_cast<std::size_t>(u)] + 1);
        std::uniform_real_distribution<double> unif(0.0, total);
        double pick = unif(rng);
        Index target = 0;
        for (Index u = 0; u < v; ++u) {
            pick -= static_cast<double>(degree[static_cast<std::size_t>(u)] + 1);
            if (pick <= 0.0) {
                target = u;
                break;
            }
        }
        g.adj[static_cast<std::size_t>(v)].push_back(target);
        g.adj[static_cast<std::size_t>(target)].push_back(v);
        ++degree[static_cast<std::size_t>(v)];
        ++degree[static_cast<std::size_t>(target)];
    }
    Index extra = static_cast<Index>(extra_fraction * static_cast<double>(routers));
    std::uniform_int_distribution<Index> pick(0, routers - 1);
    std::set<std::pair<Index, Index>> have;
    for (Index e = 0; e < extra; ++e) {
        Index a = pick(rng), b = pick(rng);
        if (a == b) continue;
        auto key = std::minmax(a, b);
        if (!have.insert({key.first, key.second}).second) continue;
        g.adj[static_cast<std::size_t>(a)].push_back(b);
        g.adj[static_cast<std::size_t>(b)].push_back(a);
    }
    return g;
}

std::vector<Index> bfs_distances(const RouterGraph& g, Index source) {
    std::vector<Index> dist(g.adj.size(), -1);
    std::deque<Index> queue{source};
    dist[static_cast<std::size_t>(source)] = 0;
    while (!queue.empty()) {
        Index v = queue.front();
        queue.pop_front();
        for (Index u : g.adj[static_cast<std::size_t>(v)])
            if (dist[static_cast<std::size_t>(u)] < 0) {
                dist[static_cast<std::size_t>(u)] =
                    dist[static_cast<std::size_t>(v)] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

}  // namespace

GroundTruth gen_hopcount_matrix(const HopcountConfig& cfg, Rng& rng) {
    if (cfg.n_monitors < 1 || cfg.n_hosts < 1 || cfg.k_subnets < 1)
        throw Error("gen_hopcount_matrix: counts must be positive");
    if (cfg.border_hop_min > cfg.border_hop_max || cfg.offset_min > cfg.offset_max)
        throw Error("gen_hopcount_matrix: empty hop range");

    GroundTruth truth;
    Matrix borders(cfg.n_monitors, cfg.k_subnets);

    if (cfg.backend == HopcountConfig::Backend::Direct) {
        truth.model = "hopcount-direct";
        std::uniform_int_distribution<int> hop(cfg.border_hop_min, cfg.border_hop_max);
        for (Index s = 0; s < cfg.k_subnets; ++s)
            for (Index i = 0; i < cfg.n_monitors; ++i)
                borders(i, s) = static_cast<double>(hop(rng));
    } else {
        truth.model = "hopcount-graph";
        Index routers = std::max<Index>(cfg.graph_routers,
                                        cfg.n_monitors + cfg.k_subnets);
        RouterGraph graph;
        bool connected = false;
        for (Index attempt = 0; attempt < std::max<Index>(1, cfg.max_retries);
             ++attempt) {
            graph = random_connected_graph(routers, cfg.graph_extra_edge_fraction, rng);
            connected = true;
            auto d0 = bfs_distances(graph, 0);
            for (Index v : d0)
                if (v < 0) connected = false;
            if (connected) break;
        }
        if (!connected)
            throw Error("gen_hopcount_matrix: router graph disconnected after retries");
        auto placement = sample_without_replacement(
            routers, cfg.n_monitors + cfg.k_subnets, rng);
        std::vector<Index> monitors(placement.begin(),
                                    placement.begin() + cfg.n_monitors);
        std::vector<Index> border_nodes(placement.begin() + cfg.n_monitors,
                                        placement.end());
        for (Index s = 0; s < cfg.k_subnets; ++s) {
            auto dist = bfs_distances(graph, border_nodes[static_cast<std::size_t>(s)]);
            for (Index i = 0; i < cfg.n_monitors; ++i)
                borders(i, s) = static_cast<double>(
                    dist[static_cast<std::size_t>(monitors[static_cast<std::size_t>(i)])]);
        }
    }

    truth.full.resize(cfg.n_monitors, cfg.n_hosts);
    truth.labels.resize(static_cast<std::size_t>(cfg.n_hosts));
    std::uniform_int_distribution<Index> subnet(0, cfg.k_subnets - 1);
    std::uniform_int_distribution<int> offset(cfg.offset_min, cfg.offset_max);
    for (Index j = 0; j < cfg.n_hosts; ++j) {
        Index s = subnet(rng);
        double d = static_cast<double>(offset(rng));
        truth.full.col(j) = borders.col(s).array() + d;
        truth.labels[static_cast<std::size_t>(j)] = s;
    }
    for (Index s = 0; s < cfg.k_subnets; ++s) {
        Matrix span(cfg.n_monitors, 2);
        span.col(0) = borders.col(s);
        span.col(1) = Vector::Ones(cfg.n_monitors);
        truth.subspaces.push_back(Subspace::from_span(span));
    }
    return truth;
}

ObservedMatrix apply_bernoulli_mask(const Matrix& full, double p0, Rng& rng) {
    if (!(p0 > 0.0 && p0 <= 1.0))
        throw Error("apply_bernoulli_mask: p0 must lie in (0, 1]");
    ObservedMatrix m(full.rows(), full.cols());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index j = 0; j < full.cols(); ++j)
        for (Index i = 0; i < full.rows(); ++i)
            if (p0 >= 1.0 || unif(rng) < p0) m.insert(i, j, full(i, j));
    return m;
}

ObservedMatrix apply_bernoulli_mask(const GroundTruth& truth, double p0, Rng& rng) {
    return apply_bernoulli_mask(truth.full, p0, rng);
}

}  // namespace hrmc
