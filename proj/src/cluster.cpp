#include "minos/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "minos/error.hpp"

namespace minos {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::IncompatibleVectors, "vectors have different lengths");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw Error(ErrorCode::ZeroVector, "cosine distance is undefined for a zero vector");
    }
    const double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(d, 0.0, 1.0);
}

double cosine_distance(const SpikeVector& a, const SpikeVector& b) {
    if (a.bin_width != b.bin_width || a.values.size() != b.values.size()) {
        throw Error(ErrorCode::IncompatibleVectors, "spike vectors use different binning");
    }
    if (a.is_zero() || b.is_zero()) {
        throw Error(ErrorCode::ZeroVector, "cosine distance is undefined for a workload without spikes");
    }
    return cosine_distance(std::span<const double>(a.values), std::span<const double>(b.values));
}

double euclidean_distance(const UtilizationPoint& a, const UtilizationPoint& b) {
    return std::hypot(a.app_sm_util - b.app_sm_util, a.app_dram_util - b.app_dram_util);
}

std::string_view to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::Ward: return "ward";
        case Linkage::Average: return "average";
        case Linkage::Complete: return "complete";
    }
    return "ward";
}

Linkage parse_linkage(std::string_view text) {
    if (text == "ward") return Linkage::Ward;
    if (text == "average") return Linkage::Average;
    if (text == "complete") return Linkage::Complete;
    throw Error(ErrorCode::InvalidParameter, "unknown linkage '" + std::string(text) + "'");
}

Dendrogram hac_from_distances(std::vector<std::string> leaves, const DistanceMatrix& distances, Linkage linkage) {
    const auto n = leaves.size();
    if (n < 2) {
        throw Error(ErrorCode::InsufficientData, "clustering needs at least 2 workloads");
    }
    if (distances.size() != n) {
        throw Error(ErrorCode::InvalidParameter, "distance matrix does not match the leaf count");
    }

    // Working matrix indexed by cluster id; ward works on squared distances.
    const auto total = 2 * n - 1;
    DistanceMatrix work(total);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distances(i, j);
            work.set(i, j, linkage == Linkage::Ward ? d * d : d);
        }
    }
    std::vector<std::size_t> sizes(total, 0);
    std::fill(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(n), 1);
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);

    Dendrogram out;
    out.leaves = std::move(leaves);
    out.linkage = linkage;
    out.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        // `active` stays sorted by id, so the first strict minimum is the
        // lexicographically smallest pair.
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const double d = work(active[x], active[y]);
                if (d < best) {
                    best = d;
                    bi = x;
                    bj = y;
                }
            }
        }
        const auto i = active[bi];
        const auto j = active[bj];
        const auto merged = n + step;
        const double ni = static_cast<double>(sizes[i]);
        const double nj = static_cast<double>(sizes[j]);
        for (const auto k : active) {
            if (k == i || k == j) {
                continue;
            }
            const double dki = work(k, i);
            const double dkj = work(k, j);
            double updated = 0.0;
            switch (linkage) {
                case Linkage::Ward: {
                    const double nk = static_cast<double>(sizes[k]);
                    updated = ((ni + nk) * dki + (nj + nk) * dkj - nk * best) / (ni + nj + nk);
                    break;
                }
                case Linkage::Average:
                    updated = (ni * dki + nj * dkj) / (ni + nj);
                    break;
                case Linkage::Complete:
                    updated = std::max(dki, dkj);
                    break;
            }
            work.set(k, merged, updated);
        }
        sizes[merged] = sizes[i] + sizes[j];
        const double reported = linkage == Linkage::Ward ? std::sqrt(std::max(best, 0.0)) : best;
        out.merges.push_back({i, j, reported, sizes[merged]});

        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
        active.push_back(merged);
    }
    return out;
}

Dendrogram hac_build(const std::map<std::string, SpikeVector>& vectors, Linkage linkage) {
    std::vector<std::string> leaves;
    std::vector<const SpikeVector*> vs;
    std::vector<std::string> excluded;
    for (const auto& [id, v] : vectors) {
        if (v.is_zero()) {
            excluded.push_back(id);
        } else {
            leaves.push_back(id);
            vs.push_back(&v);
        }
    }
    if (leaves.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "clustering needs at least 2 workloads with spikes");
    }
    DistanceMatrix d(leaves.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            d.set(i, j, cosine_distance(*vs[i], *vs[j]));
        }
    }
    auto out = hac_from_distances(std::move(leaves), d, linkage);
    out.excluded = std::move(excluded);
    return out;
}

std::map<std::string, int> slice_dendrogram(const Dendrogram& dendrogram, double threshold) {
    if (!(threshold >= 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "slice threshold must be non-negative");
    }
    const auto n = dendrogram.leaves.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    // Leaves under every cluster id, so a kept merge joins whole subtrees
    // even when a child merge was dropped.
    std::vector<std::vector<std::size_t>> members(n + dendrogram.merges.size());
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
    }
    for (std::size_t m = 0; m < dendrogram.merges.size(); ++m) {
        const auto& merge = dendrogram.merges[m];
        auto& into = members[n + m];
        into = members.at(merge.a);
        into.insert(into.end(), members.at(merge.b).begin(), members.at(merge.b).end());
        if (merge.distance > threshold) {
            continue;
        }
        const auto root = find(into.front());
        for (const auto leaf : into) {
            parent[find(leaf)] = root;
        }
    }

    std::map<std::string, int> labels;
    std::map<std::size_t, int> root_label;
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = find(i);
        const auto [it, inserted] = root_label.emplace(root, static_cast<int>(root_label.size()));
        labels[dendrogram.leaves[i]] = it->second;
    }
    for (const auto& id : dendrogram.excluded) {
        labels[id] = kNoSpikeClass;
    }
    return labels;
}

namespace {

double squared(const UtilizationPoint& a, const UtilizationPoint& b) {
    const double dx = a.app_sm_util - b.app_sm_util;
    const double dy = a.app_dram_util - b.app_dram_util;
    return dx * dx + dy * dy;
}

std::size_t nearest_centroid(const UtilizationPoint& p, std::span<const UtilizationPoint> centroids) {
    std::size_t best = 0;
    double best_d = squared(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

double objective(std::span<const UtilizationPoint> pts, std::span<const std::size_t> labels,
                 std::span<const UtilizationPoint> centroids) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sum += squared(pts[i], centroids[labels[i]]);
    }
    return sum;
}

std::size_t distinct_labels(std::span<const std::size_t> labels) {
    return std::set<std::size_t>(labels.begin(), labels.end()).size();
}

}  // namespace

KMeansModel kmeans_fit(const std::map<std::string, UtilizationPoint>& points, std::size_t k, std::uint64_t seed) {
    if (k < 2) {
        throw Error(ErrorCode::InvalidParameter, "k-means needs k >= 2");
    }
    if (k > points.size()) {
        throw Error(ErrorCode::InvalidParameter,
                    "k = " + std::to_string(k) + " exceeds the number of points (" + std::to_string(points.size()) + ")");
    }
    std::vector<std::string> ids;
    std::vector<UtilizationPoint> pts;
    for (const auto& [id, p] : points) {
        ids.push_back(id);
        pts.push_back(p);
    }
    const auto n = pts.size();

    std::mt19937_64 rng(seed);
    std::vector<UtilizationPoint> centroids;
    centroids.push_back(pts[rng() % n]);
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = squared(pts[i], centroids[0]);
    }
    while (centroids.size() < k) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (nearest[i] > nearest[far]) {
                far = i;
            }
        }
        centroids.push_back(pts[far]);
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared(pts[i], pts[far]));
        }
    }

    KMeansModel model;
    model.k = k;
    model.seed = seed;
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = nearest_centroid(pts[i], centroids);
    }
    model.objective_history.push_back(objective(pts, labels, centroids));

    for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
        model.iterations = iter + 1;
        std::vector<UtilizationPoint> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[labels[i]].app_sm_util += pts[i].app_sm_util;
            sums[labels[i]].app_dram_util += pts[i].app_dram_util;
            ++counts[labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            // An emptied cluster keeps its previous centroid.
            if (counts[c] > 0) {
                const auto cnt = static_cast<double>(counts[c]);
                centroids[c] = {sums[c].app_sm_util / cnt, sums[c].app_dram_util / cnt};
            }
        }
        model.objective_history.push_back(objective(pts, labels, centroids));

        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = nearest_centroid(pts[i], centroids);
            // Keep the current label on exact ties so the loop terminates.
            if (c != labels[i] && squared(pts[i], centroids[c]) < squared(pts[i], centroids[labels[i]])) {
                labels[i] = c;
                changed = true;
            }
        }
        model.objective_history.push_back(objective(pts, labels, centroids));
        if (!changed) {
            break;
        }
    }

    model.centroids = std::move(centroids);
    for (std::size_t i = 0; i < n; ++i) {
        model.assignments[ids[i]] = labels[i];
    }
    const auto occupied = distinct_labels(labels);
    if (occupied >= 2 && occupied + 1 <= n) {
        model.silhouette = silhouette_score(pts, labels);
    }
    return model;
}

double silhouette_score(std::span<const UtilizationPoint> points, std::span<const std::size_t> labels) {
    const auto n = points.size();
    if (labels.size() != n) {
        throw Error(ErrorCode::InvalidParameter, "labels do not match points");
    }
    const auto occupied = distinct_labels(labels);
    if (occupied < 2 || occupied + 1 > n) {
        throw Error(ErrorCode::InvalidParameter, "silhouette needs between 2 and N - 1 clusters");
    }
    const auto max_label = *std::max_element(labels.begin(), labels.end());
    std::vector<std::size_t> sizes(max_label + 1, 0);
    for (const auto l : labels) {
        ++sizes[l];
    }
    double total = 0.0;
    std::vector<double> sum_to(max_label + 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] == 1) {
            continue;  // singleton clusters score 0
        }
        std::fill(sum_to.begin(), sum_to.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                sum_to[labels[j]] += euclidean_distance(points[i], points[j]);
            }
        }
        const double a = sum_to[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c <= max_label; ++c) {
            if (c != labels[i] && sizes[c] > 0) {
                b = std::min(b, sum_to[c] / static_cast<double>(sizes[c]));
            }
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) {
            total += (b - a) / denom;
        }
    }
    return total / static_cast<double>(n);
}

SilhouetteSweep silhouette_sweep(const std::map<std::string, UtilizationPoint>& points,
                                 std::size_t k_min, std::size_t k_max, std::uint64_t seed) {
    if (points.size() < 4) {
        throw Error(ErrorCode::InsufficientData, "silhouette sweep needs at least 4 points");
    }
    if (k_min < 2 || k_max < k_min) {
        throw Error(ErrorCode::InvalidParameter, "silhouette sweep needs 2 <= k_min <= k_max");
    }
    const auto upper = std::min(k_max, points.size() - 1);
    if (upper < k_min) {
        throw Error(ErrorCode::InsufficientData, "too few points for the requested k range");
    }
    SilhouetteSweep out;
    double best = -std::numeric_limits<double>::infinity();
    for (auto k = k_min; k <= upper; ++k) {
        auto model = kmeans_fit(points, k, seed);
        const double score = model.silhouette.value_or(0.0);
        out.scores[k] = score;
        if (score > best) {
            best = score;
            out.best_k = k;
        }
        out.models.emplace(k, std::move(model));
    }
    return out;
}

NeighborResult nearest_power_neighbor(const SpikeVector& query, const std::map<std::string, SpikeVector>& refs,
                                      std::string_view exclude) {
    if (query.is_zero()) {
        throw Error(ErrorCode::ZeroVector, "query workload has no spikes");
    }
    std::optional<NeighborResult> best;
    for (const auto& [id, v] : refs) {
        if (id == exclude || v.is_zero()) {
            continue;
        }
        const double d = cosine_distance(query, v);
        if (!best || d < best->distance) {
            best = NeighborResult{id, d};
        }
    }
    if (!best) {
        throw Error(ErrorCode::InsufficientData, "no reference workload with spikes");
    }
    return *best;
}

NeighborResult nearest_util_neighbor(const UtilizationPoint& query, const std::map<std::string, UtilizationPoint>& refs,
                                     std::string_view exclude) {
    std::optional<NeighborResult> best;
    for (const auto& [id, p] : refs) {
        if (id == exclude) {
            continue;
        }
        const double d = euclidean_distance(query, p);
        if (!best || d < best->distance) {
            best = NeighborResult{id, d};
        }
    }
    if (!best) {
        throw Error(ErrorCode::InsufficientData, "no reference workload with utilization data");
    }
    return *best;
}

}  // namespace minos
