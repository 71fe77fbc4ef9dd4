#pragma once

// Workload grouping: agglomerative clustering of spike vectors under cosine
// distance, 2-D K-means over utilization points, and nearest-neighbor queries.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minos/features.hpp"

namespace minos {

/// 1 - a.b / (|a| |b|), clamped to [0, 1].
/// Throws IncompatibleVectors on mismatched binning and ZeroVector when
/// either side has no spikes.
double cosine_distance(const SpikeVector& a, const SpikeVector& b);
double cosine_distance(std::span<const double> a, std::span<const double> b);

double euclidean_distance(const UtilizationPoint& a, const UtilizationPoint& b);

enum class Linkage { Ward, Average, Complete };

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view text);

/// Dense symmetric distance matrix.
class DistanceMatrix {
public:
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
    }

private:
    std::size_t n_;
    std::vector<double> d_;
};

/// Cluster ids follow the usual convention: leaves are 0..N-1 and the m-th
/// merge creates cluster N + m.
struct Merge {
    std::size_t a = 0;
    std::size_t b = 0;
    double distance = 0.0;
    std::size_t size = 0;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
    Linkage linkage = Linkage::Ward;
    /// Workloads without spikes; cosine distance is undefined for them.
    std::vector<std::string> excluded;
};

/// Agglomerative clustering over a precomputed distance matrix. At each step
/// the closest active pair merges; ties go to the lexicographically smallest
/// (id_a, id_b) pair. Ward uses the Lance-Williams update on squared
/// distances and reports the square root.
Dendrogram hac_from_distances(std::vector<std::string> leaves, const DistanceMatrix& distances, Linkage linkage);

/// Leaves are ordered by workload id. Zero vectors are moved to `excluded`.
Dendrogram hac_build(const std::map<std::string, SpikeVector>& vectors, Linkage linkage = Linkage::Ward);

inline constexpr int kNoSpikeClass = -1;

/// Connected components after dropping merges above `threshold`. Labels are
/// numbered by first appearance in leaf order; excluded workloads get
/// kNoSpikeClass.
std::map<std::string, int> slice_dendrogram(const Dendrogram& dendrogram, double threshold);

struct KMeansModel {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<UtilizationPoint> centroids;
    std::map<std::string, std::size_t> assignments;
    /// Mean sample silhouette; empty when fewer than two or more than N - 1
    /// clusters are occupied.
    std::optional<double> silhouette;
    /// Within-cluster sum of squares after every assignment and every update.
    std::vector<double> objective_history;
    std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxLloydIterations = 300;

/// Lloyd's algorithm with deterministic farthest-point seeding: the first
/// centroid is drawn from mt19937_64(seed), each further one is the point
/// farthest from its nearest chosen centroid.
KMeansModel kmeans_fit(const std::map<std::string, UtilizationPoint>& points, std::size_t k, std::uint64_t seed);

/// Mean sample silhouette (Euclidean). Throws InvalidParameter unless
/// 2 <= #labels <= N - 1.
double silhouette_score(std::span<const UtilizationPoint> points, std::span<const std::size_t> labels);

struct SilhouetteSweep {
    std::size_t best_k = 0;
    std::map<std::size_t, double> scores;
    std::map<std::size_t, KMeansModel> models;
};

/// Fits k = k_min..min(k_max, N - 1) and keeps the highest mean silhouette,
/// ties toward smaller k. Degenerate fits score 0.
SilhouetteSweep silhouette_sweep(const std::map<std::string, UtilizationPoint>& points,
                                 std::size_t k_min = 3, std::size_t k_max = 17, std::uint64_t seed = 0);

struct NeighborResult {
    std::string neighbor;
    double distance = 0.0;
};

/// Arg-min cosine distance, ties by workload id. References without spikes
/// are skipped; `exclude` names a reference to leave out.
NeighborResult nearest_power_neighbor(const SpikeVector& query,
                                      const std::map<std::string, SpikeVector>& refs,
                                      std::string_view exclude = {});

/// Arg-min Euclidean distance in (SM, DRAM) utilization space.
NeighborResult nearest_util_neighbor(const UtilizationPoint& query,
                                     const std::map<std::string, UtilizationPoint>& refs,
                                     std::string_view exclude = {});

}  // namespace minos
