#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cointopo/embedding.hpp"

namespace cointopo {

/// Symmetric nonnegative distances with a zero diagonal. Each pair is
/// computed once and mirrored, so symmetry is exact.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double operator()(int i, int j) const {
        return d_[static_cast<std::size_t>(i) * n_ + j];
    }
    void set(int i, int j, double v) {
        d_[static_cast<std::size_t>(i) * n_ + j] = v;
        d_[static_cast<std::size_t>(j) * n_ + i] = v;
    }

private:
    int n_ = 0;
    std::vector<double> d_;
};

DistanceMatrix pairwise_distances(const PointCloud& pc);

/// min over points of the max distance to any other point; homology above
/// dimension 0 is trivial beyond this scale, so it is the default truncation.
double enclosing_radius(const DistanceMatrix& dm);

/// Farthest-point subsample of size k. The seed picks the initial point;
/// everything after that is deterministic (ties resolved by lowest index).
PointCloud maxmin_subsample(const PointCloud& pc, int k, std::uint64_t seed);

struct FiltrationSimplex {
    std::vector<int> vertices;  // ascending
    double scale = 0.0;         // diameter at which the simplex enters
    int dim = 0;
};

/// Explicit filtration: all simplices of dimension <= max_dim and diameter
/// <= max_scale, sorted by (scale, dimension, lexicographic vertices).
struct Filtration {
    std::vector<FiltrationSimplex> simplices;
    int max_dim = 0;
    double max_scale = 0.0;
};

inline constexpr std::size_t kDefaultSimplexCap = 5'000'000;

/// Builds the explicit Vietoris-Rips filtration. Throws SizeLimitError when
/// the simplex count would exceed `max_simplices`.
Filtration vr_filtration(const DistanceMatrix& dm, int max_dim, double max_scale,
                         std::size_t max_simplices = kDefaultSimplexCap);

struct PersistenceInterval {
    double birth = 0.0;
    double death = 0.0;
    bool essential = false;  // class alive at max_scale; death is the truncation
};

/// Intervals per homology dimension k = 0..max_dim-1. Zero-persistence pairs
/// are dropped; essential classes are truncated at max_scale and flagged.
struct PersistenceDiagram {
    std::vector<std::vector<PersistenceInterval>> intervals;
    int max_dim = 0;        // simplex dimension bound of the filtration
    double max_scale = 0.0;

    int homology_dims() const { return static_cast<int>(intervals.size()); }
    const std::vector<PersistenceInterval>& dim(int k) const { return intervals[k]; }
};

/// Boundary-matrix reduction over Z/2 of an explicit filtration.
PersistenceDiagram persistent_homology(const Filtration& f);

/// Same diagram as persistent_homology(vr_filtration(...)), computed without
/// materializing the filtration (implicit coboundary reduction with clearing
/// and shortcut detection of zero-persistence pairs). This is the path that
/// scales to hundreds of points at max_dim 3.
PersistenceDiagram rips_persistence(const DistanceMatrix& dm, int max_dim, double max_scale);

/// rips_persistence with max_scale = enclosing_radius(dm).
PersistenceDiagram rips_persistence(const DistanceMatrix& dm, int max_dim);

/// Betti numbers at a fixed scale: for each k, the count of intervals with
/// birth <= scale < death plus essential classes with birth <= scale.
std::vector<int> betti_at(const PersistenceDiagram& pd, double scale);

}  // namespace cointopo
