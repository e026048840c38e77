#pragma once

#include <string>
#include <vector>

#include "cointopo/rips.hpp"

namespace cointopo {

/// How essential classes enter diagram distances: keep them as intervals
/// truncated at max_scale (default), or leave them out entirely.
enum class EssentialMode { Truncate, Drop };

/// One homology dimension of a diagram, prepared for matching.
std::vector<PersistenceInterval> diagram_slice(const PersistenceDiagram& pd, int k,
                                               EssentialMode mode = EssentialMode::Truncate);

/// p-Wasserstein distance between two diagram slices: minimal partial-matching
/// cost under the sup ground metric, with unmatched intervals paired to the
/// diagonal at cost (death-birth)/2. Solved exactly as an optimal assignment
/// on the diagonal-augmented cost matrix.
double wasserstein(const std::vector<PersistenceInterval>& a,
                   const std::vector<PersistenceInterval>& b, double p);

/// Exhaustive enumeration over all partial matchings; exact by construction.
/// Slices larger than `max_points` raise SizeLimitError.
double wasserstein_oracle(const std::vector<PersistenceInterval>& a,
                          const std::vector<PersistenceInterval>& b, double p,
                          std::size_t max_points = 7);

/// Pairwise diagram distances per homology dimension plus their sum.
struct DiagramDistanceMatrix {
    std::vector<std::string> labels;
    std::vector<int> dims;                                   // homology dims included
    std::vector<std::vector<std::vector<double>>> per_dimension;  // [dim index][i][j]
    std::vector<std::vector<double>> combined;               // sum over dims

    std::size_t size() const { return labels.size(); }
};

/// Each off-diagonal entry is computed once and mirrored; entries are
/// independent and run on `jobs` threads (0 = hardware concurrency).
DiagramDistanceMatrix diagram_distance_matrix(
    const std::vector<std::pair<std::string, const PersistenceDiagram*>>& diagrams,
    double p, const std::vector<int>& dims,
    EssentialMode mode = EssentialMode::Truncate, int jobs = 0);

}  // namespace cointopo
