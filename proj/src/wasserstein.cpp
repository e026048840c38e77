#include "cointopo/wasserstein.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace cointopo {

namespace {

double sup_metric(const PersistenceInterval& x, const PersistenceInterval& y) {
    return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
}

double diagonal_cost(const PersistenceInterval& x) { return (x.death - x.birth) / 2.0; }

// Exact min-cost perfect assignment on a square matrix (Jonker-Volgenant
// style shortest augmenting paths with potentials, O(n^3)).
double assignment_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += cost[match[j] - 1][j - 1];
    return total;
}

}  // namespace

std::vector<PersistenceInterval> diagram_slice(const PersistenceDiagram& pd, int k,
                                               EssentialMode mode) {
    if (k < 0 || k >= pd.homology_dims()) {
        throw ParamError("diagram_slice: dimension " + std::to_string(k) + " out of range");
    }
    std::vector<PersistenceInterval> out;
    for (const auto& iv : pd.intervals[static_cast<std::size_t>(k)]) {
        if (iv.essential && mode == EssentialMode::Drop) continue;
        out.push_back(iv);
    }
    return out;
}

double wasserstein(const std::vector<PersistenceInterval>& a,
                   const std::vector<PersistenceInterval>& b, double p) {
    if (p < 1.0) throw ParamError("wasserstein: p must be >= 1");
    const std::size_t n1 = a.size(), n2 = b.size();
    if (n1 + n2 == 0) return 0.0;

    // Augmented square matrix: each interval can match a partner or its own
    // diagonal projection; diagonal-to-diagonal is free.
    const std::size_t n = n1 + n2;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            cost[i][j] = std::pow(sup_metric(a[i], b[j]), p);
        }
        const double diag = std::pow(diagonal_cost(a[i]), p);
        for (std::size_t j = n2; j < n; ++j) cost[i][j] = diag;
    }
    for (std::size_t j = 0; j < n2; ++j) {
        const double diag = std::pow(diagonal_cost(b[j]), p);
        for (std::size_t i = n1; i < n; ++i) cost[i][j] = diag;
    }
    const double total = assignment_cost(cost);
    return std::pow(std::max(total, 0.0), 1.0 / p);
}

double wasserstein_oracle(const std::vector<PersistenceInterval>& a,
                          const std::vector<PersistenceInterval>& b, double p,
                          std::size_t max_points) {
    if (p < 1.0) throw ParamError("wasserstein_oracle: p must be >= 1");
    if (a.size() > max_points || b.size() > max_points) {
        throw SizeLimitError("wasserstein_oracle: diagram slice exceeds cap " +
                             std::to_string(max_points));
    }
    const std::size_t n1 = a.size(), n2 = b.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(n2, 0);

    auto recurse = [&](auto&& self, std::size_t i, double acc) -> void {
        if (acc >= best) return;
        if (i == n1) {
            double total = acc;
            for (std::size_t j = 0; j < n2; ++j) {
                if (!used[j]) total += std::pow(diagonal_cost(b[j]), p);
            }
            best = std::min(best, total);
            return;
        }
        self(self, i + 1, acc + std::pow(diagonal_cost(a[i]), p));  // a[i] unmatched
        for (std::size_t j = 0; j < n2; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            self(self, i + 1, acc + std::pow(sup_metric(a[i], b[j]), p));
            used[j] = 0;
        }
    };
    recurse(recurse, 0, 0.0);
    return std::pow(best, 1.0 / p);
}

DiagramDistanceMatrix diagram_distance_matrix(
    const std::vector<std::pair<std::string, const PersistenceDiagram*>>& diagrams,
    double p, const std::vector<int>& dims, EssentialMode mode, int jobs) {
    if (p < 1.0) throw ParamError("diagram_distance_matrix: p must be >= 1");
    {
        std::set<std::string> seen;
        for (const auto& [label, pd] : diagrams) {
            if (!seen.insert(label).second) {
                throw ParamError("diagram_distance_matrix: duplicate label '" + label + "'");
            }
            for (int k : dims) {
                if (k < 0 || k >= pd->homology_dims()) {
                    throw ParamError("diagram_distance_matrix: diagram '" + label +
                                     "' has no homology dimension " + std::to_string(k));
                }
            }
        }
    }

    const std::size_t n = diagrams.size();
    DiagramDistanceMatrix out;
    out.dims = dims;
    out.labels.reserve(n);
    for (const auto& [label, pd] : diagrams) out.labels.push_back(label);
    out.per_dimension.assign(dims.size(),
                             std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    out.combined.assign(n, std::vector<double>(n, 0.0));

    // Pre-slice once per (diagram, dimension).
    std::vector<std::vector<std::vector<PersistenceInterval>>> slices(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k : dims) slices[i].push_back(diagram_slice(*diagrams[i].second, k, mode));
    }

    struct Task {
        std::size_t i, j, dim_idx;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t kd = 0; kd < dims.size(); ++kd) tasks.push_back({i, j, kd});
        }
    }

    unsigned worker_count = jobs > 0 ? static_cast<unsigned>(jobs)
                                     : std::max(1u, std::thread::hardware_concurrency());
    worker_count = std::min<unsigned>(worker_count, std::max<std::size_t>(tasks.size(), 1));
    std::vector<double> results(tasks.size(), 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) break;
            const Task& task = tasks[t];
            results[t] =
                wasserstein(slices[task.i][task.dim_idx], slices[task.j][task.dim_idx], p);
        }
    };
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const Task& task = tasks[t];
        auto& m = out.per_dimension[task.dim_idx];
        m[task.i][task.j] = results[t];
        m[task.j][task.i] = results[t];
        out.combined[task.i][task.j] += results[t];
        out.combined[task.j][task.i] += results[t];
    }
    return out;
}

}  // namespace cointopo
