#include "cointopo/rips.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <unordered_map>

namespace cointopo {

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

DistanceMatrix pairwise_distances(const PointCloud& pc) {
    const int n = static_cast<int>(pc.size());
    if (n < 1) throw DataError("pairwise_distances: empty point cloud");
    DistanceMatrix dm(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double ss = 0.0;
            for (int k = 0; k < pc.dim; ++k) {
                const double diff = pc(i, k) - pc(j, k);
                ss += diff * diff;
            }
            dm.set(i, j, std::sqrt(ss));
        }
    }
    return dm;
}

double enclosing_radius(const DistanceMatrix& dm) {
    const int n = dm.size();
    double best = n > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    for (int i = 0; i < n; ++i) {
        double worst = 0.0;
        for (int j = 0; j < n; ++j) worst = std::max(worst, dm(i, j));
        best = std::min(best, worst);
    }
    return best;
}

PointCloud maxmin_subsample(const PointCloud& pc, int k, std::uint64_t seed) {
    const int n = static_cast<int>(pc.size());
    if (k < 1 || k > n) {
        throw ParamError("maxmin_subsample: k=" + std::to_string(k) + " out of range for " +
                         std::to_string(n) + " points");
    }
    std::mt19937_64 rng(seed);
    std::vector<int> chosen;
    chosen.reserve(k);
    chosen.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(n)));

    auto sqdist = [&](int a, int b) {
        double ss = 0.0;
        for (int c = 0; c < pc.dim; ++c) {
            const double diff = pc(a, c) - pc(b, c);
            ss += diff * diff;
        }
        return ss;
    };

    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    for (int step = 1; step < k; ++step) {
        const int last = chosen.back();
        int best = -1;
        double best_d = -1.0;
        for (int i = 0; i < n; ++i) {
            min_d[i] = std::min(min_d[i], sqdist(i, last));
            if (min_d[i] > best_d) {
                best_d = min_d[i];
                best = i;
            }
        }
        chosen.push_back(best);
    }

    PointCloud out;
    out.dim = pc.dim;
    out.source = pc.source.empty() ? "maxmin" : pc.source + ".maxmin";
    out.coords.reserve(static_cast<std::size_t>(k) * pc.dim);
    for (int idx : chosen) {
        auto p = pc.point(static_cast<std::size_t>(idx));
        out.coords.insert(out.coords.end(), p.begin(), p.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Explicit filtration
// ---------------------------------------------------------------------------

Filtration vr_filtration(const DistanceMatrix& dm, int max_dim, double max_scale,
                         std::size_t max_simplices) {
    if (max_dim < 1) throw ParamError("vr_filtration: max_dim must be >= 1");
    if (max_scale < 0.0) throw ParamError("vr_filtration: max_scale must be >= 0");
    const int n = dm.size();

    Filtration f;
    f.max_dim = max_dim;
    f.max_scale = max_scale;

    auto push = [&](const std::vector<int>& verts, double scale) {
        if (f.simplices.size() >= max_simplices) {
            throw SizeLimitError("vr_filtration: simplex cap " +
                                 std::to_string(max_simplices) + " exceeded");
        }
        FiltrationSimplex s;
        s.dim = static_cast<int>(verts.size()) - 1;
        s.vertices = verts;
        s.scale = scale;
        f.simplices.push_back(std::move(s));
    };

    // Grow cliques by appending vertices above the current maximum, tracking
    // the running diameter.
    std::vector<int> verts;
    auto extend = [&](auto&& self, double diam) -> void {
        const int dim = static_cast<int>(verts.size()) - 1;
        push(verts, diam);
        if (dim == max_dim) return;
        for (int w = verts.back() + 1; w < n; ++w) {
            double d = diam;
            bool ok = true;
            for (int v : verts) {
                const double dv = dm(v, w);
                if (dv > max_scale) {
                    ok = false;
                    break;
                }
                d = std::max(d, dv);
            }
            if (!ok) continue;
            verts.push_back(w);
            self(self, d);
            verts.pop_back();
        }
    };
    for (int v = 0; v < n; ++v) {
        verts.assign(1, v);
        extend(extend, 0.0);
    }

    std::sort(f.simplices.begin(), f.simplices.end(),
              [](const FiltrationSimplex& a, const FiltrationSimplex& b) {
                  if (a.scale != b.scale) return a.scale < b.scale;
                  if (a.dim != b.dim) return a.dim < b.dim;
                  return a.vertices < b.vertices;
              });
    return f;
}

// ---------------------------------------------------------------------------
// Explicit boundary-matrix reduction
// ---------------------------------------------------------------------------

namespace {

struct VertexVectorHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::vector<int> xor_merge(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    return out;
}

void sort_diagram(PersistenceDiagram& pd) {
    for (auto& dim : pd.intervals) {
        std::sort(dim.begin(), dim.end(),
                  [](const PersistenceInterval& a, const PersistenceInterval& b) {
                      if (a.birth != b.birth) return a.birth < b.birth;
                      if (a.death != b.death) return a.death < b.death;
                      return a.essential < b.essential;
                  });
    }
}

}  // namespace

PersistenceDiagram persistent_homology(const Filtration& f) {
    const std::size_t n = f.simplices.size();
    if (f.max_dim < 1) throw ParamError("persistent_homology: max_dim must be >= 1");

    std::unordered_map<std::vector<int>, int, VertexVectorHash> position;
    position.reserve(n * 2);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& s = f.simplices[j];
        if (j > 0) {
            const auto& p = f.simplices[j - 1];
            const bool sorted =
                p.scale < s.scale ||
                (p.scale == s.scale &&
                 (p.dim < s.dim || (p.dim == s.dim && p.vertices < s.vertices)));
            if (!sorted) throw ParamError("persistent_homology: filtration is not sorted");
        }
        if (!position.emplace(s.vertices, static_cast<int>(j)).second) {
            throw ParamError("persistent_homology: duplicate simplex in filtration");
        }
    }

    std::vector<std::vector<int>> by_dim(f.max_dim + 1);
    for (std::size_t j = 0; j < n; ++j) {
        by_dim[f.simplices[j].dim].push_back(static_cast<int>(j));
    }

    std::vector<char> killed(n, 0);
    std::vector<char> creator(n, 0);
    for (int j : by_dim[0]) creator[j] = 1;

    PersistenceDiagram pd;
    pd.max_dim = f.max_dim;
    pd.max_scale = f.max_scale;
    pd.intervals.resize(f.max_dim);

    std::unordered_map<int, std::vector<int>> reduced;  // pivot position -> column
    std::vector<int> face;

    for (int d = f.max_dim; d >= 1; --d) {
        for (int j : by_dim[d]) {
            if (killed[j]) continue;  // cleared: already paired as a birth
            const auto& verts = f.simplices[j].vertices;
            std::vector<int> col;
            col.reserve(verts.size());
            face.assign(verts.begin(), verts.end());
            for (std::size_t drop = 0; drop < verts.size(); ++drop) {
                face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
                auto it = position.find(face);
                if (it == position.end()) {
                    throw ParamError("persistent_homology: filtration is missing a face");
                }
                if (f.simplices[it->second].scale > f.simplices[j].scale) {
                    throw ParamError("persistent_homology: face enters after its coface");
                }
                col.push_back(it->second);
                face.insert(face.begin() + static_cast<std::ptrdiff_t>(drop), verts[drop]);
            }
            std::sort(col.begin(), col.end());

            while (!col.empty()) {
                const int piv = col.back();
                auto it = reduced.find(piv);
                if (it == reduced.end()) {
                    killed[piv] = 1;
                    const double birth = f.simplices[piv].scale;
                    const double death = f.simplices[j].scale;
                    if (death > birth) {
                        pd.intervals[d - 1].push_back({birth, death, false});
                    }
                    reduced.emplace(piv, std::move(col));
                    break;
                }
                col = xor_merge(col, it->second);
            }
            if (col.empty()) creator[j] = 1;
        }
    }

    for (std::size_t j = 0; j < n; ++j) {
        const auto& s = f.simplices[j];
        if (s.dim <= f.max_dim - 1 && creator[j] && !killed[j]) {
            pd.intervals[s.dim].push_back({s.scale, f.max_scale, true});
        }
    }
    sort_diagram(pd);
    return pd;
}

// ---------------------------------------------------------------------------
// Implicit Rips reduction (coboundary columns with clearing)
// ---------------------------------------------------------------------------

namespace {

using Rank = std::uint64_t;

struct DiamRank {
    double diam;
    Rank rank;
};

// Heap comparator: the pivot of a coboundary column is its entry with the
// smallest (diameter, rank), so order the queue as a min-heap on that key.
struct CofacetOrder {
    bool operator()(const DiamRank& a, const DiamRank& b) const {
        if (a.diam != b.diam) return a.diam > b.diam;
        return a.rank > b.rank;
    }
};

// Insert-only open-addressing map from simplex rank to a packed column id.
// The dimension-2 pass on a 400-point cloud stores ~10M pivots, which rules
// out node-based maps.
class PivotMap {
public:
    static constexpr Rank kEmpty = ~Rank{0};

    void reset(std::size_t expected) {
        std::size_t cap = 16;
        while (cap < expected * 2) cap <<= 1;
        slots_.assign(cap, {kEmpty, 0});
        mask_ = cap - 1;
        size_ = 0;
    }

    const std::uint64_t* find(Rank key) const {
        std::size_t i = hash(key) & mask_;
        while (true) {
            const auto& slot = slots_[i];
            if (slot.first == key) return &slot.second;
            if (slot.first == kEmpty) return nullptr;
            i = (i + 1) & mask_;
        }
    }

    bool contains(Rank key) const { return find(key) != nullptr; }

    void insert(Rank key, std::uint64_t value) {
        if ((size_ + 1) * 2 > slots_.size()) grow();
        insert_nocheck(key, value);
        ++size_;
    }

private:
    static std::size_t hash(Rank x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return static_cast<std::size_t>(x ^ (x >> 31));
    }

    void insert_nocheck(Rank key, std::uint64_t value) {
        std::size_t i = hash(key) & mask_;
        while (slots_[i].first != kEmpty) i = (i + 1) & mask_;
        slots_[i] = {key, value};
    }

    void grow() {
        std::vector<std::pair<Rank, std::uint64_t>> old;
        old.swap(slots_);
        slots_.assign(old.size() * 2, {kEmpty, 0});
        mask_ = slots_.size() - 1;
        for (const auto& slot : old) {
            if (slot.first != kEmpty) insert_nocheck(slot.first, slot.second);
        }
    }

    std::vector<std::pair<Rank, std::uint64_t>> slots_{16, {kEmpty, 0}};
    std::size_t mask_ = 15;
    std::size_t size_ = 0;
};

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) {
        for (int i = 0; i < n; ++i) parent_[i] = i;
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a > b) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

private:
    std::vector<int> parent_;
};

class RipsEngine {
public:
    RipsEngine(const DistanceMatrix& dm, int max_dim, double threshold)
        : dist_(dm), n_(dm.size()), max_dim_(max_dim), threshold_(threshold) {
        if (max_dim_ < 1) throw ParamError("rips_persistence: max_dim must be >= 1");
        if (max_dim_ > 6) throw ParamError("rips_persistence: max_dim too large");
        if (threshold_ < 0.0) throw ParamError("rips_persistence: max_scale must be >= 0");
        build_binomials();
    }

    PersistenceDiagram run() {
        PersistenceDiagram pd;
        pd.max_dim = max_dim_;
        pd.max_scale = threshold_;
        pd.intervals.resize(max_dim_);

        std::vector<DiamRank> columns;
        compute_dim0(pd, columns);
        for (int d = 1; d < max_dim_; ++d) {
            compute_pairs(pd, columns, d);
            if (d + 1 < max_dim_) assemble_columns(columns, d + 1);
        }
        sort_diagram(pd);
        return pd;
    }

private:
    static constexpr int kMaxVerts = 8;
    // Packed column ids: singleton columns (the common case after the
    // zero-persistence shortcut) store the simplex rank inline; reduced
    // columns with several simplices live in stored_.
    static constexpr std::uint64_t kStoredTag = std::uint64_t{1} << 63;

    void build_binomials() {
        const int kmax = max_dim_ + 2;
        binom_.assign(static_cast<std::size_t>(n_ + 1),
                      std::vector<Rank>(static_cast<std::size_t>(kmax + 1), 0));
        for (int v = 0; v <= n_; ++v) {
            binom_[v][0] = 1;
            for (int k = 1; k <= std::min(v, kmax); ++k) {
                binom_[v][k] = binom_[v - 1][k - 1] + binom_[v - 1][k];
                if (binom_[v][k] > (Rank{1} << 62)) {
                    throw SizeLimitError("rips_persistence: simplex index space overflow");
                }
            }
        }
    }

    Rank binom(int v, int k) const {
        if (k < 0 || v < k) return 0;
        return binom_[v][k];
    }

    // Decodes the colex rank of a k-subset into ascending vertices.
    void decode(Rank r, int k, int* out) const {
        int top = n_ - 1;
        for (int i = k; i >= 1; --i) {
            int lo = i - 1, hi = top;
            while (lo < hi) {
                const int mid = lo + (hi - lo + 1) / 2;
                if (binom(mid, i) <= r) {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            out[i - 1] = lo;
            r -= binom(lo, i);
            top = lo - 1;
        }
    }

    double diameter(const int* verts, int count) const {
        double d = 0.0;
        for (int a = 0; a < count; ++a) {
            for (int b = a + 1; b < count; ++b) {
                d = std::max(d, dist_(verts[a], verts[b]));
            }
        }
        return d;
    }

    void compute_dim0(PersistenceDiagram& pd, std::vector<DiamRank>& columns) {
        struct Edge {
            double diam;
            Rank rank;
            int i, j;
        };
        std::vector<Edge> edges;
        for (int j = 1; j < n_; ++j) {
            for (int i = 0; i < j; ++i) {
                const double d = dist_(i, j);
                if (d <= threshold_) {
                    edges.push_back({d, binom(j, 2) + static_cast<Rank>(i), i, j});
                }
            }
        }
        std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            if (a.diam != b.diam) return a.diam < b.diam;
            return a.rank < b.rank;
        });

        UnionFind uf(n_);
        columns.clear();
        int components = n_;
        for (const Edge& e : edges) {
            if (uf.unite(e.i, e.j)) {
                --components;
                if (e.diam > 0.0) pd.intervals[0].push_back({0.0, e.diam, false});
            } else {
                columns.push_back({e.diam, e.rank});
            }
        }
        for (int c = 0; c < components; ++c) {
            pd.intervals[0].push_back({0.0, threshold_, true});
        }
        // Merging edges are exactly the cleared dimension-1 columns; what is
        // left gets reduced in decreasing filtration order.
        std::reverse(columns.begin(), columns.end());
    }

    // All d-simplices under the threshold except those cleared as pivots of
    // the previous pass, in decreasing filtration order.
    void assemble_columns(std::vector<DiamRank>& columns, int d) {
        columns.clear();
        std::vector<int> verts(static_cast<std::size_t>(d) + 1);
        auto recurse = [&](auto&& self, int depth, int first, double diam, Rank rank) -> void {
            if (depth == d + 1) {
                if (!pivot_map_.contains(rank)) columns.push_back({diam, rank});
                return;
            }
            for (int v = first; v < n_; ++v) {
                double dd = diam;
                bool ok = true;
                for (int t = 0; t < depth; ++t) {
                    const double dv = dist_(verts[t], v);
                    if (dv > threshold_) {
                        ok = false;
                        break;
                    }
                    dd = std::max(dd, dv);
                }
                if (!ok) continue;
                verts[depth] = v;
                self(self, depth + 1, v + 1, dd, rank + binom(v, depth + 1));
            }
        };
        recurse(recurse, 0, 0, 0.0, Rank{0});
        std::sort(columns.begin(), columns.end(), [](const DiamRank& a, const DiamRank& b) {
            if (a.diam != b.diam) return a.diam > b.diam;
            return a.rank > b.rank;
        });
    }

    // Streams the cofacets of a fixed simplex in increasing rank order.
    struct CofacetEnumerator {
        const RipsEngine& eng;
        const int* verts;  // ascending
        int count;         // d+1
        double base_diam;
        int w = 0;
        int pos = 0;  // simplex vertices below w
        Rank low_prefix[kMaxVerts + 1];
        Rank high_suffix[kMaxVerts + 1];

        CofacetEnumerator(const RipsEngine& e, const int* v, int c, double diam)
            : eng(e), verts(v), count(c), base_diam(diam) {
            low_prefix[0] = 0;
            for (int i = 0; i < count; ++i) {
                low_prefix[i + 1] = low_prefix[i] + eng.binom(verts[i], i + 1);
            }
            high_suffix[count] = 0;
            for (int i = count - 1; i >= 0; --i) {
                high_suffix[i] = high_suffix[i + 1] + eng.binom(verts[i], i + 2);
            }
        }

        bool next(DiamRank& out) {
            while (w < eng.n_) {
                while (pos < count && verts[pos] == w) {
                    ++pos;
                    ++w;
                }
                if (w >= eng.n_) break;
                double d = base_diam;
                for (int t = 0; t < count; ++t) d = std::max(d, eng.dist_(verts[t], w));
                const int v = w++;
                if (d > eng.threshold_) continue;
                out.diam = d;
                out.rank = low_prefix[pos] + eng.binom(v, pos + 1) + high_suffix[pos];
                return true;
            }
            return false;
        }
    };

    using Heap = std::priority_queue<DiamRank, std::vector<DiamRank>, CofacetOrder>;

    static std::optional<DiamRank> pop_pivot(Heap& heap) {
        while (!heap.empty()) {
            DiamRank top = heap.top();
            heap.pop();
            std::size_t count = 1;
            while (!heap.empty() && heap.top().rank == top.rank) {
                heap.pop();
                ++count;
            }
            if (count & 1u) return top;
        }
        return std::nullopt;
    }

    void push_coboundary(Heap& heap, Rank simplex_rank, int d) {
        int verts[kMaxVerts];
        decode(simplex_rank, d + 1, verts);
        const double diam = diameter(verts, d + 1);
        CofacetEnumerator cof(*this, verts, d + 1, diam);
        DiamRank entry{};
        while (cof.next(entry)) heap.push(entry);
    }

    void add_column(Heap& heap, std::vector<Rank>& combination, std::uint64_t packed,
                    int d) {
        if (packed & kStoredTag) {
            for (Rank s : stored_[packed & ~kStoredTag]) {
                push_coboundary(heap, s, d);
                combination.push_back(s);
            }
        } else {
            push_coboundary(heap, packed, d);
            combination.push_back(packed);
        }
    }

    std::uint64_t pack_combination(std::vector<Rank>&& combination) {
        std::sort(combination.begin(), combination.end());
        // Cancel mod-2 duplicates.
        std::vector<Rank> compact;
        compact.reserve(combination.size());
        for (std::size_t i = 0; i < combination.size();) {
            std::size_t j = i;
            while (j < combination.size() && combination[j] == combination[i]) ++j;
            if ((j - i) & 1u) compact.push_back(combination[i]);
            i = j;
        }
        if (compact.size() == 1) return compact.front();
        stored_.push_back(std::move(compact));
        return (stored_.size() - 1) | kStoredTag;
    }

    void compute_pairs(PersistenceDiagram& pd, const std::vector<DiamRank>& columns, int d) {
        pivot_map_.reset(columns.size() + 16);
        stored_.clear();

        int verts[kMaxVerts];
        std::vector<DiamRank> scratch;
        for (const DiamRank& col : columns) {
            decode(col.rank, d + 1, verts);

            // Zero-persistence shortcut: cofacets arrive in increasing rank
            // order and can never have a smaller diameter than the column, so
            // the first one matching the column's diameter is the pivot.
            scratch.clear();
            bool shortcut_open = true;
            bool resolved = false;
            CofacetEnumerator cof(*this, verts, d + 1, col.diam);
            DiamRank entry{};
            while (cof.next(entry)) {
                if (shortcut_open && entry.diam == col.diam) {
                    shortcut_open = false;
                    if (!pivot_map_.contains(entry.rank)) {
                        pivot_map_.insert(entry.rank, col.rank);
                        resolved = true;
                        break;
                    }
                }
                scratch.push_back(entry);
            }
            if (resolved) continue;

            Heap heap(CofacetOrder{}, std::move(scratch));
            scratch = {};
            std::vector<Rank> combination{col.rank};
            while (true) {
                std::optional<DiamRank> pivot = pop_pivot(heap);
                if (!pivot) {
                    pd.intervals[d].push_back({col.diam, threshold_, true});
                    break;
                }
                const std::uint64_t* owner = pivot_map_.find(pivot->rank);
                if (owner == nullptr) {
                    if (pivot->diam > col.diam) {
                        pd.intervals[d].push_back({col.diam, pivot->diam, false});
                    }
                    pivot_map_.insert(pivot->rank, pack_combination(std::move(combination)));
                    break;
                }
                heap.push(*pivot);  // re-add so the shared pivot cancels mod 2
                add_column(heap, combination, *owner, d);
            }
        }
    }

    const DistanceMatrix& dist_;
    int n_;
    int max_dim_;
    double threshold_;
    std::vector<std::vector<Rank>> binom_;
    PivotMap pivot_map_;
    std::vector<std::vector<Rank>> stored_;
};

}  // namespace

PersistenceDiagram rips_persistence(const DistanceMatrix& dm, int max_dim, double max_scale) {
    if (dm.size() < 1) throw DataError("rips_persistence: empty distance matrix");
    RipsEngine engine(dm, max_dim, max_scale);
    return engine.run();
}

PersistenceDiagram rips_persistence(const DistanceMatrix& dm, int max_dim) {
    return rips_persistence(dm, max_dim, enclosing_radius(dm));
}

std::vector<int> betti_at(const PersistenceDiagram& pd, double scale) {
    if (scale < 0.0 || scale > pd.max_scale) {
        throw ParamError("betti_at: scale " + std::to_string(scale) + " outside [0, max_scale]");
    }
    std::vector<int> betti(pd.intervals.size(), 0);
    for (std::size_t k = 0; k < pd.intervals.size(); ++k) {
        for (const auto& iv : pd.intervals[k]) {
            if (iv.essential) {
                if (iv.birth <= scale) ++betti[k];
            } else if (iv.birth <= scale && scale < iv.death) {
                ++betti[k];
            }
        }
    }
    return betti;
}

}  // namespace cointopo
