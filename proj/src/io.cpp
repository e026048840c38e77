#include "cointopo/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cointopo {

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[40];
    // Shortest representation that parses back to the same double.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file '" + path + "'");
    out << content;
    if (!out) throw DataError("failed while writing '" + path + "'");
}

std::string series_csv(const MultiSeries& ms) {
    std::ostringstream out;
    for (std::size_t c = 0; c < ms.channels.size(); ++c) {
        if (c) out << ',';
        out << ms.channels[c].label;
    }
    out << '\n';
    const std::size_t n = ms.length();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < ms.channels.size(); ++c) {
            if (c) out << ',';
            out << format_double(ms.channels[c].values[r]);
        }
        out << '\n';
    }
    return out.str();
}

void write_series_csv(const std::string& path, const MultiSeries& ms) {
    write_text_file(path, series_csv(ms));
}

std::string cloud_csv(const PointCloud& pc) {
    std::ostringstream out;
    for (int k = 0; k < pc.dim; ++k) {
        if (k) out << ',';
        out << 'x' << k;
    }
    out << '\n';
    for (std::size_t i = 0; i < pc.size(); ++i) {
        for (int k = 0; k < pc.dim; ++k) {
            if (k) out << ',';
            out << format_double(pc(i, k));
        }
        out << '\n';
    }
    return out.str();
}

void write_cloud_csv(const std::string& path, const PointCloud& pc) {
    write_text_file(path, cloud_csv(pc));
}

PointCloud read_cloud_csv(const std::string& path) {
    MultiSeries ms = load_csv(path);
    PointCloud pc;
    pc.dim = static_cast<int>(ms.channel_count());
    pc.source = path;
    const std::size_t n = ms.length();
    pc.coords.resize(n * static_cast<std::size_t>(pc.dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < pc.dim; ++k) {
            const double v = ms.channels[static_cast<std::size_t>(k)].values[i];
            if (!std::isfinite(v)) {
                throw DataError("read_cloud_csv: non-finite coordinate at row " +
                                std::to_string(i));
            }
            pc.coords[i * static_cast<std::size_t>(pc.dim) + static_cast<std::size_t>(k)] = v;
        }
    }
    if (pc.size() == 0) throw DataError("read_cloud_csv: no points in '" + path + "'");
    return pc;
}

std::string diagram_csv(const PersistenceDiagram& pd) {
    std::ostringstream out;
    out << "dimension,birth,death,essential\n";
    for (int k = 0; k < pd.homology_dims(); ++k) {
        for (const auto& iv : pd.intervals[static_cast<std::size_t>(k)]) {
            out << k << ',' << format_double(iv.birth) << ',' << format_double(iv.death)
                << ',' << (iv.essential ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

void write_diagram_csv(const std::string& path, const PersistenceDiagram& pd) {
    write_text_file(path, diagram_csv(pd));
}

PersistenceDiagram read_diagram_csv(const std::string& path) {
    MultiSeries ms = load_csv(path, {"dimension", "birth", "death", "essential"});
    PersistenceDiagram pd;
    const std::size_t n = ms.length();
    int max_dim_seen = 0;
    double max_scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        max_dim_seen = std::max(max_dim_seen, static_cast<int>(ms.channels[0].values[r]));
        max_scale = std::max(max_scale, ms.channels[2].values[r]);
    }
    pd.max_dim = max_dim_seen + 1;
    pd.max_scale = max_scale;
    pd.intervals.resize(static_cast<std::size_t>(pd.max_dim));
    for (std::size_t r = 0; r < n; ++r) {
        const int k = static_cast<int>(ms.channels[0].values[r]);
        PersistenceInterval iv;
        iv.birth = ms.channels[1].values[r];
        iv.death = ms.channels[2].values[r];
        iv.essential = ms.channels[3].values[r] != 0.0;
        pd.intervals[static_cast<std::size_t>(k)].push_back(iv);
    }
    return pd;
}

std::string diagram_svg(const PersistenceDiagram& pd, const std::string& title) {
    static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b"};
    const double size = 480.0, margin = 48.0;
    const double span = pd.max_scale > 0.0 ? pd.max_scale * 1.05 : 1.0;
    auto px = [&](double v) { return margin + v / span * (size - 2 * margin); };
    auto py = [&](double v) { return size - margin - v / span * (size - 2 * margin); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
        << size << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(span)
        << "\" y2=\"" << py(span) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(span)
        << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0)
        << "\" y2=\"" << py(span) << "\" stroke=\"black\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    }
    for (int k = 0; k < pd.homology_dims(); ++k) {
        const char* color = kColors[k % 6];
        out << "<text x=\"" << size - margin + 6 << "\" y=\"" << margin + 16 * k
            << "\" fill=\"" << color << "\" font-family=\"sans-serif\" font-size=\"12\">H"
            << k << "</text>\n";
        for (const auto& iv : pd.intervals[static_cast<std::size_t>(k)]) {
            out << "<circle cx=\"" << px(iv.birth) << "\" cy=\"" << py(iv.death)
                << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"";
            if (iv.essential) out << " stroke=\"black\"";
            out << "/>\n";
        }
    }
    out << "<text x=\"" << size / 2 << "\" y=\"" << size - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << "birth</text>\n";
    out << "<text x=\"14\" y=\"" << size / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << size / 2 << ")\">death</text>\n";
    out << "</svg>\n";
    return out.str();
}

void write_diagram_svg(const std::string& path, const PersistenceDiagram& pd,
                       const std::string& title) {
    write_text_file(path, diagram_svg(pd, title));
}

std::string labeled_matrix_csv(const std::vector<std::string>& labels,
                               const std::vector<std::vector<double>>& matrix) {
    std::ostringstream out;
    out << "label";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << labels[i];
        for (std::size_t j = 0; j < labels.size(); ++j) {
            out << ',' << format_double(matrix[i][j]);
        }
        out << '\n';
    }
    return out.str();
}

void write_labeled_matrix_csv(const std::string& path, const std::vector<std::string>& labels,
                              const std::vector<std::vector<double>>& matrix) {
    write_text_file(path, labeled_matrix_csv(labels, matrix));
}

}  // namespace cointopo
