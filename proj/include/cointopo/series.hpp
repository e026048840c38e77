#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cointopo/errors.hpp"

namespace cointopo {

/// Univariate series of real samples. Missing values are carried as NaN
/// until drop_missing removes them; all downstream math requires finite data.
struct TimeSeries {
    std::vector<double> values;
    std::string label;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Aligned named channels sharing a common sample index. The index records
/// the original row positions, so row deletions stay auditable.
struct MultiSeries {
    std::vector<TimeSeries> channels;
    std::vector<std::size_t> index;

    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
    std::size_t channel_count() const { return channels.size(); }

    const TimeSeries& channel(const std::string& label) const;
    bool has_channel(const std::string& label) const;
    std::vector<std::string> labels() const;
};

/// Reads a comma-separated file with one header row of channel labels.
/// Empty cells and the literal "NaN" (case-insensitive) become missing
/// markers. When `expected_labels` is non-empty, exactly those channels are
/// extracted, in the given order; a label absent from the header is a
/// SchemaError. Malformed rows raise ParseError naming the line.
MultiSeries load_csv(const std::string& path,
                     const std::vector<std::string>& expected_labels = {});

/// Same contract as load_csv, operating on in-memory text.
MultiSeries parse_csv(const std::string& text,
                      const std::vector<std::string>& expected_labels = {});

/// Removes every row with a missing marker in any channel; surviving rows
/// keep their relative order. Raises DataError when nothing survives.
MultiSeries drop_missing(const MultiSeries& ms);

/// Rescales to sample mean 0 and sample standard deviation 1 (n-1 divisor).
/// Constant series raise DataError (degenerate variance).
TimeSeries standardize(const TimeSeries& ts);

/// Applies the first-difference operator `order` times; the result is
/// shorter by `order` samples.
TimeSeries difference(const TimeSeries& ts, int order);

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

}  // namespace cointopo
