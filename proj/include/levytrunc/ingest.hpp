#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levytrunc {

enum class InputFormat { increments, prices };

InputFormat parse_input_format(const std::string& name);

struct IngestResult {
    std::vector<double> increments;
    /// Inferred from the timestamps for price input; empty for increment input.
    std::optional<double> delta_n;
};

/// Relative tolerance on the timestamp spacing of price input.
inline constexpr double kSpacingTolerance = 1e-9;

/// Increment input: one value per row, or a headed CSV with an `increment` column.
/// Price input: (timestamp, price) rows; increments are successive price differences and delta_n
/// is the common timestamp spacing. An optional non-numeric header row is skipped.
IngestResult ingest_csv(std::istream& is, InputFormat format);
IngestResult ingest_csv(const std::string& path, InputFormat format);

} // namespace levytrunc
