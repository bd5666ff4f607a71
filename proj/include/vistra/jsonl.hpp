#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vistra/time_series.hpp"

namespace vistra::io {

// One JSON object per line:
//   {"id": string (optional), "label": string, "snr_db": number|null, "dt": number,
//    "t0": number (optional), "channels": {"I": [...], "Q": [...], ...},
//    "t": {"I": [...], ...} (optional explicit timestamps, e.g. after compression)}
// Channel order follows the object's key order.

/// Parses one record. Throws DataError.
MultiChannelSignal parse_signal(const std::string& line, std::size_t index);
std::string format_signal(const MultiChannelSignal& s);

/// Reads every non-empty line. Records without an id get "s<line index>".
/// Throws DataError naming the line number.
std::vector<MultiChannelSignal> read_signals(std::istream& in);
std::vector<MultiChannelSignal> read_signals(const std::filesystem::path& path);

void write_signals(const std::vector<MultiChannelSignal>& signals, std::ostream& out);
void write_signals(const std::vector<MultiChannelSignal>& signals, const std::filesystem::path& path);

struct ValidationOptions {
    std::optional<std::size_t> expect_length;
    std::vector<std::string> expect_channels;
    std::vector<std::string> allowed_labels;
};

struct ValidationResult {
    std::size_t records = 0;
    std::vector<std::string> errors;  // "line N: message"
    bool ok() const { return errors.empty(); }
};

/// Checks every record against the format and the optional expectations,
/// collecting all errors instead of stopping at the first.
ValidationResult validate_signals(std::istream& in, const ValidationOptions& opts = {});

}  // namespace vistra::io
