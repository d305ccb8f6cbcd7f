#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyperstab {

/// Sets 17-significant-digit general formatting on a CSV stream.
std::ostream& csv_precision(std::ostream& os);

/// Reads a single-column (`value`) or two-column (`x,value`) CSV of samples at
/// uniform nodes on [0,1]. A non-numeric first line is treated as a header.
std::vector<double> read_samples_csv(const std::filesystem::path& path);

/// Opens a file for writing with LF line endings, throwing on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace hyperstab
