#ifndef IONMOD_CSV_HPP
#define IONMOD_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace ionmod {

/// Shortest round-trip decimal form, independent of the C++ locale.
std::string format_number(double v);

/// Writes a comma-separated table to `path` via a temporary file and rename,
/// so readers never observe a partial file. Throws IoError naming the path.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Parses a file written by write_csv (header row, numeric cells).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ionmod

#endif  // IONMOD_CSV_HPP
