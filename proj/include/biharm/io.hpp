#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace biharm {

inline constexpr int kSchemaVersion = 1;

// %.17g: round-trips every double.
std::string format_double(double v);

// CSV with a schema comment line ("# schema: biharm/<name>/v1") followed by
// the column header.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& schema, const std::vector<std::string>& columns);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace biharm
