#include "biharm/io.hpp"

#include <cstdio>

#include "biharm/error.hpp"

namespace biharm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), columns_(columns.size()) {
  if (!out_) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out_ << "# schema: biharm/" << schema << "/v" << kSchemaVersion << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (filled_ > 0) out_ << ",";
  out_ << v;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw Error(ErrorKind::kIo, "csv row width mismatch in " + path_.string());
  out_ << "\n";
  filled_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error(ErrorKind::kIo, "failed writing " + path_.string());
}

}  // namespace biharm
