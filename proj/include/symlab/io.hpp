// Plain-text measure tables and full-precision CSV output.
#pragma once

#include "symlab/measure.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace symlab {

/// Header `# d=<int> h=<real> provenance=<string>` with an optional
/// ` @window=<c_1,...,c_d>;<R>;<axis>` suffix, then `x_1 ... x_d w` rows.
/// Reals are written with 17 significant digits, so a round trip is exact.
void write_measure_table(std::ostream& out, const Measure& mu);
Measure read_measure_table(std::istream& in);

void save_measure_table(const std::string& path, const Measure& mu);
Measure load_measure_table(const std::string& path);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_real(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long v);
  CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
  CsvWriter& cell(const std::string& v);
  void end_row();
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::size_t columns_;
  std::vector<std::string> row_;
  std::string body_;
};

}  // namespace symlab
