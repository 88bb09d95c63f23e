#include "symlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace symlab {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

double parse_real(const std::string& token, const std::string& what) {
  double v = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    if (token == "inf") return INFINITY;
    throw InputError("measure table: cannot parse " + what + " '" + token + "'");
  }
  return v;
}

std::string take_field(const std::string& header, const std::string& key, std::size_t& pos) {
  const std::size_t at = header.find(key, pos);
  if (at == std::string::npos) throw InputError("measure table: header lacks '" + key + "'");
  const std::size_t begin = at + key.size();
  std::size_t end = header.find(' ', begin);
  if (end == std::string::npos) end = header.size();
  pos = end;
  return header.substr(begin, end - begin);
}

}  // namespace

void write_measure_table(std::ostream& out, const Measure& mu) {
  const int d = mu.dim();
  out << "# d=" << d << " h=" << format_real(mu.resolution()) << " provenance=" << mu.provenance();
  const TrustWindow& w = mu.window();
  if (!w.unbounded()) {
    out << " @window=";
    for (int k = 0; k < d; ++k) out << (k ? "," : "") << format_real(w.center(k));
    out << ";" << format_real(w.radius) << ";" << w.axis;
  }
  out << "\n";
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    for (int k = 0; k < d; ++k) out << format_real(mu.position(i)(k)) << " ";
    out << format_real(mu.weight(i)) << "\n";
  }
}

Measure read_measure_table(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0) throw InputError("measure table: missing header");
  std::size_t pos = 0;
  const int d = static_cast<int>(parse_real(take_field(header, "d=", pos), "dimension"));
  if (d < 1) throw InputError("measure table: dimension must be positive");
  const double h = parse_real(take_field(header, "h=", pos), "resolution");
  const std::size_t prov_at = header.find("provenance=", pos);
  if (prov_at == std::string::npos) throw InputError("measure table: header lacks 'provenance='");
  std::string provenance = header.substr(prov_at + 11);
  TrustWindow window;
  const std::size_t win_at = provenance.rfind(" @window=");
  if (win_at != std::string::npos) {
    std::string spec = provenance.substr(win_at + 9);
    provenance.resize(win_at);
    std::replace(spec.begin(), spec.end(), ',', ' ');
    std::replace(spec.begin(), spec.end(), ';', ' ');
    std::istringstream ws(spec);
    window.center = Vec(d);
    std::string tok;
    for (int k = 0; k < d; ++k) {
      if (!(ws >> tok)) throw InputError("measure table: short window center");
      window.center(k) = parse_real(tok, "window center");
    }
    if (!(ws >> tok)) throw InputError("measure table: window radius missing");
    window.radius = parse_real(tok, "window radius");
    if (!(ws >> window.axis)) throw InputError("measure table: window axis missing");
  }
  std::vector<double> values;
  std::string line, tok;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int count = 0;
    while (ls >> tok) {
      values.push_back(parse_real(tok, "entry"));
      ++count;
    }
    if (count != d + 1) throw InputError("measure table: expected " + std::to_string(d + 1) + " columns per row");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(values.size()) / (d + 1);
  Mat positions(d, n);
  Vec weights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) positions(k, i) = values[static_cast<std::size_t>(i * (d + 1) + k)];
    weights(i) = values[static_cast<std::size_t>(i * (d + 1) + d)];
  }
  return Measure(std::move(positions), std::move(weights), h, provenance, window);
}

void save_measure_table(const std::string& path, const Measure& mu) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_measure_table(out, mu);
}

Measure load_measure_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return read_measure_table(in);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  row_ = std::move(header);
  end_row();
}

CsvWriter& CsvWriter::cell(double v) {
  row_.push_back(format_real(v));
  return *this;
}

CsvWriter& CsvWriter::cell(long v) {
  row_.push_back(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) {
    row_.push_back(v);
  } else {
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    row_.push_back(q + "\"");
  }
  return *this;
}

void CsvWriter::end_row() {
  if (row_.size() != columns_) throw InputError("csv: row has " + std::to_string(row_.size()) + " cells, expected " +
                                                std::to_string(columns_));
  for (std::size_t i = 0; i < row_.size(); ++i) body_ += (i ? "," : "") + row_[i];
  body_ += "\n";
  row_.clear();
}

std::string CsvWriter::str() const { return body_; }

void CsvWriter::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << body_;
}

}  // namespace symlab
