#include "nhc/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "nhc/errors.hpp"

namespace nhc::io {

namespace {

using nlohmann::json;

BreakdownReason reason_from_string(std::string_view s) {
  for (BreakdownReason r : {BreakdownReason::positivity_loss, BreakdownReason::step_failure,
                            BreakdownReason::provider_failure}) {
    if (s == nhc::to_string(r)) return r;
  }
  throw Error(ErrorKind::config, "unknown breakdown reason '" + std::string(s) + "'");
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::config, "malformed number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> split_row(const std::string& line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    out.push_back(parse_double(std::string_view(line).substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::size_t column_count(const std::string& header) {
  return static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
}

void join(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << format_double(row[i]);
  }
  os << '\n';
}

template <class Samples>
std::vector<std::size_t> chosen(const Samples& s, std::size_t stride) {
  std::vector<std::size_t> idx;
  if (stride == 0) stride = 1;
  for (std::size_t k = 0; k < s.size(); k += stride) idx.push_back(k);
  if (!s.empty() && idx.back() != s.size() - 1) idx.push_back(s.size() - 1);
  return idx;
}

void write_footer(std::ostream& os, const std::optional<BreakdownReport>& b, Format f) {
  if (!b) return;
  if (f == Format::csv) {
    os << "# breakdown t=" << format_double(b->t_breakdown) << " reason=" << nhc::to_string(b->reason)
       << '\n';
  } else {
    json j;
    j["breakdown"] = {{"t", b->t_breakdown}, {"reason", nhc::to_string(b->reason)},
                      {"detail", b->detail}};
    os << j.dump() << '\n';
  }
}

std::optional<BreakdownReport> parse_csv_footer(const std::string& line) {
  std::istringstream ss(line.substr(1));
  std::string tag, tpart, rpart;
  ss >> tag >> tpart >> rpart;
  if (tag != "breakdown" || tpart.rfind("t=", 0) != 0 || rpart.rfind("reason=", 0) != 0) {
    return std::nullopt;
  }
  BreakdownReport r;
  r.t_breakdown = parse_double(tpart.substr(2));
  r.reason = reason_from_string(rpart.substr(7));
  return r;
}

Index dimension_from_columns(std::size_t cols, bool complex) {
  // complex: 1 + 4n + 2n^2 + 2; real: 1 + 2n + 4n^2 + 1
  for (Index n = 1; n < 64; ++n) {
    const auto N = static_cast<std::size_t>(n);
    const std::size_t want = complex ? 3 + 4 * N + 2 * N * N : 2 + 2 * N + 4 * N * N;
    if (want == cols) return n;
  }
  throw Error(ErrorKind::config, "column count does not match any dimension");
}

std::vector<double> row_major(const RMat& M) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(M.size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) v.push_back(M(i, j));
  return v;
}

RMat from_row_major(const std::vector<double>& v, std::size_t offset, Index rows, Index cols) {
  RMat M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = v.at(offset + static_cast<std::size_t>(i * cols + j));
  return M;
}

RVec from_range(const std::vector<double>& v, std::size_t offset, Index size) {
  RVec x(size);
  for (Index i = 0; i < size; ++i) x(i) = v.at(offset + static_cast<std::size_t>(i));
  return x;
}

std::vector<double> vec(const RVec& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

std::string_view to_string(Format f) { return f == Format::csv ? "csv" : "jsonl"; }

Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "jsonl") return Format::jsonl;
  throw Error(ErrorKind::config, "unknown format '" + std::string(s) + "' (csv, jsonl)");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorKind::invalid_argument, "number formatting failed");
  return std::string(buf, ptr);
}

std::string complex_csv_header(Index n) {
  std::ostringstream os;
  os << 't';
  for (Index i = 1; i <= 2 * n; ++i) os << ",Re_z_" << i;
  for (Index i = 1; i <= 2 * n; ++i) os << ",Im_z_" << i;
  for (const char* part : {"Re_B_", "Im_B_"})
    for (Index i = 1; i <= n; ++i)
      for (Index j = 1; j <= n; ++j) os << ',' << part << i << '_' << j;
  os << ",Re_alpha,Im_alpha";
  return os.str();
}

std::string real_csv_header(Index n) {
  std::ostringstream os;
  os << 't';
  for (Index i = 1; i <= 2 * n; ++i) os << ",Z_" << i;
  for (Index i = 1; i <= 2 * n; ++i)
    for (Index j = 1; j <= 2 * n; ++j) os << ",G_" << i << '_' << j;
  os << ",beta";
  return os.str();
}

void write_trajectory(std::ostream& os, const ComplexTrajectory& tr, Format f, std::size_t stride) {
  if (f == Format::csv) os << complex_csv_header(tr.n) << '\n';
  for (std::size_t k : chosen(tr.samples, stride)) {
    const ComplexSample& s = tr.samples[k];
    const std::vector<double> zr = vec(s.z.real()), zi = vec(s.z.imag());
    const std::vector<double> br = row_major(s.B.real()), bi = row_major(s.B.imag());
    if (f == Format::csv) {
      std::vector<double> row{s.t};
      for (const auto* part : {&zr, &zi, &br, &bi}) row.insert(row.end(), part->begin(), part->end());
      row.push_back(s.alpha.real());
      row.push_back(s.alpha.imag());
      join(os, row);
    } else {
      json j;
      j["t"] = s.t;
      j["z_re"] = zr;
      j["z_im"] = zi;
      j["B_re"] = br;
      j["B_im"] = bi;
      j["alpha_re"] = s.alpha.real();
      j["alpha_im"] = s.alpha.imag();
      os << j.dump() << '\n';
    }
  }
  write_footer(os, tr.breakdown, f);
}

void write_trajectory(std::ostream& os, const RealTrajectory& tr, Format f, std::size_t stride) {
  if (f == Format::csv) os << real_csv_header(tr.n) << '\n';
  for (std::size_t k : chosen(tr.samples, stride)) {
    const RealSample& s = tr.samples[k];
    const std::vector<double> Z = vec(s.Z), G = row_major(s.G);
    if (f == Format::csv) {
      std::vector<double> row{s.t};
      row.insert(row.end(), Z.begin(), Z.end());
      row.insert(row.end(), G.begin(), G.end());
      row.push_back(s.beta);
      join(os, row);
    } else {
      json j;
      j["t"] = s.t;
      j["Z"] = Z;
      j["G"] = G;
      j["beta"] = s.beta;
      os << j.dump() << '\n';
    }
  }
  write_footer(os, tr.breakdown, f);
}

ComplexTrajectory read_complex_trajectory(std::istream& is, Format f) {
  ComplexTrajectory tr;
  std::string line;
  if (f == Format::csv) {
    if (!std::getline(is, line)) throw Error(ErrorKind::config, "empty trajectory file");
    tr.n = dimension_from_columns(column_count(line), true);
    const Index n = tr.n;
    if (line != complex_csv_header(n)) throw Error(ErrorKind::config, "unexpected csv header");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (auto b = parse_csv_footer(line)) tr.breakdown = b;
        continue;
      }
      const std::vector<double> v = split_row(line);
      if (v.size() != column_count(complex_csv_header(n))) {
        throw Error(ErrorKind::config, "row has the wrong number of columns");
      }
      ComplexSample s;
      s.t = v[0];
      const auto N = static_cast<std::size_t>(n);
      s.z = from_range(v, 1, 2 * n).cast<cplx>() + I_unit * from_range(v, 1 + 2 * N, 2 * n).cast<cplx>();
      s.B = from_row_major(v, 1 + 4 * N, n, n).cast<cplx>() +
            I_unit * from_row_major(v, 1 + 4 * N + N * N, n, n).cast<cplx>();
      s.alpha = cplx(v[v.size() - 2], v.back());
      tr.samples.push_back(std::move(s));
    }
    return tr;
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("breakdown")) {
      BreakdownReport b;
      b.t_breakdown = j["breakdown"].at("t").get<double>();
      b.reason = reason_from_string(j["breakdown"].at("reason").get<std::string>());
      b.detail = j["breakdown"].value("detail", "");
      tr.breakdown = b;
      continue;
    }
    const auto zr = j.at("z_re").get<std::vector<double>>();
    const auto zi = j.at("z_im").get<std::vector<double>>();
    const auto br = j.at("B_re").get<std::vector<double>>();
    const auto bi = j.at("B_im").get<std::vector<double>>();
    const auto n = static_cast<Index>(zr.size() / 2);
    if (tr.n == 0) tr.n = n;
    if (n != tr.n || zi.size() != zr.size() || br.size() != static_cast<std::size_t>(n * n) ||
        bi.size() != br.size()) {
      throw Error(ErrorKind::config, "inconsistent record sizes");
    }
    ComplexSample s;
    s.t = j.at("t").get<double>();
    s.z = from_range(zr, 0, 2 * n).cast<cplx>() + I_unit * from_range(zi, 0, 2 * n).cast<cplx>();
    s.B = from_row_major(br, 0, n, n).cast<cplx>() + I_unit * from_row_major(bi, 0, n, n).cast<cplx>();
    s.alpha = cplx(j.at("alpha_re").get<double>(), j.at("alpha_im").get<double>());
    tr.samples.push_back(std::move(s));
  }
  return tr;
}

RealTrajectory read_real_trajectory(std::istream& is, Format f) {
  RealTrajectory tr;
  std::string line;
  if (f == Format::csv) {
    if (!std::getline(is, line)) throw Error(ErrorKind::config, "empty trajectory file");
    tr.n = dimension_from_columns(column_count(line), false);
    const Index n = tr.n;
    if (line != real_csv_header(n)) throw Error(ErrorKind::config, "unexpected csv header");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (auto b = parse_csv_footer(line)) tr.breakdown = b;
        continue;
      }
      const std::vector<double> v = split_row(line);
      if (v.size() != column_count(real_csv_header(n))) {
        throw Error(ErrorKind::config, "row has the wrong number of columns");
      }
      const auto N = static_cast<std::size_t>(n);
      tr.samples.push_back({v[0], from_range(v, 1, 2 * n), from_row_major(v, 1 + 2 * N, 2 * n, 2 * n),
                            v.back()});
    }
    return tr;
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("breakdown")) {
      BreakdownReport b;
      b.t_breakdown = j["breakdown"].at("t").get<double>();
      b.reason = reason_from_string(j["breakdown"].at("reason").get<std::string>());
      b.detail = j["breakdown"].value("detail", "");
      tr.breakdown = b;
      continue;
    }
    const auto Z = j.at("Z").get<std::vector<double>>();
    const auto G = j.at("G").get<std::vector<double>>();
    const auto n = static_cast<Index>(Z.size() / 2);
    if (tr.n == 0) tr.n = n;
    if (n != tr.n || G.size() != static_cast<std::size_t>(4 * n * n)) {
      throw Error(ErrorKind::config, "inconsistent record sizes");
    }
    tr.samples.push_back({j.at("t").get<double>(), from_range(Z, 0, 2 * n),
                          from_row_major(G, 0, 2 * n, 2 * n), j.at("beta").get<double>()});
  }
  return tr;
}

void write_file(const std::string& path, const ComplexTrajectory& tr, Format f, std::size_t stride) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::config, "cannot open '" + path + "' for writing");
  write_trajectory(os, tr, f, stride);
}

void write_file(const std::string& path, const RealTrajectory& tr, Format f, std::size_t stride) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::config, "cannot open '" + path + "' for writing");
  write_trajectory(os, tr, f, stride);
}

}  // namespace nhc::io
